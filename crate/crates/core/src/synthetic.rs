//! Synthetic stochastic calibration model.
//!
//! Stands in for a trained calibration network run with dropout. Every
//! sample draws a ground-truth decalibration on all six axes, then for each
//! axis a hidden noise scale `s = base_scale * (1 + hetero_scale * u)`, a
//! latent center `c = y_true + s * e` and `N` passes `c + s * v_i`.
//!
//! `e` is drawn from the noise family with unit scale parameter; the pass
//! draws `v_i` are standardized to unit variance. For the Gaussian family
//! those coincide. For Student-t the true error has standard deviation
//! `s * sqrt(dof / (dof - 2))` while the ensemble spread tracks `s`, so
//! Gaussian intervals built from the spread under-cover.
//!
//! Randomness comes from ChaCha20 keyed by the trial seed. Sample `i` uses
//! stream `i`; the calibration/test shuffle uses the last stream. Results
//! are therefore identical whether samples are generated sequentially or in
//! parallel.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};

use crate::ensemble::aggregate_record;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::types::{Axis, EnsemblePrediction, PredictionRecord, SampleId};

/// Name of the pseudorandom generator, recorded in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha20";

const SHUFFLE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseFamily {
    Gaussian,
    StudentT { dof: f64 },
}

impl NoiseFamily {
    pub const DEFAULT_DOF: f64 = 3.0;

    pub fn name(&self) -> &'static str {
        match self {
            NoiseFamily::Gaussian => "gaussian",
            NoiseFamily::StudentT { .. } => "student_t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub family: NoiseFamily,
    pub base_scale: f64,
    pub hetero_scale: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            family: NoiseFamily::Gaussian,
            base_scale: 1.0,
            hetero_scale: 1.0,
        }
    }
}

impl NoiseModel {
    fn validate(&self) -> Result<()> {
        if !(self.base_scale.is_finite() && self.base_scale > 0.0) {
            return Err(Error::Config(format!(
                "base_scale must be > 0, got {}",
                self.base_scale
            )));
        }
        if !(self.hetero_scale.is_finite() && self.hetero_scale >= 0.0) {
            return Err(Error::Config(format!(
                "hetero_scale must be >= 0, got {}",
                self.hetero_scale
            )));
        }
        if let NoiseFamily::StudentT { dof } = self.family {
            if !(dof.is_finite() && dof > 2.0) {
                return Err(Error::Config(format!("student_t dof must be > 2, got {dof}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub n_samples: usize,
    /// Forward passes per ensemble.
    pub n_passes: usize,
    pub noise: NoiseModel,
    pub trans_range_cm: f64,
    pub rot_range_deg: f64,
    pub calib_fraction: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 0,
            n_samples: 1000,
            n_passes: 25,
            noise: NoiseModel::default(),
            trans_range_cm: 10.0,
            rot_range_deg: 1.0,
            calib_fraction: 0.5,
        }
    }
}

impl SimConfig {
    fn validate_ranges(&self) -> Result<()> {
        if !(self.trans_range_cm.is_finite() && self.trans_range_cm > 0.0) {
            return Err(Error::Config(format!(
                "translation range must be > 0, got {}",
                self.trans_range_cm
            )));
        }
        if !(self.rot_range_deg.is_finite() && self.rot_range_deg > 0.0) {
            return Err(Error::Config(format!(
                "rotation range must be > 0, got {}",
                self.rot_range_deg
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_ranges()?;
        self.noise.validate()?;
        if self.n_passes < 2 {
            return Err(Error::Config(format!(
                "need at least 2 passes per ensemble, got {}",
                self.n_passes
            )));
        }
        self.split_sizes().map(|_| ())
    }

    /// `(calibration, test)` sample counts.
    pub fn split_sizes(&self) -> Result<(usize, usize)> {
        let f = self.calib_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Config(format!(
                "calib_fraction must lie strictly between 0 and 1, got {f}"
            )));
        }
        let n_calib = (self.n_samples as f64 * f).round() as usize;
        if n_calib == 0 || n_calib >= self.n_samples {
            return Err(Error::Config(format!(
                "{} samples with calib_fraction {f} leave an empty calibration or test split",
                self.n_samples
            )));
        }
        Ok((n_calib, self.n_samples - n_calib))
    }

    pub fn range(&self, axis: Axis) -> f64 {
        if axis.is_translation() {
            self.trans_range_cm
        } else {
            self.rot_range_deg
        }
    }
}

/// Uniform decalibration on every axis within the configured ranges.
pub fn gen_ground_truth<R: Rng + ?Sized>(rng: &mut R, config: &SimConfig) -> Result<[f64; 6]> {
    config.validate_ranges()?;
    let mut truth = [0.0; 6];
    for axis in Axis::ALL {
        let r = config.range(axis);
        truth[axis.index()] = rng.random_range(-r..=r);
    }
    Ok(truth)
}

fn draw<R: Rng + ?Sized>(rng: &mut R, family: NoiseFamily, standardize: bool) -> f64 {
    match family {
        NoiseFamily::Gaussian => StandardNormal.sample(rng),
        NoiseFamily::StudentT { dof } => {
            let t = StudentT::new(dof).expect("validated dof").sample(rng);
            if standardize {
                t / (dof / (dof - 2.0)).sqrt()
            } else {
                t
            }
        }
    }
}

/// Emits `config.n_passes` stochastic predictions around `y_true`.
pub fn simulate_ensemble<R: Rng + ?Sized>(
    rng: &mut R,
    sample_id: SampleId,
    axis: Axis,
    y_true: f64,
    config: &SimConfig,
) -> EnsemblePrediction {
    let noise = &config.noise;
    let u: f64 = rng.random();
    let scale = noise.base_scale * (1.0 + noise.hetero_scale * u);
    let center = y_true + scale * draw(rng, noise.family, false);
    let passes = (0..config.n_passes)
        .map(|_| center + scale * draw(rng, noise.family, true))
        .collect();
    EnsemblePrediction::new(sample_id, axis, passes).expect("finite passes")
}

/// One simulated input: its truths and the six ensembles.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedSample {
    pub id: SampleId,
    pub truth: [f64; 6],
    /// Indexed by [`Axis::index`].
    pub ensembles: Vec<EnsemblePrediction>,
}

impl SimulatedSample {
    pub fn records(&self) -> Result<Vec<PredictionRecord>> {
        self.ensembles
            .iter()
            .map(|e| aggregate_record(e, self.truth[e.axis.index()]))
            .collect()
    }
}

fn sample_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn sample_id(index: usize, n_samples: usize) -> SampleId {
    let width = n_samples.saturating_sub(1).to_string().len();
    SampleId(format!("s{index:0width$}"))
}

/// Generates every sample of a trial.
pub fn simulate_samples(config: &SimConfig, exec: Execution) -> Result<Vec<SimulatedSample>> {
    config.validate()?;
    exec.map_range(config.n_samples, |i| {
        let mut rng = sample_rng(config.seed, i as u64);
        let id = sample_id(i, config.n_samples);
        let truth = gen_ground_truth(&mut rng, config)?;
        let ensembles = Axis::ALL
            .iter()
            .map(|&axis| simulate_ensemble(&mut rng, id.clone(), axis, truth[axis.index()], config))
            .collect();
        Ok(SimulatedSample { id, truth, ensembles })
    })
    .into_iter()
    .collect()
}

/// Seeded random assignment of sample indices to `(calibration, test)`.
/// Each side is returned in ascending index order.
pub fn split_indices(config: &SimConfig) -> Result<(Vec<usize>, Vec<usize>)> {
    let (n_calib, _) = config.split_sizes()?;
    let mut idx: Vec<usize> = (0..config.n_samples).collect();
    idx.shuffle(&mut sample_rng(config.seed, SHUFFLE_STREAM));
    let mut test = idx.split_off(n_calib);
    idx.sort_unstable();
    test.sort_unstable();
    Ok((idx, test))
}

/// Calibration and test records of one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSplit {
    pub axis: Axis,
    pub calibration: Vec<PredictionRecord>,
    pub test: Vec<PredictionRecord>,
}

/// Disjoint calibration/test record sets for all six axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub calibration_ids: Vec<SampleId>,
    pub test_ids: Vec<SampleId>,
    /// Indexed by [`Axis::index`].
    pub axes: Vec<AxisSplit>,
}

impl Trial {
    pub fn axis(&self, axis: Axis) -> &AxisSplit {
        &self.axes[axis.index()]
    }

    /// Builds the split from already generated samples.
    pub fn from_samples(samples: &[SimulatedSample], config: &SimConfig) -> Result<Trial> {
        let (calib_idx, test_idx) = split_indices(config)?;
        let records = samples
            .iter()
            .map(SimulatedSample::records)
            .collect::<Result<Vec<_>>>()?;
        let axes = Axis::ALL
            .iter()
            .map(|&axis| AxisSplit {
                axis,
                calibration: calib_idx
                    .iter()
                    .map(|&i| records[i][axis.index()].clone())
                    .collect(),
                test: test_idx
                    .iter()
                    .map(|&i| records[i][axis.index()].clone())
                    .collect(),
            })
            .collect();
        Ok(Trial {
            calibration_ids: calib_idx.iter().map(|&i| samples[i].id.clone()).collect(),
            test_ids: test_idx.iter().map(|&i| samples[i].id.clone()).collect(),
            axes,
        })
    }
}

pub fn run_trial(config: &SimConfig) -> Result<Trial> {
    run_trial_with(config, Execution::default())
}

pub fn run_trial_with(config: &SimConfig, exec: Execution) -> Result<Trial> {
    let samples = simulate_samples(config, exec)?;
    Trial::from_samples(&samples, config)
}
