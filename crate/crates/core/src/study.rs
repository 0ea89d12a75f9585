//! Monte Carlo coverage studies over many seeded trials.

use crate::conformal::{CalibrationScores, NormalBaseline};
use crate::error::Result;
use crate::exec::Execution;
use crate::metrics::{calibration_curve, evaluate, CurvePoint, MetricsReport};
use crate::synthetic::{run_trial_with, SimConfig, Trial};
use crate::types::{Alpha, Axis};

/// Metrics of one seeded trial, ordered axis-major then by alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub seed: u64,
    pub conformal: Vec<MetricsReport>,
    pub baseline: Vec<MetricsReport>,
}

impl TrialOutcome {
    pub fn conformal_for(&self, axis: Axis, alpha: Alpha) -> Option<&MetricsReport> {
        self.conformal.iter().find(|r| r.axis == axis && r.alpha == alpha)
    }

    pub fn baseline_for(&self, axis: Axis, alpha: Alpha) -> Option<&MetricsReport> {
        self.baseline.iter().find(|r| r.axis == axis && r.alpha == alpha)
    }
}

/// Evaluates conformal and normal-baseline intervals on every axis of a trial.
pub fn evaluate_trial(trial: &Trial, alphas: &[Alpha]) -> Result<(Vec<MetricsReport>, Vec<MetricsReport>)> {
    let mut conformal = Vec::with_capacity(6 * alphas.len());
    let mut baseline = Vec::with_capacity(6 * alphas.len());
    for split in &trial.axes {
        let scores = CalibrationScores::from_records(&split.calibration)?;
        for &alpha in alphas {
            conformal.push(evaluate(&split.test, &scores.calibrator(alpha))?);
            baseline.push(evaluate(&split.test, &NormalBaseline::new(alpha))?);
        }
    }
    Ok((conformal, baseline))
}

fn seeded(base: &SimConfig, seed: u64) -> SimConfig {
    SimConfig { seed, ..*base }
}

/// Runs one trial per seed. Trials are distributed over threads by `exec`;
/// each trial is generated sequentially so the work unit stays coarse.
pub fn coverage_study(
    base: &SimConfig,
    seeds: &[u64],
    alphas: &[Alpha],
    exec: Execution,
) -> Result<Vec<TrialOutcome>> {
    exec.try_map(seeds, |&seed| {
        let trial = run_trial_with(&seeded(base, seed), Execution::Sequential)?;
        let (conformal, baseline) = evaluate_trial(&trial, alphas)?;
        Ok(TrialOutcome {
            seed,
            conformal,
            baseline,
        })
    })
}

/// Calibration curve of one axis in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveOutcome {
    pub seed: u64,
    pub axis: Axis,
    pub points: Vec<CurvePoint>,
}

pub fn curve_study(
    base: &SimConfig,
    seeds: &[u64],
    alphas: &[Alpha],
    exec: Execution,
) -> Result<Vec<CurveOutcome>> {
    let per_seed = exec.try_map(seeds, |&seed| {
        let trial = run_trial_with(&seeded(base, seed), Execution::Sequential)?;
        trial
            .axes
            .iter()
            .map(|split| {
                Ok(CurveOutcome {
                    seed,
                    axis: split.axis,
                    points: calibration_curve(&split.test, &split.calibration, alphas)?,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(per_seed.into_iter().flatten().collect())
}
