//! Split conformal calibration with σ-normalized nonconformity scores.
//!
//! A [`Calibrator`] is fit once per axis and coverage level on a held-out
//! calibration set. For a new prediction `(y_hat, sigma)` it returns
//! `[y_hat - q * sigma, y_hat + q * sigma]`, where `q` is the
//! `ceil((m + 1)(1 - alpha))`-th smallest calibration score. Under
//! exchangeability the interval covers the truth with probability at least
//! `1 - alpha`.
//!
//! The normal-assumption baseline ([`NormalBaseline`]) uses the same `sigma`
//! but a Gaussian critical value instead of the calibrated quantile.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::normal::two_sided_z;
use crate::types::{Alpha, Axis, Interval, PredictionRecord};

/// Lower bound applied to `sigma` in both scoring and interval construction.
pub const SIGMA_FLOOR: f64 = 1e-9;

/// Distance of `(m + 1)(1 - alpha)` from an integer below which the integer
/// is taken as exact before the ceiling.
const RANK_EXACTNESS: f64 = 1e-9;

/// `|y_hat - y_true| / max(sigma, SIGMA_FLOOR)`.
pub fn nonconformity_score(record: &PredictionRecord) -> f64 {
    (record.y_hat - record.y_true).abs() / record.sigma.max(SIGMA_FLOOR)
}

/// 1-based rank `k = ceil((m + 1)(1 - alpha))` of the calibration score used
/// as the conformal quantile. Values of `k` above `m` mean the quantile is
/// unbounded.
pub fn quantile_rank(m: usize, alpha: Alpha) -> usize {
    let x = (m as f64 + 1.0) * (1.0 - alpha.get());
    let nearest = x.round();
    let k = if (x - nearest).abs() < RANK_EXACTNESS {
        nearest
    } else {
        x.ceil()
    };
    (k as usize).max(1)
}

/// Smallest calibration set size for which the quantile at `alpha` is finite.
pub fn min_calibration_size(alpha: Alpha) -> usize {
    // k <= m  <=>  m >= (1 - alpha) / alpha; start just below and walk up.
    let mut m = (((1.0 - alpha.get()) / alpha.get()).floor() as usize).saturating_sub(1).max(1);
    while quantile_rank(m, alpha) > m {
        m += 1;
    }
    m
}

fn validate_scores(scores: &[f64]) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::Empty("nonconformity scores"));
    }
    if scores.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(Error::NonFinite("nonconformity scores"));
    }
    Ok(())
}

/// The conformal quantile of an unsorted score list, or `+inf` when the rank
/// exceeds the number of scores.
pub fn conformal_quantile(scores: &[f64], alpha: Alpha) -> Result<f64> {
    validate_scores(scores)?;
    let k = quantile_rank(scores.len(), alpha);
    if k > scores.len() {
        return Ok(f64::INFINITY);
    }
    let mut buf = scores.to_vec();
    let (_, kth, _) = buf.select_nth_unstable_by(k - 1, f64::total_cmp);
    Ok(*kth)
}

/// Sorted nonconformity scores of one axis' calibration set. Fitting several
/// coverage levels from the same set sorts only once.
#[derive(Debug, Clone)]
pub struct CalibrationScores {
    axis: Axis,
    sorted: Vec<f64>,
}

impl CalibrationScores {
    pub fn from_records(records: &[PredictionRecord]) -> Result<Self> {
        let first = records.first().ok_or(Error::Empty("calibration records"))?;
        let axis = first.axis;
        if let Some(other) = records.iter().find(|r| r.axis != axis) {
            return Err(Error::MixedAxes {
                expected: axis,
                found: other.axis,
            });
        }
        let mut sorted: Vec<f64> = records.iter().map(nonconformity_score).collect();
        validate_scores(&sorted)?;
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(CalibrationScores { axis, sorted })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn quantile(&self, alpha: Alpha) -> f64 {
        let k = quantile_rank(self.sorted.len(), alpha);
        self.sorted.get(k - 1).copied().unwrap_or(f64::INFINITY)
    }

    pub fn calibrator(&self, alpha: Alpha) -> Calibrator {
        Calibrator {
            axis: self.axis,
            alpha,
            q: self.quantile(alpha),
            m: self.sorted.len(),
        }
    }
}

/// Anything that maps a prediction and its ensemble spread to an interval.
pub trait IntervalPredictor {
    fn alpha(&self) -> Alpha;
    fn interval(&self, y_hat: f64, sigma: f64) -> Interval;
}

/// Conformal quantile for one axis and coverage level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibrator {
    pub axis: Axis,
    pub alpha: Alpha,
    pub q: f64,
    pub m: usize,
}

impl Calibrator {
    /// Fits from calibration records that all belong to one axis.
    pub fn fit(records: &[PredictionRecord], alpha: Alpha) -> Result<Self> {
        Ok(CalibrationScores::from_records(records)?.calibrator(alpha))
    }

    /// Rebuilds a calibrator from stored fields.
    pub fn from_parts(axis: Axis, alpha: Alpha, q: f64, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Empty("calibration set"));
        }
        if q.is_nan() || q < 0.0 {
            return Err(Error::Config(format!("conformal quantile must be >= 0, got {q}")));
        }
        Ok(Calibrator { axis, alpha, q, m })
    }

    /// True when the calibration set was too small for the requested alpha.
    pub fn is_unbounded(&self) -> bool {
        self.q.is_infinite()
    }

    pub fn predict_interval(&self, y_hat: f64, sigma: f64) -> Interval {
        if self.is_unbounded() {
            return Interval::unbounded();
        }
        let half = self.q * sigma.max(SIGMA_FLOOR);
        Interval {
            lower: y_hat - half,
            upper: y_hat + half,
        }
    }
}

impl IntervalPredictor for Calibrator {
    fn alpha(&self) -> Alpha {
        self.alpha
    }

    fn interval(&self, y_hat: f64, sigma: f64) -> Interval {
        self.predict_interval(y_hat, sigma)
    }
}

/// Gaussian intervals `y_hat ± z * sigma` with `z` the `1 - alpha/2` quantile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalBaseline {
    alpha: Alpha,
    z: f64,
}

impl NormalBaseline {
    pub fn new(alpha: Alpha) -> Self {
        NormalBaseline {
            alpha,
            z: two_sided_z(alpha),
        }
    }

    pub fn z(&self) -> f64 {
        self.z
    }
}

impl IntervalPredictor for NormalBaseline {
    fn alpha(&self) -> Alpha {
        self.alpha
    }

    fn interval(&self, y_hat: f64, sigma: f64) -> Interval {
        let half = self.z * sigma;
        Interval {
            lower: y_hat - half,
            upper: y_hat + half,
        }
    }
}

pub fn normal_baseline_interval(y_hat: f64, sigma: f64, alpha: f64) -> Result<Interval> {
    let alpha = Alpha::new(alpha)?;
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidSigma(sigma));
    }
    Ok(NormalBaseline::new(alpha).interval(y_hat, sigma))
}
