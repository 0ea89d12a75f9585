//! Domain types shared by every stage of the pipeline.
//!
//! Values are stored as plain `f64`; the [`Axis`] a value belongs to carries
//! its unit (centimeters for translations, degrees for rotations).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// One of the six extrinsic calibration degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
    Roll,
    Pitch,
    Yaw,
}

impl Axis {
    pub const ALL: [Axis; 6] = [
        Axis::X,
        Axis::Y,
        Axis::Z,
        Axis::Roll,
        Axis::Pitch,
        Axis::Yaw,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
            Axis::Roll => "Roll",
            Axis::Pitch => "Pitch",
            Axis::Yaw => "Yaw",
        }
    }

    pub fn unit(self) -> &'static str {
        if self.is_translation() {
            "cm"
        } else {
            "deg"
        }
    }

    pub fn is_translation(self) -> bool {
        matches!(self, Axis::X | Axis::Y | Axis::Z)
    }

    /// Position in [`Axis::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// Labels are matched exactly; `x` or `roll` are rejected.
    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| Error::UnknownAxis(s.to_string()))
    }
}

/// Opaque identifier of one sample (one input frame in the real system).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SampleId(pub String);

impl SampleId {
    pub fn new(id: impl Into<String>) -> Self {
        SampleId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SampleId {
    fn from(s: &str) -> Self {
        SampleId(s.to_string())
    }
}

/// Miscoverage level α, strictly inside (0, 1). The target coverage is 1 − α.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Alpha(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn target_coverage(self) -> f64 {
        1.0 - self.0
    }

    /// The 90 / 95 / 99 % targets.
    pub fn defaults() -> Vec<Alpha> {
        vec![Alpha(0.1), Alpha(0.05), Alpha(0.01)]
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The raw outputs of N stochastic forward passes for one sample and axis.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsemblePrediction {
    pub sample_id: SampleId,
    pub axis: Axis,
    passes: Vec<f64>,
}

impl EnsemblePrediction {
    pub fn new(sample_id: SampleId, axis: Axis, passes: Vec<f64>) -> Result<Self> {
        if passes.is_empty() {
            return Err(Error::Empty("ensemble passes"));
        }
        if passes.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ensemble passes"));
        }
        Ok(EnsemblePrediction {
            sample_id,
            axis,
            passes,
        })
    }

    pub fn passes(&self) -> &[f64] {
        &self.passes
    }

    pub fn len(&self) -> usize {
        self.passes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.passes.is_empty()
    }
}

/// Ground truth joined with the aggregated ensemble for one sample and axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRecord {
    pub sample_id: SampleId,
    pub axis: Axis,
    pub y_true: f64,
    pub y_hat: f64,
    pub sigma: f64,
}

impl PredictionRecord {
    pub fn new(sample_id: SampleId, axis: Axis, y_true: f64, y_hat: f64, sigma: f64) -> Result<Self> {
        if !y_true.is_finite() {
            return Err(Error::NonFinite("y_true"));
        }
        if !y_hat.is_finite() {
            return Err(Error::NonFinite("y_hat"));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidSigma(sigma));
        }
        Ok(PredictionRecord {
            sample_id,
            axis,
            y_true,
            y_hat,
            sigma,
        })
    }

    /// Signed prediction error `y_hat - y_true`.
    pub fn error(&self) -> f64 {
        self.y_hat - self.y_true
    }
}

/// Closed prediction interval `[lower, upper]`; bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(Error::InvalidInterval { lower, upper });
        }
        Ok(Interval { lower, upper })
    }

    pub const fn unbounded() -> Self {
        Interval {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }

    /// `upper - lower`, or `+inf` when either bound is infinite.
    pub fn width(&self) -> f64 {
        if self.lower.is_infinite() || self.upper.is_infinite() {
            f64::INFINITY
        } else {
            self.upper - self.lower
        }
    }

    /// Closed on both sides: a truth sitting exactly on a bound is covered.
    pub fn covers(&self, y: f64) -> bool {
        self.lower <= y && y <= self.upper
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    pub fn is_finite(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }
}
