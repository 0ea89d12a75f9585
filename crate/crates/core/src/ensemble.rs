//! Aggregation of Monte Carlo dropout passes into a mean prediction and a
//! dispersion estimate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::{EnsemblePrediction, PredictionRecord};

/// Ensemble mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AggregateResult {
    pub y_hat: f64,
    pub sigma: f64,
}

/// Mean and population (1/N) standard deviation of the passes.
///
/// Summation runs left to right. A constant ensemble returns exactly its
/// value with `sigma == 0`.
pub fn aggregate(passes: &[f64]) -> Result<AggregateResult> {
    if passes.len() < 2 {
        return Err(Error::InsufficientEnsemble(passes.len()));
    }
    if passes.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("ensemble passes"));
    }
    let first = passes[0];
    if passes.iter().all(|&v| v == first) {
        return Ok(AggregateResult {
            y_hat: first,
            sigma: 0.0,
        });
    }
    let n = passes.len() as f64;
    let y_hat = passes.iter().sum::<f64>() / n;
    let var = passes.iter().map(|v| (v - y_hat).powi(2)).sum::<f64>() / n;
    Ok(AggregateResult {
        y_hat,
        sigma: var.sqrt(),
    })
}

pub fn aggregate_record(ensemble: &EnsemblePrediction, y_true: f64) -> Result<PredictionRecord> {
    let agg = aggregate(ensemble.passes())?;
    PredictionRecord::new(
        ensemble.sample_id.clone(),
        ensemble.axis,
        y_true,
        agg.y_hat,
        agg.sigma,
    )
}
