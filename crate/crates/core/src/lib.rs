//! Distribution-free prediction intervals for Monte Carlo dropout ensembles.
//!
//! The pipeline turns N stochastic forward passes per sample into a mean
//! prediction and spread ([`ensemble`]), fits a split conformal quantile of
//! the σ-normalized residuals on a held-out calibration set ([`conformal`]),
//! and scores the resulting intervals ([`metrics`]). [`synthetic`] provides a
//! seeded six-axis simulator used to check the coverage guarantee, and
//! [`study`] runs it over many seeds.
//!
//! ```
//! use mcd_conformal::{aggregate_record, Alpha, Axis, Calibrator, EnsemblePrediction, SampleId};
//!
//! let calib: Vec<_> = (0..20)
//!     .map(|i| {
//!         let passes = vec![i as f64, i as f64 + 1.0];
//!         let e = EnsemblePrediction::new(SampleId::new(format!("c{i}")), Axis::X, passes).unwrap();
//!         aggregate_record(&e, i as f64 + 0.25).unwrap()
//!     })
//!     .collect();
//! let cal = Calibrator::fit(&calib, Alpha::new(0.1).unwrap()).unwrap();
//! let interval = cal.predict_interval(3.0, 0.5);
//! assert!(interval.covers(3.0));
//! ```

pub mod cli;
pub mod conformal;
pub mod ensemble;
pub mod error;
pub mod exec;
pub mod io;
pub mod metrics;
pub mod normal;
pub mod study;
pub mod synthetic;
pub mod types;

pub use conformal::{
    conformal_quantile, nonconformity_score, normal_baseline_interval, quantile_rank, CalibrationScores,
    Calibrator, IntervalPredictor, NormalBaseline, SIGMA_FLOOR,
};
pub use ensemble::{aggregate, aggregate_record, AggregateResult};
pub use error::{Error, Result};
pub use exec::Execution;
pub use metrics::{
    calibration_curve, evaluate, interval_score, mpiw, ordered_plot_data, picp, CurvePoint, MetricsReport,
    PlotPoint,
};
pub use synthetic::{run_trial, NoiseFamily, NoiseModel, SimConfig, Trial};
pub use types::{Alpha, Axis, EnsemblePrediction, Interval, PredictionRecord, SampleId};
