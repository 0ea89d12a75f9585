//! Interval quality metrics: PICP, MPIW, interval score, calibration curves
//! and ordered-interval plot data.

use serde::Serialize;

use crate::conformal::{CalibrationScores, IntervalPredictor};
use crate::error::{Error, Result};
use crate::types::{Alpha, Axis, Interval, PredictionRecord};

fn check_pair(truths: &[f64], intervals: &[Interval]) -> Result<()> {
    if truths.len() != intervals.len() {
        return Err(Error::LengthMismatch {
            left: truths.len(),
            right: intervals.len(),
        });
    }
    if truths.is_empty() {
        return Err(Error::Empty("metric input"));
    }
    Ok(())
}

/// Fraction of truths inside their (closed) interval.
pub fn picp(truths: &[f64], intervals: &[Interval]) -> Result<f64> {
    check_pair(truths, intervals)?;
    let hits = truths
        .iter()
        .zip(intervals)
        .filter(|(y, i)| i.covers(**y))
        .count();
    Ok(hits as f64 / truths.len() as f64)
}

/// Mean interval width; a single unbounded interval makes it `+inf`.
pub fn mpiw(intervals: &[Interval]) -> Result<f64> {
    if intervals.is_empty() {
        return Err(Error::Empty("intervals"));
    }
    Ok(intervals.iter().map(Interval::width).sum::<f64>() / intervals.len() as f64)
}

/// Score of a single interval: width plus `2/alpha` times the miss distance.
pub fn interval_score_one(y: f64, interval: &Interval, alpha: Alpha) -> f64 {
    let penalty = 2.0 / alpha.get();
    let mut s = interval.width();
    if y < interval.lower {
        s += penalty * (interval.lower - y);
    } else if y > interval.upper {
        s += penalty * (y - interval.upper);
    }
    s
}

/// Mean interval score; lower is better.
pub fn interval_score(truths: &[f64], intervals: &[Interval], alpha: Alpha) -> Result<f64> {
    check_pair(truths, intervals)?;
    let total: f64 = truths
        .iter()
        .zip(intervals)
        .map(|(y, i)| interval_score_one(*y, i, alpha))
        .sum();
    Ok(total / truths.len() as f64)
}

/// PICP, MPIW and IS of one axis at one coverage level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub axis: Axis,
    pub alpha: Alpha,
    pub picp: f64,
    pub mpiw: f64,
    pub interval_score: f64,
    pub n: usize,
}

impl MetricsReport {
    pub fn target_coverage(&self) -> f64 {
        self.alpha.target_coverage()
    }
}

fn single_axis(records: &[PredictionRecord], what: &'static str) -> Result<Axis> {
    let axis = records.first().ok_or(Error::Empty(what))?.axis;
    match records.iter().find(|r| r.axis != axis) {
        Some(r) => Err(Error::MixedAxes {
            expected: axis,
            found: r.axis,
        }),
        None => Ok(axis),
    }
}

pub fn intervals_for<P: IntervalPredictor + ?Sized>(
    records: &[PredictionRecord],
    predictor: &P,
) -> Vec<Interval> {
    records
        .iter()
        .map(|r| predictor.interval(r.y_hat, r.sigma))
        .collect()
}

/// Builds intervals for one axis' test records and scores them.
pub fn evaluate<P: IntervalPredictor + ?Sized>(
    records: &[PredictionRecord],
    predictor: &P,
) -> Result<MetricsReport> {
    let axis = single_axis(records, "test records")?;
    let intervals = intervals_for(records, predictor);
    let truths: Vec<f64> = records.iter().map(|r| r.y_true).collect();
    let alpha = predictor.alpha();
    Ok(MetricsReport {
        axis,
        alpha,
        picp: picp(&truths, &intervals)?,
        mpiw: mpiw(&intervals)?,
        interval_score: interval_score(&truths, &intervals, alpha)?,
        n: records.len(),
    })
}

/// Expected versus observed coverage at one alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub expected: f64,
    pub observed: f64,
}

/// Fits a calibrator per alpha on `calib_records` and measures PICP on
/// `records`. Both sets must share one axis.
pub fn calibration_curve(
    records: &[PredictionRecord],
    calib_records: &[PredictionRecord],
    alphas: &[Alpha],
) -> Result<Vec<CurvePoint>> {
    let axis = single_axis(records, "test records")?;
    let scores = CalibrationScores::from_records(calib_records)?;
    if scores.axis() != axis {
        return Err(Error::MixedAxes {
            expected: scores.axis(),
            found: axis,
        });
    }
    let truths: Vec<f64> = records.iter().map(|r| r.y_true).collect();
    alphas
        .iter()
        .map(|&alpha| {
            let cal = scores.calibrator(alpha);
            let intervals = intervals_for(records, &cal);
            Ok(CurvePoint {
                expected: alpha.target_coverage(),
                observed: picp(&truths, &intervals)?,
            })
        })
        .collect()
}

/// One row of ordered-interval plot data, expressed relative to the truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlotPoint {
    /// Position after sorting by `y_true`.
    pub rank: usize,
    /// Position in the input.
    pub index: usize,
    pub y_true: f64,
    pub deviation: f64,
    pub lower_dev: f64,
    pub upper_dev: f64,
}

/// Centered moving average; near the edges the window shrinks to the
/// available neighbours.
pub fn moving_average(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidWindow(window));
    }
    let half = window / 2;
    let n = series.len();
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let slice = &series[lo..=hi];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect())
}

/// Sorts samples by ground truth (stable) and smooths the deviation, lower
/// and upper offsets with a centered moving average of `window` points.
pub fn ordered_plot_data(
    records: &[PredictionRecord],
    intervals: &[Interval],
    window: usize,
) -> Result<Vec<PlotPoint>> {
    if records.len() != intervals.len() {
        return Err(Error::LengthMismatch {
            left: records.len(),
            right: intervals.len(),
        });
    }
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidWindow(window));
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].y_true.total_cmp(&records[b].y_true));

    let deviation: Vec<f64> = order.iter().map(|&i| records[i].error()).collect();
    let lower: Vec<f64> = order
        .iter()
        .map(|&i| intervals[i].lower - records[i].y_true)
        .collect();
    let upper: Vec<f64> = order
        .iter()
        .map(|&i| intervals[i].upper - records[i].y_true)
        .collect();
    let deviation = moving_average(&deviation, window)?;
    let lower = moving_average(&lower, window)?;
    let upper = moving_average(&upper, window)?;

    Ok(order
        .iter()
        .enumerate()
        .map(|(rank, &index)| PlotPoint {
            rank,
            index,
            y_true: records[index].y_true,
            deviation: deviation[rank],
            lower_dev: lower[rank],
            upper_dev: upper[rank],
        })
        .collect())
}
