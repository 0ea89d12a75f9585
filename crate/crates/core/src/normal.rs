//! Standard normal quantiles by bisection on the complementary error function.

use crate::types::Alpha;

const BISECTION_TOL: f64 = 1e-10;

/// Standard normal CDF, `0.5 * erfc(-z / sqrt(2))`.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Inverse standard normal CDF for `p` in (0, 1).
///
/// Bisects [`normal_cdf`] until the bracket is narrower than 1e-10.
/// Returns NaN outside (0, 1).
pub fn normal_quantile(p: f64) -> f64 {
    if !(p > 0.0 && p < 1.0) {
        return f64::NAN;
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sided critical value `z` with `P(|Z| <= z) = 1 - alpha`.
pub fn two_sided_z(alpha: Alpha) -> f64 {
    normal_quantile(1.0 - alpha.get() / 2.0)
}
