//! Independent reference implementations used to check the library.
//! Deliberately naive: explicit loops, integer arithmetic where possible,
//! no calls into the crate's numeric routines.

#![allow(dead_code)]

/// Conformal rank for `alpha = percent / 100`, in exact integer arithmetic:
/// `ceil((m + 1) * (100 - percent) / 100)`.
pub fn rank_for_percent(m: usize, percent: u32) -> usize {
    let num = (m + 1) * (100 - percent as usize);
    num.div_ceil(100)
}

/// Smallest score `q` with `#{s <= q} >= k`, or `+inf` if none exists.
pub fn brute_force_quantile(scores: &[f64], k: usize) -> f64 {
    let mut best = f64::INFINITY;
    for &q in scores {
        let mut count = 0;
        for &s in scores {
            if s <= q {
                count += 1;
            }
        }
        if count >= k && q < best {
            best = q;
        }
    }
    best
}

pub fn naive_picp(truths: &[f64], bounds: &[(f64, f64)]) -> f64 {
    let mut hits = 0u64;
    for i in 0..truths.len() {
        let (l, u) = bounds[i];
        if truths[i] >= l && truths[i] <= u {
            hits += 1;
        }
    }
    hits as f64 / truths.len() as f64
}

pub fn naive_mpiw(bounds: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    for &(l, u) in bounds {
        if l == f64::NEG_INFINITY || u == f64::INFINITY {
            return f64::INFINITY;
        }
        total += u - l;
    }
    total / bounds.len() as f64
}

pub fn naive_interval_score(truths: &[f64], bounds: &[(f64, f64)], alpha: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..truths.len() {
        let (l, u) = bounds[i];
        let y = truths[i];
        let width = if l.is_infinite() || u.is_infinite() {
            f64::INFINITY
        } else {
            u - l
        };
        let mut score = width;
        if y < l {
            score += (2.0 / alpha) * (l - y);
        }
        if y > u {
            score += (2.0 / alpha) * (y - u);
        }
        total += score;
    }
    total / truths.len() as f64
}

/// Two-pass mean / population standard deviation with explicit loops.
pub fn naive_mean_std(xs: &[f64]) -> (f64, f64) {
    let mut sum = 0.0;
    for x in xs {
        sum += *x;
    }
    let mean = sum / xs.len() as f64;
    let mut ss = 0.0;
    for x in xs {
        let d = *x - mean;
        ss += d * d;
    }
    (mean, (ss / xs.len() as f64).sqrt())
}

/// erf by its Maclaurin series, accurate to ~1e-15 for |x| <= 3.
pub fn series_erf(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= -x2 / n;
        let add = term / (2.0 * n + 1.0);
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    2.0 / std::f64::consts::PI.sqrt() * sum
}

/// Inverse standard normal CDF via bisection on `series_erf`, for p in
/// [0.5, 0.998].
pub fn oracle_normal_quantile(p: f64) -> f64 {
    let cdf = |z: f64| 0.5 * (1.0 + series_erf(z / std::f64::consts::SQRT_2));
    let (mut lo, mut hi) = (0.0f64, 4.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}
