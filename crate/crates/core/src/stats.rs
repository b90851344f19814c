//! Goodness-of-fit helpers.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// One-sample Kolmogorov–Smirnov statistic `sup_t |F_n(t) − F(t)|`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// KS distance to the standard normal law.
pub fn ks_normal(sample: &[f64]) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    ks_statistic(sample, |x| n.cdf(x))
}

/// Pearson χ² goodness of fit. Cells with expected count below 5 are pooled
/// into one cell. Returns `(statistic, degrees of freedom, 0.99 quantile)`.
pub fn chi_square_test(observed: &[u64], expected: &[f64]) -> (f64, usize, f64) {
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        if e >= 5.0 {
            cells.push((o as f64, e));
        } else {
            pool.0 += o as f64;
            pool.1 += e;
        }
    }
    if pool.1 > 0.0 {
        cells.push(pool);
    }
    let stat = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len().saturating_sub(1).max(1);
    let q = ChiSquared::new(dof as f64).expect("positive dof").inverse_cdf(0.99);
    (stat, dof, q)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
