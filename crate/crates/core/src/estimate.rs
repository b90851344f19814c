//! Monte Carlo estimates with standard errors, and the adaptive driver used by
//! all integral estimators.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{SeedStream, SimRng};

/// Smallest sample size accepted for a reported estimate.
pub const MIN_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub samples: usize,
}

impl MonteCarloEstimate {
    /// Sample mean and `sd/√n` of `values`.
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::TooFewSamples { got: n, min: 2 });
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        Ok(MonteCarloEstimate { value: mean, standard_error: (var / n as f64).sqrt(), samples: n })
    }

    pub fn scaled(self, c: f64) -> Self {
        MonteCarloEstimate { value: c * self.value, standard_error: c.abs() * self.standard_error, ..self }
    }

    /// `Σ c_i X_i` for independent estimates.
    pub fn linear(terms: &[(f64, MonteCarloEstimate)]) -> Self {
        let value = terms.iter().map(|(c, e)| c * e.value).sum();
        let var: f64 = terms.iter().map(|(c, e)| (c * e.standard_error).powi(2)).sum();
        let samples = terms.iter().map(|(_, e)| e.samples).min().unwrap_or(0);
        MonteCarloEstimate { value, standard_error: var.sqrt(), samples }
    }

    /// Product of independent estimates (first-order error propagation).
    pub fn product(a: Self, b: Self) -> Self {
        let se = ((a.value * b.standard_error).powi(2) + (b.value * a.standard_error).powi(2)).sqrt();
        MonteCarloEstimate { value: a.value * b.value, standard_error: se, samples: a.samples.min(b.samples) }
    }

    /// `X^p` by the delta method.
    pub fn powf(self, p: f64) -> Self {
        let v = self.value.max(0.0);
        let d = if v > 0.0 { p * v.powf(p - 1.0) } else { 0.0 };
        MonteCarloEstimate { value: v.powf(p), standard_error: d.abs() * self.standard_error, ..self }
    }

    /// `|X − Y| / √(se_X² + se_Y²)`; infinite when both are exact and differ.
    pub fn z_distance(&self, other: &MonteCarloEstimate) -> f64 {
        let diff = (self.value - other.value).abs();
        let se = self.standard_error.hypot(other.standard_error);
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / se
        }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.standard_error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.standard_error / self.value.abs()
        }
    }
}

/// Sample sizes and stopping rule of the adaptive integrators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McBudget {
    pub min_samples: usize,
    pub max_samples: usize,
    /// Stop once `se ≤ rel_tol · |value|`.
    pub rel_tol: f64,
}

impl Default for McBudget {
    fn default() -> Self {
        McBudget { min_samples: 1 << 14, max_samples: 1 << 22, rel_tol: 0.01 }
    }
}

impl McBudget {
    pub fn fixed(samples: usize) -> Self {
        McBudget { min_samples: samples, max_samples: samples, rel_tol: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_samples < MIN_SAMPLES {
            return Err(Error::TooFewSamples { got: self.min_samples, min: MIN_SAMPLES });
        }
        if self.max_samples < self.min_samples {
            return Err(Error::InvalidParameter("max_samples below min_samples".into()));
        }
        Ok(())
    }
}

const CHUNK: usize = 1024;

/// Mean of `f` over i.i.d. draws, doubling the sample size until the budget's
/// tolerance is met. Draw `i` of chunk `c` always comes from stream
/// `stream.child(c)`, so results do not depend on the thread count.
pub fn adaptive_mean<F>(budget: &McBudget, stream: SeedStream, f: F) -> Result<MonteCarloEstimate>
where
    F: Fn(&mut SimRng) -> f64 + Sync,
{
    budget.validate()?;
    let chunks_for = |n: usize| n.div_ceil(CHUNK);
    let mut sums: Vec<(f64, f64)> = Vec::new();
    let mut target = chunks_for(budget.min_samples);
    let cap = chunks_for(budget.max_samples).max(target);
    loop {
        let start = sums.len();
        let fresh: Vec<(f64, f64)> = (start..target)
            .into_par_iter()
            .map(|c| {
                let mut rng = stream.child(c as u64).rng();
                let mut s = 0.0;
                let mut s2 = 0.0;
                for _ in 0..CHUNK {
                    let x = f(&mut rng);
                    s += x;
                    s2 += x * x;
                }
                (s, s2)
            })
            .collect();
        sums.extend(fresh);
        let n = (sums.len() * CHUNK) as f64;
        let (s, s2) = sums.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let mean = s / n;
        let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
        let se = (var / n).sqrt();
        // a zero mean may only mean no hits yet
        let done = (mean != 0.0 && se <= budget.rel_tol * mean.abs()) || sums.len() >= cap;
        if done {
            return Ok(MonteCarloEstimate { value: mean, standard_error: se, samples: n as usize });
        }
        target = (2 * sums.len()).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn adaptive_mean_of_uniform() {
        let e = adaptive_mean(&McBudget::default(), SeedStream::new(1), |r| r.random::<f64>()).unwrap();
        assert!((e.value - 0.5).abs() < 4.0 * e.standard_error);
        assert!(e.relative_error() <= 0.01);
        assert!(e.samples >= MIN_SAMPLES);
    }

    #[test]
    fn constant_integrand_is_exact() {
        let e = adaptive_mean(&McBudget::default(), SeedStream::new(1), |_| 2.5).unwrap();
        assert_eq!(e.value, 2.5);
        assert_eq!(e.standard_error, 0.0);
    }

    #[test]
    fn rejects_small_budgets() {
        assert!(adaptive_mean(&McBudget::fixed(10), SeedStream::new(1), |_| 1.0).is_err());
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                adaptive_mean(&McBudget::fixed(20_000), SeedStream::new(3), |r| r.random::<f64>().powi(2)).unwrap()
            })
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn error_propagation() {
        let a = MonteCarloEstimate { value: 2.0, standard_error: 0.1, samples: 5000 };
        let b = MonteCarloEstimate { value: 3.0, standard_error: 0.2, samples: 4000 };
        let l = MonteCarloEstimate::linear(&[(1.0, a), (-2.0, b)]);
        assert_eq!(l.value, -4.0);
        assert!((l.standard_error - (0.01f64 + 0.16).sqrt()).abs() < 1e-12);
        assert_eq!(l.samples, 4000);
        let p = MonteCarloEstimate::product(a, b);
        assert_eq!(p.value, 6.0);
        let s = a.powf(0.5);
        assert!((s.standard_error - 0.5 / 2f64.sqrt() * 0.1).abs() < 1e-12);
    }
}
