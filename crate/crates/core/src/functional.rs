//! Simplex counts, generalized Euler characteristics and the difference
//! operators `Λ^k`.

use serde::{Deserialize, Serialize};

use crate::complex::{AugmentedSample, ComplexSample};
use crate::error::{Error, Result};

/// Coefficients `a = (a_0, …, a_α)` of `χ_a = Σ a_i f_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefficientVector(pub Vec<f64>);

impl CoefficientVector {
    /// Classical Euler characteristic, `a_i = (−1)^i`.
    pub fn euler(alpha: usize) -> Self {
        CoefficientVector((0..=alpha).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect())
    }

    /// `e_j`: picks out `f_j`.
    pub fn unit(alpha: usize, j: usize) -> Self {
        let mut a = vec![0.0; alpha + 1];
        a[j] = 1.0;
        CoefficientVector(a)
    }

    pub fn alpha(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn check_len(&self, alpha: usize) -> Result<()> {
        if self.0.len() != alpha + 1 {
            return Err(Error::LengthMismatch { expected: alpha + 1, got: self.0.len() });
        }
        Ok(())
    }

    /// `Σ a_i c_i`.
    pub fn apply(&self, counts: &[usize]) -> f64 {
        self.0.iter().zip(counts).map(|(a, &c)| a * c as f64).sum()
    }
}

/// `(f_0, …, f_α)`.
pub fn simplex_counts(c: &ComplexSample) -> Vec<usize> {
    c.counts()
}

pub fn euler_characteristic(c: &ComplexSample, a: &CoefficientVector) -> Result<f64> {
    a.check_len(c.alpha())?;
    Ok(a.apply(&c.counts()))
}

/// `f_i^{x_{r_1}, …}`: the number of `i`-simplices of the retained complex that
/// contain all added points listed in `required` (1-based).
pub fn restricted_counts(aug: &AugmentedSample, required: &[usize], i: usize) -> Result<usize> {
    if let Some(&bad) = required.iter().find(|&&r| r == 0 || r > aug.added_len()) {
        return Err(Error::RetainedOutOfRange { index: bad, len: aug.added_len() });
    }
    let need: Vec<u32> = required.iter().map(|&r| aug.added_index(r)).collect();
    Ok(aug.complex().simplices(i).filter(|s| need.iter().all(|v| s.contains(v))).count())
}

/// A real functional of a complex.
pub trait Functional {
    fn eval(&self, c: &ComplexSample) -> f64;
}

impl<F: Fn(&ComplexSample) -> f64> Functional for F {
    fn eval(&self, c: &ComplexSample) -> f64 {
        self(c)
    }
}

impl Functional for CoefficientVector {
    fn eval(&self, c: &ComplexSample) -> f64 {
        self.apply(&c.counts())
    }
}

/// `Λ^k f = Σ_{I ⊆ {1,…,k}} (−1)^{k−|I|} f(Δ^{x_1,…,x_l, I})`, evaluated by
/// materialising every retained complex of the augmented build `aug`
/// (`l = aug.added_len()`).
pub fn lambda_operator(aug: &AugmentedSample, k: usize, f: &dyn Functional) -> Result<f64> {
    let l = aug.added_len();
    if k > l {
        return Err(Error::IndexRange(format!("k = {k} exceeds the {l} added points")));
    }
    let mut total = 0.0;
    for subset in 0u32..(1 << k) {
        let retained: Vec<usize> = (1..=k).filter(|i| subset & (1 << (i - 1)) != 0).collect();
        let value = f.eval(aug.with_retained(&retained)?.complex());
        let sign = if (k - retained.len()) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * value;
    }
    Ok(total)
}

/// `Σ_i a_i f_i^{x_1,…,x_k}(Δ^{x_1,…,x_l, {1,…,k}})`, the closed form of
/// `Λ^k χ_a`.
pub fn lambda_euler_closed_form(aug: &AugmentedSample, k: usize, a: &CoefficientVector) -> Result<f64> {
    let first_k = aug.with_retained(&(1..=k).collect::<Vec<_>>())?;
    let required: Vec<usize> = (1..=k).collect();
    let mut total = 0.0;
    for (i, ai) in a.0.iter().enumerate() {
        if *ai != 0.0 && i + 1 >= k {
            total += ai * restricted_counts(&first_k, &required, i)? as f64;
        }
    }
    Ok(total)
}

/// Binomial coefficient as `f64` (exact for the small arguments used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_augmented, build_complex, MarkKey};
    use crate::connect::{constant_system, rips_system, Metric};
    use crate::seed::SeedStream;
    use crate::space::{Point, Space, Window};

    fn pts(n: usize, seed: u64) -> Vec<Point> {
        let w = Window::new(Space::unit_cube(2)).unwrap();
        let mut rng = SeedStream::new(seed).rng();
        (0..n).map(|i| w.sample_point(&mut rng, i as u64)).collect()
    }

    #[test]
    fn counts_and_euler() {
        let sys = constant_system(&[1.0, 1.0]).unwrap();
        let c = build_complex(&pts(5, 1), &sys, MarkKey(1)).unwrap();
        assert_eq!(simplex_counts(&c), vec![5, 10, 10]);
        assert_eq!(euler_characteristic(&c, &CoefficientVector::euler(2)).unwrap(), 5.0);
        assert_eq!(euler_characteristic(&c, &CoefficientVector::unit(2, 1)).unwrap(), 10.0);
        assert!(euler_characteristic(&c, &CoefficientVector::euler(3)).is_err());
        let empty = build_complex(&[], &sys, MarkKey(1)).unwrap();
        assert_eq!(simplex_counts(&empty), vec![0, 0, 0]);
        assert_eq!(euler_characteristic(&empty, &CoefficientVector::euler(2)).unwrap(), 0.0);
    }

    #[test]
    fn restricted_counts_on_complete_skeleton() {
        let sys = constant_system(&[1.0, 1.0]).unwrap();
        let n = 6;
        let aug = build_augmented(&pts(n, 2), &pts(1, 3), &[1], &sys, MarkKey(2)).unwrap();
        assert_eq!(restricted_counts(&aug, &[1], 1).unwrap(), n);
        assert_eq!(restricted_counts(&aug, &[1], 2).unwrap(), n * (n - 1) / 2);
        assert_eq!(restricted_counts(&aug, &[], 2).unwrap(), aug.complex().count(2));
        let two = build_augmented(&pts(n, 2), &pts(2, 3), &[1, 2], &sys, MarkKey(2)).unwrap();
        assert_eq!(restricted_counts(&two, &[1, 2], 0).unwrap(), 0);
    }

    #[test]
    fn lambda_examples() {
        let sys = rips_system(2, 0.4, Metric::Euclidean).unwrap();
        let aug = build_augmented(&pts(30, 4), &pts(3, 5), &[1, 2, 3], &sys, MarkKey(3)).unwrap();
        let f0 = |c: &ComplexSample| c.count(0) as f64;
        assert_eq!(lambda_operator(&aug, 1, &f0).unwrap(), 1.0);
        let konst = |_: &ComplexSample| 7.5;
        for k in 1..=3 {
            assert_eq!(lambda_operator(&aug, k, &konst).unwrap(), 0.0);
        }
        assert!(lambda_operator(&aug, 4, &konst).is_err());
    }

    #[test]
    fn lambda_identity_and_linearity() {
        let mut rng = SeedStream::new(6).rng();
        for trial in 0..30u64 {
            let alpha = 1 + (trial as usize % 3);
            let sys = if trial % 2 == 0 {
                constant_system(&vec![0.5; alpha]).unwrap()
            } else {
                rips_system(alpha, 0.35, Metric::Euclidean).unwrap()
            };
            let a = CoefficientVector((0..=alpha).map(|i| (i as f64 + 1.0) * if i % 2 == 0 { 1.0 } else { -2.0 }).collect());
            let b = CoefficientVector::euler(alpha);
            for k in 1..=2 {
                for l in k..=k + 2 {
                    let key = MarkKey(rand::Rng::random(&mut rng));
                    let aug = build_augmented(&pts(25, 10 + trial), &pts(l, 50 + trial), &(1..=l).collect::<Vec<_>>(), &sys, key)
                        .unwrap();
                    let lam = lambda_operator(&aug, k, &a).unwrap();
                    assert_eq!(lam, lambda_euler_closed_form(&aug, k, &a).unwrap());
                    let combo = |c: &ComplexSample| 2.0 * a.eval(c) - 3.0 * b.eval(c);
                    let lin = lambda_operator(&aug, k, &combo).unwrap();
                    assert_eq!(lin, 2.0 * lam - 3.0 * lambda_operator(&aug, k, &b).unwrap());
                    // f_i^{x_1..x_k} ≤ C(τ, i + 1 − k)
                    let full = aug.full();
                    let tau = full.count(0) - l;
                    for i in (k - 1)..=alpha {
                        let req: Vec<usize> = (1..=k).collect();
                        let c = restricted_counts(&aug.with_retained(&req).unwrap(), &req, i).unwrap();
                        assert!(c as f64 <= binomial(tau, i + 1 - k));
                    }
                }
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(binomial(10, 0), 1.0);
    }
}
