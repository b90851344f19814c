//! Normal approximation: the quantities `γ_1, …, γ_6` bounding the Wasserstein
//! and Kolmogorov distances of a standardized `χ_a` to the standard normal,
//! empirical Kolmogorov distances, and the three CLT experiment regimes.
//!
//! All difference operators needed for one outer tuple `(x_1, x_2, x_3)` come
//! from one [`StarTable`] per inner realization: `Λ^1_{x_1,x_2}F` is the entry
//! for `{x_1}`, `Λ^2_{x_1,x_3,x_2}F` the entry for `{x_1, x_3}`, and so on.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{star_table, MarkKey};
use crate::error::{Error, Result};
use crate::estimate::{McBudget, MonteCarloEstimate, MIN_SAMPLES};
use crate::functional::CoefficientVector;
use crate::model::Model;
use crate::moments::{
    empirical_moments, euler_moments, fmt_f, integrability_nu, replicate_counts, stationary_limits, MomentReport,
    NuReport, StationaryReport,
};
use crate::seed::{SeedStream, SimRng};
use crate::space::{MarkDistribution, Point};
use crate::stats::{ks_normal, log_log_slope};

type Est = MonteCarloEstimate;

/// Nested Monte Carlo sizes for the `γ` quantities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaConfig {
    /// Outer tuples `(x_1, x_2, x_3)` drawn uniformly from `W`.
    pub outer: usize,
    /// Realizations per outer tuple.
    pub inner: usize,
    /// Full realizations used to estimate `E[F^4]`.
    pub fourth_moment_replicates: usize,
}

impl Default for GammaConfig {
    fn default() -> Self {
        GammaConfig { outer: 1000, inner: 200, fourth_moment_replicates: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub beta: f64,
    pub window_measure: f64,
    /// `Var χ_a` used to standardize.
    pub variance: f64,
    /// Empirical `E[F^4]`.
    pub fourth_moment: Est,
    /// `γ_1, …, γ_6`.
    pub gamma: [Est; 6],
    /// `γ_1 + γ_2 + γ_3`.
    pub wasserstein_bound: Est,
    /// `γ_1 + … + γ_6`.
    pub kolmogorov_bound: Est,
    /// `max{256 [β ∫ E[(Λ_x F)^4]^{1/2}]^2, 4β ∫ E[(Λ_x F)^4] + 2}`.
    pub fourth_moment_bound: Est,
    pub outer: usize,
    pub inner: usize,
}

impl GammaReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# schema: rcm-gamma v1")?;
        writeln!(out, "quantity,value,standard_error,samples")?;
        let mut row = |q: &str, e: &Est| writeln!(out, "{q},{},{},{}", fmt_f(e.value), fmt_f(e.standard_error), e.samples);
        for (k, g) in self.gamma.iter().enumerate() {
            row(&format!("gamma{}", k + 1), g)?;
        }
        row("wasserstein_bound", &self.wasserstein_bound)?;
        row("kolmogorov_bound", &self.kolmogorov_bound)?;
        row("fourth_moment", &self.fourth_moment)?;
        row("fourth_moment_bound", &self.fourth_moment_bound)?;
        row("variance", &Est { value: self.variance, standard_error: 0.0, samples: 0 })?;
        Ok(())
    }
}

const M1: usize = 0b001;
const M2: usize = 0b010;
const M12: usize = 0b011;
const M13: usize = 0b101;
const M23: usize = 0b110;

fn local_points(model: &Model, added: &[Point], rng: &mut SimRng) -> Result<Vec<Point>> {
    match (model.system.range(), model.window.space().bounds()) {
        (Some(rho), Some(_)) => {
            let centers: Vec<_> = added.iter().filter_map(|p| p.location.euclidean()).collect();
            model.window.sample_poisson_near(model.beta, &centers, rho, rng)
        }
        _ => model.window.sample_poisson(model.beta, rng),
    }
}

/// Inner averages for one outer tuple, in the order
/// `[√A·√B, B, C3, C4^{3/4}, C4, 6√C4·√D4 + 3·D4, √C4]` with
/// `A = E[(Λ¹_{x1,x2}F)²(Λ¹_{x2,x1}F)²]`, `B = E[(Λ²_{x1,x3,x2}F)²(Λ²_{x2,x3,x1}F)²]`,
/// `C_p = E|Λ_{x1}F|^p`, `D4 = E[(Λ²_{x1,x2}F)^4]`.
fn outer_integrands(model: &Model, a: &[f64], sd: f64, inner: usize, stream: SeedStream) -> Result<[f64; 7]> {
    let mut rng = stream.rng();
    let added: Vec<Point> = (0..3).map(|i| model.window.sample_point(&mut rng, i)).collect();
    let (mut sa, mut sb, mut s3, mut s4, mut sd4) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..inner {
        let pts = local_points(model, &added, &mut rng)?;
        let key = MarkKey(rng.random());
        let t = star_table(&pts, &added, &model.system, key)?;
        let l1 = t.weighted(M1, a) / sd;
        let l2 = t.weighted(M2, a) / sd;
        let l13 = t.weighted(M13, a) / sd;
        let l23 = t.weighted(M23, a) / sd;
        let l12 = t.weighted(M12, a) / sd;
        sa += (l1 * l2).powi(2);
        sb += (l13 * l23).powi(2);
        s3 += l1.abs().powi(3);
        s4 += l1.powi(4);
        sd4 += l12.powi(4);
    }
    let n = inner as f64;
    let (ea, eb, c3, c4, d4) = (sa / n, sb / n, s3 / n, s4 / n, sd4 / n);
    Ok([
        ea.sqrt() * eb.sqrt(),
        eb,
        c3,
        c4.powf(0.75),
        c4,
        6.0 * c4.sqrt() * d4.sqrt() + 3.0 * d4,
        c4.sqrt(),
    ])
}

/// `γ_1, …, γ_6` for `F = (χ_a − E χ_a)/sd` with the given `E[F^4]`.
pub fn gamma_from_lambda(
    model: &Model,
    a: &CoefficientVector,
    sd: f64,
    fourth_moment: Est,
    cfg: &GammaConfig,
    stream: SeedStream,
) -> Result<GammaReport> {
    a.check_len(model.alpha())?;
    if cfg.inner < 100 {
        return Err(Error::TooFewSamples { got: cfg.inner, min: 100 });
    }
    if cfg.outer < 2 {
        return Err(Error::TooFewSamples { got: cfg.outer, min: 2 });
    }
    if !(sd > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let rows: Vec<[f64; 7]> = (0..cfg.outer)
        .into_par_iter()
        .map(|i| outer_integrands(model, a.as_slice(), sd, cfg.inner, stream.child(i as u64)))
        .collect::<Result<_>>()?;
    let col = |k: usize| Est::from_samples(&rows.iter().map(|r| r[k]).collect::<Vec<_>>());
    let beta = model.beta;
    let vol = model.window.measure();
    let bv = beta * vol;
    let g1 = col(0)?.scaled(bv.powi(3)).powf(0.5).scaled(2.0);
    let g2 = col(1)?.scaled(bv.powi(3)).powf(0.5);
    let g3 = col(2)?.scaled(bv);
    let f4_quarter = fourth_moment.powf(0.25);
    let g4 = Est::product(f4_quarter, col(3)?.scaled(0.5 * bv));
    let c4 = col(4)?.scaled(bv);
    let g5 = c4.powf(0.5);
    let g6 = col(5)?.scaled(bv * bv).powf(0.5);
    let gamma = [g1, g2, g3, g4, g5, g6];
    let sum = |k: usize| Est::linear(&gamma[..k].iter().map(|g| (1.0, *g)).collect::<Vec<_>>());
    let first = col(6)?.scaled(bv);
    let b1 = Est::product(first, first).scaled(256.0);
    let b2 = Est { value: 4.0 * c4.value + 2.0, standard_error: 4.0 * c4.standard_error, samples: c4.samples };
    Ok(GammaReport {
        beta,
        window_measure: vol,
        variance: sd * sd,
        fourth_moment,
        gamma,
        wasserstein_bound: sum(3),
        kolmogorov_bound: sum(6),
        fourth_moment_bound: if b1.value >= b2.value { b1 } else { b2 },
        outer: cfg.outer,
        inner: cfg.inner,
    })
}

/// Empirical `E[F^4]` of `F = (χ − mean)/sd` over simulated count vectors.
pub fn fourth_moment(counts: &[Vec<usize>], a: &CoefficientVector, mean: f64, sd: f64) -> Result<Est> {
    let f4: Vec<f64> = counts.iter().map(|c| ((a.apply(c) - mean) / sd).powi(4)).collect();
    Est::from_samples(&f4)
}

/// `γ_1, …, γ_6` for the standardized `χ_a`, standardized with the
/// closed-form mean and variance.
pub fn gamma_quantities(
    model: &Model,
    a: &CoefficientVector,
    cfg: &GammaConfig,
    budget: &McBudget,
    stream: SeedStream,
) -> Result<GammaReport> {
    let moments = euler_moments(a, model, budget, stream.named("moments"))?;
    gamma_with_moments(model, a, &moments, cfg, stream)
}

pub fn gamma_with_moments(
    model: &Model,
    a: &CoefficientVector,
    moments: &MomentReport,
    cfg: &GammaConfig,
    stream: SeedStream,
) -> Result<GammaReport> {
    let var = moments.euler_variance.value;
    if !(var > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let sd = var.sqrt();
    let counts = replicate_counts(model, cfg.fourth_moment_replicates.max(2), stream.named("fourth"))?;
    let f4 = fourth_moment(&counts, a, moments.euler_mean.value, sd)?;
    gamma_from_lambda(model, a, sd, f4, cfg, stream.named("gamma"))
}

/// One-sample KS distance of a standardized sample to `N(0, 1)`.
pub fn empirical_kolmogorov(samples: &[f64]) -> Result<f64> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: samples.len(), min: MIN_SAMPLES });
    }
    Ok(ks_normal(samples))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    IncreasingIntensity,
    IncreasingWindow,
    MultivariateStationary,
}

/// How replicate values are standardized before the KS distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Standardization {
    /// Closed-form mean and variance.
    #[default]
    Formula,
    /// Sample mean and sample standard deviation.
    Empirical,
}

#[derive(Clone, Debug)]
pub struct CltExperiment {
    pub regime: Regime,
    /// One model per rung.
    pub ladder: Vec<Model>,
    pub replicates: usize,
    pub a: CoefficientVector,
    pub budget: McBudget,
    pub standardization: Standardization,
    /// Compute `γ` on each rung.
    pub gamma: Option<GammaConfig>,
    /// Mark distribution and grid for the stationary checks.
    pub marks: MarkDistribution,
    pub mark_grid: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RungReport {
    /// `β` or `|W_n|`, depending on the regime.
    pub parameter: f64,
    pub beta: f64,
    pub window_measure: f64,
    pub ks: f64,
    pub formula_mean: Est,
    pub formula_variance: Est,
    pub empirical_mean: Est,
    pub empirical_variance: Est,
    /// `E f_α / |W|` from the closed form.
    pub top_count_ratio: Est,
    pub gamma: Option<GammaReport>,
    /// KS distance of each standardized count `f_j`.
    pub count_ks: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceCheck {
    pub window_measure: f64,
    /// Entrywise `|Ĉov/|W| − σ| / SE`.
    pub z: Vec<Vec<f64>>,
    pub empirical: Vec<Vec<Est>>,
    pub max_z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub regime: Regime,
    pub rungs: Vec<RungReport>,
    pub ks_decreasing: bool,
    pub ks_slope: Option<f64>,
    /// Log-log slopes of `γ_1..γ_6` against the rung parameter.
    pub gamma_slopes: Option<[f64; 6]>,
    pub nu: Option<NuReport>,
    pub min_top_count_ratio: f64,
    pub stationary: Option<StationaryReport>,
    pub covariance: Option<CovarianceCheck>,
}

impl LadderReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# schema: rcm-ladder v1")?;
        write!(out, "rung,parameter,beta,window_measure,ks,top_count_ratio,top_count_ratio_se")?;
        for i in 1..=6 {
            write!(out, ",gamma{i},gamma{i}_se")?;
        }
        writeln!(out, ",kolmogorov_bound,kolmogorov_bound_se")?;
        for (i, r) in self.rungs.iter().enumerate() {
            write!(
                out,
                "{i},{},{},{},{},{},{}",
                fmt_f(r.parameter),
                fmt_f(r.beta),
                fmt_f(r.window_measure),
                fmt_f(r.ks),
                fmt_f(r.top_count_ratio.value),
                fmt_f(r.top_count_ratio.standard_error)
            )?;
            match &r.gamma {
                Some(g) => {
                    for e in g.gamma.iter().chain(std::iter::once(&g.kolmogorov_bound)) {
                        write!(out, ",{},{}", fmt_f(e.value), fmt_f(e.standard_error))?;
                    }
                }
                None => write!(out, "{}", ",,".repeat(7))?,
            }
            writeln!(out)?;
        }
        writeln!(out, "# ks_decreasing={}", self.ks_decreasing)?;
        if let Some(s) = self.ks_slope {
            writeln!(out, "# ks_slope={}", fmt_f(s))?;
        }
        if let Some(s) = &self.gamma_slopes {
            let txt: Vec<String> = s.iter().map(|x| fmt_f(*x)).collect();
            writeln!(out, "# gamma_slopes={}", txt.join(";"))?;
        }
        Ok(())
    }
}

fn check_ladder(exp: &CltExperiment) -> Result<()> {
    if exp.ladder.is_empty() {
        return Err(Error::InvalidParameter("empty ladder".into()));
    }
    if exp.replicates < MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: exp.replicates, min: MIN_SAMPLES });
    }
    let param = |m: &Model| match exp.regime {
        Regime::IncreasingIntensity => m.beta,
        _ => m.window.measure(),
    };
    if exp.ladder.windows(2).any(|w| param(&w[1]) <= param(&w[0])) {
        return Err(Error::InvalidParameter("ladder must be strictly increasing".into()));
    }
    match exp.regime {
        Regime::IncreasingIntensity => {
            if exp.ladder.iter().any(|m| m.window != exp.ladder[0].window) {
                return Err(Error::InvalidParameter("increasing intensity needs one fixed window".into()));
            }
        }
        _ => {
            if !exp.ladder[0].system.is_translation_invariant() {
                return Err(Error::Hypothesis("window regimes need a translation-invariant system".into()));
            }
            let radii: Vec<f64> = exp.ladder.iter().map(|m| m.window.inradius().unwrap_or(0.0)).collect();
            if radii.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Hypothesis("window inradii must increase along the ladder".into()));
            }
        }
    }
    Ok(())
}

fn standardize(values: &[f64], kind: Standardization, mean: f64, var: f64) -> Result<Vec<f64>> {
    let (mu, sd) = match kind {
        Standardization::Formula => (mean, var.sqrt()),
        Standardization::Empirical => {
            let e = Est::from_samples(values)?;
            let n = values.len() as f64;
            let v = values.iter().map(|x| (x - e.value).powi(2)).sum::<f64>() / (n - 1.0);
            (e.value, v.sqrt())
        }
    };
    if !(sd > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok(values.iter().map(|x| (x - mu) / sd).collect())
}

/// Runs every rung of a CLT experiment.
pub fn run_clt_experiment(exp: &CltExperiment, stream: SeedStream) -> Result<LadderReport> {
    check_ladder(exp)?;
    let alpha = exp.ladder[0].alpha();
    exp.a.check_len(alpha)?;
    let dim = exp.ladder[0].window.dimension();

    let nu = match exp.regime {
        Regime::IncreasingIntensity => None,
        _ => {
            let r = integrability_nu(&exp.ladder[0].system, dim, &exp.marks, exp.mark_grid, &exp.budget, stream.named("nu"));
            match r {
                Ok(n) => Some(n),
                Err(Error::Divergent(msg)) => return Err(Error::Hypothesis(format!("integrability condition fails: {msg}"))),
                Err(e) => return Err(e),
            }
        }
    };

    let mut rungs = Vec::new();
    let mut last_counts = Vec::new();
    for (i, model) in exp.ladder.iter().enumerate() {
        let rs = stream.named("rung").child(i as u64);
        let moments = euler_moments(&exp.a, model, &exp.budget, rs.named("moments"))?;
        let counts = replicate_counts(model, exp.replicates, rs.named("replicates"))?;
        let chi: Vec<f64> = counts.iter().map(|c| exp.a.apply(c)).collect();
        let z = standardize(&chi, exp.standardization, moments.euler_mean.value, moments.euler_variance.value)?;
        let ks = empirical_kolmogorov(&z)?;
        let emp = empirical_moments(&counts, &exp.a)?;
        let count_ks = (0..=alpha)
            .map(|j| {
                let col: Vec<f64> = counts.iter().map(|c| c[j] as f64).collect();
                let v = moments.covariances[j][j].value;
                standardize(&col, exp.standardization, moments.expected_counts[j].value, v)
                    .and_then(|s| empirical_kolmogorov(&s))
                    .unwrap_or(f64::NAN)
            })
            .collect();
        let gamma = match &exp.gamma {
            Some(cfg) => Some(gamma_with_moments(model, &exp.a, &moments, cfg, rs.named("gamma"))?),
            None => None,
        };
        let vol = model.window.measure();
        rungs.push(RungReport {
            parameter: if exp.regime == Regime::IncreasingIntensity { model.beta } else { vol },
            beta: model.beta,
            window_measure: vol,
            ks,
            formula_mean: moments.euler_mean,
            formula_variance: moments.euler_variance,
            empirical_mean: emp.euler_mean,
            empirical_variance: emp.euler_variance,
            top_count_ratio: moments.expected_counts[alpha].scaled(1.0 / vol),
            gamma,
            count_ks,
        });
        last_counts = counts;
    }

    let min_top_count_ratio = rungs.iter().map(|r| r.top_count_ratio.value).fold(f64::INFINITY, f64::min);
    if exp.regime != Regime::IncreasingIntensity && !(min_top_count_ratio > 0.0) {
        return Err(Error::Hypothesis(format!("E f_alpha / |W_n| is not bounded below (minimum {min_top_count_ratio})")));
    }

    let (stationary, covariance) = if exp.regime == Regime::MultivariateStationary {
        let last = exp.ladder.last().expect("nonempty ladder");
        let st = stationary_limits(&last.system, dim, &exp.marks, last.beta, &[], &exp.budget, stream.named("stationary"))?;
        let top = st.zeta0.iter().find(|z| z.m == alpha + 1 && z.l == alpha + 1 && z.r == alpha + 1).map(|z| z.estimate);
        if let Some(t) = top {
            if t.value - 3.0 * t.standard_error <= 0.0 {
                return Err(Error::Hypothesis("top simplex integral at the origin is not positive".into()));
            }
        }
        let vol = last.window.measure();
        let emp = empirical_moments(&last_counts, &exp.a)?;
        let n = alpha + 1;
        let mut z = vec![vec![0.0; n]; n];
        let mut empirical = Vec::with_capacity(n);
        let mut max_z: f64 = 0.0;
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let e = emp.covariances[i][j].scaled(1.0 / vol);
                z[i][j] = e.z_distance(&st.sigma[i][j]);
                max_z = max_z.max(z[i][j]);
                row.push(e);
            }
            empirical.push(row);
        }
        (Some(st), Some(CovarianceCheck { window_measure: vol, z, empirical, max_z }))
    } else {
        (None, None)
    };

    let ks: Vec<f64> = rungs.iter().map(|r| r.ks).collect();
    let params: Vec<f64> = rungs.iter().map(|r| r.parameter).collect();
    let ks_decreasing = ks.windows(2).all(|w| w[1] < w[0]);
    let ks_slope = if rungs.len() >= 2 { log_log_slope(&params, &ks) } else { None };
    let gamma_slopes = if rungs.len() >= 2 && rungs.iter().all(|r| r.gamma.is_some()) {
        let mut s = [0.0; 6];
        for (k, slot) in s.iter_mut().enumerate() {
            let g: Vec<f64> = rungs.iter().map(|r| r.gamma.as_ref().unwrap().gamma[k].value).collect();
            *slot = log_log_slope(&params, &g).unwrap_or(f64::NAN);
        }
        Some(s)
    } else {
        None
    };
    Ok(LadderReport {
        regime: exp.regime,
        rungs,
        ks_decreasing,
        ks_slope,
        gamma_slopes,
        nu,
        min_top_count_ratio,
        stationary,
        covariance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connect::{constant_system, stationary_marked_system, MarkRadius};
    use crate::space::{Space, Window};
    use rand_distr::{Distribution, Poisson};

    fn square_model(beta: f64) -> Model {
        Model::new(Window::new(Space::unit_cube(2)).unwrap(), constant_system(&[0.3, 0.5]).unwrap(), beta).unwrap()
    }

    fn small_cfg() -> GammaConfig {
        GammaConfig { outer: 20, inner: 100, fourth_moment_replicates: 200 }
    }

    #[test]
    fn zero_functional_has_zero_gammas() {
        let model = square_model(5.0);
        let zero = CoefficientVector(vec![0.0; 3]);
        let f4 = Est { value: 0.0, standard_error: 0.0, samples: 1000 };
        let g = gamma_from_lambda(&model, &zero, 1.0, f4, &small_cfg(), SeedStream::new(1)).unwrap();
        assert!(g.gamma.iter().all(|e| e.value == 0.0));
        assert_eq!(g.fourth_moment_bound.value, 2.0);
    }

    #[test]
    fn vertex_count_gammas_are_exact() {
        let model = square_model(10.0);
        let a = CoefficientVector::unit(2, 0);
        let mu = 10.0f64;
        let f4 = Est { value: 3.0, standard_error: 0.0, samples: 1000 };
        let g = gamma_from_lambda(&model, &a, mu.sqrt(), f4, &small_cfg(), SeedStream::new(2)).unwrap();
        assert!((g.gamma[2].value - mu.powf(-0.5)).abs() < 1e-12);
        assert_eq!(g.gamma[1].value, 0.0);
        // Λ² f_0 = 0 leaves only the first summand of γ_6, which vanishes too
        assert_eq!(g.gamma[5].value, 0.0);
        assert!((g.gamma[4].value - mu.powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn gamma_guards() {
        let model = square_model(5.0);
        let a = CoefficientVector::euler(2);
        let f4 = Est { value: 3.0, standard_error: 0.0, samples: 1000 };
        let cfg = GammaConfig { inner: 10, ..small_cfg() };
        assert!(matches!(gamma_from_lambda(&model, &a, 1.0, f4, &cfg, SeedStream::new(1)), Err(Error::TooFewSamples { .. })));
        assert!(matches!(gamma_from_lambda(&model, &a, 0.0, f4, &small_cfg(), SeedStream::new(1)), Err(Error::ZeroVariance)));
    }

    #[test]
    fn poisson_kolmogorov_is_small() {
        let mut rng = SeedStream::new(3).rng();
        let p = Poisson::new(400.0).unwrap();
        let z: Vec<f64> = (0..20_000).map(|_| (p.sample(&mut rng) - 400.0) / 20.0).collect();
        assert!(empirical_kolmogorov(&z).unwrap() < 0.05);
        assert!(empirical_kolmogorov(&z[..10]).is_err());
    }

    #[test]
    fn single_rung_ladder_has_no_slope() {
        let exp = CltExperiment {
            regime: Regime::IncreasingIntensity,
            ladder: vec![square_model(5.0)],
            replicates: 1000,
            a: CoefficientVector::euler(2),
            budget: McBudget::default(),
            standardization: Standardization::Formula,
            gamma: None,
            marks: MarkDistribution::Single,
            mark_grid: 1,
        };
        let rep = run_clt_experiment(&exp, SeedStream::new(4)).unwrap();
        assert_eq!(rep.rungs.len(), 1);
        assert!(rep.ks_slope.is_none());
        assert!(rep.ks_decreasing);
    }

    #[test]
    fn window_regime_rejects_constant_profile() {
        let w = |l: f64| Window::new(Space::EuclideanBox { bounds: vec![(0.0, l)] }).unwrap();
        let sys = constant_system(&[0.2]).unwrap();
        let exp = CltExperiment {
            regime: Regime::IncreasingWindow,
            ladder: vec![Model::new(w(2.0), sys.clone(), 1.0).unwrap(), Model::new(w(4.0), sys, 1.0).unwrap()],
            replicates: 1000,
            a: CoefficientVector::euler(1),
            budget: McBudget::fixed(2048),
            standardization: Standardization::Formula,
            gamma: None,
            marks: MarkDistribution::Single,
            mark_grid: 1,
        };
        assert!(matches!(run_clt_experiment(&exp, SeedStream::new(5)), Err(Error::Hypothesis(_))));
        let ok_sys = stationary_marked_system(1, MarkRadius::Fixed(0.1)).unwrap();
        let mut exp2 = exp.clone();
        exp2.ladder = vec![Model::new(w(4.0), ok_sys.clone(), 5.0).unwrap(), Model::new(w(2.0), ok_sys, 5.0).unwrap()];
        assert!(matches!(run_clt_experiment(&exp2, SeedStream::new(5)), Err(Error::InvalidParameter(_))));
    }
}
