//! Integral representations `I_K(W)`, the integrals `ζ^r_{m,l}`, and the
//! closed-form moments of simplex counts and generalized Euler
//! characteristics built from them.
//!
//! Every integral is a Monte Carlo estimate with a standard error. Each `ζ`
//! runs on its own seed stream, so estimates entering one formula are
//! independent and their errors add in quadrature.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::connect::ConnectionSystem;
use crate::error::{Error, Result};
use crate::estimate::{adaptive_mean, McBudget, MonteCarloEstimate};
use crate::functional::CoefficientVector;
use crate::model::Model;
use crate::seed::{SeedStream, SimRng};
use crate::space::{Location, MarkDistribution, Point, Window};

type Est = MonteCarloEstimate;

/// A simplicial complex on the vertices `0..r`, given by generators.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexTemplate {
    r: usize,
    generators: Vec<Vec<usize>>,
    /// All faces with at least two vertices.
    faces: Vec<Vec<usize>>,
    components: usize,
}

impl ComplexTemplate {
    pub fn new(r: usize, generators: Vec<Vec<usize>>) -> Result<ComplexTemplate> {
        if generators.is_empty() || generators.iter().any(|g| g.is_empty()) {
            return Err(Error::InvalidParameter("template needs nonempty generators".into()));
        }
        let mut covered = vec![false; r];
        for g in &generators {
            for &v in g {
                if v >= r {
                    return Err(Error::IndexRange(format!("vertex {v} outside 0..{r}")));
                }
                covered[v] = true;
            }
        }
        if covered.iter().any(|c| !c) {
            return Err(Error::InvalidParameter("every vertex must lie in a generator".into()));
        }
        let mut faces: Vec<Vec<usize>> = Vec::new();
        for g in &generators {
            let mut g = g.clone();
            g.sort_unstable();
            g.dedup();
            for mask in 1u32..(1 << g.len()) {
                if mask.count_ones() >= 2 {
                    faces.push(g.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &v)| v).collect());
                }
            }
        }
        faces.sort();
        faces.dedup();
        let mut t = ComplexTemplate { r, generators, faces, components: 0 };
        t.components = t.component_labels().iter().max().map_or(0, |m| m + 1);
        Ok(t)
    }

    /// `K^r_{m,l}`: an `(m−1)`-simplex and an `(l−1)`-simplex sharing `m + l − r` vertices.
    pub fn zeta(m: usize, l: usize, r: usize) -> Result<ComplexTemplate> {
        if m == 0 || l == 0 || r < m.max(l) || r > m + l {
            return Err(Error::IndexRange(format!("need max(m, l) ≤ r ≤ m + l, got m={m} l={l} r={r}")));
        }
        let first: Vec<usize> = (0..m).collect();
        let second: Vec<usize> = (0..m + l - r).chain(m..r).collect();
        ComplexTemplate::new(r, vec![first, second])
    }

    /// A single `(m−1)`-simplex.
    pub fn simplex(m: usize) -> Result<ComplexTemplate> {
        ComplexTemplate::zeta(m, m, m)
    }

    pub fn vertex_count(&self) -> usize {
        self.r
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        self.components
    }

    fn component_labels(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.r).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for f in self.faces.iter().filter(|f| f.len() == 2) {
            let (a, b) = (find(&mut parent, f[0]), find(&mut parent, f[1]));
            parent[a] = b;
        }
        let mut labels = BTreeMap::new();
        (0..self.r)
            .map(|v| {
                let root = find(&mut parent, v);
                let next = labels.len();
                *labels.entry(root).or_insert(next)
            })
            .collect()
    }

    fn edge_distances(&self, root: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.r];
        dist[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for f in self.faces.iter().filter(|f| f.len() == 2) {
                let w = if f[0] == v {
                    f[1]
                } else if f[1] == v {
                    f[0]
                } else {
                    continue;
                };
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Largest edge distance from `root` in the 1-skeleton; `None` if disconnected.
    pub fn eccentricity(&self, root: usize) -> Option<usize> {
        self.edge_distances(root).into_iter().max().filter(|&d| d != usize::MAX)
    }

    /// For each vertex, the earlier vertex it is sampled around and the box
    /// half-width, or `None` for a uniform draw from the window. Each
    /// component's lowest vertex is drawn uniformly.
    fn anchors(&self, range: Option<f64>, window: &Window, sampling: Sampling) -> Vec<Option<(usize, f64)>> {
        let mut plan = vec![None; self.r];
        let rho = match (sampling, range, window.space().bounds()) {
            (Sampling::Auto, Some(rho), Some(_)) if rho > 0.0 => rho,
            _ => return plan,
        };
        let labels = self.component_labels();
        let d = window.dimension() as i32;
        for v in 0..self.r {
            let root = labels.iter().position(|&l| l == labels[v]).expect("own label");
            if root == v {
                continue;
            }
            let reach = self.edge_distances(root).into_iter().filter(|&x| x != usize::MAX).max().unwrap_or(0);
            let h = reach as f64 * rho;
            if (2.0 * h).powi(d) < window.measure() {
                plan[v] = Some((root, h));
            }
        }
        plan
    }

    /// `f_K(x_1, …, x_r) = Π_{σ ∈ K} φ_{|σ|−1}(x_σ)`.
    pub fn simplex_function(&self, system: &ConnectionSystem, pts: &[&Point]) -> f64 {
        let mut prod = 1.0;
        for f in &self.faces {
            let sub: SmallVec<[&Point; 8]> = f.iter().map(|&i| pts[i]).collect();
            prod *= system.phi(&sub);
            if prod == 0.0 {
                return 0.0;
            }
        }
        prod
    }
}

/// How the points of an integral are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Sampling {
    /// Uniform tuples, or boxes around the lowest vertex of each connected
    /// component when `φ_1` has a short finite range on a box window.
    #[default]
    Auto,
    Uniform,
}

fn box_offset_point(center: &[f64], h: f64, marks: &MarkDistribution, rng: &mut SimRng) -> Point {
    let c = center.iter().map(|x| x + h * (2.0 * rng.random::<f64>() - 1.0)).collect();
    Point::new(Location::Euclidean(c), marks.sample(rng), 0.5, 0)
}

/// `I_K(W) = ∫_{W^r} f_K`.
pub fn integral_representation(
    template: &ComplexTemplate,
    window: &Window,
    system: &ConnectionSystem,
    budget: &McBudget,
    stream: SeedStream,
) -> Result<Est> {
    integral_representation_with(template, window, system, budget, stream, Sampling::Auto)
}

pub fn integral_representation_with(
    template: &ComplexTemplate,
    window: &Window,
    system: &ConnectionSystem,
    budget: &McBudget,
    stream: SeedStream,
    sampling: Sampling,
) -> Result<Est> {
    let vol = window.measure();
    let d = window.dimension() as i32;
    let plan = template.anchors(system.range(), window, sampling);
    let weight: f64 = plan.iter().map(|a| a.map_or(vol, |(_, h)| (2.0 * h).powi(d))).product();
    let marks = window.space().marks();
    let e = adaptive_mean(budget, stream, |rng| {
        let mut pts: SmallVec<[Point; 8]> = SmallVec::new();
        for (i, a) in plan.iter().enumerate() {
            let p = match a {
                None => window.sample_point(rng, i as u64),
                Some((root, h)) => {
                    let center = pts[*root].location.euclidean().expect("box window").clone();
                    let p = box_offset_point(&center, *h, &marks, rng);
                    if !window.contains(&p.location) {
                        return 0.0;
                    }
                    p
                }
            };
            pts.push(p);
        }
        let refs: SmallVec<[&Point; 8]> = pts.iter().collect();
        template.simplex_function(system, &refs)
    })?;
    Ok(e.scaled(weight))
}

fn zeta_label(m: usize, l: usize, r: usize) -> u64 {
    ((m as u64) << 32) | ((l as u64) << 16) | r as u64
}

fn check_order(system: &ConnectionSystem, m: usize, l: usize) -> Result<()> {
    let top = system.alpha() + 1;
    if m == 0 || l == 0 || m > top || l > top {
        return Err(Error::IndexRange(format!("m = {m}, l = {l} must lie in 1..={top}")));
    }
    Ok(())
}

/// `ζ^r_{m,l}(W)`.
pub fn zeta(
    m: usize,
    l: usize,
    r: usize,
    window: &Window,
    system: &ConnectionSystem,
    budget: &McBudget,
    stream: SeedStream,
) -> Result<Est> {
    check_order(system, m, l)?;
    let t = ComplexTemplate::zeta(m, l, r)?;
    integral_representation(&t, window, system, budget, stream.child(zeta_label(m, l, r)))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `β^r / ((r−m)! (r−l)! (m+l−r)!)`.
fn cov_coefficient(beta: f64, m: usize, l: usize, r: usize) -> f64 {
    beta.powi(r as i32) / (factorial(r - m) * factorial(r - l) * factorial(m + l - r))
}

/// `E f_{m−1} = β^m / m! · ζ^m_{m,m}(W)`.
pub fn expected_count(m: usize, model: &Model, budget: &McBudget, stream: SeedStream) -> Result<Est> {
    let z = zeta(m, m, m, &model.window, &model.system, budget, stream)?;
    Ok(z.scaled(model.beta.powi(m as i32) / factorial(m)))
}

/// `Cov(f_{m−1}, f_{l−1}) = Σ_{r=max(m,l)}^{m+l−1} β^r/((r−m)!(r−l)!(m+l−r)!) ζ^r_{m,l}(W)`.
pub fn covariance_counts(m: usize, l: usize, model: &Model, budget: &McBudget, stream: SeedStream) -> Result<Est> {
    check_order(&model.system, m, l)?;
    let (a, b) = (m.min(l), m.max(l));
    let mut terms = Vec::new();
    for r in b..a + b {
        let z = zeta(a, b, r, &model.window, &model.system, budget, stream)?;
        terms.push((cov_coefficient(model.beta, a, b, r), z));
    }
    Ok(Est::linear(&terms))
}

/// Estimates of `ζ^r_{m,l}` for `1 ≤ m ≤ l ≤ α + 1`, `l ≤ r ≤ m + l`.
#[derive(Clone, Debug, Default)]
pub struct ZetaTable(BTreeMap<(usize, usize, usize), Est>);

impl ZetaTable {
    pub fn compute(
        window: &Window,
        system: &ConnectionSystem,
        budget: &McBudget,
        stream: SeedStream,
        include_disjoint: bool,
    ) -> Result<ZetaTable> {
        let top = system.alpha() + 1;
        let mut keys = Vec::new();
        for m in 1..=top {
            for l in m..=top {
                let hi = if include_disjoint { m + l } else { m + l - 1 };
                for r in l..=hi {
                    keys.push((m, l, r));
                }
            }
        }
        let est: Vec<Result<Est>> =
            keys.iter().map(|&(m, l, r)| zeta(m, l, r, window, system, budget, stream)).collect();
        let mut map = BTreeMap::new();
        for (k, e) in keys.into_iter().zip(est) {
            map.insert(k, e?);
        }
        Ok(ZetaTable(map))
    }

    /// `ζ^r_{m,l}` using the symmetry in `(m, l)`.
    pub fn get(&self, m: usize, l: usize, r: usize) -> Option<Est> {
        self.0.get(&(m.min(l), m.max(l), r)).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), Est)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }
}

/// Linear combination of table entries with the coefficients merged per entry,
/// so shared estimates are not counted as independent.
fn combine(table: &ZetaTable, coefs: BTreeMap<(usize, usize, usize), f64>) -> Est {
    let terms: Vec<(f64, Est)> = coefs
        .into_iter()
        .map(|((m, l, r), c)| (c, table.get(m, l, r).expect("zeta entry computed")))
        .collect();
    Est::linear(&terms)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaEntry {
    pub m: usize,
    pub l: usize,
    pub r: usize,
    pub estimate: Est,
}

/// Moments of counts and of `χ_a` from replicated realizations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMoments {
    pub replicates: usize,
    /// `E f_j`.
    pub count_means: Vec<Est>,
    /// `Cov(f_i, f_j)`.
    pub covariances: Vec<Vec<Est>>,
    pub euler_mean: Est,
    pub euler_variance: Est,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub beta: f64,
    pub window_measure: f64,
    pub coefficients: Vec<f64>,
    pub zeta: Vec<ZetaEntry>,
    /// `E f_j`, `j = 0..=α`.
    pub expected_counts: Vec<Est>,
    /// `Cov(f_i, f_j)`.
    pub covariances: Vec<Vec<Est>>,
    pub euler_mean: Est,
    pub euler_variance: Est,
    /// `a_α² β^{α+1}/(α+1)! ζ^{α+1}_{α+1,α+1}(W)`.
    pub lower_bound: Est,
    /// Summands `k = 1..=α+1` of the Fock-space decomposition, from an
    /// independent set of `ζ` estimates.
    pub fock_terms: Vec<Est>,
    pub empirical: Option<EmpiricalMoments>,
}

impl MomentReport {
    /// Sum of the Fock-space summands.
    pub fn fock_total(&self) -> Est {
        Est::linear(&self.fock_terms.iter().map(|e| (1.0, *e)).collect::<Vec<_>>())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self).map_err(|e| Error::Io(e.into()))
    }

    /// CSV with one estimate per row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# schema: rcm-moments v1")?;
        writeln!(out, "quantity,source,i,j,k,value,standard_error,samples")?;
        let mut row = |q: &str, src: &str, i: usize, j: usize, k: usize, e: &Est| -> std::io::Result<()> {
            writeln!(out, "{q},{src},{i},{j},{k},{},{},{}", fmt_f(e.value), fmt_f(e.standard_error), e.samples)
        };
        for z in &self.zeta {
            row("zeta", "formula", z.m, z.l, z.r, &z.estimate)?;
        }
        for (j, e) in self.expected_counts.iter().enumerate() {
            row("mean_count", "formula", j, 0, 0, e)?;
        }
        for (i, rowv) in self.covariances.iter().enumerate() {
            for (j, e) in rowv.iter().enumerate() {
                row("cov_count", "formula", i, j, 0, e)?;
            }
        }
        row("euler_mean", "formula", 0, 0, 0, &self.euler_mean)?;
        row("euler_variance", "formula", 0, 0, 0, &self.euler_variance)?;
        row("variance_lower_bound", "formula", 0, 0, 0, &self.lower_bound)?;
        for (k, e) in self.fock_terms.iter().enumerate() {
            row("fock_term", "formula", 0, 0, k + 1, e)?;
        }
        if let Some(emp) = &self.empirical {
            for (j, e) in emp.count_means.iter().enumerate() {
                row("mean_count", "empirical", j, 0, 0, e)?;
            }
            for (i, rowv) in emp.covariances.iter().enumerate() {
                for (j, e) in rowv.iter().enumerate() {
                    row("cov_count", "empirical", i, j, 0, e)?;
                }
            }
            row("euler_mean", "empirical", 0, 0, 0, &emp.euler_mean)?;
            row("euler_variance", "empirical", 0, 0, 0, &emp.euler_variance)?;
        }
        Ok(())
    }
}

/// Pinned float formatting for reports.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.9e}")
}

/// Closed-form moments of `χ_a` and of the simplex counts.
pub fn euler_moments(a: &CoefficientVector, model: &Model, budget: &McBudget, stream: SeedStream) -> Result<MomentReport> {
    let alpha = model.alpha();
    a.check_len(alpha)?;
    let top = alpha + 1;
    let beta = model.beta;
    let table = ZetaTable::compute(&model.window, &model.system, budget, stream.named("zeta"), false)?;

    let expected_counts: Vec<Est> =
        (1..=top).map(|m| table.get(m, m, m).unwrap().scaled(beta.powi(m as i32) / factorial(m))).collect();
    let mut covariances = vec![vec![Est { value: 0.0, standard_error: 0.0, samples: 0 }; top]; top];
    for m in 1..=top {
        for l in 1..=top {
            let mut c = BTreeMap::new();
            for r in m.max(l)..m + l {
                *c.entry((m.min(l), m.max(l), r)).or_insert(0.0) += cov_coefficient(beta, m, l, r);
            }
            covariances[m - 1][l - 1] = combine(&table, c);
        }
    }
    let av = a.as_slice();
    let mean_terms: Vec<(f64, Est)> = (1..=top).map(|m| (av[m - 1], expected_counts[m - 1])).collect();
    let euler_mean = Est::linear(&mean_terms);

    let mut var_coefs = BTreeMap::new();
    for m in 1..=top {
        for l in 1..=top {
            for r in m.max(l)..m + l {
                *var_coefs.entry((m.min(l), m.max(l), r)).or_insert(0.0) +=
                    av[m - 1] * av[l - 1] * cov_coefficient(beta, m, l, r);
            }
        }
    }
    let euler_variance = combine(&table, var_coefs);
    let lower_bound = expected_counts[alpha].scaled(av[alpha] * av[alpha]);

    let fock_table = ZetaTable::compute(&model.window, &model.system, budget, stream.named("fock"), false)?;
    let fock_terms = (1..=top)
        .map(|k| {
            let mut c = BTreeMap::new();
            for m in k..=top {
                for l in k..=top {
                    let coef = av[m - 1] * av[l - 1] * beta.powi((m + l - k) as i32)
                        / (factorial(m - k) * factorial(l - k) * factorial(k));
                    *c.entry((m.min(l), m.max(l), m + l - k)).or_insert(0.0) += coef;
                }
            }
            combine(&fock_table, c)
        })
        .collect();

    let zeta = table.entries().map(|((m, l, r), estimate)| ZetaEntry { m, l, r, estimate }).collect();
    Ok(MomentReport {
        beta,
        window_measure: model.window.measure(),
        coefficients: av.to_vec(),
        zeta,
        expected_counts,
        covariances,
        euler_mean,
        euler_variance,
        lower_bound,
        fock_terms,
        empirical: None,
    })
}

/// Simplex-count vectors of `replicates` independent realizations.
pub fn replicate_counts(model: &Model, replicates: usize, stream: SeedStream) -> Result<Vec<Vec<usize>>> {
    (0..replicates)
        .into_par_iter()
        .map(|i| model.sample(stream.child(i as u64)).map(|c| c.counts()))
        .collect()
}

/// Sample covariance of paired observations with the standard error of the
/// mean of centred products.
pub fn sample_covariance(x: &[f64], y: &[f64]) -> Result<Est> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::TooFewSamples { got: n.min(y.len()), min: 2 });
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let e = Est::from_samples(&z)?;
    Ok(e.scaled(n as f64 / (n - 1) as f64))
}

pub fn empirical_moments(counts: &[Vec<usize>], a: &CoefficientVector) -> Result<EmpiricalMoments> {
    let n = counts.len();
    let dims = a.as_slice().len();
    let cols: Vec<Vec<f64>> = (0..dims).map(|j| counts.iter().map(|c| c.get(j).copied().unwrap_or(0) as f64).collect()).collect();
    let chi: Vec<f64> = counts.iter().map(|c| a.apply(c)).collect();
    let count_means = cols.iter().map(|c| Est::from_samples(c)).collect::<Result<Vec<_>>>()?;
    let mut covariances = Vec::with_capacity(dims);
    for i in 0..dims {
        covariances.push((0..dims).map(|j| sample_covariance(&cols[i], &cols[j])).collect::<Result<Vec<_>>>()?);
    }
    Ok(EmpiricalMoments {
        replicates: n,
        count_means,
        covariances,
        euler_mean: Est::from_samples(&chi)?,
        euler_variance: sample_covariance(&chi, &chi)?,
    })
}

/// Truncation of `ℝ^d` used by pinned integrals.
fn pinned_mean<F>(budget: &McBudget, stream: SeedStream, h: f64, dim: usize, r: usize, f: F) -> Result<Est>
where
    F: Fn(&mut SimRng, f64) -> f64 + Sync,
{
    let e = adaptive_mean(budget, stream, |rng| f(rng, h))?;
    Ok(e.scaled((2.0 * h).powi((dim * (r - 1)) as i32)))
}

const MAX_DOUBLINGS: usize = 12;

/// Runs `estimate(h)` on boxes of half-width `h`, from the system's range if
/// finite, else doubling until successive values agree within half a standard
/// error. Returns the estimate and the final half-width.
fn truncated<F>(range: Option<f64>, estimate: F) -> Result<(Est, f64)>
where
    F: Fn(f64, usize) -> Result<Est>,
{
    if let Some(h) = range {
        return Ok((estimate(h, 0)?, h));
    }
    let mut h = 1.0;
    let mut prev = estimate(h, 0)?;
    for step in 1..=MAX_DOUBLINGS {
        h *= 2.0;
        let cur = estimate(h, step)?;
        let tol = 0.5 * prev.standard_error.hypot(cur.standard_error);
        if (cur.value - prev.value).abs() <= tol.max(1e-12 * cur.value.abs()) {
            return Ok((cur, h));
        }
        prev = cur;
    }
    Err(Error::Divergent(format!(
        "box truncation did not stabilise up to half-width {h}; last value {}",
        prev.value
    )))
}

fn require_stationary(system: &ConnectionSystem) -> Result<()> {
    if !system.is_translation_invariant() {
        return Err(Error::Hypothesis("stationary limits need a translation-invariant system".into()));
    }
    Ok(())
}

fn origin(dim: usize) -> Location {
    Location::Euclidean(std::iter::repeat_n(0.0, dim).collect())
}

/// `∫_{(ℝ^d)^{r−1}} ∫_{A^r} f_K((0,a_1),(x_2,a_2),…)` for a connected template.
pub fn pinned_integral(
    template: &ComplexTemplate,
    system: &ConnectionSystem,
    dim: usize,
    marks: &MarkDistribution,
    budget: &McBudget,
    stream: SeedStream,
) -> Result<(Est, f64)> {
    require_stationary(system)?;
    let r = template.vertex_count();
    let ecc = template
        .eccentricity(0)
        .ok_or_else(|| Error::IndexRange("pinned integrals need a connected template".into()))?;
    if r == 1 {
        let e = adaptive_mean(budget, stream, |_| 1.0)?;
        return Ok((e, 0.0));
    }
    let range = system.range().map(|rho| ecc as f64 * rho);
    if range == Some(0.0) {
        let e = adaptive_mean(budget, stream, |_| 0.0)?;
        return Ok((e, 0.0));
    }
    truncated(range, |h, step| {
        pinned_mean(budget, stream.child(step as u64), h, dim, r, |rng, h| {
            let center = vec![0.0; dim];
            let mut pts: SmallVec<[Point; 8]> = SmallVec::new();
            pts.push(Point::new(origin(dim), marks.sample(rng), 0.5, 0));
            for _ in 1..r {
                pts.push(box_offset_point(&center, h, marks, rng));
            }
            let refs: SmallVec<[&Point; 8]> = pts.iter().collect();
            template.simplex_function(system, &refs)
        })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowRatio {
    pub window_measure: f64,
    pub m: usize,
    pub l: usize,
    pub r: usize,
    /// `ζ^r_{m,l}(W_n) / |W_n|`.
    pub ratio: Est,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport {
    pub beta: f64,
    /// `ζ^r_{m,l}(0)` for `m ≤ l`, `l ≤ r ≤ m + l − 1`.
    pub zeta0: Vec<ZetaEntry>,
    /// `σ_{m,l}`, symmetric by construction.
    pub sigma: Vec<Vec<Est>>,
    /// Smallest eigenvalue of `Σ`, and of `Σ` shrunk entrywise by three
    /// standard errors toward zero.
    pub min_eigenvalue: f64,
    pub min_eigenvalue_shrunk: f64,
    pub window_ratios: Vec<WindowRatio>,
}

impl StationaryReport {
    pub fn sigma_value(&self, m: usize, l: usize) -> Est {
        self.sigma[m - 1][l - 1]
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# schema: rcm-stationary v1")?;
        writeln!(out, "quantity,window_measure,m,l,r,value,standard_error,samples")?;
        for z in &self.zeta0 {
            let e = z.estimate;
            writeln!(out, "zeta0,inf,{},{},{},{},{},{}", z.m, z.l, z.r, fmt_f(e.value), fmt_f(e.standard_error), e.samples)?;
        }
        for (i, row) in self.sigma.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                writeln!(out, "sigma,inf,{},{},0,{},{},{}", i + 1, j + 1, fmt_f(e.value), fmt_f(e.standard_error), e.samples)?;
            }
        }
        for w in &self.window_ratios {
            let e = w.ratio;
            writeln!(
                out,
                "zeta_ratio,{},{},{},{},{},{},{}",
                fmt_f(w.window_measure),
                w.m,
                w.l,
                w.r,
                fmt_f(e.value),
                fmt_f(e.standard_error),
                e.samples
            )?;
        }
        writeln!(out, "min_eigenvalue,inf,0,0,0,{},0,0", fmt_f(self.min_eigenvalue))?;
        writeln!(out, "min_eigenvalue_shrunk,inf,0,0,0,{},0,0", fmt_f(self.min_eigenvalue_shrunk))?;
        Ok(())
    }
}

fn min_eigenvalue(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (m[i][j] + m[j][i]));
    mat.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Stationary limits `ζ^r_{m,l}(0)`, `σ_{m,l}` and `Σ`, with the finite-window
/// ratios `ζ^r_{m,l}(W_n)/|W_n|` for each window in `windows`.
pub fn stationary_limits(
    system: &ConnectionSystem,
    dim: usize,
    marks: &MarkDistribution,
    beta: f64,
    windows: &[Window],
    budget: &McBudget,
    stream: SeedStream,
) -> Result<StationaryReport> {
    require_stationary(system)?;
    let top = system.alpha() + 1;
    let mut zeta0 = Vec::new();
    let mut lookup = BTreeMap::new();
    for m in 1..=top {
        for l in m..=top {
            for r in l..m + l {
                let t = ComplexTemplate::zeta(m, l, r)?;
                let (e, _) = pinned_integral(&t, system, dim, marks, budget, stream.child(zeta_label(m, l, r)))?;
                lookup.insert((m, l, r), e);
                zeta0.push(ZetaEntry { m, l, r, estimate: e });
            }
        }
    }
    let mut sigma = vec![vec![Est { value: 0.0, standard_error: 0.0, samples: 0 }; top]; top];
    for m in 1..=top {
        for l in m..=top {
            let terms: Vec<(f64, Est)> = (l..m + l).map(|r| (cov_coefficient(beta, m, l, r), lookup[&(m, l, r)])).collect();
            let s = Est::linear(&terms);
            sigma[m - 1][l - 1] = s;
            sigma[l - 1][m - 1] = s;
        }
    }
    let values: Vec<Vec<f64>> = sigma.iter().map(|row| row.iter().map(|e| e.value).collect()).collect();
    let shrunk: Vec<Vec<f64>> = sigma
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    let s = 3.0 * e.standard_error;
                    if e.value > s {
                        e.value - s
                    } else if e.value < -s {
                        e.value + s
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let mut window_ratios = Vec::new();
    for (wi, w) in windows.iter().enumerate() {
        for z in &zeta0 {
            let t = ComplexTemplate::zeta(z.m, z.l, z.r)?;
            let e = integral_representation(&t, w, system, budget, stream.named("window").child(wi as u64).child(zeta_label(z.m, z.l, z.r)))?;
            window_ratios.push(WindowRatio { window_measure: w.measure(), m: z.m, l: z.l, r: z.r, ratio: e.scaled(1.0 / w.measure()) });
        }
    }
    Ok(StationaryReport {
        beta,
        zeta0,
        min_eigenvalue: min_eigenvalue(&values),
        min_eigenvalue_shrunk: min_eigenvalue(&shrunk),
        sigma,
        window_ratios,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuReport {
    /// Largest per-mark estimate of `∫ φ_1((0,a),(y,b))^{1/2} dy Θ(db)`.
    pub nu: Est,
    /// The mark attaining it (numeric view).
    pub argmax_mark: f64,
    pub box_half_width: f64,
}

/// `ν = esssup_a ∫ φ_1((0,a),(y,b))^{1/2} λ(dy) Θ(db)` for a stationary
/// system. Uniform marks are scanned on a grid of `mark_grid` values.
pub fn integrability_nu(
    system: &ConnectionSystem,
    dim: usize,
    marks: &MarkDistribution,
    mark_grid: usize,
    budget: &McBudget,
    stream: SeedStream,
) -> Result<NuReport> {
    require_stationary(system)?;
    let mut best: Option<NuReport> = None;
    for (ai, (a, _)) in marks.atoms(mark_grid).into_iter().enumerate() {
        let (e, h) = truncated(system.range(), |h, step| {
            pinned_mean(budget, stream.child(ai as u64).child(step as u64), h, dim, 2, |rng, h| {
                let x = Point::new(origin(dim), a, 0.5, 0);
                let y = box_offset_point(&vec![0.0; dim], h, marks, rng);
                system.phi(&[&x, &y]).sqrt()
            })
        })?;
        if best.as_ref().is_none_or(|b| e.value > b.nu.value) {
            best = Some(NuReport { nu: e, argmax_mark: a.value(), box_half_width: h });
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("empty mark space".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connect::{constant_system, rips_system, stationary_marked_system, MarkRadius, Metric};
    use crate::space::Space;

    fn square() -> Window {
        Window::new(Space::unit_cube(2)).unwrap()
    }

    fn budget() -> McBudget {
        McBudget { min_samples: 1 << 14, max_samples: 1 << 20, rel_tol: 0.01 }
    }

    #[test]
    fn template_structure() {
        let t = ComplexTemplate::zeta(3, 2, 4).unwrap();
        assert_eq!(t.generators(), &[vec![0, 1, 2], vec![0, 3]]);
        assert_eq!(t.components(), 1);
        assert_eq!(t.eccentricity(0), Some(1));
        let d = ComplexTemplate::zeta(2, 2, 4).unwrap();
        assert_eq!(d.components(), 2);
        assert_eq!(d.eccentricity(0), None);
        assert!(ComplexTemplate::zeta(2, 2, 5).is_err());
        assert!(ComplexTemplate::zeta(3, 2, 2).is_err());
        // the example complex of seven vertices has 9 edges and 2 triangles
        let fig = ComplexTemplate::new(7, vec![vec![0, 1, 2], vec![2, 3], vec![2, 4], vec![3, 4], vec![4, 5, 6]]).unwrap();
        assert_eq!(fig.faces().iter().filter(|f| f.len() == 2).count(), 9);
        assert_eq!(fig.faces().iter().filter(|f| f.len() == 3).count(), 2);
    }

    #[test]
    fn small_zeta_exact_values() {
        let w = Window::new(Space::EuclideanBox { bounds: vec![(0.0, 2.0), (0.0, 3.0)] }).unwrap();
        let sys = rips_system(2, 0.3, Metric::Euclidean).unwrap();
        let z1 = zeta(1, 1, 1, &w, &sys, &budget(), SeedStream::new(1)).unwrap();
        assert_eq!(z1.value, 6.0);
        let z2 = zeta(1, 1, 2, &w, &sys, &budget(), SeedStream::new(1)).unwrap();
        assert_eq!(z2.value, 36.0);
    }

    #[test]
    fn constant_integrands() {
        let w = Window::new(Space::EuclideanBox { bounds: vec![(0.0, 2.0)] }).unwrap();
        let sys = constant_system(&[0.3, 0.5]).unwrap();
        let edge = ComplexTemplate::simplex(2).unwrap();
        let e = integral_representation(&edge, &w, &sys, &budget(), SeedStream::new(2)).unwrap();
        assert!((e.value - 0.3 * 4.0).abs() < 1e-12);
        let model = Model::new(w.clone(), sys, 4.0).unwrap();
        let e3 = expected_count(3, &model, &budget(), SeedStream::new(3)).unwrap();
        assert!((e3.value - 64.0 * 8.0 * 0.027 * 0.5 / 6.0).abs() < 1e-9);
        let v0 = covariance_counts(1, 1, &model, &budget(), SeedStream::new(3)).unwrap();
        assert_eq!(v0.value, 8.0);
    }

    #[test]
    fn fock_rewrite_and_lower_bound() {
        let model = Model::new(square(), rips_system(2, 0.3, Metric::Euclidean).unwrap(), 20.0).unwrap();
        let rep = euler_moments(&CoefficientVector::euler(2), &model, &budget(), SeedStream::new(4)).unwrap();
        let fock = rep.fock_total();
        assert!(rep.euler_variance.z_distance(&fock) < 4.0, "{:?} vs {fock:?}", rep.euler_variance);
        assert!(rep.euler_variance.value >= rep.lower_bound.value - 3.0 * rep.lower_bound.standard_error);
        assert!(rep.fock_terms.iter().all(|t| t.value > -3.0 * t.standard_error));
        let mut csv = Vec::new();
        rep.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("# schema: rcm-moments v1\n"));
    }

    #[test]
    fn complete_complex_edge_variance() {
        // φ ≡ 1: f_1 = C(τ, 2) with τ ~ Poisson(μ); Var = μ³ + μ²/2
        let mu = 6.0f64;
        let w = Window::new(Space::EuclideanBox { bounds: vec![(0.0, 3.0)] }).unwrap();
        let model = Model::new(w, constant_system(&[1.0, 1.0]).unwrap(), 2.0).unwrap();
        let v = covariance_counts(2, 2, &model, &budget(), SeedStream::new(5)).unwrap();
        assert!((v.value - (mu.powi(3) + mu * mu / 2.0)).abs() < 1e-9);
    }

    #[test]
    fn stationary_indicator_values() {
        let r0 = 0.1;
        let sys = stationary_marked_system(2, MarkRadius::Fixed(r0)).unwrap();
        let t = ComplexTemplate::zeta(2, 2, 2).unwrap();
        let (e, _) = pinned_integral(&t, &sys, 1, &MarkDistribution::Single, &budget(), SeedStream::new(6)).unwrap();
        assert!((e.value - 2.0 * r0).abs() < 1e-12);
        let nu = integrability_nu(&sys, 1, &MarkDistribution::Single, 8, &budget(), SeedStream::new(7)).unwrap();
        assert!((nu.nu.value - 2.0 * r0).abs() < 1e-12);
    }

    #[test]
    fn constant_profile_diverges() {
        let sys = constant_system(&[0.5]).unwrap();
        let b = McBudget::fixed(2048);
        let err = integrability_nu(&sys, 1, &MarkDistribution::Single, 1, &b, SeedStream::new(8)).unwrap_err();
        assert!(matches!(err, Error::Divergent(_)));
    }

    #[test]
    fn stationary_sigma_is_symmetric_and_positive() {
        let sys = stationary_marked_system(2, MarkRadius::Fixed(0.1)).unwrap();
        let rep = stationary_limits(&sys, 1, &MarkDistribution::Single, 50.0, &[], &budget(), SeedStream::new(9)).unwrap();
        for m in 1..=3 {
            for l in 1..=3 {
                assert_eq!(rep.sigma_value(m, l), rep.sigma_value(l, m));
            }
        }
        // σ_{1,1} = β ζ^1_{1,1}(0) = β
        assert_eq!(rep.sigma_value(1, 1).value, 50.0);
        assert!(rep.min_eigenvalue > 0.0);
    }

    #[test]
    fn hyperbolic_systems_are_not_stationary() {
        let sys = crate::connect::hyperbolic_rgg_system(0.4, 0.5).unwrap();
        assert!(matches!(
            stationary_limits(&sys, 2, &MarkDistribution::Single, 1.0, &[], &budget(), SeedStream::new(1)),
            Err(Error::Hypothesis(_))
        ));
    }
}
