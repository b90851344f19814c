//! Connection functions `φ_1, …, φ_α` and the named systems.
//!
//! `φ_j` receives the `j + 1` vertices of a candidate simplex and returns the
//! probability with which the simplex is admitted once all its faces are
//! present. `φ_0 ≡ 1` is implicit.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{disks_intersect, miniball, perpendicular_geodesic, Disk};
use crate::space::{hyperbolic_distance, Location, Mark, Point, Space};

/// Distance used by metric connection functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    /// Hyperbolic distance of the Poincaré disk.
    Hyperbolic,
}

impl Metric {
    pub fn of(space: &Space) -> Metric {
        if space.is_euclidean() {
            Metric::Euclidean
        } else {
            Metric::Hyperbolic
        }
    }

    pub fn distance(self, x: &Point, y: &Point) -> f64 {
        match self {
            Metric::Euclidean => euclid2(x, y).sqrt(),
            Metric::Hyperbolic => hyperbolic_distance(x, y).unwrap_or(f64::INFINITY),
        }
    }
}

fn coords(p: &Point) -> &[f64] {
    match &p.location {
        Location::Euclidean(c) => c,
        Location::Polar { .. } => panic!("euclidean connection function applied to a hyperbolic point"),
    }
}

fn euclid2(x: &Point, y: &Point) -> f64 {
    coords(x).iter().zip(coords(y)).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Mark-dependent interaction radius `r(a, b)` of the stationary systems.
#[derive(Clone, Debug, PartialEq)]
pub enum MarkRadius {
    /// Same radius for all marks.
    Fixed(f64),
    /// Symmetric matrix indexed by discrete marks.
    Table(Vec<Vec<f64>>),
    /// `base + scale · (a + b)` for numeric marks (a Boolean-model style profile).
    Additive { base: f64, scale: f64 },
}

impl MarkRadius {
    pub fn radius(&self, a: Mark, b: Mark) -> f64 {
        match self {
            MarkRadius::Fixed(r) => *r,
            MarkRadius::Table(t) => match (a, b) {
                (Mark::Discrete(i), Mark::Discrete(j)) => t[i as usize][j as usize],
                _ => t[0][0],
            },
            MarkRadius::Additive { base, scale } => base + scale * (a.value() + b.value()),
        }
    }

    /// Largest radius over all marks in `[0, max_mark]`.
    pub fn max_radius(&self, max_mark: f64) -> f64 {
        match self {
            MarkRadius::Fixed(r) => *r,
            MarkRadius::Table(t) => t.iter().flatten().copied().fold(0.0, f64::max),
            MarkRadius::Additive { base, scale } => base + 2.0 * scale.max(0.0) * max_mark,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |r: f64| !(r.is_finite() && r >= 0.0);
        match self {
            MarkRadius::Fixed(r) if bad(*r) => Err(Error::InvalidParameter(format!("radius {r}"))),
            MarkRadius::Table(t) => {
                let n = t.len();
                if n == 0 || t.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidParameter("radius table must be square".into()));
                }
                for i in 0..n {
                    for j in 0..n {
                        if bad(t[i][j]) || t[i][j] != t[j][i] {
                            return Err(Error::InvalidParameter("radius table must be symmetric and nonnegative".into()));
                        }
                    }
                }
                Ok(())
            }
            MarkRadius::Additive { base, scale } if bad(*base) || bad(*scale) => {
                Err(Error::InvalidParameter("additive radius needs nonnegative base and scale".into()))
            }
            _ => Ok(()),
        }
    }
}

/// User-supplied connection function.
pub type CustomFn = Arc<dyn Fn(&[&Point]) -> f64 + Send + Sync>;

/// One connection function `φ_j`.
#[derive(Clone)]
pub enum Connection {
    /// `φ ≡ p`.
    Constant(f64),
    /// Vietoris–Rips: all pairwise distances at most `radius`.
    Rips { radius: f64, metric: Metric },
    /// Čech: the closed balls of radius `radius` have a common point.
    Cech { radius: f64, metric: Metric },
    /// Pairs only: the geodesics `H(x)` and `H(y)` intersect.
    HyperbolicLine,
    /// Rips with mark-dependent radii, Euclidean metric.
    MarkedRips(MarkRadius),
    /// Arbitrary symmetric function. `range` bounds the Euclidean distance of
    /// pairs with positive value, if finite.
    Custom { f: CustomFn, range: Option<f64>, translation_invariant: bool },
}

impl fmt::Debug for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Connection::Constant(p) => write!(f, "Constant({p})"),
            Connection::Rips { radius, metric } => write!(f, "Rips({radius}, {metric:?})"),
            Connection::Cech { radius, metric } => write!(f, "Cech({radius}, {metric:?})"),
            Connection::HyperbolicLine => write!(f, "HyperbolicLine"),
            Connection::MarkedRips(r) => write!(f, "MarkedRips({r:?})"),
            Connection::Custom { range, .. } => write!(f, "Custom(range={range:?})"),
        }
    }
}

const CECH_TOL: f64 = 1e-12;

impl Connection {
    pub fn eval(&self, pts: &[&Point]) -> f64 {
        match self {
            Connection::Constant(p) => *p,
            Connection::Rips { radius, metric } => indicator(all_pairs(pts, |x, y| match metric {
                Metric::Euclidean => euclid2(x, y) <= radius * radius,
                Metric::Hyperbolic => metric.distance(x, y) <= *radius,
            })),
            Connection::Cech { radius, metric } => indicator(cech(pts, *radius, *metric)),
            Connection::HyperbolicLine => {
                if pts.len() != 2 {
                    return 0.0;
                }
                indicator(lines_meet(pts[0], pts[1]))
            }
            Connection::MarkedRips(r) => indicator(all_pairs(pts, |x, y| {
                let rr = r.radius(x.mark, y.mark);
                euclid2(x, y) <= rr * rr
            })),
            Connection::Custom { f, .. } => f(pts).clamp(0.0, 1.0),
        }
    }

    /// Sup of the Euclidean pair distance at which `φ` can be positive.
    pub fn range(&self, max_mark: f64) -> Option<f64> {
        match self {
            Connection::Constant(p) if *p == 0.0 => Some(0.0),
            Connection::Constant(_) | Connection::HyperbolicLine => None,
            Connection::Rips { radius, metric: Metric::Euclidean } => Some(*radius),
            Connection::Cech { radius, metric: Metric::Euclidean } => Some(2.0 * radius),
            Connection::Rips { .. } | Connection::Cech { .. } => None,
            Connection::MarkedRips(r) => Some(r.max_radius(max_mark)),
            Connection::Custom { range, .. } => *range,
        }
    }

    pub fn is_translation_invariant(&self) -> bool {
        match self {
            Connection::Constant(_) | Connection::MarkedRips(_) => true,
            Connection::Rips { metric, .. } | Connection::Cech { metric, .. } => *metric == Metric::Euclidean,
            Connection::HyperbolicLine => false,
            Connection::Custom { translation_invariant, .. } => *translation_invariant,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Connection::Constant(p) if !(0.0..=1.0).contains(p) => {
                Err(Error::InvalidParameter(format!("connection probability {p} not in [0, 1]")))
            }
            Connection::Rips { radius, .. } | Connection::Cech { radius, .. } if !(radius.is_finite() && *radius > 0.0) => {
                Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")))
            }
            Connection::MarkedRips(r) => r.validate(),
            _ => Ok(()),
        }
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn all_pairs(pts: &[&Point], ok: impl Fn(&Point, &Point) -> bool) -> bool {
    (0..pts.len()).all(|i| (i + 1..pts.len()).all(|j| ok(pts[i], pts[j])))
}

fn cech(pts: &[&Point], r: f64, metric: Metric) -> bool {
    match metric {
        Metric::Euclidean => {
            if pts.len() == 2 {
                return euclid2(pts[0], pts[1]).sqrt() <= 2.0 * r * (1.0 + CECH_TOL);
            }
            let c: Vec<&[f64]> = pts.iter().map(|p| coords(p)).collect();
            miniball(&c).1 <= r * (1.0 + CECH_TOL)
        }
        Metric::Hyperbolic => {
            if pts.len() == 2 {
                return metric.distance(pts[0], pts[1]) <= 2.0 * r * (1.0 + CECH_TOL);
            }
            let disks: Vec<Disk> = pts.iter().map(|p| hyperbolic_ball(p.location.poincare(), r)).collect();
            disks_intersect(&disks, CECH_TOL)
        }
    }
}

/// The hyperbolic ball of radius `r` around `a` is a Euclidean disk in the
/// Poincaré model.
pub fn hyperbolic_ball(a: [f64; 2], r: f64) -> Disk {
    let t = (0.5 * r).tanh();
    let n2 = a[0] * a[0] + a[1] * a[1];
    let den = 1.0 - n2 * t * t;
    let s = (1.0 - t * t) / den;
    Disk { center: [a[0] * s, a[1] * s], radius: t * (1.0 - n2) / den }
}

fn lines_meet(x: &Point, y: &Point) -> bool {
    let (Some(gx), Some(gy)) = (perpendicular_geodesic(x.location.poincare()), perpendicular_geodesic(y.location.poincare())) else {
        log::warn!("hyperbolic line of the origin is undefined; treating the pair as unconnected");
        return false;
    };
    gx.meets(&gy, CECH_TOL)
}

/// The family `φ_1, …, φ_α`.
#[derive(Clone, Debug)]
pub struct ConnectionSystem {
    phi: Vec<Connection>,
    /// Upper bound on numeric mark values, used for range hints.
    max_mark: f64,
}

impl ConnectionSystem {
    /// System with `phi[j − 1] = φ_j`.
    pub fn new(phi: Vec<Connection>) -> Result<ConnectionSystem> {
        if phi.is_empty() {
            return Err(Error::InvalidParameter("alpha must be at least 1".into()));
        }
        for c in &phi {
            c.validate()?;
        }
        Ok(ConnectionSystem { phi, max_mark: 1.0 })
    }

    /// Sets the largest numeric mark value (discrete marks count as `0, 1, …`).
    pub fn with_max_mark(mut self, max_mark: f64) -> Self {
        self.max_mark = max_mark;
        self
    }

    pub fn alpha(&self) -> usize {
        self.phi.len()
    }

    /// `φ_j`, `1 ≤ j ≤ α`.
    pub fn connection(&self, j: usize) -> &Connection {
        &self.phi[j - 1]
    }

    /// `φ_j` evaluated on a `(j + 1)`-tuple; `φ_0 ≡ 1`.
    pub fn phi(&self, pts: &[&Point]) -> f64 {
        match pts.len() {
            0 => 0.0,
            1 => 1.0,
            n if n - 1 <= self.alpha() => self.phi[n - 2].eval(pts),
            _ => 0.0,
        }
    }

    /// Euclidean range of `φ_1`; no simplex spans a larger pair distance.
    pub fn range(&self) -> Option<f64> {
        self.phi[0].range(self.max_mark)
    }

    pub fn is_translation_invariant(&self) -> bool {
        self.phi.iter().all(Connection::is_translation_invariant)
    }

    /// Same system with `α` lowered (extra functions dropped).
    pub fn truncated(&self, alpha: usize) -> Result<ConnectionSystem> {
        ConnectionSystem::new(self.phi[..alpha.min(self.alpha())].to_vec()).map(|s| s.with_max_mark(self.max_mark))
    }
}

/// `φ_j ≡ p_j`.
pub fn constant_system(p: &[f64]) -> Result<ConnectionSystem> {
    ConnectionSystem::new(p.iter().map(|&x| Connection::Constant(x)).collect())
}

pub fn cech_system(alpha: usize, radius: f64, metric: Metric) -> Result<ConnectionSystem> {
    ConnectionSystem::new(vec![Connection::Cech { radius, metric }; alpha])
}

pub fn rips_system(alpha: usize, radius: f64, metric: Metric) -> Result<ConnectionSystem> {
    ConnectionSystem::new(vec![Connection::Rips { radius, metric }; alpha])
}

/// Hyperbolic random geometric graph with triangles kept with probability `p`.
pub fn hyperbolic_rgg_system(radius: f64, p: f64) -> Result<ConnectionSystem> {
    ConnectionSystem::new(vec![Connection::Rips { radius, metric: Metric::Hyperbolic }, Connection::Constant(p)])
}

/// Edges between points whose hyperbolic lines cross, triangles with probability `p`.
pub fn hyperbolic_line_system(p: f64) -> Result<ConnectionSystem> {
    ConnectionSystem::new(vec![Connection::HyperbolicLine, Connection::Constant(p)])
}

/// Translation-invariant system on `ℝ^d × A`: every `φ_j` is the Rips
/// indicator with mark-dependent radius.
pub fn stationary_marked_system(alpha: usize, profile: MarkRadius) -> Result<ConnectionSystem> {
    ConnectionSystem::new(vec![Connection::MarkedRips(profile); alpha])
}
