//! Sampling spaces, observation windows and the Poisson vertex process.
//!
//! Three concrete spaces are supported: axis-aligned Euclidean boxes, a disk of
//! hyperbolic radius `R` in the Poincaré model, and marked stationary boxes
//! `ℝ^d × A` with a pluggable mark distribution. Every point carries an
//! auxiliary uniform order key; comparing `(order_key, serial)` gives the strict
//! total order used to canonicalise simplices.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Euclidean coordinates; inline for `d ≤ 3`.
pub type Coords = SmallVec<[f64; 3]>;

/// Radial density of the hyperbolic intensity measure in geodesic polar
/// coordinates `(t, φ)`, normalised by `1/(2π)` in the angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RadialDensity {
    /// `cosh(t)`; window measure `sinh(R)`.
    #[default]
    Cosh,
    /// `sinh(t)`, the hyperbolic area element up to `2π`; window measure `cosh(R) − 1`.
    Sinh,
}

impl RadialDensity {
    fn mass(self, radius: f64) -> f64 {
        match self {
            RadialDensity::Cosh => radius.sinh(),
            RadialDensity::Sinh => radius.cosh() - 1.0,
        }
    }

    /// Inverse of the normalised radial CDF on `[0, radius]`.
    fn inverse_cdf(self, u: f64, radius: f64) -> f64 {
        match self {
            RadialDensity::Cosh => (u * radius.sinh()).asinh(),
            RadialDensity::Sinh => (1.0 + u * (radius.cosh() - 1.0)).acosh(),
        }
    }
}

/// Probability distribution `Θ` on the mark space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarkDistribution {
    /// One-point mark space (the unmarked case).
    #[default]
    Single,
    /// Finitely many marks `0..weights.len()` with the given (unnormalised) weights.
    Discrete { weights: Vec<f64> },
    /// Uniform marks on `[0, 1]`.
    Uniform,
}

impl MarkDistribution {
    pub fn validate(&self) -> Result<()> {
        if let MarkDistribution::Discrete { weights } = self {
            if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(Error::InvalidParameter(
                    "discrete mark weights must be finite and nonnegative".into(),
                ));
            }
            if weights.iter().sum::<f64>() <= 0.0 {
                return Err(Error::InvalidParameter("discrete mark weights sum to zero".into()));
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Mark {
        match self {
            MarkDistribution::Single => Mark::None,
            MarkDistribution::Uniform => Mark::Continuous(rng.random::<f64>()),
            MarkDistribution::Discrete { weights } => {
                let total: f64 = weights.iter().sum();
                let mut u = rng.random::<f64>() * total;
                for (i, w) in weights.iter().enumerate() {
                    if u < *w {
                        return Mark::Discrete(i as u32);
                    }
                    u -= w;
                }
                Mark::Discrete((weights.len() - 1) as u32)
            }
        }
    }

    /// Representative marks with probability weights; used for sup/esssup scans
    /// and exact mark averaging. Uniform marks are discretised on a midpoint grid.
    pub fn atoms(&self, grid: usize) -> Vec<(Mark, f64)> {
        match self {
            MarkDistribution::Single => vec![(Mark::None, 1.0)],
            MarkDistribution::Discrete { weights } => {
                let total: f64 = weights.iter().sum();
                weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (Mark::Discrete(i as u32), w / total))
                    .collect()
            }
            MarkDistribution::Uniform => {
                let g = grid.max(1);
                (0..g)
                    .map(|i| (Mark::Continuous((i as f64 + 0.5) / g as f64), 1.0 / g as f64))
                    .collect()
            }
        }
    }
}

/// A mark in `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
pub enum Mark {
    #[default]
    None,
    Discrete(u32),
    Continuous(f64),
}

impl Mark {
    /// Numeric view of the mark (`0` for the unmarked case).
    pub fn value(self) -> f64 {
        match self {
            Mark::None => 0.0,
            Mark::Discrete(i) => f64::from(i),
            Mark::Continuous(x) => x,
        }
    }
}

/// The sampling space together with the window geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    /// Axis-aligned box `∏ [lo_i, hi_i]` with Lebesgue measure.
    EuclideanBox { bounds: Vec<(f64, f64)> },
    /// Disk of hyperbolic radius `radius` around the origin of the Poincaré disk.
    HyperbolicDisk {
        radius: f64,
        #[serde(default)]
        density: RadialDensity,
    },
    /// Box in `ℝ^d` times a mark space with distribution `marks`.
    MarkedStationary {
        bounds: Vec<(f64, f64)>,
        #[serde(default)]
        marks: MarkDistribution,
    },
}

impl Space {
    pub fn unit_cube(dim: usize) -> Space {
        Space::EuclideanBox { bounds: vec![(0.0, 1.0); dim] }
    }

    pub fn hyperbolic(radius: f64) -> Space {
        Space::HyperbolicDisk { radius, density: RadialDensity::Cosh }
    }

    pub fn interval(len: f64, marks: MarkDistribution) -> Space {
        Space::MarkedStationary { bounds: vec![(0.0, len)], marks }
    }

    /// Closed-form `|W|`.
    pub fn measure(&self) -> f64 {
        match self {
            Space::EuclideanBox { bounds } | Space::MarkedStationary { bounds, .. } => {
                bounds.iter().map(|(lo, hi)| (hi - lo).max(0.0)).product()
            }
            Space::HyperbolicDisk { radius, density } => density.mass(radius.max(0.0)),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Space::EuclideanBox { bounds } | Space::MarkedStationary { bounds, .. } => bounds.len(),
            Space::HyperbolicDisk { .. } => 2,
        }
    }

    pub fn bounds(&self) -> Option<&[(f64, f64)]> {
        match self {
            Space::EuclideanBox { bounds } | Space::MarkedStationary { bounds, .. } => Some(bounds),
            Space::HyperbolicDisk { .. } => None,
        }
    }

    pub fn marks(&self) -> MarkDistribution {
        match self {
            Space::MarkedStationary { marks, .. } => marks.clone(),
            _ => MarkDistribution::Single,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        !matches!(self, Space::HyperbolicDisk { .. })
    }
}

/// A validated observation window: `0 < |W| < ∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Space", into = "Space")]
pub struct Window {
    space: Space,
    measure: f64,
}

impl TryFrom<Space> for Window {
    type Error = Error;
    fn try_from(space: Space) -> Result<Self> {
        Window::new(space)
    }
}

impl From<Window> for Space {
    fn from(w: Window) -> Space {
        w.space
    }
}

impl Window {
    pub fn new(space: Space) -> Result<Window> {
        match &space {
            Space::EuclideanBox { bounds } | Space::MarkedStationary { bounds, .. } => {
                if bounds.is_empty() {
                    return Err(Error::DegenerateWindow("box has no axes".into()));
                }
                for (lo, hi) in bounds {
                    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
                        return Err(Error::DegenerateWindow(format!("axis [{lo}, {hi}]")));
                    }
                }
                if let Space::MarkedStationary { marks, .. } = &space {
                    marks.validate()?;
                }
            }
            Space::HyperbolicDisk { radius, .. } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::DegenerateWindow(format!("hyperbolic radius {radius}")));
                }
            }
        }
        let measure = space.measure();
        if !(measure.is_finite() && measure > 0.0) {
            return Err(Error::DegenerateWindow(format!("measure {measure}")));
        }
        Ok(Window { space, measure })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// `|W| = λ(W)`.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// Inradius of a Euclidean box (half the smallest side).
    pub fn inradius(&self) -> Option<f64> {
        self.space.bounds().map(|b| {
            b.iter().map(|(lo, hi)| 0.5 * (hi - lo)).fold(f64::INFINITY, f64::min)
        })
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn contains(&self, loc: &Location) -> bool {
        match (&self.space, loc) {
            (Space::HyperbolicDisk { radius, .. }, Location::Polar { t, .. }) => *t <= *radius,
            (_, Location::Euclidean(c)) => match self.space.bounds() {
                Some(b) => {
                    b.len() == c.len()
                        && b.iter().zip(c.iter()).all(|((lo, hi), x)| *lo <= *x && *x <= *hi)
                }
                None => false,
            },
            _ => false,
        }
    }

    /// Draws one location from `λ_W / |W|`.
    pub fn sample_location<R: Rng + ?Sized>(&self, rng: &mut R) -> Location {
        match &self.space {
            Space::EuclideanBox { bounds } | Space::MarkedStationary { bounds, .. } => {
                Location::Euclidean(
                    bounds.iter().map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect(),
                )
            }
            Space::HyperbolicDisk { radius, density } => {
                let t = density.inverse_cdf(rng.random::<f64>(), *radius);
                let phi = std::f64::consts::TAU * rng.random::<f64>();
                Location::Polar { t, phi }
            }
        }
    }

    /// Draws a full point (location, mark, order key) with the given serial.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, serial: u64) -> Point {
        let location = self.sample_location(rng);
        let mark = match &self.space {
            Space::MarkedStationary { marks, .. } => marks.sample(rng),
            _ => Mark::None,
        };
        Point::new(location, mark, rng.random::<f64>(), serial)
    }

    /// Samples the Poisson process `Φ_W` with intensity `β λ_W`.
    pub fn sample_poisson<R: Rng + ?Sized>(&self, beta: f64, rng: &mut R) -> Result<Vec<Point>> {
        check_beta(beta)?;
        let n = poisson_count(beta * self.measure, rng);
        Ok((0..n).map(|i| self.sample_point(rng, i as u64)).collect())
    }

    /// Samples `Φ` restricted to `W ∩ ⋃ B_∞(c, radius)` (sup-norm boxes around
    /// `centers`). Requires a box-shaped window.
    pub fn sample_poisson_near<R: Rng + ?Sized>(
        &self,
        beta: f64,
        centers: &[&Coords],
        radius: f64,
        rng: &mut R,
    ) -> Result<Vec<Point>> {
        check_beta(beta)?;
        let bounds = self
            .space
            .bounds()
            .ok_or_else(|| Error::InvalidParameter("local sampling needs a box window".into()))?;
        let boxes: Vec<Vec<(f64, f64)>> = centers
            .iter()
            .map(|c| {
                bounds
                    .iter()
                    .zip(c.iter())
                    .map(|((lo, hi), x)| ((x - radius).max(*lo), (x + radius).min(*hi)))
                    .collect()
            })
            .collect();
        let marks = self.space.marks();
        let mut out = Vec::new();
        for (i, b) in boxes.iter().enumerate() {
            let vol: f64 = b.iter().map(|(lo, hi)| (hi - lo).max(0.0)).product();
            if vol <= 0.0 {
                continue;
            }
            let n = poisson_count(beta * vol, rng);
            for _ in 0..n {
                let c: Coords = b.iter().map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect();
                let mark = marks.sample(rng);
                let key = rng.random::<f64>();
                // disjointify: keep the point only in the first box that contains it
                let seen = boxes[..i].iter().any(|pb| {
                    pb.iter().zip(c.iter()).all(|((lo, hi), x)| *lo <= *x && *x <= *hi)
                });
                if !seen {
                    let serial = out.len() as u64;
                    out.push(Point::new(Location::Euclidean(c), mark, key, serial));
                }
            }
        }
        Ok(out)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!("intensity must be positive, got {beta}")));
    }
    Ok(())
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite mean");
    d.sample(rng) as usize
}

/// Location in the chart of the space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Location {
    Euclidean(Coords),
    /// Geodesic polar coordinates in the hyperbolic plane.
    Polar { t: f64, phi: f64 },
}

impl Location {
    /// Coordinates in the Poincaré disk (Euclidean locations are taken as-is).
    pub fn poincare(&self) -> [f64; 2] {
        match self {
            Location::Polar { t, phi } => {
                let rho = (0.5 * t).tanh();
                [rho * phi.cos(), rho * phi.sin()]
            }
            Location::Euclidean(c) => [c.first().copied().unwrap_or(0.0), c.get(1).copied().unwrap_or(0.0)],
        }
    }

    pub fn euclidean(&self) -> Option<&Coords> {
        match self {
            Location::Euclidean(c) => Some(c),
            Location::Polar { .. } => None,
        }
    }

    /// Polar location from Poincaré coordinates.
    pub fn from_poincare(p: [f64; 2]) -> Result<Location> {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        if r >= 1.0 {
            return Err(Error::OutsideUnitBall(r));
        }
        Ok(Location::Polar { t: 2.0 * r.atanh(), phi: p[1].atan2(p[0]) })
    }
}

/// Stable identity of a vertex: order-key bits first, then a serial number.
/// Added points use serials with the top bit set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointId {
    pub order_bits: u64,
    pub serial: u64,
}

/// Serial namespace for points added on top of a sample.
pub const ADDED_SERIAL_BASE: u64 = 1 << 63;

/// A vertex of the complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub location: Location,
    pub mark: Mark,
    pub order_key: f64,
    pub serial: u64,
}

impl Point {
    pub fn new(location: Location, mark: Mark, order_key: f64, serial: u64) -> Point {
        Point { location, mark, order_key, serial }
    }

    /// Unmarked Euclidean point.
    pub fn euclidean(coords: &[f64], order_key: f64, serial: u64) -> Point {
        Point::new(Location::Euclidean(coords.iter().copied().collect()), Mark::None, order_key, serial)
    }

    pub fn id(&self) -> PointId {
        PointId { order_bits: self.order_key.to_bits(), serial: self.serial }
    }

    /// Strict total order `(order_key, serial)`.
    pub fn precedes(&self, other: &Point) -> bool {
        self.id() < other.id()
    }
}

/// Poincaré-disk distance between two points given in Poincaré coordinates.
pub fn poincare_distance(x: [f64; 2], y: [f64; 2]) -> Result<f64> {
    let nx = x[0] * x[0] + x[1] * x[1];
    let ny = y[0] * y[0] + y[1] * y[1];
    if nx >= 1.0 {
        return Err(Error::OutsideUnitBall(nx.sqrt()));
    }
    if ny >= 1.0 {
        return Err(Error::OutsideUnitBall(ny.sqrt()));
    }
    let dx = x[0] - y[0];
    let dy = x[1] - y[1];
    let delta = 2.0 * (dx * dx + dy * dy) / ((1.0 - nx) * (1.0 - ny));
    // arccosh(1 + δ) = ln(1 + δ + sqrt(δ(2 + δ))), stable for small δ
    Ok((delta + (delta * (2.0 + delta)).sqrt()).ln_1p())
}

/// Hyperbolic distance between two points of the disk model.
pub fn hyperbolic_distance(x: &Point, y: &Point) -> Result<f64> {
    match (&x.location, &y.location) {
        // exact in geodesic polar coordinates (hyperbolic law of cosines)
        (Location::Polar { t: t1, phi: p1 }, Location::Polar { t: t2, phi: p2 }) => {
            Ok(polar_distance(*t1, *p1, *t2, *p2))
        }
        _ => poincare_distance(x.location.poincare(), y.location.poincare()),
    }
}

fn polar_distance(t1: f64, p1: f64, t2: f64, p2: f64) -> f64 {
    // hyperbolic law of cosines in half-argument form:
    // sinh²(d/2) = sinh²((t1 − t2)/2) + sinh t1 sinh t2 sin²(Δφ/2)
    let a = (0.5 * (t1 - t2)).sinh();
    let s = (0.5 * (p1 - p2)).sin();
    let q = a * a + t1.sinh() * t2.sinh() * s * s;
    2.0 * q.max(0.0).sqrt().asinh()
}
