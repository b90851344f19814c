//! Small geometric kernels: smallest enclosing balls, disk intersection and
//! geodesics of the Poincaré disk.

/// Smallest enclosing ball of a handful of points in `ℝ^d`, by Welzl's
/// recursion (move-to-front free; inputs have at most a few dozen points).
/// Returns `(center, radius)`.
pub fn miniball(points: &[&[f64]]) -> (Vec<f64>, f64) {
    if points.is_empty() {
        return (Vec::new(), 0.0);
    }
    let d = points[0].len();
    let mut boundary: Vec<&[f64]> = Vec::with_capacity(d + 1);
    let (c, r2) = welzl(points, &mut boundary, d);
    (c, r2.max(0.0).sqrt())
}

fn welzl<'a>(pts: &[&'a [f64]], boundary: &mut Vec<&'a [f64]>, d: usize) -> (Vec<f64>, f64) {
    if pts.is_empty() || boundary.len() == d + 1 {
        return circumball(boundary, d);
    }
    let (p, rest) = pts.split_last().expect("nonempty");
    let (c, r2) = welzl(rest, boundary, d);
    if !c.is_empty() && dist2(&c, p) <= r2 * (1.0 + 1e-12) + 1e-300 {
        return (c, r2);
    }
    boundary.push(p);
    let out = welzl(rest, boundary, d);
    boundary.pop();
    out
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Smallest ball with all `boundary` points on its sphere: the circumcenter
/// inside their affine hull. Empty boundary gives the empty ball.
fn circumball(boundary: &[&[f64]], d: usize) -> (Vec<f64>, f64) {
    match boundary.len() {
        0 => (Vec::new(), -1.0),
        1 => (boundary[0].to_vec(), 0.0),
        k => {
            // center = p0 + Σ λ_i v_i with v_i = p_i − p0, solving 2 v_i·(c − p0) = |v_i|²
            let p0 = boundary[0];
            let v: Vec<Vec<f64>> =
                boundary[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
            let m = k - 1;
            let mut a = vec![vec![0.0; m + 1]; m];
            for i in 0..m {
                for j in 0..m {
                    a[i][j] = 2.0 * dot(&v[i], &v[j]);
                }
                a[i][m] = dot(&v[i], &v[i]);
            }
            let lambda = match solve(a) {
                Some(l) => l,
                // affinely dependent boundary: fall back to the ball spanned by the extreme pair
                None => return degenerate_ball(boundary),
            };
            let mut c = p0.to_vec();
            for (l, vi) in lambda.iter().zip(&v) {
                for t in 0..d {
                    c[t] += l * vi[t];
                }
            }
            let r2 = dist2(&c, p0);
            (c, r2)
        }
    }
}

fn degenerate_ball(boundary: &[&[f64]]) -> (Vec<f64>, f64) {
    let mut best = (0, 0, -1.0);
    for i in 0..boundary.len() {
        for j in i + 1..boundary.len() {
            let d2 = dist2(boundary[i], boundary[j]);
            if d2 > best.2 {
                best = (i, j, d2);
            }
        }
    }
    let c: Vec<f64> =
        boundary[best.0].iter().zip(boundary[best.1]).map(|(a, b)| 0.5 * (a + b)).collect();
    (c, 0.25 * best.2)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on an augmented `m × (m+1)` matrix.
fn solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = a.len();
    let scale = a.iter().flat_map(|r| r[..m].iter()).fold(0.0f64, |s, x| s.max(x.abs()));
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for k in col..=m {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = (i + 1..m).map(|k| a[i][k] * x[k]).sum();
        x[i] = (a[i][m] - s) / a[i][i];
    }
    Some(x)
}

/// A Euclidean disk `{p : |p − center| ≤ radius}` in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: [f64; 2],
    pub radius: f64,
}

/// Whether a family of closed planar disks has a common point.
///
/// If the intersection is nonempty it either is a whole disk (whose center then
/// lies in every disk) or its boundary has a corner, which is an intersection
/// point of two boundary circles.
pub fn disks_intersect(disks: &[Disk], tol: f64) -> bool {
    let inside_all = |p: [f64; 2]| {
        disks.iter().all(|d| {
            let dx = p[0] - d.center[0];
            let dy = p[1] - d.center[1];
            (dx * dx + dy * dy).sqrt() <= d.radius + tol
        })
    };
    if disks.iter().any(|d| inside_all(d.center)) {
        return true;
    }
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            for p in circle_intersections(disks[i].center, disks[i].radius, disks[j].center, disks[j].radius, tol) {
                if inside_all(p) {
                    return true;
                }
            }
        }
    }
    false
}

/// Intersection points of two circles (0, 1 or 2 points; tangency within `tol`
/// yields one point).
pub fn circle_intersections(c1: [f64; 2], r1: f64, c2: [f64; 2], r2: f64, tol: f64) -> Vec<[f64; 2]> {
    let dx = c2[0] - c1[0];
    let dy = c2[1] - c1[1];
    let d = (dx * dx + dy * dy).sqrt();
    if d == 0.0 || d > r1 + r2 + tol || d < (r1 - r2).abs() - tol {
        return Vec::new();
    }
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h2 = r1 * r1 - a * a;
    let mx = c1[0] + a * dx / d;
    let my = c1[1] + a * dy / d;
    if h2 <= 0.0 {
        return vec![[mx, my]];
    }
    let h = h2.sqrt();
    vec![[mx - h * dy / d, my + h * dx / d], [mx + h * dy / d, my - h * dx / d]]
}

/// A hyperbolic line of the Poincaré disk in Euclidean terms: a diameter
/// through the origin with unit `direction`, or a circle orthogonal to the unit
/// circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Geodesic {
    Diameter { direction: [f64; 2] },
    Circle { center: [f64; 2], radius: f64 },
}

/// The line `H(z)`: the unique geodesic whose point closest to the origin is
/// `z` (`0 < |z| < 1`). Returns `None` at the origin.
pub fn perpendicular_geodesic(z: [f64; 2]) -> Option<Geodesic> {
    let s = (z[0] * z[0] + z[1] * z[1]).sqrt();
    if s <= 0.0 || s >= 1.0 {
        return None;
    }
    // circle orthogonal to the unit circle: |c|² = 1 + ρ², nearest point at |c| − ρ = s
    let dist = 0.5 * (s + 1.0 / s);
    let radius = 0.5 * (1.0 / s - s);
    Some(Geodesic::Circle { center: [z[0] / s * dist, z[1] / s * dist], radius })
}

/// The geodesic through two distinct points of the open disk.
pub fn geodesic_through(p: [f64; 2], q: [f64; 2]) -> Geodesic {
    let cross = p[0] * q[1] - p[1] * q[0];
    let np = p[0] * p[0] + p[1] * p[1];
    let nq = q[0] * q[0] + q[1] * q[1];
    let scale = np.sqrt().max(nq.sqrt()).max(1e-300);
    if cross.abs() <= 1e-12 * scale * scale {
        let dir = if np >= nq { p } else { q };
        let n = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
        let direction = if n > 0.0 { [dir[0] / n, dir[1] / n] } else { [1.0, 0.0] };
        return Geodesic::Diameter { direction };
    }
    // center c satisfies 2 c·p = |p|² + 1 and 2 c·q = |q|² + 1
    let b1 = 0.5 * (np + 1.0);
    let b2 = 0.5 * (nq + 1.0);
    let cx = (b1 * q[1] - b2 * p[1]) / cross;
    let cy = (p[0] * b2 - q[0] * b1) / cross;
    let radius = (cx * cx + cy * cy - 1.0).max(0.0).sqrt();
    Geodesic::Circle { center: [cx, cy], radius }
}

impl Geodesic {
    /// Whether two geodesics meet strictly inside the unit disk.
    pub fn meets(&self, other: &Geodesic, tol: f64) -> bool {
        match (self, other) {
            (Geodesic::Diameter { .. }, Geodesic::Diameter { .. }) => true,
            (Geodesic::Diameter { direction }, Geodesic::Circle { center, radius })
            | (Geodesic::Circle { center, radius }, Geodesic::Diameter { direction }) => {
                // points t·direction, |t| < 1, with |t·u − c| = ρ
                let b = direction[0] * center[0] + direction[1] * center[1];
                let c2 = center[0] * center[0] + center[1] * center[1] - radius * radius;
                let disc = b * b - c2;
                if disc < 0.0 {
                    return false;
                }
                let s = disc.sqrt();
                [b - s, b + s].iter().any(|t| t.abs() < 1.0 - tol)
            }
            (Geodesic::Circle { center: c1, radius: r1 }, Geodesic::Circle { center: c2, radius: r2 }) => {
                circle_intersections(*c1, *r1, *c2, *r2, 0.0)
                    .iter()
                    .any(|p| (p[0] * p[0] + p[1] * p[1]).sqrt() < 1.0 - tol)
            }
        }
    }

    /// Polyline of the geodesic segment from `p` to `q` (both on this geodesic),
    /// with `samples + 1` vertices.
    pub fn segment(&self, p: [f64; 2], q: [f64; 2], samples: usize) -> Vec<[f64; 2]> {
        let n = samples.max(1);
        match self {
            Geodesic::Diameter { .. } => (0..=n)
                .map(|i| {
                    let t = i as f64 / n as f64;
                    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
                })
                .collect(),
            Geodesic::Circle { center, radius } => {
                let a0 = (p[1] - center[1]).atan2(p[0] - center[0]);
                let a1 = (q[1] - center[1]).atan2(q[0] - center[0]);
                let mut delta = a1 - a0;
                // the arc inside the disk is the short one (less than π)
                while delta > std::f64::consts::PI {
                    delta -= std::f64::consts::TAU;
                }
                while delta < -std::f64::consts::PI {
                    delta += std::f64::consts::TAU;
                }
                (0..=n)
                    .map(|i| {
                        let a = a0 + delta * i as f64 / n as f64;
                        [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
                    })
                    .collect()
            }
        }
    }

    /// Portion of the geodesic inside the unit disk as a polyline.
    pub fn full_chord(&self, samples: usize) -> Vec<[f64; 2]> {
        match self {
            Geodesic::Diameter { direction } => {
                vec![[-direction[0], -direction[1]], [direction[0], direction[1]]]
            }
            Geodesic::Circle { center, radius } => {
                let ends = circle_intersections([0.0, 0.0], 1.0, *center, *radius, 1e-12);
                if ends.len() < 2 {
                    return Vec::new();
                }
                self.segment(ends[0], ends[1], samples)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miniball_of_equilateral_triangle_is_circumcircle() {
        let s = 2.0;
        let pts = [[0.0, 0.0], [s, 0.0], [0.5 * s, 0.5 * s * 3f64.sqrt()]];
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let (_, r) = miniball(&refs);
        assert!((r - s / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn miniball_of_obtuse_triangle_uses_longest_side() {
        let pts = [[0.0, 0.0], [4.0, 0.0], [2.0, 0.5]];
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let (c, r) = miniball(&refs);
        assert!((r - 2.0).abs() < 1e-12);
        assert!((c[0] - 2.0).abs() < 1e-12 && c[1].abs() < 1e-12);
    }

    #[test]
    fn miniball_contains_all_points_3d() {
        let pts = [[0.1, 0.2, 0.3], [0.9, 0.1, 0.4], [0.5, 0.8, 0.2], [0.4, 0.5, 0.95], [0.5, 0.5, 0.5]];
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let (c, r) = miniball(&refs);
        for p in &pts {
            assert!(dist2(&c, p).sqrt() <= r + 1e-9);
        }
    }

    #[test]
    fn disk_intersection_basic() {
        let a = Disk { center: [0.0, 0.0], radius: 1.0 };
        let b = Disk { center: [2.0, 0.0], radius: 1.0 };
        let c = Disk { center: [2.1, 0.0], radius: 1.0 };
        assert!(disks_intersect(&[a, b], 1e-12));
        assert!(!disks_intersect(&[a, c], 1e-12));
        let small = Disk { center: [0.1, 0.0], radius: 0.1 };
        assert!(disks_intersect(&[a, small], 0.0));
    }

    #[test]
    fn geodesic_through_origin_is_diameter() {
        let g = geodesic_through([0.5, 0.0], [-0.3, 0.0]);
        assert!(matches!(g, Geodesic::Diameter { .. }));
    }

    #[test]
    fn geodesic_circle_is_orthogonal_and_passes_through_points() {
        let p = [0.3, 0.1];
        let q = [-0.2, 0.5];
        match geodesic_through(p, q) {
            Geodesic::Circle { center, radius } => {
                let c2 = center[0] * center[0] + center[1] * center[1];
                assert!((c2 - 1.0 - radius * radius).abs() < 1e-12);
                for x in [p, q] {
                    let d = ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2)).sqrt();
                    assert!((d - radius).abs() < 1e-12);
                }
            }
            g => panic!("unexpected {g:?}"),
        }
    }

    #[test]
    fn perpendicular_geodesic_has_nearest_point_z() {
        let z = [0.3, 0.4];
        match perpendicular_geodesic(z).unwrap() {
            Geodesic::Circle { center, radius } => {
                let dc = (center[0] * center[0] + center[1] * center[1]).sqrt();
                assert!((dc - radius - 0.5).abs() < 1e-12);
            }
            g => panic!("unexpected {g:?}"),
        }
        assert!(perpendicular_geodesic([0.0, 0.0]).is_none());
    }
}
