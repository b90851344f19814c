//! Staged construction of the random connection complex.
//!
//! Step `j` admits a `(j + 1)`-tuple whose `j`-faces are all present when its
//! uniform `U_σ` falls below `φ_j`. The uniforms are derived from a key and the
//! canonically sorted vertex identities, so the same tuple gets the same mark in
//! every build that contains it. Adding points therefore never changes whether
//! an existing simplex is present.

use std::collections::HashMap;
use std::io::Write;

use smallvec::SmallVec;

use crate::connect::ConnectionSystem;
use crate::error::{Error, Result};
use crate::seed::{splitmix64, SeedStream};
use crate::space::{Location, Point, PointId, ADDED_SERIAL_BASE};

/// Key of the per-simplex marks of one realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MarkKey(pub u64);

impl From<SeedStream> for MarkKey {
    fn from(s: SeedStream) -> Self {
        MarkKey(s.value())
    }
}

type Ids = SmallVec<[PointId; 8]>;
type Tuple = SmallVec<[u32; 8]>;

/// The uniform `U_σ ∈ [0, 1)` of the tuple with the given identities. The
/// input order does not matter.
pub fn derive_mark(key: MarkKey, ids: &[PointId]) -> f64 {
    let mut sorted: Ids = ids.iter().copied().collect();
    sorted.sort_unstable();
    mark_of_sorted(key, &sorted)
}

fn mark_of_sorted(key: MarkKey, sorted: &[PointId]) -> f64 {
    let mut h = splitmix64(key.0 ^ (sorted.len() as u64).wrapping_mul(0x2545_F491_4F6C_DD1D));
    for id in sorted {
        h = splitmix64(h ^ id.order_bits);
        h = splitmix64(h ^ id.serial);
    }
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn accepts(system: &ConnectionSystem, key: MarkKey, pts: &[&Point]) -> bool {
    // strict comparison with U in [0, 1): φ = 0 never admits, φ = 1 always does
    let phi = system.phi(pts);
    if phi <= 0.0 {
        return false;
    }
    if phi >= 1.0 {
        return true;
    }
    let mut ids: Ids = pts.iter().map(|p| p.id()).collect();
    ids.sort_unstable();
    mark_of_sorted(key, &ids) < phi
}

/// One realization: vertices and, per dimension, the lexicographically sorted
/// list of strictly increasing vertex-index tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSample {
    vertices: Vec<Point>,
    /// `simplices[j]` holds the `j`-simplices flattened with stride `j + 1`.
    simplices: Vec<Vec<u32>>,
    key: MarkKey,
}

impl ComplexSample {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn key(&self) -> MarkKey {
        self.key
    }

    /// Largest dimension slot (the system's `α`).
    pub fn alpha(&self) -> usize {
        self.simplices.len() - 1
    }

    /// The `j`-simplices as index slices.
    pub fn simplices(&self, j: usize) -> impl Iterator<Item = &[u32]> + '_ {
        self.simplices.get(j).map(|v| v.as_slice()).unwrap_or(&[]).chunks_exact(j + 1)
    }

    /// `f_j`.
    pub fn count(&self, j: usize) -> usize {
        self.simplices.get(j).map_or(0, |v| v.len() / (j + 1))
    }

    /// `(f_0, …, f_α)`.
    pub fn counts(&self) -> Vec<usize> {
        (0..=self.alpha()).map(|j| self.count(j)).collect()
    }

    pub fn contains(&self, tuple: &[u32]) -> bool {
        let j = tuple.len().wrapping_sub(1);
        match self.simplices.get(j) {
            Some(flat) => find_tuple(flat, tuple).is_ok(),
            None => false,
        }
    }

    /// Writes one simplex per line: dimension followed by vertex indices.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# dim v0 v1 ...")?;
        for j in 0..=self.alpha() {
            for s in self.simplices(j) {
                write!(out, "{j}")?;
                for v in s {
                    write!(out, " {v}")?;
                }
                writeln!(out)?;
            }
        }
        Ok(())
    }

    /// Canonical form independent of vertex numbering: each simplex as its
    /// sorted vertex identities, all sorted.
    pub fn canonical(&self) -> Vec<Vec<PointId>> {
        let mut out: Vec<Vec<PointId>> = (0..=self.alpha())
            .flat_map(|j| {
                self.simplices(j).map(|s| {
                    let mut ids: Vec<PointId> = s.iter().map(|&v| self.vertices[v as usize].id()).collect();
                    ids.sort_unstable();
                    ids
                })
            })
            .collect();
        out.sort();
        out
    }

    /// Whether every simplex of `self` is a simplex of `other`, comparing by
    /// point identity.
    pub fn is_subcomplex_of(&self, other: &ComplexSample) -> bool {
        let theirs: std::collections::HashSet<Vec<PointId>> = other.canonical().into_iter().collect();
        self.canonical().iter().all(|s| theirs.contains(s))
    }

    /// Every `j`-face of every stored `j + 1`-simplex is stored.
    pub fn is_downward_closed(&self) -> bool {
        (1..=self.alpha()).all(|j| {
            self.simplices(j).all(|s| {
                (0..s.len()).all(|skip| {
                    let face: Tuple = s.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &v)| v).collect();
                    self.contains(&face)
                })
            })
        })
    }

    fn without_vertices(&self, drop: &[u32]) -> ComplexSample {
        let simplices = self
            .simplices
            .iter()
            .enumerate()
            .map(|(j, flat)| {
                flat.chunks_exact(j + 1).filter(|s| !s.iter().any(|v| drop.contains(v))).flatten().copied().collect()
            })
            .collect();
        ComplexSample { vertices: self.vertices.clone(), simplices, key: self.key }
    }
}

fn find_tuple(flat: &[u32], tuple: &[u32]) -> std::result::Result<usize, usize> {
    let k = tuple.len();
    let n = flat.len() / k;
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        match flat[mid * k..(mid + 1) * k].cmp(tuple) {
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => hi = mid,
            std::cmp::Ordering::Equal => return Ok(mid),
        }
    }
    Err(lo)
}

fn check_keys(points: &[Point]) -> Result<()> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_unstable_by(|&a, &b| points[a].order_key.total_cmp(&points[b].order_key));
    for w in order.windows(2) {
        if points[w[0]].order_key == points[w[1]].order_key {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::DuplicateOrderKey(a, b));
        }
    }
    Ok(())
}

/// Candidate pairs `(i, j)`, `i < j`, that may be connected. Uses a uniform
/// grid when `φ_1` has finite Euclidean range.
fn candidate_pairs(points: &[Point], system: &ConnectionSystem) -> Vec<Vec<u32>> {
    let n = points.len();
    let mut up: Vec<Vec<u32>> = vec![Vec::new(); n];
    let euclid: Option<Vec<&[f64]>> = points
        .iter()
        .map(|p| match &p.location {
            Location::Euclidean(c) => Some(c.as_slice()),
            Location::Polar { .. } => None,
        })
        .collect();
    match (system.range(), euclid) {
        (Some(r), Some(coords)) if r > 0.0 && n > 64 => {
            let d = coords.first().map_or(0, |c| c.len());
            let cell = |c: &[f64]| -> SmallVec<[i64; 3]> { c.iter().map(|x| (x / r).floor() as i64).collect() };
            let mut grid: HashMap<SmallVec<[i64; 3]>, Vec<u32>> = HashMap::new();
            for (i, c) in coords.iter().enumerate() {
                grid.entry(cell(c)).or_default().push(i as u32);
            }
            let offsets: Vec<SmallVec<[i64; 3]>> = (0..3usize.pow(d as u32))
                .map(|mut k| {
                    (0..d)
                        .map(|_| {
                            let o = (k % 3) as i64 - 1;
                            k /= 3;
                            o
                        })
                        .collect()
                })
                .collect();
            let r2 = r * r;
            for (i, c) in coords.iter().enumerate() {
                let base = cell(c);
                for off in &offsets {
                    let key: SmallVec<[i64; 3]> = base.iter().zip(off).map(|(a, b)| a + b).collect();
                    if let Some(bucket) = grid.get(&key) {
                        for &j in bucket {
                            if j as usize > i {
                                let d2: f64 = c.iter().zip(coords[j as usize]).map(|(a, b)| (a - b) * (a - b)).sum();
                                if d2 <= r2 * (1.0 + 1e-12) {
                                    up[i].push(j);
                                }
                            }
                        }
                    }
                }
            }
            for list in &mut up {
                list.sort_unstable();
            }
        }
        _ => {
            for (i, list) in up.iter_mut().enumerate() {
                list.extend((i as u32 + 1)..n as u32);
            }
        }
    }
    up
}

/// Builds `Δ` on `points`.
pub fn build_complex(points: &[Point], system: &ConnectionSystem, key: MarkKey) -> Result<ComplexSample> {
    build_owned(points.to_vec(), system, key)
}

fn build_owned(points: Vec<Point>, system: &ConnectionSystem, key: MarkKey) -> Result<ComplexSample> {
    check_keys(&points)?;
    let n = points.len();
    let alpha = system.alpha();
    let mut simplices: Vec<Vec<u32>> = Vec::with_capacity(alpha + 1);
    simplices.push((0..n as u32).collect());

    // step 1: edges, kept as upper adjacency lists
    let candidates = candidate_pairs(&points, system);
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for (i, cand) in candidates.iter().enumerate() {
        for &j in cand {
            if accepts(system, key, &[&points[i], &points[j as usize]]) {
                adj[i].push(j);
                edges.extend_from_slice(&[i as u32, j]);
            }
        }
    }
    simplices.push(edges);

    // steps j ≥ 2: extend each (j−1)-simplex by a higher common neighbour
    let mut common: Vec<u32> = Vec::new();
    let mut tau: Tuple = SmallVec::new();
    for j in 2..=alpha {
        let prev = &simplices[j - 1];
        let mut next = Vec::new();
        for sigma in prev.chunks_exact(j) {
            common.clear();
            common.extend_from_slice(&adj[sigma[0] as usize]);
            for &v in &sigma[1..] {
                let other = &adj[v as usize];
                common.retain(|c| other.binary_search(c).is_ok());
            }
            let last = *sigma.last().expect("nonempty");
            common.retain(|&c| c > last);
            for &v in &common {
                tau.clear();
                tau.extend_from_slice(sigma);
                tau.push(v);
                // the face without v is sigma; the others must be present too
                let faces_ok = j == 2
                    || (0..j).all(|skip| {
                        let face: Tuple =
                            tau.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &x)| x).collect();
                        find_tuple(prev, &face).is_ok()
                    });
                if !faces_ok {
                    continue;
                }
                let pts: SmallVec<[&Point; 8]> = tau.iter().map(|&x| &points[x as usize]).collect();
                if accepts(system, key, &pts) {
                    next.extend_from_slice(&tau);
                }
            }
        }
        simplices.push(next);
    }
    Ok(ComplexSample { vertices: points, simplices, key })
}

/// `Δ^{x_1,…,x_l, I}`: the complex on `points ∪ added` with every simplex
/// containing a dropped added point removed.
#[derive(Clone, Debug)]
pub struct AugmentedSample {
    full: ComplexSample,
    base_len: usize,
    added_len: usize,
    retained: Vec<usize>,
    complex: ComplexSample,
}

impl AugmentedSample {
    /// The retained complex.
    pub fn complex(&self) -> &ComplexSample {
        &self.complex
    }

    /// The complex with all added points retained.
    pub fn full(&self) -> &ComplexSample {
        &self.full
    }

    /// Vertex index of the added point `x_i`, `1 ≤ i ≤ l`.
    pub fn added_index(&self, i: usize) -> u32 {
        (self.base_len + i - 1) as u32
    }

    pub fn added_len(&self) -> usize {
        self.added_len
    }

    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    /// Same augmented build with another retention set.
    pub fn with_retained(&self, retained: &[usize]) -> Result<AugmentedSample> {
        let retained = normalize_retained(retained, self.added_len)?;
        let drop: Vec<u32> =
            (1..=self.added_len).filter(|i| !retained.contains(i)).map(|i| self.added_index(i)).collect();
        Ok(AugmentedSample {
            complex: self.full.without_vertices(&drop),
            full: self.full.clone(),
            base_len: self.base_len,
            added_len: self.added_len,
            retained,
        })
    }

    /// The retained complex restricted to the original points, with original
    /// vertex numbering.
    pub fn base_part(&self) -> ComplexSample {
        let n = self.base_len as u32;
        let simplices =
            self.complex.simplices.iter().enumerate().map(|(j, flat)| {
                flat.chunks_exact(j + 1).filter(|s| s.iter().all(|&v| v < n)).flatten().copied().collect()
            });
        ComplexSample {
            vertices: self.full.vertices[..self.base_len].to_vec(),
            simplices: simplices.collect(),
            key: self.full.key,
        }
    }
}

fn normalize_retained(retained: &[usize], l: usize) -> Result<Vec<usize>> {
    let mut r = retained.to_vec();
    r.sort_unstable();
    r.dedup();
    if let Some(&bad) = r.iter().find(|&&i| i == 0 || i > l) {
        return Err(Error::RetainedOutOfRange { index: bad, len: l });
    }
    Ok(r)
}

/// Gives added points identities disjoint from sampled ones.
pub fn tag_added(added: &[Point]) -> Vec<Point> {
    added
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut q = p.clone();
            q.serial = ADDED_SERIAL_BASE | i as u64;
            q
        })
        .collect()
}

/// Builds `Δ^{x_1,…,x_l, I}` with `I = retained ⊆ {1, …, l}` (1-based).
pub fn build_augmented(
    points: &[Point],
    added: &[Point],
    retained: &[usize],
    system: &ConnectionSystem,
    key: MarkKey,
) -> Result<AugmentedSample> {
    let retained = normalize_retained(retained, added.len())?;
    let mut union = points.to_vec();
    union.extend(tag_added(added));
    let full = build_owned(union, system, key)?;
    let aug = AugmentedSample {
        complex: full.clone(),
        full,
        base_len: points.len(),
        added_len: added.len(),
        retained: (1..=added.len()).collect(),
    };
    if retained.len() == added.len() {
        Ok(aug)
    } else {
        aug.with_retained(&retained)
    }
}

/// Lazy membership test `τ ∈ Δ` on a fixed point set: `τ` is present iff every
/// sub-tuple with at least two vertices passes its mark test. Results are
/// memoised.
pub struct MembershipOracle<'a> {
    points: &'a [Point],
    system: &'a ConnectionSystem,
    key: MarkKey,
    memo: HashMap<Tuple, bool>,
}

impl<'a> MembershipOracle<'a> {
    pub fn new(points: &'a [Point], system: &'a ConnectionSystem, key: MarkKey) -> Self {
        MembershipOracle { points, system, key, memo: HashMap::new() }
    }

    /// `tau` must be strictly increasing.
    pub fn contains(&mut self, tau: &[u32]) -> bool {
        match tau.len() {
            0 => false,
            1 => true,
            k if k - 1 > self.system.alpha() => false,
            _ => {
                if let Some(&b) = self.memo.get(tau) {
                    return b;
                }
                let mut ok = true;
                if tau.len() > 2 {
                    for skip in 0..tau.len() {
                        let face: Tuple =
                            tau.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &x)| x).collect();
                        if !self.contains(&face) {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    let pts: SmallVec<[&Point; 8]> = tau.iter().map(|&x| &self.points[x as usize]).collect();
                    ok = accepts(self.system, self.key, &pts);
                }
                self.memo.insert(tau.iter().copied().collect(), ok);
                ok
            }
        }
    }
}

/// Counts of the simplices that contain at least one added point, by the
/// exact set of added points they contain.
///
/// `table[mask][j]` is the number of `j`-simplices whose added vertices are
/// exactly the points `x_i` with bit `i − 1` of `mask` set. By the coupling,
/// `Λ^k f_j` at `x_{i_1}, …, x_{i_k}` equals `table[mask][j]` for the mask of
/// those points, whatever other points are added.
#[derive(Clone, Debug, PartialEq)]
pub struct StarTable {
    pub table: Vec<Vec<u64>>,
}

impl StarTable {
    /// `Σ_j a_j table[mask][j]`.
    pub fn weighted(&self, mask: usize, a: &[f64]) -> f64 {
        self.table[mask].iter().zip(a).map(|(&c, &w)| c as f64 * w).sum()
    }
}

/// Computes the [`StarTable`] of `added` on top of `points`. Only points that
/// can share a simplex with an added point matter, so `points` may be a local
/// sample around the added points.
pub fn star_table(points: &[Point], added: &[Point], system: &ConnectionSystem, key: MarkKey) -> Result<StarTable> {
    let l = added.len();
    if l > 16 {
        return Err(Error::InvalidParameter("at most 16 added points".into()));
    }
    let alpha = system.alpha();
    let mut union = tag_added(added);
    union.extend_from_slice(points);
    check_keys(&union)?;
    let n = union.len();
    let link_system = if alpha >= 2 { Some(system.truncated(alpha - 1)?) } else { None };
    let mut table = vec![vec![0u64; alpha + 1]; 1 << l];
    let bit = |v: usize| if v < l { 1usize << v } else { 0 };
    // Simplices whose smallest added vertex is x_a are `{x_a} ∪ σ` with σ in
    // the complex induced on the later neighbours of x_a.
    for a in 0..l {
        table[1 << a][0] += 1;
        let nbrs: Vec<usize> = ((a + 1)..n).filter(|&v| accepts(system, key, &[&union[a], &union[v]])).collect();
        for &v in &nbrs {
            table[1 << a | bit(v)][1] += 1;
        }
        let Some(link_system) = &link_system else { continue };
        if nbrs.len() < 2 {
            continue;
        }
        let local: Vec<Point> = nbrs.iter().map(|&v| union[v].clone()).collect();
        let link = build_owned(local, link_system, key)?;
        // cone[j] lists the link j-simplices σ with {x_a} ∪ σ present
        let mut cone: Vec<Vec<u32>> = vec![(0..nbrs.len() as u32).collect()];
        let mut face: Tuple = SmallVec::new();
        for j in 1..alpha {
            let mut present = Vec::new();
            for sigma in link.simplices(j) {
                let faces_ok = (0..=j).all(|skip| {
                    face.clear();
                    face.extend(sigma.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &x)| x));
                    find_tuple(&cone[j - 1], &face).is_ok()
                });
                if !faces_ok {
                    continue;
                }
                let mut pts: SmallVec<[&Point; 8]> = SmallVec::new();
                pts.push(&union[a]);
                pts.extend(sigma.iter().map(|&x| &link.vertices[x as usize]));
                if accepts(system, key, &pts) {
                    present.extend_from_slice(sigma);
                    let mask = sigma.iter().fold(1usize << a, |m, &x| m | bit(nbrs[x as usize]));
                    table[mask][j + 1] += 1;
                }
            }
            cone.push(present);
        }
    }
    Ok(StarTable { table })
}
