//! Cut points, packed counts, pivotal clusters and the Russo audit.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::analysis::{at_least_sqrt, crossing_regions, CrossingRegions, Path, VertexMask};
use crate::dac::{DacSample, SpinConfig};
use crate::lattice::{graph_distance, BoxLattice, Parallelogram, Vertex};
use crate::rcm::exact::{dac_polynomial, ExactModel};
use crate::{Error, Result};

pub const EXACT_PACKING_CAP: usize = 20;

/// Vertices of `R` with a neighbour in `A(R) ∩ S''` joined to the top side of
/// `S_{n,6n}` by a (+)-path inside `A(R) ∩ S''`. Returned in path order.
pub fn cut_points(sigma: &SpinConfig, path: &Path, n: u32) -> Result<Vec<Vertex>> {
    let regions = crossing_regions(path, n)?;
    Ok(cut_points_in(sigma, path, &regions))
}

pub fn cut_points_in(sigma: &SpinConfig, path: &Path, regions: &CrossingRegions) -> Vec<Vertex> {
    let mid = regions.s_double_prime;
    let allowed = |v: Vertex| mid.contains(v) && regions.above.contains(v) && sigma.is_plus(v);
    let mut reached = VertexMask::empty(mid);
    let mut queue = VecDeque::new();
    for k in mid.a..=mid.b {
        let v = Vertex::new(k, mid.d);
        if allowed(v) {
            reached.insert(v);
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for w in v.neighbors() {
            if allowed(w) && !reached.contains(w) {
                reached.insert(w);
                queue.push_back(w);
            }
        }
    }
    path.vertices().iter().copied().filter(|x| x.neighbors().iter().any(|&w| reached.contains(w))).collect()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PackingMode {
    /// Keep each point, in the given order, that is far from all kept ones.
    Greedy,
    /// Maximum packing by branch and bound.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutPointReport {
    pub cut_points: Vec<Vertex>,
    /// `M(R)`.
    pub packed: Vec<Vertex>,
    /// `c(R) = |M(R)|`.
    pub c: usize,
    /// Points of `M(R)` are pairwise at distance `>= sqrt(n)`.
    pub n: u32,
}

/// Pack `cut` (in path order) with pairwise distance at least `sqrt(n)`.
pub fn packed_count(cut: &[Vertex], n: u32, mode: PackingMode) -> Result<CutPointReport> {
    let far = |a: Vertex, b: Vertex| at_least_sqrt(graph_distance(a, b), n);
    let packed = match mode {
        PackingMode::Greedy => {
            let mut kept: Vec<Vertex> = Vec::new();
            for &x in cut {
                if kept.iter().all(|&y| far(x, y)) {
                    kept.push(x);
                }
            }
            kept
        }
        PackingMode::Exact => {
            if cut.len() > EXACT_PACKING_CAP {
                return Err(Error::SizeExceeded { edges: cut.len(), cap: EXACT_PACKING_CAP });
            }
            let m = cut.len();
            let conflict: Vec<u32> = (0..m)
                .map(|i| (0..m).filter(|&j| j != i && !far(cut[i], cut[j])).fold(0u32, |acc, j| acc | 1 << j))
                .collect();
            let mut best = 0u32;
            branch(&conflict, if m == 0 { 0 } else { (1u32 << m) - 1 }, 0, &mut best);
            (0..m).filter(|&i| best >> i & 1 == 1).map(|i| cut[i]).collect()
        }
    };
    Ok(CutPointReport { cut_points: cut.to_vec(), c: packed.len(), packed, n })
}

fn branch(conflict: &[u32], candidates: u32, chosen: u32, best: &mut u32) {
    if candidates == 0 {
        if chosen.count_ones() > best.count_ones() {
            *best = chosen;
        }
        return;
    }
    if chosen.count_ones() + candidates.count_ones() <= best.count_ones() {
        return;
    }
    let i = candidates.trailing_zeros() as usize;
    let rest = candidates & !(1 << i);
    branch(conflict, rest & !conflict[i], chosen | 1 << i, best);
    branch(conflict, rest, chosen, best);
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotalReport {
    /// Canonical ids of the pivotal FK clusters.
    pub clusters: Vec<u32>,
    /// `n(A)`.
    pub count: usize,
}

/// FK clusters meeting `window` whose colour flip toggles `event`.
pub fn pivotal_clusters(
    lat: &BoxLattice,
    sample: &DacSample,
    r: f64,
    window: Parallelogram,
    event: impl Fn(&SpinConfig) -> bool,
) -> PivotalReport {
    let mut sigma = sample.color(r);
    let base = event(&sigma);
    let mut seen = vec![false; sample.clusters.count()];
    let mut clusters = Vec::new();
    for v in window.vertices() {
        let c = sample.clusters.number(lat.index(v).expect("window inside box"));
        if seen[c] {
            continue;
        }
        seen[c] = true;
        let members = sample.clusters.members(c);
        let flip = |s: &mut SpinConfig| {
            for &j in members {
                let x = &mut s.as_mut_slice()[j as usize];
                *x = !*x;
            }
        };
        flip(&mut sigma);
        if event(&sigma) != base {
            clusters.push(sample.clusters.canonical_ids()[c]);
        }
        flip(&mut sigma);
    }
    clusters.sort_unstable();
    PivotalReport { count: clusters.len(), clusters }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RussoAudit {
    /// Central difference of `P(A)` in `r`.
    pub lhs: f64,
    /// `-E[n(A)]`.
    pub rhs: f64,
}

/// Whether a spin event on `n_vertices` (spin masks, bit set = +1) is
/// decreasing, by exhaustive single-flip testing.
pub fn is_decreasing(n_vertices: usize, event: &impl Fn(u64) -> bool) -> bool {
    (0u64..1 << n_vertices).all(|s| !event(s) || (0..n_vertices).all(|v| s >> v & 1 == 0 || event(s & !(1 << v))))
}

/// Compare the derivative of `P(A)` at `r` with minus the expected number of
/// pivotal clusters. `r ± dr` may leave `[0, 1]`; the probability is then the
/// polynomial in `r` continued past the interval.
pub fn russo_audit(model: &ExactModel, event: impl Fn(u64) -> bool, r: f64, dr: f64) -> Result<RussoAudit> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::OutOfRange { name: "r", value: r });
    }
    if !(dr > 0.0 && dr < 0.5) {
        return Err(Error::OutOfRange { name: "dr", value: dr });
    }
    let g = model.graph();
    if !is_decreasing(g.n_vertices(), &event) {
        return Err(Error::NotDecreasing);
    }
    let prob = |x: f64| dac_polynomial(model, x, |_, s| if event(s) { 1.0 } else { 0.0 });
    let lhs = (prob(r + dr) - prob(r - dr)) / (2.0 * dr);
    let rhs = -dac_polynomial(model, r, |eta, s| {
        let base = event(s);
        g.clusters(eta).iter().filter(|&&c| event(s ^ c) != base).count() as f64
    });
    Ok(RussoAudit { lhs, rhs })
}
