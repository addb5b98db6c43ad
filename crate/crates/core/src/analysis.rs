//! Spin clusters, crossings and the regions built from a crossing.

use alloc::collections::{BTreeSet, BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::dac::{ClusterExtents, DacSample, SpinConfig};
use crate::lattice::{
    classify_barrier, edge_boundary, vertex_boundary, BoxLattice, Domain, Edge, Parallelogram, Vertex, CCW,
};
use crate::{Error, Result};

/// A self-avoiding lattice path.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Path(Vec<Vertex>);

impl Path {
    pub fn new(vertices: Vec<Vertex>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::MalformedPath("empty path"));
        }
        if vertices.windows(2).any(|w| !w[0].is_adjacent(w[1])) {
            return Err(Error::MalformedPath("consecutive vertices are not adjacent"));
        }
        let distinct: BTreeSet<Vertex> = vertices.iter().copied().collect();
        if distinct.len() != vertices.len() {
            return Err(Error::MalformedPath("path revisits a vertex"));
        }
        Ok(Path(vertices))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Vertex {
        self.0[0]
    }

    pub fn last(&self) -> Vertex {
        self.0[self.0.len() - 1]
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.0.iter().copied().collect()
    }

    pub fn map(&self, f: impl Fn(Vertex) -> Vertex) -> Path {
        Path(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn reversed(&self) -> Path {
        Path(self.0.iter().rev().copied().collect())
    }

    /// Whether this is a horizontal crossing of `region`.
    pub fn crosses_horizontally(&self, region: &Parallelogram) -> bool {
        self.0.iter().all(|&v| region.contains(v)) && self.first().k == region.a && self.last().k == region.b
    }

    /// Whether this is a vertical crossing of `region` (top side to bottom side).
    pub fn crosses_vertically(&self, region: &Parallelogram) -> bool {
        self.0.iter().all(|&v| region.contains(v)) && self.first().l == region.d && self.last().l == region.c
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    Horizontal,
    Vertical,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn matches(self, plus: bool) -> bool {
        plus == (self == Sign::Plus)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossingSpec {
    pub region: Parallelogram,
    pub direction: Direction,
    pub sign: Sign,
}

impl CrossingSpec {
    pub fn new(region: Parallelogram, direction: Direction, sign: Sign) -> Self {
        CrossingSpec { region, direction, sign }
    }
}

/// A set of vertices stored as a bitmap over a parallelogram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMask {
    region: Parallelogram,
    bits: Vec<bool>,
}

impl VertexMask {
    pub fn empty(region: Parallelogram) -> Self {
        VertexMask { region, bits: vec![false; region.len()] }
    }

    pub fn from_fn(region: Parallelogram, f: impl Fn(Vertex) -> bool) -> Self {
        VertexMask { region, bits: region.vertices().map(f).collect() }
    }

    pub fn region(&self) -> Parallelogram {
        self.region
    }

    /// `false` outside the underlying parallelogram.
    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.region.index(v).is_some_and(|i| self.bits[i])
    }

    pub fn insert(&mut self, v: Vertex) {
        let i = self.region.index(v).expect("vertex inside mask region");
        self.bits[i] = true;
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| self.region.vertex(i))
    }

    pub fn to_set(&self) -> BTreeSet<Vertex> {
        self.iter().collect()
    }
}

/// Constant-spin clusters of a spin configuration.
#[derive(Clone, Debug)]
pub struct SpinClusters {
    /// Cluster number of each vertex (row-major over the configuration).
    pub label: Vec<u32>,
    pub sizes: Vec<u32>,
    pub plus: Vec<bool>,
}

pub fn spin_clusters(sigma: &SpinConfig) -> SpinClusters {
    let region = sigma.region();
    let n = region.len();
    let mut label = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut plus = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if label[s] != u32::MAX {
            continue;
        }
        let c = sizes.len() as u32;
        let sign = sigma.is_plus_at(s);
        label[s] = c;
        let mut size = 0;
        queue.push_back(s);
        while let Some(i) = queue.pop_front() {
            size += 1;
            for w in region.vertex(i).neighbors() {
                if let Some(j) = region.index(w) {
                    if label[j] == u32::MAX && sigma.is_plus_at(j) == sign {
                        label[j] = c;
                        queue.push_back(j);
                    }
                }
            }
        }
        sizes.push(size);
        plus.push(sign);
    }
    SpinClusters { label, sizes, plus }
}

/// BFS-first crossing of `region` through vertices where `open` holds.
/// Horizontal crossings run from the left side to the right side, vertical
/// ones from the top side to the bottom side.
pub fn crossing_of(region: Parallelogram, direction: Direction, open: impl Fn(Vertex) -> bool) -> Option<Path> {
    let n = region.len();
    let mut parent = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    let (sources, is_target): (Vec<Vertex>, &dyn Fn(Vertex) -> bool) = match direction {
        Direction::Horizontal => ((region.c..=region.d).map(|l| Vertex::new(region.a, l)).collect(), &|v: Vertex| v.k == region.b),
        Direction::Vertical => ((region.a..=region.b).map(|k| Vertex::new(k, region.d)).collect(), &|v: Vertex| v.l == region.c),
    };
    for s in sources {
        if open(s) {
            let i = region.index(s).unwrap();
            parent[i] = i as u32;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let v = region.vertex(i);
        if is_target(v) {
            let mut out = vec![v];
            let mut j = i;
            while parent[j] as usize != j {
                j = parent[j] as usize;
                out.push(region.vertex(j));
            }
            out.reverse();
            return Some(Path(out));
        }
        for w in v.neighbors() {
            if let Some(j) = region.index(w) {
                if parent[j] == u32::MAX && open(w) {
                    parent[j] = i as u32;
                    queue.push_back(j);
                }
            }
        }
    }
    None
}

pub fn find_crossing(sigma: &SpinConfig, spec: &CrossingSpec) -> Option<Path> {
    debug_assert!(sigma.region().contains_region(&spec.region));
    crossing_of(spec.region, spec.direction, |v| spec.sign.matches(sigma.is_plus(v)))
}

pub fn has_crossing(sigma: &SpinConfig, spec: &CrossingSpec) -> bool {
    find_crossing(sigma, spec).is_some()
}

/// Lowest horizontal crossing of `region` through vertices where `open` holds.
///
/// Traces the interface between the closed vertices joined to the bottom
/// (everything strictly below the region counts as closed and joined) and the
/// open vertices, treating the left, right and top exterior as open. The
/// walk starts at the lower-left corner; it ends at the right exterior when a
/// crossing exists and at the top exterior otherwise. The crossing is the
/// loop erasure of the real part of the walk after its last visit to the left
/// exterior.
pub fn lowest_crossing_of(region: Parallelogram, open: impl Fn(Vertex) -> bool) -> Option<Path> {
    let colour = |v: Vertex| {
        if v.l < region.c {
            false
        } else if !region.contains(v) {
            true
        } else {
            open(v)
        }
    };
    let mut m = Vertex::new(region.a - 1, region.c);
    let mut p = Vertex::new(region.a - 1, region.c - 1);
    let mut walk: Vec<Vertex> = Vec::new();
    let limit = 12 * (region.len() + 2 * (region.width() + region.height()) + 8);
    for _ in 0..limit {
        let d = (p.k - m.k, p.l - m.l);
        let i = CCW.iter().position(|&o| o == d).expect("explorer keeps m and p adjacent");
        let (dk, dl) = CCW[(i + 1) % 6];
        let cand = m.offset(dk, dl);
        if !colour(cand) {
            p = cand;
            continue;
        }
        m = cand;
        if m.l > region.d {
            return None;
        }
        if m.k > region.b {
            return Some(proper(loop_erase(&walk), &region));
        }
        if m.k < region.a {
            walk.clear();
        } else {
            walk.push(m);
        }
    }
    unreachable!("interface exploration did not terminate")
}

/// The segment from the last left-side vertex before the first right-side
/// vertex up to that right-side vertex.
fn proper(path: Path, region: &Parallelogram) -> Path {
    let v = path.vertices();
    let end = v.iter().position(|x| x.k == region.b).expect("walk reaches the right side");
    let start = v[..=end].iter().rposition(|x| x.k == region.a).expect("walk starts on the left side");
    Path(v[start..=end].to_vec())
}

fn loop_erase(walk: &[Vertex]) -> Path {
    let mut out: Vec<Vertex> = Vec::with_capacity(walk.len());
    for &v in walk {
        if let Some(pos) = out.iter().rposition(|&w| w == v) {
            out.truncate(pos + 1);
        } else {
            out.push(v);
        }
    }
    Path(out)
}

/// Highest horizontal crossing through `open`, obtained from the lowest one
/// of the point-reflected picture. Runs left to right.
pub fn highest_crossing_of(region: Parallelogram, open: impl Fn(Vertex) -> bool) -> Option<Path> {
    lowest_crossing_of(region.reflect(), |v| open(v.reflect())).map(|p| p.map(Vertex::reflect).reversed())
}

/// Lowest horizontal (-)-crossing of `region`.
pub fn lowest_crossing(sigma: &SpinConfig, region: Parallelogram) -> Option<Path> {
    lowest_crossing_of(region, |v| !sigma.is_plus(v))
}

/// `(L(R), A(R))` for a horizontal crossing `R` of some parallelogram inside
/// `region`: `L` is everything in `region` outside `R` connected to the bottom
/// side without touching `R`; `A` is the rest of `region` minus `R`, so pockets
/// enclosed by loops of `R` count as above.
pub fn below_above(region: Parallelogram, path: &Path) -> (VertexMask, VertexMask) {
    let on_path = VertexMask::from_fn(region, |v| path.vertices().contains(&v));
    let mut below = VertexMask::empty(region);
    let mut queue = VecDeque::new();
    for k in region.a..=region.b {
        let v = Vertex::new(k, region.c);
        if !on_path.contains(v) {
            below.insert(v);
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for w in v.neighbors() {
            if region.contains(w) && !on_path.contains(w) && !below.contains(w) {
                below.insert(w);
                queue.push_back(w);
            }
        }
    }
    let above = VertexMask::from_fn(region, |v| !on_path.contains(v) && !below.contains(v));
    (below, above)
}

/// Largest integer `f` with `f^4 <= n`.
pub fn fourth_root_floor(n: u32) -> u32 {
    let mut f = 0u32;
    while ((f + 1) as u64).pow(4) <= n as u64 {
        f += 1;
    }
    f
}

/// `d <= n^{1/4}` for an integer distance `d`.
#[inline]
pub fn within_fourth_root(d: u32, n: u32) -> bool {
    (d as u64).pow(4) <= n as u64
}

/// `d >= sqrt(n)` for an integer distance `d`.
#[inline]
pub fn at_least_sqrt(d: u32, n: u32) -> bool {
    (d as u64).pow(2) >= n as u64
}

/// The regions attached to a horizontal crossing of `S_{n,4n}` inside
/// `S_{n,6n}`.
#[derive(Clone, Debug)]
pub struct CrossingRegions {
    pub n: u32,
    pub tall: Parallelogram,
    pub below: VertexMask,
    pub above: VertexMask,
    pub s_prime: Parallelogram,
    pub s_double_prime: Parallelogram,
    /// `D(R)`, stored over `tall` widened by `floor(n^{1/4})`.
    pub conditioning: VertexMask,
}

pub fn crossing_regions(path: &Path, n: u32) -> Result<CrossingRegions> {
    let mid = Parallelogram::s(n, 4 * n);
    if !path.crosses_horizontally(&mid) {
        return Err(Error::MalformedCrossing("not a horizontal crossing of S_{n,4n}"));
    }
    let tall = Parallelogram::s(n, 6 * n);
    let (below, above) = below_above(tall, path);
    let f = fourth_root_floor(n);
    let fi = f as i32;
    let ni = n as i32;
    let s_prime = Parallelogram { a: fi, b: ni - fi, c: 0, d: 6 * ni };
    let s_double_prime = Parallelogram { a: 2 * fi, b: ni - 2 * fi, c: 0, d: 6 * ni };

    let wide = tall.expand(f);
    let mut dist = vec![u32::MAX; wide.len()];
    let mut queue = VecDeque::new();
    for v in below.iter().chain(path.vertices().iter().copied()) {
        let i = wide.index(v).unwrap();
        if dist[i] == u32::MAX {
            dist[i] = 0;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        let dv = dist[wide.index(v).unwrap()];
        if dv == f {
            continue;
        }
        for w in v.neighbors() {
            if let Some(j) = wide.index(w) {
                if dist[j] == u32::MAX {
                    dist[j] = dv + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let conditioning = VertexMask::from_fn(wide, |v| {
        let d = dist[wide.index(v).unwrap()];
        d != u32::MAX && within_fourth_root(d, n) && !(above.contains(v) && s_prime.contains(v))
    });
    Ok(CrossingRegions { n, tall, below, above, s_prime, s_double_prime, conditioning })
}

/// The FK hull of `L(R) ∪ R` and the objects derived from it.
#[derive(Clone, Debug)]
pub struct FkHull {
    /// `U_R`: union of the FK clusters of `L(R) ∪ R`.
    pub hull: BTreeSet<Vertex>,
    /// `B = ΔU_R`.
    pub barrier: BTreeSet<Edge>,
    /// `int(B)`, absent if `B` is not a barrier.
    pub interior: Option<BTreeSet<Vertex>>,
    /// `Γ_B`: the highest horizontal crossing of `S_{N,4N}` through `int(B)`.
    pub gamma: Option<Path>,
    /// `t(R)`: every dependence range on `L(R) ∪ R` is at most `N^{1/4}`.
    pub t_r: bool,
    /// Membership of `B` in the class `B(R)`.
    pub in_br: bool,
}

pub fn fk_hull(lat: &BoxLattice, sample: &DacSample, path: &Path, n: u32) -> Result<FkHull> {
    let regions = crossing_regions(path, n)?;
    let seeds: Vec<Vertex> = regions.below.iter().chain(path.vertices().iter().copied()).collect();
    let extents = ClusterExtents::new(lat, &sample.clusters);

    let mut hull = BTreeSet::new();
    let mut done = BTreeSet::new();
    let mut t_r = true;
    for &v in &seeds {
        let i = lat.index(v).ok_or(Error::OutsideDomain(v))?;
        let c = sample.clusters.number(i);
        if extents.touches_boundary(c) {
            return Err(Error::ClusterTouchesBoundary(v));
        }
        t_r &= within_fourth_root(extents.reach(c, v), n);
        if done.insert(c) {
            hull.extend(sample.clusters.members(c).iter().map(|&j| lat.vertex(j as usize)));
        }
    }
    let barrier = edge_boundary(&hull);
    let interior = classify_barrier(&barrier, &Domain::Infinite).ok().map(|b| b.interior);

    let mid = Parallelogram::s(n, 4 * n);
    let (gamma, in_br) = match &interior {
        None => (None, false),
        Some(int) => {
            let gamma = highest_crossing_of(mid, |v| int.contains(&v));
            let int_boundary = vertex_boundary(int);
            let lr: BTreeSet<Vertex> = seeds.iter().copied().collect();
            let lr_boundary = vertex_boundary(&lr);
            let enclosed = lr_boundary.iter().all(|v| int.contains(v));
            let near = edges_near(&barrier, &lr_boundary, n);
            let on_boundary = gamma.as_ref().is_some_and(|g| g.vertices().iter().all(|v| int_boundary.contains(v)));
            (gamma.clone(), enclosed && near && on_boundary)
        }
    };
    Ok(FkHull { hull, barrier, interior, gamma, t_r, in_br })
}

/// Every edge has an endpoint within distance `n^{1/4}` of `set`.
fn edges_near(edges: &BTreeSet<Edge>, set: &BTreeSet<Vertex>, n: u32) -> bool {
    let f = fourth_root_floor(n);
    let mut dist: alloc::collections::BTreeMap<Vertex, u32> = set.iter().map(|&v| (v, 0)).collect();
    let mut queue: VecDeque<Vertex> = set.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        let dv = dist[&v];
        if dv == f {
            continue;
        }
        for w in v.neighbors() {
            if let alloc::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(dv + 1);
                queue.push_back(w);
            }
        }
    }
    edges.iter().all(|e| {
        let (x, y) = e.endpoints();
        dist.contains_key(&x) || dist.contains_key(&y)
    })
}

/// `Q(R, B)` with `B = ΔU_R`: `R` is the lowest horizontal (-)-crossing of
/// `S_{N,6N}` at colour parameter `r` and `t(R)` holds.
pub fn q_event(lat: &BoxLattice, sample: &DacSample, r: f64, path: &Path, n: u32) -> Result<bool> {
    let sigma = sample.color(r);
    let lowest = lowest_crossing(&sigma, Parallelogram::s(n, 6 * n));
    if lowest.as_ref() != Some(path) {
        return Ok(false);
    }
    Ok(fk_hull(lat, sample, path, n)?.t_r)
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on the bottleneck value, ties by index.
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimax path values inside `region`: for each vertex `v`, the minimum over
/// paths from a source to `v` of the largest weight on the path (endpoints
/// included). With cluster marks as weights, `v` is joined to a source by a
/// (+)-path at colour `r` iff the value is `< r`.
pub fn bottleneck(region: Parallelogram, weight: impl Fn(Vertex) -> f64, sources: &[Vertex]) -> Vec<f64> {
    let mut best = vec![f64::INFINITY; region.len()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        let i = region.index(s).expect("source inside region");
        let w = weight(s);
        if w < best[i] {
            best[i] = w;
            heap.push(HeapItem(w, i));
        }
    }
    while let Some(HeapItem(b, i)) = heap.pop() {
        if b > best[i] {
            continue;
        }
        for w in region.vertex(i).neighbors() {
            if let Some(j) = region.index(w) {
                let nb = b.max(weight(w));
                if nb < best[j] {
                    best[j] = nb;
                    heap.push(HeapItem(nb, j));
                }
            }
        }
    }
    best
}

/// Smallest `r*` such that the crossing of `spec.region` in direction
/// `spec.direction` by (+)-vertices exists for every `r > r*`: the crossing
/// holds at `r` iff `r* < r`.
pub fn plus_crossing_threshold(sample: &DacSample, lat: &BoxLattice, region: Parallelogram, direction: Direction) -> f64 {
    let weight = |v: Vertex| sample.mark(lat.index(v).expect("region inside box"));
    let (sources, targets): (Vec<Vertex>, Vec<Vertex>) = match direction {
        Direction::Horizontal => (
            (region.c..=region.d).map(|l| Vertex::new(region.a, l)).collect(),
            (region.c..=region.d).map(|l| Vertex::new(region.b, l)).collect(),
        ),
        Direction::Vertical => (
            (region.a..=region.b).map(|k| Vertex::new(k, region.d)).collect(),
            (region.a..=region.b).map(|k| Vertex::new(k, region.c)).collect(),
        ),
    };
    let b = bottleneck(region, weight, &sources);
    targets.iter().map(|&t| b[region.index(t).unwrap()]).fold(f64::INFINITY, f64::min)
}
