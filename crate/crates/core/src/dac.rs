//! The colouring layer: FK clusters, one uniform mark per cluster, and spins
//! for any `r` read off the marks.

use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::{BoxLattice, Parallelogram, Vertex};
use crate::rcm::EdgeConfig;
use crate::rng::{Purpose, StreamRng};
use crate::unionfind::UnionFind;
use crate::{Error, Result};

/// Spins on a parallelogram, row-major; `true` means +1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    region: Parallelogram,
    plus: Vec<bool>,
}

impl SpinConfig {
    pub fn new(region: Parallelogram, plus: Vec<bool>) -> Result<Self> {
        if plus.len() != region.len() {
            return Err(Error::LengthMismatch { expected: region.len(), got: plus.len() });
        }
        Ok(SpinConfig { region, plus })
    }

    pub fn constant(region: Parallelogram, plus: bool) -> Self {
        SpinConfig { region, plus: vec![plus; region.len()] }
    }

    pub fn from_fn(region: Parallelogram, f: impl Fn(Vertex) -> bool) -> Self {
        SpinConfig { region, plus: region.vertices().map(f).collect() }
    }

    #[inline]
    pub fn region(&self) -> Parallelogram {
        self.region
    }

    #[inline]
    pub fn is_plus(&self, v: Vertex) -> bool {
        self.plus[self.region.index(v).expect("vertex inside the spin configuration")]
    }

    /// +1 or -1.
    pub fn spin(&self, v: Vertex) -> i8 {
        if self.is_plus(v) {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn is_plus_at(&self, i: usize) -> bool {
        self.plus[i]
    }

    pub fn set(&mut self, v: Vertex, plus: bool) {
        let i = self.region.index(v).expect("vertex inside the spin configuration");
        self.plus[i] = plus;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.plus
    }

    pub fn as_mut_slice(&mut self) -> &mut [bool] {
        &mut self.plus
    }

    /// Image under `(k, l) -> (l, k)`.
    pub fn transpose(&self) -> Self {
        let region = self.region.transpose();
        SpinConfig::from_fn(region, |v| self.is_plus(v.transpose()))
    }

    /// Image under `(k, l) -> (-k, -l)`.
    pub fn reflect(&self) -> Self {
        let region = self.region.reflect();
        SpinConfig::from_fn(region, |v| self.is_plus(v.reflect()))
    }

    /// Vertex-wise `self <= other`.
    pub fn le(&self, other: &SpinConfig) -> bool {
        self.plus.iter().zip(&other.plus).all(|(&a, &b)| !a || b)
    }
}

/// FK clusters of an edge configuration. Cluster ids are the row-major index
/// of the cluster's smallest vertex in `(l, k)` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterLabeling {
    /// Canonical id of the cluster of each vertex.
    id: Vec<u32>,
    /// Dense cluster number of each vertex (clusters numbered by id).
    number: Vec<u32>,
    /// Canonical ids in increasing order.
    ids: Vec<u32>,
    start: Vec<u32>,
    members: Vec<u32>,
}

pub fn label_clusters(lat: &BoxLattice, eta: &EdgeConfig) -> ClusterLabeling {
    let n = lat.len();
    let mut uf = UnionFind::new(n);
    for e in 0..lat.n_edges() {
        if eta.get(e) {
            let (i, j) = lat.edge(e);
            uf.union(i, j);
        }
    }
    let mut id = vec![0u32; n];
    let mut number = vec![0u32; n];
    let mut ids = Vec::new();
    let mut size = Vec::new();
    for i in 0..n {
        let r = uf.find(i);
        id[i] = r as u32;
        if r == i {
            number[i] = ids.len() as u32;
            ids.push(i as u32);
            size.push(0u32);
        } else {
            number[i] = number[r];
        }
        size[number[i] as usize] += 1;
    }
    let mut start = vec![0u32; ids.len() + 1];
    for c in 0..ids.len() {
        start[c + 1] = start[c] + size[c];
    }
    let mut fill = start.clone();
    let mut members = vec![0u32; n];
    for i in 0..n {
        let c = number[i] as usize;
        members[fill[c] as usize] = i as u32;
        fill[c] += 1;
    }
    ClusterLabeling { id, number, ids, start, members }
}

impl ClusterLabeling {
    pub fn count(&self) -> usize {
        self.ids.len()
    }

    /// Canonical id of the cluster containing vertex index `i`.
    #[inline]
    pub fn id(&self, i: usize) -> usize {
        self.id[i] as usize
    }

    /// Dense cluster number in `0..count()` of vertex index `i`.
    #[inline]
    pub fn number(&self, i: usize) -> usize {
        self.number[i] as usize
    }

    pub fn canonical_ids(&self) -> &[u32] {
        &self.ids
    }

    /// Vertex indices of cluster number `c`, increasing.
    pub fn members(&self, c: usize) -> &[u32] {
        &self.members[self.start[c] as usize..self.start[c + 1] as usize]
    }

    pub fn size(&self, c: usize) -> usize {
        (self.start[c + 1] - self.start[c]) as usize
    }
}

/// An edge configuration with its clusters and one uniform mark per cluster.
#[derive(Clone, Debug)]
pub struct DacSample {
    pub lattice_region: Parallelogram,
    pub eta: EdgeConfig,
    pub clusters: ClusterLabeling,
    /// Mark of each cluster, by dense cluster number.
    pub marks: Vec<f64>,
    pub sample_id: u64,
}

impl DacSample {
    /// Marks are `U(seed, sample_id, canonical id)`.
    pub fn new(lat: &BoxLattice, eta: EdgeConfig, seed: u64, sample_id: u64) -> Self {
        let clusters = label_clusters(lat, &eta);
        let rng = StreamRng::new(seed);
        let marks = clusters
            .canonical_ids()
            .iter()
            .map(|&c| rng.uniform_wide(Purpose::ClusterMark, sample_id, c))
            .collect();
        DacSample { lattice_region: lat.region(), eta, clusters, marks, sample_id }
    }

    /// Mark of the cluster containing vertex index `i`.
    #[inline]
    pub fn mark(&self, i: usize) -> f64 {
        self.marks[self.clusters.number(i)]
    }

    /// `sigma(v) = +1` iff `U(C_v) < r`.
    pub fn color(&self, r: f64) -> SpinConfig {
        let n = self.lattice_region.len();
        SpinConfig { region: self.lattice_region, plus: (0..n).map(|i| self.mark(i) < r).collect() }
    }
}

/// Per-cluster extremes of `k`, `l` and `k - l`; the distance from `v` to the
/// farthest member is read off these because
/// `d(v, w) = max(|dk|, |dl|, |dk - dl|)`.
#[derive(Clone, Debug)]
pub struct ClusterExtents {
    lo: Vec<[i32; 3]>,
    hi: Vec<[i32; 3]>,
    touches_boundary: Vec<bool>,
}

impl ClusterExtents {
    pub fn new(lat: &BoxLattice, clusters: &ClusterLabeling) -> Self {
        let c = clusters.count();
        let mut lo = vec![[i32::MAX; 3]; c];
        let mut hi = vec![[i32::MIN; 3]; c];
        let mut touches_boundary = vec![false; c];
        for i in 0..lat.len() {
            let v = lat.vertex(i);
            let n = clusters.number(i);
            let x = [v.k, v.l, v.k - v.l];
            for a in 0..3 {
                lo[n][a] = lo[n][a].min(x[a]);
                hi[n][a] = hi[n][a].max(x[a]);
            }
            touches_boundary[n] |= lat.on_boundary(i);
        }
        ClusterExtents { lo, hi, touches_boundary }
    }

    pub fn touches_boundary(&self, cluster: usize) -> bool {
        self.touches_boundary[cluster]
    }

    /// Largest graph distance from `v` to a member of `cluster`.
    pub fn reach(&self, cluster: usize, v: Vertex) -> u32 {
        let x = [v.k, v.l, v.k - v.l];
        (0..3)
            .map(|a| (x[a] - self.lo[cluster][a]).max(self.hi[cluster][a] - x[a]))
            .max()
            .unwrap() as u32
    }
}

/// `max{n : C_v ∩ ∂B(v, n) ≠ ∅}`, which is the largest distance from `v` to a
/// member of its cluster.
pub fn dependence_range(lat: &BoxLattice, sample: &DacSample, v: Vertex) -> Result<u32> {
    let i = lat.index(v).ok_or(Error::OutsideDomain(v))?;
    let c = sample.clusters.number(i);
    let members = sample.clusters.members(c);
    if members.iter().any(|&j| lat.on_boundary(j as usize)) {
        return Err(Error::ClusterTouchesBoundary(v));
    }
    Ok(members.iter().map(|&j| crate::lattice::graph_distance(v, lat.vertex(j as usize))).max().unwrap_or(0))
}

/// Dependence range of every vertex of `window`; `None` where the cluster
/// touches the box boundary.
pub fn dependence_ranges(lat: &BoxLattice, clusters: &ClusterLabeling, window: Parallelogram) -> Vec<Option<u32>> {
    let ext = ClusterExtents::new(lat, clusters);
    window
        .vertices()
        .map(|v| {
            let c = clusters.number(lat.index(v).expect("window inside box"));
            (!ext.touches_boundary(c)).then(|| ext.reach(c, v))
        })
        .collect()
}
