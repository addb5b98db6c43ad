//! Exhaustive random-cluster and Divide-and-Colour distributions on tiny
//! graphs.
//!
//! Edge configurations are bitmasks (`u32`, bit `e` set when edge `e` is
//! open) and spin configurations are bitmasks (`u64`, bit `v` set when vertex
//! `v` has spin +1).

use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::{BoxLattice, Parallelogram, Vertex};
use crate::{Error, Result};

pub const EDGE_CAP: usize = 24;
pub const VERTEX_CAP: usize = 64;

/// Compensated (Neumaier) summation.
#[derive(Copy, Clone, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.c
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactGraph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    /// Lattice positions when the graph is a box, empty otherwise.
    positions: Vec<Vertex>,
}

impl ExactGraph {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n_vertices > VERTEX_CAP {
            return Err(Error::SizeExceeded { edges: n_vertices, cap: VERTEX_CAP });
        }
        if edges.len() > EDGE_CAP {
            return Err(Error::SizeExceeded { edges: edges.len(), cap: EDGE_CAP });
        }
        for &(a, b) in &edges {
            if a >= n_vertices || b >= n_vertices || a == b {
                return Err(Error::Parse("edge endpoints must be distinct vertices of the graph"));
            }
        }
        Ok(ExactGraph { n_vertices, edges, positions: Vec::new() })
    }

    pub fn single_edge() -> Self {
        Self::new(2, vec![(0, 1)]).unwrap()
    }

    pub fn triangle() -> Self {
        Self::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    /// The box graph with [`BoxLattice`] vertex and edge numbering.
    pub fn from_parallelogram(region: Parallelogram) -> Result<Self> {
        let lat = BoxLattice::new(region);
        let edges = (0..lat.n_edges()).map(|e| lat.edge(e)).collect();
        let mut g = Self::new(lat.len(), edges)?;
        g.positions = region.vertices().collect();
        Ok(g)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn position(&self, v: usize) -> Option<Vertex> {
        self.positions.get(v).copied()
    }

    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.positions.iter().position(|&w| w == v)
    }

    /// Edges with exactly one endpoint in the vertex mask.
    pub fn edge_boundary(&self, vmask: u64) -> u32 {
        let mut out = 0;
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if (vmask >> a & 1) != (vmask >> b & 1) {
                out |= 1 << e;
            }
        }
        out
    }

    /// Edges with both endpoints in the vertex mask.
    pub fn induced_edges(&self, vmask: u64) -> u32 {
        let mut out = 0;
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if vmask >> a & 1 == 1 && vmask >> b & 1 == 1 {
                out |= 1 << e;
            }
        }
        out
    }

    /// Whether the vertex mask induces a connected, nonempty subgraph.
    pub fn is_connected(&self, vmask: u64) -> bool {
        if vmask == 0 {
            return false;
        }
        let inner = self.induced_edges(vmask);
        let comps = self.clusters(inner);
        comps.iter().filter(|&&m| m & vmask != 0).count() == 1
    }

    /// Vertex masks of the clusters of `eta`, ordered by smallest member.
    pub fn clusters(&self, eta: u32) -> Vec<u64> {
        let mut parent: [u8; VERTEX_CAP] = [0; VERTEX_CAP];
        for (i, p) in parent.iter_mut().enumerate().take(self.n_vertices) {
            *p = i as u8;
        }
        fn find(parent: &mut [u8; VERTEX_CAP], mut x: usize) -> usize {
            while parent[x] as usize != x {
                parent[x] = parent[parent[x] as usize];
                x = parent[x] as usize;
            }
            x
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if eta >> e & 1 == 1 {
                let ra = find(&mut parent, a);
                let rb = find(&mut parent, b);
                if ra != rb {
                    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                    parent[hi] = lo as u8;
                }
            }
        }
        let mut slot = [usize::MAX; VERTEX_CAP];
        let mut out = Vec::new();
        for v in 0..self.n_vertices {
            let r = find(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(0u64);
            }
            out[slot[r]] |= 1 << v;
        }
        out
    }
}

/// The normalised random-cluster law of every edge configuration of a graph.
#[derive(Clone, Debug)]
pub struct ExactModel {
    graph: ExactGraph,
    p: f64,
    q: f64,
    probs: Vec<f64>,
    n_clusters: Vec<u8>,
    z: f64,
}

/// Weights `p^open (1-p)^closed q^clusters`, normalised.
pub fn exact_distribution(graph: &ExactGraph, p: f64, q: f64) -> Result<ExactModel> {
    if graph.n_edges() > EDGE_CAP {
        return Err(Error::SizeExceeded { edges: graph.n_edges(), cap: EDGE_CAP });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name: "p", value: p });
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::OutOfRange { name: "q", value: q });
    }
    let m = graph.n_edges();
    let n = 1usize << m;
    let mut probs = vec![0.0; n];
    let mut n_clusters = vec![0u8; n];
    let mut z = Neumaier::default();
    for eta in 0..n {
        let open = (eta as u32).count_ones() as i32;
        let k = graph.clusters(eta as u32).len();
        n_clusters[eta] = k as u8;
        let w = libm::pow(p, open as f64) * libm::pow(1.0 - p, (m as i32 - open) as f64) * libm::pow(q, k as f64);
        probs[eta] = w;
        z.add(w);
    }
    let z = z.total();
    for w in probs.iter_mut() {
        *w /= z;
    }
    Ok(ExactModel { graph: graph.clone(), p, q, probs, n_clusters, z })
}

impl ExactModel {
    pub fn graph(&self) -> &ExactGraph {
        &self.graph
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    /// Partition sum of the unnormalised weights.
    pub fn partition_sum(&self) -> f64 {
        self.z
    }
    pub fn n_configs(&self) -> usize {
        self.probs.len()
    }
    pub fn prob(&self, eta: u32) -> f64 {
        self.probs[eta as usize]
    }
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
    pub fn n_clusters(&self, eta: u32) -> usize {
        self.n_clusters[eta as usize] as usize
    }

    /// `P(eta(e) = 1)`.
    pub fn edge_marginal(&self, e: usize) -> f64 {
        let mut s = Neumaier::default();
        for (eta, &w) in self.probs.iter().enumerate() {
            if eta >> e & 1 == 1 {
                s.add(w);
            }
        }
        s.total()
    }

    /// `joint[a][b] = P(eta(e) = a, eta(f) = b)`.
    pub fn pair_joint(&self, e: usize, f: usize) -> [[f64; 2]; 2] {
        let mut s = [[Neumaier::default(); 2]; 2];
        for (eta, &w) in self.probs.iter().enumerate() {
            s[eta >> e & 1][eta >> f & 1].add(w);
        }
        [[s[0][0].total(), s[0][1].total()], [s[1][0].total(), s[1][1].total()]]
    }

    /// Probability of an edge-only event.
    pub fn edge_event_probability(&self, event: impl Fn(u32) -> bool) -> f64 {
        let mut s = Neumaier::default();
        for (eta, &w) in self.probs.iter().enumerate() {
            if event(eta as u32) {
                s.add(w);
            }
        }
        s.total()
    }
}

/// `E[f(eta, sigma)]` under the Divide-and-Colour law, with `r` treated as a
/// formal variable: any finite `r` is accepted and the result is the
/// polynomial extension of the expectation.
pub fn dac_polynomial(model: &ExactModel, r: f64, f: impl Fn(u32, u64) -> f64) -> f64 {
    let mut acc = Neumaier::default();
    let mut pw_plus = [1.0f64; VERTEX_CAP + 1];
    let mut pw_minus = [1.0f64; VERTEX_CAP + 1];
    for i in 1..=VERTEX_CAP {
        pw_plus[i] = pw_plus[i - 1] * r;
        pw_minus[i] = pw_minus[i - 1] * (1.0 - r);
    }
    for (eta, &w) in model.probs.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let cl = model.graph.clusters(eta as u32);
        let k = cl.len();
        for colour in 0u64..(1u64 << k) {
            let mut sigma = 0u64;
            for (c, &mask) in cl.iter().enumerate() {
                if colour >> c & 1 == 1 {
                    sigma |= mask;
                }
            }
            let plus = colour.count_ones() as usize;
            let val = f(eta as u32, sigma);
            if val != 0.0 {
                acc.add(w * pw_plus[plus] * pw_minus[k - plus] * val);
            }
        }
    }
    acc.total()
}

fn check_r(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name: "r", value: r })
    }
}

/// `P(event)` under the Divide-and-Colour law with colour parameter `r`.
pub fn exact_dac_probability(model: &ExactModel, r: f64, event: impl Fn(u32, u64) -> bool) -> Result<f64> {
    check_r(r)?;
    Ok(dac_polynomial(model, r, |eta, sigma| if event(eta, sigma) { 1.0 } else { 0.0 }))
}

/// `P(eta(e) = 1 | condition)`.
pub fn exact_conditional_edge_prob(
    model: &ExactModel,
    r: f64,
    e: usize,
    condition: impl Fn(u32, u64) -> bool,
) -> Result<f64> {
    check_r(r)?;
    let den = dac_polynomial(model, r, |eta, s| if condition(eta, s) { 1.0 } else { 0.0 });
    if den <= 0.0 {
        return Err(Error::ZeroProbabilityCondition);
    }
    let num = dac_polynomial(model, r, |eta, s| if eta >> e & 1 == 1 && condition(eta, s) { 1.0 } else { 0.0 });
    Ok(num / den)
}

/// Every `(eta, sigma)` atom with its edge probability and colour counts, so
/// that many `r` values can be evaluated without re-enumerating clusters.
#[derive(Clone, Debug)]
pub struct DacTable {
    pub eta: Vec<u32>,
    pub sigma: Vec<u64>,
    pub p_eta: Vec<f64>,
    pub plus: Vec<u8>,
    pub minus: Vec<u8>,
}

impl DacTable {
    pub fn new(model: &ExactModel) -> Self {
        let mut t = DacTable { eta: Vec::new(), sigma: Vec::new(), p_eta: Vec::new(), plus: Vec::new(), minus: Vec::new() };
        for (eta, &w) in model.probs.iter().enumerate() {
            let cl = model.graph.clusters(eta as u32);
            let k = cl.len();
            for colour in 0u64..(1u64 << k) {
                let mut sigma = 0u64;
                for (c, &mask) in cl.iter().enumerate() {
                    if colour >> c & 1 == 1 {
                        sigma |= mask;
                    }
                }
                let plus = colour.count_ones() as u8;
                t.eta.push(eta as u32);
                t.sigma.push(sigma);
                t.p_eta.push(w);
                t.plus.push(plus);
                t.minus.push(k as u8 - plus);
            }
        }
        t
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    /// Joint probability of each atom at colour parameter `r`.
    pub fn weights(&self, r: f64) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.p_eta[i] * libm::pow(r, self.plus[i] as f64) * libm::pow(1.0 - r, self.minus[i] as f64))
            .collect()
    }
}
