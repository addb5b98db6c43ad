//! Triangular-lattice geometry.
//!
//! Vertices carry integer axial coordinates `(k, l)`; `(k, l)` and `(k', l')`
//! are adjacent iff their offset is one of `(±1, 0)`, `(0, ±1)`, `(1, 1)`,
//! `(-1, -1)`. The planar embedding `(k - l/2, (√3/2) l)` is only used for
//! rendering.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

/// Neighbour offsets in the canonical iteration order.
pub const OFFSETS: [(i32, i32); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)];

/// Neighbour offsets in counter-clockwise order of the embedding, starting at
/// angle 0.
pub const CCW: [(i32, i32); 6] = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)];

const FORWARD: [(i32, i32); 3] = [(1, 0), (0, 1), (1, 1)];

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vertex {
    pub k: i32,
    pub l: i32,
}

// Row-major: compare l first. The minimal vertex of a cluster in this order is
// its canonical identifier.
impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.l, self.k).cmp(&(other.l, other.k))
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

impl Vertex {
    pub const ORIGIN: Vertex = Vertex { k: 0, l: 0 };

    pub const fn new(k: i32, l: i32) -> Self {
        Vertex { k, l }
    }

    #[inline]
    pub const fn offset(self, dk: i32, dl: i32) -> Self {
        Vertex { k: self.k + dk, l: self.l + dl }
    }

    /// The six neighbours on the infinite lattice, in [`OFFSETS`] order.
    pub fn neighbors(self) -> [Vertex; 6] {
        OFFSETS.map(|(dk, dl)| self.offset(dk, dl))
    }

    pub fn embed(self) -> (f64, f64) {
        let sqrt3_2 = libm::sqrt(3.0) / 2.0;
        (self.k as f64 - self.l as f64 / 2.0, sqrt3_2 * self.l as f64)
    }

    pub fn is_adjacent(self, other: Vertex) -> bool {
        let d = (other.k - self.k, other.l - self.l);
        OFFSETS.contains(&d)
    }

    /// The graph automorphism `(k, l) -> (l, k)`.
    pub const fn transpose(self) -> Self {
        Vertex { k: self.l, l: self.k }
    }

    /// Point reflection `(k, l) -> (-k, -l)`, also an automorphism.
    pub const fn reflect(self) -> Self {
        Vertex { k: -self.k, l: -self.l }
    }
}

/// Graph distance on the infinite lattice.
pub fn graph_distance(v: Vertex, w: Vertex) -> u32 {
    let dk = w.k - v.k;
    let dl = w.l - v.l;
    if (dk >= 0) == (dl >= 0) {
        dk.unsigned_abs().max(dl.unsigned_abs())
    } else {
        dk.unsigned_abs() + dl.unsigned_abs()
    }
}

/// An unordered pair of adjacent vertices, stored with `a < b`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Edge {
    a: Vertex,
    b: Vertex,
}

impl Edge {
    pub fn new(v: Vertex, w: Vertex) -> Result<Self> {
        if !v.is_adjacent(w) {
            return Err(Error::NotAdjacent(v, w));
        }
        Ok(if v < w { Edge { a: v, b: w } } else { Edge { a: w, b: v } })
    }

    pub fn endpoints(self) -> (Vertex, Vertex) {
        (self.a, self.b)
    }

    pub fn touches(self, v: Vertex) -> bool {
        self.a == v || self.b == v
    }
}

/// The parallelogram `[a, b] x [c, d]` of vertices `a <= k <= b`, `c <= l <= d`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Parallelogram {
    pub a: i32,
    pub b: i32,
    pub c: i32,
    pub d: i32,
}

impl Parallelogram {
    pub fn new(a: i32, b: i32, c: i32, d: i32) -> Result<Self> {
        if a > b || c > d {
            return Err(Error::InvalidRegion { a, b, c, d });
        }
        Ok(Parallelogram { a, b, c, d })
    }

    /// `S_{n,m} = [0, n] x [0, m]`.
    pub const fn s(n: u32, m: u32) -> Self {
        Parallelogram { a: 0, b: n as i32, c: 0, d: m as i32 }
    }

    pub const fn square(n: u32) -> Self {
        Self::s(n, n)
    }

    #[inline]
    pub const fn contains(&self, v: Vertex) -> bool {
        v.k >= self.a && v.k <= self.b && v.l >= self.c && v.l <= self.d
    }

    pub fn contains_region(&self, other: &Parallelogram) -> bool {
        other.a >= self.a && other.b <= self.b && other.c >= self.c && other.d <= self.d
    }

    /// Number of vertex columns.
    #[inline]
    pub const fn width(&self) -> usize {
        (self.b - self.a + 1) as usize
    }

    /// Number of vertex rows.
    #[inline]
    pub const fn height(&self) -> usize {
        (self.d - self.c + 1) as usize
    }

    pub const fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub const fn is_empty(&self) -> bool {
        false
    }

    /// Row-major index, i.e. `(l, k)`-lexicographic.
    #[inline]
    pub fn index(&self, v: Vertex) -> Option<usize> {
        if self.contains(v) {
            Some((v.l - self.c) as usize * self.width() + (v.k - self.a) as usize)
        } else {
            None
        }
    }

    #[inline]
    pub fn vertex(&self, index: usize) -> Vertex {
        let w = self.width();
        Vertex::new(self.a + (index % w) as i32, self.c + (index / w) as i32)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.len()).map(move |i| self.vertex(i))
    }

    pub fn on_left(&self, v: Vertex) -> bool {
        self.contains(v) && v.k == self.a
    }
    pub fn on_right(&self, v: Vertex) -> bool {
        self.contains(v) && v.k == self.b
    }
    pub fn on_bottom(&self, v: Vertex) -> bool {
        self.contains(v) && v.l == self.c
    }
    pub fn on_top(&self, v: Vertex) -> bool {
        self.contains(v) && v.l == self.d
    }

    pub fn on_side(&self, v: Vertex) -> bool {
        self.contains(v) && (v.k == self.a || v.k == self.b || v.l == self.c || v.l == self.d)
    }

    pub const fn transpose(&self) -> Self {
        Parallelogram { a: self.c, b: self.d, c: self.a, d: self.b }
    }

    pub const fn reflect(&self) -> Self {
        Parallelogram { a: -self.b, b: -self.a, c: -self.d, d: -self.c }
    }

    pub const fn expand(&self, margin: u32) -> Self {
        let m = margin as i32;
        Parallelogram { a: self.a - m, b: self.b + m, c: self.c - m, d: self.d + m }
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.vertices().collect()
    }
}

impl fmt::Display for Parallelogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

/// Accepts `"Sa,b,c,d"` and the shorthand `"S n m"` (meaning `[0,n] x [0,m]`).
impl FromStr for Parallelogram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rest = s.trim().strip_prefix('S').ok_or(Error::Parse("region must start with 'S'"))?;
        let mut nums: Vec<i32> = Vec::new();
        for tok in rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            nums.push(tok.parse().map_err(|_| Error::Parse("non-integer coordinate"))?);
        }
        match nums[..] {
            [a, b, c, d] => Parallelogram::new(a, b, c, d),
            [n, m] if n >= 0 && m >= 0 => Ok(Parallelogram::s(n as u32, m as u32)),
            _ => Err(Error::Parse("expected 'Sa,b,c,d' or 'S n m'")),
        }
    }
}

/// Where adjacency is evaluated: the whole lattice or a finite parallelogram.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    Infinite,
    Within(Parallelogram),
}

impl Domain {
    pub fn contains(&self, v: Vertex) -> bool {
        match self {
            Domain::Infinite => true,
            Domain::Within(p) => p.contains(v),
        }
    }

    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        v.neighbors().into_iter().filter(|w| self.contains(*w)).collect()
    }

    /// Shortest-path length inside the domain (BFS for finite domains).
    pub fn distance(&self, v: Vertex, w: Vertex) -> Result<u32> {
        for x in [v, w] {
            if !self.contains(x) {
                return Err(Error::OutsideDomain(x));
            }
        }
        match self {
            Domain::Infinite => Ok(graph_distance(v, w)),
            Domain::Within(p) => {
                let mut dist = vec![u32::MAX; p.len()];
                let mut queue = VecDeque::new();
                dist[p.index(v).unwrap()] = 0;
                queue.push_back(v);
                while let Some(x) = queue.pop_front() {
                    let dx = dist[p.index(x).unwrap()];
                    if x == w {
                        return Ok(dx);
                    }
                    for y in x.neighbors() {
                        if let Some(iy) = p.index(y) {
                            if dist[iy] == u32::MAX {
                                dist[iy] = dx + 1;
                                queue.push_back(y);
                            }
                        }
                    }
                }
                unreachable!("parallelograms are connected")
            }
        }
    }
}

/// `B(v, n)` on the infinite lattice.
pub fn ball(v: Vertex, n: u32) -> BTreeSet<Vertex> {
    let r = n as i32;
    let mut out = BTreeSet::new();
    for dl in -r..=r {
        for dk in -r..=r {
            let w = v.offset(dk, dl);
            if graph_distance(v, w) <= n {
                out.insert(w);
            }
        }
    }
    out
}

/// `∂A`: members of `A` with a neighbour outside `A` (on the infinite lattice).
pub fn vertex_boundary(set: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
    set.iter()
        .copied()
        .filter(|v| v.neighbors().iter().any(|w| !set.contains(w)))
        .collect()
}

/// `ΔA`: edges with exactly one endpoint in `A`.
pub fn edge_boundary(set: &BTreeSet<Vertex>) -> BTreeSet<Edge> {
    let mut out = BTreeSet::new();
    for &v in set {
        for w in v.neighbors() {
            if !set.contains(&w) {
                out.insert(Edge::new(v, w).expect("neighbours are adjacent"));
            }
        }
    }
    out
}

/// Result of splitting the lattice along a barrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Barrier {
    /// Union of the finite components.
    pub interior: BTreeSet<Vertex>,
    /// The unbounded component, restricted to the scanned window (the whole
    /// exterior when the domain is finite).
    pub exterior: BTreeSet<Vertex>,
}

/// Remove `edges` (keeping their endpoints) and split the domain.
///
/// On the infinite lattice the split is computed in the bounding box of the
/// edge endpoints widened by one; its outer ring carries no removed edge, so
/// the ring's component is the unbounded one. On a finite parallelogram the
/// exterior is the component holding the sides; if the sides fall into more
/// than one component the set is not a barrier.
pub fn classify_barrier(edges: &BTreeSet<Edge>, domain: &Domain) -> Result<Barrier> {
    if edges.is_empty() {
        return Err(Error::NotABarrier);
    }
    let window = match domain {
        Domain::Infinite => {
            let mut a = i32::MAX;
            let mut b = i32::MIN;
            let mut c = i32::MAX;
            let mut d = i32::MIN;
            for e in edges {
                let (x, y) = e.endpoints();
                for v in [x, y] {
                    a = a.min(v.k);
                    b = b.max(v.k);
                    c = c.min(v.l);
                    d = d.max(v.l);
                }
            }
            Parallelogram { a, b, c, d }.expand(1)
        }
        Domain::Within(p) => {
            for &e in edges {
                let (x, y) = e.endpoints();
                if !p.contains(x) || !p.contains(y) {
                    return Err(Error::EdgeOutsideDomain(e));
                }
            }
            *p
        }
    };

    let n = window.len();
    let mut comp = vec![u32::MAX; n];
    let mut n_comp = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if comp[start] != u32::MAX {
            continue;
        }
        comp[start] = n_comp;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let v = window.vertex(i);
            for w in v.neighbors() {
                if let Some(j) = window.index(w) {
                    if comp[j] == u32::MAX && !edges.contains(&Edge::new(v, w).unwrap()) {
                        comp[j] = n_comp;
                        queue.push_back(j);
                    }
                }
            }
        }
        n_comp += 1;
    }

    let mut outer: Option<u32> = None;
    for i in 0..n {
        if window.on_side(window.vertex(i)) {
            match outer {
                None => outer = Some(comp[i]),
                Some(c) if c != comp[i] => return Err(Error::NotABarrier),
                _ => {}
            }
        }
    }
    let outer = outer.expect("windows have sides");
    let mut barrier = Barrier { interior: BTreeSet::new(), exterior: BTreeSet::new() };
    for (i, &c) in comp.iter().enumerate() {
        if c == outer {
            barrier.exterior.insert(window.vertex(i));
        } else {
            barrier.interior.insert(window.vertex(i));
        }
    }
    if barrier.interior.is_empty() {
        return Err(Error::NotABarrier);
    }
    Ok(barrier)
}

const NONE: u32 = u32::MAX;

/// Flat-array view of a parallelogram used as a simulation domain: vertex
/// indices are row-major, edges are enumerated per vertex in the order
/// `(1,0)`, `(0,1)`, `(1,1)`.
#[derive(Clone, Debug)]
pub struct BoxLattice {
    region: Parallelogram,
    edges: Vec<[u32; 2]>,
    adj: Vec<[u32; 6]>,
    adj_edge: Vec<[u32; 6]>,
}

impl BoxLattice {
    pub fn new(region: Parallelogram) -> Self {
        let n = region.len();
        let mut edges = Vec::with_capacity(3 * n);
        let mut adj = vec![[NONE; 6]; n];
        let mut adj_edge = vec![[NONE; 6]; n];
        for i in 0..n {
            let v = region.vertex(i);
            for (dk, dl) in FORWARD {
                if let Some(j) = region.index(v.offset(dk, dl)) {
                    edges.push([i as u32, j as u32]);
                }
            }
        }
        let mut edge_of = alloc::collections::BTreeMap::new();
        for (e, &[i, j]) in edges.iter().enumerate() {
            edge_of.insert((i, j), e as u32);
        }
        for i in 0..n {
            let v = region.vertex(i);
            for (slot, (dk, dl)) in OFFSETS.iter().enumerate() {
                if let Some(j) = region.index(v.offset(*dk, *dl)) {
                    adj[i][slot] = j as u32;
                    let key = if i < j { (i as u32, j as u32) } else { (j as u32, i as u32) };
                    adj_edge[i][slot] = edge_of[&key];
                }
            }
        }
        BoxLattice { region, edges, adj, adj_edge }
    }

    #[inline]
    pub fn region(&self) -> Parallelogram {
        self.region
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> Vertex {
        self.region.vertex(i)
    }

    #[inline]
    pub fn index(&self, v: Vertex) -> Option<usize> {
        self.region.index(v)
    }

    #[inline]
    pub fn edge(&self, e: usize) -> (usize, usize) {
        let [i, j] = self.edges[e];
        (i as usize, j as usize)
    }

    pub fn edge_geometry(&self, e: usize) -> Edge {
        let (i, j) = self.edge(e);
        Edge::new(self.vertex(i), self.vertex(j)).expect("box edges are adjacent")
    }

    pub fn edge_id(&self, v: Vertex, w: Vertex) -> Option<usize> {
        let i = self.index(v)?;
        let j = self.index(w)?;
        self.neighbors(i).find(|&(nb, _)| nb == j).map(|(_, e)| e)
    }

    /// `(neighbour, edge id)` pairs in [`OFFSETS`] order.
    #[inline]
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj[i]
            .iter()
            .zip(self.adj_edge[i].iter())
            .filter(|(&j, _)| j != NONE)
            .map(|(&j, &e)| (j as usize, e as usize))
    }

    /// Neighbour in direction `slot` of [`OFFSETS`], if inside the box.
    #[inline]
    pub fn neighbor(&self, i: usize, slot: usize) -> Option<usize> {
        let j = self.adj[i][slot];
        (j != NONE).then_some(j as usize)
    }

    /// Whether vertex `i` lies on a side of the box.
    #[inline]
    pub fn on_boundary(&self, i: usize) -> bool {
        self.adj[i].contains(&NONE)
    }
}

/// A simulation box: an inner measurement parallelogram surrounded by a
/// buffer of `buffer` lattice spacings.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SimBox {
    pub outer: Parallelogram,
    pub inner: Parallelogram,
    pub buffer: u32,
}

impl SimBox {
    pub fn new(inner: Parallelogram, buffer: u32) -> Self {
        SimBox { outer: inner.expand(buffer), inner, buffer }
    }

    pub fn lattice(&self) -> BoxLattice {
        BoxLattice::new(self.outer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(k: i32, l: i32) -> Vertex {
        Vertex::new(k, l)
    }

    fn dist2(p: (f64, f64), q: (f64, f64)) -> f64 {
        (p.0 - q.0) * (p.0 - q.0) + (p.1 - q.1) * (p.1 - q.1)
    }

    #[test]
    fn neighbors_are_exactly_the_unit_distance_points() {
        let o = Vertex::ORIGIN;
        let nbs: BTreeSet<_> = o.neighbors().into_iter().collect();
        let expected: BTreeSet<_> =
            [v(1, 0), v(-1, 0), v(0, 1), v(0, -1), v(1, 1), v(-1, -1)].into_iter().collect();
        assert_eq!(nbs, expected);
        for dl in -3..=3 {
            for dk in -3..=3 {
                let w = v(dk, dl);
                let unit = (dist2(o.embed(), w.embed()) - 1.0).abs() < 1e-12;
                assert_eq!(unit, nbs.contains(&w), "{w}");
            }
        }
    }

    #[test]
    fn neighbors_truncated_in_box() {
        let dom = Domain::Within(Parallelogram::square(2));
        let got: BTreeSet<_> = dom.neighbors(Vertex::ORIGIN).into_iter().collect();
        let expected: BTreeSet<_> = [v(1, 0), v(0, 1), v(1, 1)].into_iter().collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn embedding_values() {
        let s3 = libm::sqrt(3.0);
        assert_eq!(v(0, 0).embed(), (0.0, 0.0));
        let (x, y) = v(0, 1).embed();
        assert!((x + 0.5).abs() < 1e-15 && (y - s3 / 2.0).abs() < 1e-15);
        let (x, y) = v(2, 3).embed();
        assert!((x - 0.5).abs() < 1e-15 && (y - 3.0 * s3 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn distances() {
        let o = Vertex::ORIGIN;
        assert_eq!(graph_distance(o, o), 0);
        assert_eq!(graph_distance(o, v(1, 1)), 1);
        assert_eq!(graph_distance(o, v(2, 1)), 2);
        assert_eq!(graph_distance(o, v(1, -1)), 2);
    }

    #[test]
    fn closed_form_distance_matches_bfs_in_boxes() {
        let p = Parallelogram::new(-2, 3, -1, 4).unwrap();
        let dom = Domain::Within(p);
        for x in p.vertices() {
            for y in p.vertices() {
                assert_eq!(dom.distance(x, y).unwrap(), graph_distance(x, y));
            }
        }
    }

    #[test]
    fn ball_sizes() {
        let o = Vertex::ORIGIN;
        assert_eq!(ball(o, 0).len(), 1);
        assert_eq!(ball(o, 1).len(), 7);
        assert_eq!(ball(o, 2).len(), 19);
    }

    #[test]
    fn boundaries() {
        let o = Vertex::ORIGIN;
        let single: BTreeSet<_> = [o].into_iter().collect();
        assert_eq!(vertex_boundary(&single), single);
        assert_eq!(edge_boundary(&single).len(), 6);

        let b2 = ball(o, 2);
        let shell: BTreeSet<_> = b2.iter().copied().filter(|w| graph_distance(o, *w) == 2).collect();
        assert_eq!(vertex_boundary(&b2), shell);

        let pair: BTreeSet<_> = [o, v(1, 0)].into_iter().collect();
        assert_eq!(edge_boundary(&pair).len(), 10);

        let sq = Parallelogram::s(3, 2);
        let all = sq.vertex_set();
        let sides: BTreeSet<_> = sq.vertices().filter(|w| sq.on_side(*w)).collect();
        assert_eq!(vertex_boundary(&all), sides);
    }

    #[test]
    fn barrier_cases() {
        let o = Vertex::ORIGIN;
        assert_eq!(classify_barrier(&BTreeSet::new(), &Domain::Infinite), Err(Error::NotABarrier));
        let star: BTreeSet<_> = [o].into_iter().collect();
        let b = classify_barrier(&edge_boundary(&star), &Domain::Infinite).unwrap();
        assert_eq!(b.interior, star);

        let dom = Domain::Within(Parallelogram::square(2));
        let b = classify_barrier(&edge_boundary(&[v(1, 1)].into_iter().collect()), &dom).unwrap();
        assert_eq!(b.interior, [v(1, 1)].into_iter().collect());

        // A single edge separates nothing.
        let one: BTreeSet<_> = [Edge::new(o, v(1, 0)).unwrap()].into_iter().collect();
        assert_eq!(classify_barrier(&one, &Domain::Infinite), Err(Error::NotABarrier));
    }

    #[test]
    fn transpose_is_an_automorphism() {
        for (dk, dl) in OFFSETS {
            let w = v(dk, dl).transpose();
            assert!(Vertex::ORIGIN.is_adjacent(w));
        }
        let s = Parallelogram::square(4);
        assert_eq!(s.transpose(), s);
        for (dk, dl) in OFFSETS {
            assert!(Vertex::ORIGIN.is_adjacent(v(dk, dl).reflect()));
        }
    }

    #[test]
    fn region_literals() {
        assert_eq!("S1,4,-2,3".parse::<Parallelogram>().unwrap(), Parallelogram::new(1, 4, -2, 3).unwrap());
        assert_eq!("S 8 24".parse::<Parallelogram>().unwrap(), Parallelogram::s(8, 24));
        assert!("S3,1,0,0".parse::<Parallelogram>().is_err());
        assert!("T 1 2".parse::<Parallelogram>().is_err());
    }

    #[test]
    fn box_lattice_counts_and_indexing() {
        let s = Parallelogram::s(2, 1);
        let lat = BoxLattice::new(s);
        assert_eq!(lat.len(), 6);
        assert_eq!(lat.n_edges(), 9);
        assert_eq!(BoxLattice::new(Parallelogram::s(1, 1)).n_edges(), 5);
        for i in 0..lat.len() {
            assert_eq!(lat.index(lat.vertex(i)), Some(i));
            for (j, e) in lat.neighbors(i) {
                let (x, y) = lat.edge(e);
                assert!((x, y) == (i, j) || (x, y) == (j, i));
                assert!(lat.vertex(i).is_adjacent(lat.vertex(j)));
            }
        }
        assert!(lat.on_boundary(0));
        let big = BoxLattice::new(Parallelogram::square(2));
        assert!(!big.on_boundary(big.index(v(1, 1)).unwrap()));
    }
}
