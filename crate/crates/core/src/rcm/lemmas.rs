//! Exact checks of the FKG-type domination inequalities and of conditional
//! independence across closed barriers.
//!
//! Edge-pattern inequalities are evaluated on ternary tables indexed by
//! patterns over all edges (digit 0 closed, 1 open, 2 unconstrained): the
//! probability of every cylinder event is one lookup after a ternary zeta
//! transform. A family of inequalities "for all s <= g" is then reduced to a
//! single comparison per `g` with a down-closure maximum.
//!
//! Inequalities quantified over all increasing spin events are reduced to a
//! minimum-weight up-set problem, solved as a maximum-weight closure with a
//! max-flow.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::exact::{DacTable, ExactModel, Neumaier};

/// Outcome of one family of inequality checks.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub checked: u64,
    pub violations: u64,
    /// The instance with the smallest `lhs - rhs`.
    pub worst_lhs: f64,
    pub worst_rhs: f64,
}

impl CheckReport {
    fn new() -> Self {
        CheckReport { checked: 0, violations: 0, worst_lhs: f64::NAN, worst_rhs: f64::NAN }
    }

    pub fn margin(&self) -> f64 {
        self.worst_lhs - self.worst_rhs
    }

    fn record(&mut self, lhs: f64, rhs: f64, tol: f64) {
        self.checked += 1;
        if lhs < rhs - tol {
            self.violations += 1;
        }
        if self.worst_lhs.is_nan() || lhs - rhs < self.margin() {
            self.worst_lhs = lhs;
            self.worst_rhs = rhs;
        }
    }

    pub fn merge(&mut self, other: &CheckReport) {
        self.checked += other.checked;
        self.violations += other.violations;
        if !other.worst_lhs.is_nan() && (self.worst_lhs.is_nan() || other.margin() < self.margin()) {
            self.worst_lhs = other.worst_lhs;
            self.worst_rhs = other.worst_rhs;
        }
    }
}

struct Ternary {
    m: usize,
    pow3: Vec<usize>,
    of_binary: Vec<usize>,
}

impl Ternary {
    fn new(m: usize) -> Self {
        let pow3: Vec<usize> = (0..=m).scan(1usize, |acc, _| {
            let v = *acc;
            *acc *= 3;
            Some(v)
        })
        .collect();
        let of_binary = (0..1usize << m)
            .map(|b| (0..m).filter(|j| b >> j & 1 == 1).map(|j| pow3[j]).sum())
            .collect();
        Ternary { m, pow3, of_binary }
    }

    fn size(&self) -> usize {
        self.pow3[self.m]
    }

    #[inline]
    fn digit(&self, t: usize, j: usize) -> usize {
        t / self.pow3[j] % 3
    }

    /// Cylinder masses from per-configuration masses.
    fn zeta(&self, binary: &[f64]) -> Vec<f64> {
        let mut t = vec![0.0; self.size()];
        for (b, &w) in binary.iter().enumerate() {
            t[self.of_binary[b]] = w;
        }
        for j in 0..self.m {
            let pj = self.pow3[j];
            for idx in 0..t.len() {
                if self.digit(idx, j) == 2 {
                    t[idx] = t[idx - pj] + t[idx - 2 * pj];
                }
            }
        }
        t
    }

    /// `out[t] = max over patterns reachable from t by 1 -> 0 flips (and, if
    /// `free_to_closed`, 2 -> 0 flips away from coordinate `keep`)`.
    fn down_max(&self, vals: &[f64], free_to_closed: bool, keep: usize) -> Vec<f64> {
        let mut out = vals.to_vec();
        for j in 0..self.m {
            let pj = self.pow3[j];
            for idx in 0..out.len() {
                match self.digit(idx, j) {
                    1 => out[idx] = out[idx].max(out[idx - pj]),
                    2 if free_to_closed && j != keep => out[idx] = out[idx].max(out[idx - 2 * pj]),
                    _ => {}
                }
            }
        }
        out
    }
}

/// `P(eta(e) = 1 | pattern)` for every pattern `t` leaving `e` free; NaN when
/// the pattern has probability zero.
fn conditional_open(tern: &Ternary, mass: &[f64], e: usize, out: &mut Vec<f64>) {
    out.clear();
    out.resize(mass.len(), f64::NAN);
    let pe = tern.pow3[e];
    for (t, &den) in mass.iter().enumerate() {
        if tern.digit(t, e) == 2 && den > 0.0 {
            out[t] = mass[t - pe] / den;
        }
    }
}

fn edge_masses(model: &ExactModel) -> Vec<f64> {
    model.probs().to_vec()
}

/// `nu(eta(e)=1 | eta = zeta on E) >= nu(eta(e)=1 | eta = psi on E)` for every
/// `E`, `e` outside `E` and `psi <= zeta`.
pub fn check_strong_fkg(model: &ExactModel, tol: f64) -> CheckReport {
    let m = model.graph().n_edges();
    let tern = Ternary::new(m);
    let mass = tern.zeta(&edge_masses(model));
    let mut rep = CheckReport::new();
    let mut cond = Vec::new();
    for e in 0..m {
        conditional_open(&tern, &mass, e, &mut cond);
        let filled: Vec<f64> = cond.iter().map(|&x| if x.is_nan() { f64::NEG_INFINITY } else { x }).collect();
        let best_below = tern.down_max(&filled, false, e);
        for t in 0..tern.size() {
            if tern.digit(t, e) == 2 && !cond[t].is_nan() {
                rep.record(cond[t], best_below[t], tol);
            }
        }
    }
    rep
}

/// For each edge `e` and pattern `g` leaving `e` free: the minimum over all
/// vertex sets `V` and spins `kappa` of `P(eta(e)=1 | A_g, I)`.
fn min_lhs_over_spin_events(model: &ExactModel, r: f64, tern: &Ternary) -> Vec<Vec<f64>> {
    let nv = model.graph().n_vertices();
    let m = model.graph().n_edges();
    let n_cfg = model.n_configs();
    let mut best = vec![vec![f64::INFINITY; tern.size()]; m];
    let mut cond = Vec::new();
    let clusters: Vec<Vec<u64>> = (0..n_cfg as u32).map(|eta| model.graph().clusters(eta)).collect();
    for vmask in 0u64..1 << nv {
        let cnt: Vec<i32> =
            clusters.iter().map(|cl| cl.iter().filter(|&&c| c & vmask != 0).count() as i32).collect();
        for c in [r, 1.0 - r] {
            if vmask == 0 && c != r {
                continue;
            }
            let w: Vec<f64> = (0..n_cfg).map(|eta| model.probs()[eta] * libm::pow(c, cnt[eta] as f64)).collect();
            let mass = tern.zeta(&w);
            for (e, best_e) in best.iter_mut().enumerate() {
                conditional_open(tern, &mass, e, &mut cond);
                for (b, &x) in best_e.iter_mut().zip(cond.iter()) {
                    if !x.is_nan() && x < *b {
                        *b = x;
                    }
                }
            }
        }
    }
    best
}

fn check_edgedom_family(model: &ExactModel, r: f64, tol: f64, with_closed_extra: bool) -> CheckReport {
    let m = model.graph().n_edges();
    let tern = Ternary::new(m);
    let mass = tern.zeta(&edge_masses(model));
    let lhs_all = min_lhs_over_spin_events(model, r, &tern);
    let mut rep = CheckReport::new();
    let mut rhs = Vec::new();
    for (e, lhs) in lhs_all.iter().enumerate() {
        conditional_open(&tern, &mass, e, &mut rhs);
        let filled: Vec<f64> = rhs.iter().map(|&x| if x.is_nan() { f64::NEG_INFINITY } else { x }).collect();
        let best_rhs = tern.down_max(&filled, with_closed_extra, e);
        for t in 0..tern.size() {
            if tern.digit(t, e) == 2 && lhs[t].is_finite() && best_rhs[t].is_finite() {
                rep.record(lhs[t], best_rhs[t], tol);
            }
        }
    }
    rep
}

/// `P(eta(e)=1 | A_g, I) >= P(eta(e)=1 | A_s)` for all `V`, `kappa`, `E`,
/// `s <= g` and `e` outside `E`.
pub fn check_edgedom(model: &ExactModel, r: f64, tol: f64) -> CheckReport {
    check_edgedom_family(model, r, tol, false)
}

/// As [`check_edgedom`] with the right-hand side further conditioned on an
/// arbitrary set `F` of extra closed edges.
pub fn check_edgedom2(model: &ExactModel, r: f64, tol: f64) -> CheckReport {
    check_edgedom_family(model, r, tol, true)
}

/// Maximum-weight closure under the order of spin masks restricted to
/// `coords`: returns `max over up-sets U of sum_{x in U} weight[x]`.
fn max_weight_upset(weight: &[f64], n_bits: usize) -> f64 {
    let n = weight.len();
    let source = n;
    let sink = n + 1;
    let mut g = FlowGraph::new(n + 2);
    let mut positive = Neumaier::default();
    for (x, &w) in weight.iter().enumerate() {
        if w > 0.0 {
            g.add(source, x, w);
            positive.add(w);
        } else if w < 0.0 {
            g.add(x, sink, -w);
        }
        for b in 0..n_bits {
            if x >> b & 1 == 0 {
                g.add(x, x | 1 << b, f64::INFINITY);
            }
        }
    }
    positive.total() - g.max_flow(source, sink)
}

struct FlowGraph {
    to: Vec<usize>,
    cap: Vec<f64>,
    head: Vec<Vec<usize>>,
}

impl FlowGraph {
    fn new(n: usize) -> Self {
        FlowGraph { to: Vec::new(), cap: Vec::new(), head: vec![Vec::new(); n] }
    }

    fn add(&mut self, a: usize, b: usize, c: f64) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0.0);
    }

    // Dinic.
    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        const EPS: f64 = 1e-300;
        let n = self.head.len();
        let mut flow = 0.0;
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut queue = alloc::collections::VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &id in &self.head[x] {
                    let y = self.to[id];
                    if self.cap[id] > EPS && level[y] == usize::MAX {
                        level[y] = level[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            if level[t] == usize::MAX {
                return flow;
            }
            let mut it = vec![0usize; n];
            loop {
                let f = self.augment(s, t, f64::INFINITY, &level, &mut it);
                if f <= EPS {
                    break;
                }
                flow += f;
            }
        }
    }

    fn augment(&mut self, x: usize, t: usize, limit: f64, level: &[usize], it: &mut [usize]) -> f64 {
        if x == t {
            return limit;
        }
        while it[x] < self.head[x].len() {
            let id = self.head[x][it[x]];
            let y = self.to[id];
            if self.cap[id] > 1e-300 && level[y] == level[x] + 1 {
                let f = self.augment(y, t, limit.min(self.cap[id]), level, it);
                if f > 0.0 {
                    self.cap[id] -= f;
                    self.cap[id ^ 1] += f;
                    return f;
                }
            }
            it[x] += 1;
        }
        0.0
    }
}

/// Compress the spins in `coords` (a vertex mask) into a dense index.
fn compress(sigma: u64, coords: &[usize]) -> usize {
    coords.iter().enumerate().fold(0, |acc, (i, &v)| acc | ((sigma >> v & 1) as usize) << i)
}

fn bits_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Law of the spins on `coords` given `cond`, as a dense vector.
fn spin_law(table: &DacTable, w: &[f64], coords: &[usize], cond: impl Fn(u32, u64) -> bool) -> Option<Vec<f64>> {
    let mut acc = vec![Neumaier::default(); 1 << coords.len()];
    let mut total = Neumaier::default();
    for i in 0..table.len() {
        if cond(table.eta[i], table.sigma[i]) {
            acc[compress(table.sigma[i], coords)].add(w[i]);
            total.add(w[i]);
        }
    }
    let z = total.total();
    (z > 0.0).then(|| acc.iter().map(|a| a.total() / z).collect())
}

/// Minimum over increasing events `D` on `coords` of `mu1(D) - mu2(D)`.
fn min_increasing_gap(mu1: &[f64], mu2: &[f64], n_bits: usize) -> f64 {
    let w: Vec<f64> = mu1.iter().zip(mu2).map(|(a, b)| b - a).collect();
    -max_weight_upset(&w, n_bits)
}

fn connected_sets(model: &ExactModel) -> Vec<u64> {
    let nv = model.graph().n_vertices();
    (1u64..1 << nv).filter(|&m| model.graph().is_connected(m)).collect()
}

/// For every connected `V` with `B = ΔV`: `P(D | C(B)) >= P(D | I)` for all
/// increasing `D`, where `I` = all of `V` negative.
pub fn check_barrin(model: &ExactModel, r: f64, tol: f64) -> CheckReport {
    let table = DacTable::new(model);
    let w = table.weights(r);
    let nv = model.graph().n_vertices();
    let all: Vec<usize> = (0..nv).collect();
    let mut rep = CheckReport::new();
    for vmask in connected_sets(model) {
        let b = model.graph().edge_boundary(vmask);
        let (Some(mu_c), Some(mu_i)) = (
            spin_law(&table, &w, &all, |eta, _| eta & b == 0),
            spin_law(&table, &w, &all, |_, s| s & vmask == 0),
        ) else {
            continue;
        };
        let gap = min_increasing_gap(&mu_c, &mu_i, nv);
        rep.record(gap, 0.0, tol);
    }
    rep
}

/// For every connected `V` with `B = ΔV` and every increasing `D` depending on
/// the spins outside `V`: `P(D | C(B), I) >= P(D | I)`.
pub fn check_barrinwh(model: &ExactModel, r: f64, tol: f64) -> CheckReport {
    let table = DacTable::new(model);
    let w = table.weights(r);
    let nv = model.graph().n_vertices();
    let full = if nv == 64 { u64::MAX } else { (1u64 << nv) - 1 };
    let mut rep = CheckReport::new();
    for vmask in connected_sets(model) {
        let ext = bits_of(full & !vmask);
        if ext.is_empty() {
            continue;
        }
        let b = model.graph().edge_boundary(vmask);
        let (Some(mu_ci), Some(mu_i)) = (
            spin_law(&table, &w, &ext, |eta, s| eta & b == 0 && s & vmask == 0),
            spin_law(&table, &w, &ext, |_, s| s & vmask == 0),
        ) else {
            continue;
        };
        let gap = min_increasing_gap(&mu_ci, &mu_i, ext.len());
        rep.record(gap, 0.0, tol);
    }
    rep
}

/// Edge states and spins of one side of a barrier.
type Atom = (u32, u64);

/// Total variation-type distance between the joint law of (interior, exterior)
/// atoms and the product of their marginals, given that every edge of
/// `barrier` is closed. Atoms are the edge states inside each side together
/// with the spins of that side. Returns `None` if `C(B)` has probability zero.
pub fn conditional_dependence(table: &DacTable, w: &[f64], model: &ExactModel, interior: u64, barrier: u32) -> Option<f64> {
    let g = model.graph();
    let nv = g.n_vertices();
    let full = if nv == 64 { u64::MAX } else { (1u64 << nv) - 1 };
    let exterior = full & !interior;
    let e_int = g.induced_edges(interior);
    let e_ext = g.induced_edges(exterior);
    let mut joint: BTreeMap<(Atom, Atom), Neumaier> = BTreeMap::new();
    let mut total = Neumaier::default();
    for i in 0..table.len() {
        if table.eta[i] & barrier != 0 {
            continue;
        }
        let a = (table.eta[i] & e_int, table.sigma[i] & interior);
        let b = (table.eta[i] & e_ext, table.sigma[i] & exterior);
        joint.entry((a, b)).or_default().add(w[i]);
        total.add(w[i]);
    }
    let z = total.total();
    if z <= 0.0 {
        return None;
    }
    let mut pa: BTreeMap<Atom, f64> = BTreeMap::new();
    let mut pb: BTreeMap<Atom, f64> = BTreeMap::new();
    for (&(a, b), v) in &joint {
        *pa.entry(a).or_default() += v.total() / z;
        *pb.entry(b).or_default() += v.total() / z;
    }
    let mut dist = Neumaier::default();
    for (a, &x) in &pa {
        for (b, &y) in &pb {
            let j = joint.get(&(*a, *b)).map_or(0.0, |v| v.total() / z);
            dist.add(libm::fabs(j - x * y));
        }
    }
    Some(dist.total())
}

/// Conditional independence across `B = ΔV` for every connected proper `V`.
/// The reported `lhs` is `-distance`, so a violation means distance > tol.
pub fn check_conditional_independence(model: &ExactModel, r: f64, tol: f64) -> CheckReport {
    let table = DacTable::new(model);
    let w = table.weights(r);
    let nv = model.graph().n_vertices();
    let full = if nv == 64 { u64::MAX } else { (1u64 << nv) - 1 };
    let mut rep = CheckReport::new();
    for vmask in connected_sets(model) {
        if vmask == full {
            continue;
        }
        let b = model.graph().edge_boundary(vmask);
        if let Some(d) = conditional_dependence(&table, &w, model, vmask, b) {
            rep.record(-d, 0.0, tol);
        }
    }
    rep
}
