//! The q = 2 random-cluster measure on finite boxes.
//!
//! Samples come from Swendsen-Wang dynamics with free boundary conditions and a
//! symmetric internal colouring; the Divide-and-Colour parameter `r` is never
//! seen here. [`exact`] holds the exhaustive oracle for tiny graphs and
//! [`lemmas`] the domination and conditional-independence checks built on it.

pub mod exact;
pub mod lemmas;

use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::BoxLattice;
use crate::rng::{Purpose, StreamRng};
use crate::unionfind::UnionFind;
use crate::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RcmParams {
    pub beta: f64,
    pub p: f64,
    pub q: f64,
}

impl RcmParams {
    /// `q = 2`, `p = 1 - exp(-beta)`.
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::OutOfRange { name: "beta", value: beta });
        }
        Ok(RcmParams { beta, p: -libm::expm1(-beta), q: 2.0 })
    }

    /// Oracle-only parametrisation by edge density and cluster weight.
    pub fn from_p(p: f64, q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::OutOfRange { name: "p", value: p });
        }
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::OutOfRange { name: "q", value: q });
        }
        Ok(RcmParams { beta: -libm::log1p(-p), p, q })
    }
}

/// One bit per box edge, in [`BoxLattice`] edge order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeConfig {
    words: Vec<u64>,
    len: usize,
}

impl EdgeConfig {
    pub fn closed(len: usize) -> Self {
        EdgeConfig { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn open(len: usize) -> Self {
        let mut c = Self::closed(len);
        for e in 0..len {
            c.set(e, true);
        }
        c
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut c = Self::closed(bits.len());
        for (e, &b) in bits.iter().enumerate() {
            c.set(e, b);
        }
        c
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, e: usize) -> bool {
        self.words[e / 64] >> (e % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, e: usize, open: bool) {
        let m = 1u64 << (e % 64);
        if open {
            self.words[e / 64] |= m;
        } else {
            self.words[e / 64] &= !m;
        }
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn count_open(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |e| self.get(e))
    }
}

/// State of one Swendsen-Wang chain on a fixed box.
#[derive(Clone, Debug)]
pub struct ChainState {
    /// `true` for spin +1.
    pub spins: Vec<bool>,
    pub eta: EdgeConfig,
    pub sweep: u32,
    chain: u32,
    rng: StreamRng,
    uf: UnionFind,
    root_spin: Vec<bool>,
}

impl ChainState {
    /// Cold start: all spins +1, all edges closed.
    pub fn new(lat: &BoxLattice, seed: u64, chain: u32) -> Self {
        ChainState {
            spins: vec![true; lat.len()],
            eta: EdgeConfig::closed(lat.n_edges()),
            sweep: 0,
            chain,
            rng: StreamRng::new(seed),
            uf: UnionFind::new(lat.len()),
            root_spin: vec![false; lat.len()],
        }
    }

    pub fn chain(&self) -> u32 {
        self.chain
    }

    /// One full alternation. Afterwards `eta` is the bond configuration drawn
    /// from the old spins and `spins` is the fresh cluster colouring of `eta`.
    pub fn sweep(&mut self, lat: &BoxLattice, params: &RcmParams) {
        let s = self.sweep;
        self.eta.clear();
        if params.p > 0.0 {
            for e in 0..lat.n_edges() {
                let (i, j) = lat.edge(e);
                if self.spins[i] == self.spins[j]
                    && self.rng.uniform(Purpose::Bond, self.chain, s, e as u32) < params.p
                {
                    self.eta.set(e, true);
                }
            }
        }

        self.uf.reset();
        for e in 0..lat.n_edges() {
            if self.eta.get(e) {
                let (i, j) = lat.edge(e);
                self.uf.union(i, j);
            }
        }
        // Roots are the smallest index of their cluster, so a root is visited
        // before every other member.
        for i in 0..lat.len() {
            let root = self.uf.find(i);
            if root == i {
                self.root_spin[i] =
                    self.rng.uniform(Purpose::ClusterSpin, self.chain, s, i as u32) < 0.5;
            }
            self.spins[i] = self.root_spin[root];
        }
        self.sweep += 1;
        debug_assert!(self.is_consistent(lat));
    }

    /// Every open edge joins equal spins.
    pub fn is_consistent(&self, lat: &BoxLattice) -> bool {
        (0..lat.n_edges()).all(|e| {
            let (i, j) = lat.edge(e);
            !self.eta.get(e) || self.spins[i] == self.spins[j]
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub burn_in: u32,
    pub thin: u32,
    pub count: u32,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { burn_in: 200, thin: 10, count: 1 }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in == 0 {
            return Err(Error::ZeroSweeps { name: "burn_in" });
        }
        if self.thin == 0 {
            return Err(Error::ZeroSweeps { name: "thin" });
        }
        Ok(())
    }
}

/// Run one chain and hand every retained configuration to `visit`.
pub fn run_chain(
    lat: &BoxLattice,
    params: &RcmParams,
    schedule: Schedule,
    seed: u64,
    chain: u32,
    mut visit: impl FnMut(u32, &ChainState),
) -> Result<()> {
    schedule.validate()?;
    let mut state = ChainState::new(lat, seed, chain);
    for _ in 0..schedule.burn_in {
        state.sweep(lat, params);
    }
    for i in 0..schedule.count {
        for _ in 0..schedule.thin {
            state.sweep(lat, params);
        }
        visit(i, &state);
    }
    Ok(())
}

/// `count` configurations, one every `thin` sweeps after `burn_in` sweeps of a
/// cold-started chain 0.
pub fn sample_fk(
    lat: &BoxLattice,
    params: &RcmParams,
    schedule: Schedule,
    seed: u64,
) -> Result<Vec<EdgeConfig>> {
    let mut out = Vec::with_capacity(schedule.count as usize);
    run_chain(lat, params, schedule, seed, 0, |_, s| out.push(s.eta.clone()))?;
    Ok(out)
}
