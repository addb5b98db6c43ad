//! Parallel Swendsen-Wang chains producing Divide-and-Colour samples.

use rayon::prelude::*;
use serde::Serialize;
use tridac_core::dac::{ClusterExtents, DacSample};
use tridac_core::lattice::{BoxLattice, Parallelogram, SimBox};
use tridac_core::rcm::{run_chain, EdgeConfig, RcmParams, Schedule};

use crate::error::{Error, Result};
use crate::stats::integrated_autocorr;

/// Fraction of samples with a spanning FK cluster above which a run aborts.
pub const GUARD_FRACTION: f64 = 0.01;

/// Smallest buffer ever used by default.
pub const MIN_BUFFER: u32 = 16;

/// `max(ceil(2 / psi), 16)`; `psi = inf` (no decay to fit) gives 16.
pub fn default_buffer(psi: f64) -> u32 {
    if psi.is_finite() && psi > 0.0 {
        ((2.0 / psi).ceil() as u32).max(MIN_BUFFER)
    } else {
        MIN_BUFFER
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct RunSpec {
    pub beta: f64,
    pub inner: Parallelogram,
    pub buffer: u32,
    pub burn_in: u32,
    pub thin: u32,
    /// Retained samples per chain.
    pub samples: u32,
    pub chains: u32,
    pub seed: u64,
}

impl RunSpec {
    pub fn sim_box(&self) -> SimBox {
        SimBox::new(self.inner, self.buffer)
    }

    pub fn validate(&self) -> Result<()> {
        RcmParams::new(self.beta)?;
        Schedule { burn_in: self.burn_in, thin: self.thin, count: self.samples }.validate()?;
        if self.chains == 0 {
            return Err(Error::Config("chains: must be at least 1".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples: must be at least 1".into()));
        }
        Ok(())
    }
}

/// What a measurement sees.
pub struct Sampled<'a> {
    pub lattice: &'a BoxLattice,
    pub inner: Parallelogram,
    pub sample: &'a DacSample,
    pub chain: u32,
    pub index: u32,
}

#[derive(Clone, Debug)]
pub struct RunOutput<T> {
    /// Measurements by chain, in sample order.
    pub chains: Vec<Vec<T>>,
    /// Largest per-chain integrated autocorrelation time of the edge density,
    /// in units of retained samples.
    pub tau_int: f64,
    pub spanning_fraction: f64,
}

impl<T> RunOutput<T> {
    pub fn total(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Vec<Vec<U>> {
        self.chains.iter().map(|c| c.iter().map(&f).collect()).collect()
    }
}

/// `chain << 32 | index`.
pub fn sample_id(chain: u32, index: u32) -> u64 {
    (chain as u64) << 32 | index as u64
}

/// Whether some FK cluster meets both the inner region and the box boundary.
pub fn spans_buffer(lat: &BoxLattice, inner: Parallelogram, sample: &DacSample) -> bool {
    let ext = ClusterExtents::new(lat, &sample.clusters);
    inner.vertices().any(|v| ext.touches_boundary(sample.clusters.number(lat.index(v).unwrap())))
}

/// Run `spec.chains` chains in parallel and apply `measure` to every retained
/// sample. At `beta = 0` no chain is run: every edge is closed.
pub fn run<T: Send>(spec: &RunSpec, measure: impl Fn(&Sampled) -> T + Sync) -> Result<RunOutput<T>> {
    spec.validate()?;
    let params = RcmParams::new(spec.beta)?;
    let lat = spec.sim_box().lattice();
    let schedule = Schedule { burn_in: spec.burn_in, thin: spec.thin, count: spec.samples };
    let per_chain: Vec<Result<(Vec<T>, f64, u32)>> = (0..spec.chains)
        .into_par_iter()
        .map(|chain| {
            let mut values = Vec::with_capacity(spec.samples as usize);
            let mut density = Vec::with_capacity(spec.samples as usize);
            let mut spanning = 0;
            let mut visit = |index: u32, eta: EdgeConfig| {
                density.push(eta.count_open() as f64 / eta.len().max(1) as f64);
                let sample = DacSample::new(&lat, eta, spec.seed, sample_id(chain, index));
                if params.p > 0.0 && spec.buffer > 0 && spans_buffer(&lat, spec.inner, &sample) {
                    spanning += 1;
                }
                values.push(measure(&Sampled { lattice: &lat, inner: spec.inner, sample: &sample, chain, index }));
            };
            if params.p == 0.0 {
                for index in 0..spec.samples {
                    visit(index, EdgeConfig::closed(lat.n_edges()));
                }
            } else {
                run_chain(&lat, &params, schedule, spec.seed, chain, |index, state| visit(index, state.eta.clone()))?;
            }
            Ok((values, integrated_autocorr(&density), spanning))
        })
        .collect();
    let mut chains = Vec::with_capacity(per_chain.len());
    let mut tau_int = 0.5f64;
    let mut spanning = 0u64;
    for r in per_chain {
        let (values, tau, span) = r?;
        chains.push(values);
        tau_int = tau_int.max(tau);
        spanning += span as u64;
    }
    let total = (spec.chains as u64 * spec.samples as u64) as f64;
    let spanning_fraction = spanning as f64 / total;
    if spanning_fraction > GUARD_FRACTION {
        return Err(Error::Subcritical { fraction: spanning_fraction, beta: spec.beta });
    }
    if tau_int > 1.0 {
        log::warn!(
            "integrated autocorrelation time of the edge density is {:.2} retained samples; thin = {} sweeps is below it",
            tau_int,
            spec.thin
        );
    }
    Ok(RunOutput { chains, tau_int, spanning_fraction })
}
