//! Estimators built on [`crate::sampler`]: crossing probabilities, Theta
//! curves, the r_c locator, tail fits, the finite-size criterion, cut-point
//! growth and the uniqueness probe.

use std::collections::VecDeque;

use serde::Serialize;
use tridac_core::analysis::{
    bottleneck, crossing_regions, fk_hull, has_crossing, lowest_crossing, CrossingSpec, Direction, Path, Sign,
};
use tridac_core::cutpoints::{cut_points, cut_points_in, packed_count, pivotal_clusters, PackingMode};
use tridac_core::dac::{dependence_ranges, DacSample};
use tridac_core::lattice::{graph_distance, BoxLattice, Parallelogram, Vertex};
use tridac_core::rng::{Purpose, StreamRng};

use crate::error::{Error, Result};
use crate::sampler::{default_buffer, run, RunSpec, Sampled, MIN_BUFFER};
use crate::stats::{fit_tail, Estimate, TailFit};

/// Shared description of a finished run.
#[derive(Clone, Debug, Serialize)]
pub struct RunInfo {
    pub spec: RunSpec,
    pub tau_int: f64,
    pub spanning_fraction: f64,
}

fn check_inside(spec: &RunSpec, region: &Parallelogram, what: &str) -> Result<()> {
    if spec.inner.contains_region(region) {
        Ok(())
    } else {
        Err(Error::Config(format!("{what}: {region} does not fit inside the measurement window {}", spec.inner)))
    }
}

fn check_r(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Config(format!("r: {r} is outside [0, 1]")))
    }
}

/// Middle vertex of a parallelogram (rounded down).
pub fn center(region: &Parallelogram) -> Vertex {
    Vertex::new(region.a + (region.b - region.a) / 2, region.c + (region.d - region.c) / 2)
}

/// Colour threshold of a crossing event. For `+` crossings the event holds at
/// `r` iff `t < r`; for `-` crossings iff `r <= t`.
pub fn crossing_threshold(sample: &DacSample, lat: &BoxLattice, spec: &CrossingSpec) -> f64 {
    let (sources, targets): (Vec<Vertex>, Vec<Vertex>) = {
        let g = spec.region;
        match spec.direction {
            Direction::Horizontal => (
                (g.c..=g.d).map(|l| Vertex::new(g.a, l)).collect(),
                (g.c..=g.d).map(|l| Vertex::new(g.b, l)).collect(),
            ),
            Direction::Vertical => (
                (g.a..=g.b).map(|k| Vertex::new(k, g.d)).collect(),
                (g.a..=g.b).map(|k| Vertex::new(k, g.c)).collect(),
            ),
        }
    };
    let mark = |v: Vertex| sample.mark(lat.index(v).expect("region inside box"));
    let best = |b: Vec<f64>| targets.iter().map(|&t| b[spec.region.index(t).unwrap()]).fold(f64::INFINITY, f64::min);
    match spec.sign {
        Sign::Plus => best(bottleneck(spec.region, mark, &sources)),
        // maximin of marks = -(minimax of negated marks)
        Sign::Minus => -best(bottleneck(spec.region, |v| -mark(v), &sources)),
    }
}

pub fn holds_at(sign: Sign, threshold: f64, r: f64) -> bool {
    match sign {
        Sign::Plus => threshold < r,
        Sign::Minus => r <= threshold,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossingResult {
    pub r: f64,
    pub spec: CrossingSpec,
    pub estimate: Estimate,
    #[serde(skip)]
    pub indicators: Vec<Vec<bool>>,
    pub info: RunInfo,
}

pub fn crossing_prob(spec: &RunSpec, r: f64, event: CrossingSpec, fingerprint: &str) -> Result<CrossingResult> {
    check_r(r)?;
    check_inside(spec, &event.region, "region")?;
    let out = run(spec, |s| has_crossing(&s.sample.color(r), &event))?;
    let estimate = Estimate::from_indicators(&out.chains, spec.seed, fingerprint);
    Ok(CrossingResult {
        r,
        spec: event,
        estimate,
        indicators: out.chains,
        info: RunInfo { spec: *spec, tau_int: out.tau_int, spanning_fraction: out.spanning_fraction },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaPoint {
    pub r: f64,
    pub m: u32,
    pub estimate: Estimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaResult {
    pub origin: Vertex,
    pub points: Vec<ThetaPoint>,
    /// Per sample, per radius: the smallest `r` at which the origin's
    /// `(+)`-cluster reaches the sphere (event holds iff threshold < r).
    #[serde(skip)]
    pub thresholds: Vec<Vec<Vec<f64>>>,
    pub info: RunInfo,
}

/// `P(origin's (+)-cluster meets the sphere of radius m)` on the grid
/// `r_grid x m_grid`, all from the same samples.
pub fn theta_curve(spec: &RunSpec, r_grid: &[f64], m_grid: &[u32], fingerprint: &str) -> Result<ThetaResult> {
    for &r in r_grid {
        check_r(r)?;
    }
    let origin = center(&spec.inner);
    let room = [origin.k - spec.inner.a, spec.inner.b - origin.k, origin.l - spec.inner.c, spec.inner.d - origin.l];
    let max_m = m_grid.iter().copied().max().unwrap_or(0);
    if room.iter().any(|&x| x < max_m as i32) {
        return Err(Error::Config(format!("m: radius {max_m} does not fit around {origin} in {}", spec.inner)));
    }
    let out = run(spec, |s| {
        let weight = |v: Vertex| s.sample.mark(s.lattice.index(v).unwrap());
        let b = bottleneck(spec.inner, weight, &[origin]);
        let mut sphere = vec![f64::INFINITY; max_m as usize + 1];
        for (i, v) in spec.inner.vertices().enumerate() {
            let d = graph_distance(origin, v);
            if d <= max_m {
                sphere[d as usize] = sphere[d as usize].min(b[i]);
            }
        }
        m_grid.iter().map(|&m| sphere[m as usize]).collect::<Vec<f64>>()
    })?;
    let mut points = Vec::new();
    for &r in r_grid {
        for (j, &m) in m_grid.iter().enumerate() {
            let ind: Vec<Vec<bool>> = out.map(|t| t[j] < r);
            points.push(ThetaPoint { r, m, estimate: Estimate::from_indicators(&ind, spec.seed, fingerprint) });
        }
    }
    Ok(ThetaResult {
        origin,
        points,
        thresholds: out.chains.clone(),
        info: RunInfo { spec: *spec, tau_int: out.tau_int, spanning_fraction: out.spanning_fraction },
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RcShape {
    /// `V+` of `S_{n,3n}`.
    Tall,
    /// `H+` of `S_{n,n}`.
    Square,
}

impl RcShape {
    pub fn event(self, n: u32) -> CrossingSpec {
        match self {
            RcShape::Tall => CrossingSpec::new(Parallelogram::s(n, 3 * n), Direction::Vertical, Sign::Plus),
            RcShape::Square => CrossingSpec::new(Parallelogram::square(n), Direction::Horizontal, Sign::Plus),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RcResult {
    pub n: u32,
    pub shape: RcShape,
    pub r_hat: f64,
    /// Bootstrap standard error over chains.
    pub se: f64,
    /// `r` where the crossing curve reaches 1/4 and 3/4.
    pub r_lower: f64,
    pub r_upper: f64,
    pub bootstrap: u32,
    #[serde(skip)]
    pub thresholds: Vec<Vec<f64>>,
    pub info: RunInfo,
}

impl RcResult {
    /// Width of the transition window `r(3/4) - r(1/4)`.
    pub fn window(&self) -> f64 {
        self.r_upper - self.r_lower
    }
}

/// Bisection for the `r` at which the empirical curve `r -> #{t < r} / N`
/// first reaches `level`. The curve is a nondecreasing step function because
/// the samples are coupled in `r`.
pub fn bisect_level(thresholds: &[f64], level: f64) -> f64 {
    let n = thresholds.len() as f64;
    let curve = |r: f64| thresholds.iter().filter(|&&t| t < r).count() as f64 / n;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if curve(hi) < level {
        return 1.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if curve(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

pub const DEFAULT_BOOTSTRAP: u32 = 200;

pub fn rc_locator(spec: &RunSpec, n: u32, shape: RcShape, bootstrap: u32) -> Result<RcResult> {
    let event = shape.event(n);
    check_inside(spec, &event.region, "n")?;
    let out = run(spec, |s| crossing_threshold(s.sample, s.lattice, &event))?;
    let flat: Vec<f64> = out.chains.iter().flatten().copied().collect();
    let r_hat = bisect_level(&flat, 0.5);
    let rng = StreamRng::new(spec.seed);
    let m = out.chains.len();
    let mut boot = Vec::with_capacity(bootstrap as usize);
    for b in 0..bootstrap {
        let mut pick = Vec::with_capacity(flat.len());
        for j in 0..m {
            let u = rng.uniform(Purpose::Bootstrap, 0, b, j as u32);
            pick.extend_from_slice(&out.chains[((u * m as f64) as usize).min(m - 1)]);
        }
        boot.push(bisect_level(&pick, 0.5));
    }
    let se = if boot.len() > 1 {
        let mean = boot.iter().sum::<f64>() / boot.len() as f64;
        (boot.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (boot.len() - 1) as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok(RcResult {
        n,
        shape,
        r_hat,
        se,
        r_lower: bisect_level(&flat, 0.25),
        r_upper: bisect_level(&flat, 0.75),
        bootstrap,
        thresholds: out.chains.clone(),
        info: RunInfo { spec: *spec, tau_int: out.tau_int, spanning_fraction: out.spanning_fraction },
    })
}

/// Grid of origins with spacing `spacing`, kept `margin` away from the sides.
pub fn origin_grid(region: &Parallelogram, spacing: u32, margin: u32) -> Vec<Vertex> {
    let s = spacing.max(1) as usize;
    let m = margin as i32;
    let mut out = Vec::new();
    for l in (region.c + m..=region.d - m).step_by(s) {
        for k in (region.a + m..=region.b - m).step_by(s) {
            out.push(Vertex::new(k, l));
        }
    }
    out
}

/// Sizes of the `(+)`-clusters inside `window` of the given origins, and
/// whether each touches a side of the window.
fn plus_cluster_sizes(s: &Sampled, r: f64, window: &Parallelogram, origins: &[Vertex]) -> Vec<(u64, bool)> {
    let plus = |v: Vertex| s.sample.mark(s.lattice.index(v).unwrap()) < r;
    let mut label = vec![u32::MAX; window.len()];
    let mut info: Vec<(u64, bool)> = Vec::new();
    let mut queue = VecDeque::new();
    origins
        .iter()
        .map(|&o| {
            if !plus(o) {
                return (0, false);
            }
            let i = window.index(o).unwrap();
            if label[i] == u32::MAX {
                let c = info.len() as u32;
                label[i] = c;
                queue.push_back(o);
                let (mut size, mut touches) = (0u64, false);
                while let Some(v) = queue.pop_front() {
                    size += 1;
                    touches |= window.on_side(v);
                    for w in v.neighbors() {
                        if let Some(j) = window.index(w) {
                            if label[j] == u32::MAX && plus(w) {
                                label[j] = c;
                                queue.push_back(w);
                            }
                        }
                    }
                }
                info.push((size, touches));
            }
            info[label[i] as usize]
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterTailResult {
    pub r: f64,
    pub fit: TailFit,
    pub mean_size: Estimate,
    pub origins_per_sample: usize,
    #[serde(skip)]
    pub sizes: Vec<Vec<Vec<u64>>>,
    pub info: RunInfo,
}

/// Tail of `|C+(origin)|` measured inside the window from a grid of origins.
pub fn cluster_tail(spec: &RunSpec, r: f64, spacing: u32, fingerprint: &str) -> Result<ClusterTailResult> {
    check_r(r)?;
    let window = spec.inner;
    let origins = origin_grid(&window, spacing, 0);
    let out = run(spec, |s| plus_cluster_sizes(s, r, &window, &origins))?;
    let sizes: Vec<Vec<Vec<u64>>> = out.map(|v| v.iter().map(|x| x.0).collect());
    let values: Vec<u64> = sizes.iter().flatten().flatten().copied().collect();
    let truncated = out.chains.iter().flatten().flatten().filter(|x| x.1).count() as u64;
    let fit = fit_tail(&values, 1, truncated);
    let means: Vec<Vec<f64>> = sizes
        .iter()
        .map(|c| c.iter().map(|v| v.iter().sum::<u64>() as f64 / v.len().max(1) as f64).collect())
        .collect();
    Ok(ClusterTailResult {
        r,
        fit,
        mean_size: Estimate::from_chains(&means, spec.seed, fingerprint),
        origins_per_sample: origins.len(),
        sizes,
        info: RunInfo { spec: *spec, tau_int: out.tau_int, spanning_fraction: out.spanning_fraction },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RangeTailResult {
    pub fit: TailFit,
    /// `psi = -slope`; infinite when every range is 0.
    pub psi: f64,
    #[serde(skip)]
    pub ranges: Vec<Vec<Vec<Option<u32>>>>,
    pub info: RunInfo,
}

/// Tail of the dependence range `D(v)` over a grid of window vertices.
pub fn fk_range_tail(spec: &RunSpec, spacing: u32) -> Result<RangeTailResult> {
    let window = spec.inner;
    let origins = origin_grid(&window, spacing, 0);
    let out = run(spec, |s| {
        let all = dependence_ranges(s.lattice, &s.sample.clusters, window);
        origins.iter().map(|&v| all[window.index(v).unwrap()]).collect::<Vec<_>>()
    })?;
    let flat: Vec<Option<u32>> = out.chains.iter().flatten().flatten().copied().collect();
    let values: Vec<u64> = flat.iter().flatten().map(|&d| d as u64).collect();
    let truncated = flat.iter().filter(|d| d.is_none()).count() as u64;
    let fit = fit_tail(&values, 0, truncated);
    let psi = if values.iter().all(|&d| d == 0) {
        f64::INFINITY
    } else {
        -fit.slope
    };
    Ok(RangeTailResult {
        fit,
        psi,
        ranges: out.chains.clone(),
        info: RunInfo { spec: *spec, tau_int: out.tau_int, spanning_fraction: out.spanning_fraction },
    })
}

/// Buffer `max(ceil(2 / psi), 16)` from a short pilot fit of the
/// dependence-range tail on `S_{16,16}`; 16 at `beta = 0`.
pub fn pilot_buffer(beta: f64, seed: u64) -> Result<u32> {
    if beta == 0.0 {
        return Ok(MIN_BUFFER);
    }
    let pilot = RunSpec { beta, inner: Parallelogram::square(16), buffer: MIN_BUFFER, burn_in: 100, thin: 5, samples: 50, chains: 2, seed };
    let fit = fk_range_tail(&pilot, 2)?;
    let b = default_buffer(fit.psi);
    log::info!("pilot decay rate {} gives buffer {b}", crate::output::fmt17(fit.psi));
    Ok(b)
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteSizeReport {
    pub n: u32,
    pub epsilon: f64,
    pub r: f64,
    /// `(N+1)(3N+1) nu(D(0) >= N/3)`, estimated as the mean number of window
    /// vertices with a range of at least `N/3`.
    pub range_side: Estimate,
    /// Upper confidence value used in the comparison.
    pub range_upper: f64,
    pub crossing_side: Estimate,
    /// Lower confidence value used in the comparison.
    pub crossing_lower: f64,
    pub range_ok: bool,
    pub crossing_ok: bool,
    pub pass: bool,
    pub info: RunInfo,
}

/// Evaluates `(N+1)(3N+1) nu(D(0) >= N/3) <= eps` and `P(V+_{N,3N}) > 1 - eps`
/// with two-standard-error margins; an all-zero (all-one) sample uses the
/// bound `3 / samples` instead.
pub fn finite_size_check(spec: &RunSpec, n: u32, epsilon: f64, r: f64, fingerprint: &str) -> Result<FiniteSizeReport> {
    check_r(r)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon: {epsilon} is outside (0, 1)")));
    }
    let region = Parallelogram::s(n, 3 * n);
    check_inside(spec, &region, "n")?;
    let event = CrossingSpec::new(region, Direction::Vertical, Sign::Plus);
    let out = run(spec, |s| {
        let ranges = dependence_ranges(s.lattice, &s.sample.clusters, region);
        // A cluster reaching the box boundary counts as far-reaching.
        let far = ranges.iter().filter(|d| d.is_none_or(|d| 3 * d >= n)).count() as f64;
        (far, has_crossing(&s.sample.color(r), &event))
    })?;
    let total = out.total() as f64;
    let range_side = Estimate::from_chains(&out.map(|x| x.0), spec.seed, fingerprint);
    let crossing_side = Estimate::from_indicators(&out.map(|x| x.1), spec.seed, fingerprint);
    let margin = |e: &Estimate| if e.se.is_finite() { 2.0 * e.se } else { 0.0 };
    let range_upper = if range_side.value == 0.0 { 3.0 / total } else { range_side.value + margin(&range_side) };
    let crossing_lower =
        if crossing_side.value == 1.0 { 1.0 - 3.0 / total } else { crossing_side.value - margin(&crossing_side) };
    let range_ok = range_upper <= epsilon;
    let crossing_ok = crossing_lower > 1.0 - epsilon;
    Ok(FiniteSizeReport {
        n,
        epsilon,
        r,
        range_side,
        range_upper,
        crossing_side,
        crossing_lower,
        range_ok,
        crossing_ok,
        pass: range_ok && crossing_ok,
        info: RunInfo { spec: *spec, tau_int: out.tau_int, spanning_fraction: out.spanning_fraction },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CutPointResult {
    pub n: u32,
    pub r: f64,
    pub mode: &'static str,
    /// `E[c(R)]` over samples where the lowest crossing exists.
    pub estimate: Estimate,
    /// Frequency of the lowest crossing.
    pub crossing: Estimate,
    #[serde(skip)]
    pub counts: Vec<Vec<Option<usize>>>,
    pub info: RunInfo,
}

/// `c(R)` for the lowest `(-)`-crossing `R` of `S_{n,4n}`; absent when there is
/// no crossing.
pub fn cut_point_count(s: &Sampled, r: f64, n: u32, mode: PackingMode) -> Result<Option<usize>> {
    let sigma = s.sample.color(r);
    let Some(path) = lowest_crossing(&sigma, Parallelogram::s(n, 4 * n)) else { return Ok(None) };
    let cuts = cut_points(&sigma, &path, n)?;
    Ok(Some(packed_count(&cuts, n, mode)?.c))
}

pub fn cutpoint_growth(spec: &RunSpec, n: u32, r: f64, mode: PackingMode, fingerprint: &str) -> Result<CutPointResult> {
    check_r(r)?;
    check_inside(spec, &Parallelogram::s(n, 6 * n), "n")?;
    let out = run(spec, |s| cut_point_count(s, r, n, mode))?;
    let mut counts = Vec::with_capacity(out.chains.len());
    for chain in out.chains {
        counts.push(chain.into_iter().collect::<Result<Vec<_>>>()?);
    }
    let c: Vec<Vec<f64>> = counts.iter().map(|v| v.iter().flatten().map(|&c| c as f64).collect()).collect();
    let exists: Vec<Vec<bool>> = counts.iter().map(|v| v.iter().map(Option::is_some).collect()).collect();
    Ok(CutPointResult {
        n,
        r,
        mode: match mode {
            PackingMode::Greedy => "greedy",
            PackingMode::Exact => "exact",
        },
        estimate: Estimate::from_chains(&c, spec.seed, fingerprint),
        crossing: Estimate::from_indicators(&exists, spec.seed, fingerprint),
        counts,
        info: RunInfo { spec: *spec, tau_int: out.tau_int, spanning_fraction: out.spanning_fraction },
    })
}

/// Whether the two largest `(+)`-clusters inside `window` each meet two
/// opposite sides of it.
pub fn two_giants(s: &Sampled, r: f64, window: &Parallelogram) -> bool {
    let plus = |v: Vertex| s.sample.mark(s.lattice.index(v).unwrap()) < r;
    let mut seen = vec![false; window.len()];
    // (size, spans)
    let mut clusters: Vec<(usize, bool)> = Vec::new();
    let mut queue = VecDeque::new();
    for (i, o) in window.vertices().enumerate() {
        if seen[i] || !plus(o) {
            continue;
        }
        seen[i] = true;
        queue.push_back(o);
        let mut size = 0;
        let mut sides = [false; 4];
        while let Some(v) = queue.pop_front() {
            size += 1;
            sides[0] |= v.k == window.a;
            sides[1] |= v.k == window.b;
            sides[2] |= v.l == window.c;
            sides[3] |= v.l == window.d;
            for w in v.neighbors() {
                if let Some(j) = window.index(w) {
                    if !seen[j] && plus(w) {
                        seen[j] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        clusters.push((size, (sides[0] && sides[1]) || (sides[2] && sides[3])));
    }
    clusters.sort_by(|x, y| y.0.cmp(&x.0));
    clusters.len() >= 2 && clusters[0].1 && clusters[1].1
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessResult {
    pub r: f64,
    pub window: Parallelogram,
    pub estimate: Estimate,
    pub info: RunInfo,
}

pub fn uniqueness_probe(spec: &RunSpec, r: f64, fingerprint: &str) -> Result<UniquenessResult> {
    check_r(r)?;
    let window = spec.inner;
    let out = run(spec, |s| two_giants(s, r, &window))?;
    Ok(UniquenessResult {
        r,
        window,
        estimate: Estimate::from_indicators(&out.chains, spec.seed, fingerprint),
        info: RunInfo { spec: *spec, tau_int: out.tau_int, spanning_fraction: out.spanning_fraction },
    })
}

/// One sample of the pivotal-cluster bound `n(H-_{N,6N}) >= c(Gamma_B)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PivotalBoundCase {
    pub c: usize,
    pub pivotal: usize,
    /// Members of `M(Gamma_B)` lie in pairwise distinct pivotal clusters.
    pub distinct_pivotal: bool,
}

impl PivotalBoundCase {
    pub fn holds(&self) -> bool {
        self.distinct_pivotal && self.pivotal >= self.c
    }
}

/// Evaluate the bound on a sample where `Q(R, B)` holds with `B = dU_R` in the
/// class `B(R)`; `None` if the sample does not satisfy the conditioning.
pub fn pivotal_bound(
    lat: &BoxLattice,
    sample: &DacSample,
    r: f64,
    n: u32,
    mode: PackingMode,
) -> Result<Option<PivotalBoundCase>> {
    let tall = Parallelogram::s(n, 6 * n);
    let sigma = sample.color(r);
    let Some(path) = lowest_crossing(&sigma, tall) else { return Ok(None) };
    if !path.crosses_horizontally(&Parallelogram::s(n, 4 * n)) {
        return Ok(None);
    }
    let hull = match fk_hull(lat, sample, &path, n) {
        Ok(h) => h,
        Err(tridac_core::Error::ClusterTouchesBoundary(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let (true, true, Some(gamma)) = (hull.t_r, hull.in_br, hull.gamma.as_ref()) else { return Ok(None) };
    let regions = crossing_regions(gamma, n)?;
    let cuts = cut_points_in(&sigma, gamma, &regions);
    let packed = packed_count(&cuts, n, mode)?;
    let h_minus = CrossingSpec::new(tall, Direction::Horizontal, Sign::Minus);
    let piv = pivotal_clusters(lat, sample, r, tall, |s| has_crossing(s, &h_minus));
    let mut ids: Vec<u32> = Vec::new();
    let mut distinct_pivotal = true;
    for &x in &packed.packed {
        let id = sample.clusters.canonical_ids()[sample.clusters.number(lat.index(x).unwrap())];
        distinct_pivotal &= piv.clusters.binary_search(&id).is_ok() && !ids.contains(&id);
        ids.push(id);
    }
    Ok(Some(PivotalBoundCase { c: packed.c, pivotal: piv.count, distinct_pivotal }))
}

/// Cut points of a fixed crossing at `r1 <= r2`: the first set is contained
/// in the second.
pub fn cut_points_monotone(sample: &DacSample, path: &Path, n: u32, r1: f64, r2: f64) -> Result<bool> {
    let a = cut_points(&sample.color(r1), path, n)?;
    let b = cut_points(&sample.color(r2), path, n)?;
    Ok(a.iter().all(|x| b.contains(x)))
}
