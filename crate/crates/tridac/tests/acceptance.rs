//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test --test acceptance -- 3 10` runs a subset.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use tridac::audits::{self, LEMMA_P, LEMMA_R, LEMMA_TOL, RUSSO_DR, RUSSO_TOL};
use tridac::experiments::{self as ex, RcShape};
use tridac::sampler::{self, RunSpec};
use tridac::stats::Estimate;
use tridac_core::analysis::{below_above, has_crossing, lowest_crossing, CrossingSpec, Direction, Path, Sign};
use tridac_core::cutpoints::PackingMode;
use tridac_core::dac::SpinConfig;
use tridac_core::lattice::{BoxLattice, Parallelogram, Vertex};
use tridac_core::rcm::exact::{exact_distribution, ExactGraph};
use tridac_core::rcm::RcmParams;
use tridac_core::rng::{Purpose, StreamRng};

const SEED: u64 = 20240611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn spec(beta: f64, inner: Parallelogram, buffer: u32, chains: u32, samples: u32) -> RunSpec {
    RunSpec { beta, inner, buffer, burn_in: 200, thin: 10, samples, chains, seed: SEED }
}

fn buffer(beta: f64) -> u32 {
    ex::pilot_buffer(beta, SEED).expect("pilot run")
}

// 1. Sampler marginals and pair joints against exhaustive enumeration.
fn oracle_equivalence() -> Outcome {
    let beta = 0.5;
    let mut worst = 0.0f64;
    let mut tests = 0;
    let mut lines = Vec::new();
    for region in [Parallelogram::s(1, 1), Parallelogram::s(2, 1)] {
        let graph = ExactGraph::from_parallelogram(region).unwrap();
        let model = exact_distribution(&graph, RcmParams::new(beta).unwrap().p, 2.0).unwrap();
        let lat = BoxLattice::new(region);
        let ids: Vec<usize> = graph
            .edges()
            .iter()
            .map(|&(u, v)| lat.edge_id(graph.position(u).unwrap(), graph.position(v).unwrap()).unwrap())
            .collect();
        let run = RunSpec { beta, inner: region, buffer: 0, burn_in: 50, thin: 1, samples: 15_625, chains: 64, seed: SEED };
        let out = sampler::run(&run, |s| ids.iter().enumerate().fold(0u32, |m, (j, &e)| m | (s.sample.eta.get(e) as u32) << j)).unwrap();
        assert_eq!(out.total(), 1_000_000);
        let mut z = |est: Estimate, exact: f64| {
            tests += 1;
            let score = (est.value - exact).abs() / est.se;
            worst = worst.max(score);
        };
        let m = ids.len();
        for e in 0..m {
            z(Estimate::from_indicators(&out.map(|&x| x >> e & 1 == 1), SEED, ""), model.edge_marginal(e));
            for f in e + 1..m {
                let both = Estimate::from_indicators(&out.map(|&x| x >> e & 1 == 1 && x >> f & 1 == 1), SEED, "");
                z(both, model.pair_joint(e, f)[1][1]);
            }
        }
        lines.push(format!("{region}: {} samples", out.total()));
    }
    outcome(worst <= 3.0, format!("{}; {tests} marginals and pair joints, max |z| = {worst:.2} (limit 3)", lines.join(", ")))
}

// 2. P(H+ of S_{n,n}) = 1/2 at r = 1/2.
fn self_duality() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for beta in [0.0, 0.3] {
        let b = buffer(beta);
        for n in [16, 32] {
            let region = Parallelogram::square(n);
            let event = CrossingSpec::new(region, Direction::Horizontal, Sign::Plus);
            let res = ex::crossing_prob(&spec(beta, region, b, 16, 250), 0.5, event, "").unwrap();
            let e = &res.estimate;
            let ok = (e.value - 0.5).abs() <= 3.0 * e.se + 0.01;
            pass &= ok;
            parts.push(format!("beta={beta} n={n}: {:.4}±{:.4}", e.value, e.se));
        }
    }
    outcome(pass, parts.join(", "))
}

// 3. r_c locator at n = 64 and window shrinkage from 32 to 64.
fn critical_point() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for beta in [0.0, 0.3] {
        let b = buffer(beta);
        let mut res = Vec::new();
        for n in [32, 64] {
            let inner = RcShape::Tall.event(n).region;
            res.push(ex::rc_locator(&spec(beta, inner, b, 16, 100), n, RcShape::Tall, ex::DEFAULT_BOOTSTRAP).unwrap());
        }
        let ok = (0.45..=0.55).contains(&res[1].r_hat) && res[1].window() < res[0].window();
        pass &= ok;
        parts.push(format!(
            "beta={beta}: r_hat(64)={:.4}±{:.4}, window {:.4} -> {:.4}",
            res[1].r_hat,
            res[1].se,
            res[0].window(),
            res[1].window()
        ));
    }
    outcome(pass, parts.join("; "))
}

// 4. Exponential cluster tail below 1/2, growing mean size at 1/2.
fn sharpness() -> Outcome {
    let beta = 0.3;
    let b = buffer(beta);
    let tail = ex::cluster_tail(&spec(beta, Parallelogram::square(64), b, 8, 100), 0.35, 4, "").unwrap();
    let fit_ok = tail.fit.slope < 0.0 && tail.fit.r2 >= 0.98 && !tail.fit.degenerate;
    let means: Vec<Estimate> = [16, 32, 64]
        .iter()
        .map(|&w| ex::cluster_tail(&spec(beta, Parallelogram::square(w), b, 8, 100), 0.5, 4, "").unwrap().mean_size)
        .collect();
    let grows = means.windows(2).all(|w| w[1].value > w[0].value);
    outcome(
        fit_ok && grows,
        format!(
            "r=0.35 slope {:.5} R2 {:.4} over {} points; mean size at r=0.5: {}",
            tail.fit.slope,
            tail.fit.r2,
            tail.fit.x.len(),
            means.iter().map(|e| format!("{:.2}±{:.2}", e.value, e.se)).collect::<Vec<_>>().join(" < ")
        ),
    )
}

// 5. Dependence-range decay and its ordering in beta.
fn fk_decay() -> Outcome {
    let mut fits = Vec::new();
    for beta in [0.1, 0.3] {
        fits.push(ex::fk_range_tail(&spec(beta, Parallelogram::square(64), buffer(beta), 8, 100), 4).unwrap());
    }
    let ok = fits.iter().all(|f| f.fit.slope < 0.0 && f.fit.r2 >= 0.98 && !f.fit.degenerate) && fits[0].psi > fits[1].psi;
    outcome(
        ok,
        format!(
            "psi(0.1)={:.4} (R2 {:.4}), psi(0.3)={:.4} (R2 {:.4})",
            fits[0].psi, fits[0].fit.r2, fits[1].psi, fits[1].fit.r2
        ),
    )
}

// 6. Russo identity on the tiny-graph library.
fn russo() -> Outcome {
    let rows = audits::russo_rows(&audits::library(), &LEMMA_P, &LEMMA_R, RUSSO_DR).unwrap();
    let max = rows.iter().map(|r| r.gap()).fold(0.0, f64::max);
    outcome(max <= RUSSO_TOL, format!("{} cases, max |lhs - rhs| = {max:.3e} (limit 1e-6)", rows.len()))
}

// 7. Domination lemmas.
fn domination() -> Outcome {
    let rows = audits::lemma_grid(&LEMMA_P, &LEMMA_R, LEMMA_TOL).unwrap();
    let checked: u64 = rows.iter().map(|r| r.checked).sum();
    let violations: u64 = rows.iter().map(|r| r.violations).sum();
    let kinds: BTreeSet<&str> = rows.iter().map(|r| r.check).collect();
    outcome(
        violations == 0 && kinds.len() == 5 && checked > 0,
        format!("{checked} inequalities over {} families, {violations} violations", kinds.len()),
    )
}

// 8. Conditional independence across closed barriers.
fn independence() -> Outcome {
    let rows = audits::independence_grid(&LEMMA_P, &LEMMA_R, LEMMA_TOL).unwrap();
    let checked: u64 = rows.iter().map(|r| r.checked).sum();
    let violations: u64 = rows.iter().map(|r| r.violations).sum();
    let worst = rows.iter().map(|r| r.worst_lhs.abs()).filter(|x| x.is_finite()).fold(0.0, f64::max);
    outcome(
        violations == 0 && checked > 0,
        format!("{checked} (barrier, event pair) cases, max dependence {worst:.3e}, {violations} above 1e-10"),
    )
}

const CASES: u64 = 10_000;

fn iid(region: Parallelogram, r: f64, rng: &StreamRng, stream: u32, case: u32) -> SpinConfig {
    SpinConfig::from_fn(region, |v| rng.uniform(Purpose::Test, stream, case, region.index(v).unwrap() as u32) < r)
}

/// Every proper horizontal crossing through `open`, or `None` past `cap`.
fn all_crossings(region: Parallelogram, open: &dyn Fn(Vertex) -> bool, cap: usize) -> Option<Vec<Vec<Vertex>>> {
    fn dfs(
        region: Parallelogram,
        open: &dyn Fn(Vertex) -> bool,
        path: &mut Vec<Vertex>,
        out: &mut Vec<Vec<Vertex>>,
        cap: usize,
    ) -> bool {
        let v = *path.last().unwrap();
        if v.k == region.b {
            out.push(path.clone());
            return out.len() <= cap;
        }
        for w in v.neighbors() {
            if region.contains(w) && w.k != region.a && open(w) && !path.contains(&w) {
                path.push(w);
                let ok = dfs(region, open, path, out, cap);
                path.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let mut out = Vec::new();
    for l in region.c..=region.d {
        let s = Vertex::new(region.a, l);
        if open(s) && !dfs(region, open, &mut vec![s], &mut out, cap) {
            return None;
        }
    }
    Some(out)
}

fn structural() -> Outcome {
    let rng = StreamRng::new(SEED);
    let mut failures = Vec::new();

    // self-matching
    let mut bad = 0;
    for case in 0..CASES as u32 {
        let w = 1 + (rng.uniform(Purpose::Test, 1, case, 0) * 10.0) as u32;
        let h = 1 + (rng.uniform(Purpose::Test, 1, case, 1) * 10.0) as u32;
        let r = rng.uniform(Purpose::Test, 1, case, 2);
        let region = Parallelogram::s(w, h);
        let sigma = iid(region, r, &rng, 2, case);
        let hm = has_crossing(&sigma, &CrossingSpec::new(region, Direction::Horizontal, Sign::Minus));
        let vp = has_crossing(&sigma, &CrossingSpec::new(region, Direction::Vertical, Sign::Plus));
        bad += (hm == vp) as u64;
    }
    failures.push(("self-matching", CASES, bad, String::new()));

    // lowest crossing against enumeration of all crossings on 6x6 vertices
    let region = Parallelogram::s(5, 5);
    let (mut checked, mut bad, mut with_crossing, mut case) = (0u64, 0u64, 0u64, 0u32);
    while checked < CASES {
        case += 1;
        let r = 0.35 + 0.3 * rng.uniform(Purpose::Test, 3, case, 0);
        let sigma = iid(region, r, &rng, 4, case);
        let Some(all) = all_crossings(region, &|v| !sigma.is_plus(v), 50_000) else { continue };
        checked += 1;
        let lowest = lowest_crossing(&sigma, region);
        if lowest.is_some() != !all.is_empty() {
            bad += 1;
            continue;
        }
        let Some(lowest) = lowest else { continue };
        with_crossing += 1;
        let inner_ok = lowest.vertices()[1..lowest.len() - 1].iter().all(|v| v.k != region.a && v.k != region.b);
        let (low_below, _) = below_above(region, &lowest);
        let minimal = all.into_iter().all(|c| {
            let (below, _) = below_above(region, &Path::new(c).unwrap());
            low_below.iter().all(|v| below.contains(v))
        });
        bad += !(inner_ok && minimal) as u64;
    }
    failures.push(("lowest-crossing minimality", checked, bad, format!("{with_crossing} with a crossing")));

    // colouring monotone in r, from DaC samples
    let out = sampler::run(&RunSpec { beta: 0.3, inner: Parallelogram::square(8), buffer: buffer(0.3), burn_in: 50, thin: 2, samples: 1250, chains: 8, seed: SEED }, |s| {
        let case = sampler::sample_id(s.chain, s.index) as u32;
        let a = rng.uniform(Purpose::Test, 5, case, 0);
        let b = rng.uniform(Purpose::Test, 5, case, 1);
        let (r1, r2) = (a.min(b), a.max(b));
        s.sample.color(r1).le(&s.sample.color(r2))
    })
    .unwrap();
    let bad = out.chains.iter().flatten().filter(|ok| !**ok).count() as u64;
    failures.push(("colouring monotone in r", out.total() as u64, bad, String::new()));

    // pivotal bound on Q(R, B)-conditioned samples
    let (mut cases, mut bad, mut positive) = (0u64, 0u64, 0u64);
    let n = 6;
    'outer: for (i, beta) in [0.0, 0.05, 0.1].into_iter().enumerate() {
        let run = RunSpec { beta, inner: Parallelogram::s(n, 6 * n), buffer: buffer(beta), burn_in: 50, thin: 2, samples: 1000, chains: 4, seed: SEED + i as u64 };
        let out = sampler::run(&run, |s| {
            [0.5, 0.6, 0.7, 0.75, 0.8, 0.85]
                .iter()
                .filter_map(|&r| ex::pivotal_bound(s.lattice, s.sample, r, n, PackingMode::Exact).unwrap())
                .collect::<Vec<_>>()
        })
        .unwrap();
        for case in out.chains.into_iter().flatten().flatten() {
            cases += 1;
            positive += (case.c > 0) as u64;
            bad += !case.holds() as u64;
            if cases == CASES {
                break 'outer;
            }
        }
    }
    failures.push(("n(H-) >= c(Gamma_B)", cases, bad, format!("{positive} with c >= 1")));

    // cut points grow with r along a fixed crossing
    let (mut cases, mut bad, mut nonempty) = (0u64, 0u64, 0u64);
    'cut: for (i, beta) in [0.0, 0.1].into_iter().enumerate() {
        for n in [6u32, 8] {
            let run = RunSpec { beta, inner: Parallelogram::s(n, 6 * n), buffer: buffer(beta), burn_in: 50, thin: 2, samples: 1500, chains: 4, seed: SEED + 10 + i as u64 };
            let out = sampler::run(&run, |s| {
                let case = sampler::sample_id(s.chain, s.index) as u32 ^ n << 24;
                let r1 = 0.3 + 0.5 * rng.uniform(Purpose::Test, 6, case, 0);
                let r2 = r1 + (1.0 - r1) * rng.uniform(Purpose::Test, 6, case, 1);
                let path = lowest_crossing(&s.sample.color(r1), Parallelogram::s(n, 4 * n))?;
                let first = tridac_core::cutpoints::cut_points(&s.sample.color(r1), &path, n).unwrap();
                Some((ex::cut_points_monotone(s.sample, &path, n, r1, r2).unwrap(), !first.is_empty()))
            })
            .unwrap();
            for (ok, ne) in out.chains.into_iter().flatten().flatten() {
                cases += 1;
                bad += !ok as u64;
                nonempty += ne as u64;
                if cases == CASES {
                    break 'cut;
                }
            }
        }
    }
    failures.push(("cut points monotone in r", cases, bad, format!("{nonempty} with cut points at r1")));

    let pass = failures.iter().all(|f| f.1 >= CASES && f.2 == 0);
    let detail = failures
        .iter()
        .map(|(name, n, bad, extra)| {
            if extra.is_empty() {
                format!("{name}: {bad}/{n}")
            } else {
                format!("{name}: {bad}/{n} ({extra})")
            }
        })
        .collect::<Vec<_>>()
        .join("; ");
    outcome(pass, format!("failures {detail}"))
}

// 10. Growth of E[c(R)] at r = 1/2 over n = 16, 32, 64.
fn cutpoint_growth() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for beta in [0.0, 0.3] {
        // at beta = 0 sites are independent and the box size is irrelevant
        let (b, thin) = if beta == 0.0 { (0, 1) } else { (buffer(beta), 2) };
        let mut est = Vec::new();
        for (n, samples) in [(16u32, 2500u32), (32, 2500), (64, 1000)] {
            let run = RunSpec { beta, inner: Parallelogram::s(n, 6 * n), buffer: b, burn_in: 100, thin, samples, chains: 16, seed: SEED };
            est.push(ex::cutpoint_growth(&run, n, 0.5, PackingMode::Greedy, "").unwrap().estimate);
        }
        // each step must exceed twice the combined standard error
        let ok = est.windows(2).all(|w| w[1].value - w[0].value > 2.0 * w[0].se.hypot(w[1].se));
        pass &= ok;
        parts.push(format!(
            "beta={beta}: {}",
            est.iter().map(|e| format!("{:.5}±{:.5}", e.value, e.se)).collect::<Vec<_>>().join(" < ")
        ));
    }
    outcome(pass, parts.join("; "))
}

// 11. Two-giant frequency in the supercritical phase.
fn uniqueness() -> Outcome {
    let beta = 0.3;
    let b = buffer(beta);
    let f: Vec<Estimate> = [32, 64]
        .iter()
        .map(|&w| ex::uniqueness_probe(&spec(beta, Parallelogram::square(w), b, 8, 200), 0.7, "").unwrap().estimate)
        .collect();
    outcome(
        f[1].value <= f[0].value && f[1].value <= 0.02,
        format!("two-giant frequency {:.4} (32) -> {:.4} (64)", f[0].value, f[1].value),
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let all: [Criterion; 11] = [
        (1, "oracle equivalence", min(2), oracle_equivalence),
        (2, "self-duality", min(10), self_duality),
        (3, "critical point", min(20), critical_point),
        (4, "sharpness", min(10), sharpness),
        (5, "FK decay", min(5), fk_decay),
        (6, "Russo identity", min(1), russo),
        (7, "domination lemmas", min(5), domination),
        (8, "conditional independence", min(2), independence),
        (9, "structural invariants", Duration::MAX, structural),
        (10, "cut-point growth", min(20), cutpoint_growth),
        (11, "uniqueness proxy", min(10), uniqueness),
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, budget, f) in all {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let pass = o.pass && took <= budget;
        failed += !pass as u32;
        let limit = if budget == Duration::MAX { String::new() } else { format!(", limit {}s", budget.as_secs()) };
        println!(
            "{} criterion {id:>2} {name}: {} [{:.1}s{limit}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
