//! Randomised checks of the core algorithms against direct re-implementations.

use std::collections::BTreeSet;

use proptest::prelude::*;
use tridac_core::analysis::{
    crossing_regions, fk_hull, has_crossing, highest_crossing_of, lowest_crossing, lowest_crossing_of,
    plus_crossing_threshold, CrossingSpec, Direction, Path, Sign,
};
use tridac_core::cutpoints::{cut_points, packed_count, pivotal_clusters, PackingMode};
use tridac_core::dac::{dependence_ranges, DacSample, SpinConfig};
use tridac_core::lattice::{
    classify_barrier, edge_boundary, graph_distance, BoxLattice, Domain, Parallelogram, SimBox, Vertex,
};
use tridac_core::rcm::EdgeConfig;
use tridac_core::rng::{Purpose, StreamRng};

fn random_sigma(region: Parallelogram, r: f64, seed: u64) -> SpinConfig {
    let rng = StreamRng::new(seed);
    SpinConfig::from_fn(region, |v| rng.uniform(Purpose::Test, 1, 0, region.index(v).unwrap() as u32) < r)
}

fn random_sample(lat: &BoxLattice, p: f64, seed: u64) -> DacSample {
    let rng = StreamRng::new(seed);
    let bits: Vec<bool> = (0..lat.n_edges()).map(|e| rng.uniform(Purpose::Test, 2, 0, e as u32) < p).collect();
    DacSample::new(lat, EdgeConfig::from_bools(&bits), seed, 0)
}

/// Vertices reachable from `starts` through `allowed`.
fn flood(starts: impl IntoIterator<Item = Vertex>, allowed: impl Fn(Vertex) -> bool) -> BTreeSet<Vertex> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<Vertex> = starts.into_iter().filter(|&v| allowed(v)).collect();
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        stack.extend(v.neighbors().into_iter().filter(|&w| allowed(w) && !seen.contains(&w)));
    }
    seen
}

fn plus_path_exists(region: Parallelogram, sigma: &SpinConfig, horizontal: bool) -> bool {
    let (starts, done): (Vec<Vertex>, Box<dyn Fn(&Vertex) -> bool>) = if horizontal {
        ((region.c..=region.d).map(|l| Vertex::new(region.a, l)).collect(), Box::new(move |v: &Vertex| v.k == region.b))
    } else {
        ((region.a..=region.b).map(|k| Vertex::new(k, region.c)).collect(), Box::new(move |v: &Vertex| v.l == region.d))
    };
    flood(starts, |v| region.contains(v) && sigma.is_plus(v)).iter().any(done)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn adjacency_is_unit_distance(k in -20i32..20, l in -20i32..20, dk in -3i32..=3, dl in -3i32..=3) {
        let v = Vertex::new(k, l);
        let w = Vertex::new(k + dk, l + dl);
        let (x0, y0) = v.embed();
        let (x1, y1) = w.embed();
        let euclid = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
        prop_assert_eq!(v.is_adjacent(w), (euclid - 1.0).abs() < 1e-9);
        prop_assert_eq!(v.is_adjacent(w), graph_distance(v, w) == 1);
    }

    #[test]
    fn graph_distance_matches_bfs(dk in -6i32..=6, dl in -6i32..=6) {
        let target = Vertex::new(dk, dl);
        let mut dist = 0;
        let mut frontier = BTreeSet::from([Vertex::ORIGIN]);
        let mut seen = frontier.clone();
        while !frontier.contains(&target) {
            frontier = frontier.iter().flat_map(|v| v.neighbors()).filter(|w| seen.insert(*w)).collect();
            dist += 1;
        }
        prop_assert_eq!(graph_distance(Vertex::ORIGIN, target), dist);
    }

    #[test]
    fn boundary_of_connected_set_is_a_barrier(seed in any::<u64>(), size in 1usize..40) {
        let rng = StreamRng::new(seed);
        let mut set = BTreeSet::from([Vertex::ORIGIN]);
        let mut i = 0;
        while set.len() < size {
            let cand: Vec<Vertex> = set.iter().flat_map(|v| v.neighbors()).filter(|w| !set.contains(w)).collect();
            let u = rng.uniform(Purpose::Test, 3, 0, i);
            set.insert(cand[(u * cand.len() as f64) as usize]);
            i += 1;
        }
        let barrier = classify_barrier(&edge_boundary(&set), &Domain::Infinite).unwrap();
        prop_assert!(set.is_subset(&barrier.interior));
        prop_assert!(set.is_disjoint(&barrier.exterior));
    }

    #[test]
    fn self_matching_and_symmetries(seed in any::<u64>(), r in 0.3f64..0.7, w in 1u32..8, h in 1u32..8) {
        let region = Parallelogram::s(w, h);
        let sigma = random_sigma(region, r, seed);
        let h_minus = has_crossing(&sigma, &CrossingSpec::new(region, Direction::Horizontal, Sign::Minus));
        let v_plus = has_crossing(&sigma, &CrossingSpec::new(region, Direction::Vertical, Sign::Plus));
        prop_assert_eq!(h_minus, !v_plus);
        prop_assert_eq!(v_plus, plus_path_exists(region, &sigma, false));

        let t = sigma.transpose();
        let h_plus = has_crossing(&sigma, &CrossingSpec::new(region, Direction::Horizontal, Sign::Plus));
        prop_assert_eq!(h_plus, has_crossing(&t, &CrossingSpec::new(region.transpose(), Direction::Vertical, Sign::Plus)));
        prop_assert_eq!(h_plus, plus_path_exists(region, &sigma, true));

        let open = |v: Vertex| !sigma.is_plus(v);
        let high = highest_crossing_of(region, open);
        let refl = sigma.reflect();
        let low_refl = lowest_crossing_of(region.reflect(), |v| !refl.is_plus(v));
        prop_assert_eq!(high, low_refl.map(|p| p.map(Vertex::reflect).reversed()));
    }

    #[test]
    fn colouring_is_monotone_and_threshold_exact(seed in any::<u64>(), r0 in 0.0f64..1.0, r1 in 0.0f64..1.0) {
        let lat = BoxLattice::new(Parallelogram::square(7));
        let sample = random_sample(&lat, 0.4, seed);
        let (lo, hi) = if r0 <= r1 { (r0, r1) } else { (r1, r0) };
        prop_assert!(sample.color(lo).le(&sample.color(hi)));
        let region = Parallelogram::new(1, 6, 1, 6).unwrap();
        let t = plus_crossing_threshold(&sample, &lat, region, Direction::Vertical);
        for r in [lo, hi, t, t + 1e-12] {
            let sigma = sample.color(r);
            prop_assert_eq!(plus_path_exists(region, &sigma, false), t < r, "r = {}, t = {}", r, t);
        }
    }

    #[test]
    fn dependence_range_is_farthest_member(seed in any::<u64>(), p in 0.1f64..0.6) {
        let lat = BoxLattice::new(Parallelogram::square(9));
        let sample = random_sample(&lat, p, seed);
        let window = Parallelogram::new(2, 7, 2, 7).unwrap();
        let got = dependence_ranges(&lat, &sample.clusters, window);
        for (v, d) in window.vertices().zip(got) {
            let c = sample.clusters.number(lat.index(v).unwrap());
            let members = sample.clusters.members(c);
            let touches = members.iter().any(|&j| lat.region().on_side(lat.vertex(j as usize)));
            let far = members.iter().map(|&j| graph_distance(v, lat.vertex(j as usize))).max().unwrap();
            prop_assert_eq!(d, (!touches).then_some(far));
        }
    }

    #[test]
    fn exact_packing_is_maximum(seed in any::<u64>(), m in 0usize..13, n in 1u32..40) {
        let rng = StreamRng::new(seed);
        let pts: Vec<Vertex> = (0..m as u32)
            .map(|i| Vertex::new((rng.uniform(Purpose::Test, 4, 0, i) * 12.0) as i32, (rng.uniform(Purpose::Test, 5, 0, i) * 12.0) as i32))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let far = |a: Vertex, b: Vertex| (graph_distance(a, b) as u64).pow(2) >= n as u64;
        let mut best = 0;
        for mask in 0u32..1 << pts.len() {
            let chosen: Vec<Vertex> = (0..pts.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pts[i]).collect();
            if chosen.iter().enumerate().all(|(i, &a)| chosen[i + 1..].iter().all(|&b| far(a, b))) {
                best = best.max(chosen.len());
            }
        }
        let exact = packed_count(&pts, n, PackingMode::Exact).unwrap();
        let greedy = packed_count(&pts, n, PackingMode::Greedy).unwrap();
        prop_assert_eq!(exact.c, best);
        prop_assert!(greedy.c <= best);
        for rep in [&exact, &greedy] {
            for (i, &a) in rep.packed.iter().enumerate() {
                prop_assert!(rep.packed[i + 1..].iter().all(|&b| far(a, b)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn cut_points_match_direct_search(seed in any::<u64>(), n in 4u32..18, lo in 0.05f64..0.4, hi in 0.6f64..0.9) {
        let tall = Parallelogram::s(n, 6 * n);
        // A mostly (-) band in mostly (+) surroundings, so that both the
        // crossing and cut points are common.
        let rng = StreamRng::new(seed);
        let sigma = SpinConfig::from_fn(tall, |v| {
            let r = if (n as i32..=n as i32 + 2).contains(&v.l) { lo } else { hi };
            rng.uniform(Purpose::Test, 1, 0, tall.index(v).unwrap() as u32) < r
        });
        let Some(path) = lowest_crossing(&sigma, Parallelogram::s(n, 4 * n)) else { return Ok(()) };
        let got = cut_points(&sigma, &path, n).unwrap();

        let on: BTreeSet<Vertex> = path.vertex_set();
        let below = flood((0..=n as i32).map(|k| Vertex::new(k, 0)), |v| tall.contains(v) && !on.contains(&v));
        let f = (1..).take_while(|f: &i32| (*f as i64).pow(4) <= n as i64).last().unwrap_or(0);
        let mid = |v: Vertex| v.k >= 2 * f && v.k <= n as i32 - 2 * f && tall.contains(v);
        let allowed = |v: Vertex| mid(v) && !on.contains(&v) && !below.contains(&v) && sigma.is_plus(v);
        let want: Vec<Vertex> = path
            .vertices()
            .iter()
            .copied()
            .filter(|x| {
                x.neighbors().iter().any(|&w| allowed(w) && flood([w], allowed).iter().any(|u| u.l == 6 * n as i32))
            })
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn pivotal_clusters_match_forced_colourings(seed in any::<u64>(), r in 0.3f64..0.7) {
        let region = Parallelogram::square(6);
        let lat = SimBox::new(region, 2).lattice();
        let sample = random_sample(&lat, 0.3, seed);
        let spec = CrossingSpec::new(region, Direction::Horizontal, Sign::Minus);
        let got = pivotal_clusters(&lat, &sample, r, region, |s| has_crossing(s, &spec));

        let mut want = Vec::new();
        let mut seen = BTreeSet::new();
        for v in region.vertices() {
            let c = sample.clusters.number(lat.index(v).unwrap());
            if !seen.insert(c) {
                continue;
            }
            let forced = |plus: bool| {
                SpinConfig::from_fn(lat.region(), |u| {
                    let i = lat.index(u).unwrap();
                    if sample.clusters.number(i) == c { plus } else { sample.mark(i) < r }
                })
            };
            if has_crossing(&forced(true), &spec) != has_crossing(&forced(false), &spec) {
                want.push(sample.clusters.canonical_ids()[c]);
            }
        }
        want.sort_unstable();
        prop_assert_eq!(got.count, want.len());
        prop_assert_eq!(got.clusters, want);
    }

    #[test]
    fn fk_hull_matches_direct_unrolling(seed in any::<u64>(), n in 4u32..20, r in 0.4f64..0.7, p in 0.0f64..0.15) {
        let tall = Parallelogram::s(n, 6 * n);
        let lat = SimBox::new(tall, 6).lattice();
        let sample = random_sample(&lat, p, seed);
        let sigma = sample.color(r);
        let Some(path) = lowest_crossing(&sigma, Parallelogram::s(n, 4 * n)) else { return Ok(()) };
        let regions = crossing_regions(&path, n).unwrap();
        let seeds: Vec<Vertex> = regions.below.iter().chain(path.vertices().iter().copied()).collect();

        // Clusters by walking open edges.
        let open = |a: Vertex, b: Vertex| sample.eta.get(lat.edge_id(a, b).unwrap());
        let mut hull = BTreeSet::new();
        let mut stack = seeds.clone();
        let mut touches = false;
        while let Some(v) = stack.pop() {
            if !hull.insert(v) {
                continue;
            }
            touches |= lat.region().on_side(v);
            for w in v.neighbors() {
                if lat.region().contains(w) && !hull.contains(&w) && open(v, w) {
                    stack.push(w);
                }
            }
        }
        let res = fk_hull(&lat, &sample, &path, n);
        if touches {
            prop_assert!(res.is_err());
            return Ok(());
        }
        let res = res.unwrap();
        prop_assert_eq!(&res.hull, &hull);
        prop_assert_eq!(&res.barrier, &edge_boundary(&hull));

        let ranges = dependence_ranges(&lat, &sample.clusters, lat.region());
        let t_r = seeds.iter().all(|&v| {
            let d = ranges[lat.index(v).unwrap()].unwrap();
            (d as u64).pow(4) <= n as u64
        });
        prop_assert_eq!(res.t_r, t_r);

        let int = res.interior.clone().unwrap();
        prop_assert!(hull.is_subset(&int));
        if let Some(g) = &res.gamma {
            prop_assert!(g.crosses_horizontally(&Parallelogram::s(n, 4 * n)));
            prop_assert!(g.vertices().iter().all(|v| int.contains(v)));
            let _ = Path::new(g.vertices().to_vec()).unwrap();
        }
    }
}
