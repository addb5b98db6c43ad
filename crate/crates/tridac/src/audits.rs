//! Exact checks on the tiny-graph library: lemma inequalities, conditional
//! independence across barriers and the Russo identity.

use serde::Serialize;
use tridac_core::analysis::{has_crossing, CrossingSpec, Direction, Sign};
use tridac_core::cutpoints::russo_audit;
use tridac_core::dac::SpinConfig;
use tridac_core::lattice::Parallelogram;
use tridac_core::rcm::exact::{exact_distribution, ExactGraph, ExactModel};
use tridac_core::rcm::lemmas::{
    check_barrin, check_barrinwh, check_conditional_independence, check_edgedom, check_edgedom2, check_strong_fkg,
    CheckReport,
};

use crate::error::{Error, Result};

pub const LEMMA_P: [f64; 3] = [0.2, 0.5, 0.8];
pub const LEMMA_R: [f64; 3] = [0.3, 0.5, 0.7];
pub const LEMMA_TOL: f64 = 1e-10;
pub const RUSSO_TOL: f64 = 1e-6;
pub const RUSSO_DR: f64 = 1e-4;

/// Named tiny graph.
#[derive(Clone, Debug)]
pub struct TinyGraph {
    pub name: String,
    pub graph: ExactGraph,
    pub region: Option<Parallelogram>,
}

impl TinyGraph {
    pub fn parallelogram(region: Parallelogram) -> Result<Self> {
        Ok(TinyGraph { name: region.to_string(), graph: ExactGraph::from_parallelogram(region)?, region: Some(region) })
    }
}

/// `single`, `triangle`, or a region literal.
pub fn tiny_graph(name: &str) -> Result<TinyGraph> {
    match name {
        "single" => Ok(TinyGraph { name: "single".into(), graph: ExactGraph::single_edge(), region: None }),
        "triangle" => Ok(TinyGraph { name: "triangle".into(), graph: ExactGraph::triangle(), region: None }),
        other => TinyGraph::parallelogram(crate::config::parse_region(other)?),
    }
}

/// Single edge, triangle, `S_{1,1}` and `S_{2,1}`.
pub fn library() -> Vec<TinyGraph> {
    vec![
        tiny_graph("single").unwrap(),
        tiny_graph("triangle").unwrap(),
        TinyGraph::parallelogram(Parallelogram::s(1, 1)).unwrap(),
        TinyGraph::parallelogram(Parallelogram::s(2, 1)).unwrap(),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaRow {
    pub graph: String,
    pub check: &'static str,
    pub p: f64,
    /// Absent for checks that do not involve colours.
    pub r: Option<f64>,
    pub checked: u64,
    pub violations: u64,
    pub worst_lhs: f64,
    pub worst_rhs: f64,
}

impl LemmaRow {
    fn new(graph: &str, check: &'static str, p: f64, r: Option<f64>, rep: CheckReport) -> Self {
        LemmaRow {
            graph: graph.into(),
            check,
            p,
            r,
            checked: rep.checked,
            violations: rep.violations,
            worst_lhs: rep.worst_lhs,
            worst_rhs: rep.worst_rhs,
        }
    }
}

/// Domination lemmas on one model (q as given).
pub fn lemma_rows(g: &TinyGraph, model: &ExactModel, r_grid: &[f64], tol: f64) -> Vec<LemmaRow> {
    let p = model.p();
    let mut rows = vec![LemmaRow::new(&g.name, "strongFKG", p, None, check_strong_fkg(model, tol))];
    for &r in r_grid {
        rows.push(LemmaRow::new(&g.name, "edgedom", p, Some(r), check_edgedom(model, r, tol)));
        rows.push(LemmaRow::new(&g.name, "edgedom2", p, Some(r), check_edgedom2(model, r, tol)));
        rows.push(LemmaRow::new(&g.name, "barrin", p, Some(r), check_barrin(model, r, tol)));
        rows.push(LemmaRow::new(&g.name, "barrinwh", p, Some(r), check_barrinwh(model, r, tol)));
    }
    rows
}

/// Conditional-independence rows: `worst_lhs` is the largest dependence and
/// `worst_rhs` is 0.
pub fn independence_rows(g: &TinyGraph, model: &ExactModel, r_grid: &[f64], tol: f64) -> Vec<LemmaRow> {
    r_grid
        .iter()
        .map(|&r| LemmaRow::new(&g.name, "conditional-independence", model.p(), Some(r), check_conditional_independence(model, r, tol)))
        .collect()
}

/// Whole library over the `p x r` grid at `q = 2`.
pub fn lemma_grid(p_grid: &[f64], r_grid: &[f64], tol: f64) -> Result<Vec<LemmaRow>> {
    let mut rows = Vec::new();
    for g in library() {
        for &p in p_grid {
            let model = exact_distribution(&g.graph, p, 2.0)?;
            rows.extend(lemma_rows(&g, &model, r_grid, tol));
        }
    }
    Ok(rows)
}

pub fn independence_grid(p_grid: &[f64], r_grid: &[f64], tol: f64) -> Result<Vec<LemmaRow>> {
    let mut rows = Vec::new();
    for g in library() {
        for &p in p_grid {
            let model = exact_distribution(&g.graph, p, 2.0)?;
            rows.extend(independence_rows(&g, &model, r_grid, tol));
        }
    }
    Ok(rows)
}

/// A decreasing spin event on a tiny graph.
pub struct TinyEvent {
    pub name: String,
    pub f: Box<dyn Fn(u64) -> bool + Sync>,
}

/// `no + vertex` on every graph; `H-` and `V-` of the box on parallelograms.
pub fn decreasing_events(g: &TinyGraph) -> Vec<TinyEvent> {
    let mut out = vec![TinyEvent { name: "all-minus".into(), f: Box::new(|s| s == 0) }];
    if let Some(region) = g.region {
        for (name, dir) in [("H-", Direction::Horizontal), ("V-", Direction::Vertical)] {
            let spec = CrossingSpec::new(region, dir, Sign::Minus);
            out.push(TinyEvent {
                name: name.into(),
                f: Box::new(move |s| {
                    let sigma = SpinConfig::from_fn(region, |v| s >> region.index(v).unwrap() & 1 == 1);
                    has_crossing(&sigma, &spec)
                }),
            });
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct RussoRow {
    pub graph: String,
    pub event: String,
    pub p: f64,
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl RussoRow {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub fn russo_rows(graphs: &[TinyGraph], p_grid: &[f64], r_grid: &[f64], dr: f64) -> Result<Vec<RussoRow>> {
    let mut rows = Vec::new();
    for g in graphs {
        for &p in p_grid {
            let model = exact_distribution(&g.graph, p, 2.0)?;
            for ev in decreasing_events(g) {
                for &r in r_grid {
                    let a = russo_audit(&model, &ev.f, r, dr).map_err(Error::from)?;
                    rows.push(RussoRow { graph: g.name.clone(), event: ev.name.clone(), p, r, lhs: a.lhs, rhs: a.rhs });
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_sizes() {
        let sizes: Vec<usize> = library().iter().map(|g| g.graph.n_edges()).collect();
        assert_eq!(sizes, vec![1, 3, 5, 9]);
    }

    #[test]
    fn russo_on_single_edge_closed_form() {
        // P(all minus) = P(open)(1-r) + P(closed)(1-r)^2
        let rows = russo_rows(&[tiny_graph("single").unwrap()], &[0.5], &[0.3], RUSSO_DR).unwrap();
        let po = 0.5 * 2.0 / (0.5 * 2.0 + 0.5 * 4.0);
        let d = -po - 2.0 * (1.0 - po) * 0.7;
        assert!((rows[0].lhs - d).abs() < 1e-8);
        assert!(rows[0].gap() < RUSSO_TOL);
    }

    #[test]
    fn events_are_decreasing() {
        for g in library() {
            for ev in decreasing_events(&g) {
                assert!(tridac_core::cutpoints::is_decreasing(g.graph.n_vertices(), &ev.f), "{} {}", g.name, ev.name);
            }
        }
    }
}
