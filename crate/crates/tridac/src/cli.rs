//! Command-line front end.
//!
//! Every command merges `--config FILE` with its flags (flags win), runs, and
//! writes into the output directory: a raw CSV, a JSON summary embedding the
//! effective configuration, a plot CSV (`x,y,yerr`) and, last, `manifest.json`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tridac_core::analysis::CrossingSpec;
use tridac_core::cutpoints::PackingMode;
use tridac_core::lattice::Parallelogram;
use tridac_core::rcm::exact::{exact_distribution, ExactModel};
use tridac_core::rcm::RcmParams;

use crate::audits::{self, LemmaRow, RussoRow, TinyGraph};
use crate::config::{self, RunConfig};
use crate::error::{Error, Result};
use crate::experiments::{self as ex, RcShape};
use crate::formats::{write_dac_dump, write_edge_dump, write_spin_dump, EdgeHeader};
use crate::output::{csv_line, fingerprint, fmt17, plot_csv, to_json, OutputDir, BUILD_VERSION};
use crate::sampler::{self, RunSpec};
use crate::stats::Estimate;

#[derive(Parser, Debug)]
#[command(name = "tridac", version = BUILD_VERSION, about = "Divide-and-Colour on the triangular lattice")]
struct Cli {
    /// TOML configuration file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $TRIDAC_OUT, else ./tridac-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the chain pool (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump edge, spin and DaC samples.
    Sample(Flags),
    /// Exhaustive oracle tables and lemma checks on one small graph.
    Exact(Flags),
    /// Crossing probabilities, Theta curves, uniqueness, cut points, finite-size criterion.
    Estimate {
        #[arg(value_enum)]
        what: EstimateKind,
        #[command(flatten)]
        flags: Flags,
    },
    /// Scan r or n: critical point, Theta, crossing curves, cut-point growth.
    Sweep {
        #[arg(value_enum)]
        what: SweepKind,
        #[command(flatten)]
        flags: Flags,
    },
    /// Exact Russo and lemma audits, pivotal bound on samples.
    Audit {
        #[arg(value_enum)]
        what: AuditKind,
        #[command(flatten)]
        flags: Flags,
    },
    /// Exponential tail fits.
    Fit {
        #[arg(value_enum)]
        what: FitKind,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum EstimateKind {
    Crossing,
    Theta,
    Uniqueness,
    Cutpoints,
    FiniteSize,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SweepKind {
    Rc,
    Theta,
    Crossing,
    Cutpoints,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum AuditKind {
    Russo,
    Lemmas,
    Pivotal,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FitKind {
    ClusterTail,
    FkRange,
}

/// Flags shared by all commands; each maps onto one config field.
#[derive(Args, Debug, Default)]
struct Flags {
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    r_grid: Option<Vec<f64>>,
    /// `square N`, `S N M` or `Sa,b,c,d`.
    #[arg(long, num_args = 1..=3)]
    region: Option<Vec<String>>,
    /// `S_{N,M}` given as `N M`.
    #[arg(long = "box", num_args = 2, value_names = ["N", "M"])]
    box_dims: Option<Vec<u32>>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    m_grid: Option<Vec<u32>>,
    #[arg(long)]
    direction: Option<String>,
    #[arg(long)]
    sign: Option<String>,
    /// `tall` (V+ of S_{n,3n}) or `square` (H+ of S_{n,n}).
    #[arg(long)]
    shape: Option<String>,
    /// `single`, `triangle` or a region literal.
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    spacing: Option<u32>,
    #[arg(long)]
    buffer: Option<u32>,
    #[arg(long)]
    samples: Option<u32>,
    #[arg(long)]
    chains: Option<u32>,
    #[arg(long)]
    burn_in: Option<u32>,
    #[arg(long)]
    thin: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<u32>,
    #[arg(long)]
    bootstrap: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    #[arg(long)]
    dr: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Cut-point packing: `greedy` or `exact`.
    #[arg(long)]
    mode: Option<String>,
}

impl Flags {
    fn into_config(self, command: String, out: Option<PathBuf>) -> RunConfig {
        RunConfig {
            command: Some(command),
            model: config::Model { beta: self.beta, r: self.r, r_grid: self.r_grid, p: self.p, q: self.q },
            window: config::Window {
                region: self.region.map(|w| w.join(" ")),
                box_dims: self.box_dims.map(|b| [b[0], b[1]]),
                n: self.n,
                n_list: self.n_list,
                m_grid: self.m_grid,
                direction: self.direction,
                sign: self.sign,
                shape: self.shape,
                graph: self.graph,
                spacing: self.spacing,
            },
            sampler: config::Sampler {
                samples: self.samples,
                chains: self.chains,
                burn_in: self.burn_in,
                thin: self.thin,
                seed: self.seed,
                buffer: self.buffer,
                bootstrap: self.bootstrap,
                count: self.count,
            },
            check: config::Check { epsilon: self.epsilon, dr: self.dr, tol: self.tol, mode: self.mode },
            output: config::Output { out },
        }
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().format_timestamp(None).init();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(format!("threads: {e}")))?;
    }
    let name = match &cli.command {
        Command::Sample(_) => "sample".to_string(),
        Command::Exact(_) => "exact".to_string(),
        Command::Estimate { what, .. } => format!("estimate {}", kind(*what)),
        Command::Sweep { what, .. } => format!("sweep {}", kind(*what)),
        Command::Audit { what, .. } => format!("audit {}", kind(*what)),
        Command::Fit { what, .. } => format!("fit {}", kind(*what)),
    };
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let over = match cli.command {
        Command::Sample(f) | Command::Exact(f) => f,
        Command::Estimate { flags, .. }
        | Command::Sweep { flags, .. }
        | Command::Audit { flags, .. }
        | Command::Fit { flags, .. } => flags,
    };
    let cfg = file.merge(over.into_config(name.clone(), cli.out));
    dispatch(&name, cfg)
}

fn kind(v: impl ValueEnum) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

/// Run the command named in `cfg.command` (as `"estimate crossing"` etc.).
pub fn dispatch(name: &str, mut cfg: RunConfig) -> Result<()> {
    cfg.command = Some(name.to_string());
    match name {
        "sample" => cmd_sample(cfg),
        "exact" => cmd_exact(cfg),
        "estimate crossing" => estimate_crossing(cfg),
        "estimate theta" | "sweep theta" => theta(cfg),
        "estimate uniqueness" => estimate_uniqueness(cfg),
        "estimate cutpoints" | "sweep cutpoints" => cutpoints(cfg),
        "estimate finite-size" => estimate_finite_size(cfg),
        "sweep rc" => sweep_rc(cfg),
        "sweep crossing" => sweep_crossing(cfg),
        "audit russo" => audit_russo(cfg),
        "audit lemmas" => audit_lemmas(cfg),
        "audit pivotal" => audit_pivotal(cfg),
        "fit cluster-tail" => fit_cluster_tail(cfg),
        "fit fk-range" => fit_fk_range(cfg),
        other => Err(Error::Config(format!("command: unknown command {other:?}"))),
    }
}

#[derive(Serialize)]
struct Summary<'a, T> {
    command: &'a str,
    version: &'a str,
    fingerprint: &'a str,
    seed: Option<u64>,
    config: &'a RunConfig,
    result: &'a T,
}

/// Files of one command invocation, named `<stem>-<fingerprint>.<kind>`.
struct Job {
    out: OutputDir,
    cfg: RunConfig,
    fp: String,
    stem: String,
}

impl Job {
    fn new(cfg: RunConfig) -> Result<Self> {
        let fp = fingerprint(&cfg)?;
        let stem = cfg.command.clone().unwrap_or_default().replace(' ', "-");
        let out = OutputDir::create(cfg.out_dir())?;
        Ok(Job { out, cfg, fp, stem })
    }

    fn name(&self, suffix: &str) -> String {
        format!("{}-{}.{suffix}", self.stem, self.fp)
    }

    fn write(&mut self, suffix: &str, contents: &str) -> Result<()> {
        let name = self.name(suffix);
        self.out.write(&name, contents)?;
        Ok(())
    }

    fn finish<T: Serialize>(mut self, result: &T, raw: &str, plot: &str) -> Result<()> {
        self.write("raw.csv", raw)?;
        self.write("plot.csv", plot)?;
        let summary = Summary {
            command: self.cfg.command.as_deref().unwrap_or_default(),
            version: BUILD_VERSION,
            fingerprint: &self.fp,
            seed: self.cfg.sampler.seed,
            config: &self.cfg,
            result,
        };
        let json = to_json(&summary)?;
        self.write("summary.json", &json)?;
        log::info!("wrote {}", self.out.root().join(self.name("summary.json")).display());
        self.out.finish(&self.fp)?;
        Ok(())
    }
}

/// Fix every sampler default in the config so that the summary records the
/// settings actually used.
fn pin_sampler(cfg: &mut RunConfig) {
    let s = &mut cfg.sampler;
    s.seed.get_or_insert(config::DEFAULT_SEED);
    s.chains.get_or_insert(config::DEFAULT_CHAINS);
    s.samples.get_or_insert(config::DEFAULT_SAMPLES);
}

/// Explicit buffer, else `max(ceil(2 / psi), 16)` from a short pilot fit of
/// the dependence-range tail; 16 at `beta = 0`.
fn pin_buffer(cfg: &mut RunConfig) -> Result<u32> {
    if let Some(b) = cfg.sampler.buffer {
        return Ok(b);
    }
    let beta = cfg.beta()?;
    let b = ex::pilot_buffer(beta, cfg.sampler.seed.unwrap_or(config::DEFAULT_SEED))?;
    cfg.sampler.buffer = Some(b);
    Ok(b)
}

fn prepared_spec(cfg: &mut RunConfig, inner: Parallelogram) -> Result<RunSpec> {
    cfg.beta()?;
    pin_sampler(cfg);
    let b = pin_buffer(cfg)?;
    cfg.run_spec(inner, b)
}

fn mode(cfg: &RunConfig) -> Result<PackingMode> {
    match cfg.check.mode.as_deref().unwrap_or("greedy") {
        "greedy" => Ok(PackingMode::Greedy),
        "exact" => Ok(PackingMode::Exact),
        other => Err(Error::Config(format!("check.mode: {other:?} is not greedy or exact"))),
    }
}

fn shape(cfg: &RunConfig) -> Result<RcShape> {
    match cfg.window.shape.as_deref().unwrap_or("tall") {
        "tall" => Ok(RcShape::Tall),
        "square" => Ok(RcShape::Square),
        other => Err(Error::Config(format!("window.shape: {other:?} is not tall or square"))),
    }
}

fn n_list(cfg: &RunConfig) -> Result<Vec<u32>> {
    match &cfg.window.n_list {
        Some(l) if l.iter().all(|&n| n > 0) && !l.is_empty() => Ok(l.clone()),
        Some(_) => Err(Error::Config("window.n_list: sizes must be at least 1".into())),
        None => Ok(vec![cfg.n()?]),
    }
}

fn estimate_row(x: f64, e: &Estimate) -> String {
    csv_line(&[fmt17(x), fmt17(e.value), fmt17(e.se), e.samples.to_string(), fmt17(e.ess)])
}

const ESTIMATE_HEADER: &str = "x,value,se,samples,ess\n";

fn indicator_csv(chains: &[Vec<bool>]) -> String {
    let mut s = String::from("chain,index,value\n");
    for (c, chain) in chains.iter().enumerate() {
        for (i, &v) in chain.iter().enumerate() {
            s.push_str(&format!("{c},{i},{}\n", v as u8));
        }
    }
    s
}

fn cmd_sample(mut cfg: RunConfig) -> Result<()> {
    let region = cfg.region()?;
    cfg.beta()?;
    let count = cfg.sampler.count.or(cfg.sampler.samples).unwrap_or(1);
    cfg.sampler.count = Some(count);
    cfg.sampler.samples = Some(count);
    cfg.sampler.chains.get_or_insert(1);
    cfg.sampler.seed.get_or_insert(config::DEFAULT_SEED);
    cfg.sampler.buffer.get_or_insert(0);
    let spec = cfg.run_spec(region, 0)?;
    let r = cfg.model.r.map(|_| cfg.r()).transpose()?;
    let out = sampler::run(&spec, |s| s.sample.clone())?;
    let lat = spec.sim_box().lattice();
    let header = EdgeHeader {
        region: lat.region(),
        beta: spec.beta,
        seed: spec.seed,
        burn_in: spec.burn_in,
        thin: spec.thin,
        edges: lat.n_edges(),
    };
    let mut job = Job::new(cfg)?;
    let mut raw = String::from("chain,index,sample_id,open_edges,clusters\n");
    let mut plot = Vec::new();
    for (c, chain) in out.chains.iter().enumerate() {
        for (i, sample) in chain.iter().enumerate() {
            let tag = format!("{c:02}-{i:04}");
            job.write(&format!("{tag}.edges.txt"), &write_edge_dump(&header, std::slice::from_ref(&sample.eta)))?;
            job.write(&format!("{tag}.dac.txt"), &write_dac_dump(&header, sample))?;
            if let Some(r) = r {
                job.write(&format!("{tag}.spins.txt"), &write_spin_dump(&sample.color(r), r))?;
            }
            let open = sample.eta.count_open();
            raw.push_str(&format!("{c},{i},{},{open},{}\n", sample.sample_id, sample.marks.len()));
            plot.push((plot.len() as f64, open as f64 / lat.n_edges().max(1) as f64, 0.0));
        }
    }
    #[derive(Serialize)]
    struct R {
        samples: usize,
        tau_int: f64,
    }
    job.finish(&R { samples: out.total(), tau_int: out.tau_int }, &raw, &plot_csv(&plot))
}

/// Edge density of an exact run: `--p`, else `1 - exp(-beta)`.
fn exact_params(cfg: &RunConfig) -> Result<RcmParams> {
    let q = cfg.model.q.unwrap_or(2.0);
    match (cfg.model.p, cfg.model.beta) {
        (Some(p), _) => Ok(RcmParams::from_p(p, q).map_err(|e| Error::Config(format!("model.p / model.q: {e}")))?),
        (None, Some(_)) => {
            let mut params = RcmParams::new(cfg.beta()?)?;
            params.q = q;
            RcmParams::from_p(params.p, q).map_err(|e| Error::Config(format!("model.q: {e}")))
        }
        (None, None) => Err(Error::Config("model.p or model.beta: required for this command".into())),
    }
}

/// Ternary tables over `3^edges` patterns cap lemma checks lower than the
/// enumeration itself.
pub const LEMMA_EDGE_CAP: usize = 12;

fn exact_graph(cfg: &RunConfig) -> Result<TinyGraph> {
    if cfg.window.region.is_some() || cfg.window.box_dims.is_some() {
        return TinyGraph::parallelogram(cfg.region()?);
    }
    audits::tiny_graph(cfg.window.graph.as_deref().unwrap_or("triangle"))
}

fn lemma_csv(rows: &[LemmaRow]) -> String {
    let mut s = String::from("graph,check,p,r,checked,violations,lhs,rhs,margin\n");
    for row in rows {
        s.push_str(&csv_line(&[
            row.graph.clone(),
            row.check.to_string(),
            fmt17(row.p),
            row.r.map(fmt17).unwrap_or_default(),
            row.checked.to_string(),
            row.violations.to_string(),
            fmt17(row.worst_lhs),
            fmt17(row.worst_rhs),
            fmt17(row.worst_lhs - row.worst_rhs),
        ]));
    }
    s
}

fn russo_csv(rows: &[RussoRow]) -> String {
    let mut s = String::from("graph,event,p,r,lhs,rhs,gap\n");
    for row in rows {
        s.push_str(&csv_line(&[
            row.graph.clone(),
            row.event.clone(),
            fmt17(row.p),
            fmt17(row.r),
            fmt17(row.lhs),
            fmt17(row.rhs),
            fmt17(row.gap()),
        ]));
    }
    s
}

fn lemma_cap(g: &TinyGraph) -> Result<()> {
    let edges = g.graph.n_edges();
    if edges > LEMMA_EDGE_CAP {
        return Err(tridac_core::Error::SizeExceeded { edges, cap: LEMMA_EDGE_CAP }.into());
    }
    Ok(())
}

fn cmd_exact(cfg: RunConfig) -> Result<()> {
    let g = exact_graph(&cfg)?;
    let params = exact_params(&cfg)?;
    let model: ExactModel = exact_distribution(&g.graph, params.p, params.q)?;
    lemma_cap(&g)?;
    let r_grid = match (&cfg.model.r_grid, cfg.model.r) {
        (None, None) => audits::LEMMA_R.to_vec(),
        _ => cfg.r_grid()?,
    };
    let tol = cfg.check.tol.unwrap_or(audits::LEMMA_TOL);
    let dr = cfg.check.dr.unwrap_or(audits::RUSSO_DR);

    let edges = g.graph.edges();
    let mut marginals = String::from("edge,u,v,p_open\n");
    let mut plot = Vec::new();
    for (e, &(u, v)) in edges.iter().enumerate() {
        let m = model.edge_marginal(e);
        marginals.push_str(&format!("{e},{u},{v},{}\n", fmt17(m)));
        plot.push((e as f64, m, 0.0));
    }
    let mut joint = String::from("e,f,p00,p01,p10,p11\n");
    for e in 0..edges.len() {
        for f in e + 1..edges.len() {
            let j = model.pair_joint(e, f);
            joint.push_str(&csv_line(&[
                e.to_string(),
                f.to_string(),
                fmt17(j[0][0]),
                fmt17(j[0][1]),
                fmt17(j[1][0]),
                fmt17(j[1][1]),
            ]));
        }
    }
    let mut lemmas = audits::lemma_rows(&g, &model, &r_grid, tol);
    lemmas.extend(audits::independence_rows(&g, &model, &r_grid, tol));
    let russo = audits::russo_rows(std::slice::from_ref(&g), &[params.p], &r_grid, dr)?;

    #[derive(Serialize)]
    struct R {
        graph: String,
        vertices: usize,
        edges: usize,
        p: f64,
        q: f64,
        partition_sum: f64,
        lemma_checks: u64,
        lemma_violations: u64,
        russo_max_gap: f64,
    }
    let result = R {
        graph: g.name.clone(),
        vertices: g.graph.n_vertices(),
        edges: edges.len(),
        p: params.p,
        q: params.q,
        partition_sum: model.partition_sum(),
        lemma_checks: lemmas.iter().map(|r| r.checked).sum(),
        lemma_violations: lemmas.iter().map(|r| r.violations).sum(),
        russo_max_gap: russo.iter().map(RussoRow::gap).fold(0.0, f64::max),
    };
    let mut job = Job::new(cfg)?;
    job.write("joint.csv", &joint)?;
    job.write("lemmas.csv", &lemma_csv(&lemmas))?;
    job.write("russo.csv", &russo_csv(&russo))?;
    job.finish(&result, &marginals, &plot_csv(&plot))
}

fn estimate_crossing(mut cfg: RunConfig) -> Result<()> {
    let region = cfg.region()?;
    let event = CrossingSpec::new(region, cfg.direction()?, cfg.sign()?);
    let r = cfg.r()?;
    let spec = prepared_spec(&mut cfg, region)?;
    let job = Job::new(cfg)?;
    let res = ex::crossing_prob(&spec, r, event, &job.fp)?;
    let plot = plot_csv(&[(r, res.estimate.value, res.estimate.se)]);
    job.finish(&res, &indicator_csv(&res.indicators), &plot)
}

fn theta(mut cfg: RunConfig) -> Result<()> {
    let region = cfg.region()?;
    let r_grid = cfg.r_grid()?;
    let m_grid = match &cfg.window.m_grid {
        Some(m) => m.clone(),
        None => {
            let half = (region.b - region.a).min(region.d - region.c) as u32 / 2;
            (0..).map(|i| 1u32 << i).take_while(|&m| m <= half).collect()
        }
    };
    cfg.window.m_grid = Some(m_grid.clone());
    let spec = prepared_spec(&mut cfg, region)?;
    let job = Job::new(cfg)?;
    let res = ex::theta_curve(&spec, &r_grid, &m_grid, &job.fp)?;
    let mut raw = String::from("r,m,value,se,samples,ess\n");
    for p in &res.points {
        raw.push_str(&format!("{},{}", fmt17(p.r), p.m));
        raw.push_str(&estimate_row(0.0, &p.estimate)[fmt17(0.0).len()..]);
    }
    // one curve in r at the largest radius
    let m_max = *m_grid.iter().max().unwrap_or(&0);
    let plot: Vec<_> =
        res.points.iter().filter(|p| p.m == m_max).map(|p| (p.r, p.estimate.value, p.estimate.se)).collect();
    job.finish(&res, &raw, &plot_csv(&plot))
}

fn estimate_uniqueness(mut cfg: RunConfig) -> Result<()> {
    let region = cfg.region()?;
    let r = cfg.r()?;
    let spec = prepared_spec(&mut cfg, region)?;
    let job = Job::new(cfg)?;
    let res = ex::uniqueness_probe(&spec, r, &job.fp)?;
    let raw = format!("{ESTIMATE_HEADER}{}", estimate_row(r, &res.estimate));
    let plot = plot_csv(&[(r, res.estimate.value, res.estimate.se)]);
    job.finish(&res, &raw, &plot)
}

fn cutpoints(mut cfg: RunConfig) -> Result<()> {
    let ns = n_list(&cfg)?;
    let r = cfg.model.r.map_or(Ok(0.5), |_| cfg.r())?;
    cfg.model.r = Some(r);
    let mode = mode(&cfg)?;
    let n_max = *ns.iter().max().unwrap();
    let region = match (&cfg.window.region, cfg.window.box_dims) {
        (None, None) => Parallelogram::s(n_max, 6 * n_max),
        _ => cfg.region()?,
    };
    let spec = prepared_spec(&mut cfg, region)?;
    let job = Job::new(cfg)?;
    let mut raw = String::from("n,chain,index,c\n");
    let mut plot = Vec::new();
    let mut results = Vec::new();
    for &n in &ns {
        let inner = Parallelogram::s(n, 6 * n);
        let res = ex::cutpoint_growth(&RunSpec { inner, ..spec }, n, r, mode, &job.fp)?;
        for (c, chain) in res.counts.iter().enumerate() {
            for (i, v) in chain.iter().enumerate() {
                let v = v.map(|x| x.to_string()).unwrap_or_default();
                raw.push_str(&format!("{n},{c},{i},{v}\n"));
            }
        }
        plot.push((n as f64, res.estimate.value, res.estimate.se));
        results.push(res);
    }
    job.finish(&results, &raw, &plot_csv(&plot))
}

fn estimate_finite_size(mut cfg: RunConfig) -> Result<()> {
    let n = cfg.n()?;
    let r = cfg.r()?;
    let eps = cfg.check.epsilon.ok_or_else(|| Error::Config("check.epsilon: required for this command".into()))?;
    let region = match (&cfg.window.region, cfg.window.box_dims) {
        (None, None) => Parallelogram::s(n, 3 * n),
        _ => cfg.region()?,
    };
    let spec = prepared_spec(&mut cfg, region)?;
    let job = Job::new(cfg)?;
    let res = ex::finite_size_check(&spec, n, eps, r, &job.fp)?;
    let raw = format!(
        "{ESTIMATE_HEADER}{}{}",
        estimate_row(0.0, &res.range_side),
        estimate_row(1.0, &res.crossing_side)
    );
    let plot = plot_csv(&[
        (0.0, res.range_side.value, res.range_side.se),
        (1.0, res.crossing_side.value, res.crossing_side.se),
    ]);
    job.finish(&res, &raw, &plot)
}

fn sweep_rc(mut cfg: RunConfig) -> Result<()> {
    let ns = n_list(&cfg)?;
    let shape = shape(&cfg)?;
    cfg.window.shape = Some(kind_name(shape).into());
    let bootstrap = *cfg.sampler.bootstrap.get_or_insert(ex::DEFAULT_BOOTSTRAP);
    let n_max = *ns.iter().max().unwrap();
    let spec = prepared_spec(&mut cfg, shape.event(n_max).region)?;
    let job = Job::new(cfg)?;
    let mut raw = String::from("n,chain,index,threshold\n");
    let mut plot = Vec::new();
    let mut results = Vec::new();
    for &n in &ns {
        let inner = shape.event(n).region;
        let res = ex::rc_locator(&RunSpec { inner, ..spec }, n, shape, bootstrap)?;
        for (c, chain) in res.thresholds.iter().enumerate() {
            for (i, t) in chain.iter().enumerate() {
                raw.push_str(&format!("{n},{c},{i},{}\n", fmt17(*t)));
            }
        }
        plot.push((n as f64, res.r_hat, res.se));
        results.push(res);
    }
    job.finish(&results, &raw, &plot_csv(&plot))
}

fn kind_name(s: RcShape) -> &'static str {
    match s {
        RcShape::Tall => "tall",
        RcShape::Square => "square",
    }
}

fn sweep_crossing(mut cfg: RunConfig) -> Result<()> {
    let region = cfg.region()?;
    let event = CrossingSpec::new(region, cfg.direction()?, cfg.sign()?);
    let r_grid = cfg.r_grid()?;
    let spec = prepared_spec(&mut cfg, region)?;
    let job = Job::new(cfg)?;
    // one threshold per sample gives the whole curve from the same samples
    let out = sampler::run(&spec, |s| ex::crossing_threshold(s.sample, s.lattice, &event))?;
    let mut raw = String::from("chain,index,threshold\n");
    for (c, chain) in out.chains.iter().enumerate() {
        for (i, t) in chain.iter().enumerate() {
            raw.push_str(&format!("{c},{i},{}\n", fmt17(*t)));
        }
    }
    let points: Vec<(f64, Estimate)> = r_grid
        .iter()
        .map(|&r| {
            let ind = out.map(|&t| ex::holds_at(event.sign, t, r));
            (r, Estimate::from_indicators(&ind, spec.seed, &job.fp))
        })
        .collect();
    #[derive(Serialize)]
    struct Point {
        r: f64,
        estimate: Estimate,
    }
    #[derive(Serialize)]
    struct R {
        spec: CrossingSpec,
        points: Vec<Point>,
        info: ex::RunInfo,
    }
    let plot: Vec<_> = points.iter().map(|(r, e)| (*r, e.value, e.se)).collect();
    let result = R {
        spec: event,
        points: points.into_iter().map(|(r, estimate)| Point { r, estimate }).collect(),
        info: ex::RunInfo { spec, tau_int: out.tau_int, spanning_fraction: out.spanning_fraction },
    };
    job.finish(&result, &raw, &plot_csv(&plot))
}

fn audit_graphs(cfg: &RunConfig) -> Result<Vec<TinyGraph>> {
    if cfg.window.region.is_some() || cfg.window.box_dims.is_some() || cfg.window.graph.is_some() {
        Ok(vec![exact_graph(cfg)?])
    } else {
        Ok(audits::library())
    }
}

fn p_grid(cfg: &RunConfig) -> Result<Vec<f64>> {
    if cfg.model.p.is_some() || cfg.model.beta.is_some() {
        Ok(vec![exact_params(cfg)?.p])
    } else {
        Ok(audits::LEMMA_P.to_vec())
    }
}

fn grid_or(cfg: &RunConfig, default: &[f64]) -> Result<Vec<f64>> {
    match (&cfg.model.r_grid, cfg.model.r) {
        (None, None) => Ok(default.to_vec()),
        _ => cfg.r_grid(),
    }
}

fn audit_russo(cfg: RunConfig) -> Result<()> {
    let graphs = audit_graphs(&cfg)?;
    let ps = p_grid(&cfg)?;
    let rs = grid_or(&cfg, &audits::LEMMA_R)?;
    let dr = cfg.check.dr.unwrap_or(audits::RUSSO_DR);
    let tol = cfg.check.tol.unwrap_or(audits::RUSSO_TOL);
    let rows = audits::russo_rows(&graphs, &ps, &rs, dr)?;
    let max_gap = rows.iter().map(RussoRow::gap).fold(0.0, f64::max);
    #[derive(Serialize)]
    struct R<'a> {
        cases: usize,
        dr: f64,
        tol: f64,
        max_gap: f64,
        pass: bool,
        rows: &'a [RussoRow],
    }
    let plot: Vec<_> = rows.iter().enumerate().map(|(i, r)| (i as f64, r.gap(), 0.0)).collect();
    let result = R { cases: rows.len(), dr, tol, max_gap, pass: max_gap <= tol, rows: &rows };
    Job::new(cfg)?.finish(&result, &russo_csv(&rows), &plot_csv(&plot))
}

fn audit_lemmas(cfg: RunConfig) -> Result<()> {
    let graphs = audit_graphs(&cfg)?;
    let ps = p_grid(&cfg)?;
    let rs = grid_or(&cfg, &audits::LEMMA_R)?;
    let tol = cfg.check.tol.unwrap_or(audits::LEMMA_TOL);
    let q = cfg.model.q.unwrap_or(2.0);
    let mut rows = Vec::new();
    for g in &graphs {
        lemma_cap(g)?;
        for &p in &ps {
            let model = exact_distribution(&g.graph, p, q)?;
            rows.extend(audits::lemma_rows(g, &model, &rs, tol));
            rows.extend(audits::independence_rows(g, &model, &rs, tol));
        }
    }
    #[derive(Serialize)]
    struct R {
        checks: u64,
        violations: u64,
        tol: f64,
        pass: bool,
    }
    let violations = rows.iter().map(|r| r.violations).sum();
    let result = R { checks: rows.iter().map(|r| r.checked).sum(), violations, tol, pass: violations == 0 };
    let plot: Vec<_> = rows.iter().enumerate().map(|(i, r)| (i as f64, r.worst_lhs - r.worst_rhs, 0.0)).collect();
    Job::new(cfg)?.finish(&result, &lemma_csv(&rows), &plot_csv(&plot))
}

fn audit_pivotal(mut cfg: RunConfig) -> Result<()> {
    let n = *cfg.window.n.get_or_insert(6);
    if n == 0 {
        return Err(Error::Config("window.n: must be at least 1".into()));
    }
    let r = cfg.model.r.map_or(Ok(0.5), |_| cfg.r())?;
    cfg.model.r = Some(r);
    let mode = mode(&cfg)?;
    let spec = prepared_spec(&mut cfg, Parallelogram::s(n, 6 * n))?;
    let out = sampler::run(&spec, |s| ex::pivotal_bound(s.lattice, s.sample, r, n, mode))?;
    let mut raw = String::from("chain,index,c,pivotal,distinct,holds\n");
    let (mut cases, mut failures) = (0u64, 0u64);
    let mut plot = Vec::new();
    for (c, chain) in out.chains.into_iter().enumerate() {
        for (i, case) in chain.into_iter().enumerate() {
            if let Some(case) = case? {
                cases += 1;
                failures += !case.holds() as u64;
                plot.push((case.c as f64, case.pivotal as f64, 0.0));
                raw.push_str(&format!("{c},{i},{},{},{},{}\n", case.c, case.pivotal, case.distinct_pivotal, case.holds()));
            }
        }
    }
    #[derive(Serialize)]
    struct R {
        n: u32,
        r: f64,
        samples: u64,
        conditioned_cases: u64,
        failures: u64,
        pass: bool,
    }
    let samples = spec.chains as u64 * spec.samples as u64;
    let result = R { n, r, samples, conditioned_cases: cases, failures, pass: failures == 0 };
    Job::new(cfg)?.finish(&result, &raw, &plot_csv(&plot))
}

fn tail_csv(fit: &crate::stats::TailFit) -> (String, String) {
    let mut raw = String::from("x,log_survival\n");
    let mut plot = Vec::new();
    for (x, y) in fit.x.iter().zip(&fit.log_survival) {
        raw.push_str(&csv_line(&[fmt17(*x), fmt17(*y)]));
        plot.push((*x, *y, 0.0));
    }
    (raw, plot_csv(&plot))
}

fn fit_cluster_tail(mut cfg: RunConfig) -> Result<()> {
    let region = cfg.region()?;
    let r = cfg.r()?;
    let spacing = *cfg.window.spacing.get_or_insert(4);
    let spec = prepared_spec(&mut cfg, region)?;
    let job = Job::new(cfg)?;
    let res = ex::cluster_tail(&spec, r, spacing, &job.fp)?;
    let (raw, plot) = tail_csv(&res.fit);
    job.finish(&res, &raw, &plot)
}

fn fit_fk_range(mut cfg: RunConfig) -> Result<()> {
    let region = cfg.region()?;
    let spacing = *cfg.window.spacing.get_or_insert(4);
    let spec = prepared_spec(&mut cfg, region)?;
    let res = ex::fk_range_tail(&spec, spacing)?;
    #[derive(Serialize)]
    struct R<'a> {
        psi: f64,
        suggested_buffer: u32,
        fit: &'a crate::stats::TailFit,
        info: &'a ex::RunInfo,
    }
    let (raw, plot) = tail_csv(&res.fit);
    let result = R { psi: res.psi, suggested_buffer: sampler::default_buffer(res.psi), fit: &res.fit, info: &res.info };
    Job::new(cfg)?.finish(&result, &raw, &plot)
}
