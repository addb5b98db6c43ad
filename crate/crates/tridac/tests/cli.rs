//! End-to-end runs of the `tridac` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tridac::formats::read_edge_dump;
use tridac::output::verify_manifest;

fn tridac(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tridac"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("TRIDAC_OUT")
        .output()
        .expect("binary runs")
}

fn files(dir: &Path, suffix: &str) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(suffix))
        .collect();
    v.sort();
    v
}

fn summary(dir: &Path) -> serde_json::Value {
    let f = files(dir, ".summary.json");
    assert_eq!(f.len(), 1, "{f:?}");
    serde_json::from_str(&fs::read_to_string(&f[0]).unwrap()).unwrap()
}

#[test]
fn sample_at_beta_zero_is_all_closed_and_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["sample", "--beta", "0", "--box", "8", "8", "--count", "3", "--seed", "1"];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(tridac(&args, &a).status.success());
    assert!(tridac(&args, &b).status.success());
    let dumps = files(&a, ".edges.txt");
    assert_eq!(dumps.len(), 3);
    for d in &dumps {
        let (header, configs) = read_edge_dump(&fs::read_to_string(d).unwrap()).unwrap();
        assert_eq!(header.beta, 0.0);
        assert_eq!(configs.len(), 1);
        assert_eq!(configs[0].count_open(), 0);
        assert_eq!(configs[0].len(), header.edges);
    }
    for f in fs::read_dir(&a).unwrap() {
        let f = f.unwrap();
        assert_eq!(fs::read(f.path()).unwrap(), fs::read(b.join(f.file_name())).unwrap(), "{:?}", f.file_name());
    }
    assert!(verify_manifest(&a).unwrap().is_empty());
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tridac(&["sample", "--beta", "-1", "--box", "8", "8"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("model.beta"));
    assert_eq!(tridac(&["estimate", "crossing", "--beta", "0.1"], tmp.path()).status.code(), Some(2));
    assert_eq!(tridac(&["estimate", "nonsense"], tmp.path()).status.code(), Some(2));
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[model]\nbeta = 0.1\nbogus = 1\n").unwrap();
    let o = tridac(&["estimate", "crossing", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn oracle_cap_exits_3_and_guard_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tridac(&["exact", "--box", "4", "4", "--p", "0.5"], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    let o = tridac(
        &["estimate", "crossing", "--beta", "8", "--r", "0.5", "--region", "square", "8", "--buffer", "1", "--samples", "10"],
        &tmp.path().join("g"),
    );
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("guard"));
    // a failed run leaves no manifest behind
    assert!(!tmp.path().join("g").join("manifest.json").exists());
}

#[test]
fn exact_tables() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(tridac(&["exact", "--graph", "triangle", "--p", "0.5"], tmp.path()).status.success());
    // weights 8, 4, 4, 4, 2, 2, 2, 2 over 0..3 open edges: P(open) = 10/28
    let raw = fs::read_to_string(&files(tmp.path(), ".raw.csv")[0]).unwrap();
    for line in raw.lines().skip(1) {
        let p: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((p - 10.0 / 28.0).abs() < 1e-15);
    }
    let s = summary(tmp.path());
    assert_eq!(s["result"]["lemma_violations"], 0);
    assert!(s["result"]["russo_max_gap"].as_f64().unwrap() <= 1e-6);
    assert!(files(tmp.path(), ".lemmas.csv").len() == 1 && files(tmp.path(), ".russo.csv").len() == 1);

    let q1 = tmp.path().join("q1");
    assert!(tridac(&["exact", "--box", "1", "1", "--p", "0.3", "--q", "1"], &q1).status.success());
    let raw = fs::read_to_string(&files(&q1, ".raw.csv")[0]).unwrap();
    for line in raw.lines().skip(1) {
        let p: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((p - 0.3).abs() < 1e-15, "{line}");
    }
    let joint = fs::read_to_string(&files(&q1, ".joint.csv")[0]).unwrap();
    let cells: Vec<f64> = joint.lines().nth(1).unwrap().split(',').skip(2).map(|x| x.parse().unwrap()).collect();
    assert!((cells[3] - 0.09).abs() < 1e-15);
}

#[test]
fn audit_russo_on_a_box() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(tridac(&["audit", "russo", "--box", "1", "1"], tmp.path()).status.success());
    let s = summary(tmp.path());
    assert_eq!(s["result"]["pass"], true);
    assert!(s["result"]["max_gap"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn summary_embeds_config_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(
        &cfg,
        "[model]\nbeta = 0.3\nr = 0.5\n[window]\nregion = \"square 32\"\n[sampler]\nseed = 7\nchains = 4\nsamples = 50\n",
    )
    .unwrap();
    let out = tmp.path().join("o");
    let o = tridac(&["estimate", "crossing", "--config", cfg.to_str().unwrap(), "--seed", "9"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["seed"], 9);
    assert_eq!(s["config"]["sampler"]["chains"], 4);
    assert_eq!(s["config"]["command"], "estimate crossing");
    let fp = s["fingerprint"].as_str().unwrap();
    assert!(files(&out, ".summary.json")[0].to_string_lossy().contains(fp));
    let v = s["result"]["estimate"]["value"].as_f64().unwrap();
    let se = s["result"]["estimate"]["se"].as_f64().unwrap();
    assert!((v - 0.5).abs() <= 3.0 * se + 0.01, "{v} {se}");
    // 17 significant digits
    let text = fs::read_to_string(&files(&out, ".summary.json")[0]).unwrap();
    assert!(text.contains("\"beta\": 0.29999999999999999"), "{text}");
    assert!(verify_manifest(&out).unwrap().is_empty());

    // the embedded config reproduces the run
    let again = tmp.path().join("again");
    let cfg2 = tmp.path().join("again.toml");
    let embedded: tridac::config::RunConfig = serde_json::from_value(s["config"].clone()).unwrap();
    fs::write(&cfg2, embedded.to_toml()).unwrap();
    assert!(tridac(&["estimate", "crossing", "--config", cfg2.to_str().unwrap()], &again).status.success());
    assert_eq!(summary(&again)["result"], s["result"]);
}

#[test]
fn thread_count_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["estimate", "theta", "--beta", "0.2", "--r-grid", "0.4,0.6", "--region", "square", "16", "--chains", "4", "--samples", "20"];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let mut three = args.to_vec();
    three.extend(["--threads", "3"]);
    assert!(tridac(&one, &a).status.success());
    assert!(tridac(&three, &b).status.success());
    for f in fs::read_dir(&a).unwrap() {
        let f = f.unwrap();
        assert_eq!(fs::read(f.path()).unwrap(), fs::read(b.join(f.file_name())).unwrap());
    }
}

#[test]
fn output_directory_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tridac"))
        .args(["audit", "russo", "--graph", "single", "--p", "0.4"])
        .env("TRIDAC_OUT", tmp.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(tmp.path().join("manifest.json").exists());
}

#[test]
fn rc_sweep_at_beta_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tridac(&["sweep", "rc", "--beta", "0", "--n", "64", "--chains", "4", "--samples", "50", "--bootstrap", "50"], tmp.path());
    assert!(o.status.success());
    let r = summary(tmp.path())["result"][0]["r_hat"].as_f64().unwrap();
    assert!((0.45..=0.55).contains(&r), "{r}");
    let plot = fs::read_to_string(&files(tmp.path(), ".plot.csv")[0]).unwrap();
    assert!(plot.starts_with("x,y,yerr\n64.000000000000000,"), "{plot}");
}
