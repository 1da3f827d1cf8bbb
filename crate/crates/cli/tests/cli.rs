use elastic_scatter_cli::experiments;
use elastic_scatter_cli::report::point_seed;
use elastic_scatter_cli::ExperimentConfig;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_elastic-scatter");

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn write_config(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(format!("{name}.json"));
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn base(experiment: &str, sweep: Value) -> Value {
    json!({
        "schema_version": 1,
        "experiment": experiment,
        "medium": {"lambda": 2.0, "mu": 1.0, "omega": 1.0},
        "sweep": sweep,
        "seed": 11,
        "output": "unused"
    })
}

fn run(sub: &str, config: &Path, out: &Path, workers: usize) -> std::process::Output {
    Command::new(BIN)
        .args([sub, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--workers", &workers.to_string()])
        .output()
        .unwrap()
}

fn outputs(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "json") && !p.to_string_lossy().contains("config"))
        .collect();
    v.sort();
    v
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn example_configs_parse() {
    for entry in std::fs::read_dir(manifest().join("configs")).unwrap() {
        let p = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert!(p.to_string_lossy().contains(cfg.experiment.name()));
    }
}

/// The published schema lists exactly the fields each sweep type accepts.
#[test]
fn schema_matches_sweep_types() {
    let text = std::fs::read_to_string(manifest().join("schema/experiment-config.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let defaults = [
        ("sweep-small", serde_json::to_value(experiments::sweep_small::Sweep::default()).unwrap()),
        ("nonradiating-audit", serde_json::to_value(experiments::nonradiating_audit::Sweep::default()).unwrap()),
        ("cgo-verify", serde_json::to_value(experiments::cgo_verify::Sweep::default()).unwrap()),
        ("identity-check", serde_json::to_value(experiments::identity_check::Sweep::default()).unwrap()),
        ("kpoint-decay", serde_json::to_value(experiments::kpoint_decay::Sweep::default()).unwrap()),
        ("medium-demo", serde_json::to_value(experiments::medium_demo::Sweep::default()).unwrap()),
        ("distinguish", serde_json::to_value(experiments::distinguish::Sweep::default()).unwrap()),
    ];
    for (name, v) in defaults {
        let ours: BTreeSet<&String> = v.as_object().unwrap().keys().collect();
        let listed: BTreeSet<&String> = schema["$defs"][name]["properties"].as_object().unwrap().keys().collect();
        assert_eq!(ours, listed, "{name}");
    }
}

#[test]
fn point_seeds_are_stable_and_distinct() {
    assert_eq!(point_seed(7, 3), point_seed(7, 3));
    let seeds: BTreeSet<u64> = (0..1000).map(|i| point_seed(7, i)).collect();
    assert_eq!(seeds.len(), 1000);
    assert_ne!(point_seed(7, 0), point_seed(8, 0));
}

#[test]
fn unknown_field_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = base("distinguish", json!({}));
    v["medium"]["rho"] = json!(1.0);
    let cfg = write_config(dir.path(), "config", &v);
    let out = run("distinguish", &cfg, &dir.path().join("d"), 1);
    assert_eq!(out.status.code(), Some(2));
    assert!(outputs(dir.path()).is_empty());

    let v = base("distinguish", json!({"radius": 0.05, "spacing": 3.0}));
    let cfg = write_config(dir.path(), "config", &v);
    assert_eq!(run("distinguish", &cfg, &dir.path().join("d"), 1).status.code(), Some(2));
}

#[test]
fn mismatched_subcommand_and_version_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "config", &base("distinguish", json!({})));
    assert_eq!(run("sweep-small", &cfg, &dir.path().join("x"), 1).status.code(), Some(2));
    let mut v = base("distinguish", json!({}));
    v["schema_version"] = json!(2);
    let cfg = write_config(dir.path(), "config", &v);
    assert_eq!(run("distinguish", &cfg, &dir.path().join("x"), 1).status.code(), Some(2));
    let mut v = base("distinguish", json!({}));
    v["medium"]["mu"] = json!(-1.0);
    let cfg = write_config(dir.path(), "config", &v);
    assert_eq!(run("distinguish", &cfg, &dir.path().join("x"), 1).status.code(), Some(2));
    assert!(outputs(dir.path()).is_empty());
}

#[test]
fn failed_validation_exits_3_and_removes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    // A margin no solver can reach.
    let cfg = write_config(dir.path(), "config", &base("distinguish", json!({"min_margin": 1e300})));
    let out = run("distinguish", &cfg, &dir.path().join("d"), 2);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(outputs(dir.path()).is_empty());
}

#[test]
fn distinguish_margin_exceeds_noise() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "config", &base("distinguish", json!({})));
    let out = run("distinguish", &cfg, &dir.path().join("d"), 2);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("d_difference.csv"));
    let diff: f64 = rows[0][0].parse().unwrap();
    let margin: f64 = rows[0][2].parse().unwrap();
    assert!(diff > 0.0 && margin > 10.0);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("d_report.json")).unwrap()).unwrap();
    assert_eq!(report["experiment"], "distinguish");
    assert_eq!(report["config"]["medium"]["omega"], 1.0);
    assert!(report["artifact_version"].is_string());
}

#[test]
fn zero_intensity_row_has_zero_farfield() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = json!({"epsilons": [0.1], "intensities": [[0.0, 0.0], [1.0, 0.5]]});
    let cfg = write_config(dir.path(), "config", &base("sweep-small", sweep));
    let out = run("sweep-small", &cfg, &dir.path().join("s"), 2);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("s_points.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][4].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[0][5].parse::<f64>().unwrap(), 0.0);
    assert!(rows[1][4].parse::<f64>().unwrap() > 0.0);
    assert_eq!(&rows[1][10], "radiating-asserted");
}

#[test]
fn csv_uses_crlf_and_17_digits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "config", &base("sweep-small", json!({"epsilons": [0.1]})));
    assert!(run("sweep-small", &cfg, &dir.path().join("s"), 1).status.success());
    let text = std::fs::read_to_string(dir.path().join("s_points.csv")).unwrap();
    assert!(text.starts_with("epsilon,intensity_x,intensity_y,diameter,farfield_norm,noise,margin,lhs,rhs_structural,ratio,regime\r\n"));
    let first = text.lines().nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(first, "1.0000000000000001e-1");
}

/// Replays with the same seed give byte-identical tables, also across worker counts.
#[test]
fn replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let sweeps = [
        ("nonradiating-audit", json!({"epsilons": [0.1, 0.5], "tilts": [0.0, 0.3], "polarizations": [0.0, 1.0], "holdout": 4})),
        ("medium-demo", json!({"holdout": 3})),
        ("cgo-verify", json!({"probes": 50, "ladder_steps": 2, "residual_target": 1.0, "ks": [2.0], "tau_factors": [2.0], "mc_per_batch": 2000, "mc_batches": 8, "mc_relative": 0.5, "mc_sigmas": 10.0})),
    ];
    for (name, sweep) in sweeps {
        let cfg = write_config(dir.path(), &format!("{name}-config"), &base(name, sweep));
        let a = dir.path().join(format!("{name}-a"));
        let b = dir.path().join(format!("{name}-b"));
        for (prefix, workers) in [(&a, 1), (&b, 3)] {
            let out = run(name, &cfg, prefix, workers);
            assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        }
        let tables: Vec<PathBuf> = outputs(dir.path())
            .into_iter()
            .filter(|p| p.extension().unwrap() == "csv" && p.file_name().unwrap().to_string_lossy().starts_with(&format!("{name}-a_")))
            .collect();
        assert!(!tables.is_empty());
        for ta in tables {
            let tb = PathBuf::from(ta.to_string_lossy().replace(&format!("{name}-a_"), &format!("{name}-b_")));
            assert_eq!(std::fs::read(&ta).unwrap(), std::fs::read(&tb).unwrap(), "{}", ta.display());
        }
    }
}

#[test]
fn seed_flag_changes_random_draws() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = json!({"epsilons": [0.1, 0.5], "tilts": [0.0], "polarizations": [0.0], "holdout": 2});
    let cfg = write_config(dir.path(), "config", &base("nonradiating-audit", sweep));
    for (prefix, seed) in [("a", "1"), ("b", "2")] {
        let out = Command::new(BIN)
            .args(["nonradiating-audit", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path().join(prefix))
            .args(["--seed", seed])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.path().join("a_holdout.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b_holdout.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn short_identity_and_kpoint_runs_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let runs = [
        ("identity-check", json!({"dims": [2], "ks": [10.0], "panels": [3, 6]})),
        ("kpoint-decay", json!({"dims": [2], "calibration_ks": [5.0, 15.0], "holdout_ks": [10.0], "tau_factors": [1.0], "panels": 6})),
    ];
    for (name, sweep) in runs {
        let cfg = write_config(dir.path(), &format!("{name}-config"), &base(name, sweep));
        let out = run(name, &cfg, &dir.path().join(name), 2);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
