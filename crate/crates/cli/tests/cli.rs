use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rclt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rclt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_without_wall_time(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    let wall = headers.iter().position(|h| h == "wall_ms").unwrap();
    r.records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != wall)
                .map(|(_, v)| v.to_string())
                .collect()
        })
        .collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const SUBGRAPH: [&str; 12] = [
    "bound", "--model", "subgraph", "--patterns", "edge,triangle", "--n", "8..16", "--p", "0.5",
    "--samples", "500", "--backend",
];

#[test]
fn same_seed_gives_identical_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let mut args = SUBGRAPH.to_vec();
        args.extend(["mc", "--seed", "7", "--out", out.to_str().unwrap()]);
        assert!(rclt(&args).status.success());
        outs.push(csv_without_wall_time(&out.with_extension("csv")));
    }
    assert_eq!(outs[0], outs[1]);
    assert!(!outs[0].is_empty());
}

#[test]
fn csv_and_json_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let mut args = SUBGRAPH.to_vec();
    args.extend(["mc", "--out", out.to_str().unwrap()]);
    assert!(rclt(&args).status.success());
    let j = json(&out.with_extension("json"));
    assert_eq!(j["command"], "bound");
    assert!(!j["version"].as_str().unwrap().is_empty());
    assert_eq!(j["config"]["n"], serde_json::json!([8, 16]));
    let rows = j["rows"].as_array().unwrap();
    let mut r = csv::Reader::from_path(out.with_extension("csv")).unwrap();
    let records: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), records.len());
    for (row, rec) in rows.iter().zip(&records) {
        assert_eq!(row["experiment"], rec[0]);
        assert_eq!(row["term"], rec[4]);
        let v: f64 = rec[5].parse().unwrap();
        assert_eq!(row["value"].as_f64().unwrap(), v);
    }
    // one total per n, each with 2 × 2 cells for five terms
    let totals = rows.iter().filter(|r| r["term"] == "total").count();
    assert_eq!(totals, 2);
    assert_eq!(rows.len(), 2 * (5 * 4 + 1));
}

#[test]
fn verify_passes_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let o = rclt(&["verify", "--n", "6", "--instances", "10", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = json(&out.with_extension("json"))["rows"].as_array().unwrap().clone();
    for r in rows.iter().filter(|r| r["term"] != "poincare_slack") {
        assert!(r["value"].as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let out = out.to_str().unwrap();
    for args in [
        vec!["bound", "--model", "voxel", "--n", "4", "--out", out],
        vec!["bound", "--model", "voxel", "--n", "4", "--p", "1.5", "--out", out],
        vec!["bound", "--model", "subgraph", "--patterns", "nonsense", "--n", "4", "--p", "0.5", "--out", out],
        vec!["bound", "--model", "degree", "--degrees", "1", "--n", "8", "--theta", "0.5", "--backend", "mc", "--samples", "10", "--out", out],
        vec!["bound", "--model", "other", "--n", "4", "--out", out],
    ] {
        let o = rclt(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn capacity_errors_exit_two_with_a_hint() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let o = rclt(&[
        "bound", "--model", "subgraph", "--patterns", "edge", "--n", "64", "--p", "0.5",
        "--backend", "exact", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--backend mc"), "{err}");
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cfg");
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "[model]\nkind = \"voxel\"\nn = \"4..8\"\np = 0.5\ndim = 1\n\n[run]\nseed = 3\nbackend = \"exact\"\nout = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = rclt(&["bound", "--config", cfg.to_str().unwrap(), "--p", "0.3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&out.with_extension("json"));
    assert_eq!(j["config"]["p"], 0.3);
    assert_eq!(j["config"]["seed"], 3);
    assert_eq!(j["config"]["n"], serde_json::json!([4, 8]));

    std::fs::write(&cfg, "[model]\nkind = \"voxel\"\nbogus = 1\n").unwrap();
    assert_eq!(rclt(&["bound", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn rates_appends_slope_rows_once() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = out.to_str().unwrap();
    let run = rclt(&["bound", "--model", "voxel", "--dim", "1", "--n", "4..16", "--p", "0.5", "--backend", "exact", "--out", o]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let before = json(&out.with_extension("json"))["rows"].as_array().unwrap().len();
    for _ in 0..2 {
        assert!(rclt(&["rates", "--out", o]).status.success());
    }
    let j = json(&out.with_extension("json"));
    let rows = j["rows"].as_array().unwrap();
    assert_eq!(rows.len(), before + 2);
    let slope = rows.iter().find(|r| r["term"] == "slope").unwrap();
    assert_eq!(slope["experiment"], "bound-cubical");
    assert!(slope["value"].as_f64().unwrap() < 0.0);
    assert_eq!(csv_without_wall_time(&out.with_extension("csv")).len(), rows.len());
}

#[test]
fn rates_without_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing");
    assert_eq!(rclt(&["rates", "--out", out.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn surrogate_reports_three_rows_per_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = rclt(&[
        "surrogate", "--model", "degree", "--degrees", "0,1", "--n", "16", "--theta", "0.5",
        "--samples", "2000", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&out.with_extension("json"));
    let terms: Vec<&str> = j["rows"].as_array().unwrap().iter().map(|r| r["term"].as_str().unwrap()).collect();
    assert_eq!(terms, ["surrogate", "surrogate_lower", "bound_total"]);
}
