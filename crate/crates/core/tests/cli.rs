use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn lz(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lozenge")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = lz(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json_file(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn region_enumerate_entropy_pipeline() {
    let t = TempDir::new().unwrap();
    let d = t.path();
    ok(d, &["region", "--hexagon", "1,1,1", "--out", "r.json"]);
    assert!(d.join("r.json.manifest.json").exists());
    ok(d, &["enumerate", "--region", "r.json", "--out", "r.set", "--summary", "sum.json"]);
    let sum = json_file(&d.join("sum.json"));
    assert_eq!(sum["count"], 2);
    assert_eq!(sum["schema_version"], "1.0");

    ok(d, &["entropy", "--set", "r.set", "--q", "1", "--s", "1", "--out", "e.json"]);
    let e = json_file(&d.join("e.json"));
    assert!((e["s_total"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);

    let m = json_file(&d.join("e.json.manifest.json"));
    assert_eq!(m["command"], "entropy");
    let hash = m["input_hashes"].as_object().unwrap().values().next().unwrap().as_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    // Data files carry no timing, so reruns are byte-identical.
    let first = std::fs::read(d.join("e.json")).unwrap();
    ok(d, &["entropy", "--set", "r.set", "--q", "1", "--s", "1", "--out", "e.json"]);
    assert_eq!(first, std::fs::read(d.join("e.json")).unwrap());
}

#[test]
fn disk_counts_through_the_cli() {
    let t = TempDir::new().unwrap();
    let d = t.path();
    ok(d, &["region", "--size", "8", "--out", "r.json"]);
    let out = ok(d, &["enumerate", "--region", "r.json"]);
    let sum: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(sum["count"], 96);
    assert_eq!(sum["connected"], true);
    // A cap below the count is a resource error.
    let out = lz(d, &["enumerate", "--region", "r.json", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let t = TempDir::new().unwrap();
    let d = t.path();
    assert_eq!(lz(d, &["region", "--bogus"]).status.code(), Some(64));
    assert_eq!(lz(d, &["frobnicate"]).status.code(), Some(64));
    assert_eq!(lz(d, &["region", "--size", "3", "--out", "x.json"]).status.code(), Some(1));
    assert_eq!(lz(d, &["validate", "--region", "missing.json"]).status.code(), Some(1));

    std::fs::write(d.join("empty.json"), r#"{"q": [], "L": [6]}"#).unwrap();
    assert_eq!(lz(d, &["sweep", "--config", "empty.json"]).status.code(), Some(1));
}

#[test]
fn validate_reports_edits() {
    let t = TempDir::new().unwrap();
    let d = t.path();
    ok(d, &["region", "--size", "6", "--out", "r.json"]);
    ok(d, &["validate", "--region", "r.json"]);
    let r = json_file(&d.join("r.json"));
    let n = r["vertices"].as_array().unwrap().len();
    let cfg = serde_json::json!({ "schema_version": "1.0", "heights": vec![0; n] });
    std::fs::write(d.join("c.json"), cfg.to_string()).unwrap();
    let out = lz(d, &["validate", "--region", "r.json", "--config", "c.json", "--out", "v.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_file(&d.join("v.json"))["valid"], false);

    let mut doc = r.clone();
    doc["schema_version"] = "2.0".into();
    std::fs::write(d.join("r2.json"), doc.to_string()).unwrap();
    assert_eq!(lz(d, &["validate", "--region", "r2.json"]).status.code(), Some(1));
}

#[test]
fn sampling_is_reproducible() {
    let t = TempDir::new().unwrap();
    let d = t.path();
    ok(d, &["region", "--size", "12", "--out", "r.json"]);
    let args = ["sample", "--region", "r.json", "--q", "1", "--steps", "2e4", "--burnin", "1000", "--seed", "5", "--chains", "2"];
    let a = ok(d, &[&args[..], &["--series", "a.csv", "--out", "a.json"]].concat());
    let b = ok(d, &[&args[..], &["--series", "b.csv", "--out", "b.json"]].concat());
    drop((a, b));
    assert_eq!(std::fs::read(d.join("a.csv")).unwrap(), std::fs::read(d.join("b.csv")).unwrap());
    assert_eq!(std::fs::read(d.join("a.json")).unwrap(), std::fs::read(d.join("b.json")).unwrap());
    let m = json_file(&d.join("a.json.manifest.json"));
    assert_eq!(m["seed"], 5);
}

#[test]
fn reduce_trace_length() {
    let t = TempDir::new().unwrap();
    let d = t.path();
    ok(d, &["region", "--hexagon", "2,2,2", "--out", "r.json"]);
    let r = json_file(&d.join("r.json"));
    let region = lozenge::LatticeRegion::from_json(&r).unwrap();
    let h = lozenge::tiling::max_config(&region).unwrap();
    std::fs::write(d.join("c.json"), h.to_json(&region).to_string()).unwrap();
    let out = ok(d, &["reduce", "--region", "r.json", "--config", "c.json", "--trace", "t.csv"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["moves"], 8);
    let trace = std::fs::read_to_string(d.join("t.csv")).unwrap();
    assert_eq!(trace.lines().count(), 9);
}

#[test]
fn gap_and_microcheck() {
    let t = TempDir::new().unwrap();
    let d = t.path();
    ok(d, &["region", "--size", "8", "--out", "r.json"]);
    ok(d, &["enumerate", "--region", "r.json", "--out", "r.set"]);
    let out = ok(d, &["gap", "--set", "r.set", "--q", "1"]);
    let g: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(g["e1"].as_f64().unwrap() > 0.2);

    ok(d, &["region", "--size", "2", "--out", "u.json"]);
    let out = ok(d, &["microcheck", "--region", "u.json", "--q", "1", "--s", "2"]);
    let m: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(m["formula_error"].as_f64().unwrap() < 1e-10);
    let out = lz(d, &["microcheck", "--region", "r.json", "--q", "1", "--s", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scaling_from_series() {
    let t = TempDir::new().unwrap();
    let d = t.path();
    let mut csv = String::from("L,q,s,value,stderr\n");
    for l in [8.0f64, 12.0, 16.0, 20.0, 24.0] {
        csv += &format!("{l},1,1,{},0.1\n", 0.5 * l * l);
    }
    std::fs::write(d.join("s.csv"), csv).unwrap();
    let out = ok(d, &["scaling", "--input", "s.csv"]);
    let f: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(f["best"], "volume");
}

#[test]
fn small_sweep_writes_all_outputs() {
    let t = TempDir::new().unwrap();
    let d = t.path();
    let cfg = serde_json::json!({
        "q": [0.8, 1.0],
        "L": [6, 8, 10, 12],
        "mode": "both",
        "chain": { "steps": 4000, "burn_in": 500, "chains": 2, "seed": 3 },
        "out_dir": "out",
    });
    std::fs::write(d.join("cfg.json"), cfg.to_string()).unwrap();
    ok(d, &["sweep", "--config", "cfg.json"]);
    let text = std::fs::read_to_string(d.join("out/sweep.csv")).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "L,q,s,method,mean_A,stderr_A,S_colorless,S_total,X0,n_configs_or_samples"
    );
    for f in ["sweep_cells.json", "sweep_fits.json", "sweep.gp", "sweep.csv.manifest.json"] {
        assert!(d.join("out").join(f).exists(), "{f}");
    }
    let cells = json_file(&d.join("out/sweep_cells.json"));
    let rows = cells["rows"].as_array().unwrap();
    // Exact and sampled rows for the enumerable sizes agree.
    for e in rows.iter().filter(|r| r["method"] == "exact") {
        let m = rows
            .iter()
            .find(|r| r["method"] == "mcmc" && r["L"] == e["L"] && r["q"] == e["q"])
            .unwrap();
        let diff = (e["mean_a"].as_f64().unwrap() - m["mean_a"].as_f64().unwrap()).abs();
        assert!(diff <= 4.0 * m["stderr_a"].as_f64().unwrap() + 1e-9, "{e} {m}");
    }

    // The same sweep on a rerun is byte-identical.
    let first = std::fs::read(d.join("out/sweep.csv")).unwrap();
    ok(d, &["sweep", "--config", "cfg.json"]);
    assert_eq!(first, std::fs::read(d.join("out/sweep.csv")).unwrap());
}
