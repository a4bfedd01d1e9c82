//! End-to-end runs of the `mzbayes` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn mzbayes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzbayes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_sets(cmd: &str, sets: &[&str], extra: &[&str]) -> Output {
    let mut args = vec![cmd];
    for s in sets {
        args.extend(["--set", s]);
    }
    args.extend(extra);
    mzbayes(&args)
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("valid JSON")
}

/// Rows of a CSV body as `(header, rows)`.
fn csv(body: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = body.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

const FOCK_1_0: [&str; 4] = ["a.kind=fock", "a.n=1", "b.kind=fock", "b.n=0"];

#[test]
fn compute_single_photon_is_sql() {
    let mut sets = FOCK_1_0.to_vec();
    sets.push("total_photons=100");
    let v = json(&with_sets("compute", &sets, &["--format", "json"]));
    assert_eq!(v["report"]["inverse_dth2"].as_f64().unwrap(), 50.0);
    assert_eq!(v["closed_forms"][0]["formula"], "fock_pair");
    assert_eq!(v["closed_forms"][0]["inverse_dth2"].as_f64().unwrap(), 50.0);
    assert_eq!(v["report"]["copies_M"].as_f64().unwrap(), 100.0);
}

#[test]
fn compute_squeezed_matches_closed_form() {
    let sets = [
        "a.kind=squeezed_vacuum",
        "a.r=1",
        "a.psi=0",
        "b.kind=coherent",
        "b.b=31.62",
        "b.phi=0",
        "total_photons=1000",
    ];
    let v = json(&with_sets("compute", &sets, &["--format", "json"]));
    let engine = v["report"]["inverse_dth2"].as_f64().unwrap();
    let forms = v["closed_forms"].as_array().unwrap();
    assert!(!forms.is_empty());
    for f in forms {
        let closed = f["inverse_dth2"].as_f64().unwrap();
        assert!(
            (engine - closed).abs() / closed < 1e-6,
            "{f}: engine {engine}"
        );
    }
}

#[test]
fn zero_photon_configuration_is_rejected() {
    let out = with_sets(
        "compute",
        &[
            "a.kind=fock",
            "a.n=0",
            "b.kind=fock",
            "b.n=0",
            "total_photons=10",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero-photon configuration"));
}

#[test]
fn bad_config_names_the_field() {
    let out = with_sets(
        "compute",
        &["a.kind=fock", "a.n=-1", "b.kind=fock", "b.n=0", "copies=3"],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a.n"));

    let out = with_sets(
        "compute",
        &["a.kind=laser", "b.kind=fock", "b.n=1", "copies=3"],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a.kind"));

    let out = mzbayes(&["compute", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"a.kind": "fock", "a.n": 2, "b.kind": "fock", "b.n": 2, "total_photons": 40}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let v = json(&mzbayes(&["compute", "--config", cfg, "--format", "json"]));
    assert!((v["report"]["inverse_dth2"].as_f64().unwrap() - 60.0).abs() < 1e-9);

    let v = json(&mzbayes(&[
        "compute", "--config", cfg, "--set", "b.n=0", "--format", "json",
    ]));
    assert!((v["report"]["inverse_dth2"].as_f64().unwrap() - 20.0).abs() < 1e-9);
}

#[test]
fn sweep_psi_peaks_at_twice_phi() {
    let sets = [
        "a.kind=squeezed_vacuum",
        "a.r=0.7",
        "a.psi=0",
        "b.kind=coherent",
        "b.b=3",
        "b.phi=1.1",
        "total_photons=100",
        "sweep.param=a.psi",
        "sweep.min=0",
        "sweep.max=6.283185307179586",
        "sweep.steps=721",
    ];
    let (h, rows) = csv(&stdout(&with_sets("sweep", &sets, &["--format", "csv"])));
    assert_eq!(rows.len(), 721);
    let psi = column(&h, &rows, "value");
    let engine = column(&h, &rows, "inv_dth2_engine");
    let closed = column(&h, &rows, "inv_dth2_closed");
    for (e, c) in engine.iter().zip(&closed) {
        assert!((e - c).abs() / c < 1e-8);
    }
    let best = (0..psi.len())
        .max_by(|&i, &j| engine[i].total_cmp(&engine[j]))
        .unwrap();
    assert!(
        (psi[best] - 2.2).abs() <= psi[1] - psi[0],
        "argmax {}",
        psi[best]
    );
}

#[test]
fn sweep_r_reaches_squeezing_gain() {
    let sets = [
        "a.kind=squeezed_vacuum",
        "a.r=0",
        "a.psi=0.6",
        "b.kind=coherent",
        "b.b=100",
        "b.phi=0.3",
        "total_photons=1000",
        "sweep.param=a.r",
        "sweep.min=0",
        "sweep.max=1",
        "sweep.steps=5",
    ];
    let (h, rows) = csv(&stdout(&with_sets("sweep", &sets, &["--format", "csv"])));
    let r = column(&h, &rows, "value");
    let ratio = column(&h, &rows, "sql_ratio");
    for (r, q) in r.iter().zip(&ratio) {
        let gain = (2.0 * r).exp();
        assert!((q - gain).abs() / gain < 2e-3, "r = {r}: {q} vs {gain}");
    }
}

#[test]
fn sweep_endpoints_are_inclusive() {
    let mut sets = FOCK_1_0.to_vec();
    sets.extend([
        "total_photons=1",
        "sweep.param=total_photons",
        "sweep.min=10",
        "sweep.max=20",
        "sweep.steps=2",
    ]);
    let (h, rows) = csv(&stdout(&with_sets("sweep", &sets, &["--format", "csv"])));
    assert_eq!(column(&h, &rows, "value"), vec![10.0, 20.0]);
    assert_eq!(column(&h, &rows, "inv_dth2_engine"), vec![5.0, 10.0]);
}

#[test]
fn posterior_is_close_to_gaussian() {
    let mut sets = FOCK_1_0.to_vec();
    sets.extend([
        "copies=400",
        "grid.min=-0.5",
        "grid.max=0.5",
        "grid.points=2001",
    ]);
    let v = json(&with_sets("posterior", &sets, &["--format", "json"]));
    let tv = v["summary"]["total_variation_distance"].as_f64().unwrap();
    assert!(tv < 0.05, "TV {tv}");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2001);
    let total: f64 = rows
        .iter()
        .map(|r| r["exact_posterior"].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn posterior_without_copies_is_flat() {
    let mut sets = FOCK_1_0.to_vec();
    sets.extend([
        "copies=0",
        "grid.min=-0.5",
        "grid.max=0.5",
        "grid.points=51",
    ]);
    let (h, rows) = csv(&stdout(&with_sets(
        "posterior",
        &sets,
        &["--format", "csv"],
    )));
    let p = column(&h, &rows, "exact_posterior");
    // trapezoid masses: interior points equal, endpoints half
    for x in &p[1..p.len() - 1] {
        assert!((x - p[1]).abs() < 1e-15);
    }
    assert!((p[0] - p[1] / 2.0).abs() < 1e-15);
}

#[test]
fn squeezed_posterior_is_narrower() {
    // Same copies and same mean photon number per copy, so the same N.
    let phi = 0.4_f64;
    let baseline_b = (100.0 + 1f64.sinh().powi(2)).sqrt();
    let grid = "copies=10 grid.min=-0.3 grid.max=0.3 grid.points=1201";
    let squeezed = format!(
        "a.kind=squeezed_vacuum a.r=1 a.psi={} b.kind=coherent b.b=10 b.phi={phi} {grid}",
        2.0 * phi
    );
    let coherent = format!("a.kind=fock a.n=0 b.kind=coherent b.b={baseline_b} b.phi={phi} {grid}");
    let summary = |sets: &str| {
        let sets: Vec<&str> = sets.split_whitespace().collect();
        json(&with_sets("posterior", &sets, &["--format", "json"]))["summary"].clone()
    };
    let (s, c) = (summary(&squeezed), summary(&coherent));
    let width = |v: &Value| v["exact_std_dev"].as_f64().unwrap();
    assert!(width(&s) < width(&c), "squeezed {s}, coherent {c}");
}

#[test]
fn verify_passes_and_injected_fault_fails() {
    let out = mzbayes(&["verify", "--max-photons", "12", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("all checks passed"));

    assert_eq!(
        mzbayes(&["verify", "--max-photons", "1"]).status.code(),
        Some(0)
    );

    let out = mzbayes(&["verify", "--max-photons", "6", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL normal_ordered_identity"));

    assert_eq!(
        mzbayes(&["verify", "--max-photons", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = mzbayes(&[
            "verify",
            "--max-photons",
            "8",
            "--seed",
            "3",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));

    let sets = [
        "a.kind=squeezed_vacuum",
        "a.r=0.5",
        "a.psi=1",
        "b.kind=coherent",
        "b.b=2",
        "b.phi=0.5",
        "copies=30",
        "sweep.param=a.r",
        "sweep.min=0",
        "sweep.max=1",
        "sweep.steps=9",
    ];
    let a = stdout(&with_sets("sweep", &sets, &[]));
    let b = stdout(&with_sets("sweep", &sets, &[]));
    assert_eq!(a, b);
}

#[test]
fn output_format_follows_extension() {
    let dir = tempfile::tempdir().unwrap();
    let mut sets = FOCK_1_0.to_vec();
    sets.push("copies=10");

    let json_path = dir.path().join("out.json");
    stdout(&with_sets(
        "compute",
        &sets,
        &["--output", json_path.to_str().unwrap()],
    ));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(v["report"]["inverse_dth2"].as_f64().unwrap(), 5.0);

    let csv_path = dir.path().join("out.csv");
    stdout(&with_sets(
        "compute",
        &sets,
        &["--output", csv_path.to_str().unwrap()],
    ));
    let (h, rows) = csv(&std::fs::read_to_string(&csv_path).unwrap());
    assert_eq!(column(&h, &rows, "inverse_dth2"), vec![5.0]);
}

#[test]
fn text_and_json_agree_exactly() {
    let sets = [
        "a.kind=squeezed_vacuum",
        "a.r=0.9",
        "a.psi=2",
        "b.kind=coherent",
        "b.b=1.7",
        "b.phi=0.8",
        "total_photons=123",
    ];
    let v = json(&with_sets("compute", &sets, &["--format", "json"]));
    let text = stdout(&with_sets("compute", &sets, &[]));
    for (label, key) in [
        ("inverse_dth2", "inverse_dth2"),
        ("mean_L2_sq", "mean_L2_sq"),
        ("copies_M", "copies_M"),
    ] {
        let line = text
            .lines()
            .find(|l| l.split_whitespace().next() == Some(label))
            .unwrap();
        let printed: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert_eq!(printed, v["report"][key].as_f64().unwrap(), "{label}");
    }
}
