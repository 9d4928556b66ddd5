use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn otto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otto"))
        .args(args)
        .env_remove("OTTO_THREADS")
        .output()
        .expect("spawn otto")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn manifest(path: &Path) -> Value {
    let text = std::fs::read_to_string(path.with_extension("manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

const CYCLE: [&str; 11] = [
    "cycle",
    "--omega-c",
    "1",
    "--omega-h",
    "2",
    "--beta-c",
    "0.2",
    "--beta-h",
    "0.05",
    "--v",
    "0",
];

#[test]
fn adiabatic_cycle_efficiency() {
    let out = otto(&[&CYCLE[..], &["--lambda", "1"]].concat());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    assert_eq!(doc["mode"], "engine");
    assert!((doc["eta"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(doc["config"]["lambda"], 1.0);
}

#[test]
fn equal_occupations_is_not_an_engine() {
    let out = otto(&[
        "cycle",
        "--omega-c",
        "1",
        "--omega-h",
        "2",
        "--beta-c",
        "0.2",
        "--beta-h",
        "0.1",
        "--v",
        "0",
        "--lambda",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let doc = json(&out);
    assert_eq!(doc["w_ext"], 0.0);
    assert!(doc["eta"].is_null());
}

#[test]
fn lambda_routing_matches_flag() {
    let a = otto(&[&CYCLE[..], &["--lambda", "1.25"]].concat());
    let b = otto(&[&CYCLE[..], &["--lambda-protocol", "sudden"]].concat());
    assert_eq!(a.status.code(), b.status.code());
    let (a, b) = (json(&a), json(&b));
    for key in ["w_ab", "w_cd", "q_h", "q_c", "w_ext", "eta", "lambda"] {
        assert_eq!(a[key], b[key], "{key}");
    }
}

#[test]
fn ramp_protocol_through_cycle() {
    let out = otto(
        &[
            &CYCLE[..],
            &["--lambda-protocol", "linear_omega", "--duration", "50"],
        ]
        .concat(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    let lam = doc["lambda"].as_f64().unwrap();
    assert!(lam > 1.0 && lam < 1.25);
    let s = &doc["stroke_lambdas"];
    let (c, e) = (
        s["compression"].as_f64().unwrap(),
        s["expansion"].as_f64().unwrap(),
    );
    assert!((c - e).abs() < 1e-8);
}

#[test]
fn tabulated_protocol_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("ramp.csv");
    let mut body = String::from("t,omega\n");
    for i in 0..=20 {
        let t = i as f64;
        body.push_str(&format!("{t},{}\n", 1.0 + t / 20.0));
    }
    std::fs::write(&table, body).unwrap();
    let out = otto(&["lambda", "--lambda-protocol", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let from_table = json(&out)["lambda"].as_f64().unwrap();
    let out = otto(&[
        "lambda",
        "--omega-c",
        "1",
        "--omega-h",
        "2",
        "--lambda-protocol",
        "linear_omega",
        "--duration",
        "20",
    ]);
    let analytic = json(&out)["lambda"].as_f64().unwrap();
    assert!(
        (from_table - analytic).abs() < 1e-9,
        "{from_table} {analytic}"
    );

    let out = otto(&[&CYCLE[..], &["--lambda-protocol", table.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = otto(&[
        "cycle",
        "--omega-c",
        "1",
        "--omega-h",
        "3",
        "--beta-c",
        "0.2",
        "--beta-h",
        "0.05",
        "--v",
        "0",
        "--lambda-protocol",
        table.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--lambda-protocol"));
}

#[test]
fn invalid_velocity_names_flag() {
    let out = otto(&[
        "cycle",
        "--omega-c",
        "1",
        "--omega-h",
        "2",
        "--beta-c",
        "0.2",
        "--beta-h",
        "0.1",
        "--v",
        "1.2",
        "--lambda",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert_eq!(err.trim().lines().count(), 1, "{err}");
    assert!(err.contains("--v"), "{err}");
}

#[test]
fn input_errors_exit_one() {
    for args in [
        &["cycle", "--v", "nope"][..],
        &["cycle", "--omega-c", "1"],
        &["bounds", "--tau", "1.5", "--v", "0.1"],
        &["bounds", "--tau", "0.5", "--v", "0.1", "--bogus", "1"],
        &["sweep", "--tau", "0.5", "--v", "0.9", "--z-grid", "0:1:0.1"],
        &["hist", "--preset", "fig3"],
        &["scatter", "--preset", "fig3", "--bins", "10"],
        &[
            "lambda",
            "--omega-c",
            "1",
            "--omega-h",
            "2",
            "--lambda-protocol",
            "linear_omega",
        ],
    ] {
        let out = otto(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert_eq!(
            stderr(&out).trim().lines().count(),
            1,
            "{args:?}: {}",
            stderr(&out)
        );
    }
    let out = otto(&["bounds", "--tau", "1.5", "--v", "0.1"]);
    assert!(stderr(&out).contains("--tau"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(otto(&["--help"]).status.code(), Some(0));
    assert_eq!(otto(&["cycle", "--help"]).status.code(), Some(0));
}

#[test]
fn bounds_anchors() {
    let doc = json(&otto(&["bounds", "--tau", "0.25", "--v", "0.9"]));
    assert!((doc["eta_ss_upper"].as_f64().unwrap() - 0.24369).abs() < 1e-4);
    let doc = json(&otto(&["bounds", "--tau", "0.5", "--v", "0.85"]));
    assert!((doc["eta_gen_carnot"].as_f64().unwrap() - 0.6108).abs() < 2e-3);
}

#[test]
fn bounds_csv_is_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("b.csv");
    let out = otto(&[
        "bounds",
        "--tau",
        "0.25",
        "--v",
        "0.9",
        "--format",
        "csv",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let col = lines[0]
        .split(',')
        .position(|h| h == "eta_ss_upper")
        .unwrap();
    let x: f64 = lines[1].split(',').nth(col).unwrap().parse().unwrap();
    assert!((x - 0.2436646791622913).abs() < 1e-15);
    assert_eq!(manifest(&out_path)["config"]["tau"], 0.25);
}

#[test]
fn sweep_crosses_zero_at_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let out = otto(&[
        "sweep",
        "--tau",
        "0.5",
        "--v",
        "0.9",
        "--z-grid",
        "0.05:0.95:0.01",
        "--regime",
        "adiabatic",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = csv_rows(&out_path);
    assert_eq!(rows.len(), 91);
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    let crossing = pts
        .windows(2)
        .find(|w| w[0].1 <= 0.0 && w[1].1 > 0.0)
        .expect("sign change");
    assert!(crossing[0].0 <= 0.356514 && 0.356514 <= crossing[1].0);
    // Rows with no work extraction have no efficiency.
    for r in &rows {
        let w: f64 = r[2].parse().unwrap();
        assert_eq!(r[3].is_empty(), w <= 0.0);
    }
}

#[test]
fn fig2_preset_has_four_curves() {
    let out = otto(&["sweep", "--preset", "fig2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    assert_eq!(doc["curves"].as_array().unwrap().len(), 4);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4 * 99);
}

#[test]
fn fig5_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("hist.csv");
    let out = otto(&[
        "hist",
        "--preset",
        "fig5",
        "--seed",
        "42",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m = manifest(&out_path);
    assert_eq!(m["violations"], 0);
    assert_eq!(m["seed"], 42);
    assert!(m["generator"].as_str().unwrap().starts_with("chacha8"));
    let rows = csv_rows(&out_path);
    assert_eq!(rows.len(), 50);
    let total: u64 = rows.iter().map(|r| r[2].parse::<u64>().unwrap()).sum();
    assert_eq!(total, m["accepted"].as_u64().unwrap());
    let bound = m["bound"].as_f64().unwrap();
    assert!(m["max_eta"].as_f64().unwrap() > bound - 0.02);
}

#[test]
fn scatter_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (p, threads) in [(&a, "1"), (&b, "3")] {
        let out = Command::new(env!("CARGO_BIN_EXE_otto"))
            .args([
                "scatter", "--preset", "fig3", "--count", "150000", "--seed", "9",
            ])
            .args(["--output", p.to_str().unwrap()])
            .env("OTTO_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(a.with_extension("manifest.json")).unwrap(),
        std::fs::read(b.with_extension("manifest.json")).unwrap()
    );
    assert_eq!(manifest(&a)["violations"], 0);
    let header = std::fs::read_to_string(&a).unwrap();
    assert!(header.starts_with("omega_c,omega_h,w_ext,eta\n"));
}

#[test]
fn manifest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let out = otto(&[
        "scatter",
        "--preset",
        "fig3",
        "--count",
        "5000",
        "--v",
        "0.6",
        "--seed",
        "3",
        "--output",
        a.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m = a.with_extension("manifest.json");
    let out = otto(&[
        "scatter",
        "--config",
        m.to_str().unwrap(),
        "--output",
        b.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(&m).unwrap(),
        std::fs::read(b.with_extension("manifest.json")).unwrap()
    );

    // JSON documents are their own manifests.
    let first = otto(&[&CYCLE[..], &["--lambda", "1.1"]].concat());
    let doc = dir.path().join("cycle.json");
    std::fs::write(&doc, &first.stdout).unwrap();
    let second = otto(&["cycle", "--config", doc.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"tau": 0.25, "v": 0.1}"#).unwrap();
    let doc = json(&otto(&[
        "bounds",
        "--config",
        cfg.to_str().unwrap(),
        "--v",
        "0.9",
    ]));
    assert_eq!(doc["v"], 0.9);
    assert_eq!(doc["tau"], 0.25);
    assert_eq!(doc["config"]["v"], 0.9);
}

#[test]
fn optimize_matches_closed_forms() {
    let out = otto(&["optimize", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    assert!(doc["max_abs_diff"].as_f64().unwrap() < 1e-6);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2 * 9 * 11);
}

#[test]
fn bad_thread_count() {
    let out = Command::new(env!("CARGO_BIN_EXE_otto"))
        .args(["bounds", "--tau", "0.5", "--v", "0.5"])
        .env("OTTO_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("OTTO_THREADS"));
}
