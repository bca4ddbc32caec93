use std::process::{Command, Output};

use qdc_core::cli;

fn qdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdc")).args(args).env_remove(cli::SEED_ENV).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

const GENERIC: [&str; 6] = ["--eta", "0.5", "--alpha", "0.5235987755982988", "--phi", "1.0471975511965976"];

#[test]
fn simulate_particle_branch() {
    let o = qdc(&["simulate", "--eta", "1", "--alpha", "0", "--phi", "0", "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    let p: Vec<f64> = v["joint"]["probabilities"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (i, x) in p.iter().enumerate() {
        let want = if i == 0 || i == 4 { 0.5 } else { 0.0 };
        assert!((x - want).abs() < 1e-12, "entry {i}: {x}");
    }
    assert!(v["circuit_residual"].as_f64().unwrap() <= 1e-12);

    let text = stdout(&qdc(&["simulate", "--eta", "1", "--alpha", "0", "--phi", "0"]));
    assert_eq!(text.lines().count(), 11);
    assert!(text.contains("circuit residual"));
}

#[test]
fn ci_at_generic_point() {
    let mut args = vec!["ci"];
    args.extend(GENERIC);
    let o = qdc(&args);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "A ⫫ C | {B}\nC ⫫ A | {B}\n");

    args.extend(["--format", "json"]);
    let v = json(&qdc(&args));
    assert_eq!(v["relations"], serde_json::json!([{"x": ["A"], "y": ["C"], "given": ["B"]}]));
}

#[test]
fn ci_at_degenerate_point_lists_more() {
    let o = qdc(&["ci", "--eta", "0.5", "--alpha", "0.5235987755982988", "--phi", "1.5707963267948966"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().count() > 2);
}

#[test]
fn discover_prints_chain() {
    let mut args = vec!["discover"];
    args.extend(GENERIC);
    args.extend(["--format", "json"]);
    let v = json(&qdc(&args));
    assert_eq!(v["separating_sets"]["A|C"], serde_json::json!(["B"]));
    assert_eq!(v["edges"].as_array().unwrap().len(), 2);
    assert!(v["edges"].as_array().unwrap().iter().all(|e| e["mark"] == "oo"));
    assert_eq!(v["rule_firings"], serde_json::json!([]));
}

#[test]
fn discover_from_relation_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rel.json");
    std::fs::write(&path, r#"{"variables": ["A", "B", "C"], "relations": [{"x": ["A"], "y": ["C"], "given": []}]}"#)
        .unwrap();
    let o = qdc(&["discover", "--ci-file", path.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    // Marginal independence of A and C makes B a collider.
    assert_eq!(v["separating_sets"]["A|C"], serde_json::json!([]));
    assert!(v["edges"].as_array().unwrap().iter().all(|e| e["to"] == "B" && e["mark"] == "o->"));

    std::fs::write(&path, r#"{"variables": ["A", "B"], "relations": [{"x": ["A"], "y": ["Q"], "given": []}]}"#)
        .unwrap();
    assert_eq!(qdc(&["discover", "--ci-file", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(qdc(&["discover", "--ci-file", "/nonexistent/rel.json"]).status.code(), Some(2));
}

#[test]
fn enumerate_groups() {
    let o = qdc(&["enumerate", "--ordering", "ACB"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no causal structures"));

    for (ord, n) in [("ABC", 3), ("B<A<C", 5), ("BCA", 5), ("CBA", 3), ("CAB", 0)] {
        let v = json(&qdc(&["enumerate", "--ordering", ord, "--format", "json"]));
        assert_eq!(v["count"], n, "{ord}");
        assert_eq!(v["structures"].as_array().unwrap().len(), n);
    }
    let dot = stdout(&qdc(&["enumerate", "--ordering", "CBA", "--format", "dot"]));
    assert_eq!(dot.matches("digraph G {").count(), 3);
    assert!(dot.contains("B -> A;"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["enumerate", "--ordering", "ABB"],
        vec!["enumerate"],
        vec!["simulate", "--eta", "1.5", "--alpha", "0", "--phi", "0"],
        vec!["simulate", "--eta", "x", "--alpha", "0", "--phi", "0"],
        vec!["ci", "--eta", "0.5", "--alpha", "0", "--phi", "0", "--format", "dot"],
        vec!["frobnicate"],
        vec![],
    ] {
        let o = qdc(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("--help"), "{args:?}");
    }
    assert_eq!(qdc(&["--help"]).status.code(), Some(0));
}

#[test]
fn report_bundle_and_determinism() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let a = qdc(&["report", "--out", d1.path().to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(stdout(&a).contains("[3, 5, 5, 3, 0, 0]"));
    assert!(qdc(&["report", "--out", d2.path().to_str().unwrap()]).status.success());
    let plain = qdc(&["report"]);

    let dir = d1.path();
    let file = std::fs::read_to_string(dir.join("report.json")).unwrap();
    assert!(
        file == std::fs::read_to_string(d2.path().join("report.json")).unwrap(),
        "report.json differs between runs"
    );
    assert!(file == stdout(&plain), "report.json differs from stdout");
    let v: serde_json::Value = serde_json::from_str(&file).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["soundness"]["seed"], 20_240_917);

    let dots = dir.join("dot");
    let count = |tag: &str| {
        std::fs::read_dir(&dots)
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with(tag))
            .count()
    };
    assert_eq!(
        [count("ABC_"), count("BAC_"), count("BCA_"), count("CBA_"), count("ACB_"), count("CAB_")],
        [3, 5, 5, 3, 0, 0]
    );
    assert!(dots.join("ABC_0.dot").exists());
}

#[test]
fn seed_env_overrides_flag() {
    let run = |env: Option<&str>, flag: &str| {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = cli::run_with_seed_env(
            ["qdc", "report", "--trials", "1", "--seed", flag],
            env.map(String::from),
            &mut out,
            &mut err,
        );
        assert_eq!(code, 0);
        serde_json::from_slice::<serde_json::Value>(&out).unwrap()["soundness"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, "5"), 5);
    assert_eq!(run(Some("9"), "5"), 9);

    let o = Command::new(env!("CARGO_BIN_EXE_qdc"))
        .args(["report", "--trials", "1"])
        .env(cli::SEED_ENV, "77")
        .output()
        .unwrap();
    assert_eq!(json(&o)["soundness"]["seed"], 77);
    let bad = Command::new(env!("CARGO_BIN_EXE_qdc")).args(["report"]).env(cli::SEED_ENV, "seven").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn failed_assertion_exits_1() {
    // A coarse tolerance admits spurious independences on the generic grid.
    let o = qdc(&["report", "--tol", "0.5", "--trials", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["passed"], false);
}
