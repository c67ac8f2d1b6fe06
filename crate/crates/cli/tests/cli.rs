use std::path::PathBuf;
use std::process::{Command, Output};

use mapcone::Tolerances;
use mapcone_cli::report::{revalidate, AnalysisReport, KindJson};
use serde_json::Value;

fn mapcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapcone"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn report(args: &[&str]) -> AnalysisReport {
    let mut full = vec!["analyze"];
    full.extend_from_slice(args);
    full.push("--json");
    let o = mapcone(&full);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn kind(r: &AnalysisReport, cone: &str) -> KindJson {
    r.verdicts
        .iter()
        .find(|v| v.cone == cone)
        .unwrap_or_else(|| panic!("no verdict for {cone}"))
        .kind
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mapcone-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn analyze_choi3() {
    let r = report(&["--gallery", "choi3"]);
    assert_eq!(r.schema, 1);
    assert!(r.self_adjoint);
    assert!((r.split.c.unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(kind(&r, "positive"), KindJson::HeuristicYes);
    assert_eq!(kind(&r, "2-positive"), KindJson::CertifiedNo);
    assert_eq!(kind(&r, "cp"), KindJson::CertifiedNo);
    assert_eq!(kind(&r, "decomposable"), KindJson::CertifiedNo);
    let dec = r.verdicts.iter().find(|v| v.cone == "decomposable").unwrap();
    assert!(matches!(
        dec.witness,
        Some(mapcone_cli::report::WitnessJson::State { .. })
    ));
    let two = r.verdicts.iter().find(|v| v.cone == "2-positive").unwrap();
    assert!(matches!(
        two.witness,
        Some(mapcone_cli::report::WitnessJson::Vector { .. })
    ));
}

#[test]
fn analyze_trace() {
    let r = report(&["--gallery", "trace"]);
    assert!((r.split.c.unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(kind(&r, "cp"), KindJson::CertifiedYes);
    for cone in ["positive", "2-positive", "3-positive"] {
        assert_eq!(kind(&r, cone), KindJson::CertifiedYes, "{cone}");
    }
}

#[test]
fn analyze_reduction_half() {
    let r = report(&["--gallery", "reduction", "--param", "0.5", "--dim", "3"]);
    assert_eq!(kind(&r, "2-positive"), KindJson::HeuristicYes);
    assert_eq!(kind(&r, "3-positive"), KindJson::CertifiedNo);
}

#[test]
fn report_witnesses_revalidate() {
    let tol = Tolerances::default();
    for args in [
        &["--gallery", "choi3"][..],
        &["--gallery", "transpose", "--dim", "2"],
        &["--gallery", "reduction", "--param", "0.5", "--dim", "3"],
    ] {
        let r = report(args);
        let text = serde_json::to_string(&r).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(r.verdicts.iter().any(|v| v.witness.is_some()));
        let failures = revalidate(&back, &tol);
        assert!(failures.is_empty(), "{failures:?}");
    }
}

#[test]
fn tampered_witness_fails_revalidation() {
    let mut r = report(&["--gallery", "choi3"]);
    let v = r.verdicts.iter_mut().find(|v| v.cone == "2-positive").unwrap();
    v.value += 1e-6;
    assert_eq!(revalidate(&r, &Tolerances::default()).len(), 1);
}

#[test]
fn json_is_deterministic() {
    let args = [
        "analyze",
        "--gallery",
        "choi3",
        "--json",
        "--seed",
        "7",
        "--restarts",
        "8",
    ];
    let a = mapcone(&args);
    let b = mapcone(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("\"seed\": 7"));
}

#[test]
fn timings_are_opt_in() {
    let plain = report(&["--gallery", "trace", "--dim", "2"]);
    assert!(plain.timings_ms.is_none());
    let timed = report(&["--gallery", "trace", "--dim", "2", "--timings"]);
    assert!(timed.timings_ms.unwrap().contains_key("cp"));
}

#[test]
fn non_self_adjoint_map_is_recorded() {
    // x -> e12 Tr(x): not Hermiticity preserving.
    let mut choi = vec![[0.0, 0.0]; 16];
    choi[1] = [1.0, 0.0];
    choi[2 * 4 + 3] = [1.0, 0.0];
    let text = serde_json::json!({"dim_k": 2, "dim_h": 2, "choi": choi}).to_string();
    let path = temp_file("skew.json", &text);
    let r = report(&["--choi", path.to_str().unwrap()]);
    assert!(!r.self_adjoint);
    assert!(!r.split.exists);
    assert_eq!(kind(&r, "cp"), KindJson::CertifiedNo);
    assert!(r.verdicts.iter().all(|v| v.cone == "cp"));
    assert_eq!(r.skipped.len(), 3);
    match r.map {
        mapcone_cli::report::MapIdentity::File { sha256, .. } => assert_eq!(sha256.len(), 64),
        other => panic!("{other:?}"),
    }
}

#[test]
fn split_trace_and_identity() {
    let o = mapcone(&["split", "--gallery", "trace", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["c"].as_f64(), Some(1.0));
    assert!(v["phi_cp"]["choi"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|z| z.as_array().unwrap())
        .all(|x| x.as_f64() == Some(0.0)));
    assert!(v["residual"].as_f64().unwrap() <= 1e-9);

    let o = mapcone(&["split", "--gallery", "identity", "--dim", "2", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["c"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn norm_identity_cp() {
    let o = mapcone(&["norm", "--gallery", "identity", "--dim", "3", "--cone", "cp", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!(v["method"].as_str().unwrap().contains("exact"));
}

#[test]
fn malformed_json_exits_2() {
    let path = temp_file("bad.json", "{\"dim_k\": 2,");
    let o = mapcone(&["analyze", "--choi", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("malformed"));
    assert!(o.stdout.is_empty());

    let o = mapcone(&["analyze", "--gallery", "nonesuch"]);
    assert_eq!(o.status.code(), Some(2));
    let o = mapcone(&["analyze", "--choi", "/nonexistent/map.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn negative_of_cp_map_exits_3() {
    let path = temp_file("minus.json", r#"{"dim_k": 1, "dim_h": 1, "choi": [[-1.0, 0.0]]}"#);
    for cmd in ["split", "decomposable", "witness"] {
        let o = mapcone(&[cmd, "--choi", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(3), "{cmd}");
        assert!(stderr(&o).contains("\u{2212}\u{3c6} is completely positive; split undefined"));
    }
    // analyze treats it as an outcome
    let r = report(&["--choi", path.to_str().unwrap()]);
    assert!(!r.split.exists);
    assert_eq!(kind(&r, "positive"), KindJson::CertifiedNo);
    assert!(revalidate(&r, &Tolerances::default()).is_empty());
}

#[test]
fn kpos_with_oracle() {
    let o = mapcone(&[
        "kpos",
        "--gallery",
        "transpose",
        "--dim",
        "2",
        "--oracle",
        "300",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let verdicts = v["verdicts"].as_array().unwrap();
    assert_eq!(verdicts[0]["kind"], "heuristic_yes");
    assert_eq!(verdicts[1]["kind"], "certified_no");
    assert!(verdicts[1]["value"].as_f64().unwrap() >= 2.0 - 1e-6);
    assert_eq!(v["oracle"][0]["violations"], 0);
    assert!(v["oracle"][1]["violations"].as_u64().unwrap() > 0);

    let o = mapcone(&["kpos", "--gallery", "choi3", "--k", "2"]);
    assert!(stdout(&o).contains("no (certified)"));
}

#[test]
fn witness_command() {
    let o = mapcone(&["witness", "--gallery", "choi3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["preconditions"]["ok"], true);
    assert!(v["objective"].as_f64().unwrap() > 1.0 + 1e-7);
    assert_eq!(v["schmidt_rank"], 2);

    // identity: <y, C y> = 1 at the uniform product vector
    let o = mapcone(&["witness", "--gallery", "identity", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["preconditions"]["ok"], false);
    assert!(v["witness"].is_null());
}

#[test]
fn decomposable_command() {
    let o = mapcone(&["decomposable", "--gallery", "choi3", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"]["kind"], "certified_no");
    let o = mapcone(&["decomposable", "--gallery", "transpose", "--dim", "2", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"]["kind"], "heuristic_yes");
}

#[test]
fn paper_example_matches_golden() {
    let o = mapcone(&["paper-example", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    let golden: Value = serde_json::from_str(include_str!("golden/paper_example.json")).unwrap();
    for side in v["sides"].as_array().unwrap() {
        let label = side["map"].as_str().unwrap();
        let g = &golden[label];
        assert!(side["overlap"].as_f64().unwrap().abs() <= 1e-12);
        assert!(side["image_norm"].as_f64().unwrap() > 1e-6);
        assert!(
            (side["c"].as_f64().unwrap() - g["c"].as_f64().unwrap()).abs() < 1e-12,
            "{label}"
        );
        let w = side["witness_value"].as_f64().unwrap();
        assert!((w - g["witness_value"].as_f64().unwrap()).abs() < 1e-9, "{label}: {w}");
        assert!(w > 1.0 + 1e-7);
    }
    let text = stdout(&mapcone(&["paper-example"]));
    assert!(text.contains("atomic"));
    assert!(text.contains("external result"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn gallery_list() {
    let o = mapcone(&["gallery", "list"]);
    let text = stdout(&o);
    for name in ["identity", "transpose", "trace", "choi3", "reduction", "adv"] {
        assert!(text.contains(name));
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mapcone(&["analyze"]).status.code(), Some(2));
    assert_eq!(
        mapcone(&["norm", "--gallery", "trace", "--cone", "bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        mapcone(&["kpos", "--gallery", "trace", "--k", "0"]).status.code(),
        Some(2)
    );
}
