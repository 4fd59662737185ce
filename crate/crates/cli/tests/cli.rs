use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn plgb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plgb")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_reports_shape_of_hopf_data() {
    let o = plgb(&["validate", data("su2_hopf.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("4 generators, 3 frame elements, 1 fibre basis elements"));
}

#[test]
fn s1_text_report_passes() {
    let o = plgb(&["check", data("s1_group.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    for line in text.lines().filter(|l| l.contains(" inputs")) {
        assert!(line.ends_with("PASS") || line.ends_with("SKIP"), "{line}");
    }
    assert!(text.trim_end().ends_with("10/10 checks passed"));
}

#[test]
fn unknown_check_is_a_usage_error() {
    let o = plgb(&["check", data("s1_group.json").to_str().unwrap(), "--checks", "frobnicate"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn explicitly_selected_check_with_missing_block_is_an_input_error() {
    let o = plgb(&["check", data("s1_group.json").to_str().unwrap(), "--checks", "gamma"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bundle"));
}

#[test]
fn missing_file_is_an_input_error() {
    let o = plgb(&["validate", "/nonexistent/spec.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bad_flag_is_a_usage_error() {
    let o = plgb(&["check", data("s1_group.json").to_str().unwrap(), "--degree-bound", "many"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn zero_xi_with_nonzero_cobracket_fails_antisymmetrization() {
    let text = std::fs::read_to_string(data("su2_selfaction.json")).unwrap();
    let mut spec: serde_json::Value = serde_json::from_str(&text).unwrap();
    spec["fibre"]["xi_star"] = serde_json::json!({});
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero_xi.json");
    std::fs::write(&path, serde_json::to_string(&spec).unwrap()).unwrap();
    let o = plgb(&["check", path.to_str().unwrap(), "--checks", "xi_compat"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("antisymmetrization"), "{out}");
    assert!(out.contains("FAIL"));
}

#[test]
fn json_report_is_deterministic_and_parses() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = plgb(&[
            "check",
            data("su2_selfaction.json").to_str().unwrap(),
            "--checks",
            "jacobi,compat,plg,bicovariance",
            "--seed",
            "7",
            "--format",
            "json",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["degree_bound"], 4);
    assert_eq!(v["summary"]["passed"], 3);
    assert_eq!(v["summary"]["failed"], 0);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for c in checks {
        for key in ["id", "inputs", "defect", "status", "ms"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }
    let bic = checks.iter().find(|c| c["id"] == "bicovariance").unwrap();
    assert_eq!(bic["status"], "info");
    assert!(bic["defect"].as_str().unwrap().contains("(H,Xp,H,Xp)"));
}

#[test]
fn induce_writes_a_reloadable_base_with_descended_action() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("base.json");
    let o = plgb(&[
        "induce",
        data("su2_hopf.json").to_str().unwrap(),
        "--action",
        data("su2_selfaction.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["ring"]["generators"], serde_json::json!(["z", "zs", "x"]));
    assert_eq!(v["poisson"]["z,x"], "z*x");
    assert_eq!(v["action"]["chirality"], "right");
    let o = plgb(&["check", out.to_str().unwrap(), "--checks", "jacobi,compat,curvature,plg,covariance"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn induce_without_bundle_block_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("base.json");
    let o = plgb(&["induce", data("s1_group.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}
