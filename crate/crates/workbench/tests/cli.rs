use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.rgw.json"))
}

fn rgw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rgw")).args(args).output().expect("run rgw")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rgw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn validate_corpus_file() {
    let o = rgw(&["validate", corpus("su2-round").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("su2-round: valid"));
}

#[test]
fn report_machine_output() {
    let o = rgw(&["report", corpus("su2-round").to_str().unwrap(), "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "rgw-report/1");
    assert_eq!(v["scalar"]["s"], 1.5);
    assert_eq!(v["naturally_reductive"], true);
    assert_eq!(v["split_solvable"], "no");
    let first = &v["levi_civita"][0];
    assert_eq!((first["i"].as_u64(), first["j"].as_u64()), (Some(0), Some(1)));
    assert_eq!(first["value"], serde_json::json!([0.0, 0.0, 0.5]));
}

#[test]
fn codazzi_exact_prints_rationals() {
    let o = rgw(&["codazzi", corpus("su2-balanced").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("dimension 3"));
    assert!(text.contains("1/4"));
    assert!(text.contains("essential true"));
}

#[test]
fn theorems_corpus_passes() {
    for extra in [&[][..], &["--exact"][..]] {
        let mut args = vec!["theorems", "--corpus"];
        args.extend_from_slice(extra);
        let o = rgw(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).ends_with("0 with failures\n"));
    }
}

#[test]
fn theorems_machine_output_has_no_timing() {
    let o = rgw(&["theorems", corpus("heisenberg").to_str().unwrap(), "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains("elapsed"));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["reports"][0]["structure"]["nilpotency_degree"], 3);
}

#[test]
fn invalid_space_exits_with_one() {
    // antisymmetric and Jacobi, but the metric is not ad(h)-invariant
    let path = scratch(
        "bad-metric.rgw.json",
        r#"{"name": "bad", "dim_h": 1, "dim_m": 2, "exact": true,
            "brackets": [{"i": 0, "j": 1, "coeffs": ["0", "0", "1"]},
                         {"i": 0, "j": 2, "coeffs": ["0", "-1", "0"]},
                         {"i": 1, "j": 2, "coeffs": ["1", "0", "0"]}],
            "metric": ["1", "0", "0", "2"]}"#,
    );
    for cmd in ["validate", "report", "codazzi", "theorems"] {
        let o = rgw(&[cmd, path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{cmd}");
    }
}

#[test]
fn input_errors_exit_with_two() {
    let broken = scratch("broken.rgw.json", "{\"name\": ");
    let o = rgw(&["validate", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    assert_eq!(rgw(&["validate", "/nonexistent/x.rgw.json"]).status.code(), Some(2));
    assert_eq!(rgw(&["fuzz", "--seed", "1", "--count", "1", "--dim", "0"]).status.code(), Some(2));
    assert_eq!(rgw(&["frobnicate"]).status.code(), Some(2));
    let unknown = scratch("unknown.rgw.json", r#"{"dim_h": 0, "dim_m": 1, "metric": [1], "extra": 1}"#);
    assert_eq!(rgw(&["validate", unknown.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn fuzz_documents_round_trip() {
    let o = rgw(&["fuzz", "--seed", "7", "--count", "4", "--dim", "3", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let list = v["instances"].as_array().unwrap();
    assert_eq!(list.len(), 4);
    for inst in list {
        let text = serde_json::to_string(&inst["document"]).unwrap();
        let doc = rgw_workbench::document::parse_document(&text).unwrap();
        assert_eq!(doc.dim_m, 3);
        let path = scratch(&format!("{}.rgw.json", doc.name), &doc.to_json());
        assert_eq!(rgw(&["validate", path.to_str().unwrap()]).status.code(), Some(0));
    }
}

#[test]
fn tolerance_flag_is_checked() {
    let o = rgw(&["validate", corpus("heisenberg").to_str().unwrap(), "--tol", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}
