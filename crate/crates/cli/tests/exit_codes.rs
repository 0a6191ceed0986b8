use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pauli-ctx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).display().to_string()
}

fn expected_contextual(path: &PathBuf) -> bool {
    let text = std::fs::read_to_string(path).unwrap();
    if text.contains("# expect: contextual") {
        true
    } else {
        assert!(
            text.contains("# expect: noncontextual"),
            "{}",
            path.display()
        );
        false
    }
}

#[test]
fn check_and_witness_exit_codes_match_fixture_verdicts() {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "ham"))
        .collect();
    paths.sort();
    assert!(!paths.is_empty());
    for path in &paths {
        let want = i32::from(expected_contextual(path));
        for cmd in ["check", "witness"] {
            let out = run(&[cmd, path.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(want), "{cmd} {}", path.display());
        }
    }
}

#[test]
fn json_witness_round_trips() {
    let out = run(&["witness", "--format", "json", &fixture("peres_mermin.ham")]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["verdict"]["result"], "contextual");
    assert_eq!(v["verdict"]["form"], "Form3");
    assert_eq!(v["witness"]["tree"]["pauli"], "II");
    assert_eq!(v["witness"]["tree"]["sign"], -1);
    assert_eq!(v["witness"]["determining_set"], serde_json::json!([]));
}

#[test]
fn several_files_produce_a_json_array_and_the_worst_code() {
    let out = run(&[
        "check",
        "--format",
        "json",
        &fixture("deuteron_n2.ham"),
        &fixture("form1.ham"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["input"]["label"], "deuteron_n2");
}

#[test]
fn measure_reports_requested_distances() {
    let out = run(&[
        "measure",
        "--format",
        "json",
        "--p",
        "0,1,2,inf",
        &fixture("peres_mermin.ham"),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let m = &v["measures"];
    assert_eq!(m["cd0"], "1/4");
    assert_eq!(m["distances"].as_array().unwrap().len(), 4);
    assert_eq!(m["distances"][2]["p"], "2");
    assert!((m["distances"][2]["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let out = run(&[
        "measure",
        "--method",
        "greedy",
        "--seed",
        "3",
        &fixture("peres_mermin.ham"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("CD0 = 1/2"));
}

#[test]
fn exact_search_refuses_above_cap() {
    let out = run(&["measure", "--exact-cap", "3", &fixture("peres_mermin.ham")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("greedy"));
}

#[test]
fn errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ham");
    std::fs::write(&bad, "1.0 ZI\n1.0 ZIX\n").unwrap();
    let out = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(
        run(&["check", dir.path().join("missing.ham").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["measure", "--p", "0.5", &fixture("peres_mermin.ham")])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn graph_writes_dot_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("pm.dot");
    let out = run(&[
        "graph",
        "-o",
        out_path.to_str().unwrap(),
        &fixture("peres_mermin.ham"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(out_path).unwrap();
    assert!(dot.starts_with("graph \"peres_mermin\""));
    assert_eq!(dot.matches(" -- ").count(), 4);
}
