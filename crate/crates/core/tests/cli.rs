use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kolportrait")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

const EXAMPLE: [&str; 10] = ["--b0", "2", "--b1", "1", "--b2", "1", "--b3", "1", "--c0", "1"];

#[test]
fn classify_prints_json() {
    let mut args = vec!["classify"];
    args.extend(EXAMPLE);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let j = json(&out);
    assert_eq!(j["G"], "G4");
    assert_eq!(j["R"], "R3");
    assert_eq!(j["O1"], "L1_2");
    assert_eq!(j["O2"], "L2_1");
    assert_eq!(j["connection"]["algebraic"], "B");
}

#[test]
fn classify_accepts_fractions_and_negatives() {
    let out = run(&["classify", "--b0", "-2", "--b1", "-1", "--b2", "-1", "--b3", "-1", "--c0", "-1/2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["G"], "G3");
}

#[test]
fn render_writes_svg_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("portrait.svg");
    let mut args = vec!["render", "--out", path.to_str().unwrap()];
    args.extend(EXAMPLE);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("class=\"infinity\""));
    assert!(svg.contains("class=\"separatrix\""));
}

#[test]
fn tables_lists_every_row() {
    let out = run(&["tables"]);
    assert!(out.status.success());
    let j = json(&out);
    assert_eq!(j["global_entries"], 36);
    assert_eq!(j["condition_rows"], 32);
    assert_eq!(j["classes"].as_array().unwrap().len(), 13);
}

#[test]
fn sweep_over_inline_grid() {
    let out = run(&[
        "sweep", "--range", "b0=2", "--range", "b1=1", "--range", "b2=1", "--range", "b3=1", "--range", "c0=0.5:1.5:3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let j = json(&out);
    assert_eq!(j["samples"], 3);
    assert_eq!(j["support_ok"], true);
}

#[test]
fn inadmissible_point_exits_with_2() {
    let out = run(&["classify", "--b0", "1", "--b1", "0", "--b2", "1", "--b3", "1", "--c0", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("b1"));
}

#[test]
fn malformed_sweep_spec_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    std::fs::write(&path, r#"{"grdi": {}}"#).unwrap();
    let out = run(&["sweep", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
