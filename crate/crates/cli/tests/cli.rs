use std::process::{Command, Output};

use serde_json::Value;

fn gl2lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gl2lab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn verify_norm_reports_the_bijection() {
    let out = gl2lab(&["verify-norm", "--p", "2", "--r", "2", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "verify-norm");
    assert_eq!(v["result"]["bijection"], true);
    assert_eq!(v["result"]["orbits"].as_array().unwrap().len(), 3);
    assert_eq!(v["verdict"]["failed"], 0);
}

#[test]
fn verify_tower_passes() {
    let out = gl2lab(&["verify-tower", "--q", "2", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["samples"], 200);
}

#[test]
fn census_emits_csv() {
    let out = gl2lab(&["census", "--q", "4", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("a1,a2,a3,a4,a6,j,points,trace"));
    // 13 isomorphism classes over F_4, then the totals line
    assert_eq!(text.lines().count(), 1 + 13 + 1);
    assert!(text.ends_with("# total,2,level_points,2\n"));
}

#[test]
fn census_json_carries_the_lefschetz_report() {
    let out = gl2lab(&["census", "--q", "7", "--m", "3", "--n", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["lefschetz"]["level_points"], 8);
    assert_eq!(v["result"]["lefschetz"]["boundary"], "384");
}

#[test]
fn eval_phi_examples() {
    let out = gl2lab(&["eval-phi", "--p", "2", "--n", "1", "--gamma", "[[2,0],[0,1]]"]);
    assert_eq!(json(&out)["result"]["value"], "3");
    let out = gl2lab(&["eval-phi", "--p", "2", "--n", "1", "--gamma", "[[0,1],[-2,0]]", "--deformed"]);
    let v = json(&out);
    assert_eq!(v["result"]["value"], "-3");
    assert_eq!(v["result"]["deformed_at_q"], "-3");
    let out = gl2lab(&["eval-phi", "--p", "3", "--n", "0", "--gamma", "[[0,1],[-3,0]]"]);
    assert_eq!(json(&out)["result"]["value"], "1/2");
}

#[test]
fn tree_commands() {
    let out = gl2lab(&["tree-orbital", "--p", "3", "--n", "2", "--gamma", "[[0,1],[-3,3]]"]);
    assert_eq!(out.status.code(), Some(0));
    // (1 + q)(1 - q^n) at q = 3, n = 2
    assert_eq!(json(&out)["result"]["closed_form"], "-32");
    let out = gl2lab(&["tree-fixed-set", "--p", "2", "--gamma", "p^-1 * [[4,0],[-1,2]]"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["k_tree"], 1);
}

#[test]
fn ss_trace_and_boundary() {
    let out = gl2lab(&["ss-trace", "--p", "2", "--n", "1", "--kind", "supersingular"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["closed_form"], -3);
    let out = gl2lab(&["boundary", "--p", "7", "--r", "1", "--n", "1", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["formula"], "384");
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        &["census", "--q", "6", "--m", "3"][..],
        &["census", "--q", "9", "--m", "3"],
        &["boundary", "--p", "4", "--r", "1", "--n", "1", "--m", "3"],
        &["verify-tower", "--q", "2"],
        &["eval-phi", "--p", "2", "--n", "1", "--gamma", "[[1,2]]"],
        &["ss-trace", "--p", "2", "--n", "1", "--kind", "ordinary"],
        &["verify-central", "--q", "2", "--n", "1", "--generators", "9"],
        &["no-such-command"],
    ] {
        let out = gl2lab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn reports_are_byte_deterministic() {
    let args = ["verify-orbital", "--q", "3", "--n", "1", "--samples", "12", "--seed", "17"];
    let a = gl2lab(&args);
    let b = gl2lab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = gl2lab(&["verify-orbital", "--q", "3", "--n", "1", "--samples", "12", "--seed", "18"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("gl2lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("central.json");
    let out = gl2lab(&["verify-central", "--q", "2", "--n", "1", "--generators", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["verdict"]["total"], 3);
    assert!(v.get("wall_clock_ms").is_none());
    std::fs::remove_dir_all(&dir).unwrap();
}
