use std::process::{Command, Output};

use serde_json::Value;

const R23: &str = "ratios:2,3;repeat growth=bounded basic";

fn dtopo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtopo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = dtopo(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn expand_factorial() {
    let r = report(&["expand", "--dseq", "factorial", "--value", "10"]);
    assert_eq!(r["command"], "expand");
    assert_eq!(r["result"]["expansion"]["digits"], serde_json::json!([0, -1, 2]));
    assert_eq!(r["params"]["dseq"], "factorial");
    let back = report(&["value", "--dseq", "factorial", "--digits", "0,-1,2"]);
    assert_eq!(back["result"]["value"], 10);
}

#[test]
fn negative_values_parse() {
    let r = report(&["expand", "--dseq", "ratios:2,3;repeat", "--value", "-3"]);
    assert_eq!(r["result"]["expansion"]["digits"], serde_json::json!([1, 1, 1, -1]));
    assert_eq!(r["result"]["partial_sum_violation"]["n"], 2);
}

#[test]
fn kill_rounds() {
    let r = report(&["kill", "--dseq", R23, "--xs", "terms", "--rounds", "2"]);
    let rounds = r["result"]["rounds"].as_array().unwrap();
    let pairs: Vec<(u64, u64)> = rounds
        .iter()
        .map(|x| (x["n"].as_u64().unwrap(), x["m"].as_u64().unwrap()))
        .collect();
    assert_eq!(pairs, vec![(1, 1), (3, 3)]);
    assert!(rounds.iter().all(|x| x["witness"] == "1/3"));
    assert_eq!(r["result"]["c"], serde_json::json!([1, 6, 36]));
}

#[test]
fn verify_lemma1_passes() {
    let out = dtopo(&["verify", "lemma1", "--max-den", "200", "--max-m", "12", "--max-n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["result"]["pass"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS"));
}

#[test]
fn certificate_schema() {
    let r = report(&["graev-member", "--dseq", R23, "--x", "24"]);
    assert_eq!(r["result"]["verdict"], "YES");
    let cert = &r["result"]["certificate"];
    assert_eq!(cert["x"], 24);
    assert_eq!(cert["k"], 2);
    for t in cert["terms"].as_array().unwrap() {
        let keys: Vec<&str> = t.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        assert_eq!(keys, ["index", "sign", "slot"]);
        assert!(t["sign"] == 1 || t["sign"] == -1);
    }
    assert_eq!(r["provenance"]["caps"]["max_k"], 8);
}

#[test]
fn unknown_under_strict() {
    // A finite index sequence of one slot cannot reach 8 = 6 + 2.
    let args = ["graev-member", "--dseq", R23, "--x", "8", "--prefix", "1", "--affine", "none"];
    let relaxed = dtopo(&args);
    assert_eq!(relaxed.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&relaxed.stdout).unwrap();
    assert_eq!(r["result"]["verdict"], "UNKNOWN");
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(dtopo(&strict).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(dtopo(&["expand", "--value", "3"]).status.code(), Some(2));
    assert_eq!(dtopo(&["no-such-command"]).status.code(), Some(2));
    let bad = dtopo(&["term", "--dseq", "ratios:1,3", "--n", "1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("q_1"));
    let parse = dtopo(&["term", "--dseq", "ratios:2,x", "--n", "1"]);
    assert!(String::from_utf8_lossy(&parse.stderr).contains("position 9"));
    assert_eq!(dtopo(&["build-a", "--dseq", "factorial"]).status.code(), Some(2));
}

#[test]
fn failing_verdict_exits_1() {
    // With a single element of A the Graev polar is larger than Z(b_N).
    let out = dtopo(&["verify", "lqc-mod", "--dseq", R23, "--window", "6", "--count", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["result"]["pass"], false);
}

#[test]
fn deterministic_output() {
    let cases: [&[&str]; 5] = [
        &["build-a", "--dseq", R23, "--count", "12"],
        &["graev-polar", "--dseq", R23, "--window", "6", "--count", "40"],
        &["polar", "--dseq", "factorial", "--set", "1", "--window", "2"],
        &["qc-check", "--dseq", "factorial", "--set", "0,1", "--window", "2", "--range", "10"],
        &["gamma-member", "--dseq", R23, "--member", "0,2,4@3", "--member", "all@1", "--x", "36"],
    ];
    for args in cases {
        let a = dtopo(args);
        let b = dtopo(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn json_indent_and_reports() {
    let compact = dtopo(&["--json-indent", "0", "enum-chars", "--dseq", "factorial", "--window", "2"]);
    let text = String::from_utf8(compact.stdout).unwrap();
    assert_eq!(text.trim_end().lines().count(), 1);
    let r: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(r["result"]["count"], 6);
    for key in ["command", "params", "result", "provenance"] {
        assert!(r.get(key).is_some(), "{key}");
    }
    let polar = report(&["graev-polar", "--dseq", R23, "--window", "6"]);
    assert_eq!(polar["result"]["equals_z_bn"], true);
    assert_eq!(polar["result"]["n"], 3);
}

#[test]
fn membership_commands() {
    let t = report(&["tau-member", "--dseq", "factorial", "--m", "1", "--x", "1"]);
    assert_eq!(t["result"]["member"], false);
    assert_eq!(t["result"]["failing_index"], 1);
    let sub = report(&["tau-member", "--dseq", R23, "--indices", "2,4", "--m", "3", "--x", "2"]);
    assert_eq!(sub["result"]["member"], false);
    let l = report(&["lambda-member", "--dseq", "factorial", "--n", "2", "--x", "12"]);
    assert_eq!(l["result"]["member"], true);
    let h = report(&["hull", "--dseq", "factorial", "--set", "0", "--window", "2", "--range", "10"]);
    assert_eq!(h["result"]["points"], serde_json::json!([-6, 0, 6]));
    let term = report(&["term", "--dseq", "factorial", "--n", "3", "--all"]);
    assert_eq!(term["result"]["terms"], serde_json::json!([1, 2, 6, 24]));
    assert_eq!(term["result"]["ratio"], 4);
}
