use std::io::Cursor;
use std::path::PathBuf;

use deon::run;

fn spec(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name).to_string_lossy().into_owned()
}

fn deon(args: &[&str]) -> (u8, String, String) {
    let mut argv = vec!["deon"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut Cursor::new(Vec::new()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn check_guess_reports_quantifier_gap() {
    let (code, out, _) = deon(&["check", &spec("guess.deon")]);
    assert_eq!(code, 0);
    assert!(out.contains("weak_viable: yes"));
    assert!(out.contains("strong_viable: no (state 0"));
    assert!(out.contains("consequence_independent: no"));

    let (_, json, _) = deon(&["check", &spec("guess.deon"), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["weak_viable"]["holds"], true);
    assert_eq!(v["strong_viable"]["holds"], false);
    assert_eq!(v["strong_viable"]["witness"]["state"], 0);
    assert_eq!(v["consequence_independent"]["holds"], false);
    assert_eq!(v["triviality"], "non-trivial");
    assert_eq!(v["governable_from_start"], false);
}

#[test]
fn member_exit_codes() {
    assert_eq!(deon(&["member", &spec("ng.deon"), "noop ok"]).0, 0);
    assert_eq!(deon(&["member", &spec("ng.deon"), "noop ok"]).1, "GOOD\n");
    assert_eq!(deon(&["member", &spec("debt.deon"), "borrow tick"]).0, 3);
    assert_eq!(deon(&["member", &spec("ng.deon"), "grab ok"]).0, 4);
    let (code, _, err) = deon(&["member", &spec("ng.deon"), "noop noop"]);
    assert_eq!(code, 2);
    assert!(err.contains("error"));
}

#[test]
fn verify_exit_codes() {
    let (code, out, _) = deon(&["verify", &spec("ng.deon"), &spec("grab.fst")]);
    assert_eq!(code, 1);
    assert!(out.contains("action: grab"));
    assert!(out.contains("counterexample at cycle 1"));
    let (code, out, _) = deon(&["verify", &spec("rs.deon"), &spec("rs_late.fst")]);
    assert_eq!(code, 1);
    assert!(out.contains("history: stop red"));
    let (code, _, _) = deon(&["verify", &spec("hom.deon"), &spec("grab.fst")]);
    assert_eq!(code, 2);
}

#[test]
fn input_errors_exit_2() {
    let dir = std::env::temp_dir().join("deon-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.deon");
    std::fs::write(&bad, "percepts: ok\nactions: noop\ngood: (noop ok\n").unwrap();
    let (code, _, err) = deon(&["check", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("3:7"), "{err}");
    assert_eq!(deon(&["check", "/no/such/file.deon"]).0, 2);
    assert_eq!(deon(&["frobnicate"]).0, 2);
    assert_eq!(deon(&["simulate", "ng", "--policy", "nope"]).0, 2);
}

#[test]
fn simulate_is_reproducible_and_governed_runs_are_clean() {
    let args = [
        "simulate",
        "ng",
        "--policy",
        "random",
        "--env",
        "random",
        "--cycles",
        "1000",
        "--seed",
        "7",
        "--env-seed",
        "3",
        "--govern",
        "--json",
    ];
    let (code, first, _) = deon(&args);
    assert_eq!(code, 0);
    assert_eq!(deon(&args).1, first);
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["first_violation_cycle"], serde_json::Value::Null);
    assert_eq!(v["cycles"], 1000);
    assert!(v["classifications"].as_array().unwrap().iter().all(|c| c == "GOOD"));
    assert_eq!(v["policy_seed"], 7);
    assert_eq!(v["env_seed"], 3);

    let (_, out, _) =
        deon(&["simulate", "guess", "--policy", "random", "--env", "adversarial", "--cycles", "10", "--seed", "1"]);
    assert!(out.contains("first_violation_cycle: 1\n"), "{out}");
    let (_, out, _) = deon(&[
        "simulate",
        "ng",
        "--policy",
        "scripted:noop,noop,noop,noop,grab,noop",
        "--cycles",
        "10",
        "--seed",
        "3",
    ]);
    assert!(out.contains("first_violation_cycle: 5\n"), "{out}");
}

#[test]
fn homunculus_demo_output() {
    let (code, out, _) = deon(&["demo-homunculus", "--violate-at", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("inner_compliance: 1.000"));
    assert!(out.contains("outer_compliance_cycle: 3"));
    let (_, out, _) = deon(&["demo-homunculus", "--violate-at", "0", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["inner_compliance"], 1.0);
    assert_eq!(v["outer_compliance_cycle"], serde_json::Value::Null);
}

#[test]
fn dump_loads_back() {
    let (_, dumped, _) = deon(&["dump", "rs"]);
    let path = std::env::temp_dir().join("deon-cli-rs.dfa");
    std::fs::write(&path, &dumped).unwrap();
    let (code, out, _) = deon(&["member", path.to_str().unwrap(), "go red stop green"]);
    assert_eq!((code, out.as_str()), (0, "GOOD\n"));
    assert_eq!(deon(&["dump", path.to_str().unwrap()]).1, dumped);
}
