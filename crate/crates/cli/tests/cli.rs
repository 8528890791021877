use std::path::PathBuf;
use std::process::Command;

use loopgr_cli::run;
use serde_json::Value;

fn data(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    root.to_string_lossy().into_owned()
}

fn loopgr(args: &[&str]) -> loopgr_cli::Outcome {
    run(std::iter::once("loopgr").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json", "--no-timing"]);
    let out = loopgr(&all);
    (out.code, serde_json::from_str(&out.stdout).expect("stdout is JSON"))
}

#[test]
fn square_of_generator_is_two() {
    let out = loopgr(&["shuffle", "--quiver", &data("a1.json"), "--word", "i,i"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().next(), Some("2"));
}

#[test]
fn cube_of_generator_is_six() {
    let out = loopgr(&["shuffle", "--quiver", &data("a1.json"), "--word", "i,i,i"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().next(), Some("6"));
}

#[test]
fn poincare_of_two() {
    let out = loopgr(&["poincare", "--alpha", "2"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().next(), Some("3 + q"));
}

#[test]
fn carell_and_ind_rank_headlines() {
    assert_eq!(loopgr(&["carell", "--n", "4", "--k", "2"]).stdout.lines().next(), Some("6"));
    let out = loopgr(&["ind-rank", "--poset", "chain:3", "--divisor", "a:i:2,b:j:1"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.trim(), "40");
}

#[test]
fn sl2_lattice_counts() {
    for (n, count) in [(1, "2"), (2, "4"), (3, "8")] {
        let n = n.to_string();
        let out = loopgr(&["sl2-lattice", "--p", "2", "--e", "2", "--n", &n]);
        assert_eq!(out.code, 0, "{}", out.stdout);
        assert_eq!(out.stdout.lines().next(), Some(count));
    }
}

#[test]
fn crosscheck_suite_passes_on_a2() {
    let (code, report) = json(&["verify", "--suite", "crosscheck", "--quiver", &data("a2.json")]);
    assert_eq!(code, 0);
    let rows = report["results"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["name"].as_str().unwrap().starts_with("crosscheck")));
    assert!(rows.iter().all(|r| r["status"] != "fail"));
}

#[test]
fn report_schema() {
    let (code, report) = json(&["kernel", "--quiver", &data("a2.json"), "--flag", "1,0|0,1", "--classical"]);
    assert_eq!(code, 0);
    for key in ["command", "config_echo", "results", "elapsed_ms"] {
        assert!(report.get(key).is_some(), "missing {}", key);
    }
    assert_eq!(report["command"], "kernel");
    assert_eq!(report["elapsed_ms"], 0);
    for row in report["results"].as_array().unwrap() {
        for key in ["name", "status", "value", "expected", "provenance"] {
            assert!(row.get(key).is_some(), "row missing {}", key);
        }
    }
}

#[test]
fn json_reports_are_deterministic() {
    let path = data("a2.json");
    let args = ["verify", "assoc", "--quiver", &path, "--seed", "3", "--format", "json", "--no-timing"];
    let a = loopgr(&args);
    let b = loopgr(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn locality_config_trivialization() {
    let (code, report) = json(&["verify", "locality", "--quiver", &data("a1.json"), "--config", &data("pts.json")]);
    assert_eq!(code, 0);
    let value = &report["results"].as_array().unwrap().last().unwrap()["value"];
    assert_eq!(value["disjoint"], true);
    assert_eq!(value["value"], "24/25");

    let (code, report) = json(&["verify", "locality", "--quiver", &data("a1.json"), "--config", &data("pts_shifted.json")]);
    assert_eq!(code, 0);
    let value = &report["results"].as_array().unwrap().last().unwrap()["value"];
    assert_eq!(value["disjoint"], false);
    assert!(value["vanishing"][0]["factor"].as_str().unwrap().starts_with("lambda("));
}

#[test]
fn zastava_fiber_rank_matches() {
    let out = loopgr(&["zastava-fiber", "--quiver", &data("a1.json"), "--config", &data("fiber.json")]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.starts_with('['));
}

#[test]
fn invalid_input_exits_two() {
    let out = loopgr(&["shuffle", "--quiver", &data("a1.json"), "--word", "i,k"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.starts_with("error:"));
    let (code, report) = json(&["shuffle", "--word", "i,k"]);
    assert_eq!(code, 2);
    assert_eq!(report["results"][0]["status"], "error");
    assert_eq!(loopgr(&["poincare", "--alpha", "x"]).code, 2);
    assert_eq!(loopgr(&["no-such-command"]).code, 2);
    assert_eq!(loopgr(&["kernel", "--fgl", "series:/nonexistent.json", "--flag", "1"]).code, 2);
}

#[test]
fn help_exits_zero() {
    let out = loopgr(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("verify"));
}

#[test]
fn binary_matches_library_entry_point() {
    let out = Command::new(env!("CARGO_BIN_EXE_loopgr")).args(["poincare", "--alpha", "1,1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), loopgr(&["poincare", "--alpha", "1,1"]).stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_loopgr")).args(["carell", "--n", "two", "--k", "1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
