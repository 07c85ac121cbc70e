use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus(name: &str) -> String {
    root().join("corpus").join(name).display().to_string()
}

fn cex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cex"))
        .args(args)
        .output()
        .expect("cex runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = cex(&full);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&out)));
    (code(&out), v)
}

fn without_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("timing_ms");
            map.values_mut().for_each(without_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(without_timing),
        _ => {}
    }
}

/// Table output with the timing lines dropped.
fn stable_table(out: &Output) -> String {
    stdout(out)
        .lines()
        .filter(|l| !l.trim_start().starts_with("time "))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("CEX_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "output differs from {name}");
}

#[test]
fn exit_codes_follow_verdicts() {
    let voting = corpus("voting.cm");
    let yes = cex(&["check-cause", &voting, "--context", "all_vote", "--cause", "A=1 & B=1 & C=1", "--phi", "WIN=1"]);
    assert_eq!(code(&yes), 0, "{}", stdout(&yes));
    let no = cex(&["check-cause", &voting, "--context", "all_vote", "--cause", "A=1", "--phi", "WIN=1"]);
    assert_eq!(code(&no), 1);
    let bad_formula = cex(&["check-cause", &voting, "--context", "all_vote", "--cause", "A=1", "--phi", "WIN=="]);
    assert_eq!(code(&bad_formula), 2);
    let unknown_context = cex(&["check-cause", &voting, "--context", "nowhere", "--cause", "A=1", "--phi", "WIN=1"]);
    assert_eq!(code(&unknown_context), 2);
    let missing = cex(&["explain", "no/such/file.cm", "--phi", "A=1"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn malformed_models_report_the_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cm");
    std::fs::write(&path, "model m {\n  endo A: {0, 1};\n  eq A := B;\n}\n").unwrap();
    let out = cex(&["explain", path.to_str().unwrap(), "--phi", "A=1"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(":3:11:"), "{err}");
    assert!(err.contains("unknown identifier `B`"), "{err}");
    assert!(err.lines().last().unwrap().trim() == "^", "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn json_results_have_a_fixed_shape() {
    let (c, v) = json(&[
        "check-cause",
        &corpus("suzy.cm"),
        "--context",
        "both_throw",
        "--cause",
        "ST=1",
        "--phi",
        "BS=1",
    ]);
    assert_eq!(c, 0);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        ["query", "candidate", "verdict", "clauses", "witnesses", "achieved_goodness", "timing_ms"]
    );
    assert_eq!(v["query"], "actual-cause");
    assert_eq!(v["verdict"], true);
    let clauses: Vec<&str> = v["clauses"].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(clauses, ["AC1", "AC2", "AC3"]);
    assert_eq!(v["witnesses"]["counterfactual"]["fixed"]["BH"], 0);
    assert!(v["timing_ms"].is_number());

    let (c, v) = json(&[
        "check-cause",
        &corpus("suzy.cm"),
        "--context",
        "both_throw",
        "--cause",
        "ST=1",
        "--phi",
        "BS=1",
        "--mode",
        "butfor",
    ]);
    assert_eq!(c, 1);
    assert_eq!(v["query"], "but-for-cause");
    assert_eq!(v["verdict"], false);
}

#[test]
fn goodness_is_printed_as_exact_fractions() {
    let (c, v) = json(&[
        "explain",
        &corpus("parity5.cm"),
        "--phi",
        "O=0",
        "--candidate",
        "X1=0",
        "--alpha",
        "1/8",
        "--beta",
        "0.9",
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["achieved_goodness"]["alpha"], "1/8");
    assert_eq!(v["achieved_goodness"]["beta"], "9/10");
    let clauses: Vec<&str> = v["clauses"].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(clauses, ["EX1'.alpha", "EX1'.beta", "EX2'", "EX3'"]);
}

#[test]
fn output_is_deterministic() {
    let runs: Vec<Value> = (0..3)
        .map(|_| {
            let (_, mut v) = json(&["explain", &corpus("voting.cm"), "--phi", "WIN=1", "--definition", "mmts"]);
            without_timing(&mut v);
            v
        })
        .collect();
    let text: Vec<String> = runs.iter().map(|v| serde_json::to_string_pretty(v).unwrap()).collect();
    assert_eq!(text[0], text[1]);
    assert_eq!(text[1], text[2]);
    assert_eq!(runs[0].as_array().unwrap().len(), 7);
}

#[test]
fn golden_tables() {
    let cases: [(&str, Vec<String>); 4] = [
        (
            "arsonists_sufficient.txt",
            ["check-cause", &corpus("arsonists.cm"), "--context", "u1", "--cause", "ML1=1 & ML2=1", "--phi", "FB=1", "--mode", "sufficient"]
                .map(String::from)
                .to_vec(),
        ),
        (
            "voting_halpern.txt",
            ["explain", &corpus("voting.cm"), "--phi", "WIN=1"].map(String::from).to_vec(),
        ),
        (
            "suzy_partial.txt",
            ["explain", &corpus("suzy.cm"), "--phi", "BS=1", "--candidate", "ST=1", "--alpha", "1", "--beta", "1"]
                .map(String::from)
                .to_vec(),
        ),
        (
            "verify_voting.txt",
            ["verify", "1", "--model", &corpus("voting.cm")].map(String::from).to_vec(),
        ),
    ];
    for (name, args) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = cex(&args);
        assert!(code(&out) < 2, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let table = stable_table(&out).replace(&root().join("corpus").display().to_string(), "corpus");
        golden(name, &table);
    }
}

#[test]
fn lifted_models_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lift.cm");
    let p = path.to_str().unwrap();
    let out = cex(&["classifier", "lift", "--grid", "3x1", "--labeler", "any-on", "--name", "lift3", "-o", p]);
    assert_eq!(code(&out), 0);
    let (c, v) = json(&["explain", p, "--phi", "O=1"]);
    assert_eq!(c, 0);
    let found: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["candidate"].as_str().unwrap()).collect();
    assert_eq!(found, ["X1=1", "X2=1", "X3=1"]);
    let again = cex(&["classifier", "lift", "--grid", "3x1", "--labeler", "any-on", "--name", "lift3"]);
    assert_eq!(stdout(&again), std::fs::read_to_string(&path).unwrap());
}

#[test]
fn parity_lift_matches_the_shipped_file() {
    let out = cex(&["classifier", "lift", "--grid", "5x1", "--labeler", "parity", "--dist", "parity", "--name", "parity5"]);
    assert_eq!(code(&out), 0);
    let shipped = std::fs::read_to_string(corpus("parity5.cm")).unwrap();
    assert_eq!(stdout(&out), shipped);
}

#[test]
fn classifier_subcommands() {
    let (c, v) = json(&["classifier", "net", "--grid", "4x4", "--min-size", "2"]);
    assert_eq!(c, 0);
    assert_eq!(v["clauses"]["covers"], true);
    assert_eq!(v["witnesses"]["net"].as_array().unwrap().len(), 4);

    let (c, v) = json(&[
        "classifier",
        "absence",
        "--model",
        &corpus("tumor9.cm"),
        "--label",
        "0",
        "--alpha",
        "9/10",
        "--beta",
        "9/10",
        "--k",
        "suspicious",
    ]);
    assert_eq!(c, 0);
    let found = v.as_array().unwrap();
    assert!(!found.is_empty());
    assert!(found.iter().all(|r| r["query"] == "absence-explanation" && r["verdict"] == true));

    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("rare.dist");
    let out = cex(&[
        "classifier",
        "reweight",
        "--grid",
        "3x1",
        "--labeler",
        "any-on",
        "--condition",
        "O=1",
        "-o",
        dist.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&dist).unwrap();
    assert_eq!(text.lines().filter(|l| !l.trim().is_empty()).count(), 7);
}

#[test]
fn verify_subcommand() {
    let (c, v) = json(&["verify", "2", "--trials", "20", "--seed", "3"]);
    assert_eq!(c, 0);
    assert_eq!(v["checked"], 20);
    assert_eq!(v["implication_failures"], 0);
    let (c, v) = json(&["verify", "1", "--trials", "50", "--effects", "one"]);
    assert_eq!(c, 0);
    assert_eq!(v["conditions_met"], 50);
    let out = cex(&["verify", "1"]);
    assert_eq!(code(&out), 2);
}
