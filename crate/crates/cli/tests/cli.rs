use std::{
    fs,
    path::Path,
    process::{Command, Output},
};

use serde_json::Value;

fn ppats(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppats"))
        .current_dir(dir)
        .args(["--insecure-test", "--seed", "cli-tests"])
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Value {
    let out = ppats(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, value: &Value) {
    fs::write(dir.join(name), serde_json::to_string_pretty(value).unwrap()).unwrap();
}

/// Setup, keys and an empty board for a toy election of four voters.
fn election(dir: &Path, questions: &str) {
    ok(dir, &["setup", "--backend", "toy", "--order", "1000003", "--group-seed", "cli", "--out", "params.json"]);
    ok(dir, &["keygen", "--params", "params.json", "--threshold", "2", "--trustees", "3", "--out-dir", "keys"]);
    ok(
        dir,
        &[
            "board", "init", "--params", "params.json", "--sharing", "keys/sharing.json", "--election-id", "test",
            "--questions", questions, "--voter-count", "4", "--transcript", "t.json", "--store", "store.json",
        ],
    );
}

fn cast(dir: &Path, voter: &str, choices: &str, out: &str) {
    ok(
        dir,
        &["cast", "--params", "params.json", "--transcript", "t.json", "--voter", voter, "--choices", choices, "--out", out],
    );
}

fn add(dir: &Path, ballots: &[&str]) -> Output {
    let mut args = vec!["board", "add", "--params", "params.json", "--transcript", "t.json", "--store", "store.json"];
    args.extend_from_slice(ballots);
    ppats(dir, &args)
}

fn tally(dir: &Path, extra: &[&str]) -> Value {
    let mut args = vec![
        "tally", "--params", "params.json", "--transcript", "t.json", "--store", "store.json", "--share",
        "keys/share-1.json", "--share", "keys/share-3.json",
    ];
    args.extend_from_slice(extra);
    ok(dir, &args)
}

fn verify(dir: &Path, transcript: &str) -> (i32, Value) {
    let out = ppats(dir, &["verify", "--params", "params.json", "--transcript", transcript]);
    (out.status.code().unwrap(), serde_json::from_slice(&out.stdout).unwrap())
}

fn failing_checks(report: &Value) -> Vec<String> {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap().to_owned())
        .collect()
}

fn full_pipeline(dir: &Path) {
    election(dir, "2,3:at-most-2");
    cast(dir, "voter-1", "1;0,2", "b1.json");
    cast(dir, "voter-2", "0;", "b2.json");
    cast(dir, "voter-3", "1;1", "b3.json");
    cast(dir, "voter-2", "1;2", "b2b.json");
    assert!(add(dir, &["b1.json", "b2.json", "b3.json", "b2b.json"]).status.success());
    let summary = tally(dir, &[]);
    assert_eq!(summary["results"], serde_json::json!([[0, 3], [1, 1, 2]]));
    assert_eq!(summary["counted"], 3);
}

#[test]
fn seeded_pipeline_is_deterministic_and_verifies() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    full_pipeline(a.path());
    full_pipeline(b.path());
    for file in ["params.json", "keys/sharing.json", "keys/share-2.json", "b1.json", "t.json", "store.json"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
    let (status, report) = verify(a.path(), "t.json");
    assert_eq!(status, 0, "{report}");
    assert_eq!(report["all_passed"], true);

    let show = ok(a.path(), &["board", "show", "--params", "params.json", "--transcript", "t.json"]);
    let entries = show["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    assert_eq!(entries[1]["counted"], false);
    assert_eq!(entries[3]["replaces"], 1);
}

#[test]
fn verification_failures_exit_nonzero_with_named_checks() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    full_pipeline(dir);
    let honest = read(dir, "t.json");

    let mut bumped = honest.clone();
    let result = &mut bumped["tally"]["responses"][1][2]["result"];
    *result = (result.as_u64().unwrap() + 1).into();
    write(dir, "bumped.json", &bumped);
    let (status, report) = verify(dir, "bumped.json");
    assert_eq!(status, 1);
    assert_eq!(failing_checks(&report), ["opening"]);

    let mut swapped = honest.clone();
    let cells = swapped["board"][0]["cells"][0].as_array_mut().unwrap();
    cells.swap(0, 1);
    write(dir, "swapped.json", &swapped);
    let (status, report) = verify(dir, "swapped.json");
    assert_eq!(status, 1);
    assert!(failing_checks(&report).contains(&"ballot-validity".to_owned()), "{report}");

    let text = fs::read_to_string(dir.join("t.json")).unwrap();
    fs::write(dir.join("cut.json"), &text[..text.len() / 2]).unwrap();
    let (status, report) = verify(dir, "cut.json");
    assert_eq!(status, 1);
    assert_eq!(failing_checks(&report), ["format"]);
    let message = report["checks"][0]["failures"][0].as_str().unwrap();
    assert!(message.contains(&format!("byte offset {}", text.len() / 2)), "{message}");
}

#[test]
fn unreadable_inputs_are_located_errors() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    election(dir, "2");
    let params = fs::read_to_string(dir.join("params.json")).unwrap();
    fs::write(dir.join("cut.json"), &params[..40]).unwrap();
    let out = ppats(dir, &["keygen", "--params", "cut.json", "--threshold", "1", "--trustees", "1", "--out-dir", "k"]);
    assert_eq!(out.status.code(), Some(2));
    let error: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(error["error"].as_str().unwrap().contains("byte offset 40"), "{error}");

    let out = Command::new(env!("CARGO_BIN_EXE_ppats"))
        .current_dir(dir)
        .args(["--seed", "x", "setup", "--out", "p.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.join("p.json").exists());
}

#[test]
fn non_canonical_encodings_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    election(dir, "2");
    cast(dir, "voter-1", "1", "b.json");
    let ballot = read(dir, "b.json");
    let board = read(dir, "t.json");

    let mut upper = ballot.clone();
    let f0 = &mut upper["cells"][0][0]["validity"]["f0"];
    *f0 = f0.as_str().unwrap().to_uppercase().into();
    // toy scalars are 8 bytes; q + 1 is a non-reduced form of 1
    let mut unreduced = ballot.clone();
    unreduced["cells"][0][0]["validity"]["f0"] = format!("{:016x}", 1_000_003_u64 + 1).into();
    let mut extra = ballot.clone();
    extra["cells"][0][0]["note"] = "x".into();
    let mut other_election = ballot.clone();
    other_election["election_id"] = "other".into();
    for (name, value) in [("upper", upper), ("unreduced", unreduced), ("extra", extra), ("other", other_election)] {
        write(dir, "bad.json", &value);
        let out = add(dir, &["bad.json"]);
        assert_eq!(out.status.code(), Some(1), "{name}");
        let results: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(results[0]["status"], "rejected", "{name}");
        assert_eq!(read(dir, "t.json"), board, "{name}");
    }
    let out = add(dir, &["b.json"]);
    assert!(out.status.success());
}

#[test]
fn empty_election_and_dlog_cache() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    election(dir, "2,3");
    fs::copy(dir.join("t.json"), dir.join("empty.json")).unwrap();
    let summary = tally(dir, &["--dlog-cache", "dlog.bin"]);
    assert_eq!(summary["results"], serde_json::json!([[0, 0], [0, 0, 0]]));
    assert_eq!(summary["dlog_cache_hit"], false);
    assert_eq!(verify(dir, "t.json").0, 0);

    fs::copy(dir.join("empty.json"), dir.join("t.json")).unwrap();
    let summary = tally(dir, &["--dlog-cache", "dlog.bin"]);
    assert_eq!(summary["dlog_cache_hit"], true);

    // a closed board refuses further ballots
    cast(dir, "voter-1", "1;0", "b.json");
    assert_eq!(add(dir, &["b.json"]).status.code(), Some(2));
}

#[test]
fn bench_reports_counts_on_the_toy_backend() {
    let dir = tempfile::tempdir().unwrap();
    let report = ok(dir.path(), &["bench", "--backend", "toy", "--order", "1000003", "--samples", "3"]);
    assert_eq!(report["representative"], false);
    for measured in report["exponentiation_counts"]["measured"].as_array().unwrap() {
        assert_eq!((measured["g1"].as_u64(), measured["g2"].as_u64()), (Some(6), Some(6)));
    }
    assert!(report["responses_per_second"].as_f64().unwrap() > 0.0);
}
