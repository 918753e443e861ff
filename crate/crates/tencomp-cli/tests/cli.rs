//! End-to-end checks of the binary: exit-code contract, report shapes, and
//! byte-identical round-trips of the canonical tensor format.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tencomp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

fn gen_example(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let path = dir.join(format!("{}.json", name.replace('.', "_")));
    let mut args = vec!["gen", "--example", name, "-o", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let output = run(&args);
    assert!(
        output.status.success(),
        "gen {name}: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    path
}

#[test]
fn solve_finds_the_known_solution_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let ex23 = gen_example(dir.path(), "ex2.3", &[]);
    let output = run(&["solve", ex23.to_str().unwrap(), "--q", "-1,-1"]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    let solutions = &report["runs"][0]["report"]["solutions"];
    let hit = solutions.as_array().unwrap().iter().any(|s| {
        let x = s["x"].as_array().unwrap();
        (x[0].as_f64().unwrap()).abs() < 1e-9 && (x[1].as_f64().unwrap() - 1.0).abs() < 1e-9
    });
    assert!(hit, "{report}");
}

#[test]
fn solve_certified_empty_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let ex22 = gen_example(dir.path(), "ex2.2", &[]);
    let output = run(&["solve", ex22.to_str().unwrap(), "--q", "-1,-1"]);
    assert_eq!(output.status.code(), Some(2));
    let report = stdout_json(&output);
    assert_eq!(report["runs"][0]["report"]["status"], "certified_empty");
}

#[test]
fn solve_nonnegative_q_contains_zero() {
    let dir = tempfile::tempdir().unwrap();
    let ex22 = gen_example(dir.path(), "ex2.2", &[]);
    let output = run(&["solve", ex22.to_str().unwrap(), "--q", "1,1"]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    let solutions = report["runs"][0]["report"]["solutions"]
        .as_array()
        .unwrap()
        .clone();
    let zero = solutions.iter().any(|s| {
        s["x"]
            .as_array()
            .unwrap()
            .iter()
            .all(|v| v.as_f64().unwrap() == 0.0)
    });
    assert!(zero, "{report}");
}

#[test]
fn solve_vi_method_reports_and_matches() {
    let dir = tempfile::tempdir().unwrap();
    let ex23 = gen_example(dir.path(), "ex2.3", &[]);
    let output = run(&[
        "solve",
        ex23.to_str().unwrap(),
        "--q",
        "-1,-1",
        "--method",
        "vi",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["runs"][0]["report"]["status"], "solved");
    assert_eq!(report["runs"][0]["report"]["solution"]["method"], "vi");
}

#[test]
fn classify_golden_tables() {
    let dir = tempfile::tempdir().unwrap();
    let ex22 = gen_example(dir.path(), "ex2.2", &[]);
    let output = run(&["classify", ex22.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    let verdicts = report["verdicts"].as_array().unwrap();
    let verdict_of = |class: &str| -> String {
        verdicts
            .iter()
            .find(|v| v["class"] == class)
            .unwrap_or_else(|| panic!("missing class {class}"))["verdict"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(verdict_of("r0"), "member");
    assert_eq!(verdict_of("r"), "non_member");
    assert_eq!(verdict_of("q"), "non_member");
    assert!(report["ladder_violations"].as_array().unwrap().is_empty());

    let ex23 = gen_example(dir.path(), "ex2.3", &[]);
    let output = run(&["classify", ex23.to_str().unwrap()]);
    let report = stdout_json(&output);
    let verdicts = report["verdicts"].as_array().unwrap();
    let q = verdicts.iter().find(|v| v["class"] == "q").unwrap();
    assert_eq!(q["verdict"], "member");
    assert_eq!(q["citations"][0], "r-implies-q");
}

#[test]
fn falsify_function_properties_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ex23 = gen_example(dir.path(), "ex2.3", &[]);
    // witness found -> certified negative -> exit 2
    let output = run(&[
        "falsify",
        ex23.to_str().unwrap(),
        "--q",
        "0.5,0.5",
        "--property",
        "pseudo-monotone",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let report = stdout_json(&output);
    assert_eq!(report["verdict"]["verdict"], "non_member");
    assert_eq!(
        report["verdict"]["certificate"]["witness"]["kind"],
        "vector_pair"
    );

    let output = run(&[
        "falsify",
        ex23.to_str().unwrap(),
        "--q",
        "0.5,0.5",
        "--property",
        "p0-function",
    ]);
    assert_eq!(output.status.code(), Some(2));

    // none found -> inconclusive -> exit 3
    let identity = dir.path().join("identity_even.json");
    let output = run(&[
        "gen",
        "--example",
        "identity",
        "--m",
        "4",
        "--n",
        "2",
        "-o",
        identity.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let output = run(&[
        "falsify",
        identity.to_str().unwrap(),
        "--property",
        "monotone",
    ]);
    assert_eq!(output.status.code(), Some(3));

    // bad property -> usage error
    let output = run(&["falsify", ex23.to_str().unwrap(), "--property", "bogus"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn falsify_member_path_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let ones = gen_example(dir.path(), "ex2.1", &["--m", "3", "--n", "2"]);
    let output = run(&[
        "falsify",
        ones.to_str().unwrap(),
        "--property",
        "strictly-copositive",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["verdict"]["verdict"], "member");
}

#[test]
fn gen_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("random.json");
    let output = run(&[
        "gen",
        "--random",
        "nonnegative",
        "--m",
        "3",
        "--n",
        "3",
        "--seed",
        "7",
        "--density",
        "0.6",
        "-o",
        first.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let note = stdout_json(&output);
    assert_eq!(note["seed"], 7);

    // Same spec again: identical bytes.
    let second = dir.path().join("random2.json");
    run(&[
        "gen",
        "--random",
        "nonnegative",
        "--m",
        "3",
        "--n",
        "3",
        "--seed",
        "7",
        "--density",
        "0.6",
        "-o",
        second.to_str().unwrap(),
    ]);
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert_eq!(a, b);

    // Load -> re-emit through solve's loader path by round-tripping with gen
    // of an example, then comparing the canonical emission.
    let ex21 = gen_example(dir.path(), "ex2.1", &["--m", "3", "--n", "4"]);
    let text = std::fs::read_to_string(&ex21).unwrap();
    let parsed: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["entries"].as_array().unwrap().len(), 64);
}

#[test]
fn gen_accepts_a_json_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{ "kind": "nonnegative", "order": 3, "dim": 3, "seed": 7, "density": 0.6 }"#,
    )
    .unwrap();
    let from_spec = dir.path().join("from_spec.json");
    let output = run(&[
        "gen",
        "--spec",
        spec.to_str().unwrap(),
        "-o",
        from_spec.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    // Same draw as the equivalent flag invocation.
    let from_flags = dir.path().join("from_flags.json");
    run(&[
        "gen",
        "--random",
        "nonnegative",
        "--m",
        "3",
        "--n",
        "3",
        "--seed",
        "7",
        "--density",
        "0.6",
        "-o",
        from_flags.to_str().unwrap(),
    ]);
    assert_eq!(
        std::fs::read(&from_spec).unwrap(),
        std::fs::read(&from_flags).unwrap()
    );
}

#[test]
fn verify_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let ex23 = gen_example(dir.path(), "ex2.3", &[]);
    let output = run(&[
        "verify",
        ex23.to_str().unwrap(),
        "--q",
        "-1,-1",
        "--x",
        "0,1",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["valid"], true);
    assert_eq!(report["support"][0], 2);

    let ex22 = gen_example(dir.path(), "ex2.2", &[]);
    let output = run(&[
        "verify",
        ex22.to_str().unwrap(),
        "--q",
        "-1,-1",
        "--x",
        "1,0",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let report = stdout_json(&output);
    assert_eq!(report["valid"], false);
    assert_eq!(report["violation"]["index"], 2);
}

#[test]
fn malformed_input_exits_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"order\": 3,").unwrap();
    let output = run(&["solve", path.to_str().unwrap(), "--q", "1,1"]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line"), "{stderr}");
}

#[test]
fn q_batch_probes_are_seeded_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let ex23 = gen_example(dir.path(), "ex2.3", &[]);
    let output = run(&["solve", ex23.to_str().unwrap(), "--q-batch", "11:4"]);
    let report = stdout_json(&output);
    let runs = report["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 4);
    let replay = run(&["solve", ex23.to_str().unwrap(), "--q-batch", "11:4"]);
    assert_eq!(output.stdout, replay.stdout);
}

#[test]
fn enumeration_cap_guides_to_vi() {
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.json");
    run(&[
        "gen",
        "--random",
        "nonnegative",
        "--m",
        "3",
        "--n",
        "6",
        "--seed",
        "1",
        "--diagonal",
        "positive",
        "-o",
        big.to_str().unwrap(),
    ]);
    // Cap below the dimension: auto falls back to the vi solver.
    let output = run(&[
        "solve",
        big.to_str().unwrap(),
        "--q",
        "-1,-1,-1,-1,-1,-1",
        "--cap",
        "4",
    ]);
    let report = stdout_json(&output);
    assert_eq!(report["method"], "vi");
    assert_eq!(output.status.code(), Some(0), "{report}");
    // Forcing enumeration past the cap is refused as a usage error.
    let output = run(&[
        "solve",
        big.to_str().unwrap(),
        "--q",
        "-1,-1,-1,-1,-1,-1",
        "--cap",
        "4",
        "--method",
        "enumerate",
    ]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("vi"), "{stderr}");
}
