//! End-to-end checks of the binary: exit codes, output formats, and
//! deterministic summaries.

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entmono"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_temp(content: &str, name: &str) -> (tempfile::TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    (dir, path.to_string_lossy().into_owned())
}

#[test]
fn measure_reports_builtin_states() {
    let out = run(&["measure", "--state", "w3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("partition: 0:12"));
    assert!(text.contains("closed_form_pure"));

    let out = run(&["measure", "--state", "gsd-example2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["negativity"]["value"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    assert!((v["cren"]["value"].as_f64().unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn measure_accepts_state_files_and_partitions() {
    let (dir, path) = write_temp(
        r#"{"dims":[2,2],"matrix":[[[0.75,0],[0,0],[0,0],[0.25,0]],
            [[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],
            [[0.25,0],[0,0],[0,0],[0.25,0]]]}"#,
        "x.json",
    );
    let out = run(&["measure", "--state", &path, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["concurrence"]["method"], "wootters");
    assert!((v["concurrence"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    drop(dir);

    let out = run(&["measure", "--state", "ghz4", "--partition", "01:23"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("partition: 01:23"));
}

#[test]
fn input_errors_exit_two() {
    for args in [
        &["measure", "--state", "nosuchstate"][..],
        &["measure", "--state", "w3", "--partition", "garbled"],
        &["figure", "fig2", "--paper-values"],
        &["audit", "--state", "w3", "--measure", "cren", "--nu-min", "1.0"],
        &["measure", "--state", "w3", "--format", "csv"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
    // Clap usage errors share the input exit code.
    let out = run(&["audit", "--state", "w3"]);
    assert_eq!(out.status.code(), Some(2));
    // Unreadable JSON is an input problem.
    let (dir, path) = write_temp("not json at all", "bad.json");
    let out = run(&["measure", "--state", &path]);
    assert_eq!(out.status.code(), Some(2));
    drop(dir);
}

#[test]
fn validation_errors_exit_three() {
    // Unnormalized pure state.
    let (dir, path) = write_temp(
        r#"{"dims":[2],"amplitudes":[[1,0],[1,0]]}"#,
        "unnorm.json",
    );
    let out = run(&["measure", "--state", &path]);
    assert_eq!(out.status.code(), Some(3));
    drop(dir);

    // Partition subsystem out of range.
    let out = run(&["measure", "--state", "w3", "--partition", "0:13"]);
    assert_eq!(out.status.code(), Some(3));

    // Audit needs a pure state.
    let (dir, path) = write_temp(
        r#"{"dims":[2,2,2],"matrix":[
            [[0.125,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
            [[0,0],[0.125,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
            [[0,0],[0,0],[0.125,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
            [[0,0],[0,0],[0,0],[0.125,0],[0,0],[0,0],[0,0],[0,0]],
            [[0,0],[0,0],[0,0],[0,0],[0.125,0],[0,0],[0,0],[0,0]],
            [[0,0],[0,0],[0,0],[0,0],[0,0],[0.125,0],[0,0],[0,0]],
            [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0.125,0],[0,0]],
            [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0.125,0]]]}"#,
        "mixed3.json",
    );
    let out = run(&["audit", "--state", &path, "--measure", "cren"]);
    assert_eq!(out.status.code(), Some(3));
    drop(dir);

    // Concurrence audits reject qudit registers.
    let out = run(&["audit", "--state", "ou", "--measure", "concurrence"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn audit_passes_on_canonical_states_in_both_formats() {
    for state in ["w3", "ghz3", "example1"] {
        let out = run(&["audit", "--state", state, "--measure", "concurrence"]);
        assert_eq!(out.status.code(), Some(0), "state {state}");
    }
    let out = run(&["audit", "--state", "gsd-example2", "--measure", "cren", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "label,nu,bound_id,lhs,rhs_low,rhs_high,margin,verdict"
    );
    // 33 grid values × 3 CREN bounds.
    assert_eq!(text.trim_end().lines().count(), 1 + 33 * 3);
    assert!(text.contains("lemma3_N"));
    assert!(text.contains("holds_with_certainty"));

    let out = run(&["audit", "--state", "gsd-example2", "--measure", "cren"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["label"], "gsd-example2");
    assert_eq!(v["rows"].as_array().unwrap().len(), 33);
    assert!((v["ingredients"]["lhs"].as_f64().unwrap() - 0.8).abs() < 1e-10);
}

#[test]
fn figure_fig2_emits_the_expected_first_row() {
    let out = run(&["figure", "fig2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "nu,lhs,lemma_bound,zhang2021_bound,sum_bound");
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(first[0], 2.0);
    assert!((first[1] - 0.64).abs() < 1e-9);
    assert!((first[2] - 0.384f64.sqrt()).abs() < 1e-9);
    assert!((first[3] - 0.48).abs() < 1e-9);
    assert!((first[4] - 0.48).abs() < 1e-9);
    // Default grid: header + 33 rows.
    assert_eq!(text.trim_end().lines().count(), 34);
}

#[test]
fn figure_grid_flags_shape_the_output() {
    let out = run(&["figure", "fig1", "--nu-min", "2", "--nu-max", "4", "--nu-step", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim_end().lines().count(), 4);
    // fig1 default mode warns about the published-value mismatch.
    assert!(String::from_utf8_lossy(&out.stderr).contains("disagree"));
    // In published-values mode there is nothing to warn about.
    let out = run(&["figure", "fig1", "--paper-values"]);
    assert!(!String::from_utf8_lossy(&out.stderr).contains("disagree"));
}

#[test]
fn random_audit_summary_is_seed_deterministic() {
    let args = &[
        "random-audit",
        "--samples",
        "40",
        "--seed",
        "11",
        "--nu-max",
        "4",
        "--nu-step",
        "0.5",
    ][..];
    let a = run(args);
    let b = run(args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "summaries must be byte-identical");
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["verdicts"]["fails_with_certainty"], 0);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
    let bounds = v["bounds"].as_array().unwrap();
    assert!(bounds.iter().any(|b| b["id"] == "lemma1_C"));
    for b in bounds {
        assert!(b["min_margin"].as_f64().unwrap() > -1e-12);
    }

    let c = run(&[
        "random-audit",
        "--samples",
        "40",
        "--seed",
        "12",
        "--nu-max",
        "4",
        "--nu-step",
        "0.5",
    ]);
    assert_ne!(a.stdout, c.stdout, "different seeds explore different states");
}

#[test]
fn random_audit_covers_cren_and_four_qubits() {
    let out = run(&[
        "random-audit",
        "--samples",
        "10",
        "--measure",
        "cren",
        "--nu-max",
        "3",
        "--nu-step",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["bounds"].as_array().unwrap().iter().any(|b| b["id"] == "lemma3_N"));

    let out = run(&[
        "random-audit",
        "--dims",
        "2,2,2,2",
        "--samples",
        "5",
        "--nu-max",
        "3",
        "--nu-step",
        "1",
        "--restarts",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["bounds"].as_array().unwrap().iter().any(|b| b["id"] == "theorem1_C"));
    assert_eq!(v["verdicts"]["fails_with_certainty"], 0);
}

#[test]
fn counterexamples_report_verbatim_ingredients() {
    let out = run(&["counterexamples"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    for e in entries {
        assert!((e["negativity_direct"].as_f64().unwrap() - 2.0).abs() < 1e-9);
        assert!(e["max_closed_form_diff"].as_f64().unwrap() < 1e-12);
        assert_eq!(e["ckw"]["ckw_violated"], true);
        for row in e["closed_form_rows"].as_array().unwrap() {
            let nu = row["nu"].as_f64().unwrap();
            let rhs = row["lemma3_rhs"].as_f64().unwrap();
            assert!((rhs - 2f64.powf(nu)).abs() < 1e-12);
        }
    }
    assert_eq!(entries[0]["label"], "ou");
    assert!((entries[0]["ckw"]["pairwise_sq_sum"].as_f64().unwrap() - 2.0).abs() < 1e-15);
    assert!(
        (entries[1]["ckw"]["pairwise_sq_sum"].as_f64().unwrap() - 16.0 / 9.0).abs() < 1e-15
    );
    for e in entries {
        let c_sq = e["ckw"]["c_sq_full"].as_f64().unwrap();
        assert!((c_sq - 4.0 / 3.0).abs() < 1e-9);
    }
}

#[test]
fn croof_runs_on_files_and_respects_out_flag() {
    let (dir, path) = write_temp(
        r#"{"dims":[2,2],"matrix":[[[0.75,0],[0,0],[0,0],[0.25,0]],
            [[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],
            [[0.25,0],[0,0],[0,0],[0.25,0]]]}"#,
        "x.json",
    );
    let out_path = dir.path().join("croof.json");
    let out = run(&[
        "croof",
        "--state",
        &path,
        "--objective",
        "concurrence",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((v["measure"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert_eq!(v["measure"]["method"], "convex_roof_upper");
    let weights = v["member_weights"].as_array().unwrap();
    let sum: f64 = weights.iter().map(|w| w.as_f64().unwrap()).sum();
    assert!((sum - 1.0).abs() < 1e-9);
    drop(dir);
}

#[test]
fn builtin_families_take_params() {
    let out = run(&[
        "measure",
        "--state",
        "example1",
        "--params",
        "0.2,0.7745966692414834,0.4,0.4,0.2,0",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let c = v["concurrence"]["value"].as_f64().unwrap();
    assert!((c * c - 384.0 / 625.0).abs() < 1e-9);
    // Wrong arity is an input error.
    let out = run(&["measure", "--state", "example1", "--params", "0.5,0.5"]);
    assert_eq!(out.status.code(), Some(2));
    // Params on a parameterless builtin are rejected.
    let out = run(&["measure", "--state", "ou", "--params", "1,2,3,4,5,6"]);
    assert_eq!(out.status.code(), Some(2));
}
