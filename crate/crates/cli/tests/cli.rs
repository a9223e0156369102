use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(rel)
}

fn rcsplit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcsplit"))
        .current_dir(dir)
        .args(["--epoch", "0"])
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = rcsplit(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn records(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn synthetic(rel: &str) -> String {
    data("synthetic").join(rel).display().to_string()
}

fn ingest_synthetic(dir: &Path) {
    ok(
        dir,
        &[
            "ingest",
            "--input",
            &synthetic("dataset.jsonl"),
            "--dataset-id",
            "dataset",
            "--out",
            "dataset.jsonl",
        ],
    );
}

#[test]
fn missing_required_argument_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    ingest_synthetic(dir.path());
    let out = rcsplit(dir.path(), &["partition", "--dataset", "dataset.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--k2-predictions"));
}

#[test]
fn module_error_is_json_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let out = rcsplit(dir.path(), &["stats", "--dataset", "absent.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert!(err["error"]["kind"].is_string());
    assert!(err["error"]["message"]
        .as_str()
        .unwrap()
        .contains("absent.jsonl"));
}

#[test]
fn validate_flags_gold_outside_context() {
    let dir = tempfile::tempdir().unwrap();
    let rows = [
        r#"{"id":"a","style":"extraction","context":"Paris is in France.","question":"Where is Paris?","answers":["France"]}"#,
        r#"{"id":"b","style":"extraction","context":"Rome is in Italy.","question":"Where is Rome?","answers":["Spain"]}"#,
        r#"{"id":"c","style":"extraction","context":"Oslo is in Norway.","question":"Where is Oslo?","answers":["Norway"]}"#,
    ];
    std::fs::write(dir.path().join("three.jsonl"), rows.join("\n")).unwrap();
    ok(
        dir.path(),
        &["ingest", "--input", "three.jsonl", "--out", "ds.jsonl"],
    );
    let flagged: Vec<Value> = records(&dir.path().join("ds.jsonl"))
        .into_iter()
        .filter(|r| {
            r["meta"]["flags"]
                .as_str()
                .is_some_and(|f| f.contains("gold_not_in_context"))
        })
        .collect();
    assert_eq!(flagged.len(), 1);
    assert_eq!(flagged[0]["id"], "b");
}

#[test]
fn truncate_keeps_at_most_k_tokens() {
    let dir = tempfile::tempdir().unwrap();
    ingest_synthetic(dir.path());
    ok(
        dir.path(),
        &[
            "truncate",
            "--dataset",
            "dataset.jsonl",
            "--k",
            "2",
            "--out",
            "k2.jsonl",
        ],
    );
    let rows = records(&dir.path().join("k2.jsonl"));
    assert_eq!(rows.len(), 40);
    for r in rows {
        let q = r["question"].as_str().unwrap();
        assert!(q.split_whitespace().count() <= 2, "{q}");
        assert_eq!(r["meta"]["variant"], "k2");
    }
}

#[test]
fn report_refuses_mixed_overlap_modes() {
    let dir = tempfile::tempdir().unwrap();
    ingest_synthetic(dir.path());
    ok(
        dir.path(),
        &[
            "--overlap-mode",
            "min-count",
            "similar",
            "--dataset",
            "dataset.jsonl",
            "--out",
            "profiles.jsonl",
        ],
    );
    let out = rcsplit(
        dir.path(),
        &[
            "report",
            "--dataset",
            "dataset.jsonl",
            "--profiles",
            "profiles.jsonl",
            "--out-dir",
            "rep",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("overlap_mode"));
}

#[test]
fn jobs_do_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    ingest_synthetic(dir.path());
    for jobs in ["1", "4"] {
        ok(
            dir.path(),
            &[
                "--jobs",
                jobs,
                "project",
                "--dataset",
                "dataset.jsonl",
                "--out",
                &format!("p{jobs}.jsonl"),
            ],
        );
        ok(
            dir.path(),
            &[
                "--jobs",
                jobs,
                "similar",
                "--dataset",
                "dataset.jsonl",
                "--out",
                &format!("s{jobs}.jsonl"),
            ],
        );
    }
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("p1.jsonl"), read("p4.jsonl"));
    assert_eq!(read("s1.jsonl"), read("s4.jsonl"));
}

#[test]
fn sony_email_profile_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(
        dir.path(),
        &[
            "similar",
            "--dataset",
            &data("sony_email.jsonl").display().to_string(),
        ],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let profile: Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert_eq!(
        profile["per_sentence_overlap"],
        serde_json::json!([5, 0, 0])
    );
    assert_eq!(profile["most_similar_index"], 0);
    assert_eq!(profile["answer_in_most_similar"], true);
}

#[test]
fn subset_eval_and_solved_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ingest_synthetic(d);
    ok(
        d,
        &[
            "truncate",
            "--dataset",
            "dataset.jsonl",
            "--k",
            "2",
            "--out",
            "k2.jsonl",
        ],
    );
    ok(
        d,
        &[
            "evaluate",
            "--dataset",
            "dataset.jsonl",
            "--predictions",
            &synthetic("predictions_full.json"),
            "--out",
            "full.jsonl",
        ],
    );
    ok(
        d,
        &[
            "evaluate",
            "--dataset",
            "k2.jsonl",
            "--predictions",
            &synthetic("predictions_k2.json"),
            "--out",
            "k2s.jsonl",
        ],
    );
    let solved = ok(
        d,
        &[
            "solved-ratio",
            "--dataset",
            "dataset.jsonl",
            "--k2-scores",
            "k2s.jsonl",
        ],
    );
    assert!(String::from_utf8_lossy(&solved.stdout).contains("50"));
    ok(
        d,
        &[
            "partition",
            "--dataset",
            "dataset.jsonl",
            "--k2-predictions",
            &synthetic("predictions_k2.json"),
            "--out",
            "a.jsonl",
        ],
    );
    let assignments = records(&d.join("a.jsonl"));
    assert_eq!(
        assignments.iter().filter(|a| a["subset"] == "hard").count(),
        10
    );
    let out = ok(
        d,
        &[
            "subset-eval",
            "--assignments",
            "a.jsonl",
            "--scores",
            "full.jsonl",
        ],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let agg: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(agg["easy_n"], 30);
    assert_eq!(agg["hard_n"], 10);
}

#[test]
fn evaluate_rejects_wrong_variant() {
    let dir = tempfile::tempdir().unwrap();
    ingest_synthetic(dir.path());
    let out = rcsplit(
        dir.path(),
        &[
            "evaluate",
            "--dataset",
            "dataset.jsonl",
            "--predictions",
            &synthetic("predictions_k2.json"),
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert!(err["error"]["message"].as_str().unwrap().contains("k2"));
}
