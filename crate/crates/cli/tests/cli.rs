use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn jptense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jptense")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn conjugate_prints_past_form() {
    assert_eq!(stdout(&jptense(&["conjugate", "まじる", "--type", "4-1"])), "まじった\n");
    assert_eq!(stdout(&jptense(&["conjugate", "いく", "--type", "4-3"])), "いった\n");
    let bad = jptense(&["conjugate", "カク", "--type", "1"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("カ"));
}

#[test]
fn classify_labels_and_reports_failures() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("pairs.tsv");
    fs::write(&input, "かく\tかいた\nねがえる\tねがえった\t_\n").unwrap();
    assert_eq!(stdout(&jptense(&["classify", p(&input)])), "かく\tかいた\t_\t1\nねがえる\tねがえった\t_\t4-2\n");

    fs::write(&input, "かく\tかいた\nよむ\tよみた\n").unwrap();
    let bad = jptense(&["classify", p(&input)]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("row 2"));
}

#[test]
fn pipeline_gen_split_ablate_evaluate_errors() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let data = d.join("data.tsv");
    stdout(&jptense(&["gen", "--counts", "reference", "--seed", "5", "--out", p(&data)]));
    assert_eq!(fs::read_to_string(&data).unwrap().lines().count(), 3958);

    let stats = stdout(&jptense(&["stats", p(&data)]));
    assert!(stats.contains("| 2503 |") && stats.contains("| 37 |"), "{stats}");

    let split_dir = d.join("split");
    stdout(&jptense(&["split", p(&data), "--kind", "lemma", "--fraction", "0.1", "--seed", "5", "--out-dir", p(&split_dir)]));
    let test = split_dir.join("test.tsv");
    assert_eq!(fs::read_to_string(&test).unwrap().lines().count(), 395);

    let abl = d.join("abl");
    stdout(&jptense(&[
        "ablate", "--condition", "regular-only", "--train", p(&split_dir.join("train.tsv")), "--test", p(&test),
        "--out-dir", p(&abl),
    ]));
    assert!(fs::read_to_string(abl.join("train.tsv")).unwrap().lines().count() < 3563);

    let pred = d.join("pred.tsv");
    stdout(&jptense(&["oracle-predict", "--test", p(&test), "--mode", "over-regularize", "--out", p(&pred)]));
    let report = d.join("report.json");
    stdout(&jptense(&["evaluate", "--gold", p(&test), "--pred", p(&pred), "--report", p(&report)]));
    let js: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(js["total"], 395);
    assert!(js["total_errors"].as_u64().unwrap() > 0);

    let md = stdout(&jptense(&["errors", "--gold", p(&test), "--pred", p(&pred)]));
    assert!(md.contains("Over-regularization"), "{md}");
}

#[test]
fn evaluate_rejects_incomplete_predictions() {
    let tmp = TempDir::new().unwrap();
    let gold = tmp.path().join("gold.tsv");
    let pred = tmp.path().join("pred.tsv");
    fs::write(&gold, "かく\tかいた\t_\nたべる\tたべた\t_\n").unwrap();
    fs::write(&pred, "かく\tかいた\n").unwrap();
    let out = jptense(&["evaluate", "--gold", p(&gold), "--pred", p(&pred)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("たべる"));
}

#[test]
fn run_exit_code_tracks_completeness() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("config.json");
    let write = |evals: &str| {
        fs::write(
            &cfg,
            format!(
                r#"{{"seed": 1, "dataset": {{"synthetic": "reference"}}, "split": {{"kind": "form", "test_fraction": 0.1}},
                    "conditions": ["full", "regular-only"], "evaluations": {evals}, "output_dir": "out"}}"#
            ),
        )
        .unwrap();
    };
    write(r#"[{"condition": "full", "model": "o", "oracle": "perfect"}]"#);
    stdout(&jptense(&["run", "--config", p(&cfg)]));
    assert!(tmp.path().join("out/manifest.json").is_file());

    write(r#"[{"condition": "full", "model": "m", "predictions": "missing.tsv"}]"#);
    let out = jptense(&["run", "--config", p(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("notice: full/m"));
}

#[test]
fn schema_is_json() {
    let js: serde_json::Value = serde_json::from_str(&stdout(&jptense(&["schema"]))).unwrap();
    assert_eq!(js["title"], "SubgroupReport");
}
