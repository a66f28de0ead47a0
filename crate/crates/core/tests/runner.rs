use std::fs;
use std::path::Path;

use jptense_core::dataset::parse_tsv;
use jptense_core::runner::{run, EvaluationStatus, ExperimentConfig};
use serde_json::json;
use tempfile::TempDir;

fn config(out: &Path, evaluations: serde_json::Value) -> ExperimentConfig {
    let cfg: ExperimentConfig = serde_json::from_value(json!({
        "seed": 7,
        "dataset": {"synthetic": "reference"},
        "split": {"kind": "lemma", "test_fraction": 0.1},
        "conditions": ["full", "regular-only", "regular+4-2"],
        "evaluations": evaluations,
        "output_dir": out,
    }))
    .unwrap();
    cfg
}

fn oracle_evals() -> serde_json::Value {
    json!([
        {"condition": "full", "model": "overreg", "oracle": "over_regularize"},
        {"condition": "regular-only", "model": "overreg", "oracle": "over_regularize"},
        {"condition": "regular+4-2", "model": "overreg", "oracle": "over_regularize"},
        {"condition": "full", "model": "perfect", "oracle": "perfect"},
    ])
}

fn read_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn oracle_run_writes_everything() {
    let tmp = TempDir::new().unwrap();
    let m = run(&config(tmp.path(), oracle_evals())).unwrap();
    assert!(m.complete);
    assert!(m.notices.is_empty(), "{:?}", m.notices);
    assert_eq!(m.dataset.size, 3958);
    assert_eq!(m.train.size + m.test.size, 3958);
    for f in ["manifest.json", "dataset.tsv", "train.tsv", "test.tsv", "full/overreg/report.md", "full/overreg/taxonomy.json"] {
        assert!(tmp.path().join(f).is_file(), "{f}");
    }
    match m.evaluation("full", "perfect").unwrap() {
        EvaluationStatus::Completed { errors, accuracy_percent, delta_vs_full_points, .. } => {
            assert_eq!(*errors, 0);
            assert_eq!(accuracy_percent, "100.00");
            assert_eq!(delta_vs_full_points.as_deref(), Some("+0.00"));
        }
        other => panic!("{other:?}"),
    }
    // Removing every irregular item from the test side makes the
    // over-regularizing oracle perfect.
    match m.evaluation("regular-only", "overreg").unwrap() {
        EvaluationStatus::Completed { errors, .. } => assert_eq!(*errors, 0),
        other => panic!("{other:?}"),
    }
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("full/overreg/report.json")).unwrap()).unwrap();
    let rows = report["subgroups"].as_array().unwrap();
    let row = |g: &str| rows.iter().find(|r| r["group"] == g).unwrap();
    assert_eq!(row("1")["errors"], 0);
    assert!(row("4-2")["disparity_ratio"].as_f64().unwrap() > 10.0);
}

#[test]
fn delta_matches_hand_computation() {
    let tmp = TempDir::new().unwrap();
    let m = run(&config(tmp.path(), oracle_evals())).unwrap();
    let acc = |c: &str| match m.evaluation(c, "overreg").unwrap() {
        EvaluationStatus::Completed { correct, total, delta_vs_full_points, .. } => {
            (*correct as f64 / *total as f64, delta_vs_full_points.clone().unwrap())
        }
        other => panic!("{other:?}"),
    };
    let (full, _) = acc("full");
    let (abl, delta) = acc("regular+4-2");
    let expected = format!("{:+.2}", (abl - full) * 100.0);
    assert_eq!(delta, expected);
    assert!(delta.starts_with('+'));
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    run(&config(a.path(), oracle_evals())).unwrap();
    run(&config(b.path(), oracle_evals())).unwrap();
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    assert!(ta.len() > 10);
    // The manifest embeds the output directory nowhere, so whole trees match.
    assert_eq!(ta, tb);
}

#[test]
fn missing_predictions_are_reported_not_fatal() {
    let tmp = TempDir::new().unwrap();
    let evals = json!([
        {"condition": "full", "model": "seq2seq", "predictions": tmp.path().join("nope.tsv")},
        {"condition": "full", "model": "perfect", "oracle": "perfect"},
    ]);
    let m = run(&config(&tmp.path().join("out"), evals)).unwrap();
    assert!(!m.complete);
    assert!(matches!(m.evaluation("full", "seq2seq"), Some(EvaluationStatus::Missing { .. })));
    assert!(matches!(m.evaluation("full", "perfect"), Some(EvaluationStatus::Completed { .. })));
    assert_eq!(m.notices.len(), 1);
    assert!(m.notices[0].starts_with("full/seq2seq"));
}

#[test]
fn generation_only_then_external_predictions() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let m = run(&config(&out, json!([]))).unwrap();
    assert!(m.complete);
    assert_eq!(m.notices.len(), 1);
    assert!(m.notices[0].contains("evaluation skipped"));

    // A model run outside the toolkit predicts the full test split with
    // one deliberate mistake.
    let test = parse_tsv(fs::File::open(out.join("full/test.tsv")).map(std::io::BufReader::new).unwrap(), "t").unwrap();
    let mut lines: Vec<String> = test.pairs.iter().map(|p| format!("{}\t{}", p.lemma, p.past)).collect();
    lines[0] = format!("{}\t⟨unk⟩", test.pairs[0].lemma);
    let pred_path = tmp.path().join("preds.tsv");
    fs::write(&pred_path, lines.join("\n") + "\n").unwrap();

    let evals = json!([{"condition": "full", "model": "ext", "predictions": pred_path}]);
    let m2 = run(&config(&out, evals)).unwrap();
    assert!(m2.complete, "{:?}", m2.notices);
    assert_eq!(m2.test.sha256, m.test.sha256);
    match m2.evaluation("full", "ext").unwrap() {
        EvaluationStatus::Completed { errors, total, .. } => {
            assert_eq!(*errors, 1);
            assert_eq!(*total as usize, test.len());
        }
        other => panic!("{other:?}"),
    }
    let tax = fs::read_to_string(out.join("full/ext/taxonomy.md")).unwrap();
    assert!(tax.contains("| UNK | 0 | 1 |"), "{tax}");
}

#[test]
fn unjoinable_predictions_fail_the_evaluation() {
    let tmp = TempDir::new().unwrap();
    let pred_path = tmp.path().join("preds.tsv");
    fs::write(&pred_path, "かく\tかいた\n").unwrap();
    let evals = json!([{"condition": "full", "model": "ext", "predictions": pred_path}]);
    let m = run(&config(&tmp.path().join("out"), evals)).unwrap();
    assert!(!m.complete);
    match m.evaluation("full", "ext").unwrap() {
        EvaluationStatus::Failed { reason } => assert!(reason.contains("missing"), "{reason}"),
        other => panic!("{other:?}"),
    }
}
