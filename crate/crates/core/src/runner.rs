//! Experiment orchestration: dataset → split → ablation conditions →
//! predictions → subgroup and taxonomy reports, plus a manifest recording
//! seeds, dataset hashes and accuracy deltas against the full condition.
//!
//! Output layout under `output_dir`:
//!
//! ```text
//! manifest.json
//! dataset.tsv  train.tsv  test.tsv
//! <condition>/train.tsv
//! <condition>/test.tsv
//! <condition>/<model>/predictions.tsv   (built-in oracles only)
//! <condition>/<model>/report.json|md
//! <condition>/<model>/taxonomy.json|md
//! ```

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ablation::{self, AblationCondition};
use crate::conjugator::over_regularized_form;
use crate::dataset::{self, generate_synthetic, parse_tsv, to_tsv_string, Dataset, SplitKind, SplitSpec, TypeCounts};
use crate::error::{Error, Result};
use crate::metrics::{self, parse_predictions, subgroup_report, write_predictions, PredictionRecord, DEFAULT_UNK};
use crate::scalar::{ExactRatio, Scalar};
use crate::taxonomy::{taxonomy_report, ErrorClassifier};

/// Name of the reference condition deltas are measured against.
pub const FULL: &str = "full";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub dataset: DatasetSource,
    pub split: SplitConfig,
    pub conditions: Vec<String>,
    #[serde(default)]
    pub evaluations: Vec<EvaluationSpec>,
    pub output_dir: PathBuf,
    #[serde(default = "default_unk")]
    pub unk_sentinel: String,
}

fn default_unk() -> String {
    DEFAULT_UNK.to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    File(PathBuf),
    /// `"reference"`, `"1=100,2=50"` or a map from type label to count.
    Synthetic(CountsSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CountsSpec {
    Named(String),
    Explicit(TypeCounts),
}

impl CountsSpec {
    pub fn resolve(&self) -> Result<TypeCounts> {
        match self {
            CountsSpec::Named(s) => TypeCounts::parse(s),
            CountsSpec::Explicit(c) => Ok(c.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub kind: SplitKind,
    pub test_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationSpec {
    pub condition: String,
    pub model: String,
    #[serde(flatten)]
    pub source: PredictionSource,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PredictionSource {
    File { predictions: PathBuf },
    Oracle { oracle: OracleMode },
}

/// Built-in predictors that need no trained model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    /// Emits every gold form.
    Perfect,
    /// Emits the over-regularized form for type-4 items, gold otherwise.
    OverRegularize,
}

impl std::str::FromStr for OracleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "perfect" => Ok(OracleMode::Perfect),
            "over_regularize" => Ok(OracleMode::OverRegularize),
            other => Err(Error::Config(format!("unknown oracle mode `{other}`"))),
        }
    }
}

impl ExperimentConfig {
    /// Reads a JSON config; relative paths resolve against its directory.
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let mut cfg: ExperimentConfig = serde_json::from_reader(BufReader::new(fs::File::open(path)?))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.output_dir);
        if let DatasetSource::File(p) = &mut cfg.dataset {
            resolve(p);
        }
        for e in &mut cfg.evaluations {
            if let PredictionSource::File { predictions } = &mut e.source {
                resolve(predictions);
            }
        }
        Ok(cfg)
    }

    fn split_spec(&self) -> SplitSpec {
        SplitSpec { kind: self.split.kind, test_fraction: self.split.test_fraction, seed: self.seed }
    }

    pub fn validate(&self) -> Result<Vec<AblationCondition>> {
        if self.conditions.is_empty() {
            return Err(Error::Config("no conditions requested".into()));
        }
        let conds = self.conditions.iter().map(|n| AblationCondition::preset(n)).collect::<Result<Vec<_>>>()?;
        for (i, c) in conds.iter().enumerate() {
            if conds[..i].iter().any(|d| d.name == c.name) {
                return Err(Error::Config(format!("condition {} listed twice", c.name)));
            }
        }
        for e in &self.evaluations {
            let c = AblationCondition::preset(&e.condition)?;
            if !conds.iter().any(|d| d.name == c.name) {
                return Err(Error::Config(format!("evaluation refers to condition {} which is not in `conditions`", c.name)));
            }
            if e.model.is_empty() || e.model.contains(['/', '\\']) || e.model.starts_with('.') {
                return Err(Error::Config(format!("model tag `{}` is not a valid directory name", e.model)));
            }
        }
        let f = self.split.test_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Config(format!("test fraction {f} is outside (0, 1)")));
        }
        Ok(conds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub provenance: String,
    pub size: usize,
    pub sha256: String,
}

impl DatasetInfo {
    fn of(d: &Dataset, bytes: &str) -> DatasetInfo {
        DatasetInfo { provenance: d.provenance.clone(), size: d.len(), sha256: sha256_hex(bytes.as_bytes()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EvaluationStatus {
    Completed {
        correct: u64,
        total: u64,
        accuracy: f64,
        accuracy_percent: String,
        /// Percentage-point change versus the full condition with the same model.
        delta_vs_full_points: Option<String>,
        errors: u64,
    },
    Missing { reason: String },
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationOutcome {
    pub model: String,
    #[serde(flatten)]
    pub status: EvaluationStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub name: String,
    pub included_types: Vec<String>,
    pub train: Option<DatasetInfo>,
    pub test: Option<DatasetInfo>,
    pub error: Option<String>,
    pub evaluations: Vec<EvaluationOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub seed: u64,
    pub split: SplitSpec,
    pub dataset: DatasetInfo,
    pub train: DatasetInfo,
    pub test: DatasetInfo,
    pub conditions: Vec<ConditionOutcome>,
    pub notices: Vec<String>,
    /// True when every requested evaluation completed.
    pub complete: bool,
}

impl ExperimentManifest {
    pub fn evaluation(&self, condition: &str, model: &str) -> Option<&EvaluationStatus> {
        self.conditions
            .iter()
            .find(|c| c.name == condition)?
            .evaluations
            .iter()
            .find(|e| e.model == model)
            .map(|e| &e.status)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Signed percentage-point difference `ablated - full`, two decimals.
pub fn accuracy_delta_points<S: Scalar>(full: &S, ablated: &S) -> String {
    let delta = (ablated.clone() - full.clone()) * S::from_counts(100, 1);
    let text = delta.render(2);
    if text.starts_with('-') {
        text
    } else {
        format!("+{text}")
    }
}

/// Predictions from a built-in oracle for every test item.
pub fn oracle_predict(test: &Dataset, mode: OracleMode) -> Vec<PredictionRecord> {
    test.pairs
        .iter()
        .map(|p| {
            let predicted = match mode {
                OracleMode::Perfect => p.past.to_string(),
                OracleMode::OverRegularize => over_regularized_form(&p.lemma, p.vtype).unwrap_or_else(|| p.past.clone()).to_string(),
            };
            PredictionRecord::new(p, predicted)
        })
        .collect()
}

fn write_tsv(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text.as_bytes())?;
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

struct Evaluated {
    outcome: EvaluationOutcome,
    accuracy: Option<ExactRatio>,
}

fn evaluate(
    spec: &EvaluationSpec,
    test: &Dataset,
    dir: &Path,
    classifier: &ErrorClassifier,
) -> Result<(EvaluationStatus, Option<ExactRatio>)> {
    let records = match &spec.source {
        PredictionSource::Oracle { oracle } => {
            let recs = oracle_predict(test, *oracle);
            let mut buf = Vec::new();
            write_predictions(&recs, &mut buf)?;
            fs::create_dir_all(dir)?;
            fs::write(dir.join("predictions.tsv"), buf)?;
            recs
        }
        PredictionSource::File { predictions } => {
            if !predictions.is_file() {
                return Ok((EvaluationStatus::Missing { reason: format!("prediction file {} not found", predictions.display()) }, None));
            }
            fs::create_dir_all(dir)?;
            parse_predictions(BufReader::new(fs::File::open(predictions)?), test)?
        }
    };
    let report = subgroup_report::<ExactRatio>(&records)?;
    write_json(&dir.join("report.json"), &report.to_json())?;
    fs::write(dir.join("report.md"), report.to_markdown())?;
    let tax = taxonomy_report(&classifier.classify_all(&records)?);
    write_json(&dir.join("taxonomy.json"), &tax.to_json())?;
    fs::write(dir.join("taxonomy.md"), tax.to_markdown())?;
    let status = EvaluationStatus::Completed {
        correct: report.total - report.total_errors,
        total: report.total,
        accuracy: report.accuracy.as_f64(),
        accuracy_percent: (report.accuracy * ExactRatio::from_integer(100)).render(2),
        delta_vs_full_points: None,
        errors: report.total_errors,
    };
    Ok((status, Some(report.accuracy)))
}

fn run_condition(
    cond: &AblationCondition,
    config: &ExperimentConfig,
    train: &Dataset,
    test: &Dataset,
    classifier: &ErrorClassifier,
) -> Result<(ConditionOutcome, Vec<Option<ExactRatio>>)> {
    let mut outcome = ConditionOutcome {
        name: cond.name.clone(),
        included_types: cond.included_types.iter().map(|t| t.label().to_string()).collect(),
        train: None,
        test: None,
        error: None,
        evaluations: Vec::new(),
    };
    let specs: Vec<&EvaluationSpec> = config
        .evaluations
        .iter()
        .filter(|e| AblationCondition::preset(&e.condition).is_ok_and(|c| c.name == cond.name))
        .collect();

    let (train2, test2) = match ablation::apply(cond, train, test) {
        Ok(v) => v,
        Err(e) => {
            outcome.error = Some(e.to_string());
            for s in &specs {
                outcome.evaluations.push(EvaluationOutcome {
                    model: s.model.clone(),
                    status: EvaluationStatus::Failed { reason: format!("condition not built: {e}") },
                });
            }
            return Ok((outcome, vec![None; specs.len()]));
        }
    };
    let dir = config.output_dir.join(&cond.name);
    fs::create_dir_all(&dir)?;
    let (train_txt, test_txt) = (to_tsv_string(&train2), to_tsv_string(&test2));
    write_tsv(&dir.join("train.tsv"), &train_txt)?;
    write_tsv(&dir.join("test.tsv"), &test_txt)?;
    outcome.train = Some(DatasetInfo::of(&train2, &train_txt));
    outcome.test = Some(DatasetInfo::of(&test2, &test_txt));

    let mut accuracies = Vec::with_capacity(specs.len());
    for s in specs {
        let Evaluated { outcome: eval, accuracy } = match evaluate(s, &test2, &dir.join(&s.model), classifier) {
            Ok((status, accuracy)) => Evaluated { outcome: EvaluationOutcome { model: s.model.clone(), status }, accuracy },
            Err(e) => Evaluated {
                outcome: EvaluationOutcome { model: s.model.clone(), status: EvaluationStatus::Failed { reason: e.to_string() } },
                accuracy: None,
            },
        };
        outcome.evaluations.push(eval);
        accuracies.push(accuracy);
    }
    Ok((outcome, accuracies))
}

/// Runs the whole experiment and writes `manifest.json` last.
///
/// Conditions run in parallel. Missing or failing evaluations are recorded
/// in the manifest rather than aborting the run; check
/// [`ExperimentManifest::complete`].
pub fn run(config: &ExperimentConfig) -> Result<ExperimentManifest> {
    let conditions = config.validate()?;
    let data = match &config.dataset {
        DatasetSource::File(path) => {
            parse_tsv(BufReader::new(fs::File::open(path)?), path.display().to_string())?
        }
        DatasetSource::Synthetic(counts) => generate_synthetic(&counts.resolve()?, config.seed)?,
    };
    let spec = config.split_spec();
    let (train, test) = dataset::split(&data, &spec)?;

    fs::create_dir_all(&config.output_dir)?;
    let mut infos = Vec::new();
    for (name, d) in [("dataset.tsv", &data), ("train.tsv", &train), ("test.tsv", &test)] {
        let text = to_tsv_string(d);
        write_tsv(&config.output_dir.join(name), &text)?;
        infos.push(DatasetInfo::of(d, &text));
    }

    let classifier = ErrorClassifier::new(config.unk_sentinel.clone());
    let results = conditions
        .par_iter()
        .map(|c| run_condition(c, config, &train, &test, &classifier))
        .collect::<Result<Vec<_>>>()?;

    // Deltas against the full condition, same model tag.
    let full_acc = |model: &str| {
        results.iter().find(|(o, _)| o.name == FULL).and_then(|(o, accs)| {
            o.evaluations.iter().zip(accs).find(|(e, _)| e.model == model).and_then(|(_, a)| *a)
        })
    };
    let mut outcomes = Vec::with_capacity(results.len());
    for (mut outcome, accs) in results.iter().cloned() {
        for (eval, acc) in outcome.evaluations.iter_mut().zip(&accs) {
            if let (EvaluationStatus::Completed { delta_vs_full_points, .. }, Some(acc)) = (&mut eval.status, acc) {
                *delta_vs_full_points = full_acc(&eval.model).map(|f| accuracy_delta_points(&f, acc));
            }
        }
        outcomes.push(outcome);
    }

    let mut notices = Vec::new();
    if config.evaluations.is_empty() {
        notices.push("no evaluations requested; datasets written, evaluation skipped".to_string());
    }
    for o in &outcomes {
        for e in &o.evaluations {
            match &e.status {
                EvaluationStatus::Missing { reason } | EvaluationStatus::Failed { reason } => {
                    notices.push(format!("{}/{}: {reason}", o.name, e.model));
                }
                EvaluationStatus::Completed { .. } => {}
            }
        }
    }
    let complete = outcomes
        .iter()
        .flat_map(|o| &o.evaluations)
        .all(|e| matches!(e.status, EvaluationStatus::Completed { .. }));

    let mut infos = infos.into_iter();
    let manifest = ExperimentManifest {
        seed: config.seed,
        split: spec,
        dataset: infos.next().expect("three infos"),
        train: infos.next().expect("three infos"),
        test: infos.next().expect("three infos"),
        conditions: outcomes,
        notices,
        complete,
    };
    write_json(&config.output_dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

/// Re-exported for callers building reports by hand.
pub use metrics::SubgroupReport;
