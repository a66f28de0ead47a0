//! Exact-match accuracy, per-subgroup accuracy and the disparity ratio
//! (a subgroup's share of all errors divided by its share of the data).

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::conjugator::VerbType;
use crate::dataset::{Dataset, InflectionPair};
use crate::error::{Error, JoinError, Result};
use crate::kana::KanaWord;
use crate::scalar::Scalar;

/// Rendered in place of an undefined ratio.
pub const UNDEFINED: &str = "—";

/// Default surface form of the unknown-symbol token.
pub const DEFAULT_UNK: &str = "⟨unk⟩";

/// One model prediction joined to its gold row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub lemma: KanaWord,
    pub gold: KanaWord,
    /// Raw model output; may be empty or contain an UNK token.
    pub predicted: String,
    pub vtype: VerbType,
}

impl PredictionRecord {
    pub fn new(pair: &InflectionPair, predicted: impl Into<String>) -> PredictionRecord {
        PredictionRecord {
            lemma: pair.lemma.clone(),
            gold: pair.past.clone(),
            predicted: predicted.into(),
            vtype: pair.vtype,
        }
    }

    /// Codepoint-exact comparison.
    pub fn is_correct(&self) -> bool {
        self.predicted == self.gold.to_string()
    }
}

/// Reporting unit: a single verb type or the type-4 rollup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subgroup {
    Type(VerbType),
    Type4,
}

impl Subgroup {
    pub fn label(&self) -> &'static str {
        match self {
            Subgroup::Type(t) => t.label(),
            Subgroup::Type4 => "4",
        }
    }
}

/// (items, errors) per verb type. Merging is associative and commutative,
/// so partial tallies over disjoint chunks can be combined in any order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubgroupTally {
    pub counts: BTreeMap<VerbType, (u64, u64)>,
}

impl SubgroupTally {
    pub fn from_records(preds: &[PredictionRecord]) -> SubgroupTally {
        let mut t = SubgroupTally::default();
        for p in preds {
            t.add(p.vtype, !p.is_correct());
        }
        t
    }

    pub fn add(&mut self, vtype: VerbType, is_error: bool) {
        let e = self.counts.entry(vtype).or_default();
        e.0 += 1;
        e.1 += u64::from(is_error);
    }

    pub fn merge(mut self, other: &SubgroupTally) -> SubgroupTally {
        for (t, (n, e)) in &other.counts {
            let slot = self.counts.entry(*t).or_default();
            slot.0 += n;
            slot.1 += e;
        }
        self
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|c| c.0).sum()
    }

    pub fn errors(&self) -> u64 {
        self.counts.values().map(|c| c.1).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupRow<S> {
    pub group: Subgroup,
    pub n: u64,
    pub data_share: S,
    pub errors: u64,
    /// Zero when the corpus has no errors at all.
    pub error_share: S,
    pub accuracy: S,
    /// `None` when the corpus has no errors or the group has no data.
    pub disparity_ratio: Option<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupReport<S> {
    pub total: u64,
    pub total_errors: u64,
    pub accuracy: S,
    /// One row per verb type present, in type order.
    pub rows: Vec<SubgroupRow<S>>,
    /// Rollup of the type-4 subtypes, present when any subtype is.
    pub type4: Option<SubgroupRow<S>>,
}

/// Share of errors over share of data; undefined when the data share is 0.
pub fn disparity_ratio<S: Scalar>(error_share: S, data_share: S) -> Option<S> {
    S::ratio(error_share, data_share)
}

/// Fraction of predictions identical to their gold form.
pub fn exact_match_accuracy<S: Scalar>(preds: &[PredictionRecord]) -> Result<S> {
    if preds.is_empty() {
        return Err(Error::Config("accuracy of an empty prediction set".into()));
    }
    let correct = preds.iter().filter(|p| p.is_correct()).count();
    Ok(S::from_counts(correct as u64, preds.len() as u64))
}

/// Relative reduction of the error mass `1 - accuracy` going from
/// `baseline` to `ablated`. Undefined for a perfect baseline.
pub fn error_reduction<S: Scalar>(baseline: S, ablated: S) -> Option<S> {
    let base_err = S::one() - baseline;
    let abl_err = S::one() - ablated;
    S::ratio(base_err.clone() - abl_err, base_err)
}

pub fn subgroup_report<S: Scalar>(preds: &[PredictionRecord]) -> Result<SubgroupReport<S>> {
    if preds.is_empty() {
        return Err(Error::Config("subgroup report over an empty prediction set".into()));
    }
    Ok(report_from_tally(&SubgroupTally::from_records(preds)))
}

/// Builds the report from pre-aggregated counts.
pub fn report_from_tally<S: Scalar>(tally: &SubgroupTally) -> SubgroupReport<S> {
    let total = tally.total();
    let total_errors = tally.errors();
    let row = |group: Subgroup, n: u64, errors: u64| {
        let data_share = if total == 0 { S::zero() } else { S::from_counts(n, total) };
        let error_share = if total_errors == 0 { S::zero() } else { S::from_counts(errors, total_errors) };
        let accuracy = if n == 0 { S::zero() } else { S::from_counts(n - errors, n) };
        let disparity_ratio =
            if total_errors == 0 { None } else { disparity_ratio(error_share.clone(), data_share.clone()) };
        SubgroupRow { group, n, data_share, errors, error_share, accuracy, disparity_ratio }
    };
    let rows = tally.counts.iter().map(|(t, (n, e))| row(Subgroup::Type(*t), *n, *e)).collect();
    let (n4, e4) = tally
        .counts
        .iter()
        .filter(|(t, _)| t.is_type4())
        .fold((0, 0), |(n, e), (_, c)| (n + c.0, e + c.1));
    let type4 = (n4 > 0).then(|| row(Subgroup::Type4, n4, e4));
    let accuracy = if total == 0 { S::zero() } else { S::from_counts(total - total_errors, total) };
    SubgroupReport { total, total_errors, accuracy, rows, type4 }
}

fn render_opt<S: Scalar>(v: &Option<S>, decimals: u32) -> String {
    v.as_ref().map_or_else(|| UNDEFINED.to_string(), |v| v.render(decimals))
}

fn percent<S: Scalar>(v: &S) -> String {
    (v.clone() * S::from_counts(100, 1)).render(2)
}

impl<S: Scalar> SubgroupReport<S> {
    pub fn row(&self, t: VerbType) -> Option<&SubgroupRow<S>> {
        self.rows.iter().find(|r| r.group == Subgroup::Type(t))
    }

    /// Type rows followed by the rollup, in display order (1, 2, 4, 4-1, 4-2, 4-3).
    pub fn display_rows(&self) -> Vec<&SubgroupRow<S>> {
        let mut out: Vec<&SubgroupRow<S>> = self.rows.iter().filter(|r| !matches!(r.group, Subgroup::Type(t) if t.is_type4())).collect();
        out.extend(self.type4.as_ref());
        out.extend(self.rows.iter().filter(|r| matches!(r.group, Subgroup::Type(t) if t.is_type4())));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .display_rows()
            .into_iter()
            .map(|r| {
                json!({
                    "group": r.group.label(),
                    "n": r.n,
                    "data_share": r.data_share.as_f64(),
                    "errors": r.errors,
                    "error_share": r.error_share.as_f64(),
                    "accuracy": r.accuracy.as_f64(),
                    "disparity_ratio": r.disparity_ratio.as_ref().map(Scalar::as_f64),
                    "rendered": {
                        "data_share_percent": percent(&r.data_share),
                        "error_share_percent": percent(&r.error_share),
                        "accuracy_percent": percent(&r.accuracy),
                        "disparity_ratio": render_opt(&r.disparity_ratio, 2),
                    }
                })
            })
            .collect();
        json!({
            "total": self.total,
            "total_errors": self.total_errors,
            "accuracy": self.accuracy.as_f64(),
            "accuracy_percent": percent(&self.accuracy),
            "subgroups": rows,
        })
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "Exact-match accuracy: {}% ({} of {} correct)\n\n",
            percent(&self.accuracy),
            self.total - self.total_errors,
            self.total
        );
        out.push_str("| Verb type | N | Data share (%) | Errors | Error share (%) | Accuracy (%) | Disparity ratio |\n");
        out.push_str("|---|---:|---:|---:|---:|---:|---:|\n");
        for r in self.display_rows() {
            let name = match r.group {
                Subgroup::Type(t) if t.is_type4() => format!("&nbsp;&nbsp;{}", t.label()),
                g => g.label().to_string(),
            };
            let _ = writeln!(
                out,
                "| {name} | {} | {} | {} | {} | {} | {} |",
                r.n,
                percent(&r.data_share),
                r.errors,
                percent(&r.error_share),
                percent(&r.accuracy),
                render_opt(&r.disparity_ratio, 2)
            );
        }
        out
    }
}

/// JSON Schema for [`SubgroupReport::to_json`].
pub fn report_json_schema() -> serde_json::Value {
    let ratio = json!({ "type": "number", "minimum": 0 });
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "SubgroupReport",
        "type": "object",
        "required": ["total", "total_errors", "accuracy", "accuracy_percent", "subgroups"],
        "properties": {
            "total": { "type": "integer", "minimum": 1, "description": "number of evaluated items" },
            "total_errors": { "type": "integer", "minimum": 0, "description": "items whose prediction differs from gold" },
            "accuracy": { "type": "number", "minimum": 0, "maximum": 1, "description": "exact-match accuracy" },
            "accuracy_percent": { "type": "string", "description": "accuracy in percent, 2 decimals" },
            "subgroups": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["group", "n", "data_share", "errors", "error_share", "accuracy", "disparity_ratio", "rendered"],
                    "properties": {
                        "group": { "enum": ["1", "2", "3", "4", "4-1", "4-2", "4-3"], "description": "verb type, or 4 for the rollup of 4-1/4-2/4-3" },
                        "n": { "type": "integer", "description": "items in the group" },
                        "data_share": ratio.clone(),
                        "errors": { "type": "integer", "description": "errors in the group" },
                        "error_share": ratio.clone(),
                        "accuracy": ratio.clone(),
                        "disparity_ratio": { "type": ["number", "null"], "description": "error_share / data_share; null when the corpus has no errors" },
                        "rendered": {
                            "type": "object",
                            "description": "display strings; undefined ratios render as an em dash",
                            "properties": {
                                "data_share_percent": { "type": "string" },
                                "error_share_percent": { "type": "string" },
                                "accuracy_percent": { "type": "string" },
                                "disparity_ratio": { "type": "string" }
                            }
                        }
                    }
                }
            }
        }
    })
}

/// Joins a `lemma<TAB>predicted` file against the gold set.
///
/// Every gold lemma must appear exactly once; anything else is a
/// [`JoinError`] listing all offenders. Records come back in gold order.
pub fn parse_predictions<R: BufRead>(reader: R, gold: &Dataset) -> Result<Vec<PredictionRecord>> {
    let mut predicted: HashMap<String, String> = HashMap::new();
    let mut join = JoinError::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let Some((lemma, pred)) = line.split_once('\t') else {
            return Err(Error::Parse { line: i + 1, message: "expected `lemma<TAB>prediction`".into() });
        };
        if pred.contains('\t') {
            return Err(Error::Parse { line: i + 1, message: "expected exactly 2 TAB-separated fields".into() });
        }
        if predicted.insert(lemma.to_string(), pred.to_string()).is_some() && !join.duplicate.iter().any(|d| d == lemma) {
            join.duplicate.push(lemma.to_string());
        }
    }
    let mut records = Vec::with_capacity(gold.len());
    for pair in &gold.pairs {
        match predicted.remove(&pair.lemma.to_string()) {
            Some(p) => records.push(PredictionRecord::new(pair, p)),
            None => join.missing.push(pair.lemma.to_string()),
        }
    }
    join.extra = predicted.into_keys().collect();
    join.extra.sort();
    if join.is_empty() {
        Ok(records)
    } else {
        Err(join.into())
    }
}

/// Writes `lemma<TAB>predicted` lines.
pub fn write_predictions<W: std::io::Write>(records: &[PredictionRecord], mut out: W) -> Result<()> {
    for r in records {
        writeln!(out, "{}\t{}", r.lemma, r.predicted)?;
    }
    Ok(())
}
