//! Error taxonomy: assigns each wrong prediction one category by looking at
//! the mora-level edit between gold and predicted forms.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::conjugator::{over_regularized_form, VerbType};
use crate::error::{Error, Result};
use crate::kana::{diff, segment_moras, EditKind, KanaWord};
use crate::metrics::{PredictionRecord, DEFAULT_UNK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorCategory {
    GeminationOmission,
    GeminationInsertion,
    StemAlternation,
    MorphemeBoundary,
    OverRegularization,
    VowelLength,
    Unknown,
}

impl ErrorCategory {
    pub const ALL: [ErrorCategory; 7] = [
        ErrorCategory::GeminationOmission,
        ErrorCategory::GeminationInsertion,
        ErrorCategory::StemAlternation,
        ErrorCategory::MorphemeBoundary,
        ErrorCategory::OverRegularization,
        ErrorCategory::VowelLength,
        ErrorCategory::Unknown,
    ];

    /// Merges the two gemination directions.
    pub fn rollup(self) -> RolledCategory {
        match self {
            ErrorCategory::GeminationOmission | ErrorCategory::GeminationInsertion => RolledCategory::Gemination,
            ErrorCategory::StemAlternation => RolledCategory::StemAlternation,
            ErrorCategory::MorphemeBoundary => RolledCategory::MorphemeBoundary,
            ErrorCategory::OverRegularization => RolledCategory::OverRegularization,
            ErrorCategory::VowelLength => RolledCategory::VowelLength,
            ErrorCategory::Unknown => RolledCategory::Unknown,
        }
    }
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ErrorCategory::GeminationOmission => "Gemination (omission)",
            ErrorCategory::GeminationInsertion => "Gemination (insertion)",
            ErrorCategory::StemAlternation => "Stem alternation",
            ErrorCategory::MorphemeBoundary => "Morpheme boundary",
            ErrorCategory::OverRegularization => "Over-regularization",
            ErrorCategory::VowelLength => "Vowel length",
            ErrorCategory::Unknown => "UNK",
        };
        f.write_str(s)
    }
}

/// Report-level categories, with gemination directions merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RolledCategory {
    Gemination,
    StemAlternation,
    MorphemeBoundary,
    OverRegularization,
    VowelLength,
    Unknown,
}

impl RolledCategory {
    pub const ALL: [RolledCategory; 6] = [
        RolledCategory::Gemination,
        RolledCategory::StemAlternation,
        RolledCategory::MorphemeBoundary,
        RolledCategory::OverRegularization,
        RolledCategory::VowelLength,
        RolledCategory::Unknown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RolledCategory::Gemination => "Gemination",
            RolledCategory::StemAlternation => "Stem alternation",
            RolledCategory::MorphemeBoundary => "Morpheme boundary",
            RolledCategory::OverRegularization => "Over-regularization",
            RolledCategory::VowelLength => "Vowel length",
            RolledCategory::Unknown => "UNK",
        }
    }

    /// (what goes wrong, the orthographic property involved)
    pub fn describe(self) -> (&'static str, &'static str) {
        match self {
            RolledCategory::Gemination => ("small っ dropped or added", "consonant doubling"),
            RolledCategory::StemAlternation => ("stem change not applied or wrong", "suffix-conditioned alternation"),
            RolledCategory::MorphemeBoundary => ("suffix attached at the wrong place", "boundary detection"),
            RolledCategory::OverRegularization => ("irregular verb given the regular form", "pattern generalization"),
            RolledCategory::VowelLength => ("vowel mora added or dropped", "moraic timing"),
            RolledCategory::Unknown => ("unknown symbol or unrelated output", "n/a"),
        }
    }
}

/// Error classifier with a configurable unknown-symbol sentinel.
#[derive(Debug, Clone)]
pub struct ErrorClassifier {
    pub unk: String,
}

impl Default for ErrorClassifier {
    fn default() -> Self {
        ErrorClassifier { unk: DEFAULT_UNK.to_string() }
    }
}

impl ErrorClassifier {
    pub fn new(unk: impl Into<String>) -> ErrorClassifier {
        ErrorClassifier { unk: unk.into() }
    }

    /// Categorizes a wrong prediction. Rules, first match wins:
    ///
    /// 1. UNK token or non-hiragana output → `Unknown`.
    /// 2. Output equals the over-regularized form → `OverRegularization`.
    /// 3. A single っ deleted or inserted → `GeminationOmission` / `GeminationInsertion`.
    /// 4. A single bare vowel inserted or deleted right after a mora with the
    ///    same vowel → `VowelLength`.
    /// 5. Divergence at or after the final suffix mora → `MorphemeBoundary`.
    /// 6. Divergence earlier, after at least one shared mora → `StemAlternation`.
    /// 7. Otherwise → `Unknown`.
    ///
    /// For type 4-2 rule 3 runs before rule 2: a dropped っ on these verbs is
    /// both a gemination omission and the Ichidan over-regularization, and is
    /// counted as gemination. Types 4-1 and 4-3 keep the order above.
    pub fn classify(&self, lemma: &KanaWord, gold: &KanaWord, predicted: &str, vtype: VerbType) -> Result<ErrorCategory> {
        if predicted == gold.to_string() {
            return Err(Error::ContractViolation(format!("prediction for {lemma} equals the gold form {gold}")));
        }
        if !self.unk.is_empty() && predicted.contains(self.unk.as_str()) {
            return Ok(ErrorCategory::Unknown);
        }
        let Ok(pred) = segment_moras(predicted) else {
            return Ok(ErrorCategory::Unknown);
        };

        let over_regularized = || over_regularized_form(lemma, vtype).is_some_and(|f| f == pred);
        let gemination = || {
            let script = diff(gold, &pred);
            let op = script.single_edit()?;
            match op.kind {
                EditKind::Delete if op.source.is_some_and(|m| m.is_sokuon()) => Some(ErrorCategory::GeminationOmission),
                EditKind::Insert if op.target.is_some_and(|m| m.is_sokuon()) => Some(ErrorCategory::GeminationInsertion),
                _ => None,
            }
        };

        if vtype == VerbType::EGemination {
            if let Some(c) = gemination() {
                return Ok(c);
            }
            if over_regularized() {
                return Ok(ErrorCategory::OverRegularization);
            }
        } else {
            if over_regularized() {
                return Ok(ErrorCategory::OverRegularization);
            }
            if let Some(c) = gemination() {
                return Ok(c);
            }
        }

        if is_vowel_length(gold, &pred) {
            return Ok(ErrorCategory::VowelLength);
        }

        let shared = gold.common_prefix_len(&pred);
        let suffix_start = gold.len().saturating_sub(1);
        if shared >= suffix_start {
            Ok(ErrorCategory::MorphemeBoundary)
        } else if shared > 0 {
            Ok(ErrorCategory::StemAlternation)
        } else {
            Ok(ErrorCategory::Unknown)
        }
    }

    pub fn classify_record(&self, r: &PredictionRecord) -> Result<ErrorCategory> {
        self.classify(&r.lemma, &r.gold, &r.predicted, r.vtype)
    }

    /// Classifies every wrong prediction, skipping correct ones.
    pub fn classify_all(&self, records: &[PredictionRecord]) -> Result<Vec<ClassifiedError>> {
        records
            .iter()
            .filter(|r| !r.is_correct())
            .map(|r| Ok(ClassifiedError { record: r.clone(), category: self.classify_record(r)? }))
            .collect()
    }
}

/// One bare-vowel insertion/deletion that repeats the previous mora's vowel.
fn is_vowel_length(gold: &KanaWord, pred: &KanaWord) -> bool {
    let script = diff(gold, pred);
    let Some(op) = script.single_edit() else { return false };
    let (moved, context) = match op.kind {
        EditKind::Delete => (op.source, gold),
        // Inserted before gold[position]; the preceding mora is gold[position - 1].
        EditKind::Insert => (op.target, gold),
        _ => return false,
    };
    let Some(m) = moved.filter(|m| m.is_vowel_only()) else { return false };
    op.position
        .checked_sub(1)
        .and_then(|i| context.moras().get(i))
        .is_some_and(|prev| prev.vowel() == m.vowel())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedError {
    pub record: PredictionRecord,
    pub category: ErrorCategory,
}

/// Category × verb-type error counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaxonomyReport {
    pub cells: BTreeMap<(ErrorCategory, VerbType), usize>,
}

impl TaxonomyReport {
    pub fn count(&self, c: ErrorCategory, t: VerbType) -> usize {
        self.cells.get(&(c, t)).copied().unwrap_or(0)
    }

    pub fn category_total(&self, c: ErrorCategory) -> usize {
        self.cells.iter().filter(|((cc, _), _)| *cc == c).map(|(_, n)| n).sum()
    }

    pub fn rolled_count(&self, c: RolledCategory, t: VerbType) -> usize {
        self.cells.iter().filter(|((cc, tt), _)| cc.rollup() == c && *tt == t).map(|(_, n)| n).sum()
    }

    pub fn rolled_total(&self, c: RolledCategory) -> usize {
        self.cells.iter().filter(|((cc, _), _)| cc.rollup() == c).map(|(_, n)| n).sum()
    }

    pub fn type_total(&self, t: VerbType) -> usize {
        self.cells.iter().filter(|((_, tt), _)| *tt == t).map(|(_, n)| n).sum()
    }

    pub fn total(&self) -> usize {
        self.cells.values().sum()
    }

    /// Verb types with the most errors of category `c` (all tied maxima);
    /// empty when the category never occurs.
    pub fn dominant_source(&self, c: RolledCategory) -> Vec<VerbType> {
        argmax(VerbType::ALL.iter().map(|&t| (t, self.rolled_count(c, t))))
    }

    /// Most frequent category among errors on type `t` (ties listed).
    pub fn dominant_category(&self, t: VerbType) -> Vec<RolledCategory> {
        argmax(RolledCategory::ALL.iter().map(|&c| (c, self.rolled_count(c, t))))
    }

    fn present_types(&self) -> Vec<VerbType> {
        VerbType::ALL.into_iter().filter(|t| self.type_total(*t) > 0).collect()
    }

    /// Two markdown tables: errors per type with the dominant category, and
    /// the category table with each category's dominant source.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("## Errors by verb type\n\n| Verb type | # Errors | Dominant error type |\n|---|---:|---|\n");
        for t in self.present_types() {
            let dom: Vec<_> = self.dominant_category(t).into_iter().map(RolledCategory::name).collect();
            let _ = writeln!(out, "| {} | {} | {} |", t, self.type_total(t), dom.join(" / "));
        }
        let _ = writeln!(out, "| **Total** | {} | |", self.total());

        out.push_str("\n## Error taxonomy\n\n| Error type | Description | Orthographic property | Count | Dominant source |\n|---|---|---|---:|---|\n");
        for c in RolledCategory::ALL {
            let (what, property) = c.describe();
            let sources: Vec<_> = self.dominant_source(c).into_iter().map(|t| format!("Type {t}")).collect();
            let sources = if sources.is_empty() { "—".to_string() } else { sources.join(", ") };
            let _ = writeln!(out, "| {} | {what} | {property} | {} | {sources} |", c.name(), self.rolled_total(c));
        }

        out.push_str("\n## Category × verb type\n\n| Category |");
        let types = VerbType::DATASET;
        for t in types {
            let _ = write!(out, " {t} |");
        }
        out.push_str("\n|---|");
        out.push_str(&"---:|".repeat(types.len()));
        out.push('\n');
        for c in ErrorCategory::ALL {
            let _ = write!(out, "| {c} |");
            for t in types {
                let _ = write!(out, " {} |", self.count(c, t));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cells: Vec<_> = self
            .cells
            .iter()
            .map(|((c, t), n)| json!({ "category": c, "vtype": t.label(), "count": n }))
            .collect();
        let categories: Vec<_> = RolledCategory::ALL
            .iter()
            .map(|&c| {
                json!({
                    "category": c,
                    "count": self.rolled_total(c),
                    "dominant_source": self.dominant_source(c).iter().map(|t| t.label()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let types: Vec<_> = self
            .present_types()
            .into_iter()
            .map(|t| {
                json!({
                    "vtype": t.label(),
                    "errors": self.type_total(t),
                    "dominant_category": self.dominant_category(t),
                })
            })
            .collect();
        json!({ "total": self.total(), "cells": cells, "categories": categories, "types": types })
    }
}

fn argmax<K: Copy>(items: impl Iterator<Item = (K, usize)>) -> Vec<K> {
    let items: Vec<_> = items.collect();
    let best = items.iter().map(|(_, n)| *n).max().unwrap_or(0);
    if best == 0 {
        return Vec::new();
    }
    items.into_iter().filter(|(_, n)| *n == best).map(|(k, _)| k).collect()
}

/// Tallies classified errors into the category × type table.
pub fn taxonomy_report(errors: &[ClassifiedError]) -> TaxonomyReport {
    let mut report = TaxonomyReport::default();
    for e in errors {
        *report.cells.entry((e.category, e.record.vtype)).or_default() += 1;
    }
    report
}
