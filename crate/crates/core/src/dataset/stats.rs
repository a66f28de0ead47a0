use std::fmt::Write as _;

use serde::Serialize;

use super::Dataset;
use crate::conjugator::VerbType;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct TypeStats<S> {
    pub count: usize,
    /// Fraction of the dataset, in `[0, 1]`.
    pub proportion: S,
}

/// Per-type counts and proportions, with the three type-4 subtypes also
/// rolled up into one group.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats<S> {
    pub total: usize,
    /// One entry per dataset type (1, 2, 4-1, 4-2, 4-3) in that order.
    pub by_type: Vec<(VerbType, TypeStats<S>)>,
    pub type4: TypeStats<S>,
}

impl<S: Scalar> DatasetStats<S> {
    pub fn get(&self, t: VerbType) -> Option<&TypeStats<S>> {
        self.by_type.iter().find(|(vt, _)| *vt == t).map(|(_, s)| s)
    }

    pub fn count(&self, t: VerbType) -> usize {
        self.get(t).map_or(0, |s| s.count)
    }

    /// Percentage of `t`, rendered to four significant digits.
    pub fn percent(&self, t: VerbType) -> String {
        self.get(t).map_or_else(|| "0".into(), |s| render_significant(&(s.proportion.clone() * hundred()), 4))
    }

    /// Markdown table: all verbs, each type, the type-4 rollup and its subtypes.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Verb type | Count | Proportion (%) |\n|---|---:|---:|\n");
        let pct = |p: &S| render_significant(&(p.clone() * hundred()), 4);
        let all = if self.total == 0 { "0".to_string() } else { "100".to_string() };
        let _ = writeln!(out, "| All verbs | {} | {all} |", self.total);
        for t in [VerbType::Godan, VerbType::Ichidan] {
            let s = self.get(t).expect("regular types always present");
            let _ = writeln!(out, "| Type {} ({}) | {} | {} |", t, t.name(), s.count, pct(&s.proportion));
        }
        let _ = writeln!(out, "| Type 3 (Canonical irregular) | 0 | 0 |");
        let _ = writeln!(out, "| Type 4 (Other irregular) | {} | {} |", self.type4.count, pct(&self.type4.proportion));
        for t in [VerbType::IGemination, VerbType::EGemination, VerbType::Localized] {
            let s = self.get(t).expect("subtypes always present");
            let _ = writeln!(out, "| &nbsp;&nbsp;{} ({}) | {} | {} |", t, t.name(), s.count, pct(&s.proportion));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Row {
            vtype: String,
            count: usize,
            proportion: f64,
            percent: String,
        }
        let row = |label: String, s: &TypeStats<S>| Row {
            vtype: label,
            count: s.count,
            proportion: s.proportion.as_f64(),
            percent: render_significant(&(s.proportion.clone() * hundred()), 4),
        };
        let mut rows: Vec<Row> = self.by_type.iter().map(|(t, s)| row(t.label().into(), s)).collect();
        rows.push(row("4".into(), &self.type4));
        serde_json::json!({ "total": self.total, "types": rows })
    }
}

fn hundred<S: Scalar>() -> S {
    S::from_counts(100, 1)
}

/// Computes per-type counts and proportions. Proportions are zero for an empty
/// dataset and otherwise sum to one.
pub fn stats<S: Scalar>(d: &Dataset) -> DatasetStats<S> {
    let total = d.len();
    let share = |count: usize| {
        if total == 0 {
            S::zero()
        } else {
            S::from_counts(count as u64, total as u64)
        }
    };
    let by_type: Vec<_> = VerbType::DATASET
        .iter()
        .map(|&t| {
            let count = d.pairs.iter().filter(|p| p.vtype == t).count();
            (t, TypeStats { count, proportion: share(count) })
        })
        .collect();
    let t4 = d.pairs.iter().filter(|p| p.vtype.is_type4()).count();
    DatasetStats { total, by_type, type4: TypeStats { count: t4, proportion: share(t4) } }
}

/// Renders `value` with `digits` significant digits (plain notation).
pub fn render_significant<S: Scalar>(value: &S, digits: u32) -> String {
    let v = value.as_f64().abs();
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as u32;
    let rendered = value.render(decimals);
    // Rounding can carry into a new leading digit (9.9996 -> 10.000).
    let carried = rendered.trim_start_matches('-').split('.').next().is_some_and(|w| w.len() as i32 > magnitude + 1 && magnitude >= 0);
    if carried && decimals > 0 {
        value.render(decimals - 1)
    } else {
        rendered
    }
}
