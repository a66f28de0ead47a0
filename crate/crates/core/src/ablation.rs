//! Controlled dataset conditions. A condition keeps both regular classes and
//! some subset of the type-4 subtypes, and is applied identically to the
//! train and test sides.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::conjugator::VerbType;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AblationCondition {
    pub name: String,
    pub included_types: BTreeSet<VerbType>,
}

impl AblationCondition {
    /// Regular classes plus the given type-4 subtypes.
    pub fn new(name: impl Into<String>, irregular: &[VerbType]) -> Result<AblationCondition> {
        let name = name.into();
        if let Some(t) = irregular.iter().find(|t| !t.is_type4()) {
            return Err(Error::Config(format!("condition {name}: type {t} cannot be toggled")));
        }
        let mut included_types: BTreeSet<VerbType> = [VerbType::Godan, VerbType::Ichidan].into();
        included_types.extend(irregular.iter().copied());
        Ok(AblationCondition { name, included_types })
    }

    pub fn includes(&self, t: VerbType) -> bool {
        self.included_types.contains(&t)
    }

    pub fn is_full(&self) -> bool {
        VerbType::DATASET.iter().all(|t| self.includes(*t))
    }

    /// Looks up a preset by name (case-insensitive; `_` and `-` interchangeable).
    pub fn preset(name: &str) -> Result<AblationCondition> {
        let key = normalize(name);
        enumerate_conditions()
            .into_iter()
            .find(|c| normalize(&c.name) == key)
            .ok_or_else(|| Error::Config(format!("unknown ablation condition `{name}`")))
    }
}

impl fmt::Display for AblationCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn normalize(name: &str) -> String {
    name.trim().to_ascii_lowercase().replace('_', "-")
}

/// The eight presets, in this order: full, regular-only, the three single
/// subtypes, then the three subtype pairs.
pub fn enumerate_conditions() -> Vec<AblationCondition> {
    use VerbType::{EGemination as E, IGemination as I, Localized as L};
    let presets: [(&str, &[VerbType]); 8] = [
        ("full", &[I, E, L]),
        ("regular-only", &[]),
        ("regular+4-1", &[I]),
        ("regular+4-2", &[E]),
        ("regular+4-3", &[L]),
        ("regular+4-1+4-2", &[I, E]),
        ("regular+4-1+4-3", &[I, L]),
        ("regular+4-2+4-3", &[E, L]),
    ];
    presets
        .into_iter()
        .map(|(name, types)| AblationCondition::new(name, types).expect("presets are well-formed"))
        .collect()
}

/// Filters both sides to the condition's types, preserving order.
pub fn apply(cond: &AblationCondition, train: &Dataset, test: &Dataset) -> Result<(Dataset, Dataset)> {
    let keep = |t: VerbType| cond.includes(t);
    let train2 = train.filter_types(keep, format!("{}@{}", train.provenance, cond.name));
    let test2 = test.filter_types(keep, format!("{}@{}", test.provenance, cond.name));
    if test2.is_empty() {
        return Err(Error::Config(format!("condition {} leaves an empty test set", cond.name)));
    }
    Ok((train2, test2))
}
