//! Inflection datasets: TSV I/O, statistics, splitting and synthetic lexicons.

mod split;
mod stats;
mod synth;
mod tsv;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

pub use split::{split, SplitKind, SplitSpec};
pub use stats::{render_significant, stats, DatasetStats, TypeStats};
pub use synth::generate_synthetic;
pub use tsv::{emit_labeled_tsv, emit_tsv, parse_tsv, to_tsv_string};

use crate::conjugator::{conjugate_past, VerbType};
use crate::error::{Error, Result};
use crate::kana::KanaWord;

/// One dataset row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InflectionPair {
    pub lemma: KanaWord,
    pub past: KanaWord,
    pub vtype: VerbType,
}

impl InflectionPair {
    /// Checks the pair against the conjugation oracle.
    pub fn is_consistent(&self) -> bool {
        conjugate_past(&self.lemma, self.vtype).is_ok_and(|f| f == self.past)
    }
}

/// An ordered collection of pairs with unique lemmas.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    pub pairs: Vec<InflectionPair>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(pairs: Vec<InflectionPair>, provenance: impl Into<String>) -> Dataset {
        Dataset { pairs, provenance: provenance.into() }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Enforces the dataset invariants: unique lemmas, no type 3 and
    /// oracle-consistent pairs.
    pub fn validate(&self) -> Result<()> {
        let mut seen: HashMap<&KanaWord, usize> = HashMap::with_capacity(self.pairs.len());
        for (i, p) in self.pairs.iter().enumerate() {
            if let Some(first) = seen.insert(&p.lemma, i) {
                return Err(Error::Validation(format!("lemma {} appears at rows {first} and {i}", p.lemma)));
            }
            if p.vtype == VerbType::CanonicalIrregular {
                return Err(Error::Validation(format!("row {i}: canonical irregular {} is excluded", p.lemma)));
            }
            if !p.is_consistent() {
                return Err(Error::Validation(format!("row {i}: {} is not the type {} past of {}", p.past, p.vtype, p.lemma)));
            }
        }
        Ok(())
    }

    /// Keeps the pairs whose type satisfies `keep`, preserving order.
    pub fn filter_types(&self, keep: impl Fn(VerbType) -> bool, provenance: impl Into<String>) -> Dataset {
        Dataset {
            pairs: self.pairs.iter().filter(|p| keep(p.vtype)).cloned().collect(),
            provenance: provenance.into(),
        }
    }

    pub fn get(&self, lemma: &KanaWord) -> Option<&InflectionPair> {
        self.pairs.iter().find(|p| &p.lemma == lemma)
    }
}

/// Target number of lemmas per verb type.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeCounts(pub BTreeMap<VerbType, usize>);

impl TypeCounts {
    /// Type distribution of the reference lexicon: 2,503 / 1,298 / 0 / 119 / 37 / 1.
    pub fn reference() -> TypeCounts {
        TypeCounts::from_pairs([
            (VerbType::Godan, 2503),
            (VerbType::Ichidan, 1298),
            (VerbType::IGemination, 119),
            (VerbType::EGemination, 37),
            (VerbType::Localized, 1),
        ])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VerbType, usize)>) -> TypeCounts {
        TypeCounts(pairs.into_iter().collect())
    }

    pub fn get(&self, t: VerbType) -> usize {
        self.0.get(&t).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    /// Parses `reference` or a list like `1=100,2=50,4-2=5`.
    pub fn parse(spec: &str) -> Result<TypeCounts> {
        let spec = spec.trim();
        if spec.eq_ignore_ascii_case("reference") {
            return Ok(TypeCounts::reference());
        }
        let mut counts = BTreeMap::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (t, n) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("count `{item}` is not TYPE=N")))?;
            let n: usize = n.trim().parse().map_err(|_| Error::Config(format!("count `{item}` is not a non-negative integer")))?;
            counts.insert(t.parse()?, n);
        }
        Ok(TypeCounts(counts))
    }
}
