use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::kana::KanaWord;
use crate::scalar::{ExactRatio, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    /// Rows are shuffled individually.
    Form,
    /// Lemmas are shuffled as units so no lemma lands on both sides.
    Lemma,
}

impl std::str::FromStr for SplitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "form" | "form_split" => Ok(SplitKind::Form),
            "lemma" | "lemma_split" => Ok(SplitKind::Lemma),
            other => Err(Error::Config(format!("unknown split kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub kind: SplitKind,
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    /// `max(1, floor(total * test_fraction))`, computed on the decimal value
    /// of the fraction so 0.29 × 100 is 29, not 28.
    pub fn test_size(&self, total: usize) -> Result<usize> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!("test fraction {} is outside (0, 1)", self.test_fraction)));
        }
        let f = ExactRatio::from_decimal(self.test_fraction);
        let n = (f * ExactRatio::from_integer(total as i64)).floor().to_integer() as usize;
        let n = n.max(1);
        if n >= total {
            return Err(Error::Config(format!(
                "test fraction {} leaves no training data for {total} pair(s)",
                self.test_fraction
            )));
        }
        Ok(n)
    }
}

/// Partitions `d` into (train, test). Relative order within each side
/// follows the input; the same seed always yields the same partition.
pub fn split(d: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let k = spec.test_size(d.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut in_test = vec![false; d.len()];
    match spec.kind {
        SplitKind::Form => {
            let mut idx: Vec<usize> = (0..d.len()).collect();
            idx.shuffle(&mut rng);
            for &i in &idx[..k] {
                in_test[i] = true;
            }
        }
        SplitKind::Lemma => {
            let mut groups: Vec<Vec<usize>> = Vec::new();
            let mut slot: HashMap<&KanaWord, usize> = HashMap::new();
            for (i, p) in d.pairs.iter().enumerate() {
                let g = *slot.entry(&p.lemma).or_insert_with(|| {
                    groups.push(Vec::new());
                    groups.len() - 1
                });
                groups[g].push(i);
            }
            groups.shuffle(&mut rng);
            let mut taken = 0;
            for g in &groups {
                if taken >= k {
                    break;
                }
                for &i in g {
                    in_test[i] = true;
                }
                taken += g.len();
            }
            if taken >= d.len() {
                return Err(Error::Config("lemma split left no training data".into()));
            }
        }
    }

    let tag = match spec.kind {
        SplitKind::Form => "form",
        SplitKind::Lemma => "lemma",
    };
    let mut train = Dataset::new(Vec::new(), format!("{}#train({tag},seed={})", d.provenance, spec.seed));
    let mut test = Dataset::new(Vec::new(), format!("{}#test({tag},seed={})", d.provenance, spec.seed));
    for (p, t) in d.pairs.iter().zip(in_test) {
        if t {
            test.pairs.push(p.clone());
        } else {
            train.pairs.push(p.clone());
        }
    }

    if spec.kind == SplitKind::Lemma {
        let train_lemmas: HashSet<&KanaWord> = train.pairs.iter().map(|p| &p.lemma).collect();
        if let Some(p) = test.pairs.iter().find(|p| train_lemmas.contains(&p.lemma)) {
            return Err(Error::ContractViolation(format!("lemma {} landed on both sides of a lemma split", p.lemma)));
        }
    }
    Ok((train, test))
}
