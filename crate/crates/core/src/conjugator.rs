//! Rule-based past-tense formation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kana::{KanaWord, Vowel};

/// Orthographic verb class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VerbType {
    /// Godan (u-verb).
    #[serde(rename = "1")]
    Godan,
    /// Ichidan (ru-verb).
    #[serde(rename = "2")]
    Ichidan,
    /// する, くる and their compounds. Never emitted in datasets.
    #[serde(rename = "3")]
    CanonicalIrregular,
    /// る-verb with stem-final /i/ that geminates (まじる → まじった).
    #[serde(rename = "4-1")]
    IGemination,
    /// る-verb with stem-final /e/ that geminates (ねがえる → ねがえった).
    #[serde(rename = "4-2")]
    EGemination,
    /// いく and compounds (いく → いった).
    #[serde(rename = "4-3")]
    Localized,
}

impl VerbType {
    pub const ALL: [VerbType; 6] = [
        VerbType::Godan,
        VerbType::Ichidan,
        VerbType::CanonicalIrregular,
        VerbType::IGemination,
        VerbType::EGemination,
        VerbType::Localized,
    ];

    /// The five types that may appear in a dataset.
    pub const DATASET: [VerbType; 5] = [
        VerbType::Godan,
        VerbType::Ichidan,
        VerbType::IGemination,
        VerbType::EGemination,
        VerbType::Localized,
    ];

    pub fn label(self) -> &'static str {
        match self {
            VerbType::Godan => "1",
            VerbType::Ichidan => "2",
            VerbType::CanonicalIrregular => "3",
            VerbType::IGemination => "4-1",
            VerbType::EGemination => "4-2",
            VerbType::Localized => "4-3",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VerbType::Godan => "Godan",
            VerbType::Ichidan => "Ichidan",
            VerbType::CanonicalIrregular => "Canonical irregular",
            VerbType::IGemination => "/i/ + gemination",
            VerbType::EGemination => "/e/ + gemination",
            VerbType::Localized => "Localized",
        }
    }

    /// Subtypes of the "other irregular" group.
    pub fn is_type4(self) -> bool {
        matches!(self, VerbType::IGemination | VerbType::EGemination | VerbType::Localized)
    }

    pub fn is_regular(self) -> bool {
        matches!(self, VerbType::Godan | VerbType::Ichidan)
    }
}

impl fmt::Display for VerbType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for VerbType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = match s.trim().to_ascii_lowercase().as_str() {
            "1" | "t1" | "godan" => VerbType::Godan,
            "2" | "t2" | "ichidan" => VerbType::Ichidan,
            "3" | "t3" => VerbType::CanonicalIrregular,
            "4-1" | "4_1" | "t4_1" => VerbType::IGemination,
            "4-2" | "4_2" | "t4_2" => VerbType::EGemination,
            "4-3" | "4_3" | "t4_3" => VerbType::Localized,
            other => return Err(Error::Config(format!("unknown verb type `{other}`"))),
        };
        Ok(t)
    }
}

/// A Godan ending: lemma-final kana and the past-tense ending replacing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConjugationRule {
    pub final_kana: char,
    pub replacement: &'static str,
}

pub const GODAN_RULES: [ConjugationRule; 9] = [
    ConjugationRule { final_kana: 'う', replacement: "った" },
    ConjugationRule { final_kana: 'く', replacement: "いた" },
    ConjugationRule { final_kana: 'ぐ', replacement: "いだ" },
    ConjugationRule { final_kana: 'す', replacement: "した" },
    ConjugationRule { final_kana: 'つ', replacement: "った" },
    ConjugationRule { final_kana: 'ぬ', replacement: "んだ" },
    ConjugationRule { final_kana: 'ぶ', replacement: "んだ" },
    ConjugationRule { final_kana: 'む', replacement: "んだ" },
    ConjugationRule { final_kana: 'る', replacement: "った" },
];

pub fn godan_rule(final_kana: char) -> Option<&'static ConjugationRule> {
    GODAN_RULES.iter().find(|r| r.final_kana == final_kana)
}

fn final_kana(lemma: &KanaWord) -> Option<char> {
    lemma.last().filter(|m| !m.is_digraph()).map(|m| m.base())
}

/// Splits `lemma` into (stem, ending) where the ending is the kana string
/// `ending`; the stem must be non-empty unless `allow_empty_stem`.
fn strip(lemma: &KanaWord, ending: &str, vtype: VerbType, allow_empty_stem: bool) -> Result<KanaWord> {
    if !lemma.ends_with(ending) {
        return Err(Error::RuleDomain { lemma: lemma.to_string(), vtype });
    }
    let n = ending.chars().count();
    let stem = lemma.without_last(n).ok_or_else(|| Error::RuleDomain { lemma: lemma.to_string(), vtype })?;
    if stem.is_empty() && !allow_empty_stem {
        return Err(Error::RejectedInput { reason: format!("`{lemma}` leaves an empty stem for type {vtype}") });
    }
    Ok(stem)
}

/// Vowel of the mora before the final one.
pub(crate) fn pre_final_vowel(lemma: &KanaWord) -> Option<Vowel> {
    lemma.penultimate().map(|m| m.vowel())
}

/// Forms the past tense of `lemma` as a verb of class `vtype`.
///
/// The /i/ and /e/ gemination subtypes additionally require the mora before
/// る to carry the matching vowel, so that the result always classifies back
/// to the requested type.
pub fn conjugate_past(lemma: &KanaWord, vtype: VerbType) -> Result<KanaWord> {
    let domain = || Error::RuleDomain { lemma: lemma.to_string(), vtype };
    match vtype {
        VerbType::Godan => {
            let last = final_kana(lemma).ok_or_else(domain)?;
            let rule = godan_rule(last).ok_or_else(domain)?;
            let stem = strip(lemma, &last.to_string(), vtype, false)?;
            stem.with_suffix(rule.replacement)
        }
        VerbType::Ichidan => strip(lemma, "る", vtype, false)?.with_suffix("た"),
        VerbType::IGemination | VerbType::EGemination => {
            let want = if vtype == VerbType::IGemination { Vowel::I } else { Vowel::E };
            let stem = strip(lemma, "る", vtype, false)?;
            if stem.last().map(|m| m.vowel()) != Some(want) {
                return Err(domain());
            }
            stem.with_suffix("った")
        }
        VerbType::Localized => strip(lemma, "いく", vtype, true)?.with_suffix("いった"),
        VerbType::CanonicalIrregular => {
            if let Ok(stem) = strip(lemma, "する", vtype, true) {
                stem.with_suffix("した")
            } else {
                strip(lemma, "くる", vtype, true)?.with_suffix("きた")
            }
        }
    }
}

/// The form a learner that applies the majority pattern would produce.
///
/// Gemination subtypes get the Ichidan treatment (る → た) and いく gets the
/// plain Godan く → いた. Regular and canonical types have none.
pub fn over_regularized_form(lemma: &KanaWord, true_type: VerbType) -> Option<KanaWord> {
    match true_type {
        VerbType::IGemination | VerbType::EGemination => conjugate_past(lemma, VerbType::Ichidan).ok(),
        VerbType::Localized => conjugate_past(lemma, VerbType::Godan).ok(),
        _ => None,
    }
}
