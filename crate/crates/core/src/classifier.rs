//! Assigns a [`VerbType`] to a (lemma, past) pair from orthography alone.

use crate::conjugator::{conjugate_past, godan_rule, pre_final_vowel, VerbType};
use crate::dataset::InflectionPair;
use crate::error::{Error, Result, Unclassifiable};
use crate::kana::{diff, KanaWord, Vowel};

/// Infers the verb type of `lemma` given its attested past form.
///
/// Steps, first match wins:
/// 1. する/くる (or a compound) whose past is the canonical した/きた → type 3.
/// 2. `…く` with past `…った` → 4-3.
/// 3. `…る` with past `…た` → 2.
/// 4. `…る` with past `…った` → 4-1 if the pre-る vowel is /i/, 4-2 if /e/, else 1.
/// 5. past matches the Godan table for the final kana → 1.
pub fn infer_type(lemma: &KanaWord, past: &KanaWord) -> Result<VerbType, Unclassifiable> {
    let lemma_s = lemma.to_string();
    let past_s = past.to_string();
    let is = |t: VerbType| conjugate_past(lemma, t).map(|f| f == *past).unwrap_or(false);

    if (lemma_s.ends_with("する") || lemma_s.ends_with("くる")) && is(VerbType::CanonicalIrregular) {
        return Ok(VerbType::CanonicalIrregular);
    }
    if lemma_s.ends_with("いく") && is(VerbType::Localized) {
        return Ok(VerbType::Localized);
    }
    if let Some(stem) = lemma_s.strip_suffix('る').filter(|s| !s.is_empty()) {
        if past_s.strip_prefix(stem) == Some("た") {
            return Ok(VerbType::Ichidan);
        }
        if past_s.strip_prefix(stem) == Some("った") {
            return Ok(match pre_final_vowel(lemma) {
                Some(Vowel::I) => VerbType::IGemination,
                Some(Vowel::E) => VerbType::EGemination,
                _ => VerbType::Godan,
            });
        }
    }
    if is(VerbType::Godan) {
        return Ok(VerbType::Godan);
    }
    Err(Unclassifiable { lemma: lemma_s, past: past_s, diagnosis: nearest_rule(lemma, past) })
}

/// Names the type whose conjugation comes closest to `past`.
fn nearest_rule(lemma: &KanaWord, past: &KanaWord) -> String {
    let last = lemma.last().map(|m| m.surface()).unwrap_or_default();
    let best = VerbType::ALL
        .iter()
        .filter_map(|&t| conjugate_past(lemma, t).ok().map(|f| (diff(&f, past).cost(), t, f)))
        .min_by_key(|(cost, t, _)| (*cost, *t));
    match best {
        Some((cost, t, form)) => {
            format!("nearest rule is type {t}, which gives {form} ({cost} mora edit(s) away)")
        }
        None if last.chars().next().and_then(godan_rule).is_none() => {
            format!("final mora {last} is not a legal verb ending")
        }
        None => "no rule applies to this lemma".to_string(),
    }
}

/// Labels every pair; fails with the full list of unclassifiable rows
/// (0-based row indices) if any row does not match a rule.
pub fn classify_dataset<I>(pairs: I) -> Result<Vec<InflectionPair>>
where
    I: IntoIterator<Item = (KanaWord, KanaWord)>,
{
    let mut labeled = Vec::new();
    let mut failures = Vec::new();
    for (row, (lemma, past)) in pairs.into_iter().enumerate() {
        match infer_type(&lemma, &past) {
            Ok(vtype) => labeled.push(InflectionPair { lemma, past, vtype }),
            Err(e) => failures.push((row, e)),
        }
    }
    if failures.is_empty() {
        Ok(labeled)
    } else {
        Err(Error::Batch(failures))
    }
}
