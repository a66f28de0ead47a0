use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dataset, InflectionPair, TypeCounts};
use crate::classifier::infer_type;
use crate::conjugator::{conjugate_past, VerbType};
use crate::error::{Error, Result};
use crate::kana::{segment_moras, KanaWord, Mora, Vowel};

const BASE: &str = "あいうえおかきくけこがぎぐげごさしすせそざじずぜぞたちつてとだでどなにぬねのはひふへほばびぶべぼぱぴぷぺぽまみむめもやゆよらりるれろわ";
const DIGRAPH_BASES: &str = "きぎしじちにひびぴみり";
const GLIDES: &str = "ゃゅょ";
const GODAN_ENDINGS: [(char, u32); 9] =
    [('う', 12), ('く', 14), ('ぐ', 4), ('す', 12), ('つ', 6), ('ぬ', 1), ('ぶ', 4), ('む', 10), ('る', 37)];

/// The only attested member of subtype 4-3.
pub const LOCALIZED_LEMMA: &str = "いく";

struct Alphabet {
    base: Vec<Mora>,
    i_column: Vec<Mora>,
    e_column: Vec<Mora>,
    back_vowel: Vec<Mora>,
    digraphs: Vec<Mora>,
}

impl Alphabet {
    fn new() -> Alphabet {
        let base: Vec<Mora> = BASE.chars().filter_map(Mora::from_char).collect();
        let with_vowel = |vs: &[Vowel]| base.iter().copied().filter(|m| vs.contains(&m.vowel())).collect::<Vec<_>>();
        let digraphs = DIGRAPH_BASES
            .chars()
            .flat_map(|b| GLIDES.chars().filter_map(move |g| Mora::digraph(b, g)))
            .collect();
        Alphabet {
            i_column: with_vowel(&[Vowel::I]),
            e_column: with_vowel(&[Vowel::E]),
            back_vowel: with_vowel(&[Vowel::A, Vowel::U, Vowel::O]),
            digraphs,
            base,
        }
    }

    /// Stem body: first mora is a full base kana; later moras may be ん, っ
    /// (never twice in a row) or digraphs.
    fn body(&self, rng: &mut ChaCha8Rng, len: usize) -> Vec<Mora> {
        let mut out: Vec<Mora> = Vec::with_capacity(len + 2);
        for i in 0..len {
            let roll = rng.gen_range(0..100);
            let prev_sokuon = out.last().is_some_and(Mora::is_sokuon);
            let m = if i == 0 || prev_sokuon || roll < 80 {
                *self.base.choose(rng).expect("non-empty")
            } else if roll < 86 {
                Mora::from_char('ん').expect("in grid")
            } else if roll < 92 {
                Mora::sokuon()
            } else {
                *self.digraphs.choose(rng).expect("non-empty")
            };
            out.push(m);
        }
        out
    }
}

fn godan_ending(rng: &mut ChaCha8Rng) -> char {
    let total: u32 = GODAN_ENDINGS.iter().map(|(_, w)| w).sum();
    let mut roll = rng.gen_range(0..total);
    for (c, w) in GODAN_ENDINGS {
        if roll < w {
            return c;
        }
        roll -= w;
    }
    unreachable!("weights cover the range")
}

/// One candidate lemma of type `t`, 2 to 6 moras long.
fn candidate(alpha: &Alphabet, t: VerbType, rng: &mut ChaCha8Rng) -> Option<KanaWord> {
    let len = rng.gen_range(2..=6usize);
    // Body excludes the mora before the ending and the ending itself.
    let mut moras = alpha.body(rng, len - 2);
    let (pre, ending) = match t {
        VerbType::Godan => {
            let ending = godan_ending(rng);
            let pool = if ending == 'る' { &alpha.back_vowel } else { &alpha.base };
            (*pool.choose(rng)?, ending)
        }
        VerbType::Ichidan => {
            let pool = if rng.gen_bool(0.5) { &alpha.i_column } else { &alpha.e_column };
            (*pool.choose(rng)?, 'る')
        }
        VerbType::IGemination => (*alpha.i_column.choose(rng)?, 'る'),
        VerbType::EGemination => (*alpha.e_column.choose(rng)?, 'る'),
        VerbType::Localized | VerbType::CanonicalIrregular => return None,
    };
    if moras.last().is_some_and(Mora::is_sokuon) && pre.is_vowel_only() {
        return None;
    }
    moras.push(pre);
    moras.push(Mora::from_char(ending)?);
    let lemma = KanaWord::from_moras(moras);
    let s = lemma.to_string();
    // Keep Godan lemmas out of the いく and canonical-irregular domains.
    if t == VerbType::Godan && (s.ends_with(LOCALIZED_LEMMA) || s == "する" || s == "くる") {
        return None;
    }
    Some(lemma)
}

/// Builds a random lexicon with exactly the requested number of lemmas per
/// type. Every pair is conjugated by the rule oracle and checked to classify
/// back to its generating type.
pub fn generate_synthetic(counts: &TypeCounts, seed: u64) -> Result<Dataset> {
    if counts.get(VerbType::CanonicalIrregular) > 0 {
        return Err(Error::Config("type 3 lemmas are excluded from datasets".into()));
    }
    if counts.get(VerbType::Localized) > 1 {
        return Err(Error::Generation(format!(
            "type 4-3 has a single attested lemma ({LOCALIZED_LEMMA}); cannot produce {} unique lemmas",
            counts.get(VerbType::Localized)
        )));
    }

    let alpha = Alphabet::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<KanaWord> = HashSet::with_capacity(counts.total());
    let mut pairs = Vec::with_capacity(counts.total());

    if counts.get(VerbType::Localized) == 1 {
        let lemma = segment_moras(LOCALIZED_LEMMA)?;
        seen.insert(lemma.clone());
        let past = conjugate_past(&lemma, VerbType::Localized)?;
        pairs.push(InflectionPair { lemma, past, vtype: VerbType::Localized });
    }

    for t in [VerbType::Godan, VerbType::Ichidan, VerbType::IGemination, VerbType::EGemination] {
        let want = counts.get(t);
        let budget = 10_000 + 200 * want;
        let mut made = 0;
        let mut tries = 0;
        while made < want {
            tries += 1;
            if tries > budget {
                return Err(Error::Generation(format!(
                    "only {made} of {want} unique type {t} lemmas after {budget} attempts"
                )));
            }
            let Some(lemma) = candidate(&alpha, t, &mut rng) else { continue };
            if seen.contains(&lemma) {
                continue;
            }
            let past = conjugate_past(&lemma, t)?;
            let back = infer_type(&lemma, &past)?;
            if back != t {
                return Err(Error::ContractViolation(format!("generated {lemma} as type {t} but it classifies as {back}")));
            }
            seen.insert(lemma.clone());
            pairs.push(InflectionPair { lemma, past, vtype: t });
            made += 1;
        }
    }

    pairs.shuffle(&mut rng);
    Ok(Dataset::new(pairs, format!("synthetic(seed={seed})")))
}
