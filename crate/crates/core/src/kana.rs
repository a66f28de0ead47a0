//! Hiragana text model.
//!
//! Words are segmented into moras: one base kana, optionally followed by a
//! small glide (ゃ/ゅ/ょ), or a standalone small っ / ん. Every other module
//! works on [`KanaWord`] rather than raw strings so that gemination and vowel
//! length show up as single edit operations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Consonant row of a mora in the gojūon grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Onset {
    K,
    G,
    S,
    Z,
    T,
    D,
    N,
    H,
    B,
    P,
    M,
    Y,
    R,
    W,
    V,
    /// Bare vowel (あ, い, ...).
    Zero,
    /// っ and ん.
    Special,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vowel {
    A,
    I,
    U,
    E,
    O,
    None,
}

pub const SOKUON: char = 'っ';
pub const MORAIC_NASAL: char = 'ん';

/// First and last codepoints of the accepted hiragana range.
pub const HIRAGANA_FIRST: char = '\u{3041}';
pub const HIRAGANA_LAST: char = '\u{3096}';

pub fn is_hiragana(c: char) -> bool {
    (HIRAGANA_FIRST..=HIRAGANA_LAST).contains(&c)
}

fn is_glide(c: char) -> bool {
    matches!(c, 'ゃ' | 'ゅ' | 'ょ')
}

/// Small kana that can never carry a glide.
fn is_small(c: char) -> bool {
    matches!(
        c,
        'ぁ' | 'ぃ' | 'ぅ' | 'ぇ' | 'ぉ' | 'っ' | 'ゃ' | 'ゅ' | 'ょ' | 'ゎ' | 'ゕ' | 'ゖ'
    )
}

/// Grid position of a single hiragana codepoint.
fn grid(c: char) -> Option<(Onset, Vowel)> {
    use Onset::*;
    use Vowel::{A, E, I, O, U};
    let cell = match c {
        'あ' | 'ぁ' => (Zero, A),
        'い' | 'ぃ' => (Zero, I),
        'う' | 'ぅ' => (Zero, U),
        'え' | 'ぇ' => (Zero, E),
        'お' | 'ぉ' => (Zero, O),
        'か' | 'ゕ' => (K, A),
        'き' => (K, I),
        'く' => (K, U),
        'け' | 'ゖ' => (K, E),
        'こ' => (K, O),
        'が' => (G, A),
        'ぎ' => (G, I),
        'ぐ' => (G, U),
        'げ' => (G, E),
        'ご' => (G, O),
        'さ' => (S, A),
        'し' => (S, I),
        'す' => (S, U),
        'せ' => (S, E),
        'そ' => (S, O),
        'ざ' => (Z, A),
        'じ' => (Z, I),
        'ず' => (Z, U),
        'ぜ' => (Z, E),
        'ぞ' => (Z, O),
        'た' => (T, A),
        'ち' => (T, I),
        'つ' => (T, U),
        'て' => (T, E),
        'と' => (T, O),
        'だ' => (D, A),
        'ぢ' => (D, I),
        'づ' => (D, U),
        'で' => (D, E),
        'ど' => (D, O),
        'な' => (N, A),
        'に' => (N, I),
        'ぬ' => (N, U),
        'ね' => (N, E),
        'の' => (N, O),
        'は' => (H, A),
        'ひ' => (H, I),
        'ふ' => (H, U),
        'へ' => (H, E),
        'ほ' => (H, O),
        'ば' => (B, A),
        'び' => (B, I),
        'ぶ' => (B, U),
        'べ' => (B, E),
        'ぼ' => (B, O),
        'ぱ' => (P, A),
        'ぴ' => (P, I),
        'ぷ' => (P, U),
        'ぺ' => (P, E),
        'ぽ' => (P, O),
        'ま' => (M, A),
        'み' => (M, I),
        'む' => (M, U),
        'め' => (M, E),
        'も' => (M, O),
        'や' | 'ゃ' => (Y, A),
        'ゆ' | 'ゅ' => (Y, U),
        'よ' | 'ょ' => (Y, O),
        'ら' => (R, A),
        'り' => (R, I),
        'る' => (R, U),
        'れ' => (R, E),
        'ろ' => (R, O),
        'わ' | 'ゎ' => (W, A),
        'ゐ' => (W, I),
        'ゑ' => (W, E),
        'を' => (W, O),
        'ゔ' => (V, U),
        'っ' | 'ん' => (Special, Vowel::None),
        _ => return None,
    };
    Some(cell)
}

/// One hiragana mora.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mora {
    base: char,
    glide: Option<char>,
    onset: Onset,
    vowel: Vowel,
}

impl Mora {
    /// Builds a single-codepoint mora.
    pub fn from_char(c: char) -> Option<Mora> {
        let (onset, vowel) = grid(c)?;
        Some(Mora { base: c, glide: None, onset, vowel })
    }

    /// Builds a digraph mora such as きゃ. The base must be a full-size kana
    /// other than っ/ん and the glide one of ゃ/ゅ/ょ.
    pub fn digraph(base: char, glide: char) -> Option<Mora> {
        if !is_glide(glide) || is_small(base) {
            return None;
        }
        let (onset, _) = grid(base)?;
        if onset == Onset::Special {
            return None;
        }
        let (_, vowel) = grid(glide)?;
        Some(Mora { base, glide: Some(glide), onset, vowel })
    }

    pub fn sokuon() -> Mora {
        Mora { base: SOKUON, glide: None, onset: Onset::Special, vowel: Vowel::None }
    }

    pub fn surface(&self) -> String {
        let mut s = String::with_capacity(6);
        self.push_to(&mut s);
        s
    }

    pub fn push_to(&self, out: &mut String) {
        out.push(self.base);
        if let Some(g) = self.glide {
            out.push(g);
        }
    }

    pub fn base(&self) -> char {
        self.base
    }

    pub fn glide(&self) -> Option<char> {
        self.glide
    }

    pub fn onset(&self) -> Onset {
        self.onset
    }

    pub fn vowel(&self) -> Vowel {
        self.vowel
    }

    pub fn is_sokuon(&self) -> bool {
        self.base == SOKUON
    }

    pub fn is_moraic_nasal(&self) -> bool {
        self.base == MORAIC_NASAL
    }

    pub fn is_digraph(&self) -> bool {
        self.glide.is_some()
    }

    /// A bare vowel mora (あ, い, う, え, お and their small forms).
    pub fn is_vowel_only(&self) -> bool {
        self.onset == Onset::Zero
    }

    /// True when this mora is exactly the single codepoint `c`.
    pub fn is(&self, c: char) -> bool {
        self.glide.is_none() && self.base == c
    }
}

impl fmt::Display for Mora {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        if let Some(g) = self.glide {
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Grid row and column of a mora. Special moras return `(Special, None)`.
pub fn mora_features(m: &Mora) -> (Onset, Vowel) {
    (m.onset, m.vowel)
}

/// A hiragana word as an ordered sequence of moras.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct KanaWord {
    moras: Vec<Mora>,
}

impl KanaWord {
    pub fn from_moras(moras: Vec<Mora>) -> KanaWord {
        KanaWord { moras }
    }

    pub fn moras(&self) -> &[Mora] {
        &self.moras
    }

    pub fn len(&self) -> usize {
        self.moras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moras.is_empty()
    }

    pub fn first(&self) -> Option<&Mora> {
        self.moras.first()
    }

    pub fn last(&self) -> Option<&Mora> {
        self.moras.last()
    }

    /// The mora before the final one.
    pub fn penultimate(&self) -> Option<&Mora> {
        self.moras.len().checked_sub(2).map(|i| &self.moras[i])
    }

    /// All moras except the last `n`, or `None` if the word is shorter.
    pub fn without_last(&self, n: usize) -> Option<KanaWord> {
        let keep = self.moras.len().checked_sub(n)?;
        Some(KanaWord { moras: self.moras[..keep].to_vec() })
    }

    pub fn ends_with(&self, suffix: &str) -> bool {
        self.to_string().ends_with(suffix)
    }

    /// Appends the segmentation of a hiragana suffix.
    pub fn append(&mut self, suffix: &str) -> Result<()> {
        let tail = segment_moras(suffix)?;
        self.moras.extend(tail.moras);
        Ok(())
    }

    pub fn with_suffix(mut self, suffix: &str) -> Result<KanaWord> {
        self.append(suffix)?;
        Ok(self)
    }

    /// Number of leading moras shared with `other`.
    pub fn common_prefix_len(&self, other: &KanaWord) -> usize {
        self.moras.iter().zip(&other.moras).take_while(|(a, b)| a == b).count()
    }
}

impl fmt::Display for KanaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(self.moras.len() * 3);
        for m in &self.moras {
            m.push_to(&mut s);
        }
        f.write_str(&s)
    }
}

impl FromStr for KanaWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        segment_moras(s)
    }
}

impl Serialize for KanaWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for KanaWord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        segment_moras(&s).map_err(serde::de::Error::custom)
    }
}

/// Segments a non-empty hiragana string into moras.
///
/// Small glides attach to the preceding full-size kana; a glide with nothing
/// to attach to (word-initial, after っ/ん, or after another small kana)
/// stands alone. Codepoints outside U+3041..=U+3096 are rejected, which
/// covers katakana, kanji, ASCII and the long-vowel mark ー.
pub fn segment_moras(text: &str) -> Result<KanaWord> {
    if text.is_empty() {
        return Err(Error::RejectedInput { reason: "empty kana string".into() });
    }
    let mut moras: Vec<Mora> = Vec::with_capacity(text.len() / 3);
    for (index, ch) in text.chars().enumerate() {
        if !is_hiragana(ch) {
            return Err(Error::NonHiragana { ch, index });
        }
        if is_glide(ch) {
            if let Some(prev) = moras.last_mut() {
                if prev.glide.is_none() {
                    if let Some(d) = Mora::digraph(prev.base, ch) {
                        *prev = d;
                        continue;
                    }
                }
            }
        }
        // U+3041..=U+3096 are all in the grid.
        let m = Mora::from_char(ch).ok_or(Error::NonHiragana { ch, index })?;
        moras.push(m);
    }
    Ok(KanaWord { moras })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditKind {
    Keep,
    Insert,
    Delete,
    Substitute,
}

/// One step of an [`EditScript`]. `position` is the index in the source word
/// the step applies to; inserts go before that index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EditOp {
    pub kind: EditKind,
    pub position: usize,
    /// Source mora for keep, delete and substitute.
    pub source: Option<Mora>,
    /// Target mora for keep, insert and substitute.
    pub target: Option<Mora>,
}

/// Mora-level alignment of a source word onto a target word.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
}

impl EditScript {
    /// Operations other than keep.
    pub fn edits(&self) -> impl Iterator<Item = &EditOp> {
        self.ops.iter().filter(|op| op.kind != EditKind::Keep)
    }

    pub fn cost(&self) -> usize {
        self.edits().count()
    }

    /// The single non-keep operation, if there is exactly one.
    pub fn single_edit(&self) -> Option<&EditOp> {
        let mut it = self.edits();
        let first = it.next()?;
        it.next().is_none().then_some(first)
    }

    /// Replays the script against `source`.
    pub fn apply(&self, source: &KanaWord) -> Result<KanaWord> {
        let src = source.moras();
        let mut out = Vec::with_capacity(src.len() + 2);
        let mut cursor = 0usize;
        let mismatch = |what: &str, pos: usize| Error::ContractViolation(format!("edit script {what} at source index {pos}"));
        for op in &self.ops {
            if op.position != cursor {
                return Err(mismatch("is out of sequence", op.position));
            }
            match op.kind {
                EditKind::Insert => out.push(op.target.ok_or_else(|| mismatch("insert lacks a mora", cursor))?),
                EditKind::Keep | EditKind::Delete | EditKind::Substitute => {
                    let here = *src.get(cursor).ok_or_else(|| mismatch("runs past the end", cursor))?;
                    if op.source != Some(here) {
                        return Err(mismatch("does not match the source", cursor));
                    }
                    match op.kind {
                        EditKind::Keep => out.push(here),
                        EditKind::Substitute => out.push(op.target.ok_or_else(|| mismatch("substitute lacks a mora", cursor))?),
                        _ => {}
                    }
                    cursor += 1;
                }
            }
        }
        if cursor != src.len() {
            return Err(mismatch("stops early", cursor));
        }
        Ok(KanaWord::from_moras(out))
    }
}

/// Minimal unit-cost mora edit script from `a` to `b`.
///
/// Among equal-cost scripts the traceback walks left to right and at every
/// step prefers delete, then insert, then substitute, then keep, so edits
/// land as far left as possible.
pub fn diff(a: &KanaWord, b: &KanaWord) -> EditScript {
    let (x, y) = (a.moras(), b.moras());
    let (n, m) = (x.len(), y.len());
    // rest[i][j]: cost of turning x[i..] into y[j..].
    let width = m + 1;
    let mut rest = vec![0usize; (n + 1) * width];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            rest[i * width + j] = if i == n {
                m - j
            } else if j == m {
                n - i
            } else {
                let del = 1 + rest[(i + 1) * width + j];
                let ins = 1 + rest[i * width + j + 1];
                let diag = rest[(i + 1) * width + j + 1] + usize::from(x[i] != y[j]);
                del.min(ins).min(diag)
            };
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let here = rest[i * width + j];
        if i < n && 1 + rest[(i + 1) * width + j] == here {
            ops.push(EditOp { kind: EditKind::Delete, position: i, source: Some(x[i]), target: None });
            i += 1;
        } else if j < m && 1 + rest[i * width + j + 1] == here {
            ops.push(EditOp { kind: EditKind::Insert, position: i, source: None, target: Some(y[j]) });
            j += 1;
        } else {
            let kind = if x[i] == y[j] { EditKind::Keep } else { EditKind::Substitute };
            ops.push(EditOp { kind, position: i, source: Some(x[i]), target: Some(y[j]) });
            i += 1;
            j += 1;
        }
    }
    EditScript { ops }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> KanaWord {
        segment_moras(s).unwrap()
    }

    fn surfaces(w: &KanaWord) -> Vec<String> {
        w.moras().iter().map(Mora::surface).collect()
    }

    #[test]
    fn segments_plain_kana() {
        assert_eq!(surfaces(&word("かく")), ["か", "く"]);
    }

    #[test]
    fn segments_sokuon_standalone() {
        let w = word("あきれかえった");
        assert_eq!(surfaces(&w), ["あ", "き", "れ", "か", "え", "っ", "た"]);
        assert!(w.moras()[5].is_sokuon());
        assert_eq!(w.moras().iter().filter(|m| m.is_sokuon()).count(), 1);
    }

    #[test]
    fn glide_attaches_left() {
        let w = word("きゃく");
        assert_eq!(surfaces(&w), ["きゃ", "く"]);
        assert!(w.moras()[0].is_digraph());
        assert_eq!(mora_features(&w.moras()[0]), (Onset::K, Vowel::A));
    }

    #[test]
    fn orphan_glides_stand_alone() {
        assert_eq!(surfaces(&word("ゃく")), ["ゃ", "く"]);
        assert_eq!(surfaces(&word("っゃ")), ["っ", "ゃ"]);
        assert_eq!(surfaces(&word("きゃゅ")), ["きゃ", "ゅ"]);
        assert_eq!(surfaces(&word("ぁゃ")), ["ぁ", "ゃ"]);
    }

    #[test]
    fn moraic_nasal() {
        let w = word("よんだ");
        assert!(w.moras()[1].is_moraic_nasal());
        assert_eq!(mora_features(&w.moras()[1]), (Onset::Special, Vowel::None));
    }

    #[test]
    fn grid_lookup() {
        let f = |c| mora_features(&Mora::from_char(c).unwrap());
        assert_eq!(f('け'), (Onset::K, Vowel::E));
        assert_eq!(f('じ'), (Onset::Z, Vowel::I));
        assert_eq!(f('っ'), (Onset::Special, Vowel::None));
        assert_eq!(f('を'), (Onset::W, Vowel::O));
    }

    #[test]
    fn every_codepoint_in_range_has_a_cell() {
        for c in HIRAGANA_FIRST..=HIRAGANA_LAST {
            assert!(grid(c).is_some(), "{c}");
        }
    }

    #[test]
    fn rejects_non_hiragana() {
        for (s, bad, idx) in [("かカ", 'カ', 1), ("食べる", '食', 0), ("らーめん", 'ー', 1), ("ab", 'a', 0), ("ゝ", 'ゝ', 0)] {
            match segment_moras(s) {
                Err(Error::NonHiragana { ch, index }) => assert_eq!((ch, index), (bad, idx), "{s}"),
                other => panic!("{s}: {other:?}"),
            }
        }
        assert!(matches!(segment_moras(""), Err(Error::RejectedInput { .. })));
    }

    #[test]
    fn diff_gemination_omission() {
        let s = diff(&word("ねがえった"), &word("ねがえた"));
        let op = s.single_edit().unwrap();
        assert_eq!(op.kind, EditKind::Delete);
        assert_eq!(op.position, 3);
        assert!(op.source.unwrap().is_sokuon());
    }

    #[test]
    fn diff_gemination_insertion() {
        let s = diff(&word("できた"), &word("できった"));
        let op = s.single_edit().unwrap();
        assert_eq!(op.kind, EditKind::Insert);
        // before た
        assert_eq!(op.position, 2);
        assert!(op.target.unwrap().is_sokuon());
    }

    #[test]
    fn diff_identity_is_all_keep() {
        let w = word("あきれかえった");
        let s = diff(&w, &w);
        assert_eq!(s.cost(), 0);
        assert_eq!(s.ops.len(), w.len());
        assert!(s.ops.iter().all(|op| op.kind == EditKind::Keep));
    }

    #[test]
    fn diff_ties_resolve_leftmost() {
        let s = diff(&word("ああ"), &word("あ"));
        assert_eq!(s.single_edit().unwrap().position, 0);
        let s = diff(&word("かた"), &word("かだ"));
        assert_eq!(s.single_edit().unwrap().kind, EditKind::Substitute);
    }

    #[test]
    fn apply_rejects_foreign_script() {
        let s = diff(&word("かく"), &word("かいた"));
        assert!(s.apply(&word("たべる")).is_err());
        assert_eq!(s.apply(&word("かく")).unwrap(), word("かいた"));
    }
}
