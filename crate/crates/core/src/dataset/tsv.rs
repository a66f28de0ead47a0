use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{Dataset, InflectionPair};
use crate::classifier::infer_type;
use crate::conjugator::VerbType;
use crate::error::{Error, Result};
use crate::kana::{segment_moras, KanaWord};

/// Feature column value; no morphosyntactic features are carried.
pub const PLACEHOLDER: &str = "_";

/// Reads `lemma<TAB>past<TAB>_` lines and classifies every pair.
///
/// The stream must be UTF-8 with LF line endings and a trailing newline.
/// Blank lines are skipped. Line numbers in errors are 1-based.
pub fn parse_tsv<R: BufRead>(mut reader: R, provenance: impl Into<String>) -> Result<Dataset> {
    let mut pairs = Vec::new();
    let mut first_seen: HashMap<KanaWord, usize> = HashMap::new();
    let mut buf = String::new();
    let mut line_no = 0usize;
    loop {
        buf.clear();
        if reader.read_line(&mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let parse_err = |message: String| Error::Parse { line: line_no, message };
        if line_no == 1 && buf.starts_with('\u{feff}') {
            return Err(parse_err("byte-order mark is not allowed".into()));
        }
        let Some(line) = buf.strip_suffix('\n') else {
            return Err(parse_err("missing trailing newline".into()));
        };
        if line.ends_with('\r') {
            return Err(parse_err("CR line endings are not allowed".into()));
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [lemma, past, features] = fields[..] else {
            return Err(parse_err(format!("expected 3 TAB-separated fields, found {}", fields.len())));
        };
        if features != PLACEHOLDER {
            return Err(parse_err(format!("feature column must be `{PLACEHOLDER}`, found `{features}`")));
        }
        let lemma = segment_moras(lemma).map_err(|e| parse_err(format!("lemma: {e}")))?;
        let past = segment_moras(past).map_err(|e| parse_err(format!("past form: {e}")))?;
        let vtype = infer_type(&lemma, &past).map_err(|e| parse_err(e.to_string()))?;
        if vtype == VerbType::CanonicalIrregular {
            return Err(Error::Validation(format!("line {line_no}: canonical irregular {lemma} is excluded from datasets")));
        }
        if let Some(first) = first_seen.insert(lemma.clone(), line_no) {
            return Err(Error::Validation(format!("line {line_no}: lemma {lemma} already defined on line {first}")));
        }
        pairs.push(InflectionPair { lemma, past, vtype });
    }
    Ok(Dataset::new(pairs, provenance))
}

/// Writes the dataset in the three-column wire format.
pub fn emit_tsv<W: Write>(d: &Dataset, mut out: W) -> Result<()> {
    for p in &d.pairs {
        writeln!(out, "{}\t{}\t{PLACEHOLDER}", p.lemma, p.past)?;
    }
    Ok(())
}

pub fn to_tsv_string(d: &Dataset) -> String {
    let mut s = String::with_capacity(d.len() * 24);
    for p in &d.pairs {
        s.push_str(&format!("{}\t{}\t{PLACEHOLDER}\n", p.lemma, p.past));
    }
    s
}

/// Like [`emit_tsv`] with a fourth column holding the type label.
pub fn emit_labeled_tsv<W: Write>(d: &Dataset, mut out: W) -> Result<()> {
    for p in &d.pairs {
        writeln!(out, "{}\t{}\t{PLACEHOLDER}\t{}", p.lemma, p.past, p.vtype)?;
    }
    Ok(())
}
