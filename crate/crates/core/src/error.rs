use std::io;

use thiserror::Error;

use crate::conjugator::VerbType;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rejected input: {reason}")]
    RejectedInput { reason: String },

    #[error("non-hiragana codepoint U+{:04X} ({ch:?}) at index {index}", *ch as u32)]
    NonHiragana { ch: char, index: usize },

    #[error("`{lemma}` has no legal ending for type {vtype}")]
    RuleDomain { lemma: String, vtype: VerbType },

    #[error(transparent)]
    Unclassifiable(#[from] Unclassifiable),

    #[error("{} row(s) could not be classified; first: row {}: {}", .0.len(), .0[0].0, .0[0].1)]
    Batch(Vec<(usize, Unclassifiable)>),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error(transparent)]
    Join(#[from] JoinError),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A (lemma, past) pair that matches no conjugation rule.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot classify ({lemma}, {past}): {diagnosis}")]
pub struct Unclassifiable {
    pub lemma: String,
    pub past: String,
    /// Closest rule and the form it would have produced.
    pub diagnosis: String,
}

/// Mismatch between a prediction file and the gold test set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Error)]
#[error("prediction join failed (missing: {missing:?}, extra: {extra:?}, duplicate: {duplicate:?})")]
pub struct JoinError {
    pub missing: Vec<String>,
    pub extra: Vec<String>,
    pub duplicate: Vec<String>,
}

impl JoinError {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty() && self.duplicate.is_empty()
    }
}
