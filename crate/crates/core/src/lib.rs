//! Subgroup-aware evaluation toolkit for Japanese past-tense inflection.
//!
//! The crate bundles a rule-based conjugation oracle, an orthographic
//! verb-type classifier, dataset tooling, controlled ablation conditions,
//! subgroup metrics with disparity ratios, and an error taxonomy. Numeric
//! results are generic over [`Scalar`]; the aliases below fix the common
//! choices.

pub mod ablation;
pub mod classifier;
pub mod conjugator;
pub mod dataset;
pub mod error;
pub mod kana;
pub mod metrics;
pub mod runner;
pub mod scalar;
pub mod taxonomy;

pub use classifier::{classify_dataset, infer_type};
pub use conjugator::{conjugate_past, over_regularized_form, VerbType};
pub use dataset::{Dataset, InflectionPair, SplitKind, SplitSpec, TypeCounts};
pub use error::{Error, Result};
pub use kana::{diff, segment_moras, KanaWord, Mora};
pub use scalar::{BigRatio, ExactRatio, Scalar};

/// Subgroup report in exact rational arithmetic.
pub type ExactReport = metrics::SubgroupReport<ExactRatio>;
/// Subgroup report in double precision.
pub type Report = metrics::SubgroupReport<f64>;
/// Subgroup report in single precision.
pub type ReportF32 = metrics::SubgroupReport<f32>;
/// Dataset statistics in exact rational arithmetic.
pub type ExactStats = dataset::DatasetStats<ExactRatio>;
/// Dataset statistics in double precision.
pub type Stats = dataset::DatasetStats<f64>;
