//! Case-based retrieval for equipment fault diagnosis under imperfect
//! knowledge.
//!
//! Imprecise numeric readings are corrected with triangular fuzzy
//! membership, uncertain descriptors are left out of the retrieval
//! measure, and the retrieved cases are refined with an operating-mode
//! weighted adaptation measure to pick the case whose solution applies.

pub mod adaptation;
pub mod case_model;
pub mod cli;
pub mod codec;
pub mod error;
pub mod fixture;
pub mod fuzzy;
pub mod measures;
pub mod pipeline;
pub mod taxonomy;

pub use adaptation::{
    adaptation_measure, lambda_weight, AdaptationScore, AdaptationTerm, LambdaWeight,
};
pub use case_model::{
    align, validate_case, AlignmentPair, Case, CaseBase, CaseKind, Descriptor, DescriptorValue,
    ImperfectionFlags, OperatingMode, Profiles, Solution, Violation, ViolationKind,
};
pub use codec::{decode_case_base, decode_outcome, encode_case_base, encode_outcome, DecodeError};
pub use error::{Error, Result};
pub use fuzzy::{FuzzyProfile, FuzzySubset};
pub use measures::{retrieval_measure, LocalScores, RetrievalScore, ScoringContext, ScoringMode};
pub use pipeline::{
    diagnose, prepare_target, retrieve, DiagnosisOutcome, ScoredCase, DEFAULT_TOP_K,
};
pub use taxonomy::Taxonomy;
