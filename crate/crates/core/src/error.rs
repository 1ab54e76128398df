//! Error type shared by every module in the crate.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong inside the core library.
///
/// `Config` variants are misuse of the API (bad parameters, shape
/// mismatches); the rest are data-dependent failures discovered mid-run.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// A dataset with zero samples where at least one is required.
    EmptyDataset,
    /// A sample whose answer has no tokens.
    EmptyAnswer { id: String },
    /// A token id at or above the vocabulary size.
    TokenOutOfRange { id: String, token: u32, vocab: usize },
    /// Text containing a symbol the vocabulary does not know.
    UnknownSymbol { symbol: String },
    /// A multiple-choice sample whose `correct` index is outside its choices,
    /// or choices/correct fields that are inconsistent with each other.
    InvalidChoices { id: String },
    /// An operation that needs choices was given a free-form sample.
    MissingChoices { id: String },
    /// Weighted error hit an endpoint where the boosting algebra degenerates.
    DegenerateError { eps: f64 },
    /// The untrained-model error rate is 0 or 1, so the prior term is undefined.
    DegeneratePretrainError { eps: f64 },
    /// The first round already failed the weak-learning gate.
    NoWeakLearner { eps_1: f64, eps_pre: f64 },
    /// Weight normalization produced a zero or non-finite partition value.
    BadNormalization { z: f64 },
    /// An ensemble with no members where at least one is required.
    EmptyEnsemble,
    /// Ratings and dataset disagree on sample count.
    RatingShapeMismatch { ratings: usize, samples: usize },
    /// Mask or multiplicity shape does not match the weight matrix.
    ShapeMismatch,
    /// A parameter outside its documented range.
    Config(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::EmptyDataset => write!(f, "dataset has no samples"),
            CoreError::EmptyAnswer { id } => write!(f, "sample {id} has an empty answer"),
            CoreError::TokenOutOfRange { id, token, vocab } => {
                write!(f, "sample {id}: token id {token} outside vocabulary of size {vocab}")
            }
            CoreError::UnknownSymbol { symbol } => {
                write!(f, "symbol {symbol:?} is not in the vocabulary")
            }
            CoreError::InvalidChoices { id } => {
                write!(f, "sample {id} has inconsistent choices/correct fields")
            }
            CoreError::MissingChoices { id } => {
                write!(f, "sample {id} has no choices but a choice operation was requested")
            }
            CoreError::DegenerateError { eps } => {
                write!(f, "weighted error {eps} is at an endpoint; boosting update undefined")
            }
            CoreError::DegeneratePretrainError { eps } => {
                write!(f, "untrained-model error {eps} must lie strictly inside (0, 1)")
            }
            CoreError::NoWeakLearner { eps_1, eps_pre } => {
                write!(
                    f,
                    "round 1 error {eps_1} does not beat the untrained baseline {eps_pre}; no weak learner"
                )
            }
            CoreError::BadNormalization { z } => {
                write!(f, "weight normalization produced invalid partition value {z}")
            }
            CoreError::EmptyEnsemble => write!(f, "ensemble has no members"),
            CoreError::RatingShapeMismatch { ratings, samples } => {
                write!(f, "{ratings} ratings for {samples} samples")
            }
            CoreError::ShapeMismatch => write!(f, "mask or count shape does not match weights"),
            CoreError::Config(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for CoreError {}

impl CoreError {
    /// True when the failure is a misconfiguration rather than a runtime event.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            CoreError::Config(_)
                | CoreError::DegeneratePretrainError { .. }
                | CoreError::RatingShapeMismatch { .. }
                | CoreError::ShapeMismatch
        )
    }
}
