//! Token-level boosting of weak autoregressive sequence models.
//!
//! The crate trains an ensemble of weak next-token predictors by reweighting
//! individual answer tokens, mixes the ensemble into a single decoding
//! distribution, and uses the ensemble to pseudo-label hard data for training
//! a stronger student model. Everything is deterministic given a seed and
//! works with `no_std` plus `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod adaboost;
pub mod boost;
pub mod corpus;
pub mod decode;
pub mod error;
pub mod learner;
pub mod math;
pub mod rng;
pub mod theory;
pub mod w2s;
pub mod weights;

pub use error::CoreError;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, CoreError>;
