//! Interpretable binary classifiers built from a left-associative chain of
//! graded conjunction/disjunction operators over a learned feature order.
//!
//! Numeric code is generic over [`Scalar`] (`f32`, `f64`); the aliases below
//! fix the common choice.

// `!(x > 0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod data;
pub mod error;
pub mod logic;
pub mod permutation;
pub mod scalar;
pub mod training;
pub mod tree;

pub use data::{BoolExpr, Dataset, NormalizerKind, NormalizerSpec, Preparation, RawTable};
pub use error::{Error, Result};
pub use logic::{AndnessCode, Role};
pub use permutation::{Permutation, PermutationConfig, PermutationState};
pub use scalar::Scalar;
pub use training::{train, AttemptReport, ModelParams, TrainedModel, TrainingConfig};
pub use tree::{LspTree, SimplifiedTree, TreeLayout};

pub type LspTree64 = LspTree<f64>;
pub type LspTree32 = LspTree<f32>;
pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type ModelParams64 = ModelParams<f64>;
pub type TrainedModel64 = TrainedModel<f64>;
pub type TrainedModel32 = TrainedModel<f32>;
