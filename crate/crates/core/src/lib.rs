//! Contextual-bandit exploration by residual overfit.
//!
//! A tuned reward model `f` and an overfit model `g` are trained on disjoint
//! halves of the observed data; their disagreement `|f(x) - g(x)|` serves as
//! the uncertainty of `f` at `x`. The crate provides the reward models,
//! scoring rules, six bandit policies, classification-derived and depleting
//! environments, and a seeded experiment harness.

pub mod data;
pub mod environments;
pub mod error;
pub mod harness;
pub mod models;
pub mod policies;
pub mod rome;
pub mod seed;

pub use data::{FeatureVector, LabeledDataset};
pub use error::{Error, Result};
