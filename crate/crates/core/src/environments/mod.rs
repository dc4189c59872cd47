//! Bandit environments built from classification data and rating logs.
//!
//! An environment is a stream of steps. Each step reveals a context and the
//! eligible actions, then answers exactly one `reward` query before the next
//! step may be drawn.

mod classification;
mod depleting;
mod loaders;
mod synthetic;

use crate::error::Result;

pub use classification::{ClassificationData, ClassificationEnv};
pub use depleting::{gen_synthetic_ratings, DepletingEnv, Rating, POSITIVE_RATING};
pub use loaders::{
    load_chorales, load_covertype, load_movielens_depleting, parse_ratings, OneHotEncoder,
};
pub use synthetic::{gen_synthetic_bandit, gen_toy, Design, Noise, SyntheticSpec, TrueFunction};

/// What the learner sees at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub context: Vec<f64>,
    pub eligible: Vec<usize>,
}

pub trait Environment {
    fn n_actions(&self) -> usize;

    fn context_dim(&self) -> usize;

    /// Total number of steps the stream will yield.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The next step, or `None` once the stream is exhausted.
    fn next_step(&mut self) -> Result<Option<Step>>;

    /// Answers the pending step.
    fn reward(&mut self, action: usize) -> Result<u8>;

    /// A rewarding action for the pending step, if any. Test oracle only.
    fn optimal_action(&self) -> Option<usize>;
}
