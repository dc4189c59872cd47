use rand::seq::SliceRandom;

use super::{fit, FittedModel, ModelConfig};
use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitMode {
    /// f and g are trained on two disjoint random halves.
    DisjointSplit,
    /// f and g both see every row.
    SharedData,
}

impl std::str::FromStr for SplitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disjoint_split" | "disjoint" => Ok(SplitMode::DisjointSplit),
            "shared_data" | "shared" => Ok(SplitMode::SharedData),
            other => Err(Error::Config(format!("unknown split mode `{other}`"))),
        }
    }
}

/// A tuned estimator `f` and an overfit estimator `g` over the same inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPair {
    pub f: FittedModel,
    pub g: FittedModel,
    pub split_mode: SplitMode,
}

impl ModelPair {
    /// Clipped predictions `(f(x), g(x))`.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        Ok((self.f.predict(x)?, self.g.predict(x)?))
    }
}

/// Seeded permutation of `0..n` cut into halves of sizes `n/2` and `n - n/2`.
pub fn split_indices(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed::rng(seed));
    let second = idx.split_off(n / 2);
    (idx, second)
}

pub fn split_disjoint(
    data: &LabeledDataset,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if data.len() < 2 {
        return Err(Error::invalid(format!(
            "a disjoint split needs at least 2 rows, got {}",
            data.len()
        )));
    }
    let (a, b) = split_indices(data.len(), seed);
    Ok((data.select(&a), data.select(&b)))
}

/// Fits `f` with the tuned config and `g` with the overfit config.
///
/// Under [`SplitMode::DisjointSplit`] `f` sees the first half of
/// [`split_disjoint`] and `g` the second.
pub fn fit_pair(
    data: &LabeledDataset,
    tuned: &ModelConfig,
    overfit: &ModelConfig,
    split_mode: SplitMode,
    seed: u64,
) -> Result<ModelPair> {
    tuned.validate()?;
    overfit.validate()?;
    if !overfit.is_less_regularized_than(tuned) {
        return Err(Error::Config(
            "overfit model config must be strictly less regularized than the tuned config".into(),
        ));
    }
    let (f, g) = match split_mode {
        SplitMode::DisjointSplit => {
            let (a, b) = split_disjoint(data, seed)?;
            (fit(&a, tuned)?, fit(&b, overfit)?)
        }
        SplitMode::SharedData => (fit(data, tuned)?, fit(data, overfit)?),
    };
    Ok(ModelPair { f, g, split_mode })
}
