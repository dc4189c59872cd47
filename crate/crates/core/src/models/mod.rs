//! Supervised reward models with tuned and overfit configurations.

mod config;
mod linear;
mod pair;
mod tree;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::seed;

pub use config::{ModelConfig, ModelFamily};
pub use linear::LinearParams;
pub use pair::{fit_pair, split_disjoint, split_indices, ModelPair, SplitMode};
pub use tree::RegressionTree;

#[derive(Debug, Clone, PartialEq)]
pub enum Parameters {
    Linear(LinearParams),
    Forest(Vec<RegressionTree>),
    /// Predicts one value everywhere; used for priors and frozen estimators.
    Constant(f64),
}

/// A trained reward model. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    config: ModelConfig,
    dim: usize,
    parameters: Parameters,
    train_count: usize,
}

impl FittedModel {
    pub fn constant(dim: usize, value: f64) -> Self {
        Self {
            config: ModelConfig::linear(0.0),
            dim,
            parameters: Parameters::Constant(value),
            train_count: 0,
        }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn parameters(&self) -> &Parameters {
        &self.parameters
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn train_count(&self) -> usize {
        self.train_count
    }

    /// Prediction clipped to [0, 1], for use as a reward probability.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.predict_raw(x).map(|p| p.clamp(0.0, 1.0))
    }

    /// Unclipped prediction, for regression targets outside [0, 1].
    pub fn predict_raw(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!(
                "input has dimension {}, model expects {}",
                x.len(),
                self.dim
            )));
        }
        let p = self.predict_unchecked(x);
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::invalid("model produced a non-finite prediction"))
        }
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> f64 {
        match &self.parameters {
            Parameters::Linear(p) => p.predict(x),
            Parameters::Forest(trees) => {
                trees.iter().map(|t| t.predict(x)).sum::<f64>() / trees.len() as f64
            }
            Parameters::Constant(c) => *c,
        }
    }
}

fn check_fit_input(data: &LabeledDataset, config: &ModelConfig, family: ModelFamily) -> Result<()> {
    if config.family != family {
        return Err(Error::Config(format!(
            "expected a {} config, got {}",
            family.name(),
            config.family.name()
        )));
    }
    config.validate()?;
    if data.is_empty() {
        return Err(Error::invalid("cannot fit a model on an empty dataset"));
    }
    Ok(())
}

pub fn fit_linear(data: &LabeledDataset, config: &ModelConfig) -> Result<FittedModel> {
    check_fit_input(data, config, ModelFamily::LinearRidge)?;
    let params = linear::fit_ridge(data, config.ridge_lambda, config.fit_intercept);
    Ok(FittedModel {
        config: config.clone(),
        dim: data.dim(),
        parameters: Parameters::Linear(params),
        train_count: data.len(),
    })
}

/// Trains `n_trees` regression trees; with bagging, tree `t` fits a bootstrap
/// resample drawn from seed `config.seed + t`.
pub fn fit_tree_ensemble(data: &LabeledDataset, config: &ModelConfig) -> Result<FittedModel> {
    check_fit_input(data, config, ModelFamily::TreeEnsemble)?;
    let n = data.len();
    let dim = data.dim();
    let params = tree::TreeParams {
        max_depth: config.max_depth,
        min_samples_leaf: config.min_samples_leaf,
        max_features: ((config.feature_subsample * dim as f64).ceil() as usize).clamp(1, dim),
    };
    let presorted = tree::Presorted::new(data);
    let mut weights = vec![0u32; n];
    let trees = (0..config.n_trees as u64)
        .map(|t| {
            let mut rng = seed::rng(config.seed.wrapping_add(t));
            if config.bagging {
                use rand::Rng as _;
                weights.fill(0);
                for _ in 0..n {
                    weights[rng.random_range(0..n)] += 1;
                }
            } else {
                weights.fill(1);
            }
            RegressionTree::fit_weighted(&presorted, &weights, params, &mut rng)
        })
        .collect();
    Ok(FittedModel {
        config: config.clone(),
        dim,
        parameters: Parameters::Forest(trees),
        train_count: n,
    })
}

/// Fits whichever family `config` names.
pub fn fit(data: &LabeledDataset, config: &ModelConfig) -> Result<FittedModel> {
    match config.family {
        ModelFamily::LinearRidge => fit_linear(data, config),
        ModelFamily::TreeEnsemble => fit_tree_ensemble(data, config),
    }
}
