use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelFamily {
    LinearRidge,
    TreeEnsemble,
}

impl ModelFamily {
    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::LinearRidge => "linear_ridge",
            ModelFamily::TreeEnsemble => "tree_ensemble",
        }
    }
}

impl std::str::FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear_ridge" | "linear" => Ok(ModelFamily::LinearRidge),
            "tree_ensemble" | "trees" | "forest" => Ok(ModelFamily::TreeEnsemble),
            other => Err(Error::Config(format!("unknown model family `{other}`"))),
        }
    }
}

/// Hyperparameters of one reward model.
///
/// Only the fields relevant to `family` are consulted when fitting; the rest
/// are carried along so a config can be switched between families by
/// override.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub family: ModelFamily,
    pub ridge_lambda: f64,
    pub fit_intercept: bool,
    pub n_trees: usize,
    /// `None` grows until leaves are pure or cannot be split.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub bagging: bool,
    /// Fraction of features considered at each split, in (0, 1].
    pub feature_subsample: f64,
    pub seed: u64,
}

impl ModelConfig {
    /// Ridge model with an unpenalized intercept.
    pub fn linear(ridge_lambda: f64) -> Self {
        Self {
            family: ModelFamily::LinearRidge,
            ridge_lambda,
            fit_intercept: true,
            n_trees: 1,
            max_depth: None,
            min_samples_leaf: 1,
            bagging: false,
            feature_subsample: 1.0,
            seed: 0,
        }
    }

    /// Nearly unregularized ridge, the overfit counterpart of [`ModelConfig::linear`].
    pub fn overfit_linear() -> Self {
        Self::linear(1e-8)
    }

    /// Bagged ensemble of 10 depth-limited regression trees.
    pub fn forest() -> Self {
        Self {
            family: ModelFamily::TreeEnsemble,
            ridge_lambda: 1.0,
            fit_intercept: true,
            n_trees: 10,
            max_depth: Some(8),
            min_samples_leaf: 1,
            bagging: true,
            feature_subsample: 1.0,
            seed: 0,
        }
    }

    /// A single unbagged tree grown to purity.
    pub fn overfit_tree() -> Self {
        Self {
            family: ModelFamily::TreeEnsemble,
            ridge_lambda: 0.0,
            fit_intercept: true,
            n_trees: 1,
            max_depth: None,
            min_samples_leaf: 1,
            bagging: false,
            feature_subsample: 1.0,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ridge_lambda >= 0.0 && self.ridge_lambda.is_finite()) {
            return Err(Error::Config(format!(
                "ridge_lambda must be a finite non-negative number, got {}",
                self.ridge_lambda
            )));
        }
        if self.n_trees == 0 {
            return Err(Error::Config("n_trees must be at least 1".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::Config("min_samples_leaf must be at least 1".into()));
        }
        if !(self.feature_subsample > 0.0 && self.feature_subsample <= 1.0) {
            return Err(Error::Config(format!(
                "feature_subsample must lie in (0, 1], got {}",
                self.feature_subsample
            )));
        }
        Ok(())
    }

    /// Whether `self` is strictly less regularized than `tuned`.
    ///
    /// Linear: smaller ridge penalty. Trees: no shallower, no larger leaves,
    /// no added bagging, no fewer split candidates, and strictly looser in at
    /// least one of those. Configs of different families are not comparable
    /// and are accepted.
    pub fn is_less_regularized_than(&self, tuned: &ModelConfig) -> bool {
        if self.family != tuned.family {
            return true;
        }
        match self.family {
            ModelFamily::LinearRidge => self.ridge_lambda < tuned.ridge_lambda,
            ModelFamily::TreeEnsemble => {
                let depth = |d: Option<usize>| d.unwrap_or(usize::MAX);
                let (dg, df) = (depth(self.max_depth), depth(tuned.max_depth));
                let no_tighter = dg >= df
                    && self.min_samples_leaf <= tuned.min_samples_leaf
                    && (!self.bagging || tuned.bagging)
                    && self.feature_subsample >= tuned.feature_subsample;
                let strictly_looser = dg > df
                    || self.min_samples_leaf < tuned.min_samples_leaf
                    || (tuned.bagging && !self.bagging)
                    || self.feature_subsample > tuned.feature_subsample;
                no_tighter && strictly_looser
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regularization_order() {
        assert!(ModelConfig::linear(1e-8).is_less_regularized_than(&ModelConfig::linear(1.0)));
        assert!(!ModelConfig::linear(0.1).is_less_regularized_than(&ModelConfig::linear(0.1)));
        assert!(!ModelConfig::linear(1.0).is_less_regularized_than(&ModelConfig::linear(0.1)));
        assert!(ModelConfig::overfit_tree().is_less_regularized_than(&ModelConfig::forest()));
        assert!(!ModelConfig::forest().is_less_regularized_than(&ModelConfig::overfit_tree()));
        assert!(!ModelConfig::forest().is_less_regularized_than(&ModelConfig::forest()));

        let mut shallow = ModelConfig::overfit_tree();
        shallow.max_depth = Some(3);
        assert!(!shallow.is_less_regularized_than(&ModelConfig::forest()));
    }

    #[test]
    fn validation() {
        assert!(ModelConfig::forest().validate().is_ok());
        let mut c = ModelConfig::linear(-1.0);
        assert!(c.validate().is_err());
        c = ModelConfig::forest();
        c.n_trees = 0;
        assert!(c.validate().is_err());
        c = ModelConfig::forest();
        c.min_samples_leaf = 0;
        assert!(c.validate().is_err());
        c = ModelConfig::forest();
        c.feature_subsample = 0.0;
        assert!(c.validate().is_err());
    }
}
