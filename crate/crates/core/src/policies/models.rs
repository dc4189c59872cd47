//! Reward-model collections fitted from replay-buffer rounds.

use super::{ModelScope, Round};
use crate::data::LabeledDataset;
use crate::error::Result;
use crate::models::{fit, fit_pair, FittedModel, ModelConfig, ModelPair, SplitMode};
use crate::seed;

/// Prior prediction of `f` for an action with no data.
pub const COLD_F: f64 = 0.5;
/// Prior prediction of `g` for an action with no data; `|COLD_F - COLD_G|`
/// is the largest disagreement a probability pair can show around 0.5.
pub const COLD_G: f64 = 0.0;

fn one_hot_input(x: &[f64], action: usize, n_actions: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(x.len() + n_actions);
    v.extend_from_slice(x);
    v.extend((0..n_actions).map(|a| if a == action { 1.0 } else { 0.0 }));
    v
}

fn per_action_datasets<'a>(
    rounds: impl Iterator<Item = &'a Round>,
    n_actions: usize,
) -> Result<Vec<Option<LabeledDataset>>> {
    let mut sets: Vec<Option<LabeledDataset>> = vec![None; n_actions];
    for r in rounds {
        let ds = match &mut sets[r.action] {
            Some(ds) => ds,
            slot => slot.insert(LabeledDataset::new(r.context.len())?),
        };
        ds.push(&r.context, f64::from(r.reward))?;
    }
    Ok(sets)
}

fn shared_dataset<'a>(
    rounds: impl Iterator<Item = &'a Round>,
    n_actions: usize,
) -> Result<Option<LabeledDataset>> {
    let mut ds: Option<LabeledDataset> = None;
    for r in rounds {
        let x = one_hot_input(&r.context, r.action, n_actions);
        let d = match &mut ds {
            Some(d) => d,
            slot => slot.insert(LabeledDataset::new(x.len())?),
        };
        d.push(&x, f64::from(r.reward))?;
    }
    Ok(ds)
}

/// Point-prediction reward models, used by epsilon-greedy and each
/// Bootstrap-TS replicate.
#[derive(Debug, Clone, PartialEq)]
pub enum RewardModelSet {
    PerAction(Vec<Option<FittedModel>>),
    Shared(Option<FittedModel>),
}

impl RewardModelSet {
    pub fn cold() -> Self {
        RewardModelSet::PerAction(Vec::new())
    }

    pub fn fit<'a>(
        rounds: impl Iterator<Item = &'a Round>,
        n_actions: usize,
        scope: ModelScope,
        config: &ModelConfig,
        seed: u64,
    ) -> Result<Self> {
        match scope {
            ModelScope::PerAction => {
                let models = per_action_datasets(rounds, n_actions)?
                    .into_iter()
                    .enumerate()
                    .map(|(a, ds)| {
                        ds.map(|ds| {
                            fit(&ds, &config.clone().with_seed(seed::derive(seed, a as u64)))
                        })
                        .transpose()
                    })
                    .collect::<Result<_>>()?;
                Ok(RewardModelSet::PerAction(models))
            }
            ModelScope::SharedOneHot => {
                let model = shared_dataset(rounds, n_actions)?
                    .map(|ds| fit(&ds, &config.clone().with_seed(seed)))
                    .transpose()?;
                Ok(RewardModelSet::Shared(model))
            }
        }
    }

    /// Clipped reward prediction for `action`; [`COLD_F`] when it has no model.
    pub fn predict(&self, action: usize, x: &[f64], n_actions: usize) -> Result<f64> {
        match self {
            RewardModelSet::PerAction(models) => {
                match models.get(action).and_then(Option::as_ref) {
                    Some(m) => m.predict(x),
                    None => Ok(COLD_F),
                }
            }
            RewardModelSet::Shared(Some(m)) => m.predict(&one_hot_input(x, action, n_actions)),
            RewardModelSet::Shared(None) => Ok(COLD_F),
        }
    }

    pub fn n_fitted(&self) -> usize {
        match self {
            RewardModelSet::PerAction(models) => models.iter().flatten().count(),
            RewardModelSet::Shared(m) => usize::from(m.is_some()),
        }
    }
}

/// Tuned/overfit model pairs for the ROME policies.
#[derive(Debug, Clone, PartialEq)]
pub enum PairSet {
    PerAction(Vec<Option<ModelPair>>),
    Shared(Option<ModelPair>),
}

impl PairSet {
    pub fn cold() -> Self {
        PairSet::PerAction(Vec::new())
    }

    /// Fits one pair per action (or one shared pair).
    ///
    /// An action seen exactly once cannot be split in two under
    /// [`SplitMode::DisjointSplit`]; its `f` is fit on that row and its `g`
    /// keeps the cold prior.
    pub fn fit<'a>(
        rounds: impl Iterator<Item = &'a Round>,
        n_actions: usize,
        scope: ModelScope,
        tuned: &ModelConfig,
        overfit: &ModelConfig,
        split_mode: SplitMode,
        seed: u64,
    ) -> Result<Self> {
        let fit_one = |ds: LabeledDataset, s: u64| -> Result<ModelPair> {
            let tuned = tuned.clone().with_seed(seed::derive(s, 1));
            let overfit = overfit.clone().with_seed(seed::derive(s, 2));
            if split_mode == SplitMode::DisjointSplit && ds.len() < 2 {
                return Ok(ModelPair {
                    f: fit(&ds, &tuned)?,
                    g: FittedModel::constant(ds.dim(), COLD_G),
                    split_mode,
                });
            }
            fit_pair(&ds, &tuned, &overfit, split_mode, seed::derive(s, 3))
        };
        match scope {
            ModelScope::PerAction => {
                let pairs = per_action_datasets(rounds, n_actions)?
                    .into_iter()
                    .enumerate()
                    .map(|(a, ds)| {
                        ds.map(|ds| fit_one(ds, seed::derive(seed, a as u64)))
                            .transpose()
                    })
                    .collect::<Result<_>>()?;
                Ok(PairSet::PerAction(pairs))
            }
            ModelScope::SharedOneHot => Ok(PairSet::Shared(
                shared_dataset(rounds, n_actions)?
                    .map(|ds| fit_one(ds, seed))
                    .transpose()?,
            )),
        }
    }

    /// Clipped `(f, g)` for `action`; `(COLD_F, COLD_G)` when it has no pair.
    pub fn predict(&self, action: usize, x: &[f64], n_actions: usize) -> Result<(f64, f64)> {
        match self {
            PairSet::PerAction(pairs) => match pairs.get(action).and_then(Option::as_ref) {
                Some(p) => p.predict(x),
                None => Ok((COLD_F, COLD_G)),
            },
            PairSet::Shared(Some(p)) => p.predict(&one_hot_input(x, action, n_actions)),
            PairSet::Shared(None) => Ok((COLD_F, COLD_G)),
        }
    }

    pub fn pair(&self, action: usize) -> Option<&ModelPair> {
        match self {
            PairSet::PerAction(pairs) => pairs.get(action).and_then(Option::as_ref),
            PairSet::Shared(p) => p.as_ref(),
        }
    }
}
