//! The six bandit policies behind one interface.
//!
//! Model-based kinds keep a replay buffer and retrain their reward models
//! from scratch every `retrain_every` observations. LinUCB updates its
//! closed-form statistics on every observation instead. All model-based
//! kinds, LinUCB included, play a uniform action with probability
//! `organic_rate` before consulting their scores.

mod buffer;
mod linucb;
mod models;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::models::{ModelConfig, SplitMode};
use crate::rome::{self, ScoreConfig};
use crate::seed;

pub use buffer::{ReplayBuffer, Round};
pub use linucb::LinUcbArm;
pub use models::{PairSet, RewardModelSet, COLD_F, COLD_G};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    RomeTs,
    RomeUcb,
    LinUcb,
    EpsGreedy,
    BootstrapTs,
    Uniform,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::LinUcb,
        PolicyKind::EpsGreedy,
        PolicyKind::BootstrapTs,
        PolicyKind::RomeUcb,
        PolicyKind::RomeTs,
        PolicyKind::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::RomeTs => "rome_ts",
            PolicyKind::RomeUcb => "rome_ucb",
            PolicyKind::LinUcb => "lin_ucb",
            PolicyKind::EpsGreedy => "eps_greedy",
            PolicyKind::BootstrapTs => "bootstrap_ts",
            PolicyKind::Uniform => "uniform",
        }
    }

    pub fn is_model_based(self) -> bool {
        self != PolicyKind::Uniform
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown policy kind `{s}`")))
    }
}

/// How reward models condition on the action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelScope {
    /// One model per action, trained on the rounds where it was played.
    PerAction,
    /// One model over the context concatenated with a one-hot action code.
    SharedOneHot,
}

impl std::str::FromStr for ModelScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_action" => Ok(ModelScope::PerAction),
            "shared_onehot" => Ok(ModelScope::SharedOneHot),
            other => Err(Error::Config(format!("unknown model scope `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    pub alpha: f64,
    pub epsilon: f64,
    pub organic_rate: f64,
    pub retrain_every: usize,
    pub m_replicates: usize,
    pub model_scope: ModelScope,
    pub tuned: ModelConfig,
    pub overfit: ModelConfig,
    pub split_mode: SplitMode,
    /// Clamps used by the ROME scores; `alpha` above overrides `score.alpha`.
    pub score: ScoreConfig,
    /// Prior precision of every LinUCB arm.
    pub linucb_ridge: f64,
    pub seed: u64,
}

impl PolicyConfig {
    /// Defaults: α = 1, ε = 0.1, organic rate 0.01, retrain every 100
    /// observations, 20 bootstrap replicates, a bagged 10-tree forest as the
    /// tuned model and a single unpruned tree as the overfit model.
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            alpha: 1.0,
            epsilon: 0.1,
            organic_rate: 0.01,
            retrain_every: 100,
            m_replicates: 20,
            model_scope: ModelScope::PerAction,
            tuned: ModelConfig::forest(),
            overfit: ModelConfig::overfit_tree(),
            split_mode: SplitMode::DisjointSplit,
            score: ScoreConfig::default(),
            linucb_ridge: 1.0,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn score_config(&self) -> ScoreConfig {
        self.score.with_alpha(self.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("epsilon", self.epsilon)?;
        unit("organic_rate", self.organic_rate)?;
        if self.retrain_every == 0 {
            return Err(Error::Config("retrain_every must be positive".into()));
        }
        if self.m_replicates == 0 {
            return Err(Error::Config("m_replicates must be positive".into()));
        }
        if !(self.linucb_ridge > 0.0 && self.linucb_ridge.is_finite()) {
            return Err(Error::Config("linucb_ridge must be positive".into()));
        }
        self.score_config().validate()?;
        self.tuned.validate()?;
        self.overfit.validate()?;
        if matches!(self.kind, PolicyKind::RomeTs | PolicyKind::RomeUcb)
            && !self.overfit.is_less_regularized_than(&self.tuned)
        {
            return Err(Error::Config(
                "overfit model config must be strictly less regularized than the tuned config"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// The interface the harness drives.
pub trait BanditPolicy {
    fn name(&self) -> &str;

    /// Picks one of `eligible` for `context`.
    fn select_action(
        &mut self,
        context: &[f64],
        eligible: &[usize],
        rng: &mut seed::Rng,
    ) -> Result<usize>;

    fn observe(&mut self, round: Round) -> Result<()>;
}

#[derive(Debug, Clone)]
enum State {
    Rome(PairSet),
    Greedy(RewardModelSet),
    Bootstrap(Vec<RewardModelSet>),
    LinUcb(Vec<LinUcbArm>),
    Uniform,
}

/// A configured policy instance for one run.
#[derive(Debug, Clone)]
pub struct Policy {
    config: PolicyConfig,
    n_actions: usize,
    dim: usize,
    buffer: ReplayBuffer,
    state: State,
    retrains: u64,
}

impl Policy {
    pub fn new(config: PolicyConfig, n_actions: usize, dim: usize) -> Result<Self> {
        if n_actions < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 actions, got {n_actions}"
            )));
        }
        if dim == 0 {
            return Err(Error::invalid("context dimension must be positive"));
        }
        config.validate()?;
        let state = match config.kind {
            PolicyKind::RomeTs | PolicyKind::RomeUcb => State::Rome(PairSet::cold()),
            PolicyKind::EpsGreedy => State::Greedy(RewardModelSet::cold()),
            PolicyKind::BootstrapTs => State::Bootstrap(Vec::new()),
            PolicyKind::LinUcb => State::LinUcb(
                (0..n_actions)
                    .map(|_| LinUcbArm::new(dim, config.linucb_ridge))
                    .collect(),
            ),
            PolicyKind::Uniform => State::Uniform,
        };
        Ok(Self {
            config,
            n_actions,
            dim,
            buffer: ReplayBuffer::new(),
            state,
            retrains: 0,
        })
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn kind(&self) -> PolicyKind {
        self.config.kind
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    /// Number of completed retrains.
    pub fn retrain_count(&self) -> u64 {
        self.retrains
    }

    pub fn linucb_arms(&self) -> Option<&[LinUcbArm]> {
        match &self.state {
            State::LinUcb(arms) => Some(arms),
            _ => None,
        }
    }

    pub fn bootstrap_models(&self) -> Option<&[RewardModelSet]> {
        match &self.state {
            State::Bootstrap(sets) => Some(sets),
            _ => None,
        }
    }

    pub fn pair_set(&self) -> Option<&PairSet> {
        match &self.state {
            State::Rome(p) => Some(p),
            _ => None,
        }
    }

    pub fn greedy_models(&self) -> Option<&RewardModelSet> {
        match &self.state {
            State::Greedy(m) => Some(m),
            _ => None,
        }
    }

    fn check_context(&self, context: &[f64]) -> Result<()> {
        if context.len() != self.dim {
            return Err(Error::invalid(format!(
                "context has dimension {}, policy expects {}",
                context.len(),
                self.dim
            )));
        }
        Ok(())
    }

    fn check_eligible(&self, eligible: &[usize]) -> Result<()> {
        if eligible.is_empty() {
            return Err(Error::invalid("no eligible actions"));
        }
        if let Some(&a) = eligible.iter().find(|&&a| a >= self.n_actions) {
            return Err(Error::invalid(format!(
                "eligible action {a} out of range for {} actions",
                self.n_actions
            )));
        }
        Ok(())
    }

    /// Scores of every action for `context`.
    pub fn score_all(&self, context: &[f64], rng: &mut seed::Rng) -> Result<Vec<f64>> {
        let all: Vec<usize> = (0..self.n_actions).collect();
        self.check_context(context)?;
        self.scores_for(context, &all, rng)
    }

    /// Scores of the listed actions, in order.
    fn scores_for(&self, x: &[f64], actions: &[usize], rng: &mut seed::Rng) -> Result<Vec<f64>> {
        let cfg = self.config.score_config();
        match &self.state {
            State::Uniform => Ok(vec![0.0; actions.len()]),
            State::LinUcb(arms) => Ok(actions
                .iter()
                .map(|&a| arms[a].score(x, self.config.alpha))
                .collect()),
            State::Greedy(models) => actions
                .iter()
                .map(|&a| models.predict(a, x, self.n_actions))
                .collect(),
            State::Bootstrap(sets) => {
                if sets.is_empty() {
                    return Ok(vec![COLD_F; actions.len()]);
                }
                let m = pick_model(sets.len(), rng)?;
                actions
                    .iter()
                    .map(|&a| sets[m].predict(a, x, self.n_actions))
                    .collect()
            }
            State::Rome(pairs) => actions
                .iter()
                .map(|&a| {
                    let (f, g) = pairs.predict(a, x, self.n_actions)?;
                    match self.config.kind {
                        PolicyKind::RomeTs => rome::ts_score(f, g, &cfg, rng),
                        _ if cfg.pure_exploration => rome::ucb_score(f, g, &cfg),
                        _ => Ok(rome::beta_ucb(
                            rome::beta_moment_match(f, g, &cfg)?,
                            cfg.alpha,
                        )),
                    }
                })
                .collect(),
        }
    }

    /// Uniform index in `[0, M)` choosing the bootstrap replicate for one step.
    pub fn bootstrap_pick_model(&self, rng: &mut seed::Rng) -> Result<usize> {
        match &self.state {
            State::Bootstrap(sets) => pick_model(sets.len(), rng),
            _ => Err(Error::InvalidState("policy is not bootstrap_ts".into())),
        }
    }

    /// Refits the reward models on the whole replay buffer.
    pub fn retrain(&mut self) -> Result<()> {
        if self.buffer.is_empty() {
            return Err(Error::InvalidState(
                "cannot retrain on an empty replay buffer".into(),
            ));
        }
        let round_seed = seed::derive(self.config.seed, self.retrains);
        let rounds = self.buffer.rounds();
        let (k, scope) = (self.n_actions, self.config.model_scope);
        match &mut self.state {
            State::Rome(pairs) => {
                *pairs = PairSet::fit(
                    rounds.iter(),
                    k,
                    scope,
                    &self.config.tuned,
                    &self.config.overfit,
                    self.config.split_mode,
                    round_seed,
                )?;
            }
            State::Greedy(models) => {
                *models =
                    RewardModelSet::fit(rounds.iter(), k, scope, &self.config.tuned, round_seed)?;
            }
            State::Bootstrap(sets) => {
                let n = rounds.len();
                *sets = (0..self.config.m_replicates as u64)
                    .map(|m| {
                        let rep_seed = seed::derive(round_seed, m);
                        let mut rng = seed::rng(seed::derive(rep_seed, seed::tag("resample")));
                        let resample: Vec<&Round> =
                            (0..n).map(|_| &rounds[rng.random_range(0..n)]).collect();
                        RewardModelSet::fit(
                            resample.into_iter(),
                            k,
                            scope,
                            &self.config.tuned,
                            rep_seed,
                        )
                    })
                    .collect::<Result<_>>()?;
            }
            State::LinUcb(_) | State::Uniform => {}
        }
        self.retrains += 1;
        Ok(())
    }
}

fn pick_model(m: usize, rng: &mut seed::Rng) -> Result<usize> {
    if m == 0 {
        return Err(Error::InvalidState(
            "no bootstrap models have been fitted".into(),
        ));
    }
    Ok(rng.random_range(0..m))
}

/// Index into `actions` of a maximal score, ties broken uniformly at random.
pub fn argmax_random_tie(scores: &[f64], rng: &mut seed::Rng) -> usize {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == best).collect();
    if tied.len() == 1 {
        tied[0]
    } else {
        // NaN scores would leave `tied` empty; fall back to the first index.
        *tied.choose(rng).unwrap_or(&0)
    }
}

impl BanditPolicy for Policy {
    fn name(&self) -> &str {
        self.config.kind.name()
    }

    fn select_action(
        &mut self,
        context: &[f64],
        eligible: &[usize],
        rng: &mut seed::Rng,
    ) -> Result<usize> {
        self.check_context(context)?;
        self.check_eligible(eligible)?;
        let kind = self.config.kind;
        let uniform = |rng: &mut seed::Rng| eligible[rng.random_range(0..eligible.len())];
        if kind == PolicyKind::Uniform {
            return Ok(uniform(rng));
        }
        if self.config.organic_rate > 0.0 && rng.random::<f64>() < self.config.organic_rate {
            return Ok(uniform(rng));
        }
        if kind == PolicyKind::EpsGreedy && rng.random::<f64>() < self.config.epsilon {
            return Ok(uniform(rng));
        }
        let scores = self.scores_for(context, eligible, rng)?;
        Ok(eligible[argmax_random_tie(&scores, rng)])
    }

    fn observe(&mut self, round: Round) -> Result<()> {
        self.check_context(&round.context)?;
        if round.action >= self.n_actions {
            return Err(Error::invalid(format!(
                "action {} out of range",
                round.action
            )));
        }
        if let State::LinUcb(arms) = &mut self.state {
            arms[round.action].update(&round.context, f64::from(round.reward));
        }
        self.buffer.push(round)?;
        if self.buffer.len().is_multiple_of(self.config.retrain_every) {
            self.retrain()?;
        }
        Ok(())
    }
}
