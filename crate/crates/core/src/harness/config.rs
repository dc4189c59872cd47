use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::models::{ModelConfig, SplitMode};
use crate::policies::{ModelScope, PolicyConfig, PolicyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    /// Gaussian clusters from `gen_synthetic_bandit`.
    Synthetic,
    Covertype,
    Chorales,
    Movielens,
    /// Depleting environment over `gen_synthetic_ratings`.
    SyntheticDepleting,
}

impl EnvKind {
    pub fn name(self) -> &'static str {
        match self {
            EnvKind::Synthetic => "synthetic",
            EnvKind::Covertype => "covertype",
            EnvKind::Chorales => "chorales",
            EnvKind::Movielens => "movielens",
            EnvKind::SyntheticDepleting => "synthetic_depleting",
        }
    }

    pub fn needs_path(self) -> bool {
        matches!(
            self,
            EnvKind::Covertype | EnvKind::Chorales | EnvKind::Movielens
        )
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            EnvKind::Synthetic,
            EnvKind::Covertype,
            EnvKind::Chorales,
            EnvKind::Movielens,
            EnvKind::SyntheticDepleting,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown environment kind '{s}'")))
    }
}

/// Environment settings. Fields that don't apply to `kind` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    pub kind: EnvKind,
    pub path: Option<PathBuf>,
    pub row_cap: Option<usize>,
    pub classes: usize,
    pub dim: usize,
    pub rows: usize,
    pub separation: f64,
    pub context_dim: usize,
    pub passes: usize,
    pub users: usize,
    pub items: usize,
    pub groups: usize,
    pub density: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            kind: EnvKind::Synthetic,
            path: None,
            row_cap: None,
            classes: 20,
            dim: 10,
            rows: 5000,
            separation: 1.5,
            context_dim: 32,
            passes: 10,
            users: 200,
            items: 60,
            groups: 4,
            density: 0.3,
        }
    }
}

impl EnvConfig {
    pub fn synthetic(classes: usize, dim: usize, rows: usize, separation: f64) -> Self {
        Self {
            classes,
            dim,
            rows,
            separation,
            ..Self::default()
        }
    }

    /// Name used in summary rows.
    pub fn dataset_name(&self) -> String {
        match self.kind {
            EnvKind::Synthetic => format!("synthetic_k{}", self.classes),
            k => k.name().to_string(),
        }
    }
}

/// Everything a `run` needs; the output is a pure function of this value.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub policies: Vec<PolicyKind>,
    pub horizon: usize,
    pub n_replications: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub alpha: f64,
    pub epsilon: f64,
    pub organic_rate: f64,
    pub retrain_every: usize,
    pub m_replicates: usize,
    pub model_scope: ModelScope,
    pub split_mode: SplitMode,
    pub n_trees: usize,
    /// Depth limit of the tuned trees; 0 means unlimited.
    pub max_depth: usize,
    pub linucb_ridge: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = PolicyConfig::new(PolicyKind::Uniform);
        Self {
            env: EnvConfig::default(),
            policies: PolicyKind::ALL.to_vec(),
            horizon: 5000,
            n_replications: 10,
            seed: 0,
            output_dir: PathBuf::from("results"),
            alpha: p.alpha,
            epsilon: p.epsilon,
            organic_rate: p.organic_rate,
            retrain_every: p.retrain_every,
            m_replicates: p.m_replicates,
            model_scope: p.model_scope,
            split_mode: p.split_mode,
            n_trees: p.tuned.n_trees,
            max_depth: p.tuned.max_depth.unwrap_or(0),
            linucb_ridge: p.linucb_ridge,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value '{value}' for {key}")))
}

fn scope_name(s: ModelScope) -> &'static str {
    match s {
        ModelScope::PerAction => "per_action",
        ModelScope::SharedOneHot => "shared_onehot",
    }
}

fn split_name(s: SplitMode) -> &'static str {
    match s {
        SplitMode::DisjointSplit => "disjoint_split",
        SplitMode::SharedData => "shared_data",
    }
}

impl ExperimentConfig {
    /// Every accepted key, in snapshot order.
    pub const KEYS: &'static [&'static str] = &[
        "experiment.policies",
        "experiment.horizon",
        "experiment.replications",
        "experiment.seed",
        "experiment.output_dir",
        "env.kind",
        "env.path",
        "env.row_cap",
        "env.classes",
        "env.dim",
        "env.rows",
        "env.separation",
        "env.context_dim",
        "env.passes",
        "env.users",
        "env.items",
        "env.groups",
        "env.density",
        "policy.alpha",
        "policy.epsilon",
        "policy.organic_rate",
        "policy.retrain_every",
        "policy.m_replicates",
        "policy.model_scope",
        "policy.split_mode",
        "policy.n_trees",
        "policy.max_depth",
        "policy.linucb_ridge",
    ];

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "experiment.policies" => {
                self.policies = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse()
                            .map_err(|_| Error::Config(format!("unknown policy '{s}'")))
                    })
                    .collect::<Result<_>>()?
            }
            "experiment.horizon" => self.horizon = parse(key, v)?,
            "experiment.replications" => self.n_replications = parse(key, v)?,
            "experiment.seed" => self.seed = parse(key, v)?,
            "experiment.output_dir" => self.output_dir = PathBuf::from(v),
            "env.kind" => self.env.kind = v.parse()?,
            "env.path" => self.env.path = (!v.is_empty()).then(|| PathBuf::from(v)),
            "env.row_cap" => {
                self.env.row_cap = match v {
                    "" | "none" => None,
                    _ => Some(parse(key, v)?),
                }
            }
            "env.classes" => self.env.classes = parse(key, v)?,
            "env.dim" => self.env.dim = parse(key, v)?,
            "env.rows" => self.env.rows = parse(key, v)?,
            "env.separation" => self.env.separation = parse(key, v)?,
            "env.context_dim" => self.env.context_dim = parse(key, v)?,
            "env.passes" => self.env.passes = parse(key, v)?,
            "env.users" => self.env.users = parse(key, v)?,
            "env.items" => self.env.items = parse(key, v)?,
            "env.groups" => self.env.groups = parse(key, v)?,
            "env.density" => self.env.density = parse(key, v)?,
            "policy.alpha" => self.alpha = parse(key, v)?,
            "policy.epsilon" => self.epsilon = parse(key, v)?,
            "policy.organic_rate" => self.organic_rate = parse(key, v)?,
            "policy.retrain_every" => self.retrain_every = parse(key, v)?,
            "policy.m_replicates" => self.m_replicates = parse(key, v)?,
            "policy.model_scope" => self.model_scope = v.parse()?,
            "policy.split_mode" => self.split_mode = v.parse()?,
            "policy.n_trees" => self.n_trees = parse(key, v)?,
            "policy.max_depth" => self.max_depth = parse(key, v)?,
            "policy.linucb_ridge" => self.linucb_ridge = parse(key, v)?,
            _ => return Err(Error::Config(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, v) in pairs {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let e = &self.env;
        Some(match key {
            "experiment.policies" => self
                .policies
                .iter()
                .map(|p| p.name())
                .collect::<Vec<_>>()
                .join(","),
            "experiment.horizon" => self.horizon.to_string(),
            "experiment.replications" => self.n_replications.to_string(),
            "experiment.seed" => self.seed.to_string(),
            "experiment.output_dir" => self.output_dir.display().to_string(),
            "env.kind" => e.kind.name().to_string(),
            "env.path" => e
                .path
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            "env.row_cap" => e
                .row_cap
                .map_or_else(|| "none".to_string(), |c| c.to_string()),
            "env.classes" => e.classes.to_string(),
            "env.dim" => e.dim.to_string(),
            "env.rows" => e.rows.to_string(),
            "env.separation" => e.separation.to_string(),
            "env.context_dim" => e.context_dim.to_string(),
            "env.passes" => e.passes.to_string(),
            "env.users" => e.users.to_string(),
            "env.items" => e.items.to_string(),
            "env.groups" => e.groups.to_string(),
            "env.density" => e.density.to_string(),
            "policy.alpha" => self.alpha.to_string(),
            "policy.epsilon" => self.epsilon.to_string(),
            "policy.organic_rate" => self.organic_rate.to_string(),
            "policy.retrain_every" => self.retrain_every.to_string(),
            "policy.m_replicates" => self.m_replicates.to_string(),
            "policy.model_scope" => scope_name(self.model_scope).to_string(),
            "policy.split_mode" => split_name(self.split_mode).to_string(),
            "policy.n_trees" => self.n_trees.to_string(),
            "policy.max_depth" => self.max_depth.to_string(),
            "policy.linucb_ridge" => self.linucb_ridge.to_string(),
            _ => return None,
        })
    }

    pub fn to_pairs(&self) -> BTreeMap<&'static str, String> {
        Self::KEYS
            .iter()
            .map(|&k| (k, self.get(k).expect("every listed key has a value")))
            .collect()
    }

    /// `key = value` lines in [`Self::KEYS`] order.
    pub fn snapshot(&self) -> String {
        let mut out = String::new();
        for &k in Self::KEYS {
            let _ = writeln!(out, "{k} = {}", self.get(k).expect("listed key"));
        }
        out
    }

    /// The policy configuration for `kind` with this experiment's passthroughs.
    pub fn policy_config(&self, kind: PolicyKind, seed: u64) -> PolicyConfig {
        let mut p = PolicyConfig::new(kind);
        p.alpha = self.alpha;
        p.epsilon = self.epsilon;
        p.organic_rate = self.organic_rate;
        p.retrain_every = self.retrain_every;
        p.m_replicates = self.m_replicates;
        p.model_scope = self.model_scope;
        p.split_mode = self.split_mode;
        p.linucb_ridge = self.linucb_ridge;
        p.tuned = ModelConfig {
            n_trees: self.n_trees,
            max_depth: (self.max_depth > 0).then_some(self.max_depth),
            ..p.tuned
        };
        p.seed = seed;
        p
    }

    /// Checks everything that can be checked without reading data.
    pub fn validate(&self) -> Result<()> {
        if self.policies.is_empty() {
            return Err(Error::Config("no policies configured".into()));
        }
        if self.n_replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        if self.env.kind.needs_path() && self.env.path.is_none() {
            return Err(Error::Config(format!(
                "environment '{}' needs env.path",
                self.env.kind.name()
            )));
        }
        if self.env.kind == EnvKind::Synthetic && self.horizon < self.env.classes {
            return Err(Error::Config(format!(
                "horizon {} is shorter than the {} actions",
                self.horizon, self.env.classes
            )));
        }
        for &kind in &self.policies {
            self.policy_config(kind, 0).validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trips() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("env.kind", "covertype").unwrap();
        cfg.set("env.path", "/data/covtype.csv").unwrap();
        cfg.set("env.row_cap", "20000").unwrap();
        cfg.set("experiment.policies", "uniform, rome_ts").unwrap();
        cfg.set("policy.alpha", "0.5").unwrap();
        let text = cfg.snapshot();
        let pairs: Vec<(&str, &str)> = text.lines().map(|l| l.split_once(" = ").unwrap()).collect();
        assert_eq!(ExperimentConfig::from_pairs(pairs).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_and_bad_value() {
        let mut cfg = ExperimentConfig::default();
        assert!(matches!(
            cfg.set("experiment.horizn", "5"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            cfg.set("experiment.horizon", "five"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            cfg.set("experiment.policies", "greedy"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.horizon = 5;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.env.kind = EnvKind::Chorales;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.n_replications = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn passthroughs_reach_policies() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("policy.epsilon", "0.2").unwrap();
        cfg.set("policy.max_depth", "0").unwrap();
        let p = cfg.policy_config(PolicyKind::EpsGreedy, 9);
        assert_eq!(p.epsilon, 0.2);
        assert_eq!(p.tuned.max_depth, None);
        assert_eq!(p.seed, 9);
    }
}
