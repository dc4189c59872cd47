use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;

use super::config::{EnvKind, ExperimentConfig};
use super::stats::{average_regret, summarize, RegretSummary};
use crate::environments::{
    gen_synthetic_bandit, gen_synthetic_ratings, load_chorales, load_covertype, parse_ratings,
    ClassificationData, ClassificationEnv, DepletingEnv, Environment, Rating,
};
use crate::error::{Error, Result};
use crate::policies::{BanditPolicy, Policy, PolicyKind, Round};
use crate::seed;

/// Seed of replication `r` of `kind`. Environments are seeded per replication
/// only, so every policy faces the same stream in replication `r`.
pub fn replication_seed(base: u64, replication: usize, kind: PolicyKind) -> u64 {
    seed::derive(
        seed::derive(base, replication as u64),
        seed::tag(kind.name()),
    )
}

pub fn environment_seed(base: u64, replication: usize) -> u64 {
    seed::derive(
        seed::derive(base, replication as u64),
        seed::tag("environment"),
    )
}

/// Data loaded once per experiment and shared by every replication.
#[derive(Debug, Clone)]
pub enum PreparedData {
    Classification(Arc<ClassificationData>),
    Ratings(Arc<Vec<Rating>>),
}

pub fn prepare_data(config: &ExperimentConfig) -> Result<PreparedData> {
    let env = &config.env;
    let path = || {
        env.path.clone().ok_or_else(|| {
            Error::Config(format!("environment '{}' needs env.path", env.kind.name()))
        })
    };
    Ok(match env.kind {
        EnvKind::Synthetic => PreparedData::Classification(Arc::new(gen_synthetic_bandit(
            env.classes,
            env.dim,
            env.rows,
            env.separation,
            seed::derive(config.seed, seed::tag("data")),
        )?)),
        EnvKind::Covertype => PreparedData::Classification(Arc::new(load_covertype(path()?)?)),
        EnvKind::Chorales => PreparedData::Classification(Arc::new(load_chorales(path()?)?)),
        EnvKind::Movielens => PreparedData::Ratings(Arc::new(parse_ratings(path()?)?)),
        EnvKind::SyntheticDepleting => PreparedData::Ratings(Arc::new(gen_synthetic_ratings(
            env.users,
            env.items,
            env.groups,
            env.density,
            seed::derive(config.seed, seed::tag("data")),
        ))),
    })
}

/// Builds the environment for one replication.
///
/// Classification streams repeat the (capped) instances as many times as the
/// horizon needs.
pub fn build_environment(
    config: &ExperimentConfig,
    data: &PreparedData,
    env_seed: u64,
) -> Result<Box<dyn Environment + Send>> {
    Ok(match data {
        PreparedData::Classification(d) => {
            let rows = config.env.row_cap.map_or(d.len(), |c| c.clamp(1, d.len()));
            let passes = config.horizon.div_ceil(rows).max(1);
            Box::new(ClassificationEnv::new(
                d.clone(),
                env_seed,
                config.env.row_cap,
                passes,
            )?)
        }
        PreparedData::Ratings(r) => Box::new(DepletingEnv::from_ratings(
            r,
            env_seed,
            config.env.context_dim,
            config.env.passes,
        )?),
    })
}

/// Drives `policy` through `env` for at most `horizon` steps.
///
/// Until every action has been played once, actions are drawn uniformly from
/// the eligible set; afterwards the policy chooses. Every round is passed to
/// `observe`. Errors carry the index of the step that raised them.
pub fn run_loop<E, P>(
    env: &mut E,
    policy: &mut P,
    horizon: usize,
    rng: &mut seed::Rng,
) -> Result<Vec<u8>>
where
    E: Environment + ?Sized,
    P: BanditPolicy + ?Sized,
{
    let mut seen = vec![false; env.n_actions()];
    let mut unseen = seen.len();
    let mut rewards = Vec::with_capacity(horizon.min(env.len()));
    for t in 0..horizon {
        let mut step = || -> Result<Option<u8>> {
            let Some(s) = env.next_step()? else {
                return Ok(None);
            };
            if s.eligible.is_empty() {
                return Err(Error::Protocol("step has no eligible actions".into()));
            }
            let action = if unseen > 0 {
                s.eligible[rng.random_range(0..s.eligible.len())]
            } else {
                policy.select_action(&s.context, &s.eligible, rng)?
            };
            let reward = env.reward(action)?;
            policy.observe(Round::new(t, s.context, action, reward))?;
            if !std::mem::replace(&mut seen[action], true) {
                unseen -= 1;
            }
            Ok(Some(reward))
        };
        match step().map_err(|e| e.at_step(t))? {
            Some(r) => rewards.push(r),
            None => break,
        }
    }
    Ok(rewards)
}

/// Per-step rewards of replication `replication` of `kind`.
pub fn run_replication(
    config: &ExperimentConfig,
    data: &PreparedData,
    kind: PolicyKind,
    replication: usize,
) -> Result<Vec<u8>> {
    let rep_seed = replication_seed(config.seed, replication, kind);
    let mut env = build_environment(config, data, environment_seed(config.seed, replication))?;
    let policy_config = config.policy_config(kind, seed::derive(rep_seed, seed::tag("policy")));
    let mut policy = Policy::new(policy_config, env.n_actions(), env.context_dim())?;
    let mut rng = seed::rng(seed::derive(rep_seed, seed::tag("actions")));
    let rewards = run_loop(env.as_mut(), &mut policy, config.horizon, &mut rng)?;
    if rewards.is_empty() {
        return Err(Error::InvalidState("environment produced no steps".into()));
    }
    Ok(rewards)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRun {
    pub replication: usize,
    pub seed: u64,
    pub rewards: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyResults {
    pub kind: PolicyKind,
    pub runs: Vec<ReplicationRun>,
    pub summary: RegretSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResults {
    pub dataset: String,
    pub policies: Vec<PolicyResults>,
}

/// Runs every (policy, replication) pair on up to `jobs` threads.
///
/// Results are collected in configuration order, so they don't depend on
/// the thread count.
pub fn run_experiment(config: &ExperimentConfig, jobs: usize) -> Result<ExperimentResults> {
    config.validate()?;
    let data = prepare_data(config)?;
    let tasks: Vec<(PolicyKind, usize)> = config
        .policies
        .iter()
        .flat_map(|&k| (0..config.n_replications).map(move |r| (k, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidState(format!("thread pool: {e}")))?;
    let rewards: Vec<Result<Vec<u8>>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(kind, r)| run_replication(config, &data, kind, r))
            .collect()
    });
    let mut rewards = rewards.into_iter();
    let mut policies = Vec::with_capacity(config.policies.len());
    for &kind in &config.policies {
        let runs = (0..config.n_replications)
            .map(|r| {
                Ok(ReplicationRun {
                    replication: r,
                    seed: replication_seed(config.seed, r, kind),
                    rewards: rewards.next().expect("one result per task")?,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::InvalidState(format!("{kind}: {e}")))?;
        let regrets = runs
            .iter()
            .map(|run| average_regret(&run.rewards))
            .collect::<Result<Vec<_>>>()?;
        let series: Vec<Vec<u8>> = runs.iter().map(|r| r.rewards.clone()).collect();
        let summary = summarize(&regrets)?.with_series(&series);
        policies.push(PolicyResults {
            kind,
            runs,
            summary,
        });
    }
    Ok(ExperimentResults {
        dataset: config.env.dataset_name(),
        policies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn small_config(kinds: &[PolicyKind]) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.env = crate::harness::EnvConfig::synthetic(5, 3, 400, 2.0);
        cfg.policies = kinds.to_vec();
        cfg.horizon = 300;
        cfg.n_replications = 2;
        cfg
    }

    /// Knows every instance's label by its feature bits.
    struct Omniscient {
        labels: HashMap<Vec<u64>, usize>,
        calls: usize,
    }

    impl BanditPolicy for Omniscient {
        fn name(&self) -> &str {
            "omniscient"
        }

        fn select_action(
            &mut self,
            context: &[f64],
            _: &[usize],
            _: &mut seed::Rng,
        ) -> Result<usize> {
            self.calls += 1;
            let key: Vec<u64> = context.iter().map(|v| v.to_bits()).collect();
            Ok(self.labels[&key])
        }

        fn observe(&mut self, _: Round) -> Result<()> {
            Ok(())
        }
    }

    #[test]
    fn omniscient_policy_has_zero_regret() {
        let data = Arc::new(gen_synthetic_bandit(4, 3, 200, 1.0, 5).unwrap());
        let labels = (0..data.len())
            .map(|i| {
                (
                    data.row(i).iter().map(|v| v.to_bits()).collect(),
                    data.label(i),
                )
            })
            .collect();
        let mut policy = Omniscient { labels, calls: 0 };
        let mut env = ClassificationEnv::new(data, 1, None, 3).unwrap();
        let rewards = run_loop(&mut env, &mut policy, 600, &mut seed::rng(0)).unwrap();
        assert_eq!(rewards.len(), 600);
        // Every step the policy chose itself (all but the forced warm-up) pays.
        let chosen = &rewards[600 - policy.calls..];
        assert!(chosen.len() > 550);
        assert_eq!(average_regret(chosen).unwrap(), 0.0);
    }

    /// Counts how often the policy is consulted.
    struct Counting {
        calls: usize,
        observed: usize,
    }

    impl BanditPolicy for Counting {
        fn name(&self) -> &str {
            "counting"
        }

        fn select_action(
            &mut self,
            _: &[f64],
            eligible: &[usize],
            _: &mut seed::Rng,
        ) -> Result<usize> {
            self.calls += 1;
            Ok(eligible[0])
        }

        fn observe(&mut self, _: Round) -> Result<()> {
            self.observed += 1;
            Ok(())
        }
    }

    #[test]
    fn forced_initialization_covers_every_action() {
        let data = Arc::new(gen_synthetic_bandit(6, 2, 500, 1.0, 5).unwrap());
        let mut env = ClassificationEnv::new(data, 2, None, 1).unwrap();
        let mut policy = Counting {
            calls: 0,
            observed: 0,
        };
        let rewards = run_loop(&mut env, &mut policy, 500, &mut seed::rng(3)).unwrap();
        assert_eq!(policy.observed, 500);
        let warmup = 500 - policy.calls;
        assert!(warmup >= 6);
        assert_eq!(rewards.len(), 500);
    }

    #[test]
    fn stream_exhaustion_ends_the_run() {
        let data = Arc::new(gen_synthetic_bandit(3, 2, 50, 1.0, 5).unwrap());
        let mut env = ClassificationEnv::new(data, 2, None, 1).unwrap();
        let mut policy = Counting {
            calls: 0,
            observed: 0,
        };
        let rewards = run_loop(&mut env, &mut policy, 1000, &mut seed::rng(3)).unwrap();
        assert_eq!(rewards.len(), 50);
    }

    struct Failing;

    impl BanditPolicy for Failing {
        fn name(&self) -> &str {
            "failing"
        }

        fn select_action(&mut self, _: &[f64], _: &[usize], _: &mut seed::Rng) -> Result<usize> {
            Ok(99)
        }

        fn observe(&mut self, _: Round) -> Result<()> {
            Ok(())
        }
    }

    #[test]
    fn errors_carry_the_step() {
        let data = Arc::new(gen_synthetic_bandit(2, 2, 100, 1.0, 5).unwrap());
        let mut env = ClassificationEnv::new(data, 2, None, 1).unwrap();
        let err = run_loop(&mut env, &mut Failing, 100, &mut seed::rng(1)).unwrap_err();
        assert!(matches!(err, Error::AtStep { step, .. } if step >= 2));
    }

    #[test]
    fn uniform_replication_is_seeded() {
        let cfg = small_config(&[PolicyKind::Uniform]);
        let data = prepare_data(&cfg).unwrap();
        let a = run_replication(&cfg, &data, PolicyKind::Uniform, 0).unwrap();
        let b = run_replication(&cfg, &data, PolicyKind::Uniform, 0).unwrap();
        let c = run_replication(&cfg, &data, PolicyKind::Uniform, 1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 300);
    }

    #[test]
    fn experiment_is_independent_of_jobs() {
        let cfg = small_config(&[PolicyKind::Uniform, PolicyKind::LinUcb]);
        let one = run_experiment(&cfg, 1).unwrap();
        let two = run_experiment(&cfg, 2).unwrap();
        assert_eq!(one, two);
        assert_eq!(one.policies.len(), 2);
        assert!(one.policies.iter().all(|p| p.runs.len() == 2));
        assert_eq!(one.dataset, "synthetic_k5");
    }

    #[test]
    fn missing_path_fails_before_running() {
        let mut cfg = small_config(&[PolicyKind::Uniform]);
        cfg.env.kind = EnvKind::Covertype;
        cfg.env.path = Some("/nonexistent/covtype.csv".into());
        assert!(matches!(run_experiment(&cfg, 1), Err(Error::Io { .. })));
    }
}
