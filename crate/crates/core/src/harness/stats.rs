use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// `1 - mean(rewards)`.
pub fn average_regret(rewards: &[u8]) -> Result<f64> {
    if rewards.is_empty() {
        return Err(Error::invalid("average regret of an empty run"));
    }
    let total: u64 = rewards.iter().map(|&r| u64::from(r)).sum();
    Ok(1.0 - total as f64 / rewards.len() as f64)
}

/// Cross-replication regret summary with a Student-t 95% interval.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretSummary {
    pub regrets: Vec<f64>,
    pub mean: f64,
    /// Zero when there is a single replication (the interval is undefined).
    pub ci95_halfwidth: f64,
    /// Cumulative reward after each step, one series per replication.
    pub cumulative_rewards: Vec<Vec<u64>>,
}

impl RegretSummary {
    pub fn n_replications(&self) -> usize {
        self.regrets.len()
    }

    /// True when the interval could not be computed.
    pub fn interval_undefined(&self) -> bool {
        self.regrets.len() < 2
    }

    pub fn with_series(mut self, rewards: &[Vec<u8>]) -> Self {
        self.cumulative_rewards = rewards.iter().map(|r| cumulative(r)).collect();
        self
    }
}

pub fn cumulative(rewards: &[u8]) -> Vec<u64> {
    rewards
        .iter()
        .scan(0u64, |acc, &r| {
            *acc += u64::from(r);
            Some(*acc)
        })
        .collect()
}

/// Two-sided 97.5% quantile of Student's t with `dof` degrees of freedom.
pub fn t_quantile_975(dof: usize) -> f64 {
    StudentsT::new(0.0, 1.0, dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975)
}

pub fn summarize(regrets: &[f64]) -> Result<RegretSummary> {
    let n = regrets.len();
    if n == 0 {
        return Err(Error::invalid("summary needs at least one replication"));
    }
    let mean = regrets.iter().sum::<f64>() / n as f64;
    let ci95_halfwidth = if n < 2 {
        0.0
    } else {
        let var = regrets.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        t_quantile_975(n - 1) * (var / n as f64).sqrt()
    };
    Ok(RegretSummary {
        regrets: regrets.to_vec(),
        mean,
        ci95_halfwidth,
        cumulative_rewards: Vec::new(),
    })
}
