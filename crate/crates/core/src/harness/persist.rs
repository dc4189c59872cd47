use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::run::{ExperimentResults, ReplicationRun};
use super::stats::cumulative;
use crate::error::{Error, Result};
use crate::policies::PolicyKind;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const CONFIG_FILE: &str = "config.txt";
pub const SERIES_DIR: &str = "series";
pub const SUMMARY_HEADER: &str = "policy,dataset,n_replications,mean_regret,ci95_halfwidth";
pub const SERIES_HEADER: &str = "step,reward,cumulative_reward";

/// The summary table, one row per policy in configuration order.
pub fn summary_csv(results: &ExperimentResults) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for p in &results.policies {
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{:.6}",
            p.kind,
            results.dataset,
            p.summary.n_replications(),
            p.summary.mean,
            p.summary.ci95_halfwidth
        );
    }
    out
}

/// Steps are numbered from 1.
pub fn series_csv(rewards: &[u8]) -> String {
    let mut out = String::with_capacity(16 * rewards.len() + 32);
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for (t, (r, c)) in rewards.iter().zip(cumulative(rewards)).enumerate() {
        let _ = writeln!(out, "{},{r},{c}", t + 1);
    }
    out
}

pub fn series_file_name(kind: PolicyKind, run: &ReplicationRun) -> String {
    format!("{}_rep{:02}_seed{}.csv", kind, run.replication, run.seed)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes the summary, one series file per (policy, replication) and the
/// config snapshot under `dir`. Returns the paths written.
pub fn persist_results(
    dir: &Path,
    results: &ExperimentResults,
    config: &ExperimentConfig,
) -> Result<Vec<PathBuf>> {
    let series_dir = dir.join(SERIES_DIR);
    fs::create_dir_all(&series_dir).map_err(|e| Error::io(&series_dir, e))?;
    let mut written = Vec::new();
    for p in &results.policies {
        for run in &p.runs {
            let path = series_dir.join(series_file_name(p.kind, run));
            write(&path, &series_csv(&run.rewards))?;
            written.push(path);
        }
    }
    let config_path = dir.join(CONFIG_FILE);
    write(&config_path, &config.snapshot())?;
    written.push(config_path);
    // The summary goes last so its presence marks a complete run.
    let summary_path = dir.join(SUMMARY_FILE);
    write(&summary_path, &summary_csv(results))?;
    written.push(summary_path);
    Ok(written)
}
