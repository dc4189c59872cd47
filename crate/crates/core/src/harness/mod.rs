//! Experiment orchestration: the interaction loop, seeded replications,
//! regret summaries, the residual-overfit oracles and result files.

mod config;
mod oracle;
mod persist;
mod run;
mod stats;

pub use config::{EnvConfig, EnvKind, ExperimentConfig};
pub use oracle::{
    compare_uncertainty_maps, grid, verify_proposition, ProbeResult, PropositionReport, ToyModels,
    Tuned, UncertaintyMaps,
};
pub use persist::{
    persist_results, series_csv, series_file_name, summary_csv, CONFIG_FILE, SERIES_DIR,
    SERIES_HEADER, SUMMARY_FILE, SUMMARY_HEADER,
};
pub use run::{
    build_environment, environment_seed, prepare_data, replication_seed, run_experiment, run_loop,
    run_replication, ExperimentResults, PolicyResults, PreparedData, ReplicationRun,
};
pub use stats::{average_regret, cumulative, summarize, t_quantile_975, RegretSummary};
