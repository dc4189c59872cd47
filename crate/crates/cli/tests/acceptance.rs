//! Acceptance suite. Each check prints one PASS or FAIL line; the process
//! exits non-zero if any check fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rome_core::environments::{gen_synthetic_ratings, DepletingEnv, Environment, SyntheticSpec};
use rome_core::harness::{
    compare_uncertainty_maps, grid, run_experiment, run_loop, verify_proposition, EnvConfig,
    ExperimentConfig, ToyModels, Tuned,
};
use rome_core::models::ModelConfig;
use rome_core::policies::{Policy, PolicyConfig, PolicyKind};
use rome_core::rome::{
    beta_moment_match, info_gain_bernoulli, info_gain_gaussian, info_gain_poisson,
    residual_overfit, sample_beta, ScoreConfig,
};
use rome_core::seed;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn uniform_mean_regret(classes: usize) -> Result<f64, String> {
    let mut config = ExperimentConfig {
        env: EnvConfig::synthetic(classes, 10, 5000, 1.5),
        policies: vec![PolicyKind::Uniform],
        n_replications: 10,
        seed: 7,
        ..ExperimentConfig::default()
    };
    config.horizon = 5000;
    let results = run_experiment(&config, jobs()).map_err(|e| e.to_string())?;
    Ok(results.policies[0].summary.mean)
}

fn uniform_anchor() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for k in [7usize, 65] {
        let target = 1.0 - 1.0 / k as f64;
        let got = uniform_mean_regret(k)?;
        ok &= (got - target).abs() <= 0.01;
        lines.push(format!("K={k} regret {got:.4} target {target:.4}"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    check(
        ok,
        format!("{} in {:.1}s", lines.join(", "), elapsed.as_secs_f64()),
    )
}

fn proposition() -> Outcome {
    let start = Instant::now();
    let spec = SyntheticSpec::linear_gaussian(200, 0.5);
    let probes = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let overfit = ModelConfig::overfit_linear();
    let fitted = verify_proposition(
        &spec,
        &Tuned::Fit(ModelConfig::linear(1.0)),
        &overfit,
        10_000,
        &probes,
        11,
    )
    .map_err(|e| e.to_string())?;
    let frozen = verify_proposition(&spec, &Tuned::Frozen(0.3), &overfit, 1_000, &probes, 12)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(
        fitted.max_rel_error < 0.05
            && frozen.max_rel_error < 0.05
            && elapsed < Duration::from_secs(120),
        format!(
            "max rel error {:.4} (10^4 draws), frozen f {:.4} (10^3 draws) in {:.1}s",
            fitted.max_rel_error,
            frozen.max_rel_error,
            elapsed.as_secs_f64()
        ),
    )
}

fn beta_exactness() -> Outcome {
    let cfg = ScoreConfig::default();
    let mut tested = 0;
    let mut worst: f64 = 0.0;
    for i in 1..=99 {
        for j in 1..=99 {
            let (f, g) = (i as f64 / 100.0, j as f64 / 100.0);
            let v = (f - g) * (f - g);
            // Only pairs where no clamp is active.
            if v <= cfg.eps_var || v >= cfg.max_var_fraction * f * (1.0 - f) {
                continue;
            }
            let p = beta_moment_match(f, g, &cfg).map_err(|e| e.to_string())?;
            worst = worst
                .max((p.mean() - f).abs())
                .max((p.variance() - v).abs());
            tested += 1;
        }
    }
    let params = beta_moment_match(0.8, 0.7, &cfg).map_err(|e| e.to_string())?;
    let mut rng = seed::rng(5);
    let n = 100_000;
    let draws: Vec<f64> = (0..n).map(|_| sample_beta(params, &mut rng)).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    check(
        tested > 0 && worst <= 1e-12 && (mean - 0.8).abs() <= 0.004 && (var - 0.01).abs() <= 0.002,
        format!(
            "{tested} grid pairs, worst error {worst:.2e}; sampled mean {mean:.4}, var {var:.5}"
        ),
    )
}

fn info_gain() -> Outcome {
    let cfg = ScoreConfig::default();
    let probs: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let rates: Vec<f64> = (1..=60).map(|i| i as f64 / 10.0).collect();
    let reals: Vec<f64> = (-50..=50).map(|i| i as f64 / 10.0).collect();
    let mut bad = Vec::new();
    for &f in &probs {
        for &g in &probs {
            let ig = info_gain_bernoulli(f, g, &cfg).map_err(|e| e.to_string())?;
            let same = f.clamp(cfg.eps_prob, 1.0 - cfg.eps_prob)
                == g.clamp(cfg.eps_prob, 1.0 - cfg.eps_prob);
            if ig < 0.0 || (ig == 0.0) != same {
                bad.push(format!("bernoulli({f},{g})={ig}"));
            }
        }
    }
    for &f in &rates {
        for &g in &rates {
            let ig = info_gain_poisson(f, g).map_err(|e| e.to_string())?;
            if ig < 0.0 || (ig == 0.0) != (f == g) {
                bad.push(format!("poisson({f},{g})={ig}"));
            }
        }
    }
    for &f in &reals {
        for &g in &reals {
            let ig = info_gain_gaussian(f, g, 0.5).map_err(|e| e.to_string())?;
            let s = residual_overfit(f, g).map_err(|e| e.to_string())?;
            if ig < 0.0 || (ig == 0.0) != (f == g) || (ig - s * s).abs() > 1e-12 {
                bad.push(format!("gaussian({f},{g})={ig}"));
            }
        }
    }
    let bern = info_gain_bernoulli(0.5, 0.3, &cfg).map_err(|e| e.to_string())?;
    let pois = info_gain_poisson(2.0, 1.0).map_err(|e| e.to_string())?;
    let hand = (bern - 0.08228).abs() <= 1e-4 && (pois - 0.30685).abs() <= 1e-4;
    check(
        bad.is_empty() && hand,
        format!(
            "bernoulli(0.5,0.3)={bern:.5}, poisson(2,1)={pois:.5}, {} grid violations {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn clustered_toy() -> Outcome {
    let spec = SyntheticSpec::fig2();
    let sites = spec.sites().expect("site design").to_vec();
    let (lo, hi) = (sites[0], sites[sites.len() - 1]);
    let xs = grid(-1.5, 1.5, 61);
    let models = ToyModels::default();
    let mut wins = 0;
    let mut min_floor = f64::INFINITY;
    for s in 0..20u64 {
        let maps = compare_uncertainty_maps(&spec, &models, &xs, s).map_err(|e| e.to_string())?;
        let outside = maps
            .mean_where(&maps.residual, |x| x < lo || x > hi)
            .expect("grid extends past the sites");
        let at_sites = maps
            .mean_where(&maps.residual, |x| sites.contains(&x))
            .expect("grid contains the sites");
        if outside > at_sites {
            wins += 1;
        }
        for (x, r) in maps.grid.iter().zip(&maps.rmse) {
            if sites.contains(x) {
                min_floor = min_floor.min(*r);
            }
        }
    }
    // Noise standard deviation is 0.25; half of it is the floor.
    check(
        wins == 20 && min_floor > 0.125,
        format!("outside > at sites in {wins}/20 seeds; min error-model profile at sites {min_floor:.4}"),
    )
}

fn policy_ordering() -> Outcome {
    let start = Instant::now();
    let config = ExperimentConfig {
        env: EnvConfig::synthetic(20, 10, 5000, 1.5),
        policies: PolicyKind::ALL.to_vec(),
        horizon: 5000,
        n_replications: 10,
        seed: 3,
        ..ExperimentConfig::default()
    };
    let results = run_experiment(&config, jobs()).map_err(|e| e.to_string())?;
    let mean = |k: PolicyKind| {
        results
            .policies
            .iter()
            .find(|p| p.kind == k)
            .map(|p| p.summary.mean)
            .expect("policy present")
    };
    let uniform = mean(PolicyKind::Uniform);
    let mut ok = true;
    let mut parts = vec![format!("uniform {uniform:.4}")];
    for &k in PolicyKind::ALL
        .iter()
        .filter(|&&k| k != PolicyKind::Uniform)
    {
        let m = mean(k);
        ok &= m <= uniform - 0.1;
        parts.push(format!("{k} {m:.4}"));
    }
    check(
        ok,
        format!(
            "{} in {:.0}s",
            parts.join(", "),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn depleting_ledger() -> Outcome {
    let ratings = gen_synthetic_ratings(200, 60, 4, 0.3, 21);
    let mut audited = Vec::new();
    for kind in [PolicyKind::Uniform, PolicyKind::RomeUcb] {
        let mut env =
            DepletingEnv::from_ratings(&ratings, 22, 32, 10).map_err(|e| e.to_string())?;
        let mut policy = Policy::new(
            PolicyConfig::new(kind).with_seed(23),
            env.n_actions(),
            env.context_dim(),
        )
        .map_err(|e| e.to_string())?;
        let horizon = env.len();
        let rewards = run_loop(&mut env, &mut policy, horizon, &mut seed::rng(24))
            .map_err(|e| e.to_string())?;
        let ledger = env.reward_ledger();
        let paid: u32 = ledger.values().sum();
        let earned: u32 = rewards.iter().map(|&r| u32::from(r)).sum();
        let max = ledger.values().copied().max().unwrap_or(0);
        if max > 1 || paid != earned || env.interaction_log().len() != rewards.len() {
            return Err(format!(
                "{kind}: max per-pair reward {max}, ledger {paid} vs rewards {earned}"
            ));
        }
        audited.push(format!(
            "{kind}: {} steps, {} pairs, {paid} rewards",
            rewards.len(),
            ledger.len()
        ));
    }
    check(
        true,
        format!("no pair paid more than once ({})", audited.join("; ")),
    )
}

fn run_cli(out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_rome"))
        .args(["run", "--seed", "17", "--jobs", "1", "--out"])
        .arg(out)
        .args([
            "--override",
            "experiment.horizon=400",
            "--override",
            "experiment.replications=2",
            "--override",
            "env.rows=400",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&status.stderr).into_owned())
    }
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).expect("readable output dir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv") {
                let rel = path
                    .strip_prefix(dir)
                    .expect("nested")
                    .display()
                    .to_string();
                out.push((rel, fs::read(&path).expect("readable file")));
            }
        }
    }
    out.sort();
    out
}

fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_cli(&a)?;
    run_cli(&b)?;
    let (fa, fb) = (files(&a), files(&b));
    check(
        !fa.is_empty() && fa == fb,
        format!("{} CSV files compared", fa.len()),
    )
}

fn main() {
    type Check = (&'static str, fn() -> Outcome);
    let checks: [Check; 8] = [
        ("uniform_random_anchor", uniform_anchor),
        ("residual_overfit_decomposition", proposition),
        ("beta_moment_matching", beta_exactness),
        ("information_gain_properties", info_gain),
        ("clustered_toy_uncertainty", clustered_toy),
        ("policy_ordering", policy_ordering),
        ("depleting_ledger", depleting_ledger),
        ("cli_determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (name, run) in checks {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
