use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rome_core::environments::SyntheticSpec;
use rome_core::harness::{
    compare_uncertainty_maps, grid, persist_results, run_experiment, summary_csv, ExperimentConfig,
    ToyModels, Tuned, SUMMARY_FILE, SUMMARY_HEADER,
};
use rome_core::models::ModelConfig;

use crate::config::{parse_config, parse_override};
use crate::error::CliError;
use crate::{ReportArgs, RunArgs, ToyArgs, VerifyArgs};

/// Multiplier of the outer uncertainty band.
const OUTER_BAND: f64 = 2.58;
const PROBES: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
pub const REPORT_FILE: &str = "report.csv";

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn load_config(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        for (k, v) in parse_config(&text)? {
            cfg.set(k, &v)?;
        }
    }
    for o in &args.overrides {
        let (k, v) = parse_override(o)?;
        cfg.set(k, &v)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(args: RunArgs) -> Result<(), CliError> {
    let cfg = load_config(&args)?;
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be positive".into()));
    }
    if cfg.n_replications == 1 {
        eprintln!("warning: one replication, confidence intervals are reported as 0");
    }
    let results = run_experiment(&cfg, jobs)?;
    persist_results(&cfg.output_dir, &results, &cfg)?;
    print!("{}", summary_csv(&results));
    Ok(())
}

fn f(v: f64) -> String {
    format!("{v:.9}")
}

pub fn toy(args: ToyArgs) -> Result<(), CliError> {
    if args.grid_points < 2 {
        return Err(CliError::Usage("--grid-points must be at least 2".into()));
    }
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    // The sparse toy is drawn on the data range; the clustered one extends
    // past the outer sites to show behaviour away from support.
    let xs = grid(-1.0, 1.0, args.grid_points);
    let wide = grid(-1.5, 1.5, args.grid_points);
    let models = ToyModels::default();
    let sparse = compare_uncertainty_maps(&SyntheticSpec::fig1(), &models, &xs, args.seed)?;
    let clustered = compare_uncertainty_maps(&SyntheticSpec::fig2(), &models, &wide, args.seed)?;

    let mut fit = String::from("x,h,f,g\n");
    let mut bands = String::from("x,f,g,residual_overfit,outer_band\n");
    for i in 0..xs.len() {
        let m = &sparse;
        let _ = writeln!(
            fit,
            "{},{},{},{}",
            f(xs[i]),
            f(m.h[i]),
            f(m.f[i]),
            f(m.g[i])
        );
        let _ = writeln!(
            bands,
            "{},{},{},{},{}",
            f(xs[i]),
            f(m.f[i]),
            f(m.g[i]),
            f(m.residual[i]),
            f(OUTER_BAND * m.residual[i])
        );
    }
    let mut compare = String::from("x,residual_overfit,rmse_model\n");
    for i in 0..wide.len() {
        let m = &clustered;
        let _ = writeln!(
            compare,
            "{},{},{}",
            f(wide[i]),
            f(m.residual[i]),
            f(m.rmse[i])
        );
    }
    let mut samples = String::from("figure,x,y\n");
    for (name, m) in [("fit", &sparse), ("rmse_compare", &clustered)] {
        for &(x, y) in &m.samples {
            let _ = writeln!(samples, "{name},{},{}", f(x), f(y));
        }
    }
    for (name, body) in [
        ("toy_fit.csv", fit),
        ("toy_bands.csv", bands),
        ("toy_rmse_compare.csv", compare),
        ("toy_samples.csv", samples),
    ] {
        let path = args.out.join(name);
        write_file(&path, &body)?;
        println!("{}", path.display());
    }
    Ok(())
}

pub fn verify_proposition(args: VerifyArgs) -> Result<(), CliError> {
    if args.draws == 0 {
        return Err(CliError::Usage("--draws must be positive".into()));
    }
    let spec = SyntheticSpec::linear_gaussian(args.rows, args.noise);
    let tuned = match args.frozen_f {
        Some(c) => Tuned::Frozen(c),
        None => Tuned::Fit(ModelConfig::linear(args.lambda)),
    };
    let report = rome_core::harness::verify_proposition(
        &spec,
        &tuned,
        &ModelConfig::overfit_linear(),
        args.draws,
        &PROBES,
        args.seed,
    )?;
    println!("x,lhs,rhs,mse_f,var_g,rel_error");
    for p in &report.probes {
        println!(
            "{},{},{},{},{},{}",
            f(p.x),
            f(p.lhs),
            f(p.rhs),
            f(p.mse_f),
            f(p.var_g),
            f(p.rel_error)
        );
    }
    eprintln!(
        "max relative error {:.6} (threshold {})",
        report.max_rel_error, args.threshold
    );
    if report.max_rel_error > args.threshold {
        return Err(CliError::Threshold(format!(
            "max relative error {:.6} > {}",
            report.max_rel_error, args.threshold
        )));
    }
    Ok(())
}

fn find_summaries(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .map(|e| e.map(|e| e.path()).map_err(|err| CliError::io(dir, err)))
        .collect::<Result<_, _>>()?;
    paths.sort();
    for p in paths {
        if p.is_dir() {
            find_summaries(&p, out)?;
        } else if p.file_name().is_some_and(|n| n == SUMMARY_FILE) {
            out.push(p);
        }
    }
    Ok(())
}

struct Row {
    fields: Vec<String>,
    regret: f64,
}

pub fn report(args: ReportArgs) -> Result<(), CliError> {
    let mut files = Vec::new();
    find_summaries(&args.out, &mut files)?;
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "no {SUMMARY_FILE} found under {}",
            args.out.display()
        )));
    }
    let expected: Vec<&str> = SUMMARY_HEADER.split(',').collect();
    let mut rows: Vec<Row> = Vec::new();
    for path in &files {
        let bad = |msg: String| CliError::Usage(format!("{}: {msg}", path.display()));
        let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| bad(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if header != expected {
            return Err(bad(format!("unexpected header '{}'", header.join(","))));
        }
        for record in reader.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            let fields: Vec<String> = record.iter().map(str::to_string).collect();
            let regret: f64 = fields[3]
                .parse()
                .map_err(|_| bad(format!("bad mean_regret '{}'", fields[3])))?;
            rows.push(Row { fields, regret });
        }
    }
    let mut out = format!("{SUMMARY_HEADER},best\n");
    for row in &rows {
        let dataset = &row.fields[1];
        let best = rows
            .iter()
            .filter(|r| &r.fields[1] == dataset)
            .map(|r| r.regret)
            .fold(f64::INFINITY, f64::min);
        let _ = writeln!(out, "{},{}", row.fields.join(","), row.regret == best);
    }
    write_file(&args.out.join(REPORT_FILE), &out)?;
    print!("{out}");
    Ok(())
}
