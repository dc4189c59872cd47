//! Monte-Carlo check of the residual-overfit decomposition and the
//! uncertainty profiles of the one-dimensional toy.

use crate::data::LabeledDataset;
use crate::environments::{gen_toy, SyntheticSpec};
use crate::error::{Error, Result};
use crate::models::{fit, fit_pair, FittedModel, ModelConfig, SplitMode};
use crate::rome::residual_overfit;
use crate::seed;

/// How `f` is obtained in each draw.
#[derive(Debug, Clone, PartialEq)]
pub enum Tuned {
    Fit(ModelConfig),
    /// `f(x) = c` regardless of the data.
    Frozen(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResult {
    pub x: f64,
    /// Mean over draws of `(f(x) - g(x))²`.
    pub lhs: f64,
    /// Mean over draws of `(f(x) - h(x))²` plus the variance of `g(x)`.
    pub rhs: f64,
    pub mse_f: f64,
    pub var_g: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropositionReport {
    pub probes: Vec<ProbeResult>,
    pub max_rel_error: f64,
}

/// Redraws the dataset `n_draws` times, fits `f` and `g` on disjoint halves
/// each time, and compares both sides of
/// `E[(f - g)²] = E[(f - h)²] + Var[g]` at every probe.
pub fn verify_proposition(
    spec: &SyntheticSpec,
    tuned: &Tuned,
    overfit: &ModelConfig,
    n_draws: usize,
    probes: &[f64],
    seed: u64,
) -> Result<PropositionReport> {
    if n_draws == 0 || probes.is_empty() {
        return Err(Error::invalid("need at least one draw and one probe"));
    }
    let inputs: Vec<Vec<f64>> = probes.iter().map(|&x| spec.features(x)).collect();
    let k = probes.len();
    let mut sum_s2 = vec![0.0; k];
    let mut sum_err2 = vec![0.0; k];
    let mut sum_g = vec![0.0; k];
    let mut sum_g2 = vec![0.0; k];
    for d in 0..n_draws {
        let draw_seed = seed::derive(seed, d as u64);
        let data = gen_toy(spec, seed::derive(draw_seed, 0))?;
        let (f, g) = match tuned {
            Tuned::Fit(cfg) => {
                let pair = fit_pair(
                    &data,
                    cfg,
                    overfit,
                    SplitMode::DisjointSplit,
                    seed::derive(draw_seed, 1),
                )?;
                (pair.f, pair.g)
            }
            Tuned::Frozen(c) => {
                let (_, g_half) = crate::models::split_disjoint(&data, seed::derive(draw_seed, 1))?;
                (
                    FittedModel::constant(data.dim(), *c),
                    fit(&g_half, overfit)?,
                )
            }
        };
        for (i, x) in inputs.iter().enumerate() {
            let fx = f.predict_raw(x)?;
            let gx = g.predict_raw(x)?;
            sum_s2[i] += residual_overfit(fx, gx)?.powi(2);
            sum_err2[i] += (fx - spec.h(probes[i])).powi(2);
            sum_g[i] += gx;
            sum_g2[i] += gx * gx;
        }
    }
    let n = n_draws as f64;
    let probes: Vec<ProbeResult> = (0..k)
        .map(|i| {
            let lhs = sum_s2[i] / n;
            let mse_f = sum_err2[i] / n;
            let mean_g = sum_g[i] / n;
            let var_g = (sum_g2[i] / n - mean_g * mean_g).max(0.0);
            let rhs = mse_f + var_g;
            ProbeResult {
                x: probes[i],
                lhs,
                rhs,
                mse_f,
                var_g,
                rel_error: (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE),
            }
        })
        .collect();
    let max_rel_error = probes.iter().map(|p| p.rel_error).fold(0.0, f64::max);
    Ok(PropositionReport {
        probes,
        max_rel_error,
    })
}

/// Tuned and overfit models used on the toy.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyModels {
    pub tuned: ModelConfig,
    pub overfit: ModelConfig,
    /// Model of the squared error of `f`.
    pub error_model: ModelConfig,
}

impl Default for ToyModels {
    fn default() -> Self {
        Self {
            tuned: ModelConfig::linear(1.0),
            overfit: ModelConfig::overfit_linear(),
            error_model: ModelConfig::linear(1.0),
        }
    }
}

/// Both uncertainty profiles of one toy draw, on `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyMaps {
    pub grid: Vec<f64>,
    pub h: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    /// `|f - g|`.
    pub residual: Vec<f64>,
    /// Square root of the predicted squared error of `f`.
    pub rmse: Vec<f64>,
    /// The toy sample as (x, y).
    pub samples: Vec<(f64, f64)>,
}

impl UncertaintyMaps {
    /// Mean of `values` over grid points selected by `keep`.
    pub fn mean_where(&self, values: &[f64], keep: impl Fn(f64) -> bool) -> Option<f64> {
        let picked: Vec<f64> = self
            .grid
            .iter()
            .zip(values)
            .filter(|(x, _)| keep(**x))
            .map(|(_, v)| *v)
            .collect();
        (!picked.is_empty()).then(|| picked.iter().sum::<f64>() / picked.len() as f64)
    }
}

/// `n` points evenly spaced on `[lo, hi]`, computed as `lo + i·step` with
/// `step = (hi - lo) / (n - 1)`.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Fits a disjoint-split pair and a squared-error model to one toy draw and
/// evaluates both on `grid`.
///
/// The error model regresses `(y - f(x))²` over every row on the same
/// features; its profile is the square root of the (non-negative part of the)
/// prediction.
pub fn compare_uncertainty_maps(
    spec: &SyntheticSpec,
    models: &ToyModels,
    grid: &[f64],
    seed: u64,
) -> Result<UncertaintyMaps> {
    let data = gen_toy(spec, seed::derive(seed, 0))?;
    let pair = fit_pair(
        &data,
        &models.tuned,
        &models.overfit,
        SplitMode::DisjointSplit,
        seed::derive(seed, 1),
    )?;
    let mut errors = LabeledDataset::with_capacity(data.dim(), data.len())?;
    for (x, y) in data.rows() {
        errors.push(x, (y - pair.f.predict_raw(x)?).powi(2))?;
    }
    let error_model = fit(&errors, &models.error_model)?;

    let mut maps = UncertaintyMaps {
        grid: grid.to_vec(),
        h: Vec::with_capacity(grid.len()),
        f: Vec::with_capacity(grid.len()),
        g: Vec::with_capacity(grid.len()),
        residual: Vec::with_capacity(grid.len()),
        rmse: Vec::with_capacity(grid.len()),
        samples: data.rows().map(|(x, y)| (x[0], y)).collect(),
    };
    for &x in grid {
        let input = spec.features(x);
        let (fx, gx) = (pair.f.predict_raw(&input)?, pair.g.predict_raw(&input)?);
        maps.h.push(spec.h(x));
        maps.f.push(fx);
        maps.g.push(gx);
        maps.residual.push(residual_overfit(fx, gx)?);
        maps.rmse
            .push(error_model.predict_raw(&input)?.max(0.0).sqrt());
    }
    Ok(maps)
}
