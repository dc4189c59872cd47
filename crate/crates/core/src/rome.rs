//! Residual-overfit scores.
//!
//! Everything here is a function of two predictions at one input: `f`, the
//! tuned model's estimate, and `g`, the overfit model's. Their absolute
//! difference is the residual overfit, a proxy for the estimation error of
//! `f`. The UCB score adds it to `f`; the Thompson score samples from the Beta
//! whose mean is `f` and whose variance is the squared residual overfit.

use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};

/// Pseudo-counts of a Beta distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    a: f64,
    b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::invalid(format!(
                "beta pseudo-counts must be positive and finite, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    pub fn variance(&self) -> f64 {
        let s = self.a + self.b;
        self.a * self.b / (s * s * (s + 1.0))
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreConfig {
    /// Weight on the uncertainty term.
    pub alpha: f64,
    /// Drop the mean from the UCB score, leaving only the uncertainty term.
    pub pure_exploration: bool,
    /// Probabilities are clamped to `[eps_prob, 1 - eps_prob]`.
    pub eps_prob: f64,
    /// Floor on the matched variance.
    pub eps_var: f64,
    /// Cap on the matched variance as a fraction of `m(1 - m)`; a Beta cannot
    /// have variance at or above that bound.
    pub max_var_fraction: f64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            pure_exploration: false,
            eps_prob: 1e-3,
            eps_var: 1e-6,
            max_var_fraction: 0.99,
        }
    }
}

impl ScoreConfig {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!(
                "alpha must be finite and >= 0, got {}",
                self.alpha
            )));
        }
        if !(self.eps_prob > 0.0 && self.eps_prob < 0.5) {
            return Err(Error::Config(format!(
                "eps_prob must lie in (0, 0.5), got {}",
                self.eps_prob
            )));
        }
        if !(self.eps_var > 0.0 && self.eps_var.is_finite()) {
            return Err(Error::Config(format!(
                "eps_var must be positive, got {}",
                self.eps_var
            )));
        }
        if !(self.max_var_fraction > 0.0 && self.max_var_fraction < 1.0) {
            return Err(Error::Config(format!(
                "max_var_fraction must lie in (0, 1), got {}",
                self.max_var_fraction
            )));
        }
        Ok(())
    }

    fn clip_prob(&self, p: f64) -> f64 {
        p.clamp(self.eps_prob, 1.0 - self.eps_prob)
    }
}

fn finite_pair(f: f64, g: f64) -> Result<()> {
    if f.is_finite() && g.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "predictions must be finite, got f={f}, g={g}"
        )))
    }
}

/// `|f - g|`.
pub fn residual_overfit(f: f64, g: f64) -> Result<f64> {
    finite_pair(f, g)?;
    Ok((f - g).abs())
}

/// `f + alpha·|f - g|`, or `alpha·|f - g|` under pure exploration.
pub fn ucb_score(f: f64, g: f64, cfg: &ScoreConfig) -> Result<f64> {
    let s = residual_overfit(f, g)?;
    let base = if cfg.pure_exploration { 0.0 } else { f };
    Ok(base + cfg.alpha * s)
}

/// Beta pseudo-counts with mean `f` and variance `(f - g)²`, after clamping.
///
/// With `m` the clamped mean and `v` the clamped variance,
/// `a = m·(m(1-m)/v - 1)` and `b = (1-m)·(m(1-m)/v - 1)`. The variance is
/// capped below `m(1-m)` so both counts stay positive and the mean stays `m`.
pub fn beta_moment_match(f: f64, g: f64, cfg: &ScoreConfig) -> Result<BetaParams> {
    finite_pair(f, g)?;
    let m = cfg.clip_prob(f);
    let bernoulli_var = m * (1.0 - m);
    let v = ((f - g) * (f - g))
        .min(cfg.max_var_fraction * bernoulli_var)
        .max(cfg.eps_var);
    let scale = bernoulli_var / v - 1.0;
    BetaParams::new(m * scale, (1.0 - m) * scale)
}

/// One draw from the moment-matched Beta.
pub fn ts_score<R: Rng + ?Sized>(f: f64, g: f64, cfg: &ScoreConfig, rng: &mut R) -> Result<f64> {
    let params = beta_moment_match(f, g, cfg)?;
    Ok(sample_beta(params, rng))
}

pub fn sample_beta<R: Rng + ?Sized>(params: BetaParams, rng: &mut R) -> f64 {
    let dist = Beta::new(params.a, params.b).expect("validated beta parameters");
    // Tiny pseudo-counts can round a draw onto the boundary.
    dist.sample(rng)
        .clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Mean plus `alpha` standard deviations of `Beta(a, b)`.
pub fn beta_ucb(params: BetaParams, alpha: f64) -> f64 {
    params.mean() + alpha * params.std_dev()
}

/// `(f - g)² / (2σ²)`; equals the squared residual overfit at `σ² = ½`.
pub fn info_gain_gaussian(f: f64, g: f64, sigma2: f64) -> Result<f64> {
    finite_pair(f, g)?;
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::invalid(format!(
            "sigma2 must be positive, got {sigma2}"
        )));
    }
    Ok((f - g) * (f - g) / (2.0 * sigma2))
}

/// `g·ln(g/f) + (1-g)·ln((1-g)/(1-f))` on clamped probabilities: the KL
/// divergence of Bernoulli(g) from Bernoulli(f).
pub fn info_gain_bernoulli(f: f64, g: f64, cfg: &ScoreConfig) -> Result<f64> {
    finite_pair(f, g)?;
    let (f, g) = (cfg.clip_prob(f), cfg.clip_prob(g));
    let kl = g * (g / f).ln() + (1.0 - g) * ((1.0 - g) / (1.0 - f)).ln();
    // Rounding can leave a tiny negative value when f ≈ g.
    Ok(kl.max(0.0))
}

/// `g·ln(g/f) + f - g` for positive rates.
pub fn info_gain_poisson(f_rate: f64, g_rate: f64) -> Result<f64> {
    finite_pair(f_rate, g_rate)?;
    if !(f_rate > 0.0 && g_rate > 0.0) {
        return Err(Error::invalid(format!(
            "poisson rates must be positive, got f={f_rate}, g={g_rate}"
        )));
    }
    Ok((g_rate * (g_rate / f_rate).ln() + f_rate - g_rate).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn cfg() -> ScoreConfig {
        ScoreConfig::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn residual_overfit_values() {
        assert_eq!(residual_overfit(0.5, 0.5).unwrap(), 0.0);
        assert!(close(residual_overfit(0.2, 0.9).unwrap(), 0.7, 1e-15));
        assert!(close(residual_overfit(0.9, 0.2).unwrap(), 0.7, 1e-15));
        assert!(residual_overfit(f64::NAN, 0.1).is_err());
    }

    #[test]
    fn ucb_values() {
        let c = cfg().with_alpha(1.0);
        assert!(close(ucb_score(0.5, 0.3, &c).unwrap(), 0.7, 1e-15));
        let pure = ScoreConfig {
            pure_exploration: true,
            ..c
        };
        assert!(close(ucb_score(0.5, 0.3, &pure).unwrap(), 0.2, 1e-15));
        assert_eq!(ucb_score(0.6, 0.6, &cfg().with_alpha(5.0)).unwrap(), 0.6);
    }

    #[test]
    fn moment_match_hand_values() {
        let p = beta_moment_match(0.5, 0.3, &cfg()).unwrap();
        assert!(close(p.a(), 2.625, 1e-12) && close(p.b(), 2.625, 1e-12));
        assert!(close(p.mean(), 0.5, 1e-12));
        assert!(close(p.variance(), 0.04, 1e-12));

        let p = beta_moment_match(0.8, 0.7, &cfg()).unwrap();
        assert!(close(p.a(), 12.0, 1e-9) && close(p.b(), 3.0, 1e-9));
        assert!(close(p.variance(), 0.01, 1e-12));
    }

    #[test]
    fn moment_match_zero_disagreement_uses_variance_floor() {
        let c = cfg();
        let p = beta_moment_match(0.5, 0.5, &c).unwrap();
        let expect = 0.5 * (0.25 / c.eps_var - 1.0);
        assert!(close(p.a(), expect, 1e-6) && close(p.b(), expect, 1e-6));
        assert!(p.a() > 0.0);
    }

    #[test]
    fn moment_match_caps_variance_instead_of_flipping() {
        // (f - g)² = 0.81 exceeds 0.5·0.5; the cap keeps the mean at f.
        let p = beta_moment_match(0.5, -0.4, &cfg()).unwrap();
        assert!(close(p.mean(), 0.5, 1e-12));
        assert!(close(p.variance(), 0.99 * 0.25, 1e-12));
        let p = beta_moment_match(1.0, 0.0, &cfg()).unwrap();
        assert!(close(p.mean(), 1.0 - 1e-3, 1e-12));
    }

    #[test]
    fn beta_ucb_values() {
        let p = beta_moment_match(0.5, 0.3, &cfg()).unwrap();
        assert!(close(beta_ucb(p, 1.0), 0.7, 1e-12));
        let p = BetaParams::new(12.0, 3.0).unwrap();
        assert!(close(beta_ucb(p, 2.0), 1.0, 1e-12));
        assert_eq!(beta_ucb(p, 0.0), p.mean());
    }

    #[test]
    fn ts_score_is_reproducible_and_in_support() {
        let c = cfg();
        let a = ts_score(0.5, 0.3, &c, &mut seed::rng(11)).unwrap();
        let b = ts_score(0.5, 0.3, &c, &mut seed::rng(11)).unwrap();
        assert_eq!(a, b);
        let mut rng = seed::rng(12);
        for _ in 0..10_000 {
            let x = ts_score(0.5, 0.3, &c, &mut rng).unwrap();
            assert!(x > 0.0 && x < 1.0);
        }
        // tiny pseudo-counts still stay inside the open interval
        let mut rng = seed::rng(13);
        for _ in 0..10_000 {
            let x = ts_score(0.5, 1.0, &c, &mut rng).unwrap();
            assert!(x > 0.0 && x < 1.0);
        }
    }

    #[test]
    fn ts_score_matches_moments() {
        let c = cfg();
        let mut rng = seed::rng(2024);
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| ts_score(0.8, 0.7, &c, &mut rng).unwrap())
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(close(mean, 0.8, 0.004), "mean {mean}");
        assert!(close(var, 0.01, 0.002), "var {var}");
    }

    #[test]
    fn information_gains() {
        let c = cfg();
        assert!(close(
            info_gain_gaussian(0.5, 0.3, 0.5).unwrap(),
            0.04,
            1e-15
        ));
        assert_eq!(info_gain_gaussian(0.2, 0.2, 3.0).unwrap(), 0.0);
        assert!(close(
            info_gain_gaussian(1.0, 0.0, 1.0).unwrap(),
            0.5,
            1e-15
        ));
        assert!(info_gain_gaussian(1.0, 0.0, 0.0).is_err());

        assert_eq!(info_gain_bernoulli(0.4, 0.4, &c).unwrap(), 0.0);
        let hand = 0.3 * 0.6f64.ln() + 0.7 * 1.4f64.ln();
        assert!(close(
            info_gain_bernoulli(0.5, 0.3, &c).unwrap(),
            hand,
            1e-12
        ));
        assert!(close(hand, 0.08228, 1e-5));
        let rev = info_gain_bernoulli(0.3, 0.5, &c).unwrap();
        let rev_hand = 0.5 * (0.5f64 / 0.3).ln() + 0.5 * (0.5f64 / 0.7).ln();
        assert!(close(rev, rev_hand, 1e-12));
        assert!(close(rev, 0.087177, 1e-6));
        assert!((rev - hand).abs() > 1e-3);

        assert_eq!(info_gain_poisson(3.0, 3.0).unwrap(), 0.0);
        assert!(close(info_gain_poisson(2.0, 1.0).unwrap(), 0.30685, 1e-5));
        assert!(close(info_gain_poisson(1.0, 2.0).unwrap(), 0.38629, 1e-5));
        assert!(info_gain_poisson(0.0, 1.0).is_err());
        assert!(info_gain_poisson(1.0, -1.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        assert!(cfg().with_alpha(-1.0).validate().is_err());
        assert!(ScoreConfig {
            eps_prob: 0.5,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(ScoreConfig {
            max_var_fraction: 1.0,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(BetaParams::new(0.0, 1.0).is_err());
    }
}
