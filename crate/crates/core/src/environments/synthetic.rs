//! Synthetic regression toys and download-free bandit datasets.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::ClassificationData;
use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub enum TrueFunction {
    /// `sin(3x)`.
    Sin3x,
    Linear {
        intercept: f64,
        slope: f64,
    },
    Constant(f64),
}

impl TrueFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TrueFunction::Sin3x => (3.0 * x).sin(),
            TrueFunction::Linear { intercept, slope } => intercept + slope * x,
            TrueFunction::Constant(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Noise {
    /// Same standard deviation everywhere.
    Constant(f64),
    /// One standard deviation per design site.
    PerSite(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    /// Fixed input sites, each observed `n_per_site` times.
    Sites(Vec<f64>),
    /// `n` inputs drawn uniformly from `[lo, hi]`, each observed `n_per_site` times.
    Uniform { lo: f64, hi: f64, n: usize },
}

/// Noisy observations `y = h(x) + ε` of a one-dimensional function.
///
/// Rows carry the polynomial basis `[x, x², …, x^degree]` so that linear
/// models can fit curved `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub function: TrueFunction,
    pub noise: Noise,
    pub design: Design,
    pub n_per_site: usize,
    pub degree: usize,
}

impl SyntheticSpec {
    /// 20 inputs uniform on [-1, 1] around `sin(3x)` with noise 0.25.
    pub fn fig1() -> Self {
        Self {
            function: TrueFunction::Sin3x,
            noise: Noise::Constant(0.25),
            design: Design::Uniform {
                lo: -1.0,
                hi: 1.0,
                n: 20,
            },
            n_per_site: 1,
            degree: 4,
        }
    }

    /// 100 observations at each of x ∈ {-1, -½, 0, ½, 1}.
    pub fn fig2() -> Self {
        Self {
            function: TrueFunction::Sin3x,
            noise: Noise::Constant(0.25),
            design: Design::Sites(vec![-1.0, -0.5, 0.0, 0.5, 1.0]),
            n_per_site: 100,
            degree: 4,
        }
    }

    /// `n` evenly spaced inputs on [-1, 1] around a line, noise `sigma`.
    pub fn linear_gaussian(n: usize, sigma: f64) -> Self {
        let sites = (0..n)
            .map(|i| {
                if n == 1 {
                    0.0
                } else {
                    -1.0 + 2.0 * i as f64 / (n - 1) as f64
                }
            })
            .collect();
        Self {
            function: TrueFunction::Linear {
                intercept: 0.5,
                slope: 2.0,
            },
            noise: Noise::Constant(sigma),
            design: Design::Sites(sites),
            n_per_site: 1,
            degree: 1,
        }
    }

    pub fn h(&self, x: f64) -> f64 {
        self.function.eval(x)
    }

    pub fn features(&self, x: f64) -> Vec<f64> {
        (1..=self.degree.max(1)).map(|p| x.powi(p as i32)).collect()
    }

    /// The fixed design sites, if the design has them.
    pub fn sites(&self) -> Option<&[f64]> {
        match &self.design {
            Design::Sites(s) => Some(s),
            Design::Uniform { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sigmas: &[f64] = match &self.noise {
            Noise::Constant(s) => std::slice::from_ref(s),
            Noise::PerSite(s) => s,
        };
        if sigmas.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::invalid(
                "noise standard deviations must be finite and >= 0",
            ));
        }
        match &self.design {
            Design::Sites(s) if s.is_empty() => return Err(Error::invalid("design has no sites")),
            Design::Uniform { n: 0, .. } => return Err(Error::invalid("design has no inputs")),
            Design::Uniform { lo, hi, .. } if !(lo < hi) => {
                return Err(Error::invalid("uniform design needs lo < hi"))
            }
            _ => {}
        }
        if let (Noise::PerSite(s), design) = (&self.noise, &self.design) {
            match design {
                Design::Sites(sites) if sites.len() == s.len() => {}
                _ => {
                    return Err(Error::invalid(
                        "per-site noise needs one value per design site",
                    ))
                }
            }
        }
        if self.n_per_site == 0 {
            return Err(Error::invalid("n_per_site must be positive"));
        }
        Ok(())
    }

    fn sigma(&self, site: usize) -> f64 {
        match &self.noise {
            Noise::Constant(s) => *s,
            Noise::PerSite(s) => s[site],
        }
    }
}

/// Draws one dataset from `spec`; rows are grouped by design site.
pub fn gen_toy(spec: &SyntheticSpec, seed: u64) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = seed::rng(seed);
    let xs: Vec<f64> = match &spec.design {
        Design::Sites(s) => s.clone(),
        Design::Uniform { lo, hi, n } => (0..*n).map(|_| rng.random_range(*lo..=*hi)).collect(),
    };
    let mut ds = LabeledDataset::with_capacity(spec.degree.max(1), xs.len() * spec.n_per_site)?;
    for (site, &x) in xs.iter().enumerate() {
        let features = spec.features(x);
        let sigma = spec.sigma(site);
        for _ in 0..spec.n_per_site {
            let eps: f64 = rng.sample(StandardNormal);
            ds.push(&features, spec.h(x) + sigma * eps)?;
        }
    }
    Ok(ds)
}

/// `k` Gaussian clusters in `dim` dimensions; the label is the cluster.
///
/// Centers are standard normal vectors scaled by `separation`; each instance
/// adds unit-variance noise to its center. At separation 0 the label carries
/// no information about the features.
pub fn gen_synthetic_bandit(
    k: usize,
    dim: usize,
    n: usize,
    separation: f64,
    seed: u64,
) -> Result<ClassificationData> {
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 classes, got {k}")));
    }
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::invalid("separation must be finite and >= 0"));
    }
    let mut rng = seed::rng(seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let centers: Vec<f64> = (0..k * dim)
        .map(|_| separation * unit.sample(&mut rng))
        .collect();
    let mut features = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let label = rng.random_range(0..k);
        features.extend((0..dim).map(|j| centers[label * dim + j] + unit.sample(&mut rng)));
        labels.push(label);
    }
    ClassificationData::new(format!("synthetic_k{k}"), dim, k, features, labels)
}
