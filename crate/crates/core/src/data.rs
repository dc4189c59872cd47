//! Feature vectors and labeled datasets.

use crate::error::{Error, Result};

/// A dense context vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid(
                "feature vector must have at least one value",
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite feature at index {i}")));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Rows of (features, target) stored row-major in one contiguous buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    dim: usize,
    features: Vec<f64>,
    targets: Vec<f64>,
}

impl LabeledDataset {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dataset dimension must be positive"));
        }
        Ok(Self {
            dim,
            features: Vec::new(),
            targets: Vec::new(),
        })
    }

    pub fn with_capacity(dim: usize, rows: usize) -> Result<Self> {
        let mut ds = Self::new(dim)?;
        ds.features.reserve(rows * dim);
        ds.targets.reserve(rows);
        Ok(ds)
    }

    /// Builds a dataset from `(features, target)` pairs; all rows must share one dimension.
    pub fn from_rows<I, V>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (V, f64)>,
        V: AsRef<[f64]>,
    {
        let mut iter = rows.into_iter().peekable();
        let dim = match iter.peek() {
            Some((x, _)) => x.as_ref().len(),
            None => return Err(Error::invalid("cannot infer dimension of an empty dataset")),
        };
        let mut ds = Self::new(dim)?;
        for (x, y) in iter {
            ds.push(x.as_ref(), y)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, x: &[f64], y: f64) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!(
                "row has dimension {}, dataset expects {}",
                x.len(),
                self.dim
            )));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite feature at index {i}")));
        }
        if !y.is_finite() {
            return Err(Error::invalid("non-finite target"));
        }
        self.features.extend_from_slice(x);
        self.targets.push(y);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn target(&self, i: usize) -> f64 {
        self.targets[i]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.features
            .chunks_exact(self.dim)
            .zip(self.targets.iter().copied())
    }

    /// A new dataset holding the given rows in the given order (repeats allowed).
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut out = Self {
            dim: self.dim,
            features: Vec::with_capacity(indices.len() * self.dim),
            targets: Vec::with_capacity(indices.len()),
        };
        for &i in indices {
            out.features.extend_from_slice(self.row(i));
            out.targets.push(self.targets[i]);
        }
        out
    }

    pub fn mean_target(&self) -> Option<f64> {
        if self.is_empty() {
            None
        } else {
            Some(self.targets.iter().sum::<f64>() / self.len() as f64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(FeatureVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(FeatureVector::new(vec![]).is_err());
        let mut ds = LabeledDataset::new(2).unwrap();
        assert!(ds.push(&[1.0, f64::INFINITY], 0.0).is_err());
        assert!(ds.push(&[1.0], 0.0).is_err());
        assert!(ds.push(&[1.0, 2.0], f64::NAN).is_err());
        assert!(ds.is_empty());
    }

    #[test]
    fn select_repeats_rows() {
        let ds = LabeledDataset::from_rows([(vec![1.0], 0.0), (vec![2.0], 1.0)]).unwrap();
        let s = ds.select(&[1, 1, 0]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.row(0), &[2.0]);
        assert_eq!(s.targets(), &[1.0, 1.0, 0.0]);
    }
}
