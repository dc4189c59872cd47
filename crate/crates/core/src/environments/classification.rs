use std::sync::Arc;

use rand::seq::SliceRandom;

use super::{Environment, Step};
use crate::error::{Error, Result};
use crate::seed;

/// A labeled classification dataset, shared read-only across replications.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationData {
    pub name: String,
    dim: usize,
    n_classes: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
}

impl ClassificationData {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        n_classes: usize,
        features: Vec<f64>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("feature dimension must be positive"));
        }
        if n_classes < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 classes, got {n_classes}"
            )));
        }
        if features.len() != dim * labels.len() {
            return Err(Error::invalid(format!(
                "{} feature values do not fill {} rows of dimension {dim}",
                features.len(),
                labels.len()
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::invalid(format!(
                "label {l} out of range for {n_classes} classes"
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite feature value"));
        }
        Ok(Self {
            name: name.into(),
            dim,
            n_classes,
            features,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

/// Classification data replayed as a bandit: the context is an instance's
/// features, the actions are the classes, and the reward is 1 exactly when
/// the chosen action is the true class.
#[derive(Debug, Clone)]
pub struct ClassificationEnv {
    data: Arc<ClassificationData>,
    order: Vec<usize>,
    passes: usize,
    cursor: usize,
    pending: Option<usize>,
}

impl ClassificationEnv {
    /// Visits the instances in a seeded random order, keeping the first
    /// `row_cap` of the permutation when a cap is given, for `passes` passes.
    pub fn new(
        data: Arc<ClassificationData>,
        seed: u64,
        row_cap: Option<usize>,
        passes: usize,
    ) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::invalid("classification environment needs instances"));
        }
        if passes == 0 {
            return Err(Error::invalid("passes must be positive"));
        }
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(&mut seed::rng(seed));
        if let Some(cap) = row_cap {
            order.truncate(cap.max(1));
        }
        Ok(Self {
            data,
            order,
            passes,
            cursor: 0,
            pending: None,
        })
    }

    pub fn data(&self) -> &ClassificationData {
        &self.data
    }

    /// Instance indices in visiting order for one pass.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn steps_per_pass(&self) -> usize {
        self.order.len()
    }
}

impl Environment for ClassificationEnv {
    fn n_actions(&self) -> usize {
        self.data.n_classes
    }

    fn context_dim(&self) -> usize {
        self.data.dim
    }

    fn len(&self) -> usize {
        self.order.len() * self.passes
    }

    fn next_step(&mut self) -> Result<Option<Step>> {
        if self.pending.is_some() {
            return Err(Error::Protocol(
                "previous step has not been answered".into(),
            ));
        }
        if self.cursor >= self.len() {
            return Ok(None);
        }
        let instance = self.order[self.cursor % self.order.len()];
        self.cursor += 1;
        self.pending = Some(instance);
        Ok(Some(Step {
            context: self.data.row(instance).to_vec(),
            eligible: (0..self.data.n_classes).collect(),
        }))
    }

    fn reward(&mut self, action: usize) -> Result<u8> {
        let instance = self
            .pending
            .take()
            .ok_or_else(|| Error::Protocol("no pending step to reward".into()))?;
        if action >= self.data.n_classes {
            return Err(Error::invalid(format!("action {action} out of range")));
        }
        Ok(u8::from(self.data.label(instance) == action))
    }

    fn optimal_action(&self) -> Option<usize> {
        self.pending.map(|i| self.data.label(i))
    }
}
