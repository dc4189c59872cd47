//! Disjoint-arm LinUCB with a ridge prior.

/// Per-arm ridge statistics, keeping `A⁻¹` current by rank-one updates.
#[derive(Debug, Clone, PartialEq)]
pub struct LinUcbArm {
    dim: usize,
    a_inv: Vec<f64>,
    b: Vec<f64>,
    theta: Vec<f64>,
}

impl LinUcbArm {
    /// `A = ridge·I`, `b = 0`.
    pub fn new(dim: usize, ridge: f64) -> Self {
        let mut a_inv = vec![0.0; dim * dim];
        for i in 0..dim {
            a_inv[i * dim + i] = 1.0 / ridge;
        }
        Self {
            dim,
            a_inv,
            b: vec![0.0; dim],
            theta: vec![0.0; dim],
        }
    }

    /// `A += x xᵀ`, `b += r x`, via Sherman–Morrison on `A⁻¹`.
    pub fn update(&mut self, x: &[f64], reward: f64) {
        let d = self.dim;
        let ax = self.a_inv_times(x);
        let denom = 1.0 + dot(x, &ax);
        for i in 0..d {
            for j in 0..d {
                self.a_inv[i * d + j] -= ax[i] * ax[j] / denom;
            }
        }
        for (bi, xi) in self.b.iter_mut().zip(x) {
            *bi += reward * xi;
        }
        self.theta = self.a_inv_times(&self.b);
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `xᵀ A⁻¹ x`.
    pub fn width(&self, x: &[f64]) -> f64 {
        dot(x, &self.a_inv_times(x)).max(0.0)
    }

    /// `θ·x + α√(xᵀA⁻¹x)`.
    pub fn score(&self, x: &[f64], alpha: f64) -> f64 {
        dot(&self.theta, x) + alpha * self.width(x).sqrt()
    }

    fn a_inv_times(&self, x: &[f64]) -> Vec<f64> {
        self.a_inv
            .chunks_exact(self.dim)
            .map(|row| dot(row, x))
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
