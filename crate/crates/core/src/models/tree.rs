//! CART regression trees grown on squared-error reduction.
//!
//! Candidate thresholds are midpoints between consecutive distinct feature
//! values of the samples reaching a node. The best split maximizes the
//! reduction in sum of squared errors; ties go to the lowest feature index,
//! then the lowest threshold. An impure node is split even when the best
//! reduction is zero, which lets a single tree separate XOR-like patterns.

use rand::seq::index;

use crate::data::LabeledDataset;
use crate::seed::Rng;

const LEAF: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Node {
    feature: usize,
    threshold: f64,
    left: usize,
    right: usize,
    value: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Number of features examined per split; all of them when `>= dim`.
    pub max_features: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

struct Frame {
    node: usize,
    start: usize,
    end: usize,
    depth: usize,
}

/// Column-major copy of a dataset with each feature's row order sorted
/// once, shared by every tree of an ensemble.
pub(crate) struct Presorted {
    dim: usize,
    n: usize,
    cols: Vec<f64>,
    ys: Vec<f64>,
    order: Vec<u32>,
}

impl Presorted {
    pub(crate) fn new(data: &LabeledDataset) -> Self {
        let (dim, n) = (data.dim(), data.len());
        let mut cols = vec![0.0; dim * n];
        for i in 0..n {
            for (f, &v) in data.row(i).iter().enumerate() {
                cols[f * n + i] = v;
            }
        }
        let mut order: Vec<u32> = Vec::with_capacity(dim * n);
        for f in 0..dim {
            let col = &cols[f * n..(f + 1) * n];
            let start = order.len();
            order.extend(0..n as u32);
            order[start..].sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
        }
        Self {
            dim,
            n,
            cols,
            ys: data.targets().to_vec(),
            order,
        }
    }

    fn col(&self, f: usize) -> &[f64] {
        &self.cols[f * self.n..(f + 1) * self.n]
    }
}

impl RegressionTree {
    /// Grows a tree on the rows listed in `sample` (repeats allowed).
    #[cfg(test)]
    pub(crate) fn fit(
        data: &LabeledDataset,
        sample: &[usize],
        params: TreeParams,
        rng: &mut Rng,
    ) -> Self {
        let mut weights = vec![0u32; data.len()];
        for &i in sample {
            weights[i] += 1;
        }
        Self::fit_weighted(&Presorted::new(data), &weights, params, rng)
    }

    /// Grows a tree where row `i` counts `weights[i]` times.
    ///
    /// Each node keeps its rows in every feature's sorted order; a split
    /// partitions those lists stably, so nothing is re-sorted below the root.
    pub(crate) fn fit_weighted(
        pre: &Presorted,
        weights: &[u32],
        params: TreeParams,
        rng: &mut Rng,
    ) -> Self {
        let dim = pre.dim;
        let u = weights.iter().filter(|&&w| w > 0).count();
        let mut sorted: Vec<u32> = Vec::with_capacity(dim * u);
        for f in 0..dim {
            sorted.extend(
                pre.order[f * pre.n..(f + 1) * pre.n]
                    .iter()
                    .filter(|&&i| weights[i as usize] > 0),
            );
        }
        let node = NodeData { pre, weights, u };

        let mut nodes = vec![leaf(node.mean(&sorted[..u]))];
        let mut stack = vec![Frame {
            node: 0,
            start: 0,
            end: u,
            depth: 0,
        }];
        let mut features: Vec<usize> = (0..dim).collect();
        let mut goes_left = vec![false; pre.n];
        let mut scratch: Vec<u32> = Vec::with_capacity(u);

        while let Some(frame) = stack.pop() {
            let (start, end) = (frame.start, frame.end);
            let rows = &sorted[start..end];
            if params.max_depth.is_some_and(|d| frame.depth >= d)
                || node.weight(rows) < 2 * params.min_samples_leaf as u64
                || node.is_pure(rows)
            {
                continue;
            }
            if params.max_features < dim {
                features = index::sample(rng, dim, params.max_features).into_vec();
                features.sort_unstable();
            }
            let Some(split) = best_split(
                &node,
                &sorted,
                start,
                end,
                &features,
                params.min_samples_leaf,
            ) else {
                continue;
            };

            let col = pre.col(split.feature);
            for &i in &sorted[split.feature * u + start..split.feature * u + end] {
                goes_left[i as usize] = col[i as usize] <= split.threshold;
            }
            let mut mid = 0;
            for f in 0..dim {
                mid = stable_partition(
                    &mut sorted[f * u + start..f * u + end],
                    &goes_left,
                    &mut scratch,
                );
            }
            let left_value = node.mean(&sorted[start..start + mid]);
            let right_value = node.mean(&sorted[start + mid..end]);
            let left = nodes.len();
            nodes.push(leaf(left_value));
            nodes.push(leaf(right_value));
            let n = &mut nodes[frame.node];
            n.feature = split.feature;
            n.threshold = split.threshold;
            n.left = left;
            n.right = left + 1;

            stack.push(Frame {
                node: left + 1,
                start: start + mid,
                end,
                depth: frame.depth + 1,
            });
            stack.push(Frame {
                node: left,
                start,
                end: start + mid,
                depth: frame.depth + 1,
            });
        }
        Self { nodes }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = &self.nodes[0];
        while node.feature != LEAF {
            node = if x[node.feature] <= node.threshold {
                &self.nodes[node.left]
            } else {
                &self.nodes[node.right]
            };
        }
        node.value
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            let n = &nodes[i];
            if n.feature == LEAF {
                0
            } else {
                1 + walk(nodes, n.left).max(walk(nodes, n.right))
            }
        }
        walk(&self.nodes, 0)
    }
}

fn leaf(value: f64) -> Node {
    Node {
        feature: LEAF,
        threshold: 0.0,
        left: LEAF,
        right: LEAF,
        value,
    }
}

/// The weighted rows of one tree; `u` rows have positive weight.
struct NodeData<'a> {
    pre: &'a Presorted,
    weights: &'a [u32],
    u: usize,
}

impl NodeData<'_> {
    fn weight(&self, rows: &[u32]) -> u64 {
        rows.iter()
            .map(|&i| u64::from(self.weights[i as usize]))
            .sum()
    }

    fn mean(&self, rows: &[u32]) -> f64 {
        let w = self.weight(rows);
        if w == 0 {
            return 0.0;
        }
        rows.iter()
            .map(|&i| f64::from(self.weights[i as usize]) * self.pre.ys[i as usize])
            .sum::<f64>()
            / w as f64
    }

    fn is_pure(&self, rows: &[u32]) -> bool {
        let first = self.pre.ys[rows[0] as usize];
        rows.iter().all(|&i| self.pre.ys[i as usize] == first)
    }
}

fn best_split(
    node: &NodeData<'_>,
    sorted: &[u32],
    start: usize,
    end: usize,
    features: &[usize],
    min_leaf: usize,
) -> Option<Split> {
    let (ys, weights) = (&node.pre.ys, node.weights);
    let min_leaf = min_leaf as u64;
    let (mut n, mut total, mut total_sq) = (0u64, 0.0, 0.0);
    for &i in &sorted[start..end] {
        let (w, y) = (weights[i as usize], ys[i as usize]);
        n += u64::from(w);
        total += f64::from(w) * y;
        total_sq += f64::from(w) * y * y;
    }
    let parent = total * total / n as f64;
    // Gains within this band of the incumbent are treated as ties.
    let tol = 1e-12 * (total_sq + 1.0);

    let mut best: Option<Split> = None;
    for &f in features {
        let col = node.pre.col(f);
        let order = &sorted[f * node.u + start..f * node.u + end];
        let (mut left_n, mut left_sum) = (0u64, 0.0);
        for pair in order.windows(2) {
            let (a, b) = (pair[0] as usize, pair[1] as usize);
            left_n += u64::from(weights[a]);
            left_sum += f64::from(weights[a]) * ys[a];
            if left_n < min_leaf {
                continue;
            }
            if n - left_n < min_leaf {
                break;
            }
            let (lo, hi) = (col[a], col[b]);
            if lo == hi {
                continue;
            }
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / left_n as f64
                + right_sum * right_sum / (n - left_n) as f64
                - parent;
            if best.as_ref().is_none_or(|b| gain > b.gain + tol) {
                best = Some(Split {
                    feature: f,
                    threshold: midpoint(lo, hi),
                    gain,
                });
            }
        }
    }
    best
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m >= hi {
        lo
    } else {
        m
    }
}

/// Stable partition of `positions` into those marked in `left`, then the
/// rest; returns the size of the left part.
fn stable_partition(positions: &mut [u32], left: &[bool], scratch: &mut Vec<u32>) -> usize {
    scratch.clear();
    let mut mid = 0;
    for k in 0..positions.len() {
        let p = positions[k];
        if left[p as usize] {
            positions[mid] = p;
            mid += 1;
        } else {
            scratch.push(p);
        }
    }
    positions[mid..].copy_from_slice(scratch);
    mid
}
