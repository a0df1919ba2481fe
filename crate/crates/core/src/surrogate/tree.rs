//! Multi-output CART regression tree.

use ndarray::ArrayView2;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        value: Vec<f64>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

/// Binary regression tree. Splits minimize the summed within-node squared
/// error over all targets; candidate thresholds are midpoints between
/// consecutive distinct feature values. Ties keep the lowest feature index and
/// then the lowest threshold.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RegressionTree {
    nodes: Vec<Node>,
}

/// Mean that is exact for constant input.
pub(crate) fn stable_mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut first = None;
    let mut acc = 0.0;
    let mut count = 0usize;
    for v in values {
        let r = *first.get_or_insert(v);
        acc += v - r;
        count += 1;
    }
    match first {
        Some(r) => r + acc / count as f64,
        None => f64::NAN,
    }
}

struct Frame {
    samples: Vec<usize>,
    depth: usize,
    slot: usize,
}

impl RegressionTree {
    /// Fits on the rows listed in `samples` (repeats allowed).
    pub fn fit(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, samples: Vec<usize>, params: TreeParams) -> Self {
        let mut tree = RegressionTree { nodes: Vec::new() };
        tree.nodes.push(Node::Leaf { value: Vec::new() });
        let mut stack = vec![Frame {
            samples,
            depth: 0,
            slot: 0,
        }];
        let min_leaf = params.min_samples_leaf.max(1);
        while let Some(frame) = stack.pop() {
            let value = leaf_value(y, &frame.samples);
            let can_split = frame.samples.len() >= 2 * min_leaf
                && params.max_depth.is_none_or(|d| frame.depth < d)
                && !is_pure(y, &frame.samples);
            let split = if can_split {
                best_split(x, y, &frame.samples, min_leaf)
            } else {
                None
            };
            match split {
                Some((feature, threshold)) => {
                    let (l, r): (Vec<usize>, Vec<usize>) = frame
                        .samples
                        .iter()
                        .partition(|&&i| x[[i, feature]] <= threshold);
                    let left = tree.nodes.len();
                    tree.nodes.push(Node::Leaf { value: Vec::new() });
                    let right = tree.nodes.len();
                    tree.nodes.push(Node::Leaf { value: Vec::new() });
                    tree.nodes[frame.slot] = Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    };
                    stack.push(Frame {
                        samples: r,
                        depth: frame.depth + 1,
                        slot: right,
                    });
                    stack.push(Frame {
                        samples: l,
                        depth: frame.depth + 1,
                        slot: left,
                    });
                }
                None => tree.nodes[frame.slot] = Node::Leaf { value },
            }
        }
        tree
    }

    pub fn predict_row(&self, x: &[f64]) -> &[f64] {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => idx = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    #[cfg(test)]
    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

fn leaf_value(y: ArrayView2<'_, f64>, samples: &[usize]) -> Vec<f64> {
    (0..y.ncols())
        .map(|t| stable_mean(samples.iter().map(|&i| y[[i, t]])))
        .collect()
}

fn is_pure(y: ArrayView2<'_, f64>, samples: &[usize]) -> bool {
    let first = samples[0];
    samples
        .iter()
        .all(|&i| (0..y.ncols()).all(|t| y[[i, t]] == y[[first, t]]))
}

/// Maximizes `sum_t (S_L,t^2 / n_L + S_R,t^2 / n_R)`, which is equivalent to
/// minimizing the children's summed squared error.
fn best_split(
    x: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    samples: &[usize],
    min_leaf: usize,
) -> Option<(usize, f64)> {
    let n = samples.len();
    let p = y.ncols();
    let total: Vec<f64> = (0..p)
        .map(|t| samples.iter().map(|&i| y[[i, t]]).sum())
        .collect();
    let parent_score: f64 = total.iter().map(|s| s * s / n as f64).sum();
    let mut best_score = parent_score + 1e-12 * parent_score.abs().max(1e-12);
    let mut best: Option<(usize, f64)> = None;

    let mut order = samples.to_vec();
    let mut left = vec![0.0; p];
    for feature in 0..x.ncols() {
        order.sort_by(|&a, &b| x[[a, feature]].total_cmp(&x[[b, feature]]));
        left.iter_mut().for_each(|v| *v = 0.0);
        for pos in 0..n - 1 {
            let i = order[pos];
            for (t, l) in left.iter_mut().enumerate() {
                *l += y[[i, t]];
            }
            let n_left = pos + 1;
            let n_right = n - n_left;
            if n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let here = x[[i, feature]];
            let next = x[[order[pos + 1], feature]];
            if here >= next {
                continue;
            }
            let score: f64 = left
                .iter()
                .zip(&total)
                .map(|(l, s)| {
                    let r = s - l;
                    l * l / n_left as f64 + r * r / n_right as f64
                })
                .sum();
            if score > best_score {
                best_score = score;
                let mid = 0.5 * (here + next);
                let threshold = if mid < next { mid } else { here };
                best = Some((feature, threshold));
            }
        }
    }
    best
}
