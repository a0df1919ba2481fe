use ndarray::{Array2, ArrayView2};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{stable_mean, RegressionTree, TreeParams};
use crate::error::{invalid_arg, invalid_data, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_estimators: usize,
    /// `None` grows trees until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_estimators: 100,
            max_depth: None,
            min_samples_leaf: 1,
            bootstrap: true,
            seed: 0,
        }
    }
}

/// Bagged ensemble of multi-output regression trees. Tree `t` draws its
/// bootstrap sample from stream `t` of the configured seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<RegressionTree>,
    n_features: usize,
    n_outputs: usize,
}

impl RandomForest {
    pub fn fit(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, cfg: &ForestConfig) -> Result<Self> {
        let n = x.nrows();
        if n < 2 {
            return Err(invalid_data(format!("forest needs at least 2 samples, got {n}")));
        }
        if y.nrows() != n {
            return Err(invalid_arg(format!("X has {n} rows, Y has {}", y.nrows())));
        }
        if y.ncols() == 0 {
            return Err(invalid_arg("Y needs at least one column"));
        }
        if cfg.n_estimators == 0 || cfg.min_samples_leaf == 0 {
            return Err(invalid_arg("n_estimators and min_samples_leaf must be positive"));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(invalid_data("training data contains non-finite values"));
        }
        let params = TreeParams {
            max_depth: cfg.max_depth,
            min_samples_leaf: cfg.min_samples_leaf,
        };
        let trees = (0..cfg.n_estimators)
            .into_par_iter()
            .map(|t| {
                let samples = if cfg.bootstrap {
                    let mut rng = rng::stream(cfg.seed, t as u64);
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                RegressionTree::fit(x, y, samples, params)
            })
            .collect();
        Ok(Self {
            trees,
            n_features: x.ncols(),
            n_outputs: y.ncols(),
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Mean of the tree predictions.
    pub fn predict_row(&self, x: &[f64]) -> Vec<f64> {
        let leaves: Vec<&[f64]> = self.trees.iter().map(|t| t.predict_row(x)).collect();
        (0..self.n_outputs)
            .map(|j| stable_mean(leaves.iter().map(|l| l[j])))
            .collect()
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = Array2::zeros((x.nrows(), self.n_outputs));
        for (i, row) in x.rows().into_iter().enumerate() {
            let pred = self.predict_row(&row.to_vec());
            out.row_mut(i).assign(&ndarray::ArrayView1::from(&pred));
        }
        out
    }
}
