use nalgebra::{DMatrix, DVector};
use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, invalid_data, Error, Result};

/// Jitter is multiplied by 10 after each failed factorization up to this value.
pub const MAX_JITTER: f64 = 1e-4;

/// Length-scale of the squared-exponential kernel: fixed, or chosen by
/// maximizing the log marginal likelihood over a log-spaced grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LengthScale {
    Fixed(f64),
    Grid { low: f64, high: f64, count: usize },
}

impl LengthScale {
    pub fn candidates(&self) -> Result<Vec<f64>> {
        match *self {
            LengthScale::Fixed(l) if l.is_finite() && l > 0.0 => Ok(vec![l]),
            LengthScale::Grid { low, high, count }
                if low > 0.0 && high >= low && high.is_finite() && count >= 1 =>
            {
                if count == 1 {
                    return Ok(vec![low]);
                }
                let (a, b) = (low.ln(), high.ln());
                Ok((0..count)
                    .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                    .collect())
            }
            _ => Err(invalid_arg(format!("invalid length scale {self:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpConfig {
    pub length_scale: LengthScale,
    pub signal_variance: f64,
    pub noise_jitter: f64,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            length_scale: LengthScale::Grid {
                low: 1e-2,
                high: 1e1,
                count: 25,
            },
            signal_variance: 1.0,
            noise_jitter: 1e-8,
        }
    }
}

/// Fitted state of one target.
#[derive(Debug, Clone, PartialEq)]
pub struct GpTarget {
    pub length_scale: f64,
    pub jitter: f64,
    pub log_marginal_likelihood: f64,
    alpha: DVector<f64>,
}

/// Independent zero-mean GPs with squared-exponential kernels, one per target,
/// predictions stacked in target order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProcess {
    x_train: Array2<f64>,
    signal_variance: f64,
    targets: Vec<GpTarget>,
}

fn squared_distances(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), b.nrows(), |i, j| {
        a.row(i)
            .iter()
            .zip(b.row(j).iter())
            .map(|(u, v)| (u - v) * (u - v))
            .sum()
    })
}

fn kernel(sq: &DMatrix<f64>, variance: f64, length_scale: f64) -> DMatrix<f64> {
    let inv = 1.0 / (2.0 * length_scale * length_scale);
    sq.map(|r2| variance * (-r2 * inv).exp())
}

fn fit_target(
    sq: &DMatrix<f64>,
    y: &DVector<f64>,
    cfg: &GpConfig,
    length_scale: f64,
) -> Option<GpTarget> {
    let n = y.len();
    let base = kernel(sq, cfg.signal_variance, length_scale);
    let mut jitter = cfg.noise_jitter;
    loop {
        let mut k = base.clone();
        for i in 0..n {
            k[(i, i)] += jitter;
        }
        if let Some(chol) = k.cholesky() {
            let alpha = chol.solve(y);
            let log_det: f64 = chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>() * 2.0;
            let lml = -0.5 * y.dot(&alpha)
                - 0.5 * log_det
                - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
            if lml.is_finite() && alpha.iter().all(|a| a.is_finite()) {
                return Some(GpTarget {
                    length_scale,
                    jitter,
                    log_marginal_likelihood: lml,
                    alpha,
                });
            }
        }
        jitter *= 10.0;
        if jitter > MAX_JITTER * (1.0 + 1e-9) {
            return None;
        }
    }
}

impl GaussianProcess {
    pub fn fit(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, cfg: &GpConfig) -> Result<Self> {
        let n = x.nrows();
        if n < 2 {
            return Err(invalid_data(format!("GP needs at least 2 samples, got {n}")));
        }
        if y.nrows() != n || y.ncols() == 0 {
            return Err(invalid_arg("Y must have one row per sample and at least one column"));
        }
        if !(cfg.signal_variance > 0.0 && cfg.noise_jitter > 0.0) {
            return Err(invalid_arg("signal_variance and noise_jitter must be positive"));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(invalid_data("training data contains non-finite values"));
        }
        let candidates = cfg.length_scale.candidates()?;
        let sq = squared_distances(x, x);
        let mut targets = Vec::with_capacity(y.ncols());
        for (t, col) in y.columns().into_iter().enumerate() {
            let yt = DVector::from_iterator(n, col.iter().copied());
            let best = candidates
                .iter()
                .filter_map(|&l| fit_target(&sq, &yt, cfg, l))
                .fold(None::<GpTarget>, |best, cand| match best {
                    Some(b) if b.log_marginal_likelihood >= cand.log_marginal_likelihood => Some(b),
                    _ => Some(cand),
                });
            let best = best.ok_or_else(|| {
                Error::NumericalFailure(format!(
                    "kernel matrix for target {t} is not positive definite even with jitter {MAX_JITTER}"
                ))
            })?;
            targets.push(best);
        }
        Ok(Self {
            x_train: x.to_owned(),
            signal_variance: cfg.signal_variance,
            targets,
        })
    }

    pub fn n_features(&self) -> usize {
        self.x_train.ncols()
    }

    pub fn n_outputs(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &[GpTarget] {
        &self.targets
    }

    /// Predictive means.
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let sq = squared_distances(x, self.x_train.view());
        let mut out = Array2::zeros((x.nrows(), self.targets.len()));
        for (t, target) in self.targets.iter().enumerate() {
            let k_star = kernel(&sq, self.signal_variance, target.length_scale);
            let mean = k_star * &target.alpha;
            for i in 0..x.nrows() {
                out[[i, t]] = mean[i];
            }
        }
        out
    }
}
