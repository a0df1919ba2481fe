//! Multi-target regressors used as cheap stand-ins for experiments, and the
//! hold-out and cross-validation harnesses used to compare them.

pub mod evaluation;
mod forest;
mod gp;
mod tree;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

pub use evaluation::{
    cross_validate, kfold_indices, mae, mse, train_test_evaluate, train_test_split, CvMetric,
    CvReport, CvScores, CvSummaryRow, ModelEvaluation, TargetMetrics, TrainTestReport,
    TrainTestSplit,
};
pub use forest::{ForestConfig, RandomForest};
pub use gp::{GaussianProcess, GpConfig, GpTarget, LengthScale, MAX_JITTER};

use crate::error::{invalid_arg, Result};

/// Which regressor to train, with its settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    /// One forest predicting all targets jointly.
    Forest(ForestConfig),
    /// One single-output forest per target.
    ForestPerTarget(ForestConfig),
    Gp(GpConfig),
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Forest(ForestConfig::default())
    }
}

impl ModelSpec {
    /// Human-readable model family, as used in report tables.
    pub fn display_name(&self) -> &'static str {
        match self {
            ModelSpec::Forest(_) | ModelSpec::ForestPerTarget(_) => "Random Forest",
            ModelSpec::Gp(_) => "Gaussian Process",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedSurrogate {
    Forest(RandomForest),
    ForestPerTarget(Vec<RandomForest>),
    Gp(GaussianProcess),
}

/// Joint multi-output forest.
pub fn fit_forest(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, cfg: &ForestConfig) -> Result<TrainedSurrogate> {
    Ok(TrainedSurrogate::Forest(RandomForest::fit(x, y, cfg)?))
}

/// One forest per target column.
pub fn fit_forest_per_target(
    x: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    cfg: &ForestConfig,
) -> Result<TrainedSurrogate> {
    let forests = y
        .axis_iter(Axis(1))
        .map(|col| RandomForest::fit(x, col.insert_axis(Axis(1)), cfg))
        .collect::<Result<Vec<_>>>()?;
    if forests.is_empty() {
        return Err(invalid_arg("Y needs at least one column"));
    }
    Ok(TrainedSurrogate::ForestPerTarget(forests))
}

/// Per-target GPs with stacked predictions.
pub fn fit_gp(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, cfg: &GpConfig) -> Result<TrainedSurrogate> {
    Ok(TrainedSurrogate::Gp(GaussianProcess::fit(x, y, cfg)?))
}

pub fn fit(spec: &ModelSpec, x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>) -> Result<TrainedSurrogate> {
    match spec {
        ModelSpec::Forest(cfg) => fit_forest(x, y, cfg),
        ModelSpec::ForestPerTarget(cfg) => fit_forest_per_target(x, y, cfg),
        ModelSpec::Gp(cfg) => fit_gp(x, y, cfg),
    }
}

impl TrainedSurrogate {
    pub fn input_dim(&self) -> usize {
        match self {
            TrainedSurrogate::Forest(f) => f.n_features(),
            TrainedSurrogate::ForestPerTarget(fs) => fs[0].n_features(),
            TrainedSurrogate::Gp(g) => g.n_features(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            TrainedSurrogate::Forest(f) => f.n_outputs(),
            TrainedSurrogate::ForestPerTarget(fs) => fs.len(),
            TrainedSurrogate::Gp(g) => g.n_outputs(),
        }
    }

    /// `m x p` predictions for `m x k` inputs.
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.input_dim() {
            return Err(invalid_arg(format!(
                "inputs have {} columns, model expects {}",
                x.ncols(),
                self.input_dim()
            )));
        }
        Ok(match self {
            TrainedSurrogate::Forest(f) => f.predict(x),
            TrainedSurrogate::ForestPerTarget(fs) => {
                let mut out = Array2::zeros((x.nrows(), fs.len()));
                for (t, f) in fs.iter().enumerate() {
                    out.column_mut(t).assign(&f.predict(x).column(0));
                }
                out
            }
            TrainedSurrogate::Gp(g) => g.predict(x),
        })
    }

    pub fn predict_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(invalid_arg(format!(
                "input has dimension {}, model expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        Ok(match self {
            TrainedSurrogate::Forest(f) => f.predict_row(x),
            TrainedSurrogate::ForestPerTarget(fs) => fs.iter().map(|f| f.predict_row(x)[0]).collect(),
            TrainedSurrogate::Gp(g) => {
                let view = ArrayView2::from_shape((1, x.len()), x).expect("row shape");
                g.predict(view).row(0).to_vec()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{generate_lhs, generate_synthetic_targets};
    use ndarray::{array, Array1};

    fn synthetic(n: usize, k: usize, seed: u64) -> (Array2<f64>, Array2<f64>) {
        let x = generate_lhs(n, k, seed, false).unwrap();
        let data = generate_synthetic_targets(&x, 0.0, seed).unwrap();
        (x.into_points(), data.z)
    }

    #[test]
    fn constant_targets_predict_the_constant() {
        let (x, _) = synthetic(40, 3, 1);
        let y = Array2::from_elem((40, 2), 0.1);
        let model = fit_forest(x.view(), y.view(), &ForestConfig::default()).unwrap();
        let probe = generate_lhs(25, 3, 9, false).unwrap();
        let pred = model.predict(probe.points().view()).unwrap();
        assert!(pred.iter().all(|v| *v == 0.1));
    }

    #[test]
    fn forest_is_deterministic() {
        let (x, y) = synthetic(60, 4, 2);
        let cfg = ForestConfig {
            seed: 17,
            n_estimators: 20,
            ..Default::default()
        };
        let a = fit_forest(x.view(), y.view(), &cfg).unwrap();
        let b = fit_forest(x.view(), y.view(), &cfg).unwrap();
        let probe = generate_lhs(30, 4, 3, false).unwrap();
        assert_eq!(
            a.predict(probe.points().view()).unwrap(),
            b.predict(probe.points().view()).unwrap()
        );
    }

    #[test]
    fn in_bag_error_is_below_hold_out_error() {
        let (x, y) = synthetic(150, 3, 4);
        let split = train_test_split(150, 0.3, 5).unwrap();
        let xt = x.select(Axis(0), &split.train);
        let yt = y.select(Axis(0), &split.train);
        let xv = x.select(Axis(0), &split.test);
        let yv = y.select(Axis(0), &split.test);
        let model = fit_forest(xt.view(), yt.view(), &ForestConfig::default()).unwrap();
        let train_mse = mse(model.predict(xt.view()).unwrap().view(), yt.view());
        let test_mse = mse(model.predict(xv.view()).unwrap().view(), yv.view());
        assert!(train_mse < test_mse);
    }

    #[test]
    fn stump_forest_predicts_global_mean() {
        let (x, y) = synthetic(30, 2, 6);
        let cfg = ForestConfig {
            n_estimators: 1,
            max_depth: Some(0),
            bootstrap: false,
            ..Default::default()
        };
        let model = fit_forest(x.view(), y.view(), &cfg).unwrap();
        let means: Array1<f64> = y.mean_axis(Axis(0)).unwrap();
        let pred = model.predict_row(&[0.3, 0.7]).unwrap();
        for (p, m) in pred.iter().zip(means.iter()) {
            assert!((p - m).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_and_mismatched_inputs() {
        let (x, y) = synthetic(20, 2, 7);
        let model = fit_forest(x.view(), y.view(), &ForestConfig::default()).unwrap();
        let empty = Array2::<f64>::zeros((0, 2));
        assert_eq!(model.predict(empty.view()).unwrap().dim(), (0, 2));
        assert!(model.predict(Array2::<f64>::zeros((3, 5)).view()).is_err());
        assert!(model.predict_row(&[0.1]).is_err());
        let tiny = array![[0.5, 0.5]];
        assert!(fit_forest(tiny.view(), array![[1.0]].view(), &ForestConfig::default()).is_err());
    }

    #[test]
    fn per_target_forests_stack_columns() {
        let (x, y) = synthetic(50, 3, 8);
        let cfg = ForestConfig {
            n_estimators: 10,
            ..Default::default()
        };
        let joint = fit_forest_per_target(x.view(), y.view(), &cfg).unwrap();
        assert_eq!(joint.output_dim(), 2);
        let col1 = fit_forest(x.view(), y.column(1).insert_axis(Axis(1)), &cfg).unwrap();
        let probe = [0.2, 0.4, 0.9];
        assert_eq!(joint.predict_row(&probe).unwrap()[1], col1.predict_row(&probe).unwrap()[0]);
    }

    #[test]
    fn gp_interpolates_with_small_jitter() {
        let x = array![[0.0], [0.15], [0.3], [0.55], [0.7], [1.0]];
        let y = x.mapv(|v: f64| (6.0 * v).sin() + 0.5);
        let cfg = |jitter| GpConfig {
            length_scale: LengthScale::Fixed(0.2),
            signal_variance: 1.0,
            noise_jitter: jitter,
        };
        let tight = fit_gp(x.view(), y.view(), &cfg(1e-10)).unwrap();
        let loose = fit_gp(x.view(), y.view(), &cfg(1e-2)).unwrap();
        let err = |m: &TrainedSurrogate| {
            let p = m.predict(x.view()).unwrap();
            p.iter().zip(y.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        assert!(err(&tight) < 1e-6);
        assert!(err(&tight) < err(&loose));
    }

    #[test]
    fn gp_stacks_targets_in_order() {
        let (x, y) = synthetic(30, 2, 9);
        let model = fit_gp(x.view(), y.view(), &GpConfig::default()).unwrap();
        assert_eq!(model.output_dim(), 2);
        let single = fit_gp(x.view(), y.column(1).insert_axis(Axis(1)), &GpConfig::default()).unwrap();
        let probe = [0.4, 0.6];
        let a = model.predict_row(&probe).unwrap()[1];
        let b = single.predict_row(&probe).unwrap()[0];
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn gp_fits_a_sine() {
        let plan = generate_lhs(20, 1, 3, false).unwrap();
        let x = plan.into_points();
        let f = |v: f64| (2.0 * std::f64::consts::PI * v).sin();
        let y = x.mapv(f);
        let model = fit_gp(x.view(), y.view(), &GpConfig::default()).unwrap();
        let probe = Array2::from_shape_fn((101, 1), |(i, _)| i as f64 / 100.0);
        let pred = model.predict(probe.view()).unwrap();
        let rmse = (pred
            .iter()
            .zip(probe.iter())
            .map(|(p, v)| (p - f(*v)).powi(2))
            .sum::<f64>()
            / 101.0)
            .sqrt();
        assert!(rmse < 0.1, "rmse {rmse}");
    }

    #[test]
    fn gp_reports_numerical_failure() {
        // jitter below the rounding unit of the diagonal leaves a rank-one matrix
        let x = array![[0.5], [0.5], [0.5]];
        let y = array![[0.0], [1.0], [2.0]];
        let cfg = GpConfig {
            length_scale: LengthScale::Fixed(1.0),
            signal_variance: 1e20,
            noise_jitter: 1e-12,
        };
        assert!(matches!(
            fit_gp(x.view(), y.view(), &cfg),
            Err(crate::Error::NumericalFailure(_))
        ));
    }

    #[test]
    fn model_spec_json() {
        let spec: ModelSpec = serde_json::from_str(r#"{"kind":"forest","n_estimators":5}"#).unwrap();
        assert_eq!(
            spec,
            ModelSpec::Forest(ForestConfig {
                n_estimators: 5,
                ..Default::default()
            })
        );
        let gp: ModelSpec = serde_json::from_str(r#"{"kind":"gp","length_scale":0.3}"#).unwrap();
        assert_eq!(gp.display_name(), "Gaussian Process");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn forest_predictions_stay_in_training_range(seed in any::<u64>(), n in 5usize..40) {
                let (x, y) = synthetic(n, 2, seed % 1000);
                let cfg = ForestConfig { n_estimators: 15, seed, ..Default::default() };
                let model = fit_forest(x.view(), y.view(), &cfg).unwrap();
                let probe = generate_lhs(20, 2, seed.wrapping_add(1), false).unwrap();
                let pred = model.predict(probe.points().view()).unwrap();
                for t in 0..2 {
                    let col = y.column(t);
                    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    for v in pred.column(t) {
                        prop_assert!(*v >= lo - 1e-12 && *v <= hi + 1e-12);
                    }
                }
            }
        }
    }
}
