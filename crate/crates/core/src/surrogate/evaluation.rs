//! Hold-out and k-fold evaluation of surrogate models.

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use serde::Serialize;

use super::{fit, ModelSpec};
use crate::error::{invalid_arg, Result};
use crate::rng;
use crate::spacefill::studies::mean_std;

/// Mean squared error over all entries.
pub fn mse(pred: ArrayView2<'_, f64>, actual: ArrayView2<'_, f64>) -> f64 {
    let n = pred.len() as f64;
    pred.iter().zip(actual.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n
}

/// Mean absolute error over all entries.
pub fn mae(pred: ArrayView2<'_, f64>, actual: ArrayView2<'_, f64>) -> f64 {
    let n = pred.len() as f64;
    pred.iter().zip(actual.iter()).map(|(a, b)| (a - b).abs()).sum::<f64>() / n
}

fn check_xy(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, names: &[String]) -> Result<()> {
    if x.nrows() != y.nrows() {
        return Err(invalid_arg(format!("X has {} rows, Y has {}", x.nrows(), y.nrows())));
    }
    if names.len() != y.ncols() {
        return Err(invalid_arg(format!(
            "{} target names for {} target columns",
            names.len(),
            y.ncols()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainTestSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded shuffle split. The test set has `floor(test_size * n + 0.5)` rows
/// (round half up), so 30% of 213 rows gives 64 test rows.
pub fn train_test_split(n: usize, test_size: f64, seed: u64) -> Result<TrainTestSplit> {
    if !(test_size > 0.0 && test_size < 1.0) {
        return Err(invalid_arg(format!("test_size must lie in (0, 1), got {test_size}")));
    }
    let n_test = (test_size * n as f64 + 0.5).floor() as usize;
    if n_test == 0 || n < n_test + 2 {
        return Err(invalid_arg(format!(
            "splitting {n} rows with test_size {test_size} leaves too few rows"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::seeded(seed));
    let train = idx.split_off(n_test);
    Ok(TrainTestSplit { train, test: idx })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetMetrics {
    pub target: String,
    pub mse: f64,
    pub mae: f64,
}

/// Hold-out result of one model, with predicted-vs-actual pairs for plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelEvaluation {
    pub model: String,
    pub targets: Vec<TargetMetrics>,
    #[serde(skip)]
    pub predicted: Array2<f64>,
    #[serde(skip)]
    pub actual: Array2<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainTestReport {
    pub n_train: usize,
    pub n_test: usize,
    pub models: Vec<ModelEvaluation>,
}

pub fn train_test_evaluate(
    x: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    target_names: &[String],
    test_size: f64,
    models: &[ModelSpec],
    seed: u64,
) -> Result<TrainTestReport> {
    check_xy(x, y, target_names)?;
    let split = train_test_split(x.nrows(), test_size, seed)?;
    let xt = x.select(Axis(0), &split.train);
    let yt = y.select(Axis(0), &split.train);
    let xv = x.select(Axis(0), &split.test);
    let yv = y.select(Axis(0), &split.test);
    let mut evaluations = Vec::with_capacity(models.len());
    for spec in models {
        let model = fit(spec, xt.view(), yt.view())?;
        let pred = model.predict(xv.view())?;
        let targets = target_names
            .iter()
            .enumerate()
            .map(|(t, name)| {
                let p = pred.column(t).insert_axis(Axis(1));
                let a = yv.column(t).insert_axis(Axis(1));
                TargetMetrics {
                    target: name.clone(),
                    mse: mse(p, a),
                    mae: mae(p, a),
                }
            })
            .collect();
        evaluations.push(ModelEvaluation {
            model: spec.display_name().to_string(),
            targets,
            predicted: pred,
            actual: yv.clone(),
        });
    }
    Ok(TrainTestReport {
        n_train: split.train.len(),
        n_test: split.test.len(),
        models: evaluations,
    })
}

/// Shuffled k-fold partition; the first `n % k` folds get one extra row.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(invalid_arg(format!("need at least 2 folds, got {k}")));
    }
    if n < k {
        return Err(invalid_arg(format!("{n} rows cannot fill {k} folds")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::seeded(seed));
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(idx[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CvMetric {
    #[serde(rename = "MSE")]
    Mse,
    #[serde(rename = "MAE")]
    Mae,
}

impl CvMetric {
    pub fn name(self) -> &'static str {
        match self {
            CvMetric::Mse => "MSE",
            CvMetric::Mae => "MAE",
        }
    }
}

/// Per-fold scores of one model on one target (positive errors).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvScores {
    pub target: String,
    pub model: String,
    pub mse: Vec<f64>,
    pub mae: Vec<f64>,
}

impl CvScores {
    pub fn scores(&self, metric: CvMetric) -> &[f64] {
        match metric {
            CvMetric::Mse => &self.mse,
            CvMetric::Mae => &self.mae,
        }
    }

    /// Scores with the "greater is better" sign convention (NMSE, NMAE).
    pub fn negated(&self, metric: CvMetric) -> Vec<f64> {
        self.scores(metric).iter().map(|v| -v).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvSummaryRow {
    pub target: String,
    pub model: String,
    pub metric: CvMetric,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub folds: usize,
    /// Target-major, models in the order given.
    pub scores: Vec<CvScores>,
    pub targets: Vec<String>,
    pub models: Vec<String>,
}

/// k-fold cross-validation, one single-target fit per (target, model, fold).
pub fn cross_validate(
    x: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    target_names: &[String],
    k_folds: usize,
    models: &[ModelSpec],
    seed: u64,
) -> Result<CvReport> {
    check_xy(x, y, target_names)?;
    if models.is_empty() {
        return Err(invalid_arg("need at least one model"));
    }
    let folds = kfold_indices(x.nrows(), k_folds, seed)?;
    let mut scores = Vec::new();
    for (t, name) in target_names.iter().enumerate() {
        log::info!("Cross-validating target {}/{}...", t + 1, target_names.len());
        let yt = y.column(t).insert_axis(Axis(1));
        for spec in models {
            let mut entry = CvScores {
                target: name.clone(),
                model: spec.display_name().to_string(),
                mse: Vec::with_capacity(k_folds),
                mae: Vec::with_capacity(k_folds),
            };
            for (f, test) in folds.iter().enumerate() {
                let train: Vec<usize> = folds
                    .iter()
                    .enumerate()
                    .filter(|(g, _)| *g != f)
                    .flat_map(|(_, idx)| idx.iter().copied())
                    .collect();
                let model = fit(spec, x.select(Axis(0), &train).view(), yt.select(Axis(0), &train).view())?;
                let pred = model.predict(x.select(Axis(0), test).view())?;
                let actual = yt.select(Axis(0), test);
                entry.mse.push(mse(pred.view(), actual.view()));
                entry.mae.push(mae(pred.view(), actual.view()));
            }
            scores.push(entry);
        }
    }
    Ok(CvReport {
        folds: k_folds,
        scores,
        targets: target_names.to_vec(),
        models: models.iter().map(|m| m.display_name().to_string()).collect(),
    })
}

impl CvReport {
    /// Rows ordered by target, then metric (MSE before MAE), then model.
    pub fn summary_rows(&self) -> Vec<CvSummaryRow> {
        let mut rows = Vec::new();
        for target in &self.targets {
            for metric in [CvMetric::Mse, CvMetric::Mae] {
                for s in self.scores.iter().filter(|s| &s.target == target) {
                    let v = s.scores(metric);
                    let (mean, std) = mean_std(v);
                    rows.push(CvSummaryRow {
                        target: target.clone(),
                        model: s.model.clone(),
                        metric,
                        mean,
                        std,
                        min: v.iter().copied().fold(f64::INFINITY, f64::min),
                        max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    });
                }
            }
        }
        rows
    }

    /// Pipe-delimited table with columns
    /// `Target | Model | Metric | Mean | Std | Min | Max`, numbers rounded to 4 decimals.
    pub fn to_table(&self) -> String {
        let header = ["Target", "Model", "Metric", "Mean", "Std", "Min", "Max"];
        let numeric = [false, false, false, true, true, true, true];
        let body: Vec<[String; 7]> = self
            .summary_rows()
            .into_iter()
            .map(|r| {
                [
                    r.target,
                    r.model,
                    r.metric.name().to_string(),
                    round4(r.mean),
                    round4(r.std),
                    round4(r.min),
                    round4(r.max),
                ]
            })
            .collect();
        let widths: Vec<usize> = (0..7)
            .map(|c| {
                body.iter()
                    .map(|r| r[c].chars().count())
                    .max()
                    .unwrap_or(0)
                    .max(header[c].len() + 2)
            })
            .collect();
        let cell = |text: &str, c: usize| {
            if numeric[c] {
                format!(" {:>w$} ", text, w = widths[c])
            } else {
                format!(" {:<w$} ", text, w = widths[c])
            }
        };
        let line = |cells: Vec<String>| format!("|{}|", cells.join("|"));
        let mut out = Vec::with_capacity(body.len() + 2);
        out.push(line((0..7).map(|c| cell(header[c], c)).collect()));
        out.push(line(
            (0..7)
                .map(|c| {
                    let dashes = "-".repeat(widths[c] + 1);
                    if numeric[c] {
                        format!("{dashes}:")
                    } else {
                        format!(":{dashes}")
                    }
                })
                .collect(),
        ));
        for r in &body {
            out.push(line((0..7).map(|c| cell(&r[c], c)).collect()));
        }
        out.join("\n")
    }

    /// Console summary of the mean negated scores per target, two decimals.
    pub fn mean_scores_text(&self) -> String {
        let fmt = |metric: CvMetric| {
            let model = &self.models[0];
            let means: Vec<String> = self
                .targets
                .iter()
                .filter_map(|t| self.scores.iter().find(|s| &s.target == t && &s.model == model))
                .map(|s| {
                    let (m, _) = mean_std(&s.negated(metric));
                    format!("'{m:.2}'")
                })
                .collect();
            format!("  N{}: [{}]", metric.name(), means.join(", "))
        };
        format!("CV Scores Mean:\n{}\n{}", fmt(CvMetric::Mse), fmt(CvMetric::Mae))
    }
}

fn round4(v: f64) -> String {
    let r = (v * 1e4).round() / 1e4;
    // avoid "-0"
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::{ForestConfig, GpConfig};
    use ndarray::array;

    fn toy_report() -> CvReport {
        CvReport {
            folds: 2,
            targets: vec!["z8".into(), "z1".into()],
            models: vec!["Random Forest".into(), "Gaussian Process".into()],
            scores: vec![
                CvScores {
                    target: "z8".into(),
                    model: "Random Forest".into(),
                    mse: vec![0.0002, 0.0152],
                    mae: vec![0.01, 0.03],
                },
                CvScores {
                    target: "z8".into(),
                    model: "Gaussian Process".into(),
                    mse: vec![0.001, 0.001],
                    mae: vec![0.02, 0.02],
                },
                CvScores {
                    target: "z1".into(),
                    model: "Random Forest".into(),
                    mse: vec![0.00001, 0.00002],
                    mae: vec![0.1, 0.2],
                },
                CvScores {
                    target: "z1".into(),
                    model: "Gaussian Process".into(),
                    mse: vec![0.5, 0.7],
                    mae: vec![0.3, 0.4],
                },
            ],
        }
    }

    #[test]
    fn split_sizes_round_half_up() {
        let s = train_test_split(213, 0.3, 1).unwrap();
        assert_eq!(s.test.len(), 64);
        assert_eq!(s.train.len(), 149);
        let s = train_test_split(10, 0.25, 1).unwrap();
        assert_eq!(s.test.len(), 3);
        assert!(train_test_split(3, 0.5, 1).is_err());
        assert!(train_test_split(10, 1.0, 1).is_err());
    }

    #[test]
    fn folds_partition_rows() {
        let folds = kfold_indices(23, 10, 4).unwrap();
        assert_eq!(folds.len(), 10);
        assert_eq!(folds[0].len(), 3);
        assert_eq!(folds[9].len(), 2);
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        assert!(kfold_indices(5, 10, 0).is_err());
        assert!(kfold_indices(5, 1, 0).is_err());
    }

    #[test]
    fn perfect_predictions_have_zero_error() {
        let y = array![[0.1, 0.2], [0.3, 0.4]];
        assert_eq!(mse(y.view(), y.view()), 0.0);
        assert_eq!(mae(y.view(), y.view()), 0.0);
    }

    #[test]
    fn metrics_ignore_row_order() {
        let p = array![[0.1], [0.5], [0.9]];
        let a = array![[0.2], [0.4], [1.0]];
        let order = [2, 0, 1];
        let ps = p.select(Axis(0), &order);
        let as_ = a.select(Axis(0), &order);
        assert!((mse(p.view(), a.view()) - mse(ps.view(), as_.view())).abs() < 1e-15);
        assert!((mae(p.view(), a.view()) - mae(ps.view(), as_.view())).abs() < 1e-15);
    }

    #[test]
    fn table_layout_matches_reference() {
        let table = toy_report().to_table();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(
            lines[0],
            "| Target   | Model            | Metric   |   Mean |    Std |    Min |    Max |"
        );
        assert_eq!(
            lines[1],
            "|:---------|:-----------------|:---------|-------:|-------:|-------:|-------:|"
        );
        assert_eq!(
            lines[2],
            "| z8       | Random Forest    | MSE      | 0.0077 | 0.0075 | 0.0002 | 0.0152 |"
        );
        assert_eq!(
            lines[3],
            "| z8       | Gaussian Process | MSE      |  0.001 |      0 |  0.001 |  0.001 |"
        );
        assert!(lines[4].contains("| MAE "));
        assert_eq!(lines.len(), 2 + 2 * 2 * 2);
        assert!(lines[6].starts_with("| z1       | Random Forest    | MSE      |      0 |"));
    }

    #[test]
    fn negated_scores_mirror_positive_ones() {
        let report = toy_report();
        for s in &report.scores {
            let (m, _) = mean_std(&s.mse);
            let (nm, _) = mean_std(&s.negated(CvMetric::Mse));
            assert_eq!(m, -nm);
        }
        let text = report.mean_scores_text();
        assert!(text.starts_with("CV Scores Mean:\n  NMSE: ['-0.01', '-0.00']"));
    }

    #[test]
    fn cross_validation_shape() {
        let x = crate::designs::generate_lhs(40, 2, 1, false).unwrap();
        let data = crate::designs::generate_synthetic_targets(&x, 0.0, 1).unwrap();
        let models = [
            ModelSpec::Forest(ForestConfig {
                n_estimators: 10,
                ..Default::default()
            }),
            ModelSpec::Gp(GpConfig::default()),
        ];
        let report =
            cross_validate(x.points().view(), data.z.view(), &data.target_names, 5, &models, 3).unwrap();
        assert_eq!(report.summary_rows().len(), 2 * 2 * 2);
        assert!(report.scores.iter().all(|s| s.mse.len() == 5 && s.mse.iter().all(|v| *v >= 0.0)));

        let tt = train_test_evaluate(x.points().view(), data.z.view(), &data.target_names, 0.3, &models, 3)
            .unwrap();
        assert_eq!(tt.n_test, 12);
        assert_eq!(tt.models[1].model, "Gaussian Process");
        assert_eq!(tt.models[0].predicted.dim(), (12, 2));
    }
}
