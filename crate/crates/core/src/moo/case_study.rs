//! End-to-end infill search on a data set: fit the simulators, optimize the
//! desirability without and with the MM objective, and render the plots.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use ndarray::{ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::{
    mm_desirability_bounds, optimize, pareto_front, InfillSuggestion, MmContext, ObjectiveAssembly,
    ObjectiveModel, Orientation,
};
use crate::designs::{Bounds, SamplingPlan};
use crate::desirability::{DesirabilitySpec, OverallDesirability};
use crate::diagnostics::{
    ip_boxplots, ip_histograms, scatter_plot, updated_design_scatter, Marker, MarkerRole, ScatterSeries,
    SeriesStyle,
};
use crate::error::{Error, Result};
use crate::surrogate::{fit, ForestConfig, ModelSpec};

/// Desirability of the MM improvement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MmSettings {
    /// Run the second search with the MM objective.
    pub enabled: bool,
    pub lo_frac: f64,
    pub hi_frac: f64,
    pub q: f64,
    pub p: f64,
    pub scale: f64,
}

impl Default for MmSettings {
    fn default() -> Self {
        Self {
            enabled: true,
            lo_frac: 0.001,
            hi_frac: 0.025,
            q: 2.0,
            p: 2.0,
            scale: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    pub budget: usize,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            budget: 1000,
            seed: 0,
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseStudyConfig {
    /// Two target columns to optimize.
    pub objectives: Vec<String>,
    /// One spec per objective; empty means maximize on `[0, 1.1]` with scale 5.
    pub desirability: Vec<DesirabilitySpec>,
    pub mm: MmSettings,
    pub surrogate: ModelSpec,
    pub optimizer: OptimizerSettings,
    /// Features shown in the updated-design scatter.
    pub feature_pair: (usize, usize),
    pub bins: usize,
}

impl Default for CaseStudyConfig {
    fn default() -> Self {
        Self {
            objectives: vec!["z1".into(), "z2".into()],
            desirability: Vec::new(),
            mm: MmSettings::default(),
            surrogate: ModelSpec::ForestPerTarget(ForestConfig::default()),
            optimizer: OptimizerSettings::default(),
            feature_pair: (0, 1),
            bins: 20,
        }
    }
}

impl CaseStudyConfig {
    pub fn desirability_specs(&self) -> Result<Vec<DesirabilitySpec>> {
        if self.desirability.is_empty() {
            return Ok(vec![DesirabilitySpec::maximize(0.0, 1.1, 5.0)?; self.objectives.len()]);
        }
        if self.desirability.len() != self.objectives.len() {
            return Err(Error::Config(format!(
                "{} desirability specs for {} objectives",
                self.desirability.len(),
                self.objectives.len()
            )));
        }
        Ok(self.desirability.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseStudyResult {
    pub without_mm: InfillSuggestion,
    pub with_mm: Option<InfillSuggestion>,
    /// Intensive criterion of the existing design (MM runs only).
    pub phi_base: Option<f64>,
    /// MM improvement of the point suggested without the MM objective.
    pub without_mm_improvement: Option<f64>,
    pub artifacts: Vec<PathBuf>,
}

fn orientation(spec: &DesirabilitySpec) -> Orientation {
    match spec {
        DesirabilitySpec::Minimize { .. } => Orientation::Minimize,
        _ => Orientation::Maximize,
    }
}

/// Runs the two searches with identical surrogates and seeds. With
/// `out_dir`, writes `<prefix>_without-mm.json`, `<prefix>_with-mm.json` and
/// the plots `<prefix>_<figure>.svg` with their CSVs.
pub fn run_case_study(
    plan: &SamplingPlan,
    targets: ArrayView2<'_, f64>,
    target_names: &[String],
    config: &CaseStudyConfig,
    out_dir: Option<&Path>,
    prefix: &str,
) -> Result<CaseStudyResult> {
    if config.objectives.len() != 2 {
        return Err(Error::Config(format!(
            "need exactly two objectives, got {}",
            config.objectives.len()
        )));
    }
    if targets.nrows() != plan.n() || targets.ncols() != target_names.len() {
        return Err(Error::InvalidData(format!(
            "targets are {}x{} but the design has {} rows and {} target names",
            targets.nrows(),
            targets.ncols(),
            plan.n(),
            target_names.len()
        )));
    }
    let columns = config
        .objectives
        .iter()
        .map(|name| {
            target_names
                .iter()
                .position(|t| t == name)
                .ok_or_else(|| Error::Config(format!("unknown target column {name:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let y = targets.select(Axis(1), &columns);
    let specs = config.desirability_specs()?;
    let orient: Vec<Orientation> = specs.iter().map(orientation).collect();
    let model: Arc<dyn ObjectiveModel> = Arc::new(fit(&config.surrogate, plan.points().view(), y.view())?);
    let bounds = Bounds::unit(plan.k());
    let opt = &config.optimizer;

    let plain = ObjectiveAssembly::new(
        vec![model.clone()],
        OverallDesirability::new(specs.clone())?,
        None,
        bounds.clone(),
    )?
    .with_names(config.objectives.clone())?;
    let without_mm = optimize(&plain, opt.budget, opt.seed, opt.restarts)?;

    let (with_mm, phi_base, without_mm_improvement) = if config.mm.enabled {
        let mm = &config.mm;
        let ctx = MmContext::new(plan.clone(), mm.q, mm.p)?;
        let phi_base = ctx.phi_base();
        let (lo, hi) = mm_desirability_bounds(phi_base, mm.lo_frac, mm.hi_frac)?;
        log::info!("mmphi_base (known design): {phi_base}");
        log::info!("mmphi_min: {lo}, mmphi_max: {hi}");
        let baseline = ctx.improvement(&without_mm.x_best)?;
        let mut specs3 = specs.clone();
        specs3.push(DesirabilitySpec::maximize(lo, hi, mm.scale)?);
        let mut names = config.objectives.clone();
        names.push("mm".into());
        let assembly = ObjectiveAssembly::new(vec![model], OverallDesirability::new(specs3)?, Some(ctx), bounds)?
            .with_names(names)?;
        let s = optimize(&assembly, opt.budget, opt.seed, opt.restarts)?;
        (Some(s), Some(phi_base), Some(baseline))
    } else {
        (None, None, None)
    };

    let mut result = CaseStudyResult {
        without_mm,
        with_mm,
        phi_base,
        without_mm_improvement,
        artifacts: Vec::new(),
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        result.artifacts = write_artifacts(plan, y.view(), &orient, config, &result, dir, prefix)?;
    }
    Ok(result)
}

fn pts(rows: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    rows.collect()
}

fn write_artifacts(
    plan: &SamplingPlan,
    y: ArrayView2<'_, f64>,
    orient: &[Orientation],
    config: &CaseStudyConfig,
    result: &CaseStudyResult,
    dir: &Path,
    prefix: &str,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let (a, b) = (&config.objectives[0], &config.objectives[1]);

    for (suggestion, tag) in [(Some(&result.without_mm), "without-mm"), (result.with_mm.as_ref(), "with-mm")] {
        if let Some(s) = suggestion {
            let path = dir.join(format!("{prefix}_{tag}.json"));
            std::fs::write(&path, s.to_json()? + "\n")?;
            written.push(path);
        }
    }

    let front = pareto_front(y, orient)?;
    let data = ScatterSeries {
        label: "data".into(),
        points: pts(y.rows().into_iter().map(|r| (r[0], r[1]))),
        style: SeriesStyle::Background,
    };
    let front_series = ScatterSeries {
        label: "Pareto front (data)".into(),
        points: front.indices.iter().map(|&i| (y[[i, 0]], y[[i, 1]])).collect(),
        style: SeriesStyle::Front,
    };
    let mut best = vec![ScatterSeries {
        label: "best without mm".into(),
        points: vec![(result.without_mm.y_best[0], result.without_mm.y_best[1])],
        style: SeriesStyle::Highlight(MarkerRole::WithoutMm),
    }];
    if let Some(s) = &result.with_mm {
        best.push(ScatterSeries {
            label: "best with mm".into(),
            points: vec![(s.y_best[0], s.y_best[1])],
            style: SeriesStyle::Highlight(MarkerRole::WithMm),
        });
    }
    let trace_points = |s: &InfillSuggestion, i: usize, j: usize| {
        pts(s.trace.iter().map(|t| (t.objectives[i], t.objectives[j])))
    };

    let mut series = vec![data.clone(), front_series.clone()];
    series.extend(best.iter().cloned());
    let plot = scatter_plot(&format!("Pareto front of the data and suggested points ({a} vs. {b})"), a, b, &series);
    written.push(plot.write(dir, &format!("{prefix}_pareto-{a}-{b}"))?);

    let mut series = vec![data, front_series];
    series.push(ScatterSeries {
        label: "trace without mm".into(),
        points: trace_points(&result.without_mm, 0, 1),
        style: SeriesStyle::Trace(MarkerRole::WithoutMm),
    });
    if let Some(s) = &result.with_mm {
        series.push(ScatterSeries {
            label: "trace with mm".into(),
            points: trace_points(s, 0, 1),
            style: SeriesStyle::Trace(MarkerRole::WithMm),
        });
    }
    series.extend(best);
    let plot = scatter_plot(&format!("Pareto front with optimizer trace ({a} vs. {b})"), a, b, &series);
    written.push(plot.write(dir, &format!("{prefix}_pareto-{a}-{b}-callback"))?);

    if let Some(s) = &result.with_mm {
        for (i, name) in [(0, a), (1, b)] {
            let trace = trace_points(s, i, 2);
            let finite: Vec<(f64, f64)> = trace.iter().copied().filter(|(u, v)| u.is_finite() && v.is_finite()).collect();
            let grid = ndarray::Array2::from_shape_fn((finite.len(), 2), |(r, c)| if c == 0 { finite[r].0 } else { finite[r].1 });
            let f = pareto_front(grid.view(), &[orient[i], Orientation::Maximize])?;
            let series = vec![
                ScatterSeries {
                    label: "trace with mm".into(),
                    points: trace,
                    style: SeriesStyle::Trace(MarkerRole::WithMm),
                },
                ScatterSeries {
                    label: "Pareto front (trace)".into(),
                    points: f.indices.iter().map(|&r| finite[r]).collect(),
                    style: SeriesStyle::Front,
                },
                ScatterSeries {
                    label: "best with mm".into(),
                    points: vec![(s.y_best[i], s.y_best[2])],
                    style: SeriesStyle::Highlight(MarkerRole::WithMm),
                },
            ];
            let plot = scatter_plot(
                &format!("Optimized points ({name} vs. mm); no mm values exist for the data"),
                name,
                "mm",
                &series,
            );
            written.push(plot.write(dir, &format!("{prefix}_pareto-{name}-mm"))?);
        }
    }

    let mut markers = vec![Marker::new("without mm", result.without_mm.x_best.clone(), MarkerRole::WithoutMm)];
    if let Some(s) = &result.with_mm {
        markers.push(Marker::new("with mm", s.x_best.clone(), MarkerRole::WithMm));
    }
    let (_, plot) = ip_boxplots(plan, &markers)?;
    written.push(plot.write(dir, &format!("{prefix}_ip-boxplots"))?);
    let (_, plot) = ip_histograms(plan, &markers, config.bins)?;
    written.push(plot.write(dir, &format!("{prefix}_ip-histograms"))?);
    if plan.k() >= 2 {
        let plot = updated_design_scatter(plan, config.feature_pair, &markers)?;
        written.push(plot.write(dir, &format!("{prefix}_updated-design"))?);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{generate_clustered_design, generate_synthetic_targets};
    use crate::surrogate::ForestConfig;

    fn small_config() -> CaseStudyConfig {
        CaseStudyConfig {
            surrogate: ModelSpec::ForestPerTarget(ForestConfig {
                n_estimators: 20,
                ..Default::default()
            }),
            optimizer: OptimizerSettings {
                budget: 300,
                seed: 1,
                restarts: 1,
            },
            ..Default::default()
        }
    }

    #[test]
    fn produces_both_suggestions_and_all_figures() {
        let plan = generate_clustered_design(60, 3, 3, 0.05, 2).unwrap();
        let data = generate_synthetic_targets(&plan, 0.0, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let r = run_case_study(&plan, data.z.view(), &data.target_names, &small_config(), Some(dir.path()), "suggest")
            .unwrap();
        let with = r.with_mm.as_ref().unwrap();
        assert_eq!(r.without_mm.y_best.len(), 2);
        assert_eq!(with.y_best.len(), 3);
        for s in [&r.without_mm, with] {
            assert!(s.x_best.iter().all(|v| (0.0..=1.0).contains(v)));
        }
        let svgs = r.artifacts.iter().filter(|p| p.extension().unwrap() == "svg").count();
        let jsons = r.artifacts.iter().filter(|p| p.extension().unwrap() == "json").count();
        assert_eq!((svgs, jsons), (7, 2));
        assert!(dir.path().join("suggest_pareto-z1-mm.csv").exists());
    }

    #[test]
    fn mm_disabled_runs_once() {
        let plan = generate_clustered_design(40, 2, 2, 0.05, 3).unwrap();
        let data = generate_synthetic_targets(&plan, 0.0, 3).unwrap();
        let mut cfg = small_config();
        cfg.mm.enabled = false;
        let r = run_case_study(&plan, data.z.view(), &data.target_names, &cfg, None, "suggest").unwrap();
        assert!(r.with_mm.is_none());
        assert_eq!(r.without_mm.y_best.len(), 2);
    }

    #[test]
    fn rejects_bad_objectives() {
        let plan = generate_clustered_design(30, 2, 2, 0.05, 3).unwrap();
        let data = generate_synthetic_targets(&plan, 0.0, 3).unwrap();
        let mut cfg = small_config();
        cfg.objectives = vec!["z1".into(), "z9".into()];
        let err = run_case_study(&plan, data.z.view(), &data.target_names, &cfg, None, "s").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        cfg.objectives = vec!["z1".into()];
        assert!(run_case_study(&plan, data.z.view(), &data.target_names, &cfg, None, "s").is_err());
    }
}
