//! The `infill` command-line tool.
//!
//! Every command except `eval-design` reads one JSON [`RunConfig`]
//! (`--config`, optional) and accepts overrides of any leaf as dot-path
//! flags, e.g. `--optimizer.budget 500` or `--data.kind csv`. Override values
//! are parsed as JSON when possible and taken as strings otherwise.
//!
//! Artifacts are written to `output_dir` as `<command>_<figure>.svg` with a
//! `.csv` sibling. Exit codes: 0 success, 2 configuration or argument error,
//! 3 data error, 4 numerical failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::designs::{
    generate_clustered_design, generate_lhs, generate_synthetic_targets, normalize, optimize_lhs,
    read_csv_matrix, write_csv_matrix, Bounds, SamplingPlan,
};
use crate::desirability::DesirabilitySpec;
use crate::diagnostics::{line_plot, scatter_plot, updated_design_scatter, LineSeries, MarkerRole, ScatterSeries, SeriesStyle};
use crate::error::{Error, Result};
use crate::moo::{run_case_study, CaseStudyConfig, CaseStudyResult, MmSettings, OptimizerSettings};
use crate::spacefill::studies::{
    mean_std, mmphi_vs_n_study, noise_sigma_sweep, point_addition_study, AdditionMode,
};
use crate::spacefill::{mmphi_intensive, pairwise_distances};
use crate::surrogate::{cross_validate, train_test_evaluate, ForestConfig, GpConfig, ModelSpec};

#[derive(Debug, Parser)]
#[command(name = "infill", version, about = "Space-filling infill point selection for unplanned designs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Morris-Mitchell criteria of a design stored as CSV (values in [0, 1]).
    EvalDesign(EvalDesignArgs),
    /// Suggest the next infill point with and without the MM objective.
    Suggest(ConfigArgs),
    /// Both criteria for centered Latin hypercubes of growing size.
    Scaling(ConfigArgs),
    /// Intensive criterion while random points are added to the data design.
    PointAddition(ConfigArgs),
    /// MM improvement of noisy copies of existing points.
    NoiseSweep(ConfigArgs),
    /// Build a space-filling Latin hypercube by column swaps.
    OptLhs(ConfigArgs),
    /// Hold-out and k-fold evaluation of the surrogate models.
    FitCv(ConfigArgs),
}

#[derive(Debug, Args)]
pub struct EvalDesignArgs {
    /// CSV with a header row and one design point per line.
    pub features: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Directory for `eval-design_summary.json`.
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// JSON run configuration; defaults apply to missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Leaf overrides: `--path.to.key value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "OVERRIDES")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    Synthetic,
    Csv,
}

/// Where the design and targets come from. CSV inputs are min-max scaled to
/// `[0, 1]` column by column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub kind: DataKind,
    pub features: Option<PathBuf>,
    pub targets: Option<PathBuf>,
    pub n: usize,
    pub k: usize,
    pub n_clusters: usize,
    pub spread: f64,
    pub noise: f64,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            kind: DataKind::Synthetic,
            features: None,
            targets: None,
            n: 213,
            k: 5,
            n_clusters: 5,
            spread: 0.03,
            noise: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetConfig {
    pub budget: usize,
    pub restarts: usize,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        let o = OptimizerSettings::default();
        Self {
            budget: o.budget,
            restarts: o.restarts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlotConfig {
    pub feature_pair: (usize, usize),
    pub bins: usize,
}

impl Default for PlotConfig {
    fn default() -> Self {
        Self {
            feature_pair: (0, 1),
            bins: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub k: usize,
    pub n_values: Vec<usize>,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            k: 2,
            n_values: vec![10, 25, 50, 100, 200],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointAdditionConfig {
    pub n_added: usize,
    pub mode: AdditionMode,
}

impl Default for PointAdditionConfig {
    fn default() -> Self {
        Self {
            n_added: 10,
            mode: AdditionMode::Batch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSweepConfig {
    pub sigmas: Vec<f64>,
    pub reps: usize,
    /// Uniform candidates for the reference improvement.
    pub uniform_candidates: usize,
}

impl Default for NoiseSweepConfig {
    fn default() -> Self {
        Self {
            sigmas: vec![0.001, 0.003, 0.01, 0.03, 0.1, 0.3],
            reps: 50,
            uniform_candidates: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptLhsConfig {
    pub n: usize,
    pub k: usize,
    pub iterations: usize,
}

impl Default for OptLhsConfig {
    fn default() -> Self {
        Self {
            n: 213,
            k: 2,
            iterations: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvConfig {
    pub k_folds: usize,
    pub test_size: f64,
    pub models: Vec<ModelSpec>,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            k_folds: 10,
            test_size: 0.3,
            models: vec![
                ModelSpec::Forest(ForestConfig::default()),
                ModelSpec::Gp(GpConfig::default()),
            ],
        }
    }
}

/// One document configures every command. `seed` feeds all randomness: data
/// generation, forests, the optimizer and the studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub data: DataConfig,
    pub objectives: Vec<String>,
    pub desirability: Vec<DesirabilitySpec>,
    pub mm: MmSettings,
    /// The forest seed is replaced by `seed`.
    pub surrogate: ModelSpec,
    pub optimizer: BudgetConfig,
    pub plots: PlotConfig,
    pub scaling: ScalingConfig,
    pub point_addition: PointAdditionConfig,
    pub noise_sweep: NoiseSweepConfig,
    pub opt_lhs: OptLhsConfig,
    pub cv: CvConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let case = CaseStudyConfig::default();
        Self {
            seed: 0,
            output_dir: PathBuf::from("out"),
            data: DataConfig::default(),
            objectives: case.objectives,
            desirability: case.desirability,
            mm: case.mm,
            surrogate: case.surrogate,
            optimizer: BudgetConfig::default(),
            plots: PlotConfig::default(),
            scaling: ScalingConfig::default(),
            point_addition: PointAdditionConfig::default(),
            noise_sweep: NoiseSweepConfig::default(),
            opt_lhs: OptLhsConfig::default(),
            cv: CvConfig::default(),
        }
    }
}

fn seeded_model(spec: &ModelSpec, seed: u64) -> ModelSpec {
    match spec {
        ModelSpec::Forest(c) => ModelSpec::Forest(ForestConfig { seed, ..c.clone() }),
        ModelSpec::ForestPerTarget(c) => ModelSpec::ForestPerTarget(ForestConfig { seed, ..c.clone() }),
        ModelSpec::Gp(c) => ModelSpec::Gp(c.clone()),
    }
}

impl RunConfig {
    /// Defaults, then the file, then the overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => Value::Object(Default::default()),
        };
        apply_overrides(&mut value, overrides)?;
        serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn case_study(&self) -> CaseStudyConfig {
        CaseStudyConfig {
            objectives: self.objectives.clone(),
            desirability: self.desirability.clone(),
            mm: self.mm.clone(),
            surrogate: seeded_model(&self.surrogate, self.seed),
            optimizer: OptimizerSettings {
                budget: self.optimizer.budget,
                seed: self.seed,
                restarts: self.optimizer.restarts,
            },
            feature_pair: self.plots.feature_pair,
            bins: self.plots.bins,
        }
    }
}

/// Sets `--a.b.c value` pairs (or `--a.b.c=value`) on a JSON object,
/// creating intermediate objects as needed.
pub fn apply_overrides(root: &mut Value, overrides: &[String]) -> Result<()> {
    let mut it = overrides.iter();
    while let Some(flag) = it.next() {
        let body = flag
            .strip_prefix("--")
            .ok_or_else(|| Error::Config(format!("expected --key value, found {flag:?}")))?;
        let (key, raw) = match body.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| Error::Config(format!("missing value for --{body}")))?;
                (body.to_string(), v.clone())
            }
        };
        let parsed = serde_json::from_str(&raw).unwrap_or(Value::String(raw));
        let parts: Vec<&str> = key.split('.').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::Config(format!("malformed key --{key}")));
        }
        let mut node = &mut *root;
        for part in &parts[..parts.len() - 1] {
            if !node.is_object() {
                return Err(Error::Config(format!("--{key}: {part} is not an object")));
            }
            node = node
                .as_object_mut()
                .expect("checked above")
                .entry(part.to_string())
                .or_insert_with(|| Value::Object(Default::default()));
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("--{key}: parent is not an object")))?;
        obj.insert(parts[parts.len() - 1].to_string(), parsed);
    }
    Ok(())
}

/// Design and (possibly empty) targets in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub plan: SamplingPlan,
    pub targets: Array2<f64>,
    pub target_names: Vec<String>,
}

fn min_max(raw: &Array2<f64>) -> Result<Array2<f64>> {
    let bounds = Bounds::from_data(raw.view())?;
    Ok(normalize(raw.view(), &bounds)?.into_points())
}

pub fn load_data(cfg: &RunConfig) -> Result<LoadedData> {
    let d = &cfg.data;
    match d.kind {
        DataKind::Synthetic => {
            let plan = generate_clustered_design(d.n, d.k, d.n_clusters, d.spread, cfg.seed)?;
            let data = generate_synthetic_targets(&plan, d.noise, cfg.seed)?;
            Ok(LoadedData {
                plan: data.x,
                targets: data.z,
                target_names: data.target_names,
            })
        }
        DataKind::Csv => {
            let path = d
                .features
                .as_ref()
                .ok_or_else(|| Error::Config("data.features is required for csv data".into()))?;
            let (names, raw) = read_csv_matrix(path)?;
            let plan = SamplingPlan::with_names(min_max(&raw)?, names)?;
            let (target_names, targets) = match &d.targets {
                Some(tp) => {
                    let (names, raw) = read_csv_matrix(tp)?;
                    if raw.nrows() != plan.n() {
                        return Err(Error::InvalidData(format!(
                            "{} has {} rows, features have {}",
                            tp.display(),
                            raw.nrows(),
                            plan.n()
                        )));
                    }
                    (names, min_max(&raw)?)
                }
                None => (Vec::new(), Array2::zeros((plan.n(), 0))),
            };
            Ok(LoadedData {
                plan,
                targets,
                target_names,
            })
        }
    }
}

fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
    w.write_record(header).map_err(|e| Error::Io(e.into()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

fn write_svg(dir: &Path, stem: &str, svg: &str) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.svg"));
    std::fs::write(&path, svg)?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignSummary {
    pub n: usize,
    pub k: usize,
    pub q: f64,
    pub p: f64,
    pub pairs: u64,
    pub distinct_distances: usize,
    pub min_distance: f64,
    pub phi: f64,
    pub phi_intensive: f64,
}

pub fn cmd_eval_design(args: &EvalDesignArgs, out: &mut dyn Write) -> Result<DesignSummary> {
    let (names, raw) = read_csv_matrix(&args.features)?;
    if let Some(v) = raw.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidData(format!(
            "value {v} lies outside [0, 1]; normalize the design first"
        )));
    }
    let plan = SamplingPlan::with_names(raw, names)?;
    let profile = pairwise_distances(&plan, args.q, args.p)?;
    let summary = DesignSummary {
        n: plan.n(),
        k: plan.k(),
        q: args.q,
        p: args.p,
        pairs: profile.pairs(),
        distinct_distances: profile.distances().len(),
        min_distance: profile.distances()[0],
        phi: profile.phi(),
        phi_intensive: profile.phi_intensive(),
    };
    writeln!(out, "design: {} points, {} features (q = {}, p = {})", summary.n, summary.k, summary.q, summary.p)?;
    writeln!(out, "pairs (M): {}", summary.pairs)?;
    if profile.distances().len() <= 10 {
        writeln!(out, "Multiplicities (J): {:?}", profile.multiplicities())?;
        writeln!(out, "Distinct Distances (d): {:?}", profile.distances())?;
    } else {
        writeln!(out, "distinct distances: {}, smallest: {}", summary.distinct_distances, summary.min_distance)?;
    }
    writeln!(out, "mmphi: {}", summary.phi)?;
    writeln!(out, "mmphi_intensive: {}", summary.phi_intensive)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let path = args.out_dir.join("eval-design_summary.json");
    std::fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(summary)
}

pub fn cmd_suggest(cfg: &RunConfig, out: &mut dyn Write) -> Result<CaseStudyResult> {
    let data = load_data(cfg)?;
    if data.target_names.is_empty() {
        return Err(Error::Config("suggest needs target values (data.targets)".into()));
    }
    let case = cfg.case_study();
    let result = run_case_study(
        &data.plan,
        data.targets.view(),
        &data.target_names,
        &case,
        Some(&cfg.output_dir),
        "suggest",
    )?;
    write!(out, "{}", result.without_mm.to_text())?;
    if let (Some(s), Some(phi)) = (&result.with_mm, result.phi_base) {
        writeln!(out, "mmphi_base (known design): {phi}")?;
        writeln!(out, "mmphi_min: {}, mmphi_max: {}", case.mm.lo_frac * phi, case.mm.hi_frac * phi)?;
        write!(out, "{}", s.to_text())?;
        if let Some(b) = result.without_mm_improvement {
            writeln!(out, "MM improvement without / with the MM objective: {b} / {}", s.y_best[2])?;
        }
    }
    for p in &result.artifacts {
        writeln!(out, "wrote {}", p.display())?;
    }
    Ok(result)
}

pub fn cmd_scaling(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let s = &cfg.scaling;
    let rows = mmphi_vs_n_study(s.k, &s.n_values, cfg.mm.q, cfg.mm.p, cfg.seed)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    writeln!(out, "n, phi, phi_intensive, M")?;
    for r in &rows {
        writeln!(out, "{}, {}, {}, {}", r.n, r.phi, r.phi_intensive, r.pairs)?;
    }
    let csv = cfg.output_dir.join("scaling_mm-vs-n.csv");
    write_table(
        &csv,
        &["n", "phi", "phi_intensive", "M"],
        rows.iter().map(|r| vec![r.n.to_string(), r.phi.to_string(), r.phi_intensive.to_string(), r.pairs.to_string()]),
    )?;
    let series = [
        LineSeries {
            label: "phi".into(),
            points: rows.iter().map(|r| (r.n as f64, r.phi)).collect(),
        },
        LineSeries {
            label: "phi intensive".into(),
            points: rows.iter().map(|r| (r.n as f64, r.phi_intensive)).collect(),
        },
    ];
    let plot = line_plot("Morris-Mitchell criteria of centered LHS designs", "n", "criterion", &series, false);
    let svg = write_svg(&cfg.output_dir, "scaling_mm-vs-n", &plot.svg)?;
    writeln!(out, "wrote {}\nwrote {}", csv.display(), svg.display())?;
    Ok(())
}

pub fn cmd_point_addition(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let data = load_data(cfg)?;
    let s = &cfg.point_addition;
    let rows = point_addition_study(&data.plan, s.n_added, s.mode, cfg.mm.q, cfg.mm.p, cfg.seed)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    writeln!(out, "step, phi_intensive, improvement")?;
    for r in &rows {
        writeln!(out, "{}, {}, {}", r.step, r.phi_intensive, r.improvement)?;
    }
    if s.mode == AdditionMode::SingleInjection {
        let imps: Vec<f64> = rows[1..].iter().map(|r| r.improvement).collect();
        if !imps.is_empty() {
            let (m, sd) = mean_std(&imps);
            writeln!(out, "improvement mean: {m}, std: {sd}")?;
        }
    }
    let csv = cfg.output_dir.join("point-addition_phi-intensive.csv");
    write_table(
        &csv,
        &["step", "phi_intensive", "improvement"],
        rows.iter().map(|r| vec![r.step.to_string(), r.phi_intensive.to_string(), r.improvement.to_string()]),
    )?;
    let series = [LineSeries {
        label: "phi intensive".into(),
        points: rows.iter().map(|r| (r.step as f64, r.phi_intensive)).collect(),
    }];
    let plot = line_plot("Intensive criterion with added random points", "added points", "phi intensive", &series, false);
    let svg = write_svg(&cfg.output_dir, "point-addition_phi-intensive", &plot.svg)?;
    writeln!(out, "wrote {}\nwrote {}", csv.display(), svg.display())?;
    Ok(())
}

pub fn cmd_noise_sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let data = load_data(cfg)?;
    let s = &cfg.noise_sweep;
    let rows = noise_sigma_sweep(&data.plan, &s.sigmas, s.reps, cfg.mm.q, cfg.mm.p, cfg.seed)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    writeln!(out, "sigma, mean, std, min, max")?;
    for r in &rows {
        writeln!(out, "{}, {}, {}, {}, {}", r.sigma, r.mean, r.std, r.min, r.max)?;
    }
    let mut series = vec![LineSeries {
        label: "mean improvement".into(),
        points: rows.iter().map(|r| (r.sigma, r.mean)).collect(),
    }];
    if s.uniform_candidates > 0 {
        let uniform = point_addition_study(
            &data.plan,
            s.uniform_candidates,
            AdditionMode::SingleInjection,
            cfg.mm.q,
            cfg.mm.p,
            cfg.seed.wrapping_add(1),
        )?;
        let imps: Vec<f64> = uniform[1..].iter().map(|r| r.improvement).collect();
        let (m, _) = mean_std(&imps);
        writeln!(out, "uniform random point improvement: {m}")?;
        let (lo, hi) = (rows[0].sigma, rows[rows.len() - 1].sigma);
        series.push(LineSeries {
            label: "uniform random point".into(),
            points: vec![(lo, m), (hi, m)],
        });
    }
    let csv = cfg.output_dir.join("noise-sweep_sigma.csv");
    write_table(
        &csv,
        &["sigma", "mean", "std", "min", "max"],
        rows.iter().map(|r| {
            vec![r.sigma.to_string(), r.mean.to_string(), r.std.to_string(), r.min.to_string(), r.max.to_string()]
        }),
    )?;
    let plot = line_plot("Effect of noise on the MM improvement", "sigma", "MM improvement", &series, true);
    let svg = write_svg(&cfg.output_dir, "noise-sweep_sigma", &plot.svg)?;
    writeln!(out, "wrote {}\nwrote {}", csv.display(), svg.display())?;
    Ok(())
}

pub fn cmd_opt_lhs(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let s = &cfg.opt_lhs;
    let start = generate_lhs(s.n, s.k, cfg.seed, true)?;
    let plan = optimize_lhs(s.n, s.k, cfg.mm.q, cfg.mm.p, s.iterations, cfg.seed)?;
    let before = mmphi_intensive(&start, cfg.mm.q, cfg.mm.p)?.quality;
    let after = mmphi_intensive(&plan, cfg.mm.q, cfg.mm.p)?.quality;
    writeln!(out, "mmphi_intensive of the starting LHS: {before}")?;
    writeln!(out, "mmphi_intensive of the optimized LHS: {after}")?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let csv = cfg.output_dir.join("opt-lhs_design.csv");
    write_csv_matrix(&csv, plan.feature_names(), plan.points().view())?;
    writeln!(out, "wrote {}", csv.display())?;
    if plan.k() >= 2 {
        let plot = updated_design_scatter(&plan, (0, 1), &[])?;
        let svg = plot.write(&cfg.output_dir, "opt-lhs_design-scatter")?;
        writeln!(out, "wrote {}", svg.display())?;
    }
    Ok(())
}

pub fn cmd_fit_cv(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let data = load_data(cfg)?;
    if data.target_names.is_empty() {
        return Err(Error::Config("fit-cv needs target values (data.targets)".into()));
    }
    let models: Vec<ModelSpec> = cfg.cv.models.iter().map(|m| seeded_model(m, cfg.seed)).collect();
    let x = data.plan.points().view();
    let y = data.targets.view();
    std::fs::create_dir_all(&cfg.output_dir)?;

    let hold_out = train_test_evaluate(x, y, &data.target_names, cfg.cv.test_size, &models, cfg.seed)?;
    writeln!(out, "hold-out evaluation ({} train, {} test rows)", hold_out.n_train, hold_out.n_test)?;
    for m in &hold_out.models {
        for t in &m.targets {
            writeln!(out, "  {} {}: MSE {}, MAE {}", m.model, t.target, t.mse, t.mae)?;
        }
    }
    for (t, name) in data.target_names.iter().enumerate() {
        let series: Vec<ScatterSeries> = hold_out
            .models
            .iter()
            .enumerate()
            .map(|(i, m)| ScatterSeries {
                label: m.model.clone(),
                points: m
                    .actual
                    .column(t)
                    .iter()
                    .zip(m.predicted.column(t).iter())
                    .map(|(a, p)| (*a, *p))
                    .collect(),
                style: SeriesStyle::Trace(if i % 2 == 0 { MarkerRole::WithoutMm } else { MarkerRole::WithMm }),
            })
            .collect();
        let plot = scatter_plot(&format!("Predicted vs. actual ({name})"), "actual", "predicted", &series);
        let svg = plot.write(&cfg.output_dir, &format!("fit-cv_predictions-{name}"))?;
        writeln!(out, "wrote {}", svg.display())?;
    }

    let report = cross_validate(x, y, &data.target_names, cfg.cv.k_folds, &models, cfg.seed)?;
    for s in &report.scores {
        writeln!(out, "{} / {}", s.target, s.model)?;
        writeln!(out, "  NMSE: {:?}", s.negated(crate::surrogate::CvMetric::Mse))?;
        writeln!(out, "  NMAE: {:?}", s.negated(crate::surrogate::CvMetric::Mae))?;
    }
    writeln!(out, "{}", report.mean_scores_text())?;
    let table = report.to_table();
    writeln!(out, "{table}")?;
    let md = cfg.output_dir.join("fit-cv_table.md");
    std::fs::write(&md, table + "\n")?;
    let csv = cfg.output_dir.join("fit-cv_summary.csv");
    write_table(
        &csv,
        &["target", "model", "metric", "mean", "std", "min", "max"],
        report.summary_rows().into_iter().map(|r| {
            vec![
                r.target,
                r.model,
                r.metric.name().to_string(),
                r.mean.to_string(),
                r.std.to_string(),
                r.min.to_string(),
                r.max.to_string(),
            ]
        }),
    )?;
    writeln!(out, "wrote {}\nwrote {}", md.display(), csv.display())?;
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Config(e.to_string()))?;
    let load = |a: &ConfigArgs| RunConfig::load(a.config.as_deref(), &a.overrides);
    match &cli.command {
        Command::EvalDesign(a) => cmd_eval_design(a, out).map(|_| ()),
        Command::Suggest(a) => cmd_suggest(&load(a)?, out).map(|_| ()),
        Command::Scaling(a) => cmd_scaling(&load(a)?, out),
        Command::PointAddition(a) => cmd_point_addition(&load(a)?, out),
        Command::NoiseSweep(a) => cmd_noise_sweep(&load(a)?, out),
        Command::OptLhs(a) => cmd_opt_lhs(&load(a)?, out),
        Command::FitCv(a) => cmd_fit_cv(&load(a)?, out),
    }
}

/// Process entry point: runs the command and returns the exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let args: Vec<std::ffi::OsString> = std::env::args_os().collect();
    if let Err(e) = Cli::try_parse_from(&args) {
        // help, version and usage errors are printed by clap itself
        let _ = e.print();
        return e.exit_code();
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(args, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn args(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn overrides_set_nested_leaves() {
        let mut v = json!({"optimizer": {"budget": 10}});
        apply_overrides(
            &mut v,
            &args(&["--optimizer.budget", "500", "--data.kind=csv", "--objectives", "[\"a\",\"b\"]", "--output_dir", "res"]),
        )
        .unwrap();
        assert_eq!(v["optimizer"]["budget"], json!(500));
        assert_eq!(v["data"]["kind"], json!("csv"));
        assert_eq!(v["objectives"], json!(["a", "b"]));
        assert_eq!(v["output_dir"], json!("res"));
    }

    #[test]
    fn override_errors() {
        let mut v = json!({});
        assert!(apply_overrides(&mut v, &args(&["budget", "1"])).is_err());
        assert!(apply_overrides(&mut v, &args(&["--budget"])).is_err());
        assert!(apply_overrides(&mut v, &args(&["--a..b", "1"])).is_err());
        let mut v = json!({"seed": 1});
        assert!(apply_overrides(&mut v, &args(&["--seed.x", "1"])).is_err());
    }

    #[test]
    fn config_defaults_and_unknown_keys() {
        let cfg = RunConfig::load(None, &args(&["--optimizer.budget", "500", "--seed", "7"])).unwrap();
        assert_eq!(cfg.optimizer.budget, 500);
        let case = cfg.case_study();
        assert_eq!(case.optimizer.seed, 7);
        match case.surrogate {
            ModelSpec::ForestPerTarget(c) => assert_eq!(c.seed, 7),
            other => panic!("unexpected default surrogate {other:?}"),
        }
        let err = RunConfig::load(None, &args(&["--optimizer.bugdet", "5"])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let cfg = RunConfig::load(None, &args(&["--surrogate.kind", "gp"])).unwrap();
        assert!(matches!(cfg.surrogate, ModelSpec::Gp(_)));
    }

    #[test]
    fn usage_errors_map_to_config_exit_code() {
        let mut sink = Vec::new();
        let err = run(["infill", "no-such-command"], &mut sink).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
