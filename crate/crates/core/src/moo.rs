//! Desirability-based infill search: objective assembly, a bounded
//! differential-evolution optimizer and Pareto fronts.

pub mod case_study;
mod de;

use std::sync::Arc;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

pub use case_study::{run_case_study, CaseStudyConfig, CaseStudyResult, MmSettings, OptimizerSettings};
pub use de::{optimize, population_size, InfillSuggestion, TraceEntry, DE_CR, DE_F};

use crate::designs::{Bounds, SamplingPlan};
use crate::desirability::OverallDesirability;
use crate::error::{invalid_arg, Result};
use crate::spacefill::{mm_improvement, mmphi_intensive, DistanceProfile, DuplicatePolicy};
use crate::surrogate::TrainedSurrogate;

/// Bounds of the maximize-form desirability of the MM improvement, as
/// fractions of the base design's intensive criterion.
pub fn mm_desirability_bounds(phi_base: f64, lo_frac: f64, hi_frac: f64) -> Result<(f64, f64)> {
    if !(phi_base.is_finite() && phi_base > 0.0) {
        return Err(invalid_arg(format!("phi_base must be positive, got {phi_base}")));
    }
    if !(lo_frac > 0.0 && lo_frac < hi_frac && hi_frac.is_finite()) {
        return Err(invalid_arg(format!(
            "need 0 < lo_frac < hi_frac, got {lo_frac} and {hi_frac}"
        )));
    }
    Ok((lo_frac * phi_base, hi_frac * phi_base))
}

/// Anything that maps a `k`-vector to `p` objective values.
pub trait ObjectiveModel: Send + Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn predict_row(&self, x: &[f64]) -> Result<Vec<f64>>;
}

impl ObjectiveModel for TrainedSurrogate {
    fn input_dim(&self) -> usize {
        TrainedSurrogate::input_dim(self)
    }

    fn output_dim(&self) -> usize {
        TrainedSurrogate::output_dim(self)
    }

    fn predict_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        TrainedSurrogate::predict_row(self, x)
    }
}

/// Objective given by a plain function, e.g. an analytic test problem.
pub struct FnObjective<F> {
    input_dim: usize,
    output_dim: usize,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(input_dim: usize, output_dim: usize, f: F) -> Self {
        Self {
            input_dim,
            output_dim,
            f,
        }
    }
}

impl<F> ObjectiveModel for FnObjective<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn output_dim(&self) -> usize {
        self.output_dim
    }

    fn predict_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        let y = (self.f)(x);
        if y.len() != self.output_dim {
            return Err(invalid_arg(format!(
                "objective returned {} values, expected {}",
                y.len(),
                self.output_dim
            )));
        }
        Ok(y)
    }
}

/// Fixed base design for the MM-improvement objective.
#[derive(Debug, Clone)]
pub struct MmContext {
    plan: SamplingPlan,
    profile: DistanceProfile,
    phi_base: f64,
}

impl MmContext {
    /// Errors if the base design contains coincident points.
    pub fn new(plan: SamplingPlan, q: f64, p: f64) -> Result<Self> {
        let base = mmphi_intensive(&plan, q, p)?;
        Ok(Self {
            plan,
            phi_base: base.quality,
            profile: base.profile,
        })
    }

    pub fn plan(&self) -> &SamplingPlan {
        &self.plan
    }

    pub fn profile(&self) -> &DistanceProfile {
        &self.profile
    }

    pub fn phi_base(&self) -> f64 {
        self.phi_base
    }

    /// Improvement of adding `x`; `-inf` when `x` coincides with a design point.
    pub fn improvement(&self, x: &[f64]) -> Result<f64> {
        mm_improvement(&self.plan, x, &self.profile, DuplicatePolicy::Lenient)
    }
}

/// Objective vector and overall desirability of one candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objectives: Vec<f64>,
    pub desirability: f64,
}

/// Surrogate predictions, optionally followed by the MM improvement, combined
/// into one overall desirability.
#[derive(Clone)]
pub struct ObjectiveAssembly {
    models: Vec<Arc<dyn ObjectiveModel>>,
    specs: OverallDesirability,
    mm: Option<MmContext>,
    bounds: Bounds,
    names: Vec<String>,
}

impl ObjectiveAssembly {
    /// The objective vector concatenates the outputs of `models` in order and
    /// appends the MM improvement when `mm` is given; `specs` must match it.
    pub fn new(
        models: Vec<Arc<dyn ObjectiveModel>>,
        specs: OverallDesirability,
        mm: Option<MmContext>,
        bounds: Bounds,
    ) -> Result<Self> {
        let k = bounds.k();
        if let Some(m) = models.iter().find(|m| m.input_dim() != k) {
            return Err(invalid_arg(format!(
                "model expects {} inputs but the search space has {k}",
                m.input_dim()
            )));
        }
        if let Some(ctx) = &mm {
            if ctx.plan.k() != k {
                return Err(invalid_arg(format!(
                    "MM base design has {} features but the search space has {k}",
                    ctx.plan.k()
                )));
            }
        }
        let p: usize = models.iter().map(|m| m.output_dim()).sum::<usize>() + usize::from(mm.is_some());
        if p == 0 {
            return Err(invalid_arg("no objectives"));
        }
        if specs.len() != p {
            return Err(invalid_arg(format!(
                "{} desirability specs for {p} objectives",
                specs.len()
            )));
        }
        let mut names: Vec<String> = (1..=p).map(|i| format!("f{i}")).collect();
        if mm.is_some() {
            names[p - 1] = "mm".to_string();
        }
        Ok(Self {
            models,
            specs,
            mm,
            bounds,
            names,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.names.len() {
            return Err(invalid_arg(format!(
                "{} objective names for {} objectives",
                names.len(),
                self.names.len()
            )));
        }
        self.names = names;
        Ok(self)
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn specs(&self) -> &OverallDesirability {
        &self.specs
    }

    pub fn mm(&self) -> Option<&MmContext> {
        self.mm.as_ref()
    }

    pub fn objective_names(&self) -> &[String] {
        &self.names
    }

    pub fn n_objectives(&self) -> usize {
        self.names.len()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        if x.len() != self.bounds.k() {
            return Err(invalid_arg(format!(
                "candidate has dimension {}, search space has {}",
                x.len(),
                self.bounds.k()
            )));
        }
        if !self.bounds.contains(x) {
            return Err(invalid_arg(format!("candidate {x:?} lies outside the bounds")));
        }
        let mut objectives = Vec::with_capacity(self.names.len());
        for model in &self.models {
            objectives.extend(model.predict_row(x)?);
        }
        if let Some(ctx) = &self.mm {
            objectives.push(ctx.improvement(x)?);
        }
        let desirability = self.specs.evaluate(&objectives)?;
        Ok(Evaluation {
            objectives,
            desirability,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Maximize,
    Minimize,
}

/// Non-dominated rows of an objective matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoFront {
    /// Ascending row indices.
    pub indices: Vec<usize>,
    pub orientation: Vec<Orientation>,
}

impl ParetoFront {
    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

/// `a` dominates `b`: no worse in every objective and better in at least one.
pub fn dominates(a: &[f64], b: &[f64], orientation: &[Orientation]) -> bool {
    let mut better = false;
    for ((x, y), o) in a.iter().zip(b).zip(orientation) {
        let (x, y) = match o {
            Orientation::Maximize => (*x, *y),
            Orientation::Minimize => (-*x, -*y),
        };
        if x < y {
            return false;
        }
        if x > y {
            better = true;
        }
    }
    better
}

/// Pairwise dominance scan. Identical rows do not dominate each other, so
/// both stay on the front.
pub fn pareto_front(y: ArrayView2<'_, f64>, orientation: &[Orientation]) -> Result<ParetoFront> {
    if orientation.len() != y.ncols() {
        return Err(invalid_arg(format!(
            "{} orientations for {} objectives",
            orientation.len(),
            y.ncols()
        )));
    }
    let rows: Vec<Vec<f64>> = y.rows().into_iter().map(|r| r.to_vec()).collect();
    let indices = (0..rows.len())
        .filter(|&i| !rows.iter().any(|other| dominates(other, &rows[i], orientation)))
        .collect();
    Ok(ParetoFront {
        indices,
        orientation: orientation.to_vec(),
    })
}
