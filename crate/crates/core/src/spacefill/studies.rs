//! Experiments on how the intensive criterion reacts to design size, added
//! points and perturbed copies of existing points.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{
    distances_to, mm_improvement, mmphi_intensive_update, pairwise_distances, DuplicatePolicy,
    DUPLICATE_TOLERANCE,
};
use crate::designs::{generate_lhs, SamplingPlan};
use crate::error::{invalid_arg, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub phi: f64,
    pub phi_intensive: f64,
    /// Pair count `n(n-1)/2`.
    pub pairs: u64,
}

/// Both criteria for a centered LHS of every size in `n_values`.
pub fn mmphi_vs_n_study(
    k: usize,
    n_values: &[usize],
    q: f64,
    p: f64,
    seed: u64,
) -> Result<Vec<ScalingRow>> {
    n_values
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let plan = generate_lhs(n, k, seed.wrapping_add(i as u64), true)?;
            let profile = pairwise_distances(&plan, q, p)?;
            Ok(ScalingRow {
                n,
                phi: profile.phi(),
                phi_intensive: profile.phi_intensive(),
                pairs: profile.pairs(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdditionMode {
    /// Points are appended cumulatively.
    Batch,
    /// Each candidate is added to the original design on its own.
    SingleInjection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdditionRow {
    /// 0 is the unmodified design.
    pub step: usize,
    /// Intensive criterion after this step.
    pub phi_intensive: f64,
    /// Base criterion minus `phi_intensive`.
    pub improvement: f64,
}

/// Adds `n_added` uniformly random points and records the intensive criterion.
pub fn point_addition_study(
    plan: &SamplingPlan,
    n_added: usize,
    mode: AdditionMode,
    q: f64,
    p: f64,
    seed: u64,
) -> Result<Vec<AdditionRow>> {
    let base = pairwise_distances(plan, q, p)?;
    let base_phi = base.phi_intensive();
    let mut rng = rng::seeded(seed);
    let mut rows = vec![AdditionRow {
        step: 0,
        phi_intensive: base_phi,
        improvement: 0.0,
    }];

    let mut current = plan.clone();
    let mut profile = base.clone();
    for step in 1..=n_added {
        let x: Vec<f64> = (0..plan.k()).map(|_| rng.random()).collect();
        let phi = match mode {
            AdditionMode::Batch => {
                let updated = mmphi_intensive_update(&current, &x, &profile)?;
                current = current.with_point(&x)?;
                profile = updated.profile;
                updated.quality
            }
            AdditionMode::SingleInjection => {
                base_phi - mm_improvement(plan, &x, &base, DuplicatePolicy::Strict)?
            }
        };
        rows.push(AdditionRow {
            step,
            phi_intensive: phi,
            improvement: base_phi - phi,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaRow {
    pub sigma: f64,
    pub mean: f64,
    /// Population standard deviation over repetitions.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// For every `sigma`, perturbs `reps` randomly chosen existing points with
/// isotropic Gaussian noise (clipped to the unit cube) and records the MM
/// improvement of each perturbed point against the original design.
///
/// A perturbed point that lands on an existing point is redrawn.
pub fn noise_sigma_sweep(
    plan: &SamplingPlan,
    sigmas: &[f64],
    reps: usize,
    q: f64,
    p: f64,
    seed: u64,
) -> Result<Vec<SigmaRow>> {
    if reps == 0 {
        return Err(invalid_arg("reps must be positive"));
    }
    if let Some(s) = sigmas.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(invalid_arg(format!("sigma must be positive, got {s}")));
    }
    let profile = pairwise_distances(plan, q, p)?;
    let mut rng = rng::seeded(seed);
    let mut out = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let noise = Normal::new(0.0, sigma).map_err(|e| invalid_arg(e.to_string()))?;
        let mut values = Vec::with_capacity(reps);
        for _ in 0..reps {
            let origin = rng.random_range(0..plan.n());
            let mut x = Vec::with_capacity(plan.k());
            for _attempt in 0..1000 {
                x = plan
                    .row(origin)
                    .iter()
                    .map(|v| (v + noise.sample(&mut rng)).clamp(0.0, 1.0))
                    .collect();
                let nearest = distances_to(plan, &x, p)?
                    .into_iter()
                    .fold(f64::INFINITY, f64::min);
                if nearest >= DUPLICATE_TOLERANCE {
                    break;
                }
            }
            values.push(mm_improvement(plan, &x, &profile, DuplicatePolicy::Lenient)?);
        }
        let (mean, std) = mean_std(&values);
        out.push(SigmaRow {
            sigma,
            mean,
            std,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    Ok(out)
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
