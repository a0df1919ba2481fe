//! Morris-Mitchell space-filling criteria.
//!
//! For a design with distinct pairwise distances `d_1 < ... < d_m` occurring
//! `J_1, ..., J_m` times, the standard criterion is
//! `phi_q = (sum J_i d_i^-q)^(1/q)` and the intensive criterion divides the sum
//! by the pair count `M = n(n-1)/2` before taking the root. Smaller is better
//! for both. Adding a point only adds `n` distances, so the intensive value of
//! an extended design can be obtained from the base [`DistanceProfile`] in
//! `O(n)` time.

pub mod studies;

use ndarray::ArrayView1;
use serde::Serialize;

use crate::designs::SamplingPlan;
use crate::error::{invalid_arg, Error, Result};

/// Pairs closer than this are treated as coincident points.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Sorted distances within this relative gap of a group's first value join that group.
pub const GROUPING_RTOL: f64 = 1e-9;

/// How coincident points are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    /// Return [`Error::DuplicatePoints`].
    #[default]
    Strict,
    /// Return a worst-case sentinel (`+inf` criterion, `-inf` improvement).
    Lenient,
}

/// Minkowski distance of order `p`.
pub fn minkowski_distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>, p: f64) -> f64 {
    distance(a.iter().copied(), b.iter().copied(), p)
}

fn distance(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>, p: f64) -> f64 {
    let diffs = a.zip(b).map(|(x, y)| (x - y).abs());
    if p == 2.0 {
        diffs.map(|d| d * d).sum::<f64>().sqrt()
    } else if p == 1.0 {
        diffs.sum()
    } else {
        diffs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

pub(crate) fn check_exponents(q: f64, p: f64) -> Result<()> {
    if !(q.is_finite() && q > 0.0) {
        return Err(invalid_arg(format!("q must be a positive finite number, got {q}")));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(invalid_arg(format!("p must be a finite norm order >= 1, got {p}")));
    }
    Ok(())
}

/// Distinct pairwise distances with their multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceProfile {
    distances: Vec<f64>,
    multiplicities: Vec<u64>,
    pairs: u64,
    q: f64,
    p: f64,
    /// `sum J_i d_i^-q` in ascending distance order.
    inverse_sum: f64,
}

impl DistanceProfile {
    /// Profile of all pairs in `plan`. Coincident points are an error.
    pub fn from_plan(plan: &SamplingPlan, q: f64, p: f64) -> Result<Self> {
        check_exponents(q, p)?;
        let n = plan.n();
        if n < 2 {
            return Err(invalid_arg(format!("need at least 2 points, got {n}")));
        }
        let x = plan.points();
        let mut raw = Vec::with_capacity(n * (n - 1) / 2);
        let mut duplicates = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = minkowski_distance(x.row(i), x.row(j), p);
                if d < DUPLICATE_TOLERANCE {
                    duplicates.push((i, j));
                }
                raw.push(d);
            }
        }
        if !duplicates.is_empty() {
            return Err(Error::DuplicatePoints(duplicates));
        }
        Ok(Self::from_distances(raw, q, p))
    }

    /// Groups raw pair distances. Callers guarantee every distance exceeds
    /// [`DUPLICATE_TOLERANCE`].
    pub fn from_distances(mut raw: Vec<f64>, q: f64, p: f64) -> Self {
        raw.sort_by(f64::total_cmp);
        let pairs = raw.len() as u64;
        let mut profile = Self {
            distances: Vec::new(),
            multiplicities: Vec::new(),
            pairs,
            q,
            p,
            inverse_sum: 0.0,
        };
        for d in raw {
            profile.push_grouped(d, 1);
        }
        profile.refresh_sum();
        profile
    }

    fn push_grouped(&mut self, d: f64, count: u64) {
        match self.distances.last() {
            Some(&rep) if d - rep <= GROUPING_RTOL * rep => {
                *self.multiplicities.last_mut().expect("parallel vectors") += count;
            }
            _ => {
                self.distances.push(d);
                self.multiplicities.push(count);
            }
        }
    }

    fn refresh_sum(&mut self) {
        self.inverse_sum = self
            .distances
            .iter()
            .zip(&self.multiplicities)
            .map(|(d, j)| *j as f64 * d.powf(-self.q))
            .sum();
    }

    /// Distinct distances, strictly increasing.
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    /// Number of pairs at each distinct distance.
    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    /// Total pair count `M`.
    pub fn pairs(&self) -> u64 {
        self.pairs
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn inverse_sum(&self) -> f64 {
        self.inverse_sum
    }

    /// Standard criterion `phi_q`.
    pub fn phi(&self) -> f64 {
        self.inverse_sum.powf(1.0 / self.q)
    }

    /// Intensive criterion `phi*_q`.
    pub fn phi_intensive(&self) -> f64 {
        (self.inverse_sum / self.pairs as f64).powf(1.0 / self.q)
    }

    /// Intensive criterion after adding `new_distances` as extra pairs, without
    /// building the merged profile.
    pub fn phi_intensive_with(&self, new_distances: &[f64]) -> f64 {
        let added: f64 = new_distances.iter().map(|d| d.powf(-self.q)).sum();
        let pairs = self.pairs + new_distances.len() as u64;
        ((self.inverse_sum + added) / pairs as f64).powf(1.0 / self.q)
    }

    /// A new profile with `new_distances` merged into the groups.
    pub fn merged(&self, new_distances: &[f64]) -> Self {
        let mut incoming = new_distances.to_vec();
        incoming.sort_by(f64::total_cmp);
        let mut out = Self {
            distances: Vec::with_capacity(self.distances.len() + incoming.len()),
            multiplicities: Vec::with_capacity(self.distances.len() + incoming.len()),
            pairs: self.pairs + incoming.len() as u64,
            q: self.q,
            p: self.p,
            inverse_sum: 0.0,
        };
        let mut old = self.distances.iter().zip(&self.multiplicities).peekable();
        let mut new = incoming.into_iter().peekable();
        loop {
            let take_old = match (old.peek(), new.peek()) {
                (Some((d_old, _)), Some(d_new)) => **d_old <= *d_new,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if take_old {
                let (d, j) = old.next().expect("peeked");
                out.push_grouped(*d, *j);
            } else {
                let d = new.next().expect("peeked");
                out.push_grouped(d, 1);
            }
        }
        out.refresh_sum();
        out
    }
}

/// A criterion value with the profile it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmResult {
    pub quality: f64,
    pub profile: DistanceProfile,
}

/// Distance profile of `plan` under the `p`-norm, stored with exponent `q`.
pub fn pairwise_distances(plan: &SamplingPlan, q: f64, p: f64) -> Result<DistanceProfile> {
    DistanceProfile::from_plan(plan, q, p)
}

/// Standard Morris-Mitchell criterion.
pub fn mmphi(plan: &SamplingPlan, q: f64, p: f64) -> Result<MmResult> {
    let profile = DistanceProfile::from_plan(plan, q, p)?;
    Ok(MmResult {
        quality: profile.phi(),
        profile,
    })
}

/// Intensive (pair-count normalized) Morris-Mitchell criterion.
pub fn mmphi_intensive(plan: &SamplingPlan, q: f64, p: f64) -> Result<MmResult> {
    let profile = DistanceProfile::from_plan(plan, q, p)?;
    Ok(MmResult {
        quality: profile.phi_intensive(),
        profile,
    })
}

/// Like [`mmphi_intensive`] but returns `+inf` for designs with coincident points.
pub fn mmphi_intensive_lenient(plan: &SamplingPlan, q: f64, p: f64) -> Result<f64> {
    match DistanceProfile::from_plan(plan, q, p) {
        Ok(profile) => Ok(profile.phi_intensive()),
        Err(Error::DuplicatePoints(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Distances from `point` to every row of `plan`.
pub fn distances_to(plan: &SamplingPlan, point: &[f64], p: f64) -> Result<Vec<f64>> {
    if point.len() != plan.k() {
        return Err(invalid_arg(format!(
            "point has dimension {}, plan has {}",
            point.len(),
            plan.k()
        )));
    }
    if point.iter().any(|v| !v.is_finite()) {
        return Err(invalid_arg("point has non-finite coordinates"));
    }
    Ok(plan
        .points()
        .rows()
        .into_iter()
        .map(|row| distance(row.iter().copied(), point.iter().copied(), p))
        .collect())
}

fn check_profile(plan: &SamplingPlan, profile: &DistanceProfile) -> Result<()> {
    let n = plan.n() as u64;
    if profile.pairs() != n * n.saturating_sub(1) / 2 {
        return Err(invalid_arg(format!(
            "profile has {} pairs but the plan has {n} points",
            profile.pairs()
        )));
    }
    Ok(())
}

fn duplicate_pairs(new_distances: &[f64], new_index: usize) -> Vec<(usize, usize)> {
    new_distances
        .iter()
        .enumerate()
        .filter(|(_, d)| **d < DUPLICATE_TOLERANCE)
        .map(|(i, _)| (i, new_index))
        .collect()
}

/// Intensive criterion of `plan` plus `new_point`, computed from the base
/// `profile` and the `n` new distances only.
pub fn mmphi_intensive_update(
    plan: &SamplingPlan,
    new_point: &[f64],
    profile: &DistanceProfile,
) -> Result<MmResult> {
    check_profile(plan, profile)?;
    let new_distances = distances_to(plan, new_point, profile.p())?;
    let dups = duplicate_pairs(&new_distances, plan.n());
    if !dups.is_empty() {
        return Err(Error::DuplicatePoints(dups));
    }
    let profile = profile.merged(&new_distances);
    Ok(MmResult {
        quality: profile.phi_intensive(),
        profile,
    })
}

/// `phi*(X) - phi*(X + x)`: positive when adding `x` makes the design fill space better.
///
/// Coincident points yield `-inf` under [`DuplicatePolicy::Lenient`].
pub fn mm_improvement(
    plan: &SamplingPlan,
    x: &[f64],
    profile: &DistanceProfile,
    policy: DuplicatePolicy,
) -> Result<f64> {
    check_profile(plan, profile)?;
    let new_distances = distances_to(plan, x, profile.p())?;
    let dups = duplicate_pairs(&new_distances, plan.n());
    if !dups.is_empty() {
        return match policy {
            DuplicatePolicy::Strict => Err(Error::DuplicatePoints(dups)),
            DuplicatePolicy::Lenient => Ok(f64::NEG_INFINITY),
        };
    }
    Ok(profile.phi_intensive() - profile.phi_intensive_with(&new_distances))
}
