//! Derringer-Suich desirability functions.
//!
//! Each objective value is mapped into `[0, 1]` by a maximize, minimize or
//! target-is-best transform; the overall desirability is the unweighted
//! geometric mean of the individual values and is zero whenever any single
//! objective is unacceptable.

use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};

/// `((f - low) / (high - low))^scale` on `[low, high]`, 0 below, 1 above.
pub fn d_max(f: f64, low: f64, high: f64, scale: f64) -> f64 {
    if f.is_nan() || f < low {
        0.0
    } else if f > high {
        1.0
    } else {
        ((f - low) / (high - low)).powf(scale)
    }
}

/// `((f - high) / (low - high))^scale` on `[low, high]`, 1 below, 0 above.
pub fn d_min(f: f64, low: f64, high: f64, scale: f64) -> f64 {
    if f.is_nan() || f > high {
        0.0
    } else if f < low {
        1.0
    } else {
        ((f - high) / (low - high)).powf(scale)
    }
}

/// Rises on `[low, target]` with exponent `scale_left`, falls on `[target, high]`
/// with exponent `scale_right`, zero outside.
pub fn d_target(f: f64, low: f64, target: f64, high: f64, scale_left: f64, scale_right: f64) -> f64 {
    if f.is_nan() || f < low || f > high {
        0.0
    } else if f <= target {
        ((f - low) / (target - low)).powf(scale_left)
    } else {
        ((f - high) / (target - high)).powf(scale_right)
    }
}

/// One objective's desirability transform.
///
/// Serialized with a `goal` tag (`max`/`min`/`target`, long forms accepted) and
/// the keys `low`, `high`, `target`, `scale`, `scale_left`, `scale_right`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub enum DesirabilitySpec {
    Maximize {
        low: f64,
        high: f64,
        scale: f64,
    },
    Minimize {
        low: f64,
        high: f64,
        scale: f64,
    },
    Target {
        low: f64,
        target: f64,
        high: f64,
        scale_left: f64,
        scale_right: f64,
    },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid_arg(format!("{name} must be positive, got {v}")))
    }
}

fn ordered(low: f64, high: f64) -> Result<()> {
    if low.is_finite() && high.is_finite() && low < high {
        Ok(())
    } else {
        Err(invalid_arg(format!("need low < high, got {low} and {high}")))
    }
}

impl DesirabilitySpec {
    pub fn maximize(low: f64, high: f64, scale: f64) -> Result<Self> {
        ordered(low, high)?;
        positive("scale", scale)?;
        Ok(Self::Maximize { low, high, scale })
    }

    pub fn minimize(low: f64, high: f64, scale: f64) -> Result<Self> {
        ordered(low, high)?;
        positive("scale", scale)?;
        Ok(Self::Minimize { low, high, scale })
    }

    pub fn target(low: f64, target: f64, high: f64, scale_left: f64, scale_right: f64) -> Result<Self> {
        ordered(low, target)?;
        ordered(target, high)?;
        positive("scale_left", scale_left)?;
        positive("scale_right", scale_right)?;
        Ok(Self::Target {
            low,
            target,
            high,
            scale_left,
            scale_right,
        })
    }

    fn validate(self) -> Result<Self> {
        match self {
            Self::Maximize { low, high, scale } => Self::maximize(low, high, scale),
            Self::Minimize { low, high, scale } => Self::minimize(low, high, scale),
            Self::Target {
                low,
                target,
                high,
                scale_left,
                scale_right,
            } => Self::target(low, target, high, scale_left, scale_right),
        }
    }

    pub fn evaluate(&self, f: f64) -> f64 {
        match *self {
            Self::Maximize { low, high, scale } => d_max(f, low, high, scale),
            Self::Minimize { low, high, scale } => d_min(f, low, high, scale),
            Self::Target {
                low,
                target,
                high,
                scale_left,
                scale_right,
            } => d_target(f, low, target, high, scale_left, scale_right),
        }
    }

    /// `(low, high)` of the support.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Maximize { low, high, .. }
            | Self::Minimize { low, high, .. }
            | Self::Target { low, high, .. } => (low, high),
        }
    }

    pub fn goal_name(&self) -> &'static str {
        match self {
            Self::Maximize { .. } => "max",
            Self::Minimize { .. } => "min",
            Self::Target { .. } => "target",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum Goal {
    #[serde(rename = "max", alias = "maximize")]
    Max,
    #[serde(rename = "min", alias = "minimize")]
    Min,
    #[serde(rename = "target")]
    Target,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    goal: Goal,
    low: f64,
    high: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale_left: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale_right: Option<f64>,
}

impl TryFrom<RawSpec> for DesirabilitySpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let spec = match raw.goal {
            Goal::Max => Self::Maximize {
                low: raw.low,
                high: raw.high,
                scale: raw.scale.unwrap_or(1.0),
            },
            Goal::Min => Self::Minimize {
                low: raw.low,
                high: raw.high,
                scale: raw.scale.unwrap_or(1.0),
            },
            Goal::Target => Self::Target {
                low: raw.low,
                target: raw
                    .target
                    .ok_or_else(|| invalid_arg("target goal needs a 'target' value"))?,
                high: raw.high,
                scale_left: raw.scale_left.or(raw.scale).unwrap_or(1.0),
                scale_right: raw.scale_right.or(raw.scale).unwrap_or(1.0),
            },
        };
        spec.validate()
    }
}

impl From<DesirabilitySpec> for RawSpec {
    fn from(spec: DesirabilitySpec) -> Self {
        match spec {
            DesirabilitySpec::Maximize { low, high, scale } => RawSpec {
                goal: Goal::Max,
                low,
                high,
                target: None,
                scale: Some(scale),
                scale_left: None,
                scale_right: None,
            },
            DesirabilitySpec::Minimize { low, high, scale } => RawSpec {
                goal: Goal::Min,
                low,
                high,
                target: None,
                scale: Some(scale),
                scale_left: None,
                scale_right: None,
            },
            DesirabilitySpec::Target {
                low,
                target,
                high,
                scale_left,
                scale_right,
            } => RawSpec {
                goal: Goal::Target,
                low,
                high,
                target: Some(target),
                scale: None,
                scale_left: Some(scale_left),
                scale_right: Some(scale_right),
            },
        }
    }
}

/// Geometric mean of individual desirabilities.
pub fn overall(d: &[f64]) -> Result<f64> {
    if d.is_empty() {
        return Err(invalid_arg("overall desirability needs at least one value"));
    }
    if let Some(v) = d.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(invalid_arg(format!("desirability {v} is outside [0, 1]")));
    }
    if d.contains(&0.0) {
        return Ok(0.0);
    }
    let product: f64 = d.iter().product();
    Ok(product.powf(1.0 / d.len() as f64))
}

/// Transforms for `R` objectives combined by [`overall`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallDesirability {
    specs: Vec<DesirabilitySpec>,
}

impl OverallDesirability {
    pub fn new(specs: Vec<DesirabilitySpec>) -> Result<Self> {
        if specs.is_empty() {
            return Err(invalid_arg("need at least one desirability spec"));
        }
        Ok(Self { specs })
    }

    pub fn specs(&self) -> &[DesirabilitySpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    /// Individual desirabilities of an objective vector.
    pub fn individual(&self, objectives: &[f64]) -> Result<Vec<f64>> {
        if objectives.len() != self.specs.len() {
            return Err(invalid_arg(format!(
                "{} objective values for {} desirability specs",
                objectives.len(),
                self.specs.len()
            )));
        }
        Ok(self
            .specs
            .iter()
            .zip(objectives)
            .map(|(s, f)| s.evaluate(*f))
            .collect())
    }

    pub fn evaluate(&self, objectives: &[f64]) -> Result<f64> {
        overall(&self.individual(objectives)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn maximize_examples() {
        assert_eq!(d_max(0.0, 0.0, 1.1, 5.0), 0.0);
        assert_eq!(d_max(1.2, 0.0, 1.1, 5.0), 1.0);
        assert!((d_max(0.55, 0.0, 1.1, 5.0) - 0.03125).abs() <= 1e-15);
        assert_eq!(d_max(1.1, 0.0, 1.1, 5.0), 1.0);
        assert_eq!(d_max(-0.1, 0.0, 1.1, 5.0), 0.0);
    }

    #[test]
    fn minimize_examples() {
        assert_eq!(d_min(0.1, 0.2, 0.8, 1.0), 1.0);
        assert_eq!(d_min(0.9, 0.2, 0.8, 1.0), 0.0);
        assert!((d_min(0.5, 0.2, 0.8, 1.0) - 0.5).abs() <= 1e-15);
        assert_eq!(d_min(0.2, 0.2, 0.8, 1.0), 1.0);
        assert_eq!(d_min(0.8, 0.2, 0.8, 1.0), 0.0);
    }

    #[test]
    fn target_examples() {
        assert_eq!(d_target(0.5, 0.0, 0.5, 1.0, 1.0, 1.0), 1.0);
        assert_eq!(d_target(1.2, 0.0, 0.5, 1.0, 1.0, 1.0), 0.0);
        assert!((d_target(0.25, 0.0, 0.5, 1.0, 1.0, 1.0) - 0.5).abs() <= 1e-15);
        assert_eq!(d_target(0.0, 0.0, 0.5, 1.0, 2.0, 3.0), 0.0);
        assert_eq!(d_target(1.0, 0.0, 0.5, 1.0, 2.0, 3.0), 0.0);
    }

    #[test]
    fn nan_is_unacceptable() {
        assert_eq!(d_max(f64::NAN, 0.0, 1.0, 1.0), 0.0);
        assert_eq!(d_min(f64::NAN, 0.0, 1.0, 1.0), 0.0);
        assert_eq!(d_target(f64::NAN, 0.0, 0.5, 1.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn overall_examples() {
        assert_eq!(overall(&[0.5, 0.5]).unwrap(), 0.5);
        assert_eq!(overall(&[0.0, 0.9]).unwrap(), 0.0);
        assert_eq!(overall(&[0.25, 1.0]).unwrap(), 0.5);
        assert_eq!(overall(&[0.37]).unwrap(), 0.37);
        assert!(overall(&[1.2, 0.5]).is_err());
        assert!(overall(&[-0.1]).is_err());
        assert!(overall(&[]).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(DesirabilitySpec::maximize(1.0, 0.0, 1.0).is_err());
        assert!(DesirabilitySpec::maximize(0.0, 1.0, 0.0).is_err());
        assert!(DesirabilitySpec::target(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(DesirabilitySpec::target(0.0, 0.5, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn json_round_trip_and_aliases() {
        let spec: DesirabilitySpec =
            serde_json::from_str(r#"{"goal":"maximize","low":0.0,"high":1.1,"scale":5}"#).unwrap();
        assert_eq!(spec, DesirabilitySpec::maximize(0.0, 1.1, 5.0).unwrap());
        let t: DesirabilitySpec = serde_json::from_str(
            r#"{"goal":"target","low":0,"target":0.4,"high":1,"scale_left":2,"scale_right":0.5}"#,
        )
        .unwrap();
        let back: DesirabilitySpec = serde_json::from_value(serde_json::to_value(&t).unwrap()).unwrap();
        assert_eq!(t, back);
        assert!(serde_json::from_str::<DesirabilitySpec>(r#"{"goal":"max","low":2,"high":1}"#).is_err());
        assert!(serde_json::from_str::<DesirabilitySpec>(r#"{"goal":"target","low":0,"high":1}"#).is_err());
    }

    #[test]
    fn combined_evaluation() {
        let od = OverallDesirability::new(vec![
            DesirabilitySpec::maximize(0.0, 1.0, 1.0).unwrap(),
            DesirabilitySpec::maximize(0.0, 1.0, 1.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(od.evaluate(&[0.25, 1.0]).unwrap(), 0.5);
        assert_eq!(od.evaluate(&[-0.5, 1.0]).unwrap(), 0.0);
        assert!(od.evaluate(&[0.5]).is_err());
    }

    proptest! {
        #[test]
        fn transforms_stay_in_unit_interval(f in -1e6f64..1e6, low in -10.0f64..10.0, w in 0.01f64..10.0,
                                            s in 0.05f64..10.0, s2 in 0.05f64..10.0, frac in 0.01f64..0.99) {
            let high = low + w;
            let target = low + frac * w;
            for v in [d_max(f, low, high, s), d_min(f, low, high, s), d_target(f, low, target, high, s, s2)] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }

        #[test]
        fn monotone_shapes(a in -2.0f64..3.0, b in -2.0f64..3.0, s in 0.1f64..8.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(d_max(lo, 0.0, 1.0, s) <= d_max(hi, 0.0, 1.0, s));
            prop_assert!(d_min(lo, 0.0, 1.0, s) >= d_min(hi, 0.0, 1.0, s));
            if hi <= 0.4 {
                prop_assert!(d_target(lo, 0.0, 0.4, 1.0, s, s) <= d_target(hi, 0.0, 0.4, 1.0, s, s));
            }
            if lo >= 0.4 {
                prop_assert!(d_target(lo, 0.0, 0.4, 1.0, s, s) >= d_target(hi, 0.0, 0.4, 1.0, s, s));
            }
        }

        #[test]
        fn larger_scale_is_harder(f in 0.01f64..0.99, s in 0.1f64..5.0, ds in 0.1f64..5.0) {
            prop_assert!(d_max(f, 0.0, 1.0, s + ds) < d_max(f, 0.0, 1.0, s));
        }

        #[test]
        fn boundary_limits_from_inside(s in 0.2f64..5.0) {
            let eps = 1e-9;
            prop_assert!((d_max(1.0 - eps, 0.0, 1.0, s) - d_max(1.0, 0.0, 1.0, s)).abs() < 1e-6);
            prop_assert!((d_max(eps, 0.0, 1.0, s) - d_max(0.0, 0.0, 1.0, s)).abs() < 1e-1);
            prop_assert!((d_min(eps, 0.0, 1.0, s) - d_min(0.0, 0.0, 1.0, s)).abs() < 1e-6);
            prop_assert!((d_target(0.5 - eps, 0.0, 0.5, 1.0, s, s) - 1.0).abs() < 1e-6);
            prop_assert!((d_target(0.5 + eps, 0.0, 0.5, 1.0, s, s) - 1.0).abs() < 1e-6);
        }

        #[test]
        fn overall_is_symmetric(mut v in proptest::collection::vec(0.0f64..=1.0, 1..6)) {
            let a = overall(&v).unwrap();
            v.reverse();
            let b = overall(&v).unwrap();
            prop_assert!((a - b).abs() <= 1e-15);
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
