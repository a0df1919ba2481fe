//! Sampling plans in the unit cube: construction, validation, normalization,
//! Latin hypercube generation and maximin-style optimization, plus synthetic
//! clustered datasets that mimic unplanned industrial designs.

use std::collections::HashSet;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid_arg, invalid_data, Error, Result};
use crate::rng;
use crate::spacefill::{self, minkowski_distance};

/// An `n x k` design with every coordinate in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    points: Array2<f64>,
    feature_names: Vec<String>,
}

impl SamplingPlan {
    /// Wraps `points` with the default feature names `x1..xk`.
    pub fn new(points: Array2<f64>) -> Result<Self> {
        let names = default_names("x", points.ncols());
        Self::with_names(points, names)
    }

    pub fn with_names(points: Array2<f64>, feature_names: Vec<String>) -> Result<Self> {
        if points.ncols() == 0 {
            return Err(invalid_arg("sampling plan needs at least one column"));
        }
        if feature_names.len() != points.ncols() {
            return Err(invalid_arg(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                points.ncols()
            )));
        }
        let unique: HashSet<&str> = feature_names.iter().map(String::as_str).collect();
        if unique.len() != feature_names.len() {
            return Err(invalid_arg("feature names must be unique"));
        }
        for ((i, j), v) in points.indexed_iter() {
            if !v.is_finite() {
                return Err(invalid_data(format!("non-finite value at row {i}, column {j}")));
            }
            if !(0.0..=1.0).contains(v) {
                return Err(invalid_data(format!(
                    "value {v} at row {i}, column {j} is outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            points,
            feature_names,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows_to_array(rows)?)
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn into_points(self) -> Array2<f64> {
        self.points
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Number of design points.
    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    /// Number of features.
    pub fn k(&self) -> usize {
        self.points.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.points.row(i)
    }

    /// A copy of this plan with `point` appended as the last row.
    pub fn with_point(&self, point: &[f64]) -> Result<Self> {
        if point.len() != self.k() {
            return Err(invalid_arg(format!(
                "point has dimension {}, plan has {}",
                point.len(),
                self.k()
            )));
        }
        let mut points = self.points.clone();
        points
            .push_row(ArrayView1::from(point))
            .map_err(|e| invalid_arg(e.to_string()))?;
        Self::with_names(points, self.feature_names.clone())
    }
}

/// Axis-aligned box `low[i] <= x[i] <= high[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    low: Vec<f64>,
    high: Vec<f64>,
}

impl Bounds {
    pub fn new(low: Vec<f64>, high: Vec<f64>) -> Result<Self> {
        if low.len() != high.len() || low.is_empty() {
            return Err(invalid_arg("bounds need matching, non-empty low and high vectors"));
        }
        for (i, (l, h)) in low.iter().zip(&high).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(invalid_arg(format!("bounds[{i}]: need low < high, got {l} and {h}")));
            }
        }
        Ok(Self { low, high })
    }

    /// The unit cube `[0, 1]^k`.
    pub fn unit(k: usize) -> Self {
        Self {
            low: vec![0.0; k],
            high: vec![1.0; k],
        }
    }

    /// Column-wise minimum and maximum of `raw`. Constant columns get a unit width.
    pub fn from_data(raw: ArrayView2<'_, f64>) -> Result<Self> {
        if raw.nrows() == 0 {
            return Err(invalid_data("cannot derive bounds from an empty matrix"));
        }
        let mut low = Vec::with_capacity(raw.ncols());
        let mut high = Vec::with_capacity(raw.ncols());
        for col in raw.axis_iter(Axis(1)) {
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(invalid_data("non-finite values in data"));
            }
            low.push(lo);
            high.push(if hi > lo { hi } else { lo + 1.0 });
        }
        Self::new(low, high)
    }

    pub fn k(&self) -> usize {
        self.low.len()
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    pub fn high(&self) -> &[f64] {
        &self.high
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.k()
            && x
                .iter()
                .zip(self.low.iter().zip(&self.high))
                .all(|(v, (l, h))| *l <= *v && *v <= *h)
    }
}

/// Maps raw data into the unit cube with `(x - low) / (high - low)`, clipped to `[0, 1]`.
pub fn normalize(raw: ArrayView2<'_, f64>, bounds: &Bounds) -> Result<SamplingPlan> {
    if raw.ncols() != bounds.k() {
        return Err(invalid_arg(format!(
            "data has {} columns, bounds have {}",
            raw.ncols(),
            bounds.k()
        )));
    }
    if let Some(((i, j), _)) = raw.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(invalid_data(format!("non-finite value at row {i}, column {j}")));
    }
    let mut out = raw.to_owned();
    for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
        let (lo, hi) = (bounds.low[j], bounds.high[j]);
        col.mapv_inplace(|v| ((v - lo) / (hi - lo)).clamp(0.0, 1.0));
    }
    SamplingPlan::new(out)
}

/// Inverse of [`normalize`] for in-range data.
pub fn denormalize(plan: &SamplingPlan, bounds: &Bounds) -> Result<Array2<f64>> {
    if plan.k() != bounds.k() {
        return Err(invalid_arg("plan and bounds dimensions differ"));
    }
    let mut out = plan.points().clone();
    for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
        let (lo, hi) = (bounds.low[j], bounds.high[j]);
        col.mapv_inplace(|v| lo + v * (hi - lo));
    }
    Ok(out)
}

/// Latin hypercube with one point per stratum `[i/n, (i+1)/n)` in every column.
///
/// Centered plans put each point at its stratum midpoint `(i + 0.5) / n`; otherwise
/// the position inside the stratum is uniform.
pub fn generate_lhs(n: usize, k: usize, seed: u64, centered: bool) -> Result<SamplingPlan> {
    if n < 2 {
        return Err(invalid_arg(format!("LHS needs n >= 2, got {n}")));
    }
    if k < 1 {
        return Err(invalid_arg("LHS needs k >= 1"));
    }
    let mut rng = rng::seeded(seed);
    let mut points = Array2::zeros((n, k));
    let mut strata: Vec<usize> = (0..n).collect();
    for j in 0..k {
        strata.shuffle(&mut rng);
        for (i, &s) in strata.iter().enumerate() {
            let offset = if centered { 0.5 } else { rng.random::<f64>() };
            points[[i, j]] = (s as f64 + offset) / n as f64;
        }
    }
    SamplingPlan::new(points)
}

/// Centered LHS improved by column-swap hill climbing on the intensive criterion.
///
/// Each step swaps two entries of one randomly chosen column, which keeps the
/// Latin hypercube property, and is kept only if the criterion decreases.
pub fn optimize_lhs(
    n: usize,
    k: usize,
    q: f64,
    p: f64,
    iterations: usize,
    seed: u64,
) -> Result<SamplingPlan> {
    let start = generate_lhs(n, k, seed, true)?;
    improve_by_column_swaps(&start, q, p, iterations, seed.wrapping_add(0x9e37_79b9_7f4a_7c15))
}

/// Column-swap local search starting from `start`. The returned plan never has a
/// larger intensive criterion than `start`.
pub fn improve_by_column_swaps(
    start: &SamplingPlan,
    q: f64,
    p: f64,
    iterations: usize,
    seed: u64,
) -> Result<SamplingPlan> {
    spacefill::check_exponents(q, p)?;
    let n = start.n();
    let k = start.k();
    if n < 2 {
        return Err(invalid_arg("optimization needs n >= 2"));
    }
    let start_quality = spacefill::mmphi_intensive(start, q, p)?.quality;
    if n == 2 {
        return Ok(start.clone());
    }

    let mut x = start.points().clone();
    let mut terms = Array2::<f64>::zeros((n, n));
    let mut total = 0.0;
    for a in 0..n {
        for b in (a + 1)..n {
            let t = minkowski_distance(x.row(a), x.row(b), p).powf(-q);
            terms[[a, b]] = t;
            terms[[b, a]] = t;
            total += t;
        }
    }

    let mut rng = rng::seeded(seed);
    let mut new_a = vec![0.0; n];
    let mut new_b = vec![0.0; n];
    for _ in 0..iterations {
        let col = rng.random_range(0..k);
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        x.swap([a, col], [b, col]);
        // Only pairs involving a or b change; the (a, b) distance is swap-invariant.
        let mut delta = 0.0;
        for j in 0..n {
            if j == a || j == b {
                continue;
            }
            new_a[j] = minkowski_distance(x.row(a), x.row(j), p).powf(-q);
            new_b[j] = minkowski_distance(x.row(b), x.row(j), p).powf(-q);
            delta += new_a[j] - terms[[a, j]] + new_b[j] - terms[[b, j]];
        }
        if delta < -1e-12 * total {
            for j in 0..n {
                if j == a || j == b {
                    continue;
                }
                terms[[a, j]] = new_a[j];
                terms[[j, a]] = new_a[j];
                terms[[b, j]] = new_b[j];
                terms[[j, b]] = new_b[j];
            }
            total += delta;
        } else {
            x.swap([a, col], [b, col]);
        }
    }

    let plan = SamplingPlan::with_names(x, start.feature_names().to_vec())?;
    let quality = spacefill::mmphi_intensive(&plan, q, p)?.quality;
    if quality > start_quality {
        return Ok(start.clone());
    }
    Ok(plan)
}

/// Fraction of a clustered design placed on axis-aligned lanes.
pub const LANE_FRACTION: f64 = 0.2;

/// Synthetic "unplanned" design: isotropic Gaussian clusters truncated to the
/// unit cube, plus [`LANE_FRACTION`] of the points on axis-aligned lanes that
/// start from a cluster center and vary a single coordinate.
pub fn generate_clustered_design(
    n: usize,
    k: usize,
    n_clusters: usize,
    spread: f64,
    seed: u64,
) -> Result<SamplingPlan> {
    if n < 2 || k < 1 || n_clusters < 1 {
        return Err(invalid_arg(format!(
            "clustered design needs n >= 2, k >= 1, n_clusters >= 1 (got {n}, {k}, {n_clusters})"
        )));
    }
    if !(spread > 0.0 && spread < 0.5) {
        return Err(invalid_arg(format!("spread must lie in (0, 0.5), got {spread}")));
    }
    let mut rng = rng::seeded(seed);
    let centers: Vec<Vec<f64>> = (0..n_clusters)
        .map(|_| (0..k).map(|_| rng.random_range(0.15..0.85)).collect())
        .collect();
    let noise = Normal::new(0.0, spread).map_err(|e| invalid_arg(e.to_string()))?;

    let n_lanes_points = if k > 1 {
        (LANE_FRACTION * n as f64).round() as usize
    } else {
        0
    };
    let n_cluster_points = n - n_lanes_points;
    let mut points = Array2::zeros((n, k));

    for i in 0..n_cluster_points {
        let center = &centers[i % n_clusters];
        for j in 0..k {
            let mut v = f64::NAN;
            for _ in 0..100 {
                let candidate = center[j] + noise.sample(&mut rng);
                if (0.0..=1.0).contains(&candidate) {
                    v = candidate;
                    break;
                }
            }
            points[[i, j]] = if v.is_nan() { center[j].clamp(0.0, 1.0) } else { v };
        }
    }

    if n_lanes_points > 0 {
        let n_lanes = n_clusters.clamp(1, 3);
        let lanes: Vec<(usize, usize)> = (0..n_lanes)
            .map(|l| (l % n_clusters, rng.random_range(0..k)))
            .collect();
        for i in 0..n_lanes_points {
            let (c, axis) = lanes[i % n_lanes];
            let row = n_cluster_points + i;
            for j in 0..k {
                points[[row, j]] = if j == axis {
                    rng.random::<f64>()
                } else {
                    centers[c][j]
                };
            }
        }
    }

    SamplingPlan::new(points)
}

/// A design together with normalized target observations.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub x: SamplingPlan,
    /// `n x p` targets, each column min-max scaled to `[0, 1]`.
    pub z: Array2<f64>,
    pub target_names: Vec<String>,
}

/// First synthetic response: a broad bump at `0.7` and a narrower one at `0.25`.
pub fn synthetic_target_bumps(x: &[f64]) -> f64 {
    let k = x.len() as f64;
    let sq = |c: f64| x.iter().map(|v| (v - c).powi(2)).sum::<f64>();
    (-sq(0.7) / (0.08 * k)).exp() + 0.6 * (-sq(0.25) / (0.03 * k)).exp()
}

/// Second synthetic response: coupled sine ridges plus a bump near `0.2`.
pub fn synthetic_target_ridges(x: &[f64]) -> f64 {
    let k = x.len();
    let ridges = (0..k)
        .map(|i| {
            let next = x[(i + 1) % k];
            (2.0 * std::f64::consts::PI * x[i] + std::f64::consts::FRAC_PI_4).sin()
                * (0.5 + 0.5 * next)
        })
        .sum::<f64>()
        / k as f64;
    let sq = x.iter().map(|v| (v - 0.2).powi(2)).sum::<f64>();
    ridges + (-sq / (0.05 * k as f64)).exp()
}

/// Evaluates both synthetic responses on `x`, adds Gaussian noise with standard
/// deviation `noise` and min-max scales each column to `[0, 1]`.
pub fn generate_synthetic_targets(
    x: &SamplingPlan,
    noise: f64,
    seed: u64,
) -> Result<SyntheticDataset> {
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(invalid_arg(format!("noise must be finite and >= 0, got {noise}")));
    }
    let responses: [fn(&[f64]) -> f64; 2] = [synthetic_target_bumps, synthetic_target_ridges];
    let n = x.n();
    let mut z = Array2::zeros((n, responses.len()));
    let mut rng = rng::seeded(seed);
    let gauss = Normal::new(0.0, noise.max(f64::MIN_POSITIVE)).map_err(|e| invalid_arg(e.to_string()))?;
    for i in 0..n {
        let row: Vec<f64> = x.row(i).to_vec();
        for (t, f) in responses.iter().enumerate() {
            let eps = if noise > 0.0 { gauss.sample(&mut rng) } else { 0.0 };
            z[[i, t]] = f(&row) + eps;
        }
    }
    for mut col in z.axis_iter_mut(Axis(1)) {
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let range = hi - lo;
        col.mapv_inplace(|v| if range > 0.0 { (v - lo) / range } else { 0.0 });
    }
    Ok(SyntheticDataset {
        x: x.clone(),
        z,
        target_names: default_names("z", responses.len()),
    })
}

/// `prefix1 .. prefixN`.
pub fn default_names(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

pub(crate) fn rows_to_array(rows: &[Vec<f64>]) -> Result<Array2<f64>> {
    let k = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != k) {
        return Err(invalid_arg("rows have different lengths"));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((rows.len(), k), flat).map_err(|e| invalid_arg(e.to_string()))
}

/// Reads a numeric CSV with a header row. Returns the column names and the values.
pub fn read_csv_matrix(path: impl AsRef<Path>) -> Result<(Vec<String>, Array2<f64>)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| invalid_data(format!("cannot open {}: {e}", path.display())))?;
    parse_csv_matrix(file)
}

pub fn parse_csv_matrix(reader: impl std::io::Read) -> Result<(Vec<String>, Array2<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_error(e, 1))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::Parse {
            line: 1,
            message: "missing header row".into(),
        });
    }
    let mut values = Vec::new();
    let mut rows = 0;
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(e, rows as u64 + 2))?;
        let line = record.position().map_or(rows as u64 + 2, |p| p.line());
        if record.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("column '{}': cannot parse '{field}' as a number", header[j]),
            })?;
            values.push(v);
        }
        rows += 1;
    }
    let matrix = Array2::from_shape_vec((rows, header.len()), values)
        .map_err(|e| invalid_data(e.to_string()))?;
    Ok((header, matrix))
}

fn csv_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Writes `values` with a header row.
pub fn write_csv_matrix(
    path: impl AsRef<Path>,
    header: &[String],
    values: ArrayView2<'_, f64>,
) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
    wtr.write_record(header).map_err(|e| Error::Io(e.into()))?;
    for row in values.rows() {
        wtr.write_record(row.iter().map(|v| v.to_string()))
            .map_err(|e| Error::Io(e.into()))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Stratum index of every entry, `floor(v * n)` clamped to `n - 1`.
pub fn stratum_indices(column: ArrayView1<'_, f64>) -> Array1<usize> {
    let n = column.len();
    column.mapv(|v| ((v * n as f64).floor() as usize).min(n - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn is_latin(plan: &SamplingPlan) -> bool {
        plan.points().axis_iter(Axis(1)).all(|col| {
            let mut s = stratum_indices(col).to_vec();
            s.sort_unstable();
            s == (0..plan.n()).collect::<Vec<_>>()
        })
    }

    #[test]
    fn centered_two_point_lhs() {
        let plan = generate_lhs(2, 1, 7, true).unwrap();
        let mut col = plan.points().column(0).to_vec();
        col.sort_by(f64::total_cmp);
        assert_eq!(col, vec![0.25, 0.75]);
    }

    #[test]
    fn lhs_is_deterministic() {
        let a = generate_lhs(4, 2, 11, false).unwrap();
        let b = generate_lhs(4, 2, 11, false).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_lhs(4, 2, 12, false).unwrap());
    }

    #[test]
    fn centered_lhs_columns_are_stratum_midpoints() {
        let plan = generate_lhs(50, 2, 3, true).unwrap();
        for col in plan.points().axis_iter(Axis(1)) {
            let mut v = col.to_vec();
            v.sort_by(f64::total_cmp);
            for (i, x) in v.iter().enumerate() {
                assert_eq!(*x, (i as f64 + 0.5) / 50.0);
            }
        }
    }

    #[test]
    fn uncentered_lhs_keeps_one_point_per_stratum() {
        let plan = generate_lhs(37, 4, 5, false).unwrap();
        assert!(is_latin(&plan));
    }

    #[test]
    fn lhs_rejects_bad_sizes() {
        assert!(matches!(generate_lhs(1, 2, 0, true), Err(Error::InvalidArgument(_))));
        assert!(matches!(generate_lhs(5, 0, 0, true), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn optimize_lhs_two_points_unchanged() {
        let start = generate_lhs(2, 3, 1, true).unwrap();
        let out = improve_by_column_swaps(&start, 2.0, 2.0, 100, 1).unwrap();
        assert_eq!(out, start);
    }

    #[test]
    fn optimize_lhs_preserves_latin_property() {
        let plan = optimize_lhs(10, 2, 2.0, 2.0, 500, 4).unwrap();
        assert!(is_latin(&plan));
    }

    #[test]
    fn optimize_lhs_does_not_worsen_start() {
        for seed in 0..5 {
            let start = generate_lhs(30, 3, seed, true).unwrap();
            let out = improve_by_column_swaps(&start, 2.0, 2.0, 300, seed).unwrap();
            let q0 = spacefill::mmphi_intensive(&start, 2.0, 2.0).unwrap().quality;
            let q1 = spacefill::mmphi_intensive(&out, 2.0, 2.0).unwrap().quality;
            assert!(q1 <= q0);
            assert!(is_latin(&out));
        }
    }

    #[test]
    fn normalize_maps_bounds_to_unit_cube() {
        let bounds = Bounds::new(vec![-2.0, 10.0], vec![2.0, 20.0]).unwrap();
        let raw = array![[-2.0, 10.0], [2.0, 20.0], [0.0, 15.0], [5.0, 0.0]];
        let plan = normalize(raw.view(), &bounds).unwrap();
        assert_eq!(plan.row(0).to_vec(), vec![0.0, 0.0]);
        assert_eq!(plan.row(1).to_vec(), vec![1.0, 1.0]);
        assert_eq!(plan.row(2).to_vec(), vec![0.5, 0.5]);
        // clipped
        assert_eq!(plan.row(3).to_vec(), vec![1.0, 0.0]);
    }

    #[test]
    fn normalize_rejects_non_finite() {
        let bounds = Bounds::unit(2);
        let raw = array![[0.1, f64::NAN]];
        assert!(matches!(normalize(raw.view(), &bounds), Err(Error::InvalidData(_))));
    }

    #[test]
    fn bounds_require_low_below_high() {
        assert!(Bounds::new(vec![0.0], vec![0.0]).is_err());
        assert!(Bounds::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn plan_validation() {
        assert!(SamplingPlan::new(array![[0.0, 1.5]]).is_err());
        assert!(SamplingPlan::with_names(array![[0.0, 0.5]], vec!["a".into(), "a".into()]).is_err());
        let plan = SamplingPlan::new(array![[0.0, 0.5]]).unwrap();
        assert_eq!(plan.feature_names(), &["x1".to_string(), "x2".to_string()]);
        let grown = plan.with_point(&[0.3, 0.3]).unwrap();
        assert_eq!(grown.n(), 2);
        assert!(plan.with_point(&[0.3]).is_err());
    }

    #[test]
    fn clustered_design_is_deterministic_and_valid() {
        let a = generate_clustered_design(213, 2, 5, 0.03, 9).unwrap();
        let b = generate_clustered_design(213, 2, 5, 0.03, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n(), 213);
        assert!(generate_clustered_design(10, 2, 0, 0.03, 9).is_err());
        assert!(generate_clustered_design(10, 2, 2, 0.5, 9).is_err());
    }

    #[test]
    fn collapsed_cluster_triggers_duplicate_detection() {
        let plan = generate_clustered_design(40, 2, 1, 1e-15, 3).unwrap();
        assert!(matches!(
            spacefill::mmphi_intensive(&plan, 2.0, 2.0),
            Err(Error::DuplicatePoints(_))
        ));
    }

    #[test]
    fn synthetic_targets_are_min_max_scaled() {
        let x = generate_lhs(60, 3, 2, false).unwrap();
        let data = generate_synthetic_targets(&x, 0.05, 8).unwrap();
        for col in data.z.axis_iter(Axis(1)) {
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(lo, 0.0);
            assert_eq!(hi, 1.0);
        }
        assert_eq!(data, generate_synthetic_targets(&x, 0.05, 8).unwrap());
        assert_eq!(data.target_names, vec!["z1", "z2"]);
    }

    #[test]
    fn noiseless_targets_ignore_seed() {
        let x = generate_lhs(20, 2, 2, false).unwrap();
        let a = generate_synthetic_targets(&x, 0.0, 1).unwrap();
        let b = generate_synthetic_targets(&x, 0.0, 999).unwrap();
        assert_eq!(a.z, b.z);
    }

    #[test]
    fn csv_parse_reports_line_numbers() {
        let text = "x1,x2\n0.1,0.2\n0.3,oops\n";
        match parse_csv_matrix(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let (names, m) = parse_csv_matrix("a,b\n1,2\n3,4\n".as_bytes()).unwrap();
        assert_eq!(names, vec!["a", "b"]);
        assert_eq!(m, array![[1.0, 2.0], [3.0, 4.0]]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn normalize_round_trip(values in proptest::collection::vec(0.0f64..1.0, 1..40),
                                    lo in -100.0f64..100.0, width in 0.01f64..1000.0) {
                let bounds = Bounds::new(vec![lo], vec![lo + width]).unwrap();
                let raw = Array2::from_shape_vec((values.len(), 1),
                    values.iter().map(|t| lo + t * width).collect()).unwrap();
                let plan = normalize(raw.view(), &bounds).unwrap();
                let back = denormalize(&plan, &bounds).unwrap();
                for (a, b) in raw.iter().zip(back.iter()) {
                    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
                }
            }

            #[test]
            fn lhs_property_holds(n in 2usize..60, k in 1usize..6, seed in any::<u64>(), centered in any::<bool>()) {
                let plan = generate_lhs(n, k, seed, centered).unwrap();
                prop_assert!(is_latin(&plan));
            }
        }
    }
}
