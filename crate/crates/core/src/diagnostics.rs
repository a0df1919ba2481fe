//! Infill-point diagnostics and study plots, rendered as self-contained SVG
//! with the plotted numbers alongside as CSV.
//!
//! Quantiles use linear interpolation between order statistics (type 7):
//! for sorted `v` of length `n`, `Q(p) = v[h] + (h - floor(h)) (v[h+1] - v[h])`
//! with `h = (n - 1) p`. Box whiskers follow Tukey and reach the most extreme
//! values within 1.5 IQR of the box. Features with fewer than
//! [`LOW_CARDINALITY`] distinct values are drawn with red histogram bars.

mod svg;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::designs::SamplingPlan;
use crate::error::{invalid_arg, Result};
use svg::{axes, extent, legend, Svg, BAR, BLUE, GREY, INK, PALETTE, RED};

/// Features with fewer distinct values than this are flagged.
pub const LOW_CARDINALITY: usize = 10;

/// SVG document and the CSV of the data it shows.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub svg: String,
    pub csv: String,
}

impl Plot {
    /// Writes `<stem>.svg` and `<stem>.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>, stem: &str) -> Result<PathBuf> {
        let dir = dir.as_ref();
        let svg_path = dir.join(format!("{stem}.svg"));
        std::fs::write(&svg_path, &self.svg)?;
        std::fs::write(dir.join(format!("{stem}.csv")), &self.csv)?;
        Ok(svg_path)
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarkerRole {
    WithMm,
    WithoutMm,
}

impl MarkerRole {
    fn color(self) -> &'static str {
        match self {
            MarkerRole::WithMm => RED,
            MarkerRole::WithoutMm => BLUE,
        }
    }

    fn class(self) -> &'static str {
        match self {
            MarkerRole::WithMm => "marker with-mm",
            MarkerRole::WithoutMm => "marker without-mm",
        }
    }
}

/// Suggested point overlaid on the existing design.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Marker {
    pub label: String,
    pub point: Vec<f64>,
    pub role: MarkerRole,
}

impl Marker {
    pub fn new(label: impl Into<String>, point: Vec<f64>, role: MarkerRole) -> Self {
        Self {
            label: label.into(),
            point,
            role,
        }
    }
}

fn check_markers(plan: &SamplingPlan, markers: &[Marker]) -> Result<()> {
    for m in markers {
        if m.point.len() != plan.k() {
            return Err(invalid_arg(format!(
                "marker {} has dimension {}, design has {}",
                m.label,
                m.point.len(),
                plan.k()
            )));
        }
        if m.point.iter().any(|v| !v.is_finite()) {
            return Err(invalid_arg(format!("marker {} has non-finite coordinates", m.label)));
        }
    }
    Ok(())
}

/// Type-7 quantile of ascending `sorted`.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxSummary {
    pub feature: String,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

impl BoxSummary {
    pub fn from_values(feature: &str, values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q1 = quantile(&v, 0.25);
        let median = quantile(&v, 0.5);
        let q3 = quantile(&v, 0.75);
        let iqr = q3 - q1;
        let (fence_lo, fence_hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
        let inside = || v.iter().copied().filter(|x| (fence_lo..=fence_hi).contains(x));
        Self {
            feature: feature.to_string(),
            q1,
            median,
            q3,
            whisker_low: inside().fold(f64::INFINITY, f64::min).min(q1),
            whisker_high: inside().fold(f64::NEG_INFINITY, f64::max).max(q3),
            outliers: v.iter().copied().filter(|x| !(fence_lo..=fence_hi).contains(x)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramSummary {
    pub feature: String,
    /// `bins + 1` equally spaced edges over `[0, 1]`.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub distinct: usize,
    pub low_cardinality: bool,
}

impl HistogramSummary {
    /// Bins are half-open except the last, which also holds 1.0.
    pub fn from_values(feature: &str, values: &[f64], bins: usize) -> Self {
        let mut counts = vec![0; bins];
        for v in values {
            let b = ((v.clamp(0.0, 1.0) * bins as f64).floor() as usize).min(bins - 1);
            counts[b] += 1;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        Self {
            feature: feature.to_string(),
            edges: (0..=bins).map(|i| i as f64 / bins as f64).collect(),
            counts,
            distinct: sorted.len(),
            low_cardinality: sorted.len() < LOW_CARDINALITY,
        }
    }
}

/// Per-feature summaries of the existing design with the overlaid markers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IpPlotData<S> {
    pub summaries: Vec<S>,
    pub markers: Vec<Marker>,
}

const PANEL_W: f64 = 190.0;
const PANEL_H: f64 = 170.0;
const PANEL_COLS: usize = 5;

fn panel_grid(k: usize) -> (usize, f64, f64) {
    let cols = k.clamp(1, PANEL_COLS);
    let rows = k.div_ceil(cols);
    (cols, cols as f64 * PANEL_W, rows as f64 * PANEL_H + 40.0)
}

fn panel_origin(i: usize, cols: usize) -> (f64, f64) {
    ((i % cols) as f64 * PANEL_W, 40.0 + (i / cols) as f64 * PANEL_H)
}

fn marker_legend(svg: &mut Svg, width: f64, markers: &[Marker]) {
    let entries: Vec<(&str, &str)> = markers.iter().map(|m| (m.label.as_str(), m.role.color())).collect();
    legend(svg, width - 10.0, 8.0, &entries, 10.0);
}

fn column(plan: &SamplingPlan, j: usize) -> Vec<f64> {
    plan.points().column(j).to_vec()
}

/// One boxplot per feature, markers drawn beside the box at their coordinate.
pub fn ip_boxplots(plan: &SamplingPlan, markers: &[Marker]) -> Result<(IpPlotData<BoxSummary>, Plot)> {
    check_markers(plan, markers)?;
    let names = plan.feature_names();
    let summaries: Vec<BoxSummary> = (0..plan.k())
        .map(|j| BoxSummary::from_values(&names[j], &column(plan, j)))
        .collect();

    let (cols, width, height) = panel_grid(plan.k());
    let mut svg = Svg::new(width, height);
    svg.text(10.0, 20.0, 13.0, "start", "Infill points and existing design, per feature");
    marker_legend(&mut svg, width, markers);
    for (j, s) in summaries.iter().enumerate() {
        let (ox, oy) = panel_origin(j, cols);
        let (_, ys) = axes(&mut svg, ox + 45.0, oy + 10.0, PANEL_W - 60.0, PANEL_H - 50.0, (0.0, 1.0), (0.0, 1.0), &s.feature, "", 9.0);
        let cx = ox + 45.0 + (PANEL_W - 60.0) * 0.4;
        let half = 18.0;
        svg.rect(cx - half, ys.map(s.q3), 2.0 * half, ys.map(s.q1) - ys.map(s.q3), BAR, INK);
        svg.line(cx - half, ys.map(s.median), cx + half, ys.map(s.median), INK, 2.0);
        svg.line(cx, ys.map(s.q3), cx, ys.map(s.whisker_high), INK, 1.0);
        svg.line(cx, ys.map(s.q1), cx, ys.map(s.whisker_low), INK, 1.0);
        svg.line(cx - half / 2.0, ys.map(s.whisker_high), cx + half / 2.0, ys.map(s.whisker_high), INK, 1.0);
        svg.line(cx - half / 2.0, ys.map(s.whisker_low), cx + half / 2.0, ys.map(s.whisker_low), INK, 1.0);
        for o in &s.outliers {
            svg.circle(cx, ys.map(*o), 2.0, GREY, "outlier", &[("value", *o)]);
        }
        for (m_idx, m) in markers.iter().enumerate() {
            let v = m.point[j].clamp(0.0, 1.0);
            let mx = cx + half + 10.0 + 8.0 * m_idx as f64;
            svg.circle(mx, ys.map(v), 4.0, m.role.color(), m.role.class(), &[("value", m.point[j])]);
        }
    }

    let mut header = vec!["feature", "q1", "median", "q3", "whisker_low", "whisker_high", "n_outliers"];
    header.extend(markers.iter().map(|m| m.label.as_str()));
    let rows = summaries.iter().enumerate().map(|(j, s)| {
        let mut r = vec![
            s.feature.clone(),
            s.q1.to_string(),
            s.median.to_string(),
            s.q3.to_string(),
            s.whisker_low.to_string(),
            s.whisker_high.to_string(),
            s.outliers.len().to_string(),
        ];
        r.extend(markers.iter().map(|m| m.point[j].to_string()));
        r
    });
    let csv = csv_text(&header, rows);
    Ok((
        IpPlotData {
            summaries,
            markers: markers.to_vec(),
        },
        Plot { svg: svg.finish(), csv },
    ))
}

/// One histogram over `[0, 1]` per feature with markers as vertical lines.
pub fn ip_histograms(
    plan: &SamplingPlan,
    markers: &[Marker],
    bins: usize,
) -> Result<(IpPlotData<HistogramSummary>, Plot)> {
    if bins == 0 {
        return Err(invalid_arg("bins must be at least 1"));
    }
    check_markers(plan, markers)?;
    let names = plan.feature_names();
    let summaries: Vec<HistogramSummary> = (0..plan.k())
        .map(|j| HistogramSummary::from_values(&names[j], &column(plan, j), bins))
        .collect();

    let (cols, width, height) = panel_grid(plan.k());
    let mut svg = Svg::new(width, height);
    svg.text(10.0, 20.0, 13.0, "start", "Infill points and existing design, per feature (red: few distinct values)");
    marker_legend(&mut svg, width, markers);
    for (j, s) in summaries.iter().enumerate() {
        let (ox, oy) = panel_origin(j, cols);
        let top = s.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
        let (xs, ys) = axes(&mut svg, ox + 45.0, oy + 10.0, PANEL_W - 60.0, PANEL_H - 50.0, (0.0, 1.0), (0.0, top), &s.feature, "count", 9.0);
        let fill = if s.low_cardinality { RED } else { BAR };
        for (b, c) in s.counts.iter().enumerate() {
            let (x0, x1) = (xs.map(s.edges[b]), xs.map(s.edges[b + 1]));
            svg.rect(x0, ys.map(*c as f64), x1 - x0, ys.map(0.0) - ys.map(*c as f64), fill, "white");
        }
        for m in markers {
            let px = xs.map(m.point[j].clamp(0.0, 1.0));
            svg.line(px, ys.map(0.0), px, ys.map(top), m.role.color(), 2.0);
        }
    }

    let rows = summaries.iter().flat_map(|s| {
        (0..bins).map(move |b| {
            vec![
                s.feature.clone(),
                s.edges[b].to_string(),
                s.edges[b + 1].to_string(),
                s.counts[b].to_string(),
                s.low_cardinality.to_string(),
            ]
        })
    });
    let csv = csv_text(&["feature", "bin_low", "bin_high", "count", "low_cardinality"], rows);
    Ok((
        IpPlotData {
            summaries,
            markers: markers.to_vec(),
        },
        Plot { svg: svg.finish(), csv },
    ))
}

/// Scatter of features `i` (horizontal) and `j` (vertical): design points in
/// grey, markers in their role colour. Every point is one `<circle>` carrying
/// `data-x`/`data-y` with six decimals.
pub fn updated_design_scatter(plan: &SamplingPlan, pair: (usize, usize), markers: &[Marker]) -> Result<Plot> {
    let (i, j) = pair;
    if i == j || i >= plan.k() || j >= plan.k() {
        return Err(invalid_arg(format!(
            "feature pair ({i}, {j}) is invalid for {} features",
            plan.k()
        )));
    }
    check_markers(plan, markers)?;
    let names = plan.feature_names();
    let mut svg = Svg::new(520.0, 500.0);
    svg.text(20.0, 22.0, 13.0, "start", "Design updated with the suggested points");
    let entries: Vec<(&str, &str)> = std::iter::once(("design", GREY))
        .chain(markers.iter().map(|m| (m.label.as_str(), m.role.color())))
        .collect();
    legend(&mut svg, 505.0, 8.0, &entries, 10.0);
    let (xs, ys) = axes(&mut svg, 70.0, 60.0, 420.0, 380.0, (0.0, 1.0), (0.0, 1.0), &names[i], &names[j], 10.0);
    let mut rows = Vec::with_capacity(plan.n() + markers.len());
    for (r, row) in plan.points().rows().into_iter().enumerate() {
        let (x, y) = (row[i], row[j]);
        svg.circle(xs.map(x), ys.map(y), 3.0, GREY, "design", &[("x", x), ("y", y)]);
        rows.push(vec!["design".into(), r.to_string(), x.to_string(), y.to_string()]);
    }
    for m in markers {
        let (x, y) = (m.point[i], m.point[j]);
        svg.circle(
            xs.map(x.clamp(0.0, 1.0)),
            ys.map(y.clamp(0.0, 1.0)),
            6.0,
            m.role.color(),
            m.role.class(),
            &[("x", x), ("y", y)],
        );
        rows.push(vec![m.label.clone(), "".into(), x.to_string(), y.to_string()]);
    }
    let csv = csv_text(&["series", "row", names[i].as_str(), names[j].as_str()], rows);
    Ok(Plot { svg: svg.finish(), csv })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesStyle {
    /// Small grey points.
    Background,
    /// Points joined in order of x, e.g. a Pareto front.
    Front,
    /// Small points in the given role colour, e.g. optimizer trace.
    Trace(MarkerRole),
    /// Large highlighted point.
    Highlight(MarkerRole),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: SeriesStyle,
}

/// Generic two-objective scatter (Pareto plots).
pub fn scatter_plot(title: &str, x_label: &str, y_label: &str, series: &[ScatterSeries]) -> Plot {
    let mut svg = Svg::new(560.0, 480.0);
    svg.text(20.0, 22.0, 13.0, "start", title);
    let finite = |f: fn(&(f64, f64)) -> f64| {
        series
            .iter()
            .flat_map(|s| s.points.iter().map(f))
            .filter(|v| v.is_finite())
            .collect::<Vec<f64>>()
    };
    let x_dom = extent(finite(|p| p.0).into_iter(), 0.05);
    let y_dom = extent(finite(|p| p.1).into_iter(), 0.05);
    let (xs, ys) = axes(&mut svg, 80.0, 60.0, 440.0, 350.0, x_dom, y_dom, x_label, y_label, 10.0);
    let color = |style: SeriesStyle| match style {
        SeriesStyle::Background => GREY,
        SeriesStyle::Front => INK,
        SeriesStyle::Trace(r) | SeriesStyle::Highlight(r) => r.color(),
    };
    let entries: Vec<(&str, &str)> = series.iter().map(|s| (s.label.as_str(), color(s.style))).collect();
    legend(&mut svg, 545.0, 8.0, &entries, 10.0);
    let mut rows = Vec::new();
    for s in series {
        let pts: Vec<(f64, f64)> = s.points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        match s.style {
            SeriesStyle::Front => {
                let mut sorted = pts.clone();
                sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
                let px: Vec<(f64, f64)> = sorted.iter().map(|(x, y)| (xs.map(*x), ys.map(*y))).collect();
                svg.polyline(&px, INK, 1.5);
                for (x, y) in &sorted {
                    svg.circle(xs.map(*x), ys.map(*y), 3.5, INK, "front", &[("x", *x), ("y", *y)]);
                }
            }
            style => {
                let (r, class) = match style {
                    SeriesStyle::Background => (2.5, "data"),
                    SeriesStyle::Trace(_) => (2.5, "trace"),
                    _ => (7.0, "best"),
                };
                for (x, y) in &pts {
                    svg.circle(xs.map(*x), ys.map(*y), r, color(style), class, &[("x", *x), ("y", *y)]);
                }
            }
        }
        rows.extend(
            s.points
                .iter()
                .map(|(x, y)| vec![s.label.clone(), x.to_string(), y.to_string()]),
        );
    }
    let csv = csv_text(&["series", x_label, y_label], rows);
    Plot { svg: svg.finish(), csv }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Line chart for study results; `log_x` plots against `log10(x)`.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[LineSeries], log_x: bool) -> Plot {
    let tx = |x: f64| if log_x { x.log10() } else { x };
    let mut svg = Svg::new(560.0, 420.0);
    svg.text(20.0, 22.0, 13.0, "start", title);
    let x_dom = extent(series.iter().flat_map(|s| s.points.iter().map(|p| tx(p.0))), 0.03);
    let y_dom = extent(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), 0.05);
    let shown_x = if log_x { format!("log10({x_label})") } else { x_label.to_string() };
    let (xs, ys) = axes(&mut svg, 80.0, 50.0, 440.0, 300.0, x_dom, y_dom, &shown_x, y_label, 10.0);
    let entries: Vec<(&str, &str)> = series
        .iter()
        .enumerate()
        .map(|(i, s)| (s.label.as_str(), PALETTE[i % PALETTE.len()]))
        .collect();
    legend(&mut svg, 545.0, 8.0, &entries, 10.0);
    let mut rows = Vec::new();
    for (i, s) in series.iter().enumerate() {
        let c = PALETTE[i % PALETTE.len()];
        let px: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|(x, y)| tx(*x).is_finite() && y.is_finite())
            .map(|(x, y)| (xs.map(tx(*x)), ys.map(*y)))
            .collect();
        svg.polyline(&px, c, 1.8);
        for (p, (x, y)) in px.iter().zip(s.points.iter().filter(|(x, y)| tx(*x).is_finite() && y.is_finite())) {
            svg.circle(p.0, p.1, 3.0, c, "point", &[("x", *x), ("y", *y)]);
        }
        rows.extend(
            s.points
                .iter()
                .map(|(x, y)| vec![s.label.clone(), x.to_string(), y.to_string()]),
        );
    }
    let csv = csv_text(&["series", x_label, y_label], rows);
    Plot { svg: svg.finish(), csv }
}
