//! Minimal SVG document builder and axis helpers.

use std::fmt::Write as _;

pub(crate) const GREY: &str = "#9e9e9e";
pub(crate) const RED: &str = "#d62728";
pub(crate) const BLUE: &str = "#1f77b4";
pub(crate) const ORANGE: &str = "#ff7f0e";
pub(crate) const GREEN: &str = "#2ca02c";
pub(crate) const PURPLE: &str = "#9467bd";
pub(crate) const INK: &str = "#222222";
pub(crate) const BAR: &str = "#8fa9c8";

/// Cycle used for multi-series line plots.
pub(crate) const PALETTE: [&str; 5] = [BLUE, ORANGE, GREEN, RED, PURPLE];

pub(crate) fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub(crate) struct Svg {
    buf: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        let mut buf = String::new();
        let _ = writeln!(
            buf,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\">"
        );
        let _ = writeln!(buf, "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>");
        Self { buf }
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.buf,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>"
        );
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: &str) {
        let _ = writeln!(
            self.buf,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\" stroke=\"{stroke}\"/>",
            w.max(0.0),
            h.max(0.0)
        );
    }

    /// Data point; `data` holds the unscaled coordinates.
    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str, class: &str, data: &[(&str, f64)]) {
        let mut attrs = String::new();
        for (name, v) in data {
            let _ = write!(attrs, " data-{name}=\"{v:.6}\"");
        }
        let _ = writeln!(
            self.buf,
            "<circle class=\"{class}\" cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{r}\" fill=\"{fill}\" fill-opacity=\"0.85\"{attrs}/>"
        );
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            self.buf,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
            coords.join(" ")
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        let _ = writeln!(
            self.buf,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"{size}\" text-anchor=\"{anchor}\" fill=\"{INK}\">{}</text>",
            escape(content)
        );
    }

    pub fn vertical_text(&mut self, x: f64, y: f64, size: f64, content: &str) {
        let _ = writeln!(
            self.buf,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"{size}\" text-anchor=\"middle\" fill=\"{INK}\" transform=\"rotate(-90 {x:.2} {y:.2})\">{}</text>",
            escape(content)
        );
    }

    pub fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

/// Affine map from a data interval onto a pixel interval.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Scale {
    pub fn new(domain: (f64, f64), range: (f64, f64)) -> Self {
        let (mut d0, mut d1) = domain;
        if !(d1 - d0).is_normal() || d1 <= d0 {
            let pad = if d0.abs() > 0.0 { d0.abs() * 0.1 } else { 1.0 };
            d0 -= pad;
            d1 += pad;
        }
        Self {
            d0,
            d1,
            r0: range.0,
            r1: range.1,
        }
    }

    pub fn map(&self, v: f64) -> f64 {
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.d0, self.d1)
    }
}

/// Finite min/max of `values`, widened by `pad` of the span on each side.
pub(crate) fn extent(values: impl Iterator<Item = f64>, pad: f64) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    (lo - pad * span, hi + pad * span)
}

/// Round step (1, 2 or 5 times a power of ten) and the ticks it places in `[lo, hi]`.
pub(crate) fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target.max(1) as f64;
    if !(raw.is_finite() && raw > 0.0) {
        return vec![lo];
    }
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

pub(crate) fn tick_label(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    let r = if r == 0.0 { 0.0 } else { r };
    if r.abs() >= 1e5 || (r != 0.0 && r.abs() < 1e-3) {
        format!("{r:.1e}")
    } else {
        format!("{r}")
    }
}

/// Plot frame with ticks and axis labels; returns the x and y scales.
#[allow(clippy::too_many_arguments)]
pub(crate) fn axes(
    svg: &mut Svg,
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x_domain: (f64, f64),
    y_domain: (f64, f64),
    x_label: &str,
    y_label: &str,
    font: f64,
) -> (Scale, Scale) {
    let xs = Scale::new(x_domain, (left, left + width));
    let ys = Scale::new(y_domain, (top + height, top));
    svg.rect(left, top, width, height, "none", INK);
    let (x0, x1) = xs.domain();
    for t in ticks(x0, x1, 5) {
        let px = xs.map(t);
        svg.line(px, top + height, px, top + height + 4.0, INK, 1.0);
        svg.text(px, top + height + 4.0 + font, font, "middle", &tick_label(t));
    }
    let (y0, y1) = ys.domain();
    for t in ticks(y0, y1, 5) {
        let py = ys.map(t);
        svg.line(left - 4.0, py, left, py, INK, 1.0);
        svg.text(left - 6.0, py + font / 3.0, font, "end", &tick_label(t));
    }
    svg.text(left + width / 2.0, top + height + 2.6 * font + 4.0, font + 1.0, "middle", x_label);
    svg.vertical_text(left - 3.6 * font, top + height / 2.0, font + 1.0, y_label);
    (xs, ys)
}

/// Legend entries as coloured squares, stacked from the top right corner.
pub(crate) fn legend(svg: &mut Svg, right: f64, top: f64, entries: &[(&str, &str)], font: f64) {
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = top + i as f64 * (font + 6.0);
        svg.rect(right - 10.0, y, 10.0, 10.0, color, "none");
        svg.text(right - 14.0, y + 9.0, font, "end", label);
    }
}
