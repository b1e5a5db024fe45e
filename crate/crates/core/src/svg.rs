//! Minimal static SVG rendering: multi-series line charts with optional
//! shaded bands, and a scalar-field heatmap. Output is fully deterministic;
//! identical inputs produce identical bytes.

use crate::csvio::format_sig;
use std::fmt::Write as _;

pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct ChartConfig {
    pub title: String,
    pub subtitle: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
    /// x-intervals drawn as shaded bands behind the curves.
    pub shaded: Vec<(f64, f64)>,
    pub zero_line: bool,
}

impl Default for ChartConfig {
    fn default() -> Self {
        ChartConfig {
            title: String::new(),
            subtitle: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            width: 860,
            height: 480,
            shaded: Vec::new(),
            zero_line: false,
        }
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Round step covering `range / target`, snapped to 1, 2, or 5 times a power
/// of ten.
fn nice_step(range: f64, target: usize) -> f64 {
    let raw = (range / target as f64).max(f64::MIN_POSITIVE);
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let snapped = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    snapped * mag
}

fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let step = nice_step(hi - lo, target);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        // Snap values like 0.30000000000000004 for clean labels.
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xmin) / (self.xmax - self.xmin) * self.w
    }
    fn py(&self, y: f64) -> f64 {
        self.y0 + (self.ymax - y) / (self.ymax - self.ymin) * self.h
    }
}

fn data_bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for (x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                xmin = xmin.min(*x);
                xmax = xmax.max(*x);
                ymin = ymin.min(*y);
                ymax = ymax.max(*y);
            }
        }
    }
    if !xmin.is_finite() {
        (0.0, 1.0, 0.0, 1.0)
    } else {
        (xmin, xmax, ymin, ymax)
    }
}

/// Renders the series as polylines over shared axes. Non-finite points are
/// dropped. Shaded intervals, the optional zero line, gridlines, ticks, and
/// a legend are included.
pub fn line_chart(cfg: &ChartConfig, series: &[Series]) -> String {
    let (xmin, xmax, mut ymin, mut ymax) = data_bounds(series);
    let (xmin, xmax) = if xmax > xmin {
        (xmin, xmax)
    } else {
        (xmin - 0.5, xmax + 0.5)
    };
    if ymax <= ymin {
        let pad = ymin.abs().max(1.0) * 0.1;
        ymin -= pad;
        ymax += pad;
    } else {
        let pad = (ymax - ymin) * 0.05;
        ymin -= pad;
        ymax += pad;
    }

    let top = if cfg.subtitle.is_empty() { 46.0 } else { 64.0 };
    let f = Frame {
        x0: 72.0,
        y0: top,
        w: cfg.width as f64 - 72.0 - 24.0,
        h: cfg.height as f64 - top - 56.0,
        xmin,
        xmax,
        ymin,
        ymax,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"Helvetica, Arial, sans-serif\">",
        w = cfg.width,
        h = cfg.height
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");

    if !cfg.title.is_empty() {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
            cfg.width as f64 / 2.0,
            escape(&cfg.title)
        );
    }
    if !cfg.subtitle.is_empty() {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"42\" font-size=\"12\" fill=\"#555555\" text-anchor=\"middle\">{}</text>",
            cfg.width as f64 / 2.0,
            escape(&cfg.subtitle)
        );
    }

    for (a, b) in &cfg.shaded {
        let (a, b) = (a.max(xmin), b.min(xmax));
        if b <= a {
            continue;
        }
        let _ = writeln!(
            svg,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#d62728\" fill-opacity=\"0.08\"/>",
            f.px(a),
            f.y0,
            f.px(b) - f.px(a),
            f.h
        );
    }

    for t in ticks(xmin, xmax, 6) {
        let x = f.px(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#e0e0e0\"/>",
            f.y0,
            f.y0 + f.h
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            f.y0 + f.h + 16.0,
            format_sig(t, 6)
        );
    }
    for t in ticks(ymin, ymax, 5) {
        let y = f.py(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#e0e0e0\"/>",
            f.x0,
            f.x0 + f.w
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            f.x0 - 6.0,
            y + 4.0,
            format_sig(t, 6)
        );
    }

    if cfg.zero_line && ymin < 0.0 && ymax > 0.0 {
        let y = f.py(0.0);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>",
            f.x0,
            f.x0 + f.w
        );
    }

    let _ = writeln!(
        svg,
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333333\"/>",
        f.x0, f.y0, f.w, f.h
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for (x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                let _ = write!(points, "{:.2},{:.2} ", f.px(*x), f.py(*y));
            }
        }
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\" points=\"{}\"/>",
            points.trim_end()
        );
    }

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let lx = f.x0 + f.w - 150.0;
        let ly = f.y0 + 16.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            lx,
            lx + 22.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>",
            lx + 28.0,
            ly + 4.0,
            escape(&s.label)
        );
    }

    if !cfg.x_label.is_empty() {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
            f.x0 + f.w / 2.0,
            cfg.height as f64 - 14.0,
            escape(&cfg.x_label)
        );
    }
    if !cfg.y_label.is_empty() {
        let cy = f.y0 + f.h / 2.0;
        let _ = writeln!(
            svg,
            "<text x=\"18\" y=\"{cy:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {cy:.2})\">{}</text>",
            escape(&cfg.y_label)
        );
    }

    svg.push_str("</svg>\n");
    svg
}

#[derive(Debug, Clone)]
pub struct HeatmapConfig {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
}

impl Default for HeatmapConfig {
    fn default() -> Self {
        HeatmapConfig {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            width: 560,
            height: 560,
        }
    }
}

fn ramp(t: f64, to: (u8, u8, u8)) -> String {
    let t = t.clamp(0.0, 1.0);
    let ch = |c: u8| (255.0 - (255.0 - c as f64) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(to.0), ch(to.1), ch(to.2))
}

/// Renders `grid[row][col]` over the rectangle `(xmin, xmax, ymin, ymax)`,
/// row 0 at `ymin`. Positive values ramp white to blue, negative values
/// white to red, both scaled by the largest magnitude.
pub fn heatmap(cfg: &HeatmapConfig, extent: (f64, f64, f64, f64), grid: &[Vec<f64>]) -> String {
    let (xmin, xmax, ymin, ymax) = extent;
    let rows = grid.len().max(1);
    let cols = grid.first().map_or(1, |r| r.len()).max(1);
    let vmax = grid
        .iter()
        .flatten()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);

    let top = 40.0;
    let f = Frame {
        x0: 64.0,
        y0: top,
        w: cfg.width as f64 - 64.0 - 20.0,
        h: cfg.height as f64 - top - 52.0,
        xmin,
        xmax,
        ymin,
        ymax,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"Helvetica, Arial, sans-serif\">",
        w = cfg.width,
        h = cfg.height
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    if !cfg.title.is_empty() {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
            cfg.width as f64 / 2.0,
            escape(&cfg.title)
        );
    }

    let cw = f.w / cols as f64;
    let chh = f.h / rows as f64;
    for (j, row) in grid.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let color = if !v.is_finite() {
                "#cccccc".to_string()
            } else if *v >= 0.0 {
                ramp(v / vmax, (0x1f, 0x77, 0xb4))
            } else {
                ramp(-v / vmax, (0xd6, 0x27, 0x28))
            };
            // Row 0 sits at ymin, the bottom of the frame.
            let x = f.x0 + i as f64 * cw;
            let y = f.y0 + f.h - (j + 1) as f64 * chh;
            let _ = writeln!(
                svg,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{color}\"/>",
                cw + 0.05,
                chh + 0.05
            );
        }
    }

    for t in ticks(xmin, xmax, 5) {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            f.px(t),
            f.y0 + f.h + 16.0,
            format_sig(t, 6)
        );
    }
    for t in ticks(ymin, ymax, 5) {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            f.x0 - 6.0,
            f.py(t) + 4.0,
            format_sig(t, 6)
        );
    }
    let _ = writeln!(
        svg,
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333333\"/>",
        f.x0, f.y0, f.w, f.h
    );
    if !cfg.x_label.is_empty() {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
            f.x0 + f.w / 2.0,
            cfg.height as f64 - 12.0,
            escape(&cfg.x_label)
        );
    }
    if !cfg.y_label.is_empty() {
        let cy = f.y0 + f.h / 2.0;
        let _ = writeln!(
            svg,
            "<text x=\"16\" y=\"{cy:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {cy:.2})\">{}</text>",
            escape(&cfg.y_label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
