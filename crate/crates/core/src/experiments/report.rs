use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ExperimentReport;
use crate::error::{invalid, Result};
use crate::metrics::rows_to_csv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Serialises the metrics rows (CSV) or the whole report (JSON).
pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => Ok(rows_to_csv(&report.rows)),
        ReportFormat::Json => serde_json::to_string_pretty(report).map_err(|e| invalid(e.to_string())),
    }
}

/// A named polyline in data coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Drawn as dots rather than a connected line.
    pub markers: bool,
}

impl Curve {
    pub fn line(label: &str, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.to_string(), points, markers: false }
    }

    pub fn markers(label: &str, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.to_string(), points, markers: true }
    }
}

/// Long-format CSV: `curve,x,y`.
pub fn curves_to_csv(curves: &[Curve]) -> String {
    let mut out = String::from("curve,x,y\n");
    for c in curves {
        for (x, y) in &c.points {
            let _ = writeln!(out, "{},{},{}", c.label, x, y);
        }
    }
    out
}

pub const SVG_WIDTH: f64 = 800.0;
pub const SVG_HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 10] =
    ["#000000", "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Plot area in viewBox coordinates: `(left, top, right, bottom)`.
pub fn plot_area() -> (f64, f64, f64, f64) {
    (MARGIN_LEFT, MARGIN_TOP, SVG_WIDTH - MARGIN_RIGHT, SVG_HEIGHT - MARGIN_BOTTOM)
}

/// Static SVG with axes, a legend and one `<polyline>` per curve.
/// Output depends only on the input.
pub fn emit_svg_curves(curves: &[Curve], title: &str) -> String {
    let pts = curves.iter().flat_map(|c| c.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let (left, top, right, bottom) = plot_area();
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, (left + right) / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black"><line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/><line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}"/></g>"#
    );
    let _ = writeln!(s, r#"<text x="{left}" y="{}" text-anchor="middle">{x0:.3}</text>"#, bottom + 18.0);
    let _ = writeln!(s, r#"<text x="{right}" y="{}" text-anchor="middle">{x1:.3}</text>"#, bottom + 18.0);
    let _ = writeln!(s, r#"<text x="{}" y="{bottom}" text-anchor="end">{y0:.3}</text>"#, left - 6.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y1:.3}</text>"#, left - 6.0, top + 4.0);

    for (i, c) in curves.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for (k, &(x, y)) in c.points.iter().enumerate() {
            if k > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{:.3},{:.3}", sx(x), sy(y));
        }
        let style = if c.markers {
            format!(
                r#"fill="none" stroke="{colour}" stroke-width="3" stroke-linecap="round" stroke-dasharray="0 1000000""#
            )
        } else {
            format!(r#"fill="none" stroke="{colour}" stroke-width="1.5""#)
        };
        let _ = writeln!(s, r#"<polyline data-label="{}" {style} points="{points}"/>"#, escape(&c.label));
        let ly = top + 10.0 + 18.0 * i as f64;
        let lx = right + 15.0;
        let _ = writeln!(
            s,
            r#"<g class="legend"><line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{}" y="{}">{}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&c.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Reads back `(label, points)` of every polyline written by
/// [`emit_svg_curves`], in viewBox coordinates.
pub fn parse_svg_polylines(svg: &str) -> Vec<(String, Vec<(f64, f64)>)> {
    let attr = |tag: &str, name: &str| -> Option<String> {
        let key = format!("{name}=\"");
        let start = tag.find(&key)? + key.len();
        let end = tag[start..].find('"')? + start;
        Some(tag[start..end].to_string())
    };
    svg.lines()
        .filter(|l| l.starts_with("<polyline"))
        .filter_map(|l| {
            let label = attr(l, "data-label")?;
            let pts = attr(l, "points")?
                .split_whitespace()
                .filter_map(|p| {
                    let (x, y) = p.split_once(',')?;
                    Some((x.parse().ok()?, y.parse().ok()?))
                })
                .collect();
            Some((label, pts))
        })
        .collect()
}
