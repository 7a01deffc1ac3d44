//! CDF plots with confidence bands, written as SVG alongside the plotted
//! points in CSV.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::EstimateRow;
use crate::util;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (60.0, 20.0, 20.0, 50.0); // left, right, top, bottom
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Clone, Debug, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub rows: Vec<EstimateRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    /// Plot −log10(1 − q) instead of q to stretch the upper tail.
    pub tail_log: bool,
}

#[derive(Debug, Serialize)]
struct PlotMetadata<'a> {
    title: &'a str,
    x_label: &'a str,
    y_axis: &'a str,
    series: Vec<&'a str>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotFiles {
    pub svg: PathBuf,
    pub csv: PathBuf,
    pub metadata: PathBuf,
}

/// Cumulative-axis coordinate of quantile `q`.
pub fn y_value(q: f64, tail_log: bool) -> f64 {
    if tail_log {
        -(1.0 - q).max(1e-12).log10()
    } else {
        q
    }
}

fn y_label(tail_log: bool) -> &'static str {
    if tail_log {
        "cumulative fraction (tail-log)"
    } else {
        "cumulative fraction"
    }
}

/// Writes `<prefix>.svg`, `<prefix>.csv` and `<prefix>.json`.
pub fn plot_estimates(series: &[PlotSeries], style: &PlotStyle, prefix: &Path) -> Result<PlotFiles> {
    if series.iter().all(|s| s.rows.is_empty()) {
        return Err(Error::Empty("nothing to plot".into()));
    }
    let files = PlotFiles {
        svg: prefix.with_extension("svg"),
        csv: prefix.with_extension("csv"),
        metadata: prefix.with_extension("json"),
    };
    if let Some(parent) = prefix.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }

    let mut csv = String::from("label,q,y,mu,ci_lo,ci_hi\n");
    for s in series {
        for r in &s.rows {
            let y = y_value(r.q, style.tail_log);
            writeln!(csv, "{},{},{},{},{},{}", s.label, r.q, y, r.mu, r.ci_lo, r.ci_hi).unwrap();
        }
    }
    std::fs::write(&files.csv, csv).map_err(|e| Error::io(&files.csv, e))?;

    std::fs::write(&files.svg, render_svg(series, style)).map_err(|e| Error::io(&files.svg, e))?;

    let meta = PlotMetadata {
        title: &style.title,
        x_label: &style.x_label,
        y_axis: if style.tail_log { "tail_log" } else { "linear" },
        series: series.iter().map(|s| s.label.as_str()).collect(),
    };
    util::write_json(&meta, &files.metadata)?;
    Ok(files)
}

fn render_svg(series: &[PlotSeries], style: &PlotStyle) -> String {
    let rows = series.iter().flat_map(|s| &s.rows);
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y1, y0) = (f64::NEG_INFINITY, 0.0);
    for r in rows {
        x0 = x0.min(r.ci_lo.min(r.mu));
        x1 = x1.max(r.ci_hi.max(r.mu));
        y1 = y1.max(y_value(r.q, style.tail_log));
    }
    if x1 - x0 <= 0.0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= y0 {
        y1 = 1.0;
    }
    let (left, right, top, bottom) = MARGIN;
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (WIDTH - left - right);
    let py = |y: f64| HEIGHT - bottom - (y - y0) / (y1 - y0) * (HEIGHT - top - bottom);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="14" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        escape(&style.title)
    )
    .unwrap();
    // Axes.
    let (ax0, ay0, ax1, ay1) = (px(x0), py(y0), px(x1), py(y1));
    writeln!(
        svg,
        r#"<path d="M{ax0:.1},{ay1:.1} L{ax0:.1},{ay0:.1} L{ax1:.1},{ay0:.1}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    for k in 0..=4 {
        let x = x0 + (x1 - x0) * k as f64 / 4.0;
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11">{}</text>"#,
            px(x),
            ay0 + 16.0,
            tick(x)
        )
        .unwrap();
    }
    let y_ticks: Vec<(f64, String)> = if style.tail_log {
        (0..=y1.floor() as i32)
            .map(|k| (k as f64, format!("{}", 1.0 - 10f64.powi(-k))))
            .collect()
    } else {
        (0..=4).map(|k| (k as f64 / 4.0, format!("{}", k as f64 / 4.0))).collect()
    };
    for (y, text) in y_ticks {
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="11">{text}</text>"#,
            ax0 - 6.0,
            py(y) + 4.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(&style.x_label)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y_label(style.tail_log)
    )
    .unwrap();

    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts = |f: &dyn Fn(&EstimateRow) -> f64, rows: &mut dyn Iterator<Item = &EstimateRow>| {
            rows.map(|r| format!("{:.2},{:.2}", px(f(r)), py(y_value(r.q, style.tail_log))))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let lo = pts(&|r| r.ci_lo, &mut s.rows.iter());
        let hi = pts(&|r| r.ci_hi, &mut s.rows.iter().rev());
        writeln!(
            svg,
            r#"<polygon class="band" points="{lo} {hi}" fill="{color}" fill-opacity="0.25" stroke="none"/>"#
        )
        .unwrap();
        let mu = pts(&|r| r.mu, &mut s.rows.iter());
        writeln!(
            svg,
            r#"<polyline class="curve" points="{mu}" fill="none" stroke="{color}" stroke-width="1.5"/>"#
        )
        .unwrap();
        let ly = top + 16.0 + 16.0 * k as f64;
        writeln!(
            svg,
            r#"<rect x="{:.1}" y="{:.1}" width="12" height="8" fill="{color}"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
            WIDTH - right - 150.0,
            ly - 8.0,
            WIDTH - right - 134.0,
            ly,
            escape(&s.label)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick(x: f64) -> String {
    let s = format!("{x:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
