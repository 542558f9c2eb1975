//! Self-contained SVG charts, each paired with a sidecar CSV of the
//! plotted data.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use super::report::write_file;
use super::{HarnessError, Result, TrialResult};
use crate::evaluation::pearson_r;
use crate::features::{VolatilitySeries, TARGET_NAMES};
use crate::matrix::Matrix;
use crate::network::Architecture;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotFiles {
    pub svg: PathBuf,
    pub csv: PathBuf,
}

impl PlotFiles {
    pub fn paths(&self) -> [PathBuf; 2] {
        [self.svg.clone(), self.csv.clone()]
    }
}

fn write_pair(out: &Path, svg: &str, csv: &str) -> Result<PlotFiles> {
    Ok(PlotFiles {
        svg: write_file(out, svg)?,
        csv: write_file(&out.with_extension("csv"), csv)?,
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Ordinary least squares `y = slope * x + intercept`; `None` when `x` is
/// constant or the inputs are unusable.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Round-number tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![lo];
    }
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Maps data coordinates into one plotting rectangle.
#[derive(Clone, Copy)]
struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(left: f64, top: f64, width: f64, height: f64, x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(lo, hi): (f64, f64)| {
            if hi > lo {
                let m = 0.04 * (hi - lo);
                (lo - m, hi + m)
            } else {
                (lo - 1.0, hi + 1.0)
            }
        };
        Self {
            left,
            top,
            width,
            height,
            x: pad(x),
            y: pad(y),
        }
    }

    fn px(&self, v: f64) -> f64 {
        self.left + (v - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    fn py(&self, v: f64) -> f64 {
        self.top + self.height - (v - self.y.0) / (self.y.1 - self.y.0) * self.height
    }

    fn axes(&self, out: &mut String, x_label: &str, y_label: &str, x_ticks: bool) {
        let (l, t, w, h) = (self.left, self.top, self.width, self.height);
        writeln!(out, r##"<rect x="{l:.2}" y="{t:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#444"/>"##).unwrap();
        for v in ticks(self.y.0, self.y.1, 5) {
            let y = self.py(v);
            writeln!(
                out,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{l:.2}" y2="{y:.2}" stroke="#444"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"##,
                l - 4.0,
                l - 6.0,
                y + 4.0,
                tick_label(v)
            )
            .unwrap();
        }
        if x_ticks {
            for v in ticks(self.x.0, self.x.1, 5) {
                let x = self.px(v);
                writeln!(
                    out,
                    r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#444"/><text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"##,
                    t + h,
                    t + h + 4.0,
                    t + h + 16.0,
                    tick_label(v)
                )
                .unwrap();
            }
        }
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            l + w / 2.0,
            t + h + 34.0,
            escape(x_label)
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
            l - 44.0,
            t + h / 2.0,
            l - 44.0,
            t + h / 2.0,
            escape(y_label)
        )
        .unwrap();
    }

    fn segment(&self, out: &mut String, (x0, y0): (f64, f64), (x1, y1): (f64, f64), style: &str) {
        writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#,
            self.px(x0),
            self.py(y0),
            self.px(x1),
            self.py(y1)
        )
        .unwrap();
    }

    fn polyline(&self, out: &mut String, xs: &[f64], ys: &[f64], color: &str) {
        let pts: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            pts.join(" ")
        )
        .unwrap();
    }
}

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="22" font-size="15" text-anchor="middle">{}</text>"#,
        width / 2.0,
        escape(title)
    )
    .unwrap();
}

fn legend(out: &mut String, x: f64, y: f64, entries: &[(&str, &str)]) {
    for (i, (label, color)) in entries.iter().enumerate() {
        let yy = y + 16.0 * i as f64;
        writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            x + 18.0,
            x + 22.0,
            yy + 4.0,
            escape(label)
        )
        .unwrap();
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Scatter of predicted against actual, one panel per output column, with
/// the identity line, the least-squares fit and the correlation. The CSV
/// holds one row per plotted point (`rows × outputs` rows).
pub fn regression_svg(title: &str, actual: &Matrix, predicted: &Matrix, names: &[&str]) -> Result<(String, String)> {
    if actual.rows() != predicted.rows() || actual.cols() != predicted.cols() {
        return Err(HarnessError::ShapeMismatch(format!(
            "actual {}x{} vs predicted {}x{}",
            actual.rows(),
            actual.cols(),
            predicted.rows(),
            predicted.cols()
        )));
    }
    let panels = actual.cols();
    let (pw, ph) = (360.0, 320.0);
    let width = 90.0 + panels as f64 * (pw + 90.0);
    let height = ph + 110.0;
    let mut svg = String::new();
    header(&mut svg, width, height, title);
    let mut csv = String::from("output,actual,predicted\n");
    for j in 0..panels {
        let name = names.get(j).copied().unwrap_or("output");
        let a = actual.column(j);
        let p = predicted.column(j);
        let lim = range(a.iter().chain(&p).copied());
        let frame = Frame::new(90.0 + j as f64 * (pw + 90.0), 40.0, pw, ph, lim, lim);
        frame.axes(&mut svg, &format!("actual {name}"), &format!("predicted {name}"), true);
        frame.segment(&mut svg, (frame.x.0, frame.x.0), (frame.x.1, frame.x.1), r##"stroke="#999" stroke-dasharray="4 3""##);
        for (x, y) in a.iter().zip(&p) {
            writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{}" fill-opacity="0.6"/>"#,
                frame.px(*x),
                frame.py(*y),
                PALETTE[0]
            )
            .unwrap();
            writeln!(csv, "{name},{x},{y}").unwrap();
        }
        let mut notes = Vec::new();
        if let Some((slope, intercept)) = ols_fit(&a, &p) {
            let (x0, x1) = frame.x;
            frame.segment(
                &mut svg,
                (x0, slope * x0 + intercept),
                (x1, slope * x1 + intercept),
                &format!(r#"stroke="{}" stroke-width="1.5""#, PALETTE[1]),
            );
            notes.push(format!("fit: y = {slope:.4} x + {intercept:.4}"));
        }
        notes.push(match pearson_r(&a, &p) {
            Ok(r) => format!("R = {r:.4}"),
            Err(_) => "R undefined".to_string(),
        });
        for (k, note) in notes.iter().enumerate() {
            writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
                frame.left + 8.0,
                frame.top + 16.0 + 15.0 * k as f64,
                escape(note)
            )
            .unwrap();
        }
    }
    svg.push_str("</svg>\n");
    Ok((svg, csv))
}

pub fn emit_regression_plot(actual: &Matrix, predicted: &Matrix, out: &Path) -> Result<PlotFiles> {
    let title = out.file_stem().and_then(|s| s.to_str()).unwrap_or("regression");
    let (svg, csv) = regression_svg(title, actual, predicted, &TARGET_NAMES)?;
    write_pair(out, &svg, &csv)
}

/// Intersects two dated series, keeping date order.
pub fn intersect(a: &VolatilitySeries, b: &VolatilitySeries) -> Vec<(NaiveDate, f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut ai: Vec<usize> = (0..a.dates.len()).collect();
    let mut bj: Vec<usize> = (0..b.dates.len()).collect();
    ai.sort_by_key(|&k| a.dates[k]);
    bj.sort_by_key(|&k| b.dates[k]);
    while i < ai.len() && j < bj.len() {
        let (da, db) = (a.dates[ai[i]], b.dates[bj[j]]);
        if da < db {
            i += 1;
        } else if db < da {
            j += 1;
        } else {
            out.push((da, a.values[ai[i]], b.values[bj[j]]));
            i += 1;
            j += 1;
        }
    }
    out
}

/// Two series on their common dates. The CSV is `date,<a>,<b>`.
pub fn overlay_svg(a: &VolatilitySeries, b: &VolatilitySeries) -> Result<(String, String)> {
    let common = intersect(a, b);
    if common.is_empty() {
        return Err(HarnessError::EmptyIntersection(a.name.clone(), b.name.clone()));
    }
    let b_label = if a.name == b.name { format!("{} (2)", b.name) } else { b.name.clone() };
    let (width, height) = (820.0, 380.0);
    let mut svg = String::new();
    header(&mut svg, width, height, &format!("{} and {}", a.name, b_label));
    let xs: Vec<f64> = (0..common.len()).map(|i| i as f64).collect();
    let ya: Vec<f64> = common.iter().map(|c| c.1).collect();
    let yb: Vec<f64> = common.iter().map(|c| c.2).collect();
    let frame = Frame::new(
        70.0,
        40.0,
        width - 110.0,
        height - 110.0,
        (0.0, (common.len() - 1) as f64),
        range(ya.iter().chain(&yb).copied()),
    );
    frame.axes(
        &mut svg,
        &format!("{} to {}", common[0].0, common[common.len() - 1].0),
        "level",
        false,
    );
    frame.polyline(&mut svg, &xs, &ya, PALETTE[0]);
    frame.polyline(&mut svg, &xs, &yb, PALETTE[1]);
    legend(&mut svg, 90.0, 56.0, &[(&a.name, PALETTE[0]), (&b_label, PALETTE[1])]);
    svg.push_str("</svg>\n");
    let mut csv = format!("date,{},{}\n", a.name, b_label);
    for (d, x, y) in &common {
        writeln!(csv, "{d},{x},{y}").unwrap();
    }
    Ok((svg, csv))
}

pub fn emit_overlay_plot(a: &VolatilitySeries, b: &VolatilitySeries, out: &Path) -> Result<PlotFiles> {
    let (svg, csv) = overlay_svg(a, b)?;
    write_pair(out, &svg, &csv)
}

/// Line chart of one or more curves against their index, e.g. loss per
/// epoch. `log_y` plots base-10 logarithms of positive values.
pub fn line_chart_svg(title: &str, x_label: &str, series: &[(&str, &[f64])], log_y: bool) -> String {
    let (width, height) = (640.0, 360.0);
    let tf = |v: f64| if log_y { if v > 0.0 { v.log10() } else { f64::NAN } } else { v };
    let n = series.iter().map(|s| s.1.len()).max().unwrap_or(0);
    let y_range = range(series.iter().flat_map(|s| s.1.iter().map(|&v| tf(v))));
    let y_range = if y_range.0.is_finite() { y_range } else { (0.0, 1.0) };
    let mut svg = String::new();
    header(&mut svg, width, height, title);
    let frame = Frame::new(70.0, 40.0, width - 110.0, height - 110.0, (1.0, n.max(2) as f64), y_range);
    frame.axes(&mut svg, x_label, if log_y { "log10 value" } else { "value" }, true);
    let mut entries = Vec::new();
    for (k, (name, values)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let xs: Vec<f64> = (1..=values.len()).map(|i| i as f64).collect();
        let ys: Vec<f64> = values.iter().map(|&v| tf(v)).collect();
        frame.polyline(&mut svg, &xs, &ys, color);
        entries.push((*name, color));
    }
    legend(&mut svg, width - 200.0, 56.0, &entries);
    svg.push_str("</svg>\n");
    svg
}

/// Test MSE per completed trial, MLFF bars above CFFN bars, one bar per
/// algorithm and hidden size. Diverged trials are left out.
pub fn test_mse_svg(title: &str, trials: &[TrialResult]) -> (String, String) {
    let mut csv = String::from("architecture,algorithm,hidden_size,test_mse\n");
    let rows: Vec<Vec<(String, f64)>> = Architecture::ALL
        .iter()
        .map(|&a| {
            trials
                .iter()
                .filter(|t| t.architecture == a)
                .filter_map(|t| {
                    t.metrics().map(|m| {
                        writeln!(csv, "{},{},{},{}", a, t.algorithm, t.hidden_size, m.test.mse).unwrap();
                        (format!("{}/{}", t.algorithm, t.hidden_size), m.test.mse)
                    })
                })
                .collect()
        })
        .collect();
    let n = rows.iter().map(Vec::len).max().unwrap_or(0).max(1);
    let bar = 20.0;
    let panel_h = 220.0;
    let width = 110.0 + n as f64 * bar + 40.0;
    let height = 50.0 + 2.0 * (panel_h + 120.0);
    let y_max = rows.iter().flatten().map(|r| r.1).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let mut svg = String::new();
    header(&mut svg, width, height, title);
    for (k, (arch, bars)) in Architecture::ALL.iter().zip(&rows).enumerate() {
        let top = 50.0 + k as f64 * (panel_h + 120.0);
        let frame = Frame {
            left: 80.0,
            top,
            width: n as f64 * bar,
            height: panel_h,
            x: (0.0, n as f64),
            y: (0.0, y_max * 1.05),
        };
        frame.axes(&mut svg, "", "test MSE", false);
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="13">{}</text>"#,
            frame.left,
            top - 6.0,
            arch.long_name()
        )
        .unwrap();
        for (i, (label, v)) in bars.iter().enumerate() {
            let x = frame.px(i as f64) + 2.0;
            let y = frame.py(*v);
            writeln!(
                svg,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                bar - 4.0,
                frame.py(0.0) - y,
                PALETTE[k]
            )
            .unwrap();
            let lx = x + (bar - 4.0) / 2.0;
            let ly = frame.py(0.0) + 6.0;
            writeln!(
                svg,
                r#"<text x="{lx:.2}" y="{ly:.2}" font-size="9" text-anchor="end" transform="rotate(-70 {lx:.2} {ly:.2})">{}</text>"#,
                escape(label)
            )
            .unwrap();
        }
    }
    svg.push_str("</svg>\n");
    (svg, csv)
}

pub fn emit_test_mse_plot(title: &str, trials: &[TrialResult], out: &Path) -> Result<PlotFiles> {
    let (svg, csv) = test_mse_svg(title, trials);
    write_pair(out, &svg, &csv)
}
