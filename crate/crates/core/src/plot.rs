//! Minimal SVG line plots of result grids.
//!
//! Axis 0 is the abscissa; every combination of the remaining axes is one
//! curve. Each point is the mean over the users of interest. Failed cells and
//! points that cannot be drawn on a log axis leave gaps.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::HarnessError;
use crate::sweep::{GridAxis, OutputMetric, ResultGrid};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    /// `None` marks a gap.
    pub points: Vec<(f64, Option<f64>)>,
}

fn plot_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Plot(msg.into())
}

fn family_label(axes: &[GridAxis], idx: &[usize]) -> String {
    axes.iter()
        .zip(idx)
        .map(|(a, &i)| format!("{} = {}", a.variable.name(), a.values[i]))
        .collect::<Vec<_>>()
        .join(", ")
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Extracts the curves drawn for `grid`.
pub fn curves(grid: &ResultGrid) -> Result<Vec<Curve>, HarnessError> {
    let output = grid.metadata.spec.output;
    let axes: &[GridAxis] = if output == OutputMetric::SirMin {
        &grid.axes[..grid.axes.len().saturating_sub(1)]
    } else {
        &grid.axes
    };
    if axes.is_empty() || axes.len() > 3 {
        return Err(plot_err(format!("cannot plot a grid with {} plotted axes", axes.len())));
    }
    let nx = axes[0].values.len();
    let families: usize = axes[1..].iter().map(|a| a.values.len()).product();
    let mut out = Vec::with_capacity(families);
    for f in 0..families {
        let mut fidx = vec![0; axes.len() - 1];
        let mut rest = f;
        for d in (0..fidx.len()).rev() {
            fidx[d] = rest % axes[d + 1].values.len();
            rest /= axes[d + 1].values.len();
        }
        let points = (0..nx)
            .map(|x| {
                let mut idx = vec![x];
                idx.extend(&fidx);
                let y = if output == OutputMetric::SirMin {
                    mean(
                        grid.sir_min
                            .iter()
                            .filter(|e| e.index == idx)
                            .filter_map(|e| e.sir_min.value()),
                    )
                } else {
                    let inner: usize = idx.iter().zip(axes).fold(0, |acc, (&i, a)| acc * a.values.len() + i);
                    grid.cells
                        .get(inner)
                        .and_then(|c| c.records())
                        .and_then(|r| mean(r.iter().filter_map(|r| output.value(r))))
                };
                (axes[0].values[x], y.filter(|v| v.is_finite()))
            })
            .collect();
        out.push(Curve {
            label: family_label(&axes[1..], &fidx),
            points,
        });
    }
    Ok(out)
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Option<Scale> {
        let vals: Vec<f64> = values.filter(|v| v.is_finite() && (!log || *v > 0.0)).map(|v| if log { v.log10() } else { v }).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            return None;
        }
        let (lo, hi) = if log {
            (lo.floor(), hi.ceil().max(lo.floor() + 1.0))
        } else if hi - lo < 1e-12 {
            (lo - 1.0, hi + 1.0)
        } else {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        };
        Some(Scale { lo, hi, log })
    }

    fn frac(&self, v: f64) -> Option<f64> {
        let t = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        Some((t - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let step = ((self.hi - self.lo) / 8.0).ceil().max(1.0) as i32;
            return (self.lo as i32..=self.hi as i32)
                .step_by(step as usize)
                .map(|e| (10f64.powi(e), format!("1e{e}")))
                .collect();
        }
        let raw = (self.hi - self.lo) / 6.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
        let mut t = (self.lo / step).ceil() * step;
        let mut out = Vec::new();
        while t <= self.hi + 1e-9 * step {
            let v = if t.abs() < 1e-12 * step { 0.0 } else { t };
            out.push((v, format!("{}", (v * 1e6).round() / 1e6)));
            t += step;
        }
        out
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders `grid` as an SVG document.
pub fn render_svg(grid: &ResultGrid) -> Result<String, HarnessError> {
    let spec = &grid.metadata.spec;
    let curves = curves(grid)?;
    let xs = Scale::new(curves.iter().flat_map(|c| c.points.iter().map(|p| p.0)), spec.log_scale.x)
        .ok_or_else(|| plot_err("no drawable abscissa values"))?;
    let ys = Scale::new(curves.iter().flat_map(|c| c.points.iter().filter_map(|p| p.1)), spec.log_scale.y)
        .ok_or_else(|| plot_err("grid has no drawable values"))?;

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| xs.frac(x).map(|f| LEFT + f * pw);
    let py = |y: f64| ys.frac(y).map(|f| TOP + (1.0 - f) * ph);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, esc(&spec.name));

    for (v, label) in xs.ticks() {
        if let Some(x) = px(v) {
            let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##, TOP + ph);
            let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, TOP + ph + 16.0);
        }
    }
    for (v, label) in ys.ticks() {
        if let Some(y) = py(v) {
            let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##, LEFT + pw);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, LEFT - 6.0, y + 4.0);
        }
    }
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let x_axis = &grid.axes[0];
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 16.0,
        esc(x_axis.variable.label())
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        esc(spec.output.label())
    );

    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut segment: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, s: &mut String| {
            if seg.len() > 1 {
                let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, seg.join(" "));
            }
            seg.clear();
        };
        for &(x, y) in &c.points {
            match (px(x), y.and_then(py)) {
                (Some(x), Some(y)) => {
                    segment.push(format!("{x:.2},{y:.2}"));
                    let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
                }
                _ => flush(&mut segment, &mut s),
            }
        }
        flush(&mut segment, &mut s);
        if !c.label.is_empty() {
            let ly = TOP + 10.0 + 18.0 * i as f64;
            let lx = LEFT + pw + 12.0;
            let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
            let _ = writeln!(s, r#"<text x="{}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, esc(&c.label));
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(grid: &ResultGrid, path: &Path) -> Result<(), HarnessError> {
    let svg = render_svg(grid)?;
    std::fs::write(path, svg)?;
    Ok(())
}
