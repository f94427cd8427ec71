//! Deterministic SVG line charts of aggregated results.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::aggregate::{Aggregates, BinRow, POOLED};
use crate::error::Result;
use crate::relgraph::NUM_RELATIONS;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];
const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const PAD_L: f64 = 56.0;
const PAD_R: f64 = 16.0;
const PAD_T: f64 = 32.0;
const PAD_B: f64 = 44.0;
const LEGEND_H: f64 = 18.0;

/// One plotted point with an optional interval band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlotPoint {
    pub x: f64,
    pub y: f64,
    pub band: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<PlotPoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Plot x on a log₂ axis (shot counts).
    pub log2_x: bool,
    pub y_range: (f64, f64),
    /// Dashed horizontal reference line and its label.
    pub reference: Option<(f64, String)>,
    pub series: Vec<Series>,
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Panel {
    fn x_values(&self) -> Vec<f64> {
        let mut xs: Vec<f64> = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.x)).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    fn render(&self, out: &mut String, ox: f64, oy: f64) {
        let tx = |x: f64| if self.log2_x { x.max(f64::MIN_POSITIVE).log2() } else { x };
        let xs = self.x_values();
        let (mut x0, mut x1) = match (xs.first(), xs.last()) {
            (Some(&a), Some(&b)) => (tx(a), tx(b)),
            _ => (0.0, 1.0),
        };
        if x1 - x0 < 1e-12 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        let (y0, y1) = self.y_range;
        let (pw, ph) = (PANEL_W - PAD_L - PAD_R, PANEL_H - PAD_T - PAD_B);
        let px = |x: f64| ox + PAD_L + (tx(x) - x0) / (x1 - x0) * pw;
        let py = |y: f64| oy + PAD_T + (1.0 - (y.clamp(y0, y1) - y0) / (y1 - y0)) * ph;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
            fmt(ox + PAD_L + pw / 2.0),
            fmt(oy + 18.0),
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
            fmt(ox + PAD_L),
            fmt(oy + PAD_T),
            fmt(pw),
            fmt(ph)
        );
        for i in 0..=4 {
            let y = y0 + (y1 - y0) * i as f64 / 4.0;
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{}</text>"#,
                fmt(ox + PAD_L - 4.0),
                fmt(py(y) + 3.0),
                fmt(y)
            );
        }
        for &x in &xs {
            let label = if self.log2_x { format!("{x}") } else { fmt(x) };
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle" font-size="10">{label}</text>"#,
                fmt(px(x)),
                fmt(oy + PAD_T + ph + 14.0)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="11">{}</text>"#,
            fmt(ox + PAD_L + pw / 2.0),
            fmt(oy + PANEL_H - 8.0),
            escape(&self.x_label)
        );
        let (lx, ly) = (ox + 14.0, oy + PAD_T + ph / 2.0);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="11" transform="rotate(-90 {} {})">{}</text>"#,
            fmt(lx),
            fmt(ly),
            fmt(lx),
            fmt(ly),
            escape(&self.y_label)
        );
        if let Some((y, label)) = &self.reference {
            let _ = writeln!(
                out,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888" stroke-dasharray="5,4"/>"##,
                fmt(ox + PAD_L),
                fmt(py(*y)),
                fmt(ox + PAD_L + pw),
                fmt(py(*y))
            );
            let _ = writeln!(
                out,
                r##"<text x="{}" y="{}" text-anchor="end" font-size="9" fill="#888">{}</text>"##,
                fmt(ox + PAD_L + pw - 3.0),
                fmt(py(*y) - 3.0),
                escape(label)
            );
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let banded: Vec<_> = s.points.iter().filter_map(|p| p.band.map(|b| (p.x, b))).collect();
            if banded.len() == s.points.len() && !banded.is_empty() {
                let upper = banded.iter().map(|(x, b)| format!("{},{}", fmt(px(*x)), fmt(py(b.1))));
                let lower = banded.iter().rev().map(|(x, b)| format!("{},{}", fmt(px(*x)), fmt(py(b.0))));
                let pts: Vec<String> = upper.chain(lower).collect();
                let _ = writeln!(out, r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#, pts.join(" "));
            }
            let pts: Vec<String> = s.points.iter().map(|p| format!("{},{}", fmt(px(p.x)), fmt(py(p.y)))).collect();
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#, pts.join(" "));
            for p in &s.points {
                let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="2.5" fill="{color}"/>"#, fmt(px(p.x)), fmt(py(p.y)));
            }
        }
    }
}

/// Renders panels side by side with a shared legend of the first panel's
/// series.
pub fn render_svg(panels: &[Panel]) -> String {
    let legend: Vec<&str> = panels.iter().flat_map(|p| p.series.iter().map(|s| s.label.as_str())).fold(Vec::new(), |mut v, l| {
        if !v.contains(&l) {
            v.push(l);
        }
        v
    });
    let width = PANEL_W * panels.len().max(1) as f64;
    let height = PANEL_H + LEGEND_H * legend.len() as f64 + 8.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif">"#,
        fmt(width),
        fmt(height),
        fmt(width),
        fmt(height)
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        // Series keep legend colors across panels.
        let recolored = Panel {
            series: legend
                .iter()
                .map(|l| p.series.iter().find(|s| s.label == *l).cloned().unwrap_or(Series { label: l.to_string(), points: vec![] }))
                .collect(),
            ..p.clone()
        };
        recolored.render(&mut out, PANEL_W * i as f64, 0.0);
    }
    for (i, l) in legend.iter().enumerate() {
        let y = PANEL_H + LEGEND_H * i as f64 + 6.0;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(out, r#"<rect x="{}" y="{}" width="14" height="4" fill="{color}"/>"#, fmt(PAD_L), fmt(y));
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="11">{}</text>"#, fmt(PAD_L + 20.0), fmt(y + 6.0), escape(l));
    }
    out.push_str("</svg>\n");
    out
}

fn bin_series(bins: &[BinRow], variant: &str) -> Series {
    Series {
        label: variant.to_string(),
        points: bins
            .iter()
            .filter(|b| b.variant == variant)
            .map(|b| PlotPoint { x: (b.bin_low + b.bin_high) / 2.0, y: b.accuracy, band: Some((b.ci_low, b.ci_high)) })
            .collect(),
    }
}

/// Accuracy by total shots, pooled over problems, one line per variant.
pub fn accuracy_panel(agg: &Aggregates) -> Panel {
    Panel {
        title: "Accuracy by total few-shot examples".into(),
        x_label: "total shots".into(),
        y_label: "accuracy".into(),
        log2_x: true,
        y_range: (0.0, 1.0),
        reference: Some((0.5, "chance".into())),
        series: agg
            .variants()
            .into_iter()
            .map(|v| Series {
                label: v.to_string(),
                points: agg
                    .curve(v, POOLED)
                    .map(|r| PlotPoint { x: r.total_shots as f64, y: r.accuracy, band: Some((r.ci_low, r.ci_high)) })
                    .collect(),
            })
            .collect(),
    }
}

fn with_alpha(agg: &Aggregates) -> Vec<&str> {
    agg.variants().into_iter().filter(|v| agg.curve(v, POOLED).any(|r| r.mean_alpha.is_some())).collect()
}

/// Mean final alpha by shots, and accuracy by alpha.
pub fn alpha_panels(agg: &Aggregates) -> [Panel; 2] {
    let variants = with_alpha(agg);
    [
        Panel {
            title: "Final alpha by total shots".into(),
            x_label: "total shots".into(),
            y_label: "mean final alpha".into(),
            log2_x: true,
            y_range: (0.0, 1.0),
            reference: Some((0.5, "initial".into())),
            series: variants
                .iter()
                .map(|v| Series {
                    label: v.to_string(),
                    points: agg
                        .curve(v, POOLED)
                        .filter_map(|r| r.mean_alpha.map(|a| PlotPoint { x: r.total_shots as f64, y: a, band: None }))
                        .collect(),
                })
                .collect(),
        },
        Panel {
            title: "Accuracy by final alpha".into(),
            x_label: "final alpha (bin center)".into(),
            y_label: "accuracy".into(),
            log2_x: false,
            y_range: (0.0, 1.0),
            reference: Some((0.5, "chance".into())),
            series: variants.iter().map(|v| bin_series(&agg.alpha_bins, v)).collect(),
        },
    ]
}

/// Mean weight of the distinguishing relation by shots, and accuracy by
/// that weight.
pub fn weight_panels(agg: &Aggregates) -> [Panel; 2] {
    let variants = with_alpha(agg);
    let uniform = 1.0 / NUM_RELATIONS as f64;
    [
        Panel {
            title: "Distinguishing-relation weight by total shots".into(),
            x_label: "total shots".into(),
            y_label: "mean final weight".into(),
            log2_x: true,
            y_range: (0.0, 1.0),
            reference: Some((uniform, "uniform".into())),
            series: variants
                .iter()
                .map(|v| Series {
                    label: v.to_string(),
                    points: agg
                        .curve(v, POOLED)
                        .filter_map(|r| r.mean_w_distinguishing.map(|w| PlotPoint { x: r.total_shots as f64, y: w, band: None }))
                        .collect(),
                })
                .collect(),
        },
        Panel {
            title: "Accuracy by distinguishing-relation weight".into(),
            x_label: "final weight (bin center)".into(),
            y_label: "accuracy".into(),
            log2_x: false,
            y_range: (0.0, 1.0),
            reference: Some((0.5, "chance".into())),
            series: variants.iter().map(|v| bin_series(&agg.weight_bins, v)).collect(),
        },
    ]
}

/// Writes `accuracy_by_shots.svg`, `alpha.svg` and `edge_weights.svg`.
pub fn render_plots(agg: &Aggregates, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let files = [
        ("accuracy_by_shots.svg", render_svg(&[accuracy_panel(agg)])),
        ("alpha.svg", render_svg(&alpha_panels(agg))),
        ("edge_weights.svg", render_svg(&weight_panels(agg))),
    ];
    let mut paths = Vec::new();
    for (name, svg) in files {
        let path = dir.join(name);
        std::fs::write(&path, svg)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::aggregate::CurveRow;

    fn row(variant: &str, shots: usize, acc: f64, alpha: Option<f64>) -> CurveRow {
        CurveRow {
            variant: variant.into(),
            problem_id: POOLED.into(),
            total_shots: shots,
            n: 10,
            correct: (acc * 10.0) as usize,
            accuracy: acc,
            ci_low: acc - 0.1,
            ci_high: acc + 0.1,
            mean_alpha: alpha,
            mean_w_inside: 1.0,
            mean_w_touching: 0.0,
            mean_w_same_shape: 0.0,
            mean_w_normalized_distance: 0.0,
            mean_w_mirrored: 0.0,
            mean_w_same_size: 0.0,
            mean_w_reflection: 0.0,
            mean_w_distinguishing: Some(0.5),
        }
    }

    #[test]
    fn plots_are_deterministic_and_well_formed() {
        let agg = Aggregates {
            curves: vec![row("a&b", 2, 0.6, Some(0.4)), row("a&b", 8, 0.9, Some(0.2)), row("proto", 2, 0.5, None)],
            alpha_bins: vec![],
            weight_bins: vec![],
        };
        let dir = tempfile::tempdir().unwrap();
        let first = render_plots(&agg, dir.path()).unwrap();
        let texts: Vec<String> = first.iter().map(|p| std::fs::read_to_string(p).unwrap()).collect();
        render_plots(&agg, dir.path()).unwrap();
        for (p, t) in first.iter().zip(&texts) {
            assert_eq!(&std::fs::read_to_string(p).unwrap(), t);
            assert!(t.starts_with("<svg") && t.ends_with("</svg>\n"));
            assert!(t.contains("stroke-dasharray"));
            assert!(!t.contains("a&b"));
        }
        assert!(texts[0].contains("a&amp;b") && texts[0].contains("proto") && texts[0].contains("<polygon"));
        assert!(!texts[1].contains("proto"));
    }
}
