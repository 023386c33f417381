//! Minimal SVG writers: polyline charts and square heatmaps. No external
//! plotting dependency; enough to eyeball sweeps, regions, ROC overlays,
//! and admissibility grids.

use crate::error::CliResult;
use std::fmt::Write as _;
use std::path::Path;

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 620.0;
const MARGIN: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn finite_bounds(series: &[Series]) -> ((f64, f64), (f64, f64)) {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            if x.is_finite() {
                xmin = xmin.min(x);
                xmax = xmax.max(x);
            }
            if y.is_finite() {
                ymin = ymin.min(y);
                ymax = ymax.max(y);
            }
        }
    }
    if !xmin.is_finite() || xmin == xmax {
        xmax = xmin + 1.0;
    }
    if !ymin.is_finite() || ymin == ymax {
        ymax = ymin + 1.0;
    }
    ((xmin, xmax), (ymin, ymax))
}

/// Polyline chart of one or more series. Non-finite points are skipped.
pub fn line_chart(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> CliResult<()> {
    let ((xmin, xmax), (ymin, ymax)) = finite_bounds(series);
    let sx = |x: f64| MARGIN + (x - xmin) / (xmax - xmin) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - ymin) / (ymax - ymin) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="28" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        title
    );
    // Axes.
    let _ = writeln!(
        out,
        r#"<line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{m}" y1="{t}" x2="{m}" y2="{b}" stroke="black"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        x_label
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y_label
    );
    // Axis extents.
    for (v, x, y, anchor) in [
        (xmin, MARGIN, HEIGHT - MARGIN + 16.0, "middle"),
        (xmax, WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, "middle"),
    ] {
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{y}" font-size="10" text-anchor="{anchor}">{v:.4}</text>"#
        );
    }
    for (v, y) in [(ymin, HEIGHT - MARGIN), (ymax, MARGIN)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{v:.4}</text>"#,
            MARGIN - 6.0,
            y + 4.0
        );
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
            WIDTH - MARGIN + 6.0,
            MARGIN + 16.0 * i as f64,
            s.label
        );
    }
    let _ = writeln!(out, "</svg>");
    std::fs::write(path, out)?;
    Ok(())
}

/// Square heatmap of `n x n` values in row-major order (rows advance along
/// the x axis), with a two-color ramp.
pub fn heatmap(path: &Path, title: &str, n: usize, values: &[f64]) -> CliResult<()> {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let vmin = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let vmax = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if vmax > vmin { vmax - vmin } else { 1.0 };
    let plot = (WIDTH.min(HEIGHT)) - 2.0 * MARGIN;
    let cellsz = plot / n as f64;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="28" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        title
    );
    for i in 0..n {
        for j in 0..n {
            let v = values[i * n + j];
            let t = if v.is_finite() { ((v - vmin) / span).clamp(0.0, 1.0) } else { 1.0 };
            let r = (40.0 + 215.0 * t) as u8;
            let g = (40.0 + 120.0 * (1.0 - t)) as u8;
            let b = (160.0 * (1.0 - t) + 40.0) as u8;
            let x = MARGIN + i as f64 * cellsz;
            // j indexes the y axis bottom-up.
            let y = HEIGHT - MARGIN - (j + 1) as f64 * cellsz;
            let _ = writeln!(
                out,
                r##"<rect x="{x:.2}" y="{y:.2}" width="{cellsz:.2}" height="{cellsz:.2}" fill="rgb({r},{g},{b})"/>"##
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="10">min {vmin:.4} / max {vmax:.4}</text>"#,
        MARGIN,
        HEIGHT - 20.0
    );
    let _ = writeln!(out, "</svg>");
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_render_without_panicking() {
        let dir = tempfile::tempdir().unwrap();
        let series = vec![
            Series { label: "a".into(), points: vec![(0.0, 1.0), (1.0, 2.0), (2.0, f64::INFINITY)] },
            Series { label: "b".into(), points: vec![(0.0, 0.5), (2.0, 0.25)] },
        ];
        let p = dir.path().join("c.svg");
        line_chart(&p, "t", "x", "y", &series).unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().contains("<svg"));
        let p = dir.path().join("h.svg");
        heatmap(&p, "h", 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]).unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().contains("rect"));
    }
}
