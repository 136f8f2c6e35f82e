//! Minimal static SVG line plot, no external renderer required.

use std::io::Write;

pub struct Series<'a> {
    pub points: &'a [(f64, f64)],
    pub marked: &'a [usize],
}

/// Writes a single-polyline plot with axis labels. The first comment line
/// carries the canonical run configuration.
pub fn write_plot<W: Write>(
    out: &mut W,
    header: &str,
    x_label: &str,
    y_label: &str,
    series: &Series,
) -> std::io::Result<()> {
    const W_PX: f64 = 720.0;
    const H_PX: f64 = 480.0;
    const ML: f64 = 64.0; // left margin
    const MB: f64 = 48.0; // bottom margin
    const MT: f64 = 16.0;
    const MR: f64 = 16.0;

    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in series.points {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if !x_min.is_finite() || x_min == x_max {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if !y_min.is_finite() || y_min == y_max {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let pad = (y_max - y_min) * 0.05;
    y_min -= pad;
    y_max += pad;

    let sx = |x: f64| ML + (x - x_min) / (x_max - x_min) * (W_PX - ML - MR);
    let sy = |y: f64| H_PX - MB - (y - y_min) / (y_max - y_min) * (H_PX - MB - MT);

    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W_PX} {H_PX}\" font-family=\"monospace\" font-size=\"12\">"
    )?;
    writeln!(out, "<!-- {header} -->")?;
    writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{W_PX}\" height=\"{H_PX}\" fill=\"white\"/>"
    )?;
    // axes
    writeln!(
        out,
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>",
        H_PX - MB
    )?;
    writeln!(
        out,
        "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        H_PX - MB,
        W_PX - MR,
        H_PX - MB
    )?;
    // labels and ranges
    writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>",
        (ML + W_PX - MR) / 2.0,
        H_PX - 12.0
    )?;
    writeln!(
        out,
        "<text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{y_label}</text>",
        (MT + H_PX - MB) / 2.0,
        (MT + H_PX - MB) / 2.0
    )?;
    for (v, x_side) in [(x_min, true), (x_max, false)] {
        let x = if x_side { ML } else { W_PX - MR };
        writeln!(
            out,
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{v:.4}</text>",
            H_PX - MB + 16.0
        )?;
    }
    for v in [y_min + pad, y_max - pad] {
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{v:.4}</text>",
            ML - 6.0,
            sy(v) + 4.0
        )?;
    }
    // polyline
    let pts: Vec<String> = series
        .points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>",
        pts.join(" ")
    )?;
    for &i in series.marked {
        if let Some(&(x, y)) = series.points.get(i) {
            writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"#d62728\"/>",
                sx(x),
                sy(y)
            )?;
        }
    }
    writeln!(out, "</svg>")
}
