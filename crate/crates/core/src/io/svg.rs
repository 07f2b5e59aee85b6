//! SVG heatmap rendering.
//!
//! Colors follow a five-stop viridis ramp (`#440154`, `#3b528b`, `#21918c`,
//! `#5ec962`, `#fde725`) interpolated linearly in sRGB between the grid's
//! minimum and maximum mean rate; a flat grid renders in the first stop.
//! Row 0 is drawn at the bottom. The best cell (see
//! [`find_optimal_orientation`](crate::sweep::find_optimal_orientation)) is
//! outlined in red.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::sweep::{optimal_cell, AxisKind, RateHeatmap};

use super::write_file;

const STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

const CELL: usize = 16;
const LEFT: usize = 70;
const TOP: usize = 30;
const BOTTOM: usize = 50;
const BAR_GAP: usize = 20;
const BAR_WIDTH: usize = 14;
const RIGHT: usize = 90;

/// Ramp color for `t ∈ [0, 1]`.
pub fn colormap(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let pos = t * (STOPS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - i as f64;
    let c: Vec<u8> = (0..3)
        .map(|k| (STOPS[i][k] + f * (STOPS[i + 1][k] - STOPS[i][k])).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn axis_title(kind: AxisKind) -> &'static str {
    match kind {
        AxisKind::AzimuthDeg => "azimuth φ (deg)",
        AxisKind::ElevationDeg => "elevation θ (deg)",
        AxisKind::PowerDbm => "transmit power (dBm)",
    }
}

fn tick_stride(n: usize) -> usize {
    n.div_ceil(12).max(1)
}

pub fn render_heatmap_svg(heatmap: &RateHeatmap) -> Result<String> {
    let (rows, cols) = (heatmap.n_rows(), heatmap.n_cols());
    let best = optimal_cell(heatmap)?;
    let means = heatmap.mean_rates();
    let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let norm = |v: f64| if span > 0.0 { (v - lo) / span } else { 0.0 };

    let grid_w = cols * CELL;
    let grid_h = rows * CELL;
    let width = LEFT + grid_w + BAR_GAP + BAR_WIDTH + RIGHT;
    let height = TOP + grid_h + BOTTOM;
    let y_of = |row: usize| TOP + (rows - 1 - row) * CELL;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();

    for row in 0..rows {
        for col in 0..cols {
            let v = heatmap.cell(row, col).mean_rate;
            writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{}"><title>{:.4}</title></rect>"#,
                LEFT + col * CELL,
                y_of(row),
                colormap(norm(v)),
                v
            )
            .unwrap();
        }
    }
    writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="none" stroke="red" stroke-width="2"/>"#,
        LEFT + best.1 * CELL,
        y_of(best.0)
    )
    .unwrap();

    let stride = tick_stride(cols);
    for (col, v) in heatmap.columns.values.iter().enumerate().step_by(stride) {
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{v}</text>"#,
            LEFT + col * CELL + CELL / 2,
            TOP + grid_h + 14
        )
        .unwrap();
    }
    let stride = tick_stride(rows);
    for (row, v) in heatmap.rows.values.iter().enumerate().step_by(stride) {
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{v}</text>"#,
            LEFT - 6,
            y_of(row) + CELL / 2 + 3
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + grid_w / 2,
        TOP + grid_h + 36,
        axis_title(heatmap.columns.kind)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="16" y="{y}" text-anchor="middle" transform="rotate(-90 16 {y})">{}</text>"#,
        axis_title(heatmap.rows.kind),
        y = TOP + grid_h / 2
    )
    .unwrap();

    // Color bar, bottom = minimum.
    let bar_x = LEFT + grid_w + BAR_GAP;
    let steps = 32;
    for i in 0..steps {
        let t = (i as f64 + 0.5) / steps as f64;
        let y0 = TOP as f64 + grid_h as f64 * (1.0 - (i + 1) as f64 / steps as f64);
        writeln!(
            s,
            r#"<rect x="{bar_x}" y="{:.2}" width="{BAR_WIDTH}" height="{:.2}" fill="{}"/>"#,
            y0,
            grid_h as f64 / steps as f64 + 0.5,
            colormap(t)
        )
        .unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}">{hi:.2}</text>"#, bar_x + BAR_WIDTH + 4, TOP + 8).unwrap();
    writeln!(s, r#"<text x="{}" y="{}">{lo:.2}</text>"#, bar_x + BAR_WIDTH + 4, TOP + grid_h).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="{}">bits/s/Hz</text>"#,
        bar_x,
        TOP + grid_h + 14
    )
    .unwrap();
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_heatmap_image(heatmap: &RateHeatmap, path: &Path) -> Result<()> {
    write_file(path, &render_heatmap_svg(heatmap)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::RateResult;
    use crate::sweep::{Axis, HeatmapMetadata};

    pub(crate) fn grid(values: Vec<f64>) -> RateHeatmap {
        RateHeatmap::new(
            Axis { kind: AxisKind::AzimuthDeg, values: vec![0.0, 10.0] },
            Axis { kind: AxisKind::ElevationDeg, values: vec![0.0, 10.0] },
            values
                .into_iter()
                .map(|m| RateResult { mean_rate: m, std_error: 0.0, realizations_used: 1 })
                .collect(),
            HeatmapMetadata::default(),
        )
        .unwrap()
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(colormap(0.0), "#440154");
        assert_eq!(colormap(1.0), "#fde725");
        assert_eq!(colormap(0.5), "#21918c");
    }

    #[test]
    fn two_by_two_grid() {
        let svg = render_heatmap_svg(&grid(vec![1.0, 2.0, 3.0, 4.0])).unwrap();
        assert_eq!(svg.matches("<title>").count(), 4);
        assert_eq!(svg.matches("stroke=\"red\"").count(), 1);
        // Best cell is row 1, col 1, drawn in the top row.
        assert!(svg.contains(&format!(r#"<rect x="{}" y="{}" width="16" height="16" fill="none" stroke="red""#, LEFT + 16, TOP)));
        assert!(svg.contains("#fde725"));
    }

    #[test]
    fn flat_grid_is_uniform() {
        let svg = render_heatmap_svg(&grid(vec![2.0; 4])).unwrap();
        let cell_fills: Vec<&str> = svg
            .lines()
            .filter(|l| l.contains("<title>"))
            .map(|l| l.split("fill=\"").nth(1).unwrap().split('"').next().unwrap())
            .collect();
        assert_eq!(cell_fills, vec!["#440154"; 4]);
        // Tie-break picks (0, 0): row 0 is the bottom row.
        assert!(svg.contains(&format!(r#"<rect x="{LEFT}" y="{}" width="16" height="16" fill="none" stroke="red""#, TOP + 16)));
    }
}
