use std::path::PathBuf;

use ris_sim::io::render_heatmap_svg;
use ris_sim::rate::RateResult;
use ris_sim::sweep::{Axis, AxisKind, HeatmapMetadata, RateHeatmap};

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/heatmap_3x4.svg")
}

fn fixture() -> RateHeatmap {
    let cells = [0.0, 0.0, 1.5, 0.25, 0.5, 2.0, 3.75, 1.0, 0.0, 0.125, 2.5, 3.0]
        .iter()
        .map(|r| RateResult { mean_rate: *r, std_error: 0.01, realizations_used: 10 })
        .collect();
    RateHeatmap::new(
        Axis { kind: AxisKind::AzimuthDeg, values: vec![0.0, 90.0, 180.0, 270.0] },
        Axis { kind: AxisKind::ElevationDeg, values: vec![0.0, 120.0, 240.0] },
        cells,
        HeatmapMetadata { config_digest: "fixture".into(), ..HeatmapMetadata::default() },
    )
    .unwrap()
}

/// Set `UPDATE_GOLDEN=1` to rewrite the reference after an intended change.
#[test]
fn svg_matches_golden_file() {
    let svg = render_heatmap_svg(&fixture()).unwrap();
    let path = golden_path();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &svg).unwrap();
    }
    let expected = std::fs::read_to_string(&path).expect("golden file present");
    assert_eq!(svg, expected);
}
