//! Power sweeps, rotation sweeps and orientation search.
//!
//! All sweeps draw every realization once and reuse those draws for every
//! cell, so cells differ only in panel orientation or transmit power.
//! Work runs in parallel over `(rotation, realization)` pairs and is
//! reduced into grids keyed by index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ScenarioConfig;
use crate::error::{Result, SimError};
use crate::geometry::RotationAngles;
use crate::rate::{draw_all, end_to_end_channel, rate_from_singular_values, singular_values, snr_linear, RateResult};
use crate::ris_control::PhaseStrategy;

/// `start, start + step, …` up to and including `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub const fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(SimError::InvalidInput(format!("{name} grid must be finite")));
        }
        if self.step <= 0.0 {
            return Err(SimError::InvalidInput(format!("{name} grid step must be > 0, got {}", self.step)));
        }
        if self.stop < self.start {
            return Err(SimError::InvalidInput(format!(
                "{name} grid stop {} is below start {}",
                self.stop, self.start
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    #[serde(alias = "az")]
    Azimuth,
    #[serde(alias = "el")]
    Elevation,
    #[default]
    Joint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub azimuth: GridSpec,
    pub elevation: GridSpec,
    pub powers_dbm: Vec<f64>,
    pub strategy: PhaseStrategy,
    pub axis: SweepAxis,
    /// Azimuth held during elevation sweeps.
    pub fixed_azimuth_deg: f64,
    /// Elevation held during azimuth sweeps.
    pub fixed_elevation_deg: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            azimuth: GridSpec::new(0.0, 350.0, 10.0),
            elevation: GridSpec::new(0.0, 350.0, 10.0),
            powers_dbm: vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0],
            strategy: PhaseStrategy::DominantPair,
            axis: SweepAxis::Joint,
            fixed_azimuth_deg: 0.0,
            fixed_elevation_deg: 0.0,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.azimuth.validate("azimuth")?;
        self.elevation.validate("elevation")?;
        if self.powers_dbm.is_empty() {
            return Err(SimError::InvalidInput("power list is empty".into()));
        }
        if self.powers_dbm.iter().any(|p| !p.is_finite()) {
            return Err(SimError::InvalidInput("power list has non-finite entries".into()));
        }
        RotationAngles::new(self.fixed_azimuth_deg, self.fixed_elevation_deg)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    AzimuthDeg,
    ElevationDeg,
    PowerDbm,
}

impl AxisKind {
    pub fn label(&self) -> &'static str {
        match self {
            AxisKind::AzimuthDeg => "azimuth_deg",
            AxisKind::ElevationDeg => "elevation_deg",
            AxisKind::PowerDbm => "power_dbm",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "azimuth_deg" => Some(AxisKind::AzimuthDeg),
            "elevation_deg" => Some(AxisKind::ElevationDeg),
            "power_dbm" => Some(AxisKind::PowerDbm),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub kind: AxisKind,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HeatmapMetadata {
    pub config_digest: String,
    pub seed: u64,
    /// Orientation of every cell on the axes that are not angles.
    pub fixed_azimuth_deg: f64,
    pub fixed_elevation_deg: f64,
}

/// Grid of ergodic rates. `cells` is row-major: `rows.values.len()` rows of
/// `columns.values.len()` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateHeatmap {
    pub columns: Axis,
    pub rows: Axis,
    pub cells: Vec<RateResult>,
    pub metadata: HeatmapMetadata,
}

impl RateHeatmap {
    pub fn new(columns: Axis, rows: Axis, cells: Vec<RateResult>, metadata: HeatmapMetadata) -> Result<Self> {
        if cells.len() != columns.values.len() * rows.values.len() {
            return Err(SimError::DimensionMismatch(format!(
                "{} cells for a {}×{} grid",
                cells.len(),
                rows.values.len(),
                columns.values.len()
            )));
        }
        Ok(Self { columns, rows, cells, metadata })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.values.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.values.len()
    }

    pub fn cell(&self, row: usize, col: usize) -> &RateResult {
        &self.cells[row * self.n_cols() + col]
    }

    /// Panel orientation of a cell.
    pub fn cell_rotation(&self, row: usize, col: usize) -> Result<RotationAngles> {
        let mut az = self.metadata.fixed_azimuth_deg;
        let mut el = self.metadata.fixed_elevation_deg;
        for (axis, idx) in [(&self.columns, col), (&self.rows, row)] {
            match axis.kind {
                AxisKind::AzimuthDeg => az = axis.values[idx],
                AxisKind::ElevationDeg => el = axis.values[idx],
                AxisKind::PowerDbm => {}
            }
        }
        RotationAngles::new(az, el)
    }

    /// Row-major cell means.
    pub fn mean_rates(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.mean_rate).collect()
    }
}

fn metadata(config: &ScenarioConfig, fixed: RotationAngles) -> HeatmapMetadata {
    HeatmapMetadata {
        config_digest: crate::io::config_digest(config),
        seed: config.master_seed,
        fixed_azimuth_deg: fixed.azimuth_deg(),
        fixed_elevation_deg: fixed.elevation_deg(),
    }
}

/// Per rotation, per power: the ergodic rate over all realizations.
fn rates_at(
    config: &ScenarioConfig,
    rotations: &[RotationAngles],
    powers_dbm: &[f64],
    strategy: PhaseStrategy,
) -> Result<Vec<Vec<RateResult>>> {
    let draws = draw_all(config)?;
    let frames = config.layout.frames()?;
    let m = draws.len();
    let rhos: Vec<f64> = powers_dbm.iter().map(|p| snr_linear(*p, config.noise_dbm)).collect();
    // Item k covers rotation k / m, realization k % m.
    let per_item = (0..rotations.len() * m)
        .into_par_iter()
        .map(|k| {
            let c = end_to_end_channel(config, &frames, &draws[k % m], rotations[k / m], strategy)?;
            let s = singular_values(&c)?;
            Ok(rhos.iter().map(|rho| rate_from_singular_values(&s, *rho)).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_item
        .chunks(m)
        .map(|chunk| {
            (0..rhos.len())
                .map(|p| RateResult::from_samples(&chunk.iter().map(|r| r[p]).collect::<Vec<_>>()))
                .collect()
        })
        .collect())
}

/// Ergodic rate against transmit power with the panel unrotated.
/// One row, one column per power level.
pub fn run_power_sweep(config: &ScenarioConfig, spec: &SweepSpec) -> Result<RateHeatmap> {
    spec.validate()?;
    let results = rates_at(config, &[RotationAngles::ZERO], &spec.powers_dbm, spec.strategy)?;
    RateHeatmap::new(
        Axis { kind: AxisKind::PowerDbm, values: spec.powers_dbm.clone() },
        Axis { kind: AxisKind::AzimuthDeg, values: vec![0.0] },
        results.into_iter().next().unwrap_or_default(),
        metadata(config, RotationAngles::ZERO),
    )
}

/// Ergodic rate over panel orientations.
///
/// Single-axis sweeps put the swept angle on the columns and power levels
/// on the rows, holding the other angle at its fixed value. A joint sweep
/// puts azimuth on the columns and elevation on the rows at
/// `config.tx_power_dbm`.
pub fn run_rotation_sweep(config: &ScenarioConfig, spec: &SweepSpec, axis: SweepAxis) -> Result<RateHeatmap> {
    spec.validate()?;
    let fixed = RotationAngles::new(spec.fixed_azimuth_deg, spec.fixed_elevation_deg)?;
    match axis {
        SweepAxis::Azimuth | SweepAxis::Elevation => {
            let (kind, values) = if axis == SweepAxis::Azimuth {
                (AxisKind::AzimuthDeg, spec.azimuth.values())
            } else {
                (AxisKind::ElevationDeg, spec.elevation.values())
            };
            let rotations = values
                .iter()
                .map(|v| match kind {
                    AxisKind::AzimuthDeg => RotationAngles::new(*v, spec.fixed_elevation_deg),
                    _ => RotationAngles::new(spec.fixed_azimuth_deg, *v),
                })
                .collect::<Result<Vec<_>>>()?;
            let results = rates_at(config, &rotations, &spec.powers_dbm, spec.strategy)?;
            // results[rotation][power] → rows are powers
            let cells = (0..spec.powers_dbm.len())
                .flat_map(|p| results.iter().map(move |r| r[p]))
                .collect();
            RateHeatmap::new(
                Axis { kind, values },
                Axis { kind: AxisKind::PowerDbm, values: spec.powers_dbm.clone() },
                cells,
                metadata(config, fixed),
            )
        }
        SweepAxis::Joint => {
            let az = spec.azimuth.values();
            let el = spec.elevation.values();
            let rotations = el
                .iter()
                .flat_map(|e| az.iter().map(move |a| RotationAngles::new(*a, *e)))
                .collect::<Result<Vec<_>>>()?;
            let results = rates_at(config, &rotations, &[config.tx_power_dbm], spec.strategy)?;
            RateHeatmap::new(
                Axis { kind: AxisKind::AzimuthDeg, values: az },
                Axis { kind: AxisKind::ElevationDeg, values: el },
                results.into_iter().map(|r| r[0]).collect(),
                metadata(config, fixed),
            )
        }
    }
}

/// Cell with the highest mean rate. Ties go to the smallest deviation
/// `‖(φ, θ)‖` from the unrotated panel, then to the smallest azimuth.
pub fn find_optimal_orientation(heatmap: &RateHeatmap) -> Result<(RotationAngles, RateResult)> {
    let mut best: Option<(RotationAngles, RateResult)> = None;
    for row in 0..heatmap.n_rows() {
        for col in 0..heatmap.n_cols() {
            let rot = heatmap.cell_rotation(row, col)?;
            let cell = *heatmap.cell(row, col);
            let better = match &best {
                None => true,
                Some((b_rot, b)) => {
                    cell.mean_rate > b.mean_rate
                        || (cell.mean_rate == b.mean_rate
                            && (rot.deviation_deg(), rot.azimuth_deg()) < (b_rot.deviation_deg(), b_rot.azimuth_deg()))
                }
            };
            if better {
                best = Some((rot, cell));
            }
        }
    }
    best.ok_or(SimError::EmptyHeatmap)
}

/// Row and column of the cell chosen by [`find_optimal_orientation`].
pub fn optimal_cell(heatmap: &RateHeatmap) -> Result<(usize, usize)> {
    let (rot, res) = find_optimal_orientation(heatmap)?;
    for row in 0..heatmap.n_rows() {
        for col in 0..heatmap.n_cols() {
            if heatmap.cell_rotation(row, col)? == rot && *heatmap.cell(row, col) == res {
                return Ok((row, col));
            }
        }
    }
    Err(SimError::EmptyHeatmap)
}
