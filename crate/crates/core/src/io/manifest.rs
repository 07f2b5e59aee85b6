//! Run manifests and JSON result summaries.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::RotationAngles;
use crate::rate::RateResult;
use crate::sweep::{find_optimal_orientation, optimal_cell, RateHeatmap};

use super::{canonical_json, write_file};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub tool_version: String,
    pub seed: u64,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub outputs: Vec<String>,
}

pub fn unix_ms_now() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn start(config_digest: String, seed: u64) -> Self {
        Self {
            config_digest,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            started_unix_ms: unix_ms_now(),
            finished_unix_ms: 0,
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, path: &Path) {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.outputs.push(name);
    }

    pub fn finish(mut self, path: &Path) -> Result<()> {
        self.finished_unix_ms = unix_ms_now();
        self.record(path);
        write_file(path, &canonical_json(&self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryRotation {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
}

impl From<RotationAngles> for SummaryRotation {
    fn from(r: RotationAngles) -> Self {
        Self {
            azimuth_deg: r.azimuth_deg(),
            elevation_deg: r.elevation_deg(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryArgmax {
    pub row: usize,
    pub col: usize,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
}

/// `{config_digest, rotation, mean_rate, std_error, argmax}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config_digest: String,
    pub rotation: SummaryRotation,
    pub mean_rate: f64,
    pub std_error: f64,
    pub argmax: Option<SummaryArgmax>,
}

impl Summary {
    pub fn for_rate(config_digest: String, rotation: RotationAngles, r: &RateResult) -> Self {
        Self {
            config_digest,
            rotation: rotation.into(),
            mean_rate: r.mean_rate,
            std_error: r.std_error,
            argmax: None,
        }
    }

    /// Summary of a heatmap's best cell.
    pub fn for_heatmap(config_digest: String, heatmap: &RateHeatmap) -> Result<Self> {
        let (rot, best) = find_optimal_orientation(heatmap)?;
        let (row, col) = optimal_cell(heatmap)?;
        Ok(Self {
            config_digest,
            rotation: rot.into(),
            mean_rate: best.mean_rate,
            std_error: best.std_error,
            argmax: Some(SummaryArgmax {
                row,
                col,
                azimuth_deg: rot.azimuth_deg(),
                elevation_deg: rot.elevation_deg(),
            }),
        })
    }

    pub fn to_json(&self) -> String {
        canonical_json(self)
    }
}
