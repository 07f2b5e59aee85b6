//! Config files, result files and run manifests.

pub mod config;
pub mod csv;
pub mod manifest;
pub mod svg;

pub use config::{canonical_json, config_digest, load_config, parse_config, ConfigFile, ConfigFormat};
pub use csv::{emit_heatmap_csv, heatmap_csv, parse_heatmap_csv, stderr_path};
pub use manifest::{RunManifest, Summary, SummaryArgmax};
pub use svg::{emit_heatmap_image, render_heatmap_svg};

use std::path::Path;

use crate::error::{Result, SimError};

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| SimError::io(path, e))
}
