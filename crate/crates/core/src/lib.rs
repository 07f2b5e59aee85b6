//! Rotation-aware simulation of UAV-mounted RIS-assisted MIMO links.
//!
//! The crate synthesizes the BS→RIS (`H`), RIS→user (`G`) and direct (`D`)
//! channels for a given panel orientation, forms the end-to-end channel
//! `C = G·Φ·H + D`, evaluates the log-det achievable rate and sweeps panel
//! azimuth/elevation and transmit power.
//!
//! Module map:
//!
//! - [`geometry`]: positions, rotation matrices, local-frame directions
//! - [`arrays`]: ULA/UPA layouts, steering vectors, element gain
//! - [`channel`]: scenario description, validation, path loss, clusters,
//!   per-realization channel synthesis
//! - [`ris_control`]: phase matrix, end-to-end assembly, phase alignment
//! - [`rate`]: achievable and ergodic rate
//! - [`sweep`]: power sweeps, rotation sweeps, orientation search
//! - [`io`]: config files, CSV/JSON/SVG output, run manifests
//! - [`cli`]: the `ris-sim` command line

pub mod arrays;
pub mod channel;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod rate;
pub mod ris_control;
pub mod rng;
pub mod sweep;

pub use error::{Result, SimError};
