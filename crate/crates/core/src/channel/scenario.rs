//! Scenario description and validation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arrays::{ArrayKind, ArraySpec};
use crate::error::Result;
use crate::geometry::{angles_facing, compose_rotation, RotationAngles, RotationMatrix, Vec3};
use crate::ris_control::PhaseMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Environment {
    Indoor,
    Outdoor,
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Environment::Indoor => "indoor",
            Environment::Outdoor => "outdoor",
        })
    }
}

/// Supported carrier frequencies in GHz.
pub const SUPPORTED_FREQUENCIES_GHZ: [f64; 2] = [28.0, 73.0];

pub const INDOOR_MAX_TX_HEIGHT_M: f64 = 3.0;
/// Indoor receivers must sit strictly below this height.
pub const INDOOR_RX_HEIGHT_BOUND_M: f64 = 2.0;
pub const INDOOR_MAX_RIS_RX_DISTANCE_M: f64 = 10.0;
pub const OUTDOOR_MAX_TX_HEIGHT_M: f64 = 20.0;

/// How a node's array is oriented before any panel rotation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Mount {
    /// BS and user face the RIS; the RIS faces the bisector of its
    /// directions to the BS and the user.
    #[default]
    Auto,
    Fixed(RotationAngles),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawMount {
    Keyword(MountKeyword),
    Fixed(RotationAngles),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MountKeyword {
    Auto,
}

impl Serialize for Mount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Mount::Auto => RawMount::Keyword(MountKeyword::Auto),
            Mount::Fixed(a) => RawMount::Fixed(*a),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mount {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match RawMount::deserialize(d)? {
            RawMount::Keyword(MountKeyword::Auto) => Mount::Auto,
            RawMount::Fixed(a) => Mount::Fixed(a),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeLayout {
    pub tx: Vec3,
    pub rx: Vec3,
    pub ris: Vec3,
    #[serde(default = "default_true")]
    pub direct_link_blocked: bool,
    #[serde(default)]
    pub bs_mount: Mount,
    #[serde(default)]
    pub user_mount: Mount,
    #[serde(default)]
    pub ris_mount: Mount,
}

impl NodeLayout {
    /// Tx (0,25,2), Rx (45,45,1), RIS (40,50,2) with the direct link blocked.
    pub fn reference() -> Self {
        Self {
            tx: Vec3::new(0.0, 25.0, 2.0),
            rx: Vec3::new(45.0, 45.0, 1.0),
            ris: Vec3::new(40.0, 50.0, 2.0),
            direct_link_blocked: true,
            bs_mount: Mount::Auto,
            user_mount: Mount::Auto,
            ris_mount: Mount::Auto,
        }
    }
}

/// Unrotated array frames of the three nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeFrames {
    pub bs: RotationMatrix,
    pub user: RotationMatrix,
    /// RIS frame at zero panel rotation.
    pub ris_mount: RotationMatrix,
}

impl NodeFrames {
    /// RIS frame after turning the mounted panel by `rotation` about the
    /// global axes.
    pub fn ris(&self, rotation: RotationAngles) -> RotationMatrix {
        compose_rotation(rotation).compose(&self.ris_mount)
    }
}

impl NodeLayout {
    pub fn frames(&self) -> Result<NodeFrames> {
        let resolve = |mount: Mount, facing: Vec3| -> Result<RotationMatrix> {
            Ok(compose_rotation(match mount {
                Mount::Auto => angles_facing(facing)?,
                Mount::Fixed(a) => a,
            }))
        };
        let to_tx = (self.tx - self.ris).normalized();
        let to_rx = (self.rx - self.ris).normalized();
        let bisector = match (to_tx, to_rx) {
            (Some(a), Some(b)) => match (a + b).normalized() {
                Some(v) if (a + b).norm() > 1e-9 => v,
                _ => a,
            },
            _ => Vec3::new(1.0, 0.0, 0.0),
        };
        Ok(NodeFrames {
            bs: resolve(self.bs_mount, self.ris - self.tx)?,
            user: resolve(self.user_mount, self.ris - self.rx)?,
            ris_mount: resolve(self.ris_mount, bisector)?,
        })
    }
}

/// Path-loss coefficients for one environment and LOS state:
/// `PL = A + 10·n·log10(d) + 20·log10(f_GHz) + X_σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossParams {
    pub a_db: f64,
    pub exponent: f64,
    pub sigma_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConstants {
    pub los: PathLossParams,
    pub nlos: PathLossParams,
    /// LOS probability breakpoint `d1` in meters.
    pub los_d1_m: f64,
    /// LOS probability decay length `d2` in meters.
    pub los_d2_m: f64,
    /// Ricean K-factor of the LOS path.
    pub ricean_k_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LosMode {
    /// Bernoulli draw from the LOS probability.
    #[default]
    Stochastic,
    Always,
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagationParams {
    pub indoor: EnvironmentConstants,
    pub outdoor: EnvironmentConstants,
    pub los_mode: LosMode,
}

impl Default for PropagationParams {
    fn default() -> Self {
        Self {
            indoor: EnvironmentConstants {
                los: PathLossParams { a_db: 32.4, exponent: 1.73, sigma_db: 3.0 },
                nlos: PathLossParams { a_db: 32.4, exponent: 3.19, sigma_db: 8.0 },
                los_d1_m: 1.2,
                los_d2_m: 4.7,
                ricean_k_db: 7.0,
            },
            outdoor: EnvironmentConstants {
                los: PathLossParams { a_db: 32.4, exponent: 2.1, sigma_db: 4.0 },
                nlos: PathLossParams { a_db: 32.4, exponent: 3.19, sigma_db: 8.2 },
                los_d1_m: 18.0,
                los_d2_m: 36.0,
                ricean_k_db: 9.0,
            },
            los_mode: LosMode::Stochastic,
        }
    }
}

impl PropagationParams {
    pub fn environment(&self, env: Environment) -> &EnvironmentConstants {
        match env {
            Environment::Indoor => &self.indoor,
            Environment::Outdoor => &self.outdoor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterParams {
    /// Poisson mean of the cluster count.
    pub mean_cluster_count: f64,
    pub subrays_per_cluster: usize,
    /// Standard deviation of the Laplacian subray offsets.
    pub angular_spread_deg: f64,
    /// Overrides every path-loss table σ when set.
    pub shadow_fading_sigma_db: Option<f64>,
    /// Half-width of the uniform window for cluster centers around the LOS
    /// direction, azimuth.
    pub center_spread_azimuth_deg: f64,
    /// Same, elevation.
    pub center_spread_elevation_deg: f64,
    /// `false` replaces every link by one unit-power path along the LOS
    /// direction (test mode).
    pub multipath: bool,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            mean_cluster_count: 1.8,
            subrays_per_cluster: 10,
            angular_spread_deg: 5.0,
            shadow_fading_sigma_db: None,
            center_spread_azimuth_deg: 30.0,
            center_spread_elevation_deg: 10.0,
            multipath: true,
        }
    }
}

fn default_true() -> bool {
    true
}
fn default_frequency() -> f64 {
    28.0
}
fn default_tx_power() -> f64 {
    10.0
}
fn default_noise() -> f64 {
    -125.0
}
fn default_realizations() -> usize {
    100
}
fn default_seed() -> u64 {
    1
}
fn default_bs_array() -> ArraySpec {
    ArraySpec::upa(8, 8).expect("valid default")
}
fn default_ris_array() -> ArraySpec {
    ArraySpec::new(ArrayKind::Upa, 16, 16, 0.5, 1.0).expect("valid default")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_environment")]
    pub environment: Environment,
    #[serde(default = "default_frequency")]
    pub frequency_ghz: f64,
    pub layout: NodeLayout,
    #[serde(default = "default_bs_array")]
    pub bs_array: ArraySpec,
    #[serde(default = "default_bs_array")]
    pub user_array: ArraySpec,
    #[serde(default = "default_ris_array")]
    pub ris_array: ArraySpec,
    #[serde(default = "default_tx_power")]
    pub tx_power_dbm: f64,
    #[serde(default = "default_noise")]
    pub noise_dbm: f64,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub clusters: ClusterParams,
    #[serde(default)]
    pub propagation: PropagationParams,
    #[serde(default)]
    pub phase_mode: PhaseMode,
}

fn default_environment() -> Environment {
    Environment::Indoor
}

impl ScenarioConfig {
    /// All defaults around the given layout.
    pub fn with_layout(layout: NodeLayout) -> Self {
        Self {
            environment: default_environment(),
            frequency_ghz: default_frequency(),
            layout,
            bs_array: default_bs_array(),
            user_array: default_bs_array(),
            ris_array: default_ris_array(),
            tx_power_dbm: default_tx_power(),
            noise_dbm: default_noise(),
            realizations: default_realizations(),
            master_seed: default_seed(),
            clusters: ClusterParams::default(),
            propagation: PropagationParams::default(),
            phase_mode: PhaseMode::default(),
        }
    }

    /// Indoor 28 GHz setup on the reference node coordinates.
    pub fn reference_indoor() -> Self {
        Self::with_layout(NodeLayout::reference())
    }

    pub fn reference_outdoor() -> Self {
        Self {
            environment: Environment::Outdoor,
            ..Self::reference_indoor()
        }
    }

    pub fn wavelength_m(&self) -> f64 {
        299_792_458.0 / (self.frequency_ghz * 1e9)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Tx,
    Rx,
    Ris,
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Node::Tx => "tx",
            Node::Rx => "rx",
            Node::Ris => "ris",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    IndoorTxTooHigh { z: f64 },
    IndoorRxTooHigh { z: f64 },
    IndoorRisRxTooFar { distance: f64 },
    OutdoorTxTooHigh { z: f64 },
    UnsupportedFrequency { ghz: f64 },
    NonFinitePosition { node: Node },
    NegativeHeight { node: Node, z: f64 },
    CoincidentNodes { a: Node, b: Node },
    InvalidParameter { field: &'static str, reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IndoorTxTooHigh { z } => {
                write!(f, "indoor: tx height > {INDOOR_MAX_TX_HEIGHT_M} m (tx z = {z} m)")
            }
            Violation::IndoorRxTooHigh { z } => {
                write!(f, "indoor: rx height must be below {INDOOR_RX_HEIGHT_BOUND_M} m (rx z = {z} m)")
            }
            Violation::IndoorRisRxTooFar { distance } => write!(
                f,
                "indoor: RIS-rx distance > {INDOOR_MAX_RIS_RX_DISTANCE_M} m (distance = {distance:.3} m)"
            ),
            Violation::OutdoorTxTooHigh { z } => {
                write!(f, "outdoor: tx height > {OUTDOOR_MAX_TX_HEIGHT_M} m (tx z = {z} m)")
            }
            Violation::UnsupportedFrequency { ghz } => {
                write!(f, "frequency {ghz} GHz not supported (expected 28 or 73 GHz)")
            }
            Violation::NonFinitePosition { node } => write!(f, "{node} position is not finite"),
            Violation::NegativeHeight { node, z } => write!(f, "{node} height {z} m is below ground"),
            Violation::CoincidentNodes { a, b } => write!(f, "{a} and {b} positions coincide"),
            Violation::InvalidParameter { field, reason } => write!(f, "{field}: {reason}"),
        }
    }
}

/// Checks environment constraints and parameter ranges. Returns every
/// violation found; an empty list means the scenario is valid.
pub fn validate_scenario(config: &ScenarioConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let l = &config.layout;
    let nodes = [(Node::Tx, l.tx), (Node::Rx, l.rx), (Node::Ris, l.ris)];

    for (node, p) in nodes {
        if !p.is_finite() {
            out.push(Violation::NonFinitePosition { node });
        } else if p.z < 0.0 {
            out.push(Violation::NegativeHeight { node, z: p.z });
        }
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let (a, pa) = nodes[i];
            let (b, pb) = nodes[j];
            if pa.distance(&pb) <= 0.0 {
                out.push(Violation::CoincidentNodes { a, b });
            }
        }
    }

    let f = config.frequency_ghz;
    if !SUPPORTED_FREQUENCIES_GHZ.iter().any(|s| (s - f).abs() < 1e-9) {
        out.push(Violation::UnsupportedFrequency { ghz: f });
    }

    match config.environment {
        Environment::Indoor => {
            if l.tx.z > INDOOR_MAX_TX_HEIGHT_M {
                out.push(Violation::IndoorTxTooHigh { z: l.tx.z });
            }
            if l.rx.z >= INDOOR_RX_HEIGHT_BOUND_M {
                out.push(Violation::IndoorRxTooHigh { z: l.rx.z });
            }
            let d = l.ris.distance(&l.rx);
            if d > INDOOR_MAX_RIS_RX_DISTANCE_M {
                out.push(Violation::IndoorRisRxTooFar { distance: d });
            }
        }
        Environment::Outdoor => {
            if l.tx.z > OUTDOOR_MAX_TX_HEIGHT_M {
                out.push(Violation::OutdoorTxTooHigh { z: l.tx.z });
            }
        }
    }

    let mut bad = |field: &'static str, reason: String| {
        out.push(Violation::InvalidParameter { field, reason })
    };
    if config.realizations == 0 {
        bad("realizations", "must be at least 1".into());
    }
    if !config.noise_dbm.is_finite() {
        bad("noise_dbm", "must be finite".into());
    }
    if !config.tx_power_dbm.is_finite() {
        bad("tx_power_dbm", "must be finite".into());
    }
    let c = &config.clusters;
    if !(c.mean_cluster_count.is_finite() && c.mean_cluster_count > 0.0) {
        bad("clusters.mean_cluster_count", format!("must be > 0, got {}", c.mean_cluster_count));
    }
    if c.subrays_per_cluster == 0 {
        bad("clusters.subrays_per_cluster", "must be at least 1".into());
    }
    if !(c.angular_spread_deg.is_finite() && c.angular_spread_deg > 0.0) {
        bad("clusters.angular_spread_deg", format!("must be > 0, got {}", c.angular_spread_deg));
    }
    for (field, v) in [
        ("clusters.center_spread_azimuth_deg", c.center_spread_azimuth_deg),
        ("clusters.center_spread_elevation_deg", c.center_spread_elevation_deg),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            bad(field, format!("must be >= 0, got {v}"));
        }
    }
    if let Some(s) = c.shadow_fading_sigma_db {
        if !(s.is_finite() && s >= 0.0) {
            bad("clusters.shadow_fading_sigma_db", format!("must be >= 0, got {s}"));
        }
    }
    for (name, e) in [("propagation.indoor", &config.propagation.indoor), ("propagation.outdoor", &config.propagation.outdoor)] {
        let ok_pl = |p: &PathLossParams| {
            p.a_db.is_finite() && p.exponent.is_finite() && p.sigma_db.is_finite() && p.sigma_db >= 0.0
        };
        if !ok_pl(&e.los) || !ok_pl(&e.nlos) {
            bad(name, "path-loss coefficients must be finite with sigma_db >= 0".into());
        }
        if !(e.los_d1_m > 0.0 && e.los_d2_m > 0.0 && e.los_d1_m.is_finite() && e.los_d2_m.is_finite()) {
            bad(name, "LOS distances d1, d2 must be positive".into());
        }
        if !e.ricean_k_db.is_finite() {
            bad(name, "ricean_k_db must be finite".into());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_geometry_is_valid_indoors_and_outdoors() {
        assert_eq!(validate_scenario(&ScenarioConfig::reference_indoor()), vec![]);
        assert_eq!(validate_scenario(&ScenarioConfig::reference_outdoor()), vec![]);
        let l = NodeLayout::reference();
        assert!((l.ris.distance(&l.rx) - 51f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn indoor_tx_height_limit() {
        let mut c = ScenarioConfig::reference_indoor();
        c.layout.tx.z = 5.0;
        let v = validate_scenario(&c);
        assert_eq!(v, vec![Violation::IndoorTxTooHigh { z: 5.0 }]);
        assert!(v[0].to_string().contains("tx height > 3 m"));
        c.layout.tx.z = 3.0;
        assert!(validate_scenario(&c).is_empty());
    }

    #[test]
    fn indoor_rx_and_distance_limits() {
        let mut c = ScenarioConfig::reference_indoor();
        c.layout.rx = Vec3::new(45.0, 45.0, 2.0);
        assert_eq!(validate_scenario(&c), vec![Violation::IndoorRxTooHigh { z: 2.0 }]);
        c.layout.rx = Vec3::new(55.0, 45.0, 1.0);
        assert!(matches!(validate_scenario(&c)[..], [Violation::IndoorRisRxTooFar { .. }]));
        c.environment = Environment::Outdoor;
        assert!(validate_scenario(&c).is_empty());
    }

    #[test]
    fn outdoor_height_boundary_is_inclusive() {
        let mut c = ScenarioConfig::reference_outdoor();
        c.layout.tx.z = 20.0;
        assert!(validate_scenario(&c).is_empty());
        c.layout.tx.z = 20.5;
        assert_eq!(validate_scenario(&c), vec![Violation::OutdoorTxTooHigh { z: 20.5 }]);
    }

    #[test]
    fn frequency_and_layout_checks() {
        let mut c = ScenarioConfig::reference_indoor();
        c.frequency_ghz = 73.0;
        assert!(validate_scenario(&c).is_empty());
        c.frequency_ghz = 60.0;
        c.layout.ris = c.layout.tx;
        c.realizations = 0;
        let v = validate_scenario(&c);
        assert!(v.contains(&Violation::UnsupportedFrequency { ghz: 60.0 }));
        assert!(v.contains(&Violation::CoincidentNodes { a: Node::Tx, b: Node::Ris }));
        assert!(v.iter().any(|x| matches!(x, Violation::InvalidParameter { field: "realizations", .. })));
    }

    #[test]
    fn auto_mounts_face_the_right_way() {
        let l = NodeLayout::reference();
        let f = l.frames().unwrap();
        let to_ris = (l.ris - l.tx).normalized().unwrap();
        assert!((f.bs.boresight().dot(&to_ris) - 1.0).abs() < 1e-12);
        let b = f.ris_mount.boresight();
        assert!(b.dot(&(l.tx - l.ris)) > 0.0);
        assert!(b.dot(&(l.rx - l.ris)) > 0.0);
        assert_eq!(f.ris(RotationAngles::ZERO), f.ris_mount);
    }
}
