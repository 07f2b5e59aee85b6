//! Stochastic clustered multipath for one link.
//!
//! Cluster centers are drawn uniformly in a window around the LOS departure
//! and arrival directions; subrays scatter around their center with
//! Laplacian azimuth/elevation offsets. Directions are stored in global
//! coordinates so a draw can be reused for any panel orientation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::scenario::ClusterParams;
use crate::arrays::unit_from_angles;
use crate::error::{Result, SimError};
use crate::geometry::Vec3;

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub gain: Complex64,
    /// Global unit vector leaving the transmitter.
    pub departure: Vec3,
    /// Global unit vector from the receiver toward where the wave arrives from.
    pub arrival: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    pub paths: Vec<Path>,
    /// Number of NLOS clusters drawn.
    pub cluster_count: usize,
    pub has_los: bool,
}

impl ClusterSet {
    pub fn total_power(&self) -> f64 {
        self.paths.iter().map(|p| p.gain.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub tx: Vec3,
    pub rx: Vec3,
}

impl LinkGeometry {
    pub fn new(tx: Vec3, rx: Vec3) -> Result<Self> {
        if tx.distance(&rx) > 0.0 {
            Ok(Self { tx, rx })
        } else {
            Err(SimError::DegenerateGeometry(format!("link endpoints {tx} and {rx} coincide")))
        }
    }

    pub fn distance(&self) -> f64 {
        self.tx.distance(&self.rx)
    }

    pub fn departure(&self) -> Vec3 {
        (self.rx - self.tx).normalized().expect("non-degenerate link")
    }

    pub fn arrival(&self) -> Vec3 {
        (self.tx - self.rx).normalized().expect("non-degenerate link")
    }
}

/// LOS component settings for one draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosSpec {
    pub probability: f64,
    pub ricean_k_db: f64,
    pub wavelength_m: f64,
}

fn spherical(u: Vec3) -> (f64, f64) {
    (u.y.atan2(u.x), u.z.clamp(-1.0, 1.0).asin())
}

fn offset(u: Vec3, d_az: f64, d_el: f64) -> Vec3 {
    let (az, el) = spherical(u);
    unit_from_angles(az + d_az, el + d_el)
}

/// Laplacian sample with standard deviation `std`.
fn laplacian<R: Rng + ?Sized>(std: f64, rng: &mut R) -> f64 {
    let b = std / std::f64::consts::SQRT_2;
    let u: f64 = rng.random::<f64>() - 0.5;
    -b * u.signum() * (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln()
}

fn symmetric_uniform<R: Rng + ?Sized>(half_width: f64, rng: &mut R) -> f64 {
    (2.0 * rng.random::<f64>() - 1.0) * half_width
}

fn complex_normal<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

/// Draws the multipath of one link. Total mean path power is 1.
///
/// Draw order: LOS Bernoulli, cluster count, then per cluster its center
/// offsets followed by per-subray offsets and gains.
pub fn generate_clusters<R: Rng + ?Sized>(
    rng: &mut R,
    link: &LinkGeometry,
    params: &ClusterParams,
    los: &LosSpec,
) -> ClusterSet {
    let has_los = rng.random::<f64>() < los.probability;
    let los_phase = Complex64::cis(-TAU * (link.distance() / los.wavelength_m).fract());

    if !params.multipath {
        return ClusterSet {
            paths: vec![Path {
                gain: los_phase,
                departure: link.departure(),
                arrival: link.arrival(),
            }],
            cluster_count: 0,
            has_los,
        };
    }

    let clusters = Poisson::new(params.mean_cluster_count)
        .map(|p| p.sample(rng) as usize)
        .unwrap_or(0)
        .max(1);
    let subrays = params.subrays_per_cluster;
    let k = 10f64.powf(los.ricean_k_db / 10.0);
    let nlos_power = if has_los { 1.0 / (k + 1.0) } else { 1.0 };
    let per_path = nlos_power / (clusters * subrays) as f64;

    let spread = params.angular_spread_deg.to_radians();
    let win_az = params.center_spread_azimuth_deg.to_radians();
    let win_el = params.center_spread_elevation_deg.to_radians();
    let (dep0, arr0) = (link.departure(), link.arrival());

    let mut paths = Vec::with_capacity(clusters * subrays + usize::from(has_los));
    if has_los {
        paths.push(Path {
            gain: los_phase * (k / (k + 1.0)).sqrt(),
            departure: dep0,
            arrival: arr0,
        });
    }
    for _ in 0..clusters {
        let dep_c = offset(dep0, symmetric_uniform(win_az, rng), symmetric_uniform(win_el, rng));
        let arr_c = offset(arr0, symmetric_uniform(win_az, rng), symmetric_uniform(win_el, rng));
        for _ in 0..subrays {
            let departure = offset(dep_c, laplacian(spread, rng), laplacian(spread, rng));
            let arrival = offset(arr_c, laplacian(spread, rng), laplacian(spread, rng));
            paths.push(Path {
                gain: complex_normal(per_path, rng),
                departure,
                arrival,
            });
        }
    }
    ClusterSet {
        paths,
        cluster_count: clusters,
        has_los,
    }
}
