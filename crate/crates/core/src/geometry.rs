//! Node positions, panel rotations and local-frame directions.
//!
//! Frames map local coordinates to global ones: a direction `u` given in
//! global coordinates reads `Rᵀ·u` in the frame `R`. Angles enter in
//! degrees and are converted to radians once, inside [`rot_z`], [`rot_x`]
//! and [`compose_rotation`].

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// A point or direction in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Vec3) -> f64 {
        (*other - *self).norm()
    }

    /// Unit vector, or `None` for a zero vector.
    pub fn normalized(&self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| *self * (1.0 / n))
    }

    pub fn to_na(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_na(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Panel orientation: azimuth about global z, elevation about global x.
///
/// Both angles are stored canonicalized into `[0, 360)` degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAngles", into = "RawAngles")]
pub struct RotationAngles {
    azimuth_deg: f64,
    elevation_deg: f64,
}

#[derive(Serialize, Deserialize)]
struct RawAngles {
    azimuth_deg: f64,
    elevation_deg: f64,
}

impl TryFrom<RawAngles> for RotationAngles {
    type Error = SimError;
    fn try_from(r: RawAngles) -> Result<Self> {
        RotationAngles::new(r.azimuth_deg, r.elevation_deg)
    }
}

impl From<RotationAngles> for RawAngles {
    fn from(a: RotationAngles) -> Self {
        RawAngles {
            azimuth_deg: a.azimuth_deg,
            elevation_deg: a.elevation_deg,
        }
    }
}

/// Maps any finite angle into `[0, 360)`.
pub fn canonical_degrees(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    // rem_euclid rounds tiny negative inputs up to exactly 360.0
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

impl RotationAngles {
    pub const ZERO: RotationAngles = RotationAngles {
        azimuth_deg: 0.0,
        elevation_deg: 0.0,
    };

    pub fn new(azimuth_deg: f64, elevation_deg: f64) -> Result<Self> {
        if !azimuth_deg.is_finite() || !elevation_deg.is_finite() {
            return Err(SimError::InvalidInput(format!(
                "rotation angles must be finite, got ({azimuth_deg}, {elevation_deg})"
            )));
        }
        Ok(Self {
            azimuth_deg: canonical_degrees(azimuth_deg),
            elevation_deg: canonical_degrees(elevation_deg),
        })
    }

    pub fn azimuth_deg(&self) -> f64 {
        self.azimuth_deg
    }

    pub fn elevation_deg(&self) -> f64 {
        self.elevation_deg
    }

    /// Euclidean size of the `(φ, θ)` pair in degrees, used as the
    /// deviation-from-initial-alignment measure.
    pub fn deviation_deg(&self) -> f64 {
        self.azimuth_deg.hypot(self.elevation_deg)
    }
}

impl fmt::Display for RotationAngles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(φ={}°, θ={}°)", self.azimuth_deg, self.elevation_deg)
    }
}

/// A proper rotation (orthonormal, determinant +1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

/// The order in which [`compose_rotation`] applies the two rotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationOrder {
    /// `R = R_x(θ)·R_z(φ)`: azimuth first, then elevation.
    AzimuthThenElevation,
}

pub const ROTATION_ORDER: RotationOrder = RotationOrder::AzimuthThenElevation;

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        Vec3::from_na(self.0 * v.to_na())
    }

    /// Expresses a global vector in this frame's local coordinates.
    pub fn to_local(&self, v: Vec3) -> Vec3 {
        Vec3::from_na(self.0.tr_mul(&v.to_na()))
    }

    pub fn compose(&self, rhs: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }

    /// Largest entry of `|RᵀR − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).amax()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Local +x axis in global coordinates.
    pub fn boresight(&self) -> Vec3 {
        Vec3::from_na(self.0.column(0).into_owned())
    }
}

fn finite_angle(deg: f64) -> Result<f64> {
    if deg.is_finite() {
        Ok(deg.to_radians())
    } else {
        Err(SimError::InvalidInput(format!("angle must be finite, got {deg}")))
    }
}

/// Rotation about the z-axis by `phi_deg`.
pub fn rot_z(phi_deg: f64) -> Result<RotationMatrix> {
    let (s, c) = finite_angle(phi_deg)?.sin_cos();
    #[rustfmt::skip]
    let m = Matrix3::new(
        c,  -s,  0.0,
        s,   c,  0.0,
        0.0, 0.0, 1.0,
    );
    Ok(RotationMatrix(m))
}

/// Rotation about the x-axis by `theta_deg`.
pub fn rot_x(theta_deg: f64) -> Result<RotationMatrix> {
    let (s, c) = finite_angle(theta_deg)?.sin_cos();
    #[rustfmt::skip]
    let m = Matrix3::new(
        1.0, 0.0, 0.0,
        0.0, c,  -s,
        0.0, s,   c,
    );
    Ok(RotationMatrix(m))
}

/// Panel frame for an azimuth/elevation pair, `R_x(θ)·R_z(φ)`.
pub fn compose_rotation(angles: RotationAngles) -> RotationMatrix {
    match ROTATION_ORDER {
        RotationOrder::AzimuthThenElevation => {
            // Canonical angles are always finite.
            let rz = rot_z(angles.azimuth_deg).expect("finite azimuth");
            let rx = rot_x(angles.elevation_deg).expect("finite elevation");
            rx.compose(&rz)
        }
    }
}

/// Angles that turn local +x onto the unit vector `target` through
/// [`compose_rotation`]. `target` must be non-zero.
pub fn angles_facing(target: Vec3) -> Result<RotationAngles> {
    let u = target
        .normalized()
        .ok_or_else(|| SimError::DegenerateGeometry("cannot face a zero vector".into()))?;
    // R·x̂ = (cos φ, sin φ cos θ, sin φ sin θ)
    let phi = u.x.clamp(-1.0, 1.0).acos();
    let theta = if u.y == 0.0 && u.z == 0.0 {
        0.0
    } else {
        u.z.atan2(u.y)
    };
    RotationAngles::new(phi.to_degrees(), theta.to_degrees())
}

/// A direction seen from a node, in that node's local frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDirection {
    pub azimuth_rad: f64,
    pub elevation_rad: f64,
    pub distance_m: f64,
    /// Local unit vector.
    pub unit: Vec3,
}

impl LocalDirection {
    /// Angle between the direction and local +x.
    pub fn off_boresight_rad(&self) -> f64 {
        self.unit.x.clamp(-1.0, 1.0).acos()
    }
}

/// Local spherical angles of a global unit direction.
///
/// At the poles (elevation ±π/2) azimuth is reported as 0.
pub fn direction_in_frame(unit_global: Vec3, frame: &RotationMatrix) -> LocalDirection {
    let u = frame.to_local(unit_global);
    let horizontal = u.x.hypot(u.y);
    let azimuth_rad = if horizontal < 1e-12 { 0.0 } else { u.y.atan2(u.x) };
    LocalDirection {
        azimuth_rad,
        elevation_rad: u.z.clamp(-1.0, 1.0).asin(),
        distance_m: 1.0,
        unit: u,
    }
}

/// Direction from `from` to `to` in `frame`'s local coordinates.
pub fn local_direction(from: Vec3, to: Vec3, frame: &RotationMatrix) -> Result<LocalDirection> {
    let delta = to - from;
    let distance_m = delta.norm();
    let unit = delta.normalized().ok_or_else(|| {
        SimError::DegenerateGeometry(format!("points {from} and {to} coincide"))
    })?;
    Ok(LocalDirection {
        distance_m,
        ..direction_in_frame(unit, frame)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn assert_mat_eq(a: &Matrix3<f64>, b: &Matrix3<f64>, tol: f64) {
        for (x, y) in a.iter().zip(b.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = tol);
        }
    }

    #[test]
    fn zero_angles_give_identity() {
        assert_eq!(rot_z(0.0).unwrap(), RotationMatrix::identity());
        assert_eq!(rot_x(0.0).unwrap(), RotationMatrix::identity());
        assert_eq!(compose_rotation(RotationAngles::ZERO), RotationMatrix::identity());
    }

    #[test]
    fn quarter_turns_map_axes() {
        let v = rot_z(90.0).unwrap().apply(Vec3::new(1.0, 0.0, 0.0));
        assert_abs_diff_eq!(v.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.y, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.z, 0.0, epsilon = 1e-12);
        let v = rot_x(90.0).unwrap().apply(Vec3::new(0.0, 1.0, 0.0));
        assert_abs_diff_eq!(v.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.z, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rot_z_30_matches_scalar_trig() {
        // cos 30° = √3/2, sin 30° = 1/2
        let c = 3f64.sqrt() / 2.0;
        let s = 0.5;
        let expected = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        assert_mat_eq(rot_z(30.0).unwrap().matrix(), &expected, 1e-15);
    }

    #[test]
    fn rot_x_45_matches_scalar_trig() {
        let h = 0.5f64.sqrt();
        let expected = Matrix3::new(1.0, 0.0, 0.0, 0.0, h, -h, 0.0, h, h);
        assert_mat_eq(rot_x(45.0).unwrap().matrix(), &expected, 1e-15);
    }

    #[test]
    fn composition_matches_hand_product() {
        // Explicit triple-loop product of R_x(45°)·R_z(30°).
        let (c3, s3) = (3f64.sqrt() / 2.0, 0.5);
        let h = 0.5f64.sqrt();
        let rz = [[c3, -s3, 0.0], [s3, c3, 0.0], [0.0, 0.0, 1.0]];
        let rx = [[1.0, 0.0, 0.0], [0.0, h, -h], [0.0, h, h]];
        let mut p = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    p[i][j] += rx[i][k] * rz[k][j];
                }
            }
        }
        let expected = Matrix3::from_fn(|i, j| p[i][j]);
        let r = compose_rotation(RotationAngles::new(30.0, 45.0).unwrap());
        assert_mat_eq(r.matrix(), &expected, 1e-15);
    }

    #[test]
    fn composition_reduces_to_single_axis() {
        let a = RotationAngles::new(90.0, 0.0).unwrap();
        assert_eq!(compose_rotation(a), rot_z(90.0).unwrap());
        let a = RotationAngles::new(0.0, 37.0).unwrap();
        assert_eq!(compose_rotation(a), rot_x(37.0).unwrap());
    }

    #[test]
    fn non_finite_angles_rejected() {
        assert!(matches!(rot_z(f64::NAN), Err(SimError::InvalidInput(_))));
        assert!(matches!(rot_x(f64::INFINITY), Err(SimError::InvalidInput(_))));
        assert!(RotationAngles::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn angles_are_canonicalized() {
        let a = RotationAngles::new(-90.0, 720.0).unwrap();
        assert_eq!(a.azimuth_deg(), 270.0);
        assert_eq!(a.elevation_deg(), 0.0);
        let a = RotationAngles::new(360.0, 360.0).unwrap();
        assert_eq!(a, RotationAngles::ZERO);
        assert_eq!(canonical_degrees(-1e-20), 0.0);
    }

    #[test]
    fn local_direction_identity_frame() {
        let id = RotationMatrix::identity();
        let d = local_direction(Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), &id).unwrap();
        assert_eq!((d.azimuth_rad, d.elevation_rad, d.distance_m), (0.0, 0.0, 1.0));

        let d = local_direction(Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 5.0), &id).unwrap();
        assert_eq!(d.azimuth_rad, 0.0);
        assert_abs_diff_eq!(d.elevation_rad, FRAC_PI_2, epsilon = 1e-15);
        assert_eq!(d.distance_m, 5.0);
    }

    #[test]
    fn local_direction_in_rotated_frame() {
        // Frame rotated 90° about z: its local +x is global +y, so a target
        // along global +y sits at local azimuth 0.
        let frame = rot_z(90.0).unwrap();
        let d = local_direction(Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 3.0, 0.0), &frame).unwrap();
        assert_abs_diff_eq!(d.azimuth_rad, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.elevation_rad, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.distance_m, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        assert!(matches!(
            local_direction(p, p, &RotationMatrix::identity()),
            Err(SimError::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn facing_angles_turn_boresight_onto_target() {
        for t in [
            Vec3::new(-0.3, -2.0, 0.4),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(0.0, 0.0, -1.0),
        ] {
            let b = compose_rotation(angles_facing(t).unwrap()).boresight();
            let u = t.normalized().unwrap();
            assert_abs_diff_eq!(b.x, u.x, epsilon = 1e-12);
            assert_abs_diff_eq!(b.y, u.y, epsilon = 1e-12);
            assert_abs_diff_eq!(b.z, u.z, epsilon = 1e-12);
        }
    }

    fn vec3() -> impl Strategy<Value = Vec3> {
        (-100.0..100.0f64, -100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn composed_rotation_is_proper(phi in -720.0..720.0f64, theta in -720.0..720.0f64) {
            let r = compose_rotation(RotationAngles::new(phi, theta).unwrap());
            prop_assert!(r.orthonormality_error() < 1e-12);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn rotation_preserves_length_and_inverts(phi in 0.0..360.0f64, theta in 0.0..360.0f64, v in vec3()) {
            let r = compose_rotation(RotationAngles::new(phi, theta).unwrap());
            let w = r.apply(v);
            prop_assert!((w.norm() - v.norm()).abs() < 1e-12 * v.norm().max(1.0));
            let back = r.transpose().apply(w);
            prop_assert!((back - v).norm() < 1e-12 * v.norm().max(1.0));
        }

        #[test]
        fn distance_is_symmetric(a in vec3(), b in vec3()) {
            prop_assume!(a.distance(&b) > 1e-9);
            let id = RotationMatrix::identity();
            let d1 = local_direction(a, b, &id).unwrap().distance_m;
            let d2 = local_direction(b, a, &id).unwrap().distance_m;
            prop_assert_eq!(d1, d2);
        }
    }
}
