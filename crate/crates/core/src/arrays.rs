//! Array layouts, steering vectors and element gain.
//!
//! Elements sit in the local y–z plane with boresight along local +x. A ULA
//! runs along local y. UPA element `n = row·nx + col` sits at
//! `(0, col·d, row·d)` wavelengths, so element 0 is the phase reference.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::Vec3;
use crate::linalg::CVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrayKind {
    Ula,
    Upa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArraySpec", into = "RawArraySpec")]
pub struct ArraySpec {
    kind: ArrayKind,
    nx: usize,
    ny: usize,
    spacing_wavelengths: f64,
    pattern_exponent: f64,
    front_only: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArraySpec {
    kind: ArrayKind,
    nx: usize,
    #[serde(default = "one")]
    ny: usize,
    #[serde(default = "half")]
    spacing_wavelengths: f64,
    #[serde(default)]
    pattern_exponent: f64,
    /// Zero gain behind the panel.
    #[serde(default = "yes")]
    front_only: bool,
}

fn one() -> usize {
    1
}
fn half() -> f64 {
    0.5
}
fn yes() -> bool {
    true
}

impl TryFrom<RawArraySpec> for ArraySpec {
    type Error = SimError;
    fn try_from(r: RawArraySpec) -> Result<Self> {
        ArraySpec::new(r.kind, r.nx, r.ny, r.spacing_wavelengths, r.pattern_exponent)
            .map(|s| s.with_front_only(r.front_only))
    }
}

impl From<ArraySpec> for RawArraySpec {
    fn from(s: ArraySpec) -> Self {
        RawArraySpec {
            kind: s.kind,
            nx: s.nx,
            ny: s.ny,
            spacing_wavelengths: s.spacing_wavelengths,
            pattern_exponent: s.pattern_exponent,
            front_only: s.front_only,
        }
    }
}

impl ArraySpec {
    /// A ULA always has `ny = 1`; whatever is passed for `ny` is ignored.
    pub fn new(
        kind: ArrayKind,
        nx: usize,
        ny: usize,
        spacing_wavelengths: f64,
        pattern_exponent: f64,
    ) -> Result<Self> {
        let ny = match kind {
            ArrayKind::Ula => 1,
            ArrayKind::Upa => ny,
        };
        if nx == 0 || ny == 0 {
            return Err(SimError::InvalidInput(format!(
                "array needs at least one element, got {nx}×{ny}"
            )));
        }
        if !(spacing_wavelengths.is_finite() && spacing_wavelengths > 0.0) {
            return Err(SimError::InvalidInput(format!(
                "element spacing must be positive, got {spacing_wavelengths}"
            )));
        }
        if !(pattern_exponent.is_finite() && pattern_exponent >= 0.0) {
            return Err(SimError::InvalidInput(format!(
                "pattern exponent must be >= 0, got {pattern_exponent}"
            )));
        }
        Ok(Self {
            kind,
            nx,
            ny,
            spacing_wavelengths,
            pattern_exponent,
            front_only: true,
        })
    }

    /// Half-wavelength ULA with an isotropic front hemisphere.
    pub fn ula(n: usize) -> Result<Self> {
        Self::new(ArrayKind::Ula, n, 1, 0.5, 0.0)
    }

    /// Half-wavelength UPA with an isotropic front hemisphere.
    pub fn upa(nx: usize, ny: usize) -> Result<Self> {
        Self::new(ArrayKind::Upa, nx, ny, 0.5, 0.0)
    }

    pub fn with_pattern_exponent(mut self, q: f64) -> Result<Self> {
        if !(q.is_finite() && q >= 0.0) {
            return Err(SimError::InvalidInput(format!("pattern exponent must be >= 0, got {q}")));
        }
        self.pattern_exponent = q;
        Ok(self)
    }

    /// `false` drops the back-lobe cutoff (test mode): the gain becomes
    /// `|cos α|^q` over the whole sphere.
    pub fn with_front_only(mut self, front_only: bool) -> Self {
        self.front_only = front_only;
        self
    }

    pub fn kind(&self) -> ArrayKind {
        self.kind
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn spacing_wavelengths(&self) -> f64 {
        self.spacing_wavelengths
    }
    pub fn pattern_exponent(&self) -> f64 {
        self.pattern_exponent
    }
    pub fn front_only(&self) -> bool {
        self.front_only
    }

    /// Amplitude gain of one element toward a direction `angle` radians
    /// off boresight.
    pub fn gain(&self, off_boresight_rad: f64) -> f64 {
        if self.front_only {
            element_gain(off_boresight_rad, self.pattern_exponent)
        } else {
            off_boresight_rad.cos().abs().powf(self.pattern_exponent)
        }
    }
}

/// Element positions in wavelengths, local frame.
pub fn element_positions(spec: &ArraySpec) -> Vec<Vec3> {
    let d = spec.spacing_wavelengths;
    (0..spec.ny)
        .flat_map(|row| (0..spec.nx).map(move |col| Vec3::new(0.0, col as f64 * d, row as f64 * d)))
        .collect()
}

/// Local unit vector for spherical angles.
pub fn unit_from_angles(azimuth_rad: f64, elevation_rad: f64) -> Vec3 {
    let (se, ce) = elevation_rad.sin_cos();
    let (sa, ca) = azimuth_rad.sin_cos();
    Vec3::new(ce * ca, ce * sa, se)
}

pub fn steering_vector(spec: &ArraySpec, azimuth_rad: f64, elevation_rad: f64) -> CVector {
    steering_vector_unit(spec, unit_from_angles(azimuth_rad, elevation_rad))
}

/// Entry `n` is `exp(j·2π·p_n·u)` for a local unit direction `u`.
pub fn steering_vector_unit(spec: &ArraySpec, u: Vec3) -> CVector {
    let d = spec.spacing_wavelengths;
    let step_y = TAU * d * u.y;
    let step_z = TAU * d * u.z;
    CVector::from_iterator(
        spec.len(),
        (0..spec.ny).flat_map(|row| {
            (0..spec.nx).map(move |col| Complex64::cis(col as f64 * step_y + row as f64 * step_z))
        }),
    )
}

/// `cos(angle)^q` in the front hemisphere, zero from π/2 onward.
pub fn element_gain(off_boresight_rad: f64, q: f64) -> f64 {
    let a = off_boresight_rad.abs();
    if a >= FRAC_PI_2 {
        0.0
    } else {
        a.cos().powf(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn layouts() {
        assert_eq!(element_positions(&ArraySpec::ula(1).unwrap()), vec![Vec3::new(0.0, 0.0, 0.0)]);
        assert_eq!(
            element_positions(&ArraySpec::ula(2).unwrap()),
            vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 0.5, 0.0)]
        );
        assert_eq!(
            element_positions(&ArraySpec::upa(2, 2).unwrap()),
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(0.0, 0.5, 0.0),
                Vec3::new(0.0, 0.0, 0.5),
                Vec3::new(0.0, 0.5, 0.5),
            ]
        );
    }

    #[test]
    fn ula_ignores_ny() {
        let s = ArraySpec::new(ArrayKind::Ula, 4, 7, 0.5, 0.0).unwrap();
        assert_eq!((s.nx(), s.ny(), s.len()), (4, 1, 4));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(ArraySpec::upa(0, 3).is_err());
        assert!(ArraySpec::new(ArrayKind::Upa, 2, 2, 0.0, 0.0).is_err());
        assert!(ArraySpec::new(ArrayKind::Upa, 2, 2, 0.5, -1.0).is_err());
    }

    #[test]
    fn boresight_gives_all_ones() {
        let s = ArraySpec::upa(4, 3).unwrap();
        let a = steering_vector(&s, 0.0, 0.0);
        assert!(a.iter().all(|z| *z == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn half_wave_ula_endfire() {
        let a = steering_vector(&ArraySpec::ula(2).unwrap(), FRAC_PI_2, 0.0);
        assert_abs_diff_eq!(a[0].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a[1].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a[1].im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn upa_matches_per_element_oracle() {
        let s = ArraySpec::upa(2, 2).unwrap();
        let (az, el) = (45f64.to_radians(), 30f64.to_radians());
        let a = steering_vector(&s, az, el);
        let u = [el.cos() * az.cos(), el.cos() * az.sin(), el.sin()];
        let pos = [[0.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5], [0.0, 0.5, 0.5]];
        for (n, p) in pos.iter().enumerate() {
            let phase = TAU * (p[0] * u[0] + p[1] * u[1] + p[2] * u[2]);
            assert_abs_diff_eq!(a[n].re, phase.cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(a[n].im, phase.sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn gain_values() {
        assert_eq!(element_gain(0.0, 3.0), 1.0);
        assert_eq!(element_gain(0.0, 0.0), 1.0);
        assert_eq!(element_gain(FRAC_PI_2, 0.0), 0.0);
        assert_eq!(element_gain(2.0, 1.0), 0.0);
        assert_abs_diff_eq!(element_gain(60f64.to_radians(), 2.0), 0.25, epsilon = 1e-12);
        let iso = ArraySpec::upa(2, 2).unwrap().with_front_only(false);
        assert_eq!(iso.gain(3.0), 1.0);
    }

    proptest! {
        #[test]
        fn steering_norm_is_sqrt_n(nx in 1usize..9, ny in 1usize..9, d in 0.1..2.0f64,
                                   az in -7.0..7.0f64, el in -1.6..1.6f64) {
            let s = ArraySpec::new(ArrayKind::Upa, nx, ny, d, 0.0).unwrap();
            let a = steering_vector(&s, az, el);
            prop_assert!(a.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
            prop_assert!((a.norm() - (s.len() as f64).sqrt()).abs() < 1e-10);
        }

        #[test]
        fn negated_direction_conjugates(nx in 1usize..6, ny in 1usize..6, az in -3.2..3.2f64, el in -1.5..1.5f64) {
            let s = ArraySpec::upa(nx, ny).unwrap();
            let u = unit_from_angles(az, el);
            let a = steering_vector_unit(&s, u);
            let b = steering_vector_unit(&s, u * -1.0);
            for (x, y) in a.iter().zip(b.iter()) {
                prop_assert!((x.conj() - y).norm() < 1e-10);
            }
        }

        #[test]
        fn gain_monotone(a in 0.0..std::f64::consts::PI, b in 0.0..std::f64::consts::PI, q in 0.0..4.0f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(element_gain(lo, q) >= element_gain(hi, q));
        }
    }
}
