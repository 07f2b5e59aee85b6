//! RIS phase configuration and the end-to-end channel `C = G·Φ·H + D`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::linalg::{CMatrix, CVector};
use crate::rate::achievable_rate;

/// Largest exhaustive phase search, in bits.
pub const BRUTE_FORCE_CAP_BITS: usize = 20;

/// Per-element RIS phases in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig(Vec<f64>);

fn canonical_phase(p: f64) -> f64 {
    let r = p.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl PhaseConfig {
    pub fn new(phases: impl IntoIterator<Item = f64>) -> Result<Self> {
        let v: Vec<f64> = phases.into_iter().collect();
        if let Some(bad) = v.iter().find(|p| !p.is_finite()) {
            return Err(SimError::InvalidInput(format!("phase must be finite, got {bad}")));
        }
        Ok(Self(v.into_iter().map(canonical_phase).collect()))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn phases(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Diagonal of Φ.
    pub fn diagonal(&self) -> CVector {
        CVector::from_iterator(self.0.len(), self.0.iter().map(|p| Complex64::cis(*p)))
    }

    /// Rounds every phase to the nearest point of the `2^bits` grid.
    pub fn quantized(&self, bits: u32) -> Self {
        let levels = 1u64 << bits;
        let step = TAU / levels as f64;
        Self(
            self.0
                .iter()
                .map(|p| ((p / step).round() as u64 % levels) as f64 * step)
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseStrategy {
    /// Phase-align the cascade on the dominant singular pair of `G` and `H`.
    #[default]
    DominantPair,
    Random,
    Zero,
}

/// Whether phases follow the panel as it rotates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMode {
    /// Re-align at every orientation.
    #[default]
    Reoptimize,
    /// Align once on the unrotated panel and keep those phases.
    FrozenAtReference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAlignment {
    pub phases: PhaseConfig,
    /// Set when the strategy could not run (zero `G` or `H`) and zero phases
    /// were returned instead.
    pub fell_back: bool,
}

fn check_cascade(h: &CMatrix, g: &CMatrix) -> Result<()> {
    if g.ncols() != h.nrows() {
        return Err(SimError::DimensionMismatch(format!(
            "G is {}×{} but H is {}×{}",
            g.nrows(),
            g.ncols(),
            h.nrows(),
            h.ncols()
        )));
    }
    Ok(())
}

/// `C = G·diag(e^{jφ})·H + D`.
pub fn assemble_end_to_end(h: &CMatrix, g: &CMatrix, d: &CMatrix, phases: &PhaseConfig) -> Result<CMatrix> {
    check_cascade(h, g)?;
    if phases.len() != h.nrows() {
        return Err(SimError::DimensionMismatch(format!(
            "{} phases for {} RIS elements",
            phases.len(),
            h.nrows()
        )));
    }
    if d.shape() != (g.nrows(), h.ncols()) {
        return Err(SimError::DimensionMismatch(format!(
            "D is {:?}, expected {:?}",
            d.shape(),
            (g.nrows(), h.ncols())
        )));
    }
    let mut scaled = h.clone();
    for (n, e) in phases.diagonal().iter().enumerate() {
        for x in scaled.row_mut(n).iter_mut() {
            *x *= *e;
        }
    }
    let mut c = g * scaled;
    c += d;
    Ok(c)
}

/// Column of the largest singular value, left (`U`) or right (`V`).
fn dominant_singular_vector(m: &CMatrix, left: bool) -> Option<CVector> {
    let svd = m.clone().svd(left, !left);
    let (k, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, s)| if *s > best.1 { (i, *s) } else { best });
    if s.is_nan() || s <= 0.0 {
        return None;
    }
    if left {
        svd.u.map(|u| u.column(k).into_owned())
    } else {
        // V = (Vᴴ)ᴴ, so column k of V is the conjugated row k of Vᴴ.
        svd.v_t.map(|vt| vt.row(k).adjoint())
    }
}

/// Chooses RIS phases for the cascade `G·Φ·H`.
///
/// `DominantPair` takes `u`, the dominant left singular vector of `G`, and
/// `v`, the dominant right singular vector of `H`, and sets
/// `φ_n = −arg((uᴴG)_n · (Hv)_n)` so every element adds coherently to
/// `uᴴ·C·v`. `rng` is only read by `Random`.
pub fn align_phases<R: Rng + ?Sized>(
    h: &CMatrix,
    g: &CMatrix,
    strategy: PhaseStrategy,
    rng: &mut R,
) -> Result<PhaseAlignment> {
    check_cascade(h, g)?;
    let n = h.nrows();
    let phases = match strategy {
        PhaseStrategy::Zero => PhaseConfig::zeros(n),
        PhaseStrategy::Random => PhaseConfig::new((0..n).map(|_| rng.random::<f64>() * TAU))?,
        PhaseStrategy::DominantPair => {
            let pair = dominant_singular_vector(g, true).zip(dominant_singular_vector(h, false));
            let Some((u, v)) = pair else {
                return Ok(PhaseAlignment {
                    phases: PhaseConfig::zeros(n),
                    fell_back: true,
                });
            };
            let ug = g.ad_mul(&u); // Gᴴu = conj(uᴴG)
            let hv = h * v;
            PhaseConfig::new(ug.iter().zip(hv.iter()).map(|(a, b)| -(a.conj() * b).arg()))?
        }
    };
    Ok(PhaseAlignment {
        phases,
        fell_back: false,
    })
}

/// Exhaustive search over the `2^bits`-level phase grid for the
/// configuration with the highest achievable rate. Ties go to the
/// lexicographically smallest phase tuple.
pub fn brute_force_phases(
    h: &CMatrix,
    g: &CMatrix,
    d: &CMatrix,
    bits: u32,
    pt_dbm: f64,
    noise_dbm: f64,
) -> Result<(PhaseConfig, f64)> {
    check_cascade(h, g)?;
    if bits == 0 {
        return Err(SimError::InvalidInput("phase grid needs at least 1 bit".into()));
    }
    let n = h.nrows();
    let total_bits = n.saturating_mul(bits as usize);
    if total_bits > BRUTE_FORCE_CAP_BITS {
        return Err(SimError::SearchSpaceTooLarge {
            bits: total_bits,
            cap: BRUTE_FORCE_CAP_BITS,
        });
    }
    let levels = 1u64 << bits;
    let step = TAU / levels as f64;
    // Element 0 is the most significant digit, so index order is
    // lexicographic order of the phase tuple.
    let config_for = move |index: u64| -> PhaseConfig {
        let mut digits = vec![0.0; n];
        let mut rest = index;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % levels) as f64 * step;
            rest /= levels;
        }
        PhaseConfig(digits)
    };
    let (best_index, best_rate) = (0..1u64 << total_bits)
        .into_par_iter()
        .map(|i| {
            let c = assemble_end_to_end(h, g, d, &config_for(i))?;
            Ok((i, achievable_rate(&c, pt_dbm, noise_dbm)?))
        })
        .try_reduce(
            || (u64::MAX, f64::NEG_INFINITY),
            |a, b| {
                Ok(if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a })
            },
        )?;
    Ok((config_for(best_index), best_rate))
}
