//! Log-det achievable rate and its ergodic average.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{draw_realization, realize, validate_scenario, NodeFrames, RealizationDraws, ScenarioConfig};
use crate::error::{Result, SimError};
use crate::geometry::RotationAngles;
use crate::linalg::{all_finite, pairwise_sum, CMatrix};
use crate::ris_control::{align_phases, assemble_end_to_end, PhaseMode, PhaseStrategy};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    /// bits/s/Hz
    pub mean_rate: f64,
    pub std_error: f64,
    pub realizations_used: usize,
}

impl RateResult {
    /// Mean and standard error of the mean. Sums are pairwise, so the
    /// result only depends on the order of `samples`.
    pub fn from_samples(samples: &[f64]) -> Self {
        let m = samples.len();
        if m == 0 {
            return Self { mean_rate: 0.0, std_error: 0.0, realizations_used: 0 };
        }
        let mean = pairwise_sum(samples) / m as f64;
        let std_error = if m > 1 {
            let sq: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
            (pairwise_sum(&sq) / (m - 1) as f64).sqrt() / (m as f64).sqrt()
        } else {
            0.0
        };
        Self { mean_rate: mean.max(0.0), std_error, realizations_used: m }
    }
}

/// Linear SNR scale `Pt/σ²`.
pub fn snr_linear(pt_dbm: f64, noise_dbm: f64) -> f64 {
    10f64.powf((pt_dbm - noise_dbm) / 10.0)
}

pub fn singular_values(c: &CMatrix) -> Result<Vec<f64>> {
    if !all_finite(c) {
        return Err(SimError::InvalidInput("channel matrix has non-finite entries".into()));
    }
    if c.is_empty() {
        return Ok(Vec::new());
    }
    Ok(c.clone().svd(false, false).singular_values.iter().copied().collect())
}

/// `Σ_i log2(1 + ρ·s_i²)`.
pub fn rate_from_singular_values(singular_values: &[f64], rho: f64) -> f64 {
    let terms: Vec<f64> = singular_values.iter().map(|s| (rho * s * s).ln_1p()).collect();
    pairwise_sum(&terms) / std::f64::consts::LN_2
}

/// `log2 det(I + (Pt/σ²)·C·Cᴴ)` in bits/s/Hz, evaluated on the singular
/// values of `C`.
pub fn achievable_rate(c: &CMatrix, pt_dbm: f64, noise_dbm: f64) -> Result<f64> {
    if !pt_dbm.is_finite() || !noise_dbm.is_finite() {
        return Err(SimError::InvalidInput(format!(
            "power levels must be finite, got Pt = {pt_dbm} dBm, noise = {noise_dbm} dBm"
        )));
    }
    Ok(rate_from_singular_values(&singular_values(c)?, snr_linear(pt_dbm, noise_dbm)))
}

/// Direct determinant evaluation of the same rate; kept as an oracle for
/// the singular-value path.
pub fn achievable_rate_via_determinant(c: &CMatrix, rho: f64) -> f64 {
    let n = c.nrows();
    let gram = CMatrix::identity(n, n) + (c * c.adjoint()).scale(rho);
    gram.determinant().re.log2()
}

/// End-to-end channel of one realization at `rotation`, with phases picked
/// by `strategy` under the configured phase mode.
pub fn end_to_end_channel(
    config: &ScenarioConfig,
    frames: &NodeFrames,
    draws: &RealizationDraws,
    rotation: RotationAngles,
    strategy: PhaseStrategy,
) -> Result<CMatrix> {
    let ch = realize(config, frames, draws, rotation)?;
    let mut rng = stream_rng(draws.seed, Stream::Phases);
    let alignment = match config.phase_mode {
        PhaseMode::Reoptimize => align_phases(&ch.h, &ch.g, strategy, &mut rng)?,
        PhaseMode::FrozenAtReference => {
            let reference = realize(config, frames, draws, RotationAngles::ZERO)?;
            align_phases(&reference.h, &reference.g, strategy, &mut rng)?
        }
    };
    if alignment.fell_back {
        log::debug!("realization seed {:#x}: phase alignment fell back to zero phases", draws.seed);
    }
    assemble_end_to_end(&ch.h, &ch.g, &ch.d, &alignment.phases)
}

fn ensure_valid(config: &ScenarioConfig) -> Result<()> {
    let violations = validate_scenario(config);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(SimError::Validation(violations))
    }
}

/// Draws every realization of `config` once.
pub fn draw_all(config: &ScenarioConfig) -> Result<Vec<RealizationDraws>> {
    ensure_valid(config)?;
    (0..config.realizations as u64)
        .into_par_iter()
        .map(|i| draw_realization(config, i))
        .collect()
}

/// Ergodic rate at `config.tx_power_dbm` over `config.realizations` draws.
pub fn ergodic_rate(config: &ScenarioConfig, rotation: RotationAngles, strategy: PhaseStrategy) -> Result<RateResult> {
    let draws = draw_all(config)?;
    let frames = config.layout.frames()?;
    let rates = draws
        .par_iter()
        .map(|d| {
            let c = end_to_end_channel(config, &frames, d, rotation, strategy)?;
            achievable_rate(&c, config.tx_power_dbm, config.noise_dbm)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateResult::from_samples(&rates))
}
