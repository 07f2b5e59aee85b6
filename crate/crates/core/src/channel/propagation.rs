//! LOS probability and log-distance path loss with lognormal shadowing.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::scenario::{EnvironmentConstants, PathLossParams};
use crate::error::{Result, SimError};

fn positive_distance(distance_m: f64) -> Result<()> {
    if distance_m.is_finite() && distance_m > 0.0 {
        Ok(())
    } else {
        Err(SimError::InvalidInput(format!("distance must be positive, got {distance_m}")))
    }
}

/// `p = min(d1/d, 1)·(1 − e^(−d/d2)) + e^(−d/d2)`.
pub fn los_probability(distance_m: f64, env: &EnvironmentConstants) -> Result<f64> {
    positive_distance(distance_m)?;
    let decay = (-distance_m / env.los_d2_m).exp();
    let p = (env.los_d1_m / distance_m).min(1.0) * (1.0 - decay) + decay;
    Ok(p.clamp(0.0, 1.0))
}

/// Distance- and frequency-dependent part of the path loss, without shadowing.
pub fn mean_path_loss_db(distance_m: f64, frequency_ghz: f64, p: &PathLossParams) -> Result<f64> {
    positive_distance(distance_m)?;
    if !(frequency_ghz.is_finite() && frequency_ghz > 0.0) {
        return Err(SimError::InvalidInput(format!("frequency must be positive, got {frequency_ghz}")));
    }
    Ok(p.a_db + 10.0 * p.exponent * distance_m.log10() + 20.0 * frequency_ghz.log10())
}

/// Zero-mean Gaussian shadowing in dB. Always consumes one normal draw, so
/// the generator advances identically whether or not `sigma_db` is zero.
pub fn shadowing_db<R: Rng + ?Sized>(sigma_db: f64, rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sigma_db * z
}

/// Total path loss in dB with one shadowing draw at `p.sigma_db`.
pub fn path_loss_db<R: Rng + ?Sized>(
    distance_m: f64,
    frequency_ghz: f64,
    p: &PathLossParams,
    rng: &mut R,
) -> Result<f64> {
    let mean = mean_path_loss_db(distance_m, frequency_ghz, p)?;
    Ok(mean + shadowing_db(p.sigma_db, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::scenario::PropagationParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn indoor() -> EnvironmentConstants {
        PropagationParams::default().indoor
    }

    #[test]
    fn los_probability_limits() {
        let e = indoor();
        assert!((los_probability(1e-9, &e).unwrap() - 1.0).abs() < 1e-9);
        // d = d1: min(1, 1)·(1 − e) + e = 1
        assert!((los_probability(e.los_d1_m, &e).unwrap() - 1.0).abs() < 1e-15);
        assert!(los_probability(100.0, &e).unwrap() <= 0.05);
        assert!(los_probability(0.0, &e).is_err());
        assert!(los_probability(-1.0, &e).is_err());
    }

    #[test]
    fn los_probability_hand_value() {
        // Indoor defaults d1 = 1.2, d2 = 4.7 at d = 4.7 m:
        // (1.2/4.7)·(1 − e^-1) + e^-1
        let e = indoor();
        let expected = (1.2 / 4.7) * (1.0 - (-1f64).exp()) + (-1f64).exp();
        assert!((los_probability(4.7, &e).unwrap() - expected).abs() < 1e-15);
        // Outdoor defaults at d = 36 m.
        let o = PropagationParams::default().outdoor;
        let expected = 0.5 * (1.0 - (-1f64).exp()) + (-1f64).exp();
        assert!((los_probability(36.0, &o).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn los_probability_monotone() {
        let e = PropagationParams::default().outdoor;
        let mut prev = 1.0;
        for i in 1..2000 {
            let p = los_probability(i as f64 * 0.25, &e).unwrap();
            assert!(p <= prev + 1e-15);
            prev = p;
        }
    }

    #[test]
    fn outdoor_los_hand_value() {
        let p = PropagationParams::default().outdoor.los;
        let expected = 32.4 + 21.0 * 2.0 + 20.0 * 28f64.log10();
        assert!((mean_path_loss_db(100.0, 28.0, &p).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn doubling_distance_adds_fixed_increment() {
        let p = PathLossParams { a_db: 32.4, exponent: 3.19, sigma_db: 0.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [1.0, 7.0, 47.2] {
            let a = path_loss_db(d, 73.0, &p, &mut rng).unwrap();
            let b = path_loss_db(2.0 * d, 73.0, &p, &mut rng).unwrap();
            assert!((b - a - 31.9 * 2f64.log10()).abs() < 1e-10);
        }
    }

    #[test]
    fn shadowing_is_zero_mean() {
        let sigma = 8.2;
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mean = (0..n).map(|_| shadowing_db(sigma, &mut rng)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 3.0 * sigma / (n as f64).sqrt(), "mean {mean}");
    }
}
