//! Link matrices and per-realization channel synthesis.

use num_complex::Complex64;

use super::clusters::{generate_clusters, ClusterSet, LinkGeometry, LosSpec};
use super::propagation::{los_probability, mean_path_loss_db, shadowing_db};
use super::scenario::{validate_scenario, LosMode, NodeFrames, ScenarioConfig};
use crate::arrays::{steering_vector_unit, ArraySpec};
use crate::error::{Result, SimError};
use crate::geometry::{direction_in_frame, RotationAngles, RotationMatrix};
use crate::linalg::{all_finite, zeros, CMatrix};
use crate::rng::{realization_seed, stream_rng, Stream};

/// Builds the `rx × tx` matrix of one link:
/// `10^(−PL/20) · Σ_p g_p · e_rx · e_tx · a_rx(arrival) · a_tx(departure)ᴴ`,
/// with each path direction expressed in its node's frame.
pub fn assemble_link(
    clusters: &ClusterSet,
    tx_spec: &ArraySpec,
    rx_spec: &ArraySpec,
    tx_frame: &RotationMatrix,
    rx_frame: &RotationMatrix,
    path_loss_db: f64,
) -> Result<CMatrix> {
    if !path_loss_db.is_finite() {
        return Err(SimError::InvalidInput(format!("path loss must be finite, got {path_loss_db}")));
    }
    let amplitude = 10f64.powf(-path_loss_db / 20.0);
    let mut m = zeros(rx_spec.len(), tx_spec.len());
    for path in &clusters.paths {
        let dep = direction_in_frame(path.departure, tx_frame);
        let arr = direction_in_frame(path.arrival, rx_frame);
        let weight = tx_spec.gain(dep.off_boresight_rad()) * rx_spec.gain(arr.off_boresight_rad());
        if weight == 0.0 {
            continue;
        }
        let a_rx = steering_vector_unit(rx_spec, arr.unit);
        let a_tx = steering_vector_unit(tx_spec, dep.unit);
        let coeff = path.gain * (amplitude * weight);
        // m += coeff · a_rx · a_txᴴ
        m.gerc(coeff, &a_rx, &a_tx, Complex64::new(1.0, 0.0));
    }
    if !all_finite(&m) {
        return Err(SimError::InvalidInput("link matrix has non-finite entries".into()));
    }
    Ok(m)
}

/// Rotation-independent random draws of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkDraw {
    pub clusters: ClusterSet,
    pub path_loss_db: f64,
}

/// Everything random about one realization. Panel orientation does not
/// enter, so every rotation of the same index sees the same draws.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationDraws {
    pub seed: u64,
    pub bs_ris: LinkDraw,
    pub ris_user: LinkDraw,
    /// `None` when the direct link is blocked.
    pub direct: Option<LinkDraw>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// BS→RIS, `N × Nt`.
    pub h: CMatrix,
    /// RIS→user, `Nr × N`.
    pub g: CMatrix,
    /// BS→user, `Nr × Nt`; all zeros when the direct link is blocked.
    pub d: CMatrix,
    pub seed_used: u64,
}

fn draw_link(
    config: &ScenarioConfig,
    link: LinkGeometry,
    stream: Stream,
    seed: u64,
) -> Result<LinkDraw> {
    let env = config.propagation.environment(config.environment);
    let probability = match config.propagation.los_mode {
        LosMode::Stochastic => los_probability(link.distance(), env)?,
        LosMode::Always => 1.0,
        LosMode::Never => 0.0,
    };
    let los = LosSpec {
        probability,
        ricean_k_db: env.ricean_k_db,
        wavelength_m: config.wavelength_m(),
    };
    let mut rng = stream_rng(seed, stream);
    let clusters = generate_clusters(&mut rng, &link, &config.clusters, &los);
    let pl = if clusters.has_los { &env.los } else { &env.nlos };
    let sigma = config.clusters.shadow_fading_sigma_db.unwrap_or(pl.sigma_db);
    let path_loss_db =
        mean_path_loss_db(link.distance(), config.frequency_ghz, pl)? + shadowing_db(sigma, &mut rng);
    Ok(LinkDraw {
        clusters,
        path_loss_db,
    })
}

/// Draws LOS states, shadowing and multipath for realization `index`.
pub fn draw_realization(config: &ScenarioConfig, index: u64) -> Result<RealizationDraws> {
    let l = &config.layout;
    let seed = realization_seed(config.master_seed, index);
    Ok(RealizationDraws {
        seed,
        bs_ris: draw_link(config, LinkGeometry::new(l.tx, l.ris)?, Stream::BsToRis, seed)?,
        ris_user: draw_link(config, LinkGeometry::new(l.ris, l.rx)?, Stream::RisToUser, seed)?,
        direct: if l.direct_link_blocked {
            None
        } else {
            Some(draw_link(config, LinkGeometry::new(l.tx, l.rx)?, Stream::Direct, seed)?)
        },
    })
}

/// Assembles `H`, `G` and `D` from fixed draws for one panel orientation.
pub fn realize(
    config: &ScenarioConfig,
    frames: &NodeFrames,
    draws: &RealizationDraws,
    rotation: RotationAngles,
) -> Result<ChannelRealization> {
    let ris_frame = frames.ris(rotation);
    let h = assemble_link(
        &draws.bs_ris.clusters,
        &config.bs_array,
        &config.ris_array,
        &frames.bs,
        &ris_frame,
        draws.bs_ris.path_loss_db,
    )?;
    let g = assemble_link(
        &draws.ris_user.clusters,
        &config.ris_array,
        &config.user_array,
        &ris_frame,
        &frames.user,
        draws.ris_user.path_loss_db,
    )?;
    let d = match &draws.direct {
        None => zeros(config.user_array.len(), config.bs_array.len()),
        Some(link) => assemble_link(
            &link.clusters,
            &config.bs_array,
            &config.user_array,
            &frames.bs,
            &frames.user,
            link.path_loss_db,
        )?,
    };
    Ok(ChannelRealization {
        h,
        g,
        d,
        seed_used: draws.seed,
    })
}

/// Validates the scenario and produces realization `index` at `rotation`.
pub fn generate_realization(
    config: &ScenarioConfig,
    rotation: RotationAngles,
    index: u64,
) -> Result<ChannelRealization> {
    let violations = validate_scenario(config);
    if !violations.is_empty() {
        return Err(SimError::Validation(violations));
    }
    let frames = config.layout.frames()?;
    let draws = draw_realization(config, index)?;
    realize(config, &frames, &draws, rotation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::ArraySpec;
    use crate::channel::clusters::Path;
    use crate::channel::scenario::Mount;
    use crate::geometry::{compose_rotation, Vec3};

    fn unit_path(gain: Complex64, departure: Vec3, arrival: Vec3) -> Path {
        Path { gain, departure, arrival }
    }

    fn single(path: Path) -> ClusterSet {
        ClusterSet { paths: vec![path], cluster_count: 0, has_los: true }
    }

    #[test]
    fn boresight_path_gives_all_ones() {
        let spec = ArraySpec::upa(2, 3).unwrap();
        let c = single(unit_path(
            Complex64::new(1.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
        ));
        let id = RotationMatrix::identity();
        let m = assemble_link(&c, &spec, &spec, &id, &id, 0.0).unwrap();
        assert_eq!(m.shape(), (6, 6));
        assert!(m.iter().all(|z| *z == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn back_facing_panel_gives_zero() {
        let spec = ArraySpec::upa(2, 2).unwrap().with_pattern_exponent(1.0).unwrap();
        let c = single(unit_path(
            Complex64::new(0.3, 0.4),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
        ));
        let id = RotationMatrix::identity();
        let behind = compose_rotation(RotationAngles::new(180.0, 0.0).unwrap());
        let m = assemble_link(&c, &spec, &spec, &id, &behind, 0.0).unwrap();
        assert!(m.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn two_paths_match_outer_product_oracle() {
        let tx = ArraySpec::ula(3).unwrap();
        let rx = ArraySpec::upa(2, 2).unwrap().with_pattern_exponent(1.0).unwrap();
        let d1 = Vec3::new(0.8, 0.6, 0.0);
        let a1 = Vec3::new(0.6, -0.48, 0.64);
        let d2 = Vec3::new(0.6, 0.0, 0.8);
        let a2 = Vec3::new(0.36, 0.48, 0.8);
        let paths = vec![
            unit_path(Complex64::new(0.5, -0.2), d1, a1),
            unit_path(Complex64::new(-0.1, 0.7), d2, a2),
        ];
        let c = ClusterSet { paths: paths.clone(), cluster_count: 1, has_los: false };
        let id = RotationMatrix::identity();
        let pl = 20.0;
        let m = assemble_link(&c, &tx, &rx, &id, &id, pl).unwrap();

        // Brute force: explicit element positions and exponentials.
        let tx_pos: Vec<[f64; 3]> = (0..3).map(|i| [0.0, 0.5 * i as f64, 0.0]).collect();
        let rx_pos = [[0.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5], [0.0, 0.5, 0.5]];
        let dot = |p: &[f64; 3], u: &Vec3| p[0] * u.x + p[1] * u.y + p[2] * u.z;
        for r in 0..4 {
            for t in 0..3 {
                let mut expected = Complex64::new(0.0, 0.0);
                for p in &paths {
                    let rx_gain = p.arrival.x; // cos of the off-boresight angle, q = 1
                    let phase = std::f64::consts::TAU * (dot(&rx_pos[r], &p.arrival) - dot(&tx_pos[t], &p.departure));
                    expected += p.gain * 0.1 * rx_gain * Complex64::cis(phase);
                }
                assert!((m[(r, t)] - expected).norm() < 1e-12, "({r},{t})");
            }
        }
    }

    #[test]
    fn extra_path_loss_scales_frobenius_norm() {
        let config = ScenarioConfig::reference_indoor();
        let frames = config.layout.frames().unwrap();
        let draws = draw_realization(&config, 0).unwrap();
        let link = &draws.bs_ris;
        let base = assemble_link(&link.clusters, &config.bs_array, &config.ris_array, &frames.bs, &frames.ris_mount, link.path_loss_db).unwrap();
        let k = 7.5;
        let more = assemble_link(&link.clusters, &config.bs_array, &config.ris_array, &frames.bs, &frames.ris_mount, link.path_loss_db + k).unwrap();
        let ratio = more.norm() / base.norm();
        assert!((ratio - 10f64.powf(-k / 20.0)).abs() < 1e-12);
    }

    #[test]
    fn realization_dimensions_and_blocking() {
        let mut config = ScenarioConfig::reference_indoor();
        config.bs_array = ArraySpec::upa(2, 2).unwrap();
        config.user_array = ArraySpec::ula(3).unwrap();
        config.ris_array = ArraySpec::upa(4, 2).unwrap();
        let r = generate_realization(&config, RotationAngles::ZERO, 0).unwrap();
        assert_eq!(r.h.shape(), (8, 4));
        assert_eq!(r.g.shape(), (3, 8));
        assert_eq!(r.d.shape(), (3, 4));
        assert!(r.d.iter().all(|z| *z == Complex64::new(0.0, 0.0)));

        config.layout.direct_link_blocked = false;
        let r = generate_realization(&config, RotationAngles::ZERO, 0).unwrap();
        assert!(r.d.norm() > 0.0);
    }

    #[test]
    fn realizations_are_reproducible_and_canonical() {
        let config = ScenarioConfig::reference_indoor();
        let rot = RotationAngles::new(30.0, 45.0).unwrap();
        let a = generate_realization(&config, rot, 4).unwrap();
        let b = generate_realization(&config, rot, 4).unwrap();
        assert_eq!(a, b);
        let z = generate_realization(&config, RotationAngles::ZERO, 4).unwrap();
        let full = generate_realization(&config, RotationAngles::new(360.0, 360.0).unwrap(), 4).unwrap();
        assert_eq!(z, full);
        assert_ne!(generate_realization(&config, RotationAngles::ZERO, 5).unwrap(), z);
    }

    #[test]
    fn invalid_scenario_is_rejected() {
        let mut config = ScenarioConfig::reference_indoor();
        config.layout.tx.z = 5.0;
        assert!(matches!(
            generate_realization(&config, RotationAngles::ZERO, 0),
            Err(SimError::Validation(_))
        ));
    }

    #[test]
    fn fixed_mounts_are_honored() {
        let mut config = ScenarioConfig::reference_indoor();
        config.layout.ris_mount = Mount::Fixed(RotationAngles::ZERO);
        let f = config.layout.frames().unwrap();
        assert_eq!(f.ris_mount, RotationMatrix::identity());
    }
}
