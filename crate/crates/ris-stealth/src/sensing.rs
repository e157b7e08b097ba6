//! Radar echo simulation and the base station's angle-of-arrival estimator.
//!
//! The base station models the echo as a single path from the user and
//! estimates the arrival angle by correlating against reception-array
//! steering vectors over a dense grid on [0, pi], with one parabolic
//! refinement of the winning grid point on the log-metric. The surface makes
//! that model mismatched; the law-of-large-numbers limit of the estimator is
//! the argmax of |(h4 + H5 Theta h3)^H xi_R(psi')|, which depends on the
//! phase configuration only through the aggregate reflection nu.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::phase_recovery::PhaseShiftVector;
use crate::scenario::{steering_ra, ChannelSet, ScenarioConfig};

/// One received echo block: the M x L reception-array samples and the
/// transmit symbols that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoBlock {
    pub y_r: Array2<Complex64>,
    pub x: Vec<Complex64>,
    pub seed: u64,
}

/// Joint maximum-likelihood estimate of the arrival angle and the scalar
/// path gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoaEstimate {
    pub psi_hat: f64,
    pub alpha_hat: Complex64,
    pub grid_resolution: f64,
}

/// Simulate one echo block Y_R = zeta (h4 + H5 Theta h3)(h1 + h3^T Theta h2)
/// x^T + Z_R with quaternary constant-modulus symbols of power P and
/// circularly-symmetric Gaussian noise of variance sigma^2 per entry.
/// Deterministic given the seed.
pub fn simulate_echo(
    channels: &ChannelSet,
    theta: &PhaseShiftVector,
    config: &ScenarioConfig,
    seed: u64,
) -> Result<EchoBlock> {
    let n = channels.h2.len();
    if theta.thetas.len() != n {
        return Err(Error::InvalidArgument(format!(
            "phase vector length {} does not match N = {n}",
            theta.thetas.len()
        )));
    }
    let m = channels.h4.len();
    let l = config.block_length;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    // Constant-modulus quaternary symbols keep the per-symbol power exactly P.
    let amp = config.tx_power.sqrt();
    let x: Vec<Complex64> = (0..l)
        .map(|_| {
            let k: u8 = rng.random_range(0..4);
            amp * Complex64::cis(PI / 4.0 + PI / 2.0 * k as f64)
        })
        .collect();

    let comm: Complex64 = channels.h1
        + channels
            .h3
            .iter()
            .zip(&theta.thetas)
            .zip(&channels.h2)
            .map(|((&h3, &t), &h2)| h3 * t * h2)
            .sum::<Complex64>();
    let radar: Vec<Complex64> = (0..m)
        .map(|row| {
            channels.h4[row]
                + channels
                    .h3
                    .iter()
                    .zip(&theta.thetas)
                    .enumerate()
                    .map(|(col, (&h3, &t))| channels.h5[(row, col)] * t * h3)
                    .sum::<Complex64>()
        })
        .collect();
    let gain: Vec<Complex64> = radar.iter().map(|&g| config.rcs_coeff * g * comm).collect();

    let sigma = config.noise_power.sqrt();
    let noise_scale = sigma / 2f64.sqrt();
    let mut y_r = Array2::from_elem((m, l), Complex64::new(0.0, 0.0));
    for row in 0..m {
        for col in 0..l {
            let zr: f64 = rng.sample(StandardNormal);
            let zi: f64 = rng.sample(StandardNormal);
            y_r[(row, col)] = gain[row] * x[col] + noise_scale * Complex64::new(zr, zi);
        }
    }

    Ok(EchoBlock { y_r, x, seed })
}

/// Uniform angle grid over [0, pi]. The last point is clamped to pi.
fn angle_grid(step: f64) -> Vec<f64> {
    let count = (PI / step).ceil() as usize + 1;
    (0..count).map(|k| (k as f64 * step).min(PI)).collect()
}

/// One parabolic refinement of a grid argmax on the log-metric. Falls back
/// to the grid point at the edges or when the metric is flat or nonpositive.
fn refine_parabolic(metric: &[f64], psis: &[f64], peak: usize) -> f64 {
    if peak == 0 || peak + 1 >= psis.len() {
        return psis[peak];
    }
    let (m0, m1, m2) = (metric[peak - 1], metric[peak], metric[peak + 1]);
    if m0 <= 0.0 || m1 <= 0.0 || m2 <= 0.0 {
        return psis[peak];
    }
    let (l0, l1, l2) = (m0.ln(), m1.ln(), m2.ln());
    let denom = l0 - 2.0 * l1 + l2;
    if denom >= -1e-300 {
        return psis[peak];
    }
    let delta = 0.5 * (l0 - l2) / denom;
    let h = 0.5 * (psis[peak + 1] - psis[peak - 1]);
    (psis[peak] + delta.clamp(-1.0, 1.0) * h).clamp(0.0, PI)
}

fn grid_argmax(metric: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in metric.iter().enumerate() {
        if v > metric[best] {
            best = k;
        }
    }
    best
}

/// Maximum-likelihood grid estimate of the arrival angle from one echo
/// block: psi_hat maximizes |x^T Y_R^H xi_R(psi')|^2 over [0, pi], refined
/// parabolically; alpha_hat is the conditionally optimal gain at psi_hat.
pub fn ml_estimate_aoa(
    echo: &EchoBlock,
    config: &ScenarioConfig,
    grid_step: f64,
) -> Result<AoaEstimate> {
    if grid_step <= 0.0 {
        return Err(Error::InvalidArgument("grid step must be positive".into()));
    }
    let m = echo.y_r.nrows();
    let l = echo.y_r.ncols();
    if echo.x.len() != l {
        return Err(Error::InvalidArgument(
            "symbol vector length does not match the echo block".into(),
        ));
    }

    // w_m = sum_l x_l conj(Y[m, l]); the metric is |sum_m w_m [xi_R]_m|^2.
    let w: Vec<Complex64> = (0..m)
        .map(|row| {
            (0..l)
                .map(|col| echo.x[col] * echo.y_r[(row, col)].conj())
                .sum()
        })
        .collect();

    let psis = angle_grid(grid_step);
    let correlate = |psi: f64| -> Complex64 {
        let base = -2.0 * PI / config.wavelength * config.spacing_ra * psi.cos();
        w.iter()
            .enumerate()
            .map(|(i, &wi)| wi * Complex64::cis(base * i as f64))
            .sum()
    };
    let metric: Vec<f64> = psis.iter().map(|&p| correlate(p).norm_sqr()).collect();
    let peak = grid_argmax(&metric);
    let psi_hat = refine_parabolic(&metric, &psis, peak);

    let x_energy: f64 = echo.x.iter().map(|v| v.norm_sqr()).sum();
    let alpha_hat = correlate(psi_hat).conj() / (m as f64 * x_energy);

    Ok(AoaEstimate {
        psi_hat,
        alpha_hat,
        grid_resolution: grid_step,
    })
}

/// Precomputed tables for the noise-free limit of the estimation metric,
/// |h4^H xi_R(psi') + conj(xi5 nu) xi_R(psi5)^H xi_R(psi')| over the angle
/// grid. Reused across many nu evaluations by the exhaustive baseline.
pub struct AsymptoticMetric {
    psis: Vec<f64>,
    direct: Vec<Complex64>,
    surface: Vec<Complex64>,
    psi4_aoa: f64,
}

impl AsymptoticMetric {
    pub fn new(channels: &ChannelSet, config: &ScenarioConfig, grid_step: f64) -> Result<Self> {
        if grid_step <= 0.0 {
            return Err(Error::InvalidArgument("grid step must be positive".into()));
        }
        let m = channels.h4.len();
        let psis = angle_grid(grid_step);
        let mut direct = Vec::with_capacity(psis.len());
        let mut surface = Vec::with_capacity(psis.len());
        let sv5 = steering_ra(channels.psi5_aoa, m, config.wavelength, config.spacing_ra);
        for &psi in &psis {
            let sv = steering_ra(psi, m, config.wavelength, config.spacing_ra);
            let d: Complex64 = channels.h4.iter().zip(&sv).map(|(h, s)| h.conj() * s).sum();
            let s: Complex64 = sv5.iter().zip(&sv).map(|(a, s)| a.conj() * s).sum();
            direct.push(d);
            surface.push(channels.xis[4].conj() * s);
        }
        Ok(AsymptoticMetric {
            psis,
            direct,
            surface,
            psi4_aoa: channels.psi4_aoa,
        })
    }

    /// True arrival angle of the user path.
    pub fn true_angle(&self) -> f64 {
        self.psi4_aoa
    }

    /// Refined argmax of the asymptotic metric for a given aggregate
    /// reflection.
    pub fn estimate(&self, nu: Complex64) -> f64 {
        let nu_conj = nu.conj();
        let mut best = 0usize;
        let mut best_val = f64::NEG_INFINITY;
        let mut metric = vec![0.0; self.psis.len()];
        for k in 0..self.psis.len() {
            let v = (self.direct[k] + self.surface[k] * nu_conj).norm_sqr();
            metric[k] = v;
            if v > best_val {
                best_val = v;
                best = k;
            }
        }
        refine_parabolic(&metric, &self.psis, best)
    }
}

/// Noise-free limit of the estimator for a given nu: the refined argmax of
/// |h4^H xi_R(psi') + conj(xi5 nu) xi_R(psi5)^H xi_R(psi')| over [0, pi].
pub fn asymptotic_aoa(
    channels: &ChannelSet,
    config: &ScenarioConfig,
    nu: Complex64,
    grid_step: f64,
) -> Result<f64> {
    Ok(AsymptoticMetric::new(channels, config, grid_step)?.estimate(nu))
}

/// Downlink SNR (P / sigma^2) |h1 + xi2 nu|^2, linear.
pub fn user_snr(channels: &ChannelSet, nu: Complex64, config: &ScenarioConfig) -> f64 {
    config.tx_power / config.noise_power * (channels.h1 + channels.xis[1] * nu).norm_sqr()
}

/// Absolute angle difference in degrees.
pub fn angle_error_deg(psi_hat: f64, psi_true: f64) -> f64 {
    (psi_hat - psi_true).abs() * 180.0 / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_recovery::recover_phases;
    use crate::scenario::derive_channels;

    const STEP: f64 = 0.01 * PI / 180.0;

    fn quiet_config() -> ScenarioConfig {
        ScenarioConfig {
            noise_power: 1e-300,
            ..ScenarioConfig::default()
        }
    }

    fn unit_thetas(n: usize) -> PhaseShiftVector {
        PhaseShiftVector {
            thetas: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    /// Channels with the surface removed: only the direct echo path remains.
    fn without_surface(mut ch: ChannelSet) -> ChannelSet {
        for v in ch.h2.iter_mut().chain(ch.h3.iter_mut()) {
            *v = Complex64::new(0.0, 0.0);
        }
        ch.h5.fill(Complex64::new(0.0, 0.0));
        ch
    }

    #[test]
    fn echo_noiseless_single_path_is_rank_one() {
        let cfg = quiet_config();
        let ch = without_surface(derive_channels(&cfg).unwrap());
        let echo = simulate_echo(&ch, &unit_thetas(cfg.n_elements()), &cfg, 3).unwrap();
        let sv = steering_ra(ch.psi4_aoa, cfg.m_antennas, cfg.wavelength, cfg.spacing_ra);
        for col in 0..4 {
            let column: Vec<Complex64> = (0..cfg.m_antennas).map(|r| echo.y_r[(r, col)]).collect();
            let ratio = column[0] / sv[0];
            for (c, s) in column.iter().zip(&sv) {
                assert!((c - ratio * s).norm() < 1e-12 * ratio.norm());
            }
        }
    }

    #[test]
    fn echo_zero_rcs_leaves_only_noise() {
        let cfg = ScenarioConfig {
            rcs_coeff: Complex64::new(0.0, 0.0),
            ..ScenarioConfig::default()
        };
        let ch = derive_channels(&cfg).unwrap();
        let n = cfg.n_elements();
        let a = simulate_echo(&ch, &unit_thetas(n), &cfg, 11).unwrap();
        // With zeta = 0 the block is exactly the noise realization, so it
        // cannot depend on the phase configuration.
        let other = PhaseShiftVector {
            thetas: (0..n).map(|i| Complex64::cis(i as f64)).collect(),
        };
        let b = simulate_echo(&ch, &other, &cfg, 11).unwrap();
        assert_eq!(a.y_r, b.y_r);
        let quiet = ScenarioConfig { noise_power: 1e-300, ..cfg };
        let c = simulate_echo(&ch, &unit_thetas(n), &quiet, 11).unwrap();
        for v in c.y_r.iter() {
            assert!(v.norm() < 1e-140);
        }
    }

    #[test]
    fn echo_deterministic_per_seed() {
        let cfg = ScenarioConfig::default();
        let ch = derive_channels(&cfg).unwrap();
        let t = unit_thetas(cfg.n_elements());
        let a = simulate_echo(&ch, &t, &cfg, 42).unwrap();
        let b = simulate_echo(&ch, &t, &cfg, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_echo(&ch, &t, &cfg, 43).unwrap();
        assert_ne!(a.y_r, c.y_r);
    }

    #[test]
    fn echo_symbol_power_exact() {
        let cfg = ScenarioConfig::default();
        let ch = derive_channels(&cfg).unwrap();
        let echo = simulate_echo(&ch, &unit_thetas(cfg.n_elements()), &cfg, 1).unwrap();
        let mean: f64 =
            echo.x.iter().map(|v| v.norm_sqr()).sum::<f64>() / echo.x.len() as f64;
        assert!((mean - cfg.tx_power).abs() < 1e-12 * cfg.tx_power);
    }

    #[test]
    fn ml_recovers_true_angle_noiseless() {
        let cfg = quiet_config();
        let ch = without_surface(derive_channels(&cfg).unwrap());
        let echo = simulate_echo(&ch, &unit_thetas(cfg.n_elements()), &cfg, 5).unwrap();
        let est = ml_estimate_aoa(&echo, &cfg, STEP).unwrap();
        assert!((est.psi_hat - ch.psi4_aoa).abs() < STEP);
    }

    #[test]
    fn ml_recovers_synthetic_rank_one_angle() {
        let cfg = ScenarioConfig::default();
        let psi0 = 1.234f64;
        let sv = steering_ra(psi0, cfg.m_antennas, cfg.wavelength, cfg.spacing_ra);
        let l = 64;
        let amp = cfg.tx_power.sqrt();
        let x: Vec<Complex64> = (0..l)
            .map(|i| amp * Complex64::cis(PI / 4.0 + PI / 2.0 * (i % 4) as f64))
            .collect();
        let mut y_r = Array2::from_elem((cfg.m_antennas, l), Complex64::new(0.0, 0.0));
        for r in 0..cfg.m_antennas {
            for c in 0..l {
                y_r[(r, c)] = Complex64::new(0.7, -0.2) * sv[r] * x[c];
            }
        }
        let echo = EchoBlock { y_r, x, seed: 0 };
        let est = ml_estimate_aoa(&echo, &cfg, STEP).unwrap();
        assert!((est.psi_hat - psi0).abs() < STEP);
        // The gain estimate recovers the planted coefficient.
        assert!((est.alpha_hat - Complex64::new(0.7, -0.2)).norm() < 1e-3);
    }

    #[test]
    fn ml_metric_invariant_to_global_phase() {
        let cfg = ScenarioConfig::default();
        let ch = derive_channels(&cfg).unwrap();
        let echo = simulate_echo(&ch, &unit_thetas(cfg.n_elements()), &cfg, 9).unwrap();
        let rotated = EchoBlock {
            y_r: echo.y_r.mapv(|v| v * Complex64::cis(1.1)),
            x: echo.x.clone(),
            seed: echo.seed,
        };
        let a = ml_estimate_aoa(&echo, &cfg, STEP).unwrap();
        let b = ml_estimate_aoa(&rotated, &cfg, STEP).unwrap();
        assert!((a.psi_hat - b.psi_hat).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_without_reflection_peaks_at_true_angle() {
        let cfg = ScenarioConfig::default();
        let ch = derive_channels(&cfg).unwrap();
        let psi = asymptotic_aoa(&ch, &cfg, Complex64::new(0.0, 0.0), STEP).unwrap();
        assert!((psi - ch.psi4_aoa).abs() < STEP);
    }

    #[test]
    fn asymptotic_dominant_reflection_peaks_at_surface_angle() {
        let cfg = ScenarioConfig::default();
        let ch = derive_channels(&cfg).unwrap();
        let nu = Complex64::new(1e6 * ch.alphas[0], 0.0);
        let psi = asymptotic_aoa(&ch, &cfg, nu, STEP).unwrap();
        assert!((psi - ch.psi5_aoa).abs() < STEP);
    }

    #[test]
    fn monte_carlo_ml_converges_to_asymptotic() {
        // High SNR, L = 1000: the grid estimate averaged over seeds stays
        // within a few grid steps of the noise-free limit.
        let cfg = ScenarioConfig {
            noise_power: 1e-17,
            ..ScenarioConfig::default()
        };
        let ch = derive_channels(&cfg).unwrap();
        let r = cfg.n_elements() as f64 * ch.alphas[1] * ch.alphas[2];
        let nu = 0.5 * r * Complex64::cis(2.0);
        let theta = recover_phases(nu, &ch, &cfg).unwrap();
        let reference = asymptotic_aoa(&ch, &cfg, nu, STEP).unwrap();
        let mean: f64 = (0..100)
            .map(|t| {
                let echo = simulate_echo(&ch, &theta, &cfg, 1000 + t).unwrap();
                ml_estimate_aoa(&echo, &cfg, STEP).unwrap().psi_hat
            })
            .sum::<f64>()
            / 100.0;
        assert!(
            (mean - reference).abs() < 3.0 * STEP,
            "mean {mean} vs asymptotic {reference}"
        );
    }

    #[test]
    fn estimator_consistency_noiseless_all_trials() {
        let cfg = quiet_config();
        let ch = without_surface(derive_channels(&cfg).unwrap());
        for t in 0..100 {
            let echo = simulate_echo(&ch, &unit_thetas(cfg.n_elements()), &cfg, t).unwrap();
            let est = ml_estimate_aoa(&echo, &cfg, STEP).unwrap();
            assert!(angle_error_deg(est.psi_hat, ch.psi4_aoa) < 0.01);
        }
    }

    #[test]
    fn more_noise_never_helps() {
        let base = ScenarioConfig::default();
        let loud = ScenarioConfig {
            noise_power: base.noise_power * 1e3,
            ..base.clone()
        };
        let mean_err = |cfg: &ScenarioConfig| -> f64 {
            let ch = without_surface(derive_channels(cfg).unwrap());
            let t = unit_thetas(cfg.n_elements());
            (0..200)
                .map(|s| {
                    let echo = simulate_echo(&ch, &t, cfg, s).unwrap();
                    let est = ml_estimate_aoa(&echo, cfg, STEP).unwrap();
                    angle_error_deg(est.psi_hat, ch.psi4_aoa)
                })
                .sum::<f64>()
                / 200.0
        };
        let quiet = mean_err(&base);
        let noisy = mean_err(&loud);
        assert!(
            noisy >= quiet * 0.95,
            "mean error fell from {quiet} to {noisy} despite 30 dB more noise"
        );
    }

    #[test]
    fn user_snr_reference_points() {
        let cfg = ScenarioConfig::default();
        let ch = derive_channels(&cfg).unwrap();
        let base = cfg.tx_power / cfg.noise_power * ch.h1.norm_sqr();
        assert!((user_snr(&ch, Complex64::new(0.0, 0.0), &cfg) - base).abs() < 1e-9 * base);

        let r = cfg.n_elements() as f64 * ch.alphas[1] * ch.alphas[2];
        let aligned = r * Complex64::cis((ch.h1 * ch.xis[1].conj()).arg());
        let peak = cfg.tx_power / cfg.noise_power * (ch.h1.norm() + r).powi(2);
        assert!((user_snr(&ch, aligned, &cfg) - peak).abs() < 1e-9 * peak);

        // Perfect cancellation needs |h1| <= R, which holds by default.
        assert!(ch.h1.norm() <= r);
        let cancel = -ch.h1 * ch.xis[1].conj();
        assert!(user_snr(&ch, cancel, &cfg) < 1e-20 * base);
    }

    #[test]
    fn angle_error_examples_and_metric_axioms() {
        assert_eq!(angle_error_deg(PI / 2.0, PI / 2.0), 0.0);
        assert!((angle_error_deg(PI, 0.0) - 180.0).abs() < 1e-12);
        assert!((angle_error_deg(1.0, 0.5) - 28.6479).abs() < 1e-4);
        let (a, b, c) = (0.3, 2.1, 1.4);
        assert_eq!(angle_error_deg(a, b), angle_error_deg(b, a));
        assert!(angle_error_deg(a, c) <= angle_error_deg(a, b) + angle_error_deg(b, c) + 1e-12);
    }
}
