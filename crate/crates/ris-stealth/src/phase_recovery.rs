//! Reconstruction of unit-modulus phase shifts from an aggregate reflection.
//!
//! Any nu with |nu| <= N alpha2 alpha3 is realizable: writing
//! nu = alpha2 alpha3 xi3 sum_n psi_n with unit coefficients psi_n, pairs of
//! elements are placed symmetrically at angles +/- gamma around the target
//! direction, where cos(gamma) = |nu| / (alpha2 alpha3 N). For odd N one
//! element is peeled off first (chosen so the residual keeps magnitude
//! |nu|, or aligned when |nu| is too large or too small for that choice)
//! and the pair construction handles the remaining even count. The final
//! phase shifts fold in the conjugate surface steering entries so the
//! per-element factors cancel.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scenario::{steering_is, ChannelSet, ScenarioConfig};

/// Unit-modulus reflection coefficients of the surface elements.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftVector {
    pub thetas: Vec<Complex64>,
}

impl PhaseShiftVector {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }
}

/// Fill an even-length slice with unit coefficients summing to
/// target / (a23 xi3). Pairs take e^{j(phi + gamma)} and
/// 2 target / (a23 xi3 m) - e^{j(phi + gamma)}; the latter is unit-modulus
/// because cos(gamma) equals |target| / (a23 m).
fn fill_even_pairs(slot: &mut [Complex64], target: Complex64, a23: f64, xi3: Complex64) {
    let m = slot.len();
    debug_assert!(m % 2 == 0);
    if m == 0 {
        return;
    }
    let reduced = target / (a23 * xi3);
    let phi = reduced.arg();
    let ratio = (target.norm() / (a23 * m as f64)).min(1.0);
    let gamma = ratio.acos();
    let plus = Complex64::cis(phi + gamma);
    let minus = 2.0 * reduced / m as f64 - plus;
    for (i, v) in slot.iter_mut().enumerate() {
        // 1-based even positions take the +gamma member.
        *v = if (i + 1) % 2 == 0 { plus } else { minus };
    }
}

/// Reconstruct phase shifts realizing a given aggregate reflection:
/// alpha2 h3^T Theta xi_I(psi2) = nu, all |theta_n| = 1.
pub fn recover_phases(
    nu: Complex64,
    channels: &ChannelSet,
    config: &ScenarioConfig,
) -> Result<PhaseShiftVector> {
    let n = config.n_elements();
    let a23 = channels.alphas[1] * channels.alphas[2];
    let bound = n as f64 * a23;
    let mag = nu.norm();
    if mag > bound * (1.0 + 1e-9) {
        return Err(Error::NuOutOfRange {
            magnitude: mag,
            bound,
        });
    }
    let xi3 = channels.xis[2];

    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    if n % 2 == 0 {
        fill_even_pairs(&mut psi, nu, a23, xi3);
    } else if n == 1 {
        // A single element realizes only the circle |nu| = a23.
        if (mag - a23).abs() > 1e-9 * a23 {
            return Err(Error::InvalidArgument(format!(
                "a single-element surface realizes only |nu| = {a23}, got {mag}"
            )));
        }
        psi[0] = Complex64::cis((nu / (a23 * xi3)).arg());
    } else {
        let phi = (nu / (a23 * xi3)).arg();
        let last = if mag <= (n - 1) as f64 * a23 {
            if mag < a23 / 2.0 {
                // arccos(a23 / (2|nu|)) is undefined here; an aligned element
                // leaves a residual of magnitude a23 - |nu|, still within the
                // reach of the remaining N - 1 elements.
                Complex64::cis(phi)
            } else {
                // This choice keeps the residual magnitude equal to |nu|.
                Complex64::cis(phi + (a23 / (2.0 * mag)).acos())
            }
        } else {
            Complex64::cis(phi)
        };
        psi[n - 1] = last;
        let residual = nu - a23 * xi3 * last;
        fill_even_pairs(&mut psi[..n - 1], residual, a23, xi3);
    }

    let sv2 = steering_is(
        channels.psi2_aoa,
        config.ny,
        config.nz,
        config.wavelength,
        config.spacing_is,
    );
    let sv3 = steering_is(
        channels.psi3_aod,
        config.ny,
        config.nz,
        config.wavelength,
        config.spacing_is,
    );
    let thetas = psi
        .iter()
        .zip(sv3.iter().zip(&sv2))
        .map(|(&p, (&s3, &s2))| p * s3.conj() * s2.conj())
        .collect();

    Ok(PhaseShiftVector { thetas })
}

/// Composite channels under a phase configuration: the downlink scalar
/// h1 + h3^T Theta h2 and the radar-return vector h4 + H5 Theta h3.
pub fn apply_phase_shifts(
    theta: &PhaseShiftVector,
    channels: &ChannelSet,
) -> Result<(Complex64, Vec<Complex64>)> {
    let n = channels.h2.len();
    if theta.thetas.len() != n {
        return Err(Error::InvalidArgument(format!(
            "phase vector length {} does not match N = {n}",
            theta.thetas.len()
        )));
    }
    let comm = channels.h1
        + channels
            .h3
            .iter()
            .zip(&theta.thetas)
            .zip(&channels.h2)
            .map(|((&h3, &t), &h2)| h3 * t * h2)
            .sum::<Complex64>();
    let m = channels.h4.len();
    let radar = (0..m)
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
    Ok((comm, radar))
}

/// The aggregate reflection realized by a phase configuration,
/// alpha2 h3^T Theta xi_I(psi2). Test oracle for the round-trip.
pub fn realized_nu(
    theta: &PhaseShiftVector,
    channels: &ChannelSet,
    config: &ScenarioConfig,
) -> Complex64 {
    let sv2 = steering_is(
        channels.psi2_aoa,
        config.ny,
        config.nz,
        config.wavelength,
        config.spacing_is,
    );
    channels.alphas[1]
        * channels
            .h3
            .iter()
            .zip(&theta.thetas)
            .zip(&sv2)
            .map(|((&h3, &t), &s2)| h3 * t * s2)
            .sum::<Complex64>()
}
