//! Scalar reduction of the surface design and its closed-form solution.
//!
//! Substituting nu = alpha2 h3^T Theta xi_I(psi2) collapses the N-dimensional
//! phase-shift design to one complex unknown. The sensing utility becomes the
//! quadratic a |nu|^2 + 2 Re(conj(b) nu) + const0, and the constraints carve a
//! planar feasible set: the disk |nu| <= N alpha2 alpha3 minus the open disk of
//! radius sigma sqrt(eta / P) around -h1 conj(xi2). The constrained extrema lie
//! among at most seven closed-form candidates: the unconstrained minimizer, the
//! two intersections of the circles, the two stationary points on the forbidden
//! circle, and the two antipodal points where the outer circle meets the line
//! through the origin and the unconstrained minimizer.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scenario::{steering_ra, ChannelSet, ScenarioConfig};
use crate::sensing::AsymptoticMetric;

/// Default relative feasibility tolerance. Relative so exact-boundary
/// candidates are never rejected by rounding.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

/// The reduced complex-plane instance.
#[derive(Debug, Clone, PartialEq)]
pub struct NuProblem {
    /// Quadratic coefficient |xi_R(psi5)^H xi_R(probe)|^2, in [0, M^2].
    pub a: f64,
    /// Linear coefficient; the objective carries 2 Re(conj(b) nu).
    pub b: Complex64,
    /// Constant term alpha1^2 |xi_R(psi4)^H xi_R(probe)|^2 (alpha1^2 M^2 at
    /// the true-user probe). Excluded from the optimization, reported in the
    /// objective value.
    pub const0: f64,
    pub h1: Complex64,
    pub xi2: Complex64,
    /// Outer disk radius N alpha2 alpha3.
    pub outer_radius: f64,
    /// Forbidden circle radius sigma sqrt(eta / P).
    pub forbidden_radius: f64,
}

/// A solved instance. `candidate_index` is 1-7 for the closed-form
/// candidates and 0 for grid/oracle/degenerate-fallback solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuSolution {
    pub nu: Complex64,
    pub objective: f64,
    pub candidate_index: u8,
    pub feasible: bool,
}

/// Search mode for the grid oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BruteForceMode {
    /// Minimize the quadratic objective.
    Min,
    /// Maximize the quadratic objective.
    Max,
    /// Maximize the absolute deviation of the asymptotic angle estimate from
    /// the true arrival angle, at the given estimator grid step (radians).
    MaxAoaError { grid_step: f64 },
}

impl NuProblem {
    /// Full sensing utility a |nu|^2 + 2 Re(conj(b) nu) + const0.
    pub fn objective_quadratic(&self, nu: Complex64) -> f64 {
        self.a * nu.norm_sqr() + 2.0 * (self.b.conj() * nu).re + self.const0
    }

    /// Both constraints with relative slack: |nu| <= R (1 + tol) and
    /// |h1 + xi2 nu|^2 >= rho^2 (1 - tol).
    pub fn is_feasible(&self, nu: Complex64, tol: f64) -> bool {
        let rho_sq = self.forbidden_radius * self.forbidden_radius;
        nu.norm() <= self.outer_radius * (1.0 + tol)
            && (self.h1 + self.xi2 * nu).norm_sqr() >= rho_sq * (1.0 - tol)
    }

    /// Center of the forbidden circle, -h1 conj(xi2).
    pub fn forbidden_center(&self) -> Complex64 {
        -self.h1 * self.xi2.conj()
    }

    /// The point of the outer circle farthest from the forbidden center;
    /// maximizes the downlink SNR and is feasible whenever anything is.
    fn snr_max_point(&self) -> Complex64 {
        self.outer_radius * Complex64::cis((self.h1 * self.xi2.conj()).arg())
    }

    fn feasible_set_nonempty(&self, tol: f64) -> bool {
        self.h1.norm() + self.outer_radius >= self.forbidden_radius * (1.0 - tol)
    }
}

/// Build the reduced instance for an arbitrary probe direction.
///
/// The quadratic expansion of |(h4^H + conj(xi5 nu) xi_R(psi5)^H) xi_R(probe)|^2
/// gives a = |xi_R(psi5)^H xi_R(probe)|^2,
/// b = alpha1 xi4 conj(xi5) (xi_R(probe)^H xi_R(psi4)) (xi_R(psi5)^H xi_R(probe)),
/// and const0 = alpha1^2 |xi_R(psi4)^H xi_R(probe)|^2. At probe = psi4 the
/// middle inner product collapses to M, recovering the single-probe forms
/// a = |xi_R(psi5)^H xi_R(psi4)|^2, b = alpha1 xi4 M conj(xi5)
/// xi_R(psi5)^H xi_R(psi4), const0 = alpha1^2 M^2.
pub fn build_problem(channels: &ChannelSet, config: &ScenarioConfig, probe: f64) -> NuProblem {
    let m = config.m_antennas;
    let sv_probe = steering_ra(probe, m, config.wavelength, config.spacing_ra);
    let sv4 = steering_ra(channels.psi4_aoa, m, config.wavelength, config.spacing_ra);
    let sv5 = steering_ra(channels.psi5_aoa, m, config.wavelength, config.spacing_ra);

    let ip_5p: Complex64 = sv5.iter().zip(&sv_probe).map(|(x, y)| x.conj() * y).sum();
    let ip_p4: Complex64 = sv_probe.iter().zip(&sv4).map(|(x, y)| x.conj() * y).sum();

    let alpha1 = channels.alphas[0];
    let a = ip_5p.norm_sqr();
    let b = alpha1 * channels.xis[3] * channels.xis[4].conj() * ip_p4 * ip_5p;
    let const0 = alpha1 * alpha1 * ip_p4.norm_sqr();

    let outer_radius = config.n_elements() as f64 * channels.alphas[1] * channels.alphas[2];
    let forbidden_radius =
        (config.noise_power * config.snr_floor / config.tx_power).sqrt();

    NuProblem {
        a,
        b,
        const0,
        h1: channels.h1,
        xi2: channels.xis[1],
        outer_radius,
        forbidden_radius,
    }
}

/// The closed-form candidate points, paired with their 1-based index.
/// Candidates whose defining formula is ill-posed are omitted: the circle
/// intersections 2 and 3 require a valid arccos argument (and nonzero radii),
/// and candidates 1 and 4-7 require a > 0 so the direction -b/a exists.
pub fn enumerate_candidates(problem: &NuProblem) -> Vec<(u8, Complex64)> {
    let r = problem.outer_radius;
    let rho = problem.forbidden_radius;
    let center = problem.forbidden_center();
    let h1_mag = problem.h1.norm();
    let mut out = Vec::with_capacity(7);

    if problem.a > 0.0 {
        out.push((1, -problem.b / problem.a));
    }

    if r > 0.0 && h1_mag > 0.0 {
        let q = (rho * rho - r * r - h1_mag * h1_mag) / (2.0 * r * h1_mag);
        if (-1.0..=1.0).contains(&q) {
            let delta = q.acos();
            let theta0 = (problem.h1 * problem.xi2.conj()).arg();
            out.push((2, r * Complex64::cis(theta0 + delta)));
            out.push((3, r * Complex64::cis(theta0 - delta)));
        }
    }

    if problem.a > 0.0 {
        let unconstrained = -problem.b / problem.a;
        let dir = (unconstrained - center).arg();
        out.push((4, center + rho * Complex64::cis(dir)));
        out.push((5, center - rho * Complex64::cis(dir)));
        let radial = (-problem.b).arg();
        out.push((6, r * Complex64::cis(radial)));
        out.push((7, -r * Complex64::cis(radial)));
    }

    out
}

/// Minimize the sensing utility over the feasible set.
///
/// Filters the closed-form candidates by feasibility and returns the one with
/// the smallest objective; ties go to the lowest candidate index. When the
/// objective is degenerate (a and |b| both below `tol`) every feasible point
/// scores the same and the SNR-maximizing boundary point is returned with
/// index 0.
pub fn solve_min(problem: &NuProblem, tol: f64) -> Result<NuSolution> {
    solve_extremum(problem, tol, Sense::Min)
}

/// Maximize the sensing utility over the feasible set (the max-inner
/// baseline). Since a >= 0 the maximum lies on the boundary; the candidate
/// set is 2-7 plus the aligned outer point R exp(j arg(b)). Ties break
/// toward the smallest phase angle in [0, 2 pi).
pub fn solve_max(problem: &NuProblem, tol: f64) -> Result<NuSolution> {
    solve_extremum(problem, tol, Sense::Max)
}

#[derive(Clone, Copy, PartialEq)]
enum Sense {
    Min,
    Max,
}

fn phase_key(nu: Complex64) -> f64 {
    let p = nu.arg();
    if p < 0.0 {
        p + 2.0 * PI
    } else {
        p
    }
}

fn solve_extremum(problem: &NuProblem, tol: f64, sense: Sense) -> Result<NuSolution> {
    if !problem.feasible_set_nonempty(tol) {
        return Err(Error::Infeasible(format!(
            "|h1| + R = {} < rho = {}",
            problem.h1.norm() + problem.outer_radius,
            problem.forbidden_radius
        )));
    }

    if problem.a <= tol && problem.b.norm() <= tol {
        let nu = problem.snr_max_point();
        return Ok(NuSolution {
            nu,
            objective: problem.objective_quadratic(nu),
            candidate_index: 0,
            feasible: true,
        });
    }

    let mut candidates = enumerate_candidates(problem);
    if sense == Sense::Max {
        candidates.retain(|&(idx, _)| idx != 1);
        let aligned = if problem.b.norm() > 0.0 {
            problem.outer_radius * Complex64::cis(problem.b.arg())
        } else {
            Complex64::new(problem.outer_radius, 0.0)
        };
        candidates.push((0, aligned));
    }

    let mut best: Option<(u8, Complex64, f64)> = None;
    for (idx, nu) in candidates {
        if !problem.is_feasible(nu, tol) {
            continue;
        }
        let obj = problem.objective_quadratic(nu);
        let wins = match best {
            None => true,
            Some((best_idx, best_nu, best_obj)) => match sense {
                // Strict comparison plus ascending index order keeps the
                // lowest index on ties.
                Sense::Min => obj < best_obj,
                Sense::Max => {
                    if obj != best_obj {
                        obj > best_obj
                    } else {
                        let (p, bp) = (phase_key(nu), phase_key(best_nu));
                        if p != bp {
                            p < bp
                        } else {
                            // Prefer a numbered candidate over the extra
                            // aligned point when they coincide exactly.
                            index_rank(idx) < index_rank(best_idx)
                        }
                    }
                }
            },
        };
        if wins {
            best = Some((idx, nu, obj));
        }
    }

    // The candidate set covers every constrained extremum, so this only
    // triggers at numerically razor-thin feasible sets; the SNR-maximizing
    // point is feasible whenever the set is nonempty.
    let (idx, nu, obj) = best.unwrap_or_else(|| {
        let nu = problem.snr_max_point();
        (0, nu, problem.objective_quadratic(nu))
    });

    Ok(NuSolution {
        nu,
        objective: obj,
        candidate_index: idx,
        feasible: true,
    })
}

fn index_rank(idx: u8) -> u8 {
    if idx == 0 {
        u8::MAX
    } else {
        idx
    }
}

/// Exhaustive polar-grid search over the feasible set.
///
/// The grid spans r in [0, R] (`radial_steps` points) by phi in [0, 2 pi)
/// (`angular_steps` points); only strictly feasible points are scored, so the
/// oracle never leaves the feasible set. Ties break toward smaller radius,
/// then smaller angle, making the result independent of evaluation order.
/// `channels` is required only for [`BruteForceMode::MaxAoaError`].
pub fn brute_force_nu(
    problem: &NuProblem,
    mode: BruteForceMode,
    channels: Option<(&ChannelSet, &ScenarioConfig)>,
    radial_steps: usize,
    angular_steps: usize,
) -> Result<NuSolution> {
    if radial_steps < 2 || angular_steps < 2 {
        return Err(Error::InvalidArgument(
            "grid oracle needs at least 2 radial and 2 angular steps".into(),
        ));
    }

    let metric = match mode {
        BruteForceMode::MaxAoaError { grid_step } => {
            let (ch, cfg) = channels.ok_or_else(|| {
                Error::InvalidArgument(
                    "max-aoa-error mode requires the channel set".into(),
                )
            })?;
            Some(AsymptoticMetric::new(ch, cfg, grid_step)?)
        }
        _ => None,
    };

    let r_max = problem.outer_radius;
    let rho_sq = problem.forbidden_radius * problem.forbidden_radius;
    let center = problem.forbidden_center();
    let (a, b) = (problem.a, problem.b);

    let units: Vec<(f64, f64)> = (0..angular_steps)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / angular_steps as f64;
            (phi.cos(), phi.sin())
        })
        .collect();

    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..radial_steps {
        let r = r_max * i as f64 / (radial_steps - 1) as f64;
        for (k, &(cx, sx)) in units.iter().enumerate() {
            let (x, y) = (r * cx, r * sx);
            let dx = x - center.re;
            let dy = y - center.im;
            if dx * dx + dy * dy < rho_sq {
                continue;
            }
            let score = match (&mode, &metric) {
                (BruteForceMode::Min, _) | (BruteForceMode::Max, _) => {
                    a * r * r + 2.0 * (b.re * x + b.im * y)
                }
                (BruteForceMode::MaxAoaError { .. }, Some(m)) => {
                    (m.estimate(Complex64::new(x, y)) - m.true_angle()).abs()
                }
                _ => unreachable!(),
            };
            let wins = match best {
                None => true,
                Some((best_score, _, _)) => match mode {
                    BruteForceMode::Min => score < best_score,
                    _ => score > best_score,
                },
            };
            if wins {
                best = Some((score, i, k));
            }
        }
    }

    let (_, i, k) = best.ok_or_else(|| {
        Error::Infeasible("no grid point satisfies the SNR constraint".into())
    })?;
    let r = r_max * i as f64 / (radial_steps - 1) as f64;
    let nu = Complex64::new(r * units[k].0, r * units[k].1);
    Ok(NuSolution {
        nu,
        objective: problem.objective_quadratic(nu),
        candidate_index: 0,
        feasible: true,
    })
}
