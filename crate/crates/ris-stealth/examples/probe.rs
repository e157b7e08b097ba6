//! Scratch measurements for calibrating test tolerances. Not part of the
//! deliverable surface; run with `cargo run --release --example probe`.

use std::time::Instant;

use ris_stealth::harness::{RunConfig, SnrSpec};
use ris_stealth::nu_solver::{
    build_problem, brute_force_nu, solve_min, BruteForceMode, DEFAULT_FEASIBILITY_TOL,
};
use ris_stealth::scenario::derive_channels;
use ris_stealth::sensing::{angle_error_deg, asymptotic_aoa};

fn main() {
    let step = 0.01f64.to_radians();
    for y in [-14.0, -13.0, -12.0, -10.0, 10.0, 13.0] {
        let cfg = RunConfig {
            pos_is: [0.0, y, 0.0],
            snr: SnrSpec::EnhancementDb(0.0),
            ..RunConfig::default()
        }
        .scenario()
        .unwrap();
        let ch = derive_channels(&cfg).unwrap();
        let problem = build_problem(&ch, &cfg, ch.psi4_aoa);
        let sol = solve_min(&problem, DEFAULT_FEASIBILITY_TOL).unwrap();
        let prop_err = angle_error_deg(
            asymptotic_aoa(&ch, &cfg, sol.nu, step).unwrap(),
            ch.psi4_aoa,
        );
        print!("y {y:6.1}: prop {prop_err:9.4}");
        for (rs, as_) in [(64usize, 256usize), (96, 384), (128, 512), (192, 768)] {
            let start = Instant::now();
            let exh = brute_force_nu(
                &problem,
                BruteForceMode::MaxAoaError { grid_step: step },
                Some((&ch, &cfg)),
                rs,
                as_,
            )
            .unwrap();
            let exh_err = angle_error_deg(
                asymptotic_aoa(&ch, &cfg, exh.nu, step).unwrap(),
                ch.psi4_aoa,
            );
            print!(
                " | {rs}x{as_}: {exh_err:9.4} (gap {:+.3e}, {:.2}s)",
                exh_err - prop_err,
                start.elapsed().as_secs_f64()
            );
        }
        println!();
    }
}
