//! Spectra of the separated Jacobi problems for one surface.
//!
//! Mode l = 0 on the closed geodesic, then the twisted l = 1 problems over a
//! single half-period for every 2q-th root of unity.

use otsuki::edwards::root_of_unity;
use otsuki::geodesic::{sample_trajectory, solve_parameter};
use otsuki::geometry::jacobi_system;
use otsuki::spectral::{count_signs, spectrum_below, Boundary, TAU_ZERO};

fn main() -> otsuki::Result<()> {
    let (p, q) = (2u32, 3u32);
    let cells = 512;
    let traj = sample_trajectory(&solve_parameter(p, q)?, 4 * cells)?;

    let half_periods = 2 * q as usize;
    let sys = jacobi_system(0, &traj, Boundary::Periodic, half_periods)?;
    let s = spectrum_below(&sys, 0.05, cells * half_periods, TAU_ZERO)?;
    println!("l = 0 periodic on the closed geodesic: {} negative, {} zero", s.neg, s.zero);
    for (k, lambda) in s.eigenvalues.iter().enumerate() {
        println!("  lambda_{k:<2} = {lambda:+.9}");
    }

    println!("l = 1 twisted by omega = e^(i pi r/q) on [0, T]:");
    let mut total = (0, 0);
    for r in 0..2 * q {
        let sys = jacobi_system(1, &traj, Boundary::Twisted(root_of_unity(q, r)), 1)?;
        let c = count_signs(&sys, cells, TAU_ZERO)?;
        println!("  r = {r}: neg {} zero {} (near-zero eigenvalues {:?})", c.neg, c.zero, c.near_zero);
        total = (total.0 + c.neg, total.1 + c.zero);
    }
    println!("  sum over roots: neg {} zero {}", total.0, total.1);
    Ok(())
}
