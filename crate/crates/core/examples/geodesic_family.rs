//! Solve for the closed geodesic of rotation number p/q and sample it.
//!
//! cargo run --release --example geodesic_family -- 5 8

use otsuki::geodesic::{half_period, rotation_angle, sample_trajectory, solve_parameter};

fn main() -> otsuki::Result<()> {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (p, q) = match args[..] {
        [p, q] => (p, q),
        _ => (2, 3),
    };
    let family = solve_parameter(p, q)?;
    println!("{p}/{q}: b = {:.15}, T = {:.12}, Xi = {:.12}", family.b, family.half_period, family.rotation_angle);
    println!("closed length 2qT = {:.12}", family.full_length().unwrap_or(f64::NAN));

    let traj = sample_trajectory(&family, 512)?;
    println!("first integral defect on 512 steps: {:.2e}", traj.conservation_defect());
    for i in (0..=traj.n()).step_by(128) {
        let s = traj.node(i);
        println!("  t = {:8.4}  phi = {:+.6}  phidot = {:+.6}  theta = {:.6}", i as f64 * traj.step(), s.phi, s.phidot, s.theta);
    }

    println!("T and Xi approach the degenerate limits as b -> 0:");
    for b in [-1.0, -0.3, -0.01, -1e-4] {
        println!("  b = {b:>8}: T = {:.8}, Xi/pi = {:.8}", half_period(b)?, rotation_angle(b)? / std::f64::consts::PI);
    }
    Ok(())
}
