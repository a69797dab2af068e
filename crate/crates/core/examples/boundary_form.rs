//! Boundary-form counting for l = 1, 2: the Gram data, the determinant
//! polynomial and its roots, and the counts per root of unity.

use otsuki::edwards::{aggregate_roots, boundary_form};
use otsuki::geodesic::{sample_trajectory, solve_parameter};
use otsuki::spectral::TAU_ZERO;

fn main() -> otsuki::Result<()> {
    for (p, q) in [(2u32, 3u32), (7, 10)] {
        let cells = 512;
        let traj = sample_trajectory(&solve_parameter(p, q)?, 4 * cells)?;
        println!("family {p}/{q}, cos(p pi/q) = {:.12}", (std::f64::consts::PI * p as f64 / q as f64).cos());
        for l in [1, 2] {
            let data = boundary_form(l, &traj, cells, TAU_ZERO)?;
            println!("  l = {l}: Dirichlet negatives {}, margin {:.3e}", data.dirichlet_neg, data.applicability_margin);
            println!("    P(s) coefficients {:?}", data.p_coeffs);
            println!("    real roots {:?}", data.roots);
            let agg = aggregate_roots(&data, q)?;
            let per_root: Vec<String> = agg.per_root.iter().map(|c| format!("{}/{}", c.neg, c.zero)).collect();
            println!("    neg/zero per root [{}], total {} / {}", per_root.join(" "), agg.neg, agg.zero);
        }
    }
    Ok(())
}
