//! Laplace eigenvalues below 2 on the surface against the closed form, and
//! the rough bound ind <= 5 ind_S + 2 over a parallel sweep.

use otsuki::geodesic::{sample_trajectory, solve_parameter};
use otsuki::pipeline::{sweep, IndexOptions, Method};
use otsuki::spectral::{spectral_index, spectral_index_formula, TAU_ZERO};

fn main() -> otsuki::Result<()> {
    let cells = 512;
    for (p, q) in [(2, 3), (5, 8), (7, 10)] {
        let family = solve_parameter(p, q)?;
        let rotation = family.rotation.expect("solved family");
        let traj = sample_trajectory(&family, 4 * cells)?;
        let s = spectral_index(rotation, &traj, cells, TAU_ZERO)?;
        println!("{p}/{q}: ind_S = {} (formula {}), per mode {:?}", s.total, spectral_index_formula(rotation), s.per_l);
    }

    let opts = IndexOptions { method: Method::Direct, cells, tau: TAU_ZERO, confirm: false };
    for ((p, q), report) in sweep(&[(7, 10), (2, 3), (5, 8), (12, 17)], &opts) {
        let r = report?;
        println!("{p}/{q}: ind {} <= {} = 5 ind_S + 2", r.ind, r.bounds.rough_upper);
    }
    Ok(())
}
