//! Morse index and nullity of a few surfaces, with both routes required to
//! agree and a confirmation pass at twice the mesh.

use otsuki::pipeline::{bounds_check, compute_index, IndexOptions, Method};
use otsuki::spectral::TAU_ZERO;

fn main() -> otsuki::Result<()> {
    let opts = IndexOptions { method: Method::Both, cells: 1024, tau: TAU_ZERO, confirm: true };
    println!("{:>6} {:>5} {:>5} {:>12} {:>8} {:>10}", "p/q", "ind", "nul", "bounds", "s1", "all bounds");
    for (p, q) in [(2, 3), (5, 8), (7, 10), (12, 17)] {
        let r = compute_index(p, q, &opts)?;
        let check = bounds_check(&r);
        println!(
            "{:>6} {:>5} {:>5} {:>12} {:>8.4} {:>10}",
            format!("{p}/{q}"),
            r.ind,
            r.nul,
            format!("[{}, {}]", r.bounds.thm_lower, r.bounds.thm_upper),
            r.flags.s1.unwrap_or(f64::NAN),
            check.all()
        );
    }
    Ok(())
}
