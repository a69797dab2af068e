//! Export the bipolar surface as a CSV point cloud and check its frame.
//!
//! cargo run --release --example surface_mesh -- surface.csv

use std::fs::File;
use std::io::BufWriter;

use otsuki::geodesic::{sample_trajectory, solve_parameter};
use otsuki::geometry::{export_immersion_csv, frame, immersion, weingarten_diag};

fn main() -> otsuki::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "surface.csv".into());
    let traj = sample_trajectory(&solve_parameter(2, 3)?, 1024)?;

    let x = immersion(0.7, 3.1, &traj)?;
    let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    println!("|x(0.7, 3.1)| = {norm:.15} (the surface lies on the unit sphere)");

    let worst = (0..50)
        .map(|k| frame(0.1 * k as f64, 0.37 * k as f64, &traj).map(|f| f.orthonormality_defect()))
        .collect::<otsuki::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("frame orthonormality defect over 50 points: {worst:.2e}");

    let (a11, a22) = weingarten_diag(2.0, &traj)?;
    println!("Weingarten diagonal at t = 2: ({a11:.6}, {a22:.6})");

    export_immersion_csv(&traj, 96, 400, BufWriter::new(File::create(&path)?))?;
    println!("wrote 96 x 400 points to {path}");
    Ok(())
}
