//! Spectral facts about a specific surface that can be checked directly.
//!
//! Meshes are given as `cells` per half-period `T`; the trajectory grid must
//! be a multiple of `4·cells` so both Richardson meshes see exact samples.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geodesic::{RotationNumber, Trajectory};
use crate::geometry::{self, Channel};

use super::{count_signs, spectrum_with_eigenfunctions, Boundary};

fn check_mesh(traj: &Trajectory, cells: usize) -> Result<()> {
    if !traj.n().is_multiple_of(4 * cells) {
        return Err(Error::Validation(format!(
            "trajectory grid of {} steps cannot carry {cells} cells per half-period",
            traj.n()
        )));
    }
    Ok(())
}

/// Two lowest eigenvalues of the antiperiodic channel-2 problem on `[0, T]`
/// and how well the second eigenfunction matches `2π cos²φ φ̇`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiperiodicCheck {
    pub lambda1: f64,
    pub lambda2: f64,
    /// `|⟨u, v⟩| / (‖u‖ ‖v‖)` between the eigenfunction and the field.
    pub correlation: f64,
}

impl AntiperiodicCheck {
    pub fn holds(&self, tau: f64) -> bool {
        self.lambda1 < -tau && self.lambda2.abs() <= tau && self.correlation > 0.999
    }
}

pub fn antiperiodic_check_l0(traj: &Trajectory, cells: usize, tau: f64) -> Result<AntiperiodicCheck> {
    if traj.family().is_clifford() {
        return Err(Error::Domain("the antiperiodic check needs b != 0".into()));
    }
    check_mesh(traj, cells)?;
    let sys = geometry::l0_channel(Channel::Second, traj, Boundary::Antiperiodic, 1)?;
    let s = spectrum_with_eigenfunctions(&sys, 1.0, cells, tau)?;
    if s.eigenvalues.len() < 2 {
        return Err(Error::numerical("fewer than two antiperiodic eigenvalues below 1", s.eigenvalues.len() as f64));
    }
    let u = s.component(1, 0).expect("eigenfunctions requested");
    let stride = (traj.n() / (2 * cells)) as i64;
    let v: Vec<f64> = (0..u.len() as i64)
        .map(|i| {
            let st = traj.node_extended(i * stride);
            2.0 * std::f64::consts::PI * st.phi.cos().powi(2) * st.phidot
        })
        .collect();
    let inner: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * *b).sum();
    let nu = u.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let nv = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    Ok(AntiperiodicCheck {
        lambda1: s.eigenvalues[0],
        lambda2: s.eigenvalues[1],
        correlation: inner.norm() / (nu * nv),
    })
}

/// Laplace eigenvalues below 2 on the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralIndex {
    /// `(l, count)` per Fourier mode, before the factor 2 for `l ≥ 1`.
    pub per_l: Vec<(u32, usize)>,
    pub total: usize,
}

/// Closed-form count of Laplace-Beltrami eigenvalues below 2.
pub fn spectral_index_formula(rotation: RotationNumber) -> usize {
    let (p, q) = (rotation.p as usize, rotation.q as usize);
    if rotation.q_is_even() {
        q + 2 * p - 2
    } else {
        2 * q + 4 * p - 2
    }
}

/// Count Laplace-Beltrami eigenvalues below 2. Modes `l ≥ 1` count twice;
/// for even `q` only functions invariant under `(α, t) ↦ (α + π, t + t₀/2)`
/// are kept. Eigenvalues equal to 2 (within `tau`) are not counted.
pub fn spectral_index(rotation: RotationNumber, traj: &Trajectory, cells: usize, tau: f64) -> Result<SpectralIndex> {
    check_mesh(traj, cells)?;
    let q = rotation.q as usize;
    let mut per_l = Vec::new();
    let mut total = 0;
    // The potential l²/cos²φ is at least l², so modes with l² > 2 add nothing.
    for l in 0u32.. {
        if (l * l) as f64 > 2.0 {
            break;
        }
        let (boundary, half_periods) = if rotation.q_is_even() {
            (if l % 2 == 0 { Boundary::Periodic } else { Boundary::Antiperiodic }, q)
        } else {
            (Boundary::Periodic, 2 * q)
        };
        let sys = geometry::laplace_coefficients(l, traj, boundary, half_periods)?.shifted(2.0);
        let below = count_signs(&sys, cells * half_periods, tau)?.neg;
        per_l.push((l, below));
        total += if l == 0 { below } else { 2 * below };
    }
    Ok(SpectralIndex { per_l, total })
}

/// For `l ≥ 3`: `Q_l` is positive definite along the geodesic and the
/// periodic problem has no eigenvalue below 0.
pub fn verify_high_l_positive(l: u32, traj: &Trajectory, cells: usize) -> Result<bool> {
    if l < 3 {
        return Err(Error::Validation(format!("positivity is only claimed for l >= 3, got {l}")));
    }
    check_mesh(traj, cells)?;
    let coeffs = geometry::separated_coefficients(l, traj);
    if !coeffs.potential().iter().all(|q| q.is_positive_definite()) {
        return Ok(false);
    }
    let half_periods = traj.family().rotation.map_or(2, |r| 2 * r.q as usize);
    let sys = geometry::jacobi_system(l, traj, Boundary::Periodic, half_periods)?;
    let op = super::discretize(&sys, cells * half_periods)?;
    Ok(op.count_below(0.0) == 0)
}
