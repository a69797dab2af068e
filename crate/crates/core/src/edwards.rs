//! Negative and zero counts of ω-twisted problems from a Hermitian form on
//! the boundary values of solutions at λ = 0.
//!
//! With `ψ_i` the solution of `−(p h′)′ + Q_l h = 0` on `[0, T]` whose
//! boundary values `(h(0), h(T))` are the unit vector `e_i`, the form has
//! Gram entries `a_ij = ⟨ψ_i, p ψ_j′⟩|₀ᵀ`. Restricted to the boundary values
//! allowed by the twist `ω` it gives the twisted counts from the Dirichlet
//! negative count.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geodesic::{GeodesicFamily, GeodesicState, Trajectory};
use crate::geometry::{self, potential_at};
use crate::ode::{dopri5, Tolerance};
use crate::spectral::{spectrum_below, Boundary};

/// The Dirichlet spectrum must stay this many `τ_zero` away from 0.
pub const APPLICABILITY_FACTOR: f64 = 10.0;
/// Eigenvalues of `A_l(ω)` below this fraction of its norm are zero.
pub const FORM_TOLERANCE: f64 = 1e-7;
/// `Re ω` this close to a root of `P_l` carries a zero mode.
pub const ROOT_MATCH: f64 = 1e-6;
/// Largest accepted asymmetry of the Gram data, relative to its size.
pub const SYMMETRY_TOLERANCE: f64 = 1e-6;
/// Largest accepted condition number of the boundary matching.
pub const MAX_CONDITION: f64 = 1e10;
/// Dirichlet eigenvalues are computed below this cutoff.
const DIRICHLET_CUTOFF: f64 = 4.0;

fn integration_tolerance() -> Tolerance {
    Tolerance { rel: 1e-11, abs: 1e-13, max_steps: 2_000_000 }
}

/// Negative Dirichlet eigenvalues on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCount {
    pub l: u32,
    pub neg: usize,
    /// Smallest `|μ_k|`, capped at the cutoff.
    pub margin: f64,
    pub eigenvalues: Vec<f64>,
}

impl DirichletCount {
    pub fn applicable(&self, tau: f64) -> bool {
        self.margin > APPLICABILITY_FACTOR * tau
    }
}

pub fn dirichlet_negative_count(l: u32, traj: &Trajectory, cells: usize, tau: f64) -> Result<DirichletCount> {
    let sys = geometry::jacobi_system(l, traj, Boundary::Dirichlet, 1)?;
    let s = spectrum_below(&sys, DIRICHLET_CUTOFF, cells, tau)?;
    let margin = s.eigenvalues.iter().map(|m| m.abs()).fold(DIRICHLET_CUTOFF, f64::min);
    if s.zero > 0 || margin <= tau {
        return Err(Error::Inapplicable(format!(
            "Dirichlet problem for l = {l} has an eigenvalue within {tau:e} of 0 (margin {margin:.3e})"
        )));
    }
    Ok(DirichletCount { l, neg: s.neg, margin, eigenvalues: s.eigenvalues })
}

/// Geodesic state followed by the 4×4 fundamental matrix of
/// `h′ = w / p, w′ = Q_l h`, row-major.
const STATE: usize = 18;

fn augmented_rhs(family: &GeodesicFamily, l: u32) -> impl Fn(f64, &[f64; STATE]) -> [f64; STATE] + '_ {
    move |_, y| {
        let (phi, phidot) = (y[0], y[1]);
        let state = GeodesicState { phi, phidot, theta: 0.0, thetadot: family.theta_dot(phi) };
        let inv_p = 1.0 / geometry::weight_at(&state);
        let q = potential_at(l, &state);
        let mut dy = [0.0; STATE];
        dy[0] = phidot;
        dy[1] = family.phi_ddot(phi, phidot);
        let m = |r: usize, c: usize| y[2 + 4 * r + c];
        for c in 0..4 {
            dy[2 + c] = inv_p * m(2, c);
            dy[2 + 4 + c] = inv_p * m(3, c);
            dy[2 + 8 + c] = q.a11 * m(0, c) + q.a12 * m(1, c);
            dy[2 + 12 + c] = q.a12 * m(0, c) + q.a22 * m(1, c);
        }
        dy
    }
}

/// Fundamental matrix `Φ(t)` with `Φ(0) = I`, acting on `(h, p h′)`.
fn fundamental(family: &GeodesicFamily, l: u32, t: f64) -> Result<[[f64; 4]; 4]> {
    let mut y0 = [0.0; STATE];
    y0[0] = family.b;
    for i in 0..4 {
        y0[2 + 5 * i] = 1.0;
    }
    let y = dopri5(augmented_rhs(family, l), 0.0, y0, t, integration_tolerance())?;
    let mut phi = [[0.0; 4]; 4];
    for (r, row) in phi.iter_mut().enumerate() {
        row.copy_from_slice(&y[2 + 4 * r..6 + 4 * r]);
    }
    Ok(phi)
}

fn apply4(m: &[[f64; 4]; 4], x: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|r| (0..4).map(|c| m[r][c] * x[c]).sum())
}

/// The four solutions `ψ_i` with boundary values `e_i`.
#[derive(Debug, Clone)]
pub struct BoundarySolutions {
    pub l: u32,
    family: GeodesicFamily,
    /// `(h(0), p h′(0))` of each `ψ_i`.
    start: [[f64; 4]; 4],
    /// `(h(T), p h′(T))` of each `ψ_i`.
    end: [[f64; 4]; 4],
    condition: f64,
}

/// Build `ψ_1..ψ_4` by integrating from `t = 0` and matching `h(T)`.
/// The caller is expected to have checked the Dirichlet spectrum; a
/// singular matching system is reported as a numerical error.
pub fn boundary_solutions(l: u32, traj: &Trajectory) -> Result<BoundarySolutions> {
    let family = *traj.family();
    let t_half = family.half_period;
    let phi = fundamental(&family, l, t_half)?;
    let block = |r0: usize, c0: usize| Matrix2::new(phi[r0][c0], phi[r0][c0 + 1], phi[r0 + 1][c0], phi[r0 + 1][c0 + 1]);
    let (hh, hw) = (block(0, 0), block(0, 2));
    let sv = hw.singular_values();
    let condition = sv.max() / sv.min();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::numerical("boundary matching for the λ = 0 solutions is singular", condition));
    }
    let lu = hw.lu();
    let mut start = [[0.0; 4]; 4];
    let mut end = [[0.0; 4]; 4];
    for i in 0..4 {
        let mut v0 = Vector2::zeros();
        let mut vt = Vector2::zeros();
        if i < 2 {
            v0[i] = 1.0;
        } else {
            vt[i - 2] = 1.0;
        }
        let w0 = lu
            .solve(&(vt - hh * v0))
            .ok_or_else(|| Error::numerical("boundary matching solve failed", condition))?;
        start[i] = [v0[0], v0[1], w0[0], w0[1]];
        end[i] = apply4(&phi, &start[i]);
    }
    Ok(BoundarySolutions { l, family, start, end, condition })
}

impl BoundarySolutions {
    /// Condition number of the 2×2 matching block.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `(h(0), h(T))` of each `ψ_i`; reproduces the unit vectors.
    pub fn boundary_values(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| [self.start[i][0], self.start[i][1], self.end[i][0], self.end[i][1]])
    }

    /// `h = ψ_i(t)` for `t ∈ [0, T]`.
    pub fn evaluate(&self, t: f64) -> Result<[[f64; 2]; 4]> {
        if !(0.0..=self.family.half_period).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", self.family.half_period)));
        }
        let phi = fundamental(&self.family, self.l, t)?;
        Ok(std::array::from_fn(|i| {
            let y = apply4(&phi, &self.start[i]);
            [y[0], y[1]]
        }))
    }

    /// Gram entries from the boundary terms; the integral term vanishes
    /// because each `ψ_j` solves the system at λ = 0.
    pub fn gram(&self) -> Result<GramMatrix> {
        let mut raw = [[0.0; 4]; 4];
        for (i, row) in raw.iter_mut().enumerate() {
            for (j, a) in row.iter_mut().enumerate() {
                *a = if i < 2 { -self.start[j][2 + i] } else { self.end[j][i] };
            }
        }
        GramMatrix::from_raw(raw)
    }
}

/// σ = (13)(24): the coefficients are even under `t ↦ T − t`.
const SIGMA: [usize; 4] = [2, 3, 0, 1];

/// Symmetrized Gram entries `a_ij` with the defects seen before averaging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramMatrix {
    pub a: [[f64; 4]; 4],
    /// `max |a_ij − a_ji|` relative to `max |a_ij|`.
    pub symmetry_defect: f64,
    /// `max |a_ij − a_σ(i)σ(j)|` relative to `max |a_ij|`.
    pub sigma_defect: f64,
}

impl GramMatrix {
    pub fn from_raw(raw: [[f64; 4]; 4]) -> Result<Self> {
        let scale = raw.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let mut symmetry_defect = 0.0f64;
        let mut sigma_defect = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                symmetry_defect = symmetry_defect.max((raw[i][j] - raw[j][i]).abs() / scale);
                sigma_defect = sigma_defect.max((raw[i][j] - raw[SIGMA[i]][SIGMA[j]]).abs() / scale);
            }
        }
        let worst = symmetry_defect.max(sigma_defect);
        if worst > SYMMETRY_TOLERANCE {
            return Err(Error::numerical("Gram data violate the symmetries of the boundary form", worst));
        }
        let a = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let (si, sj) = (SIGMA[i], SIGMA[j]);
                0.25 * (raw[i][j] + raw[j][i] + raw[si][sj] + raw[sj][si])
            })
        });
        Ok(GramMatrix { a, symmetry_defect, sigma_defect })
    }

    /// Gram matrix of the form on `Π_ω = span{e₁ + ω e₃, e₂ − ω e₄}`.
    pub fn twisted_form(&self, omega: Complex64) -> [[Complex64; 2]; 2] {
        let a = &self.a;
        let re2 = omega + omega.conj();
        let im = omega - omega.conj();
        [
            [Complex64::from(2.0 * a[0][0]) + re2 * a[0][2], im * a[0][3]],
            [-im * a[0][3], Complex64::from(2.0 * a[1][1]) - re2 * a[1][3]],
        ]
    }

    /// `P_l(s) = det A_l(ω)` at `s = Re ω`, using `|ω − ω̄|² = 4(1 − s²)`.
    pub fn det_polynomial(&self) -> Result<DetPolynomial> {
        let a = &self.a;
        let (a11, a13, a14, a22, a24) = (a[0][0], a[0][2], a[0][3], a[1][1], a[1][3]);
        let coeffs = [
            4.0 * (a11 * a22 - a14 * a14),
            4.0 * (a13 * a22 - a11 * a24),
            4.0 * (a14 * a14 - a13 * a24),
        ];
        DetPolynomial::new(coeffs)
    }
}

pub fn gram_matrix(l: u32, traj: &Trajectory) -> Result<GramMatrix> {
    boundary_solutions(l, traj)?.gram()
}

/// `P(s) = c₀ + c₁ s + c₂ s²` and its real roots, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct DetPolynomial {
    pub coeffs: [f64; 3],
    pub roots: Vec<f64>,
    /// True when the roots are a complex-conjugate pair.
    pub complex_pair: bool,
}

impl DetPolynomial {
    pub fn new(coeffs: [f64; 3]) -> Result<Self> {
        let [c0, c1, c2] = coeffs;
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let negligible = |c: f64| c.abs() <= 1e-13 * scale;
        if scale == 0.0 || (negligible(c1) && negligible(c2)) {
            return Err(Error::numerical("determinant polynomial is constant", scale));
        }
        let (roots, complex_pair) = if negligible(c2) {
            (vec![-c0 / c1], false)
        } else {
            let disc = c1 * c1 - 4.0 * c2 * c0;
            if disc < 0.0 {
                (Vec::new(), true)
            } else {
                // Cancellation-free pair.
                let w = -0.5 * (c1 + c1.signum() * disc.sqrt());
                let mut r = if w == 0.0 { vec![0.0, 0.0] } else { vec![w / c2, c0 / w] };
                r.sort_by(f64::total_cmp);
                (r, false)
            }
        };
        Ok(DetPolynomial { coeffs, roots, complex_pair })
    }

    pub fn eval(&self, s: f64) -> f64 {
        let [c0, c1, c2] = self.coeffs;
        c0 + s * (c1 + s * c2)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

/// `ω = ε^r` with `ε = e^{iπ/q}`.
pub fn root_of_unity(q: u32, r: u32) -> Complex64 {
    Complex64::from_polar(1.0, PI * r as f64 / q as f64)
}

/// Eigenvalues of a 2×2 Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &[[Complex64; 2]; 2]) -> [f64; 2] {
    let (a, d) = (m[0][0].re, m[1][1].re);
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + m[0][1].norm_sqr()).sqrt();
    [mean - radius, mean + radius]
}

/// Boundary-form data for one `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFormData {
    pub l: u32,
    #[serde(with = "crate::json17")]
    pub b: f64,
    #[serde(with = "crate::json17::mat4")]
    pub a: [[f64; 4]; 4],
    #[serde(rename = "P_coeffs", with = "crate::json17::vec")]
    pub p_coeffs: Vec<f64>,
    #[serde(with = "crate::json17::vec")]
    pub roots: Vec<f64>,
    pub complex_roots: bool,
    pub dirichlet_neg: usize,
    #[serde(with = "crate::json17")]
    pub applicability_margin: f64,
    #[serde(with = "crate::json17")]
    pub symmetry_defect: f64,
    #[serde(with = "crate::json17")]
    pub sigma_defect: f64,
}

impl BoundaryFormData {
    pub fn gram(&self) -> GramMatrix {
        GramMatrix { a: self.a, symmetry_defect: self.symmetry_defect, sigma_defect: self.sigma_defect }
    }

    pub fn polynomial(&self) -> Result<DetPolynomial> {
        DetPolynomial::new([self.p_coeffs[0], self.p_coeffs[1], self.p_coeffs[2]])
    }

    pub fn twisted_form(&self, omega: Complex64) -> [[Complex64; 2]; 2] {
        self.gram().twisted_form(omega)
    }

    /// Smallest and largest real root, when both exist.
    pub fn root_pair(&self) -> Option<(f64, f64)> {
        match self.roots.as_slice() {
            [s1, s2] => Some((*s1, *s2)),
            _ => None,
        }
    }
}

/// Dirichlet count, λ = 0 solutions and the boundary form for one `l`.
pub fn boundary_form(l: u32, traj: &Trajectory, cells: usize, tau: f64) -> Result<BoundaryFormData> {
    let dirichlet = dirichlet_negative_count(l, traj, cells, tau)?;
    if !dirichlet.applicable(tau) {
        return Err(Error::Inapplicable(format!(
            "Dirichlet margin {:.3e} for l = {l} is below {APPLICABILITY_FACTOR}·τ_zero",
            dirichlet.margin
        )));
    }
    let gram = gram_matrix(l, traj)?;
    let poly = gram.det_polynomial()?;
    Ok(BoundaryFormData {
        l,
        b: traj.family().b,
        a: gram.a,
        p_coeffs: poly.coeffs.to_vec(),
        roots: poly.roots,
        complex_roots: poly.complex_pair,
        dirichlet_neg: dirichlet.neg,
        applicability_margin: dirichlet.margin,
        symmetry_defect: gram.symmetry_defect,
        sigma_defect: gram.sigma_defect,
    })
}

/// Counts for the `ε^r`-twisted problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedCount {
    pub l: u32,
    pub omega_index: u32,
    pub neg: usize,
    pub zero: usize,
    /// Index of the restricted form.
    pub ind: usize,
    /// Nullity of the restricted form.
    pub nul: usize,
}

pub fn twisted_counts(data: &BoundaryFormData, q: u32, r: u32) -> Result<TwistedCount> {
    let omega = root_of_unity(q, r);
    let eig = hermitian_eigenvalues(&data.twisted_form(omega));
    let norm = eig[0].abs().max(eig[1].abs());
    let tol = FORM_TOLERANCE * norm;
    let on_root = data.roots.iter().any(|s| (s - omega.re).abs() <= ROOT_MATCH);
    let (ind, nul) = if on_root {
        // The eigenvalue nearest 0 is the zero mode; the other keeps its sign
        // unless it is zero too (double root).
        let other = if eig[0].abs() <= eig[1].abs() { eig[1] } else { eig[0] };
        if other.abs() <= tol {
            (0, 2)
        } else {
            (usize::from(other < 0.0), 1)
        }
    } else {
        if let Some(e) = eig.iter().find(|e| e.abs() <= tol) {
            return Err(Error::Ambiguous(format!(
                "A_{}(ε^{r}) has eigenvalue {e:.3e} but Re ω = {:.12} is not a root of P_{}",
                data.l, omega.re, data.l
            )));
        }
        (eig.iter().filter(|&&e| e < 0.0).count(), 0)
    };
    Ok(TwistedCount { l: data.l, omega_index: r, neg: data.dirichlet_neg + ind, zero: nul, ind, nul })
}

/// Twisted counts summed over all `2q`-th roots of unity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootAggregate {
    pub l: u32,
    pub per_root: Vec<TwistedCount>,
    pub neg: usize,
    pub zero: usize,
    /// For even `q`: sums over even `r` (problems `t₀/2`-periodic on the
    /// full geodesic) and odd `r` (`t₀/2`-antiperiodic).
    pub even: Option<(usize, usize)>,
    pub odd: Option<(usize, usize)>,
}

impl RootAggregate {
    pub fn sum_ind(&self) -> usize {
        self.per_root.iter().map(|c| c.ind).sum()
    }

    pub fn sum_nul(&self) -> usize {
        self.per_root.iter().map(|c| c.nul).sum()
    }
}

pub fn aggregate_roots(data: &BoundaryFormData, q: u32) -> Result<RootAggregate> {
    let per_root = (0..2 * q).map(|r| twisted_counts(data, q, r)).collect::<Result<Vec<_>>>()?;
    let sum = |parity: Option<u32>| {
        per_root
            .iter()
            .filter(|c| parity.is_none_or(|p| c.omega_index % 2 == p))
            .fold((0, 0), |(n, z), c| (n + c.neg, z + c.zero))
    };
    let (neg, zero) = sum(None);
    let (even, odd) = if q.is_multiple_of(2) { (Some(sum(Some(0))), Some(sum(Some(1)))) } else { (None, None) };
    Ok(RootAggregate { l: data.l, per_root, neg, zero, even, odd })
}
