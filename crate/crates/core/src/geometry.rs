//! The bipolar surface in `S⁴` built from a geodesic, its adapted frame and
//! the coefficient data of the separated Jacobi operator.
//!
//! Normal fields are written `f₁ n₁ + f₂ n₂`. A mode `l` in the circle
//! variable `α` enters as `(h₁ cos lα, h₂ sin lα)` or `(-h₁ sin lα, h₂ cos lα)`
//! and the pair `(h₁, h₂)` then solves
//! `-(p h')' + Q_l h = λ h` with `p = 4π² cos²φ`.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geodesic::{GeodesicState, Trajectory};
use crate::spectral::{Boundary, SlSystem, Sym2};

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;
const EIGHT_PI_SQ: f64 = 8.0 * PI * PI;

pub type Vec5 = [f64; 5];

fn dot5(a: &Vec5, b: &Vec5) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Point of the surface for a given geodesic state.
pub fn immersion_at(alpha: f64, s: &GeodesicState) -> Vec5 {
    let (sa, ca) = alpha.sin_cos();
    let (st, ct) = s.theta.sin_cos();
    let (sp, cp) = s.phi.sin_cos();
    [ca * cp * st, sa * cp * st, ca * cp * ct, sa * cp * ct, sp]
}

/// Point `x(α, t)` for `t ∈ [0, t₀)`.
pub fn immersion(alpha: f64, t: f64, traj: &Trajectory) -> Result<Vec5> {
    Ok(immersion_at(alpha, &traj.evaluate_extended(t)?))
}

/// Orthonormal frame of `R⁵` along the surface: position `N`, tangents
/// `e₁, e₂` and normals `n₁, n₂` (tangent to `S⁴`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePoint {
    pub n: Vec5,
    pub e1: Vec5,
    pub e2: Vec5,
    pub n1: Vec5,
    pub n2: Vec5,
}

impl FramePoint {
    pub fn vectors(&self) -> [Vec5; 5] {
        [self.n, self.e1, self.e2, self.n1, self.n2]
    }

    /// `max |⟨v_i, v_j⟩ - δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = self.vectors();
        let mut worst = 0.0f64;
        for i in 0..5 {
            for j in 0..5 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot5(&v[i], &v[j]) - target).abs());
            }
        }
        worst
    }
}

pub fn frame_at(alpha: f64, s: &GeodesicState) -> FramePoint {
    let (sa, ca) = alpha.sin_cos();
    let (st, ct) = s.theta.sin_cos();
    let (sp, cp) = s.phi.sin_cos();
    let (pd, td) = (s.phidot, s.thetadot);
    let k = 2.0 * PI * cp;
    let u = -sp * st * pd + cp * ct * td;
    let v = -sp * ct * pd - cp * st * td;
    let w1 = ct * pd + st * sp * cp * td;
    let w2 = st * pd - ct * sp * cp * td;
    FramePoint {
        n: immersion_at(alpha, s),
        e1: [-sa * st, ca * st, -sa * ct, ca * ct, 0.0],
        e2: [k * ca * u, k * sa * u, k * ca * v, k * sa * v, k * cp * pd],
        n1: [sa * ct, -ca * ct, -sa * st, ca * st, 0.0],
        n2: [-k * ca * w1, -k * sa * w1, k * ca * w2, k * sa * w2, k * cp * cp * td],
    }
}

pub fn frame(alpha: f64, t: f64, traj: &Trajectory) -> Result<FramePoint> {
    Ok(frame_at(alpha, &traj.evaluate_extended(t)?))
}

/// Diagonal `(Ã₁₁, Ã₂₂)` of the Simons operator in the basis `n₁, n₂`.
pub fn weingarten_at(s: &GeodesicState) -> (f64, f64) {
    let a11 = EIGHT_PI_SQ * s.phi.cos().powi(2) * s.thetadot * s.thetadot;
    (a11, s.phi.sin().powi(2) * a11)
}

pub fn weingarten_diag(t: f64, traj: &Trajectory) -> Result<(f64, f64)> {
    Ok(weingarten_at(&traj.evaluate_extended(t)?))
}

/// `p(t) = 4π² cos²φ`.
pub fn weight_at(s: &GeodesicState) -> f64 {
    FOUR_PI_SQ * s.phi.cos().powi(2)
}

/// `Q_l(t)`, with the curvature term `-2` folded into the diagonal.
pub fn potential_at(l: u32, s: &GeodesicState) -> Sym2 {
    let c2 = s.phi.cos().powi(2);
    let s2 = s.phi.sin().powi(2);
    let l = l as f64;
    let td2 = s.thetadot * s.thetadot;
    let common = l * l / c2 + FOUR_PI_SQ * s.phidot * s.phidot - 2.0;
    Sym2 {
        a11: common - EIGHT_PI_SQ * c2 * td2,
        a12: -4.0 * PI * l * s.phidot / s.phi.cos(),
        a22: common - EIGHT_PI_SQ * s2 * c2 * td2,
    }
}

/// Ghost nodes kept on each side of `[0, T]` for centred differences.
const GHOSTS: usize = 2;

/// `p(t)` and `Q_l(t)` on the trajectory grid over `[0, T]`.
#[derive(Debug, Clone)]
pub struct SeparatedCoefficients {
    pub l: u32,
    step: f64,
    /// Samples at nodes `-2..=n+2`.
    weight: Vec<f64>,
    potential: Vec<Sym2>,
}

pub fn separated_coefficients(l: u32, traj: &Trajectory) -> SeparatedCoefficients {
    let n = traj.n() as i64;
    let g = GHOSTS as i64;
    let states: Vec<GeodesicState> = (-g..=n + g).map(|i| traj.node_extended(i)).collect();
    SeparatedCoefficients {
        l,
        step: traj.step(),
        weight: states.iter().map(weight_at).collect(),
        potential: states.iter().map(|s| potential_at(l, s)).collect(),
    }
}

impl SeparatedCoefficients {
    /// `p` at the `n + 1` grid nodes of `[0, T]`.
    pub fn weight(&self) -> &[f64] {
        &self.weight[GHOSTS..self.weight.len() - GHOSTS]
    }

    /// `Q_l` at the `n + 1` grid nodes of `[0, T]`.
    pub fn potential(&self) -> &[Sym2] {
        &self.potential[GHOSTS..self.potential.len() - GHOSTS]
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Largest coefficient magnitude, used to normalize residuals.
    pub fn scale(&self) -> f64 {
        let p = self.weight().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.potential().iter().fold(p, |m, q| m.max(q.max_abs()))
    }
}

/// `(h₁, h₂)` of a kernel field as a function of the geodesic state.
type SeparatedFn = fn(&GeodesicState) -> (f64, f64);

/// One of the nine normal projections of Killing fields, in separated form.
#[derive(Debug, Clone)]
pub struct KernelField {
    pub id: u8,
    pub l: u32,
    /// `true` for `(h₁ cos lα, h₂ sin lα)`, `false` for `(-h₁ sin lα, h₂ cos lα)`.
    pub cosine_form: bool,
    step: f64,
    /// Samples at nodes `-2..=n+2`.
    h1: Vec<f64>,
    h2: Vec<f64>,
    eval: SeparatedFn,
}

impl KernelField {
    pub fn h1(&self) -> &[f64] {
        &self.h1[GHOSTS..self.h1.len() - GHOSTS]
    }

    pub fn h2(&self) -> &[f64] {
        &self.h2[GHOSTS..self.h2.len() - GHOSTS]
    }

    /// `(h₁, h₂)` at an arbitrary state.
    pub fn separated(&self, s: &GeodesicState) -> (f64, f64) {
        (self.eval)(s)
    }

    /// Normal components `(f₁, f₂)` at `(α, state)`.
    pub fn normal_components(&self, alpha: f64, s: &GeodesicState) -> (f64, f64) {
        let (h1, h2) = (self.eval)(s);
        let (sl, cl) = (self.l as f64 * alpha).sin_cos();
        if self.cosine_form {
            (h1 * cl, h2 * sl)
        } else {
            (-h1 * sl, h2 * cl)
        }
    }
}

fn f_sin2theta(s: &GeodesicState) -> (f64, f64) {
    (s.phi.cos() * (2.0 * s.theta).sin(), 0.0)
}
fn f_cos2theta(s: &GeodesicState) -> (f64, f64) {
    (s.phi.cos() * (2.0 * s.theta).cos(), 0.0)
}
fn f_channel2(s: &GeodesicState) -> (f64, f64) {
    (0.0, 2.0 * PI * s.phi.cos().powi(2) * s.phidot)
}
fn f_cos_theta(s: &GeodesicState) -> (f64, f64) {
    let (sp, cp) = s.phi.sin_cos();
    let (st, ct) = s.theta.sin_cos();
    (sp * ct, 2.0 * PI * cp * (sp * ct * s.phidot + st * cp * s.thetadot))
}
fn f_sin_theta(s: &GeodesicState) -> (f64, f64) {
    let (sp, cp) = s.phi.sin_cos();
    let (st, ct) = s.theta.sin_cos();
    (sp * st, 2.0 * PI * cp * (sp * st * s.phidot - ct * cp * s.thetadot))
}
fn f_mode2(s: &GeodesicState) -> (f64, f64) {
    let cp = s.phi.cos();
    (cp, 2.0 * PI * cp * cp * s.phidot)
}

/// The nine Killing projections sampled on the trajectory grid.
pub fn kernel_fields(traj: &Trajectory) -> Vec<KernelField> {
    let table: [(u8, u32, bool, SeparatedFn); 9] = [
        (1, 0, true, f_sin2theta),
        (2, 0, true, f_cos2theta),
        (3, 0, false, f_channel2),
        (4, 1, false, f_cos_theta),
        (5, 1, true, f_cos_theta),
        (6, 1, false, f_sin_theta),
        (7, 1, true, f_sin_theta),
        (8, 2, false, f_mode2),
        (9, 2, true, f_mode2),
    ];
    let n = traj.n() as i64;
    let g = GHOSTS as i64;
    let states: Vec<GeodesicState> = (-g..=n + g).map(|i| traj.node_extended(i)).collect();
    table
        .into_iter()
        .map(|(id, l, cosine_form, eval)| {
            let (h1, h2) = states.iter().map(eval).unzip();
            KernelField { id, l, cosine_form, step: traj.step(), h1, h2, eval }
        })
        .collect()
}

/// Residual of a kernel field in its separated system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelResidual {
    /// `max |(-(p h')' + Q h)(t_i)|` over the grid, divided by
    /// `max coefficient · max |h|`.
    pub value: f64,
    /// Set when the grid has fewer than 256 steps.
    pub coarse_grid: bool,
}

fn d1(v: &[f64], i: usize, h: f64) -> f64 {
    (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h)
}

fn d2(v: &[f64], i: usize, h: f64) -> f64 {
    (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) / (12.0 * h * h)
}

/// Apply the separated operator at `λ = 0` with fourth-order centred
/// differences at every grid node of `[0, T]`.
pub fn kernel_residual(field: &KernelField, coeffs: &SeparatedCoefficients) -> Result<KernelResidual> {
    if field.l != coeffs.l {
        return Err(Error::Validation(format!(
            "field {} has l = {} but the coefficients are for l = {}",
            field.id, field.l, coeffs.l
        )));
    }
    if field.h1.len() != coeffs.weight.len() || (field.step - coeffs.step).abs() > 1e-15 * field.step {
        return Err(Error::Validation("field and coefficients live on different grids".into()));
    }
    let h = coeffs.step;
    let p = &coeffs.weight;
    let mut worst = 0.0f64;
    for i in GHOSTS..p.len() - GHOSTS {
        let dp = d1(p, i, h);
        let q = coeffs.potential[i];
        let r1 = -(p[i] * d2(&field.h1, i, h) + dp * d1(&field.h1, i, h)) + q.a11 * field.h1[i] + q.a12 * field.h2[i];
        let r2 = -(p[i] * d2(&field.h2, i, h) + dp * d1(&field.h2, i, h)) + q.a12 * field.h1[i] + q.a22 * field.h2[i];
        worst = worst.max(r1.abs()).max(r2.abs());
    }
    let size = field.h1().iter().chain(field.h2()).fold(0.0f64, |m, v| m.max(v.abs()));
    if !(size > 0.0) {
        return Err(Error::numerical(format!("kernel field {} vanishes on the grid", field.id), size));
    }
    Ok(KernelResidual {
        value: worst / (coeffs.scale() * size),
        coarse_grid: p.len() - 2 * GHOSTS - 1 < 256,
    })
}

/// Normal components `(⟨M x, n₁⟩, ⟨M x, n₂⟩)` of the Killing field `x ↦ M x`
/// generated by the rotation in the `(i, j)` plane.
pub fn killing_projection(i: usize, j: usize, alpha: f64, s: &GeodesicState) -> (f64, f64) {
    let f = frame_at(alpha, s);
    let mut v = [0.0; 5];
    v[i] = -f.n[j];
    v[j] = f.n[i];
    (dot5(&v, &f.n1), dot5(&v, &f.n2))
}

/// Rank data of the Killing projections compared with the nine listed
/// fields, on a set of sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanReport {
    pub killing_rank: usize,
    pub listed_rank: usize,
    pub combined_rank: usize,
}

/// Numerical ranks of the ten rotation generators' projections, the nine
/// listed fields, and both together, over `samples` points `(α, t)`.
pub fn killing_span(traj: &Trajectory, fields: &[KernelField], samples: usize) -> Result<SpanReport> {
    let t_max = traj.full_length().unwrap_or(2.0 * traj.half_period());
    let points: Vec<(f64, GeodesicState)> = (0..samples)
        .map(|k| {
            // Quasi-random points by golden-ratio stepping.
            let a = (k as f64 * 0.618_033_988_749_894_9).fract() * 2.0 * PI;
            let t = (k as f64 * 0.754_877_666_246_692_7).fract() * t_max;
            traj.evaluate_extended(t).map(|s| (a, s))
        })
        .collect::<Result<_>>()?;
    let rows = 2 * samples;
    let column = |f: &dyn Fn(f64, &GeodesicState) -> (f64, f64)| -> Vec<f64> {
        points
            .iter()
            .flat_map(|(a, s)| {
                let (x, y) = f(*a, s);
                [x, y]
            })
            .collect()
    };
    let mut killing = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            killing.push(column(&|a, s| killing_projection(i, j, a, s)));
        }
    }
    let listed: Vec<Vec<f64>> = fields.iter().map(|f| column(&|a, s| f.normal_components(a, s))).collect();
    let rank = |cols: &[Vec<f64>]| {
        let m = DMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r]);
        let sv = m.singular_values();
        let top = sv.max();
        sv.iter().filter(|&&x| x > 1e-9 * top).count()
    };
    let combined: Vec<Vec<f64>> = killing.iter().chain(listed.iter()).cloned().collect();
    Ok(SpanReport {
        killing_rank: rank(&killing),
        listed_rank: rank(&listed),
        combined_rank: rank(&combined),
    })
}

/// `(tr A^{n₁}, tr A^{n₂})` from fourth-order second differences of the
/// immersion with spacing `delta`.
pub fn mean_curvature_proxy(alpha: f64, t: f64, traj: &Trajectory, delta: f64) -> Result<(f64, f64)> {
    let s = traj.evaluate_extended(t)?;
    let f = frame_at(alpha, &s);
    let x_at = |a: f64, tt: f64| immersion_at(a, &traj.state_at(tt));
    let second = |g: &dyn Fn(f64) -> Vec5| -> Vec5 {
        let (m2, m1, z, p1, p2) = (g(-2.0 * delta), g(-delta), g(0.0), g(delta), g(2.0 * delta));
        std::array::from_fn(|k| (-m2[k] + 16.0 * m1[k] - 30.0 * z[k] + 16.0 * p1[k] - p2[k]) / (12.0 * delta * delta))
    };
    let x_aa = second(&|d| x_at(alpha + d, t));
    let x_tt = second(&|d| x_at(alpha, t + d));
    let c2 = s.phi.cos().powi(2);
    let tr = |n: &Vec5| dot5(&x_aa, n) / c2 + FOUR_PI_SQ * c2 * dot5(&x_tt, n);
    Ok((tr(&f.n1), tr(&f.n2)))
}

fn extended_states(traj: &Trajectory, half_periods: usize) -> impl Iterator<Item = GeodesicState> + '_ {
    let end = (half_periods * traj.n()) as i64;
    (0..=end).map(move |i| traj.node_extended(i))
}

/// The 2×2 system for mode `l` over `half_periods` half-periods.
pub fn jacobi_system(l: u32, traj: &Trajectory, boundary: Boundary, half_periods: usize) -> Result<SlSystem> {
    let (w, q) = extended_states(traj, half_periods).map(|s| (weight_at(&s), potential_at(l, &s))).unzip();
    SlSystem::matrix(half_periods as f64 * traj.half_period(), boundary, w, q)
}

/// Which decoupled component of the `l = 0` system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    First,
    Second,
}

/// Scalar `l = 0` problem for one channel.
pub fn l0_channel(channel: Channel, traj: &Trajectory, boundary: Boundary, half_periods: usize) -> Result<SlSystem> {
    let (w, q) = extended_states(traj, half_periods)
        .map(|s| {
            let pot = potential_at(0, &s);
            (weight_at(&s), if channel == Channel::First { pot.a11 } else { pot.a22 })
        })
        .unzip();
    SlSystem::scalar(half_periods as f64 * traj.half_period(), boundary, w, q)
}

/// Scalar problem `-(p h')' + (l²/cos²φ) h = λ h` for mode `l` of the
/// Laplace-Beltrami operator.
pub fn laplace_coefficients(l: u32, traj: &Trajectory, boundary: Boundary, half_periods: usize) -> Result<SlSystem> {
    let l2 = (l * l) as f64;
    let (w, q) = extended_states(traj, half_periods)
        .map(|s| (weight_at(&s), l2 / s.phi.cos().powi(2)))
        .unzip();
    SlSystem::scalar(half_periods as f64 * traj.half_period(), boundary, w, q)
}

/// Write `alpha,t,x1..x5` rows on an `n_alpha × n_t` grid covering the
/// closed surface (two half-periods when the rotation number is unknown).
pub fn export_immersion_csv<W: Write>(traj: &Trajectory, n_alpha: usize, n_t: usize, out: W) -> Result<()> {
    let t_max = traj.full_length().unwrap_or(2.0 * traj.half_period());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "t", "x1", "x2", "x3", "x4", "x5"])?;
    for j in 0..n_t {
        let t = t_max * j as f64 / n_t as f64;
        let s = traj.evaluate_extended(t)?;
        for i in 0..n_alpha {
            let a = 2.0 * PI * i as f64 / n_alpha as f64;
            let x = immersion_at(a, &s);
            let mut row = vec![crate::json17::format(a), crate::json17::format(t)];
            row.extend(x.iter().map(|v| crate::json17::format(*v)));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::{sample_trajectory, solve_parameter, GeodesicFamily};

    #[test]
    fn clifford_point_and_weingarten() {
        let traj = sample_trajectory(&GeodesicFamily::clifford(), 128).unwrap();
        let x = immersion_at(0.0, &traj.node(0));
        assert_eq!(x, [0.0, 0.0, 1.0, 0.0, 0.0]);
        let (a11, a22) = weingarten_at(&traj.node(5));
        assert!((a11 - 2.0).abs() < 1e-12 && a22 == 0.0);
    }

    #[test]
    fn clifford_potential_is_constant() {
        let traj = sample_trajectory(&GeodesicFamily::clifford(), 128).unwrap();
        for l in 0..4 {
            let c = separated_coefficients(l, &traj);
            let l2 = (l * l) as f64;
            for q in c.potential() {
                assert!((q.a11 - (l2 - 4.0)).abs() < 1e-12);
                assert!((q.a22 - (l2 - 2.0)).abs() < 1e-12);
                assert_eq!(q.a12, 0.0);
            }
        }
    }

    #[test]
    fn l_mismatch_rejected() {
        let traj = sample_trajectory(&solve_parameter(2, 3).unwrap(), 256).unwrap();
        let fields = kernel_fields(&traj);
        let c = separated_coefficients(1, &traj);
        assert!(kernel_residual(&fields[0], &c).is_err());
        assert!(kernel_residual(&fields[3], &c).is_ok());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let traj = sample_trajectory(&solve_parameter(2, 3).unwrap(), 128).unwrap();
        let mut buf = Vec::new();
        export_immersion_csv(&traj, 4, 3, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "alpha,t,x1,x2,x3,x4,x5");
        assert_eq!(lines.len(), 13);
    }
}
