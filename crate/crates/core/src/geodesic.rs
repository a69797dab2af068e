//! Closed geodesics of the metric `E dφ² + G dθ²` with `E = 4π² cos²φ`,
//! `G = 4π² cos⁴φ` on the sphere minus its poles.
//!
//! A geodesic is started at its lowest latitude `φ(0) = b < 0` with
//! `φ̇(0) = 0`, `θ(0) = 0` and is parametrized by arc length. It oscillates
//! between `b` and `-b`; `T(b)` is the time between the two turning points
//! and `Ξ(b) = θ(T)` the longitude gained meanwhile. The geodesic closes
//! exactly when `Ξ(b) = (p/q)π`, and then its length is `2qT`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::rk4_step;
use crate::quadrature;
use crate::roots;

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

/// `√2 π²`, the half-period of the degenerate (Clifford) geodesic `b = 0`.
pub const CLIFFORD_HALF_PERIOD: f64 = SQRT_2 * PI * PI;
/// `(√2/2) π`, the rotation angle of the degenerate geodesic.
pub const CLIFFORD_ROTATION: f64 = SQRT_2 * FRAC_PI_2;

/// Tolerance on `|Ξ(b) - pπ/q|` accepted from [`solve_parameter`].
pub const ROOT_TOLERANCE: f64 = 1e-10;

/// Metric coefficients `(E, G)` at latitude `phi`.
pub fn metric_coefficients(phi: f64) -> Result<(f64, f64)> {
    if !(phi.abs() < FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "metric degenerates at |phi| >= pi/2 (phi = {phi})"
        )));
    }
    let c2 = phi.cos().powi(2);
    Ok((FOUR_PI_SQ * c2, FOUR_PI_SQ * c2 * c2))
}

fn check_b(b: f64) -> Result<()> {
    if b > -FRAC_PI_2 && b < 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("b must lie in (-pi/2, 0), got {b}")))
    }
}

// After sin φ = sin|b| sin u both integrands lose their inverse square-root
// endpoint singularities and become smooth, even functions of u.
fn desingularized(b: f64, f: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let s2 = b.sin().powi(2);
    let cb2 = b.cos().powi(2);
    let q = quadrature::integrate(
        |u| {
            let cos2_phi = cb2 + s2 * u.cos().powi(2);
            f(cos2_phi, cb2)
        },
        0.0,
        FRAC_PI_2,
        1e-15,
        1e-14,
        20_000,
    )?;
    Ok(2.0 * q.value)
}

/// `T(b) = ∫_b^{-b} 2π cos³φ dφ / √(cos⁴φ - cos⁴b)`.
pub fn half_period(b: f64) -> Result<f64> {
    check_b(b)?;
    desingularized(b, |c2, cb2| 2.0 * PI * c2 / (c2 + cb2).sqrt())
}

/// `Ξ(b) = cos²b ∫_b^{-b} dφ / (cos φ √(cos⁴φ - cos⁴b))`.
pub fn rotation_angle(b: f64) -> Result<f64> {
    check_b(b)?;
    desingularized(b, |c2, cb2| cb2 / (c2 * (c2 + cb2).sqrt()))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// An admissible rotation number `p/q`: coprime with `1/2 < p/q < √2/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RotationNumber {
    pub p: u32,
    pub q: u32,
}

impl RotationNumber {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::Validation("p and q must be positive".into()));
        }
        if gcd(p as u64, q as u64) != 1 {
            return Err(Error::Validation(format!("p = {p} and q = {q} are not coprime")));
        }
        let r = p as f64 / q as f64;
        if !(2 * p > q && r < SQRT_2 / 2.0) {
            return Err(Error::Validation(format!(
                "p/q must lie in (1/2, √2/2); got {p}/{q} = {r:.6}"
            )));
        }
        Ok(RotationNumber { p, q })
    }

    pub fn ratio(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn q_is_even(&self) -> bool {
        self.q.is_multiple_of(2)
    }

    /// Length `t₀ = 2qT` of the closed geodesic with half-period `half_period`.
    pub fn full_length(&self, half_period: f64) -> f64 {
        2.0 * self.q as f64 * half_period
    }
}

impl std::fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// The geodesic `γ_b` together with its conserved momentum and periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicFamily {
    pub b: f64,
    /// Clairaut constant `G θ̇ = 2π cos²b`.
    pub c: f64,
    #[serde(rename = "T")]
    pub half_period: f64,
    #[serde(rename = "Xi")]
    pub rotation_angle: f64,
    /// Present when the geodesic is known to close with rotation number p/q.
    pub rotation: Option<RotationNumber>,
}

impl GeodesicFamily {
    /// The geodesic starting at latitude `b`; `b = 0` gives the degenerate
    /// equator, used for calibration against closed forms.
    pub fn from_b(b: f64) -> Result<Self> {
        if b == 0.0 {
            return Ok(Self::clifford());
        }
        Ok(GeodesicFamily {
            b,
            c: 2.0 * PI * b.cos().powi(2),
            half_period: half_period(b)?,
            rotation_angle: rotation_angle(b)?,
            rotation: None,
        })
    }

    pub fn clifford() -> Self {
        GeodesicFamily {
            b: 0.0,
            c: 2.0 * PI,
            half_period: CLIFFORD_HALF_PERIOD,
            rotation_angle: CLIFFORD_ROTATION,
            rotation: None,
        }
    }

    pub fn with_rotation(mut self, rotation: RotationNumber) -> Self {
        self.rotation = Some(rotation);
        self
    }

    pub fn is_clifford(&self) -> bool {
        self.b == 0.0
    }

    /// Full length `t₀ = 2qT`, when the rotation number is known.
    pub fn full_length(&self) -> Option<f64> {
        self.rotation.map(|r| r.full_length(self.half_period))
    }

    /// `θ̇ = c / G(φ)`.
    pub fn theta_dot(&self, phi: f64) -> f64 {
        self.c / (FOUR_PI_SQ * phi.cos().powi(4))
    }

    /// `φ̈` from the second-order geodesic equation.
    pub fn phi_ddot(&self, phi: f64, phidot: f64) -> f64 {
        let td = self.theta_dot(phi);
        phi.tan() * phidot * phidot - 2.0 * phi.sin() * phi.cos() * td * td
    }

    /// Time derivative of [`Self::phi_ddot`] along the flow.
    fn phi_dddot(&self, phi: f64, phidot: f64) -> f64 {
        let td = self.theta_dot(phi);
        let acc = self.phi_ddot(phi, phidot);
        let d_phi = phidot * phidot / phi.cos().powi(2)
            - 2.0 * (2.0 * phi).cos() * td * td
            - 16.0 * phi.sin().powi(2) * td * td;
        let d_phidot = 2.0 * phi.tan() * phidot;
        d_phi * phidot + d_phidot * acc
    }
}

/// Solve `Ξ(b) = (p/q)π` for the unique `b ∈ (-π/2, 0)`.
pub fn solve_parameter(p: u32, q: u32) -> Result<GeodesicFamily> {
    let rotation = RotationNumber::new(p, q)?;
    let target = PI * rotation.ratio();
    let f = |b: f64| rotation_angle(b).map(|xi| xi - target);

    // Ξ increases from π/2 to (√2/2)π; walk the lower end towards -π/2
    // until it brackets the target.
    let hi = -1e-9;
    let mut gap = 0.25;
    let mut lo = -FRAC_PI_2 + gap;
    while f(lo)? > 0.0 {
        gap *= 0.25;
        if gap < 1e-14 {
            return Err(Error::numerical(
                format!("no bracket for Xi(b) = {target} (p/q = {rotation})"),
                gap,
            ));
        }
        lo = -FRAC_PI_2 + gap;
    }
    if f(hi)? < 0.0 {
        return Err(Error::numerical(format!("no bracket for p/q = {rotation} near b = 0"), hi));
    }
    let root = roots::bisect_secant(f, lo, hi, 1e-14, 1e-16)?;
    if root.residual >= ROOT_TOLERANCE {
        return Err(Error::numerical(
            format!("|Xi(b) - p pi/q| above tolerance for {rotation}"),
            root.residual,
        ));
    }
    Ok(GeodesicFamily::from_b(root.x)?.with_rotation(rotation))
}

/// Position and velocity on the geodesic at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub phi: f64,
    pub phidot: f64,
    pub theta: f64,
    pub thetadot: f64,
}

/// Samples of `(φ, φ̇, θ)` at `n + 1` uniform nodes over one half-period.
#[derive(Debug, Clone)]
pub struct Trajectory {
    family: GeodesicFamily,
    step: f64,
    phi: Vec<f64>,
    phidot: Vec<f64>,
    theta: Vec<f64>,
}

/// Largest conservation defect accepted by [`sample_trajectory`].
pub const CONSERVATION_TOLERANCE: f64 = 1e-9;

/// Integrate the geodesic over `[0, T]` on a grid of `n` steps.
pub fn sample_trajectory(family: &GeodesicFamily, n: usize) -> Result<Trajectory> {
    if n < 64 {
        return Err(Error::Validation(format!("trajectory needs n >= 64, got {n}")));
    }
    let fam = *family;
    let step = fam.half_period / n as f64;
    let rhs = move |_t: f64, y: &[f64; 3]| [y[1], fam.phi_ddot(y[0], y[1]), fam.theta_dot(y[0])];

    // Substep so the RK4 truncation error stays far below the grid spacing.
    let max_sub = 2e-3 * fam.b.cos().powi(2);
    let sub = (step / max_sub).ceil().max(1.0) as usize;
    let h = step / sub as f64;

    let mut phi = Vec::with_capacity(n + 1);
    let mut phidot = Vec::with_capacity(n + 1);
    let mut theta = Vec::with_capacity(n + 1);
    let mut y = [fam.b, 0.0, 0.0];
    phi.push(y[0]);
    phidot.push(y[1]);
    theta.push(y[2]);
    for i in 0..n {
        for s in 0..sub {
            y = rk4_step(&rhs, (i * sub + s) as f64 * h, &y, h);
        }
        phi.push(y[0]);
        phidot.push(y[1]);
        theta.push(y[2]);
    }
    let traj = Trajectory { family: fam, step, phi, phidot, theta };
    let drift = traj.conservation_defect();
    if drift > CONSERVATION_TOLERANCE {
        return Err(Error::numerical("arc-length conservation drifted", drift));
    }
    Ok(traj)
}

// Quintic Hermite basis on [0, 1]: values, first and second derivatives at
// both ends.
fn hermite5(u: f64, y: [f64; 2], d: [f64; 2], s: [f64; 2]) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
    let h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
    let h2 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
    let h3 = 0.5 * (u3 - 2.0 * u4 + u5);
    let h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
    let h5 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    h0 * y[0] + h1 * d[0] + h2 * s[0] + h3 * s[1] + h4 * d[1] + h5 * y[1]
}

impl Trajectory {
    pub fn family(&self) -> &GeodesicFamily {
        &self.family
    }

    /// Number of grid steps over `[0, T]`.
    pub fn n(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn half_period(&self) -> f64 {
        self.family.half_period
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.phi.len()).map(move |i| i as f64 * self.step)
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn phidot(&self) -> &[f64] {
        &self.phidot
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Full length `t₀`, when the rotation number is known.
    pub fn full_length(&self) -> Option<f64> {
        self.family.full_length()
    }

    /// Node state, exactly as integrated.
    pub fn node(&self, i: usize) -> GeodesicState {
        GeodesicState {
            phi: self.phi[i],
            phidot: self.phidot[i],
            theta: self.theta[i],
            thetadot: self.family.theta_dot(self.phi[i]),
        }
    }

    /// State at the grid time `i·step` for any integer `i`, exact by symmetry.
    pub fn node_extended(&self, i: i64) -> GeodesicState {
        let n = self.n() as i64;
        let k = i.div_euclid(n);
        let j = i.rem_euclid(n) as usize;
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let base = self.node(j);
        GeodesicState {
            phi: sign * base.phi,
            phidot: sign * base.phidot,
            theta: base.theta + k as f64 * self.family.rotation_angle,
            thetadot: base.thetadot,
        }
    }

    /// `max |E φ̇² + G θ̇² - 1|` over the grid.
    pub fn conservation_defect(&self) -> f64 {
        self.phi
            .iter()
            .zip(&self.phidot)
            .map(|(&phi, &pd)| {
                let c2 = phi.cos().powi(2);
                let td = self.family.theta_dot(phi);
                (FOUR_PI_SQ * c2 * (pd * pd + c2 * td * td) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    fn interpolate(&self, s: f64) -> GeodesicState {
        let n = self.n();
        let x = (s / self.step).clamp(0.0, n as f64);
        let j = (x.floor() as usize).min(n - 1);
        let u = x - j as f64;
        if u == 0.0 {
            return self.node(j);
        }
        let h = self.step;
        let fam = &self.family;
        let (p0, p1) = (self.phi[j], self.phi[j + 1]);
        let (v0, v1) = (self.phidot[j], self.phidot[j + 1]);
        let (a0, a1) = (fam.phi_ddot(p0, v0), fam.phi_ddot(p1, v1));
        let (j0, j1) = (fam.phi_dddot(p0, v0), fam.phi_dddot(p1, v1));
        let (w0, w1) = (fam.theta_dot(p0), fam.theta_dot(p1));
        // dθ̇/dt = 4 tanφ θ̇ φ̇
        let (z0, z1) = (4.0 * p0.tan() * w0 * v0, 4.0 * p1.tan() * w1 * v1);
        let phi = hermite5(u, [p0, p1], [h * v0, h * v1], [h * h * a0, h * h * a1]);
        let phidot = hermite5(u, [v0, v1], [h * a0, h * a1], [h * h * j0, h * h * j1]);
        let theta = hermite5(
            u,
            [self.theta[j], self.theta[j + 1]],
            [h * w0, h * w1],
            [h * h * z0, h * h * z1],
        );
        GeodesicState { phi, phidot, theta, thetadot: fam.theta_dot(phi) }
    }

    /// State at any real `t`, using `φ(t + T) = -φ(t)` and
    /// `θ(t + T) = θ(t) + Ξ` to leave the sampled half-period.
    pub fn state_at(&self, t: f64) -> GeodesicState {
        let period = self.family.half_period;
        let mut k = (t / period).floor();
        let mut s = t - k * period;
        if s >= period {
            s -= period;
            k += 1.0;
        }
        let base = self.interpolate(s.max(0.0));
        let sign = if (k as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        GeodesicState {
            phi: sign * base.phi,
            phidot: sign * base.phidot,
            theta: base.theta + k * self.family.rotation_angle,
            thetadot: base.thetadot,
        }
    }

    /// State at `t ∈ [0, t₀)`; without a known rotation number any `t ≥ 0`
    /// is accepted.
    pub fn evaluate_extended(&self, t: f64) -> Result<GeodesicState> {
        let upper = self.full_length().unwrap_or(f64::INFINITY);
        if !(t >= 0.0 && t < upper) {
            return Err(Error::Domain(format!("t = {t} outside [0, {upper})")));
        }
        Ok(self.state_at(t))
    }

    pub fn to_record(&self) -> TrajectoryRecord {
        TrajectoryRecord {
            b: self.family.b,
            c: self.family.c,
            half_period: self.family.half_period,
            rotation_angle: self.family.rotation_angle,
            n: self.n(),
            phi: self.phi.clone(),
            phidot: self.phidot.clone(),
            theta: self.theta.clone(),
        }
    }
}

/// JSON form of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    #[serde(with = "crate::json17")]
    pub b: f64,
    #[serde(with = "crate::json17")]
    pub c: f64,
    #[serde(rename = "T", with = "crate::json17")]
    pub half_period: f64,
    #[serde(rename = "Xi", with = "crate::json17")]
    pub rotation_angle: f64,
    pub n: usize,
    #[serde(with = "crate::json17::vec")]
    pub phi: Vec<f64>,
    #[serde(with = "crate::json17::vec")]
    pub phidot: Vec<f64>,
    #[serde(with = "crate::json17::vec")]
    pub theta: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_examples() {
        let (e, g) = metric_coefficients(0.0).unwrap();
        assert!((e - FOUR_PI_SQ).abs() < 1e-12 && (g - FOUR_PI_SQ).abs() < 1e-12);
        let (e, g) = metric_coefficients(PI / 3.0).unwrap();
        assert!((e - PI * PI).abs() < 1e-12);
        assert!((g - PI * PI / 4.0).abs() < 1e-12);
        assert!(metric_coefficients(FRAC_PI_2).is_err());
        assert!(metric_coefficients(-FRAC_PI_2).is_err());
    }

    #[test]
    fn integrals_reject_bad_b() {
        for b in [0.0, 0.1, -FRAC_PI_2, -2.0, f64::NAN] {
            assert!(half_period(b).is_err());
            assert!(rotation_angle(b).is_err());
        }
    }

    #[test]
    fn rotation_number_validation() {
        assert!(RotationNumber::new(2, 3).is_ok());
        assert!(RotationNumber::new(1, 2).is_err());
        assert!(RotationNumber::new(4, 6).is_err());
        assert!(RotationNumber::new(3, 4).is_err()); // 0.75 > √2/2
        assert!(RotationNumber::new(0, 3).is_err());
        assert!(RotationNumber::new(5, 8).unwrap().q_is_even());
    }

    #[test]
    fn hermite_reproduces_quintics() {
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) - x.powi(5);
        let df = |x: f64| -2.0 + 1.5 * x * x - 5.0 * x.powi(4);
        let d2f = |x: f64| 3.0 * x - 20.0 * x.powi(3);
        for u in [0.0, 0.25, 0.7, 1.0] {
            let v = hermite5(u, [f(0.0), f(1.0)], [df(0.0), df(1.0)], [d2f(0.0), d2f(1.0)]);
            assert!((v - f(u)).abs() < 1e-14);
        }
    }

    #[test]
    fn third_derivative_matches_difference_quotient() {
        let fam = GeodesicFamily::from_b(-0.4).unwrap();
        let (phi, pd) = (-0.2, 0.01);
        let acc = fam.phi_ddot(phi, pd);
        let eps = 1e-6;
        let ahead = fam.phi_ddot(phi + eps * pd, pd + eps * acc);
        let behind = fam.phi_ddot(phi - eps * pd, pd - eps * acc);
        let fd = (ahead - behind) / (2.0 * eps);
        assert!((fd - fam.phi_dddot(phi, pd)).abs() < 1e-7);
    }

    #[test]
    fn clifford_trajectory_is_equator() {
        let traj = sample_trajectory(&GeodesicFamily::clifford(), 128).unwrap();
        assert!(traj.phi().iter().all(|&p| p == 0.0));
        let t = 3.7;
        let s = traj.state_at(t);
        assert!((s.theta - t / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn evaluate_extended_domain() {
        let fam = solve_parameter(2, 3).unwrap();
        let traj = sample_trajectory(&fam, 256).unwrap();
        let t0 = fam.full_length().unwrap();
        assert!(traj.evaluate_extended(-1e-9).is_err());
        assert!(traj.evaluate_extended(t0).is_err());
        assert!(traj.evaluate_extended(t0 - 1e-6).is_ok());
    }

    #[test]
    fn short_grid_rejected() {
        assert!(sample_trajectory(&GeodesicFamily::clifford(), 32).is_err());
    }
}
