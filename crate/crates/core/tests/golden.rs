//! Frozen values checked against independent oracles.

use std::f64::consts::PI;

use otsuki::geodesic::{half_period, rotation_angle, solve_parameter};
use otsuki::pipeline::{compute_index, IndexOptions, Method};
use otsuki::spectral::TAU_ZERO;

const T_AT_MINUS_03: f64 = 13.805_846_723_339_348;
const XI_AT_MINUS_03: f64 = 2.196_148_773_380_499;
const B_STAR: [((u32, u32), f64); 4] = [
    ((2, 3), -0.658_565_959_277_443_2),
    ((5, 8), -0.920_945_786_966_047_1),
    ((7, 10), -0.282_054_339_465_259_43),
    ((12, 17), -0.117_588_147_611_070_52),
];

/// Integrate the geodesic equations with classical RK4 from the turning
/// point `φ = b` until `φ̇` changes sign again; return `(T, Ξ)`.
fn shoot(b: f64, steps_per_unit: usize) -> (f64, f64) {
    let e = |phi: f64| 4.0 * PI * PI * phi.cos().powi(2);
    let g = |phi: f64| 4.0 * PI * PI * phi.cos().powi(4);
    let c = g(b).sqrt();
    // Lagrangian equations for E dφ² + G dθ² with Clairaut integral G θ̇ = c.
    let rhs = |y: [f64; 3]| {
        let [phi, phidot, _] = y;
        let thetadot = c / g(phi);
        let de = -8.0 * PI * PI * phi.cos() * phi.sin();
        let dg = -16.0 * PI * PI * phi.cos().powi(3) * phi.sin();
        [phidot, (-de * phidot * phidot + dg * thetadot * thetadot) / (2.0 * e(phi)), thetadot]
    };
    let h = 1.0 / steps_per_unit as f64;
    let mut y = [b, 0.0, 0.0];
    let mut t = 0.0;
    loop {
        let add = |y: [f64; 3], k: [f64; 3], s: f64| [y[0] + s * k[0], y[1] + s * k[1], y[2] + s * k[2]];
        let k1 = rhs(y);
        let k2 = rhs(add(y, k1, h / 2.0));
        let k3 = rhs(add(y, k2, h / 2.0));
        let k4 = rhs(add(y, k3, h));
        let next: [f64; 3] = std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        if t > 1.0 && next[1] <= 0.0 {
            // φ̇ crosses zero inside this step; locate it by secant on φ̇.
            let s = y[1] / (y[1] - next[1]);
            return (t + s * h, y[2] + s * (next[2] - y[2]));
        }
        y = next;
        t += h;
    }
}

#[test]
fn half_period_and_rotation_angle_match_golden_values() {
    assert!((half_period(-0.3).unwrap() - T_AT_MINUS_03).abs() < 1e-12);
    assert!((rotation_angle(-0.3).unwrap() - XI_AT_MINUS_03).abs() < 1e-12);
}

#[test]
fn quadrature_agrees_with_direct_integration() {
    for b in [-0.3, -0.9, -1.3] {
        let (t, xi) = shoot(b, 20_000);
        // The secant step limits the oracle to about h² in T.
        assert!((t - half_period(b).unwrap()).abs() < 1e-6, "b = {b}: T {t}");
        assert!((xi - rotation_angle(b).unwrap()).abs() < 1e-6, "b = {b}: Xi {xi}");
    }
}

#[test]
fn solved_parameters_match_golden_values() {
    for ((p, q), b) in B_STAR {
        let family = solve_parameter(p, q).unwrap();
        assert!((family.b - b).abs() < 1e-12, "{p}/{q}: {} vs {b}", family.b);
        assert!((rotation_angle(b).unwrap() - PI * p as f64 / q as f64).abs() < 1e-12);
    }
}

#[test]
fn family_reports_are_frozen() {
    // ind, nul, zero(1) and the side of s1 relative to -1.
    let expected = [((2, 3), 31, 9, 2, true), ((5, 8), 41, 9, 2, true), ((7, 10), 59, 9, 2, false), ((12, 17), 209, 9, 2, false)];
    let opts = IndexOptions { method: Method::Both, cells: 512, tau: TAU_ZERO, confirm: true };
    for ((p, q), ind, nul, zero1, below) in expected {
        let r = compute_index(p, q, &opts).unwrap();
        assert_eq!((r.ind, r.nul), (ind, nul), "{p}/{q}");
        assert_eq!(r.mode(1).unwrap().zero, zero1);
        let s1 = r.flags.s1.unwrap();
        assert_eq!(s1 < -1.0, below, "{p}/{q}: s1 = {s1}");
        // The lower bound can only be attained when s1 < -1.
        if r.ind == r.bounds.thm_lower {
            assert!(s1 < -1.0);
        }
    }
}
