//! Explicit Runge-Kutta integrators over fixed-size states.

use crate::error::{Error, Result};

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = f(t + h, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Tolerances for [`dopri5`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-11, abs: 1e-13, max_steps: 1_000_000 }
    }
}

/// Adaptive Dormand-Prince integration of `y' = f(t, y)` from `t0` to `t1`,
/// landing exactly on `t1`.
pub fn dopri5<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: Tolerance,
) -> Result<[f64; N]> {
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * span.abs().min(1e-2 * span.abs().max(1.0));
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);
    for _ in 0..tol.max_steps {
        if (t1 - t) * dir <= 0.0 {
            return Ok(y);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y_new = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += B[s] * k[s][i];
                lo += B_LOW[s] * k[s][i];
            }
            y_new[i] = y[i] + h * hi;
            let scale = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
            err = err.max((h * (hi - lo)).abs() / scale);
        }
        if !err.is_finite() {
            return Err(Error::numerical("non-finite state during integration", t));
        }
        if err <= 1.0 {
            t += h;
            y = y_new;
            // First-same-as-last: stage 7 was evaluated at the accepted point.
            k[0] = k[6];
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() < 1e-14 * (t.abs() + span.abs()) {
            return Err(Error::numerical("step size underflow", h.abs()));
        }
    }
    Err(Error::numerical(
        format!("step budget of {} exhausted", tol.max_steps),
        (t1 - t).abs(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_harmonic_oscillator_fourth_order() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let run = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = [1.0, 0.0];
            for i in 0..n {
                y = rk4_step(&f, i as f64 * h, &y, h);
            }
            (y[0] - 1f64.cos()).abs()
        };
        let ratio = run(20) / run(40);
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn dopri5_meets_tolerance() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -4.0 * y[0]];
        let y = dopri5(f, 0.0, [1.0, 0.0], 10.0, Tolerance { rel: 1e-12, abs: 1e-14, max_steps: 100_000 }).unwrap();
        assert!((y[0] - 20f64.cos()).abs() < 1e-9);
        assert!((y[1] + 2.0 * 20f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn dopri5_backwards() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let y = dopri5(f, 1.0, [1f64.exp()], 0.0, Tolerance::default()).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9);
    }
}
