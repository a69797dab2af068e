//! Globally adaptive Gauss-Kronrod (7, 15) quadrature.

// Nodes and weights are quoted to the published digits.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub segments: usize,
}

/// Integrate `f` over `[a, b]` until the summed error estimate drops below
/// `max(abs_tol, rel_tol * |value|)`, bisecting the worst segment each round.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<Quadrature> {
    let mut segments = vec![kronrod15(&mut f, a, b)];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(Error::numerical("integrand produced a non-finite value", error));
        }
        // Below ~50 ulp the Kronrod/Gauss difference is rounding noise.
        let floor = 50.0 * f64::EPSILON * segments.iter().map(|s| s.value.abs()).sum::<f64>();
        if error <= abs_tol.max(rel_tol * value.abs()).max(floor) {
            return Ok(Quadrature {
                value,
                error,
                segments: segments.len(),
            });
        }
        if segments.len() >= max_segments {
            return Err(Error::numerical(
                format!("quadrature did not converge in {max_segments} segments"),
                error,
            ));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        segments.push(kronrod15(&mut f, s.a, mid));
        segments.push(kronrod15(&mut f, mid, s.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| x.powi(6) - 3.0 * x, 0.0, 2.0, 1e-14, 1e-14, 10).unwrap();
        assert!((q.value - (128.0 / 7.0 - 6.0)).abs() < 1e-12);
        assert_eq!(q.segments, 1);
    }

    #[test]
    fn smooth_periodic() {
        // ∫ 1/(2 + cos x) over a period = 2π/√3.
        let q = integrate(|x| 1.0 / (2.0 + x.cos()), 0.0, 2.0 * PI, 1e-13, 1e-13, 200).unwrap();
        assert!((q.value - 2.0 * PI / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand_refines() {
        let q = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10, 1e-12, 500).unwrap();
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!((q.value - exact).abs() < 1e-8 * exact);
        assert!(q.segments > 1);
    }

    #[test]
    fn budget_exhaustion_reports_residual() {
        let err = integrate(|x| x.sqrt().recip(), 0.0, 1.0, 1e-15, 1e-15, 8).unwrap_err();
        match err {
            Error::Numerical { achieved, .. } => assert!(achieved > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
