//! Zero counting of sampled eigenfunctions and Sturm oscillation labels.

use crate::error::{Error, Result};

use super::{Boundary, SpectrumSummary};

/// How a sampled function continues past the end of its period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Periodicity {
    Periodic,
    Antiperiodic,
}

/// Values with `|v| <= ZERO_FRACTION · max|v|` count as exact zeros.
const ZERO_FRACTION: f64 = 1e-12;

/// Number of zeros over one period of a function sampled at the uniform
/// nodes `t_i = i·L/N`, `i = 0..N` (endpoint excluded). Sign changes between
/// neighbours count once, a run of exact-zero nodes counts once, and the
/// wrap from the last node back to the first respects `periodicity`.
pub fn zero_count(values: &[f64], periodicity: Periodicity) -> Result<usize> {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if values.len() < 2 || !(peak > f64::MIN_POSITIVE) || !peak.is_finite() {
        return Err(Error::numerical("function is below the noise floor", peak));
    }
    let floor = ZERO_FRACTION * peak;
    let sign = |v: f64| if v.abs() <= floor { 0i8 } else if v > 0.0 { 1 } else { -1 };
    let flip: i8 = match periodicity {
        Periodicity::Periodic => 1,
        Periodicity::Antiperiodic => -1,
    };
    let n = values.len();
    // Rotate so the scan starts at a nonzero node.
    let start = values.iter().position(|&v| sign(v) != 0).expect("peak is nonzero");
    let mut count = 0;
    let mut prev = sign(values[start]);
    let mut in_zero_run = false;
    for step in 1..=n {
        let idx = start + step;
        let s = if idx >= n { flip * sign(values[idx - n]) } else { sign(values[idx]) };
        if s == 0 {
            in_zero_run = true;
            continue;
        }
        if in_zero_run || s != prev {
            count += 1;
        }
        in_zero_run = false;
        prev = s;
    }
    Ok(count)
}

/// Expected zero count of the eigenfunction at (0-based) position `k`.
fn expected_zeros(k: usize, periodicity: Periodicity) -> usize {
    match periodicity {
        Periodicity::Periodic => 2 * k.div_ceil(2),
        Periodicity::Antiperiodic => 2 * (k + 1).div_ceil(2) - 1,
    }
}

/// Sturm label of one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SturmLabel {
    pub eigenvalue: f64,
    /// Periodic problems count from 0, antiperiodic ones from 1.
    pub index: usize,
    pub zeros: usize,
}

/// Label every eigenvalue of a scalar periodic or antiperiodic spectrum by
/// its Sturm index and check the zero counts against the interlacing
/// pattern `λ₀ < λ₁ ≤ λ₂ < …` (periodic: `2⌈k/2⌉` zeros) or
/// `λ̃₁ ≤ λ̃₂ < λ̃₃ ≤ …` (antiperiodic: `2⌈k/2⌉ - 1` zeros).
pub fn oscillation_index(summary: &SpectrumSummary) -> Result<Vec<SturmLabel>> {
    if summary.dim != 1 {
        return Err(Error::Validation("oscillation labels need a scalar problem".into()));
    }
    let periodicity = match summary.boundary {
        Boundary::Periodic => Periodicity::Periodic,
        Boundary::Antiperiodic => Periodicity::Antiperiodic,
        other => return Err(Error::Validation(format!("oscillation labels undefined for {other} problems"))),
    };
    let functions = summary
        .eigenfunctions
        .as_ref()
        .ok_or_else(|| Error::Validation("spectrum was computed without eigenfunctions".into()))?;
    let offset = usize::from(periodicity == Periodicity::Antiperiodic);
    let mut labels = Vec::with_capacity(functions.len());
    for (k, (f, &lambda)) in functions.iter().zip(&summary.eigenvalues).enumerate() {
        let re: Vec<f64> = f.iter().map(|z| z.re).collect();
        let im: Vec<f64> = f.iter().map(|z| z.im).collect();
        // Real problems have real eigenfunctions up to a global phase.
        let dominant = if re.iter().map(|v| v * v).sum::<f64>() >= im.iter().map(|v| v * v).sum::<f64>() { re } else { im };
        let zeros = zero_count(&dominant, periodicity)?;
        let expected = expected_zeros(k, periodicity);
        if zeros != expected {
            return Err(Error::numerical(
                format!(
                    "eigenvalue {lambda:.6e} at position {k} has {zeros} zeros, interlacing requires {expected}; mesh may be under-resolved"
                ),
                zeros as f64,
            ));
        }
        labels.push(SturmLabel { eigenvalue: lambda, index: k + offset, zeros });
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|i| f(2.0 * PI * i as f64 / n as f64)).collect()
    }

    #[test]
    fn counts_simple_functions() {
        assert_eq!(zero_count(&sample(256, |t| t.cos()), Periodicity::Periodic).unwrap(), 2);
        assert_eq!(zero_count(&sample(256, |t| (3.0 * t).sin()), Periodicity::Periodic).unwrap(), 6);
        assert_eq!(zero_count(&sample(256, |_| 1.0), Periodicity::Periodic).unwrap(), 0);
        assert_eq!(zero_count(&sample(256, |t| (0.5 * t).cos()), Periodicity::Antiperiodic).unwrap(), 1);
        assert_eq!(zero_count(&sample(256, |t| (2.5 * t).sin()), Periodicity::Antiperiodic).unwrap(), 5);
        assert!(zero_count(&[0.0; 256], Periodicity::Periodic).is_err());
    }

    #[test]
    fn expected_pattern() {
        let p: Vec<usize> = (0..5).map(|k| expected_zeros(k, Periodicity::Periodic)).collect();
        assert_eq!(p, [0, 2, 2, 4, 4]);
        let a: Vec<usize> = (0..4).map(|k| expected_zeros(k, Periodicity::Antiperiodic)).collect();
        assert_eq!(a, [1, 1, 3, 3]);
    }
}
