//! Invariant suite for one family, reported as a pass/fail table.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::edwards::{boundary_form, root_of_unity, twisted_counts, BoundaryFormData};
use crate::error::Result;
use crate::geodesic::{sample_trajectory, solve_parameter, RotationNumber, Trajectory};
use crate::geometry::{self, kernel_fields, kernel_residual, killing_span, separated_coefficients, Channel};
use crate::pipeline::{bounds_check, compute_index, IndexOptions, Method};
use crate::spectral::{
    antiperiodic_check_l0, count_signs, oscillation_index, spectrum_with_eigenfunctions, Boundary,
};

pub const CONSERVATION_TOLERANCE: f64 = 1e-9;
pub const CLOSURE_TOLERANCE: f64 = 1e-10;
pub const KERNEL_TOLERANCE: f64 = 1e-6;
pub const S2_TOLERANCE: f64 = 1e-6;
pub const P2_TOLERANCE: f64 = 1e-8;
pub const GRAM_TOLERANCE: f64 = 1e-6;

/// Cutoff for the oscillation spectra; the zero modes sit just below it.
const OSCILLATION_CUTOFF: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_owned(), passed, detail: detail.into() }
    }

    fn from_result(name: &str, result: Result<(bool, String)>) -> Self {
        match result {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{mark}  {:<28} {}", self.name, self.detail)
    }
}

fn closure(rotation: RotationNumber, traj: &Trajectory) -> (bool, String) {
    let xi = traj.family().rotation_angle;
    let defect = (xi - PI * rotation.ratio()).abs();
    (defect < CLOSURE_TOLERANCE, format!("|Xi - pi p/q| = {defect:.2e}"))
}

fn conservation(traj: &Trajectory) -> (bool, String) {
    let d = traj.conservation_defect();
    (d < CONSERVATION_TOLERANCE, format!("max defect {d:.2e}"))
}

fn kernel(traj: &Trajectory) -> Result<(bool, String)> {
    let fields = kernel_fields(traj);
    let coeffs: Vec<_> = (0..3).map(|l| separated_coefficients(l, traj)).collect();
    let worst = fields
        .iter()
        .map(|f| kernel_residual(f, &coeffs[f.l as usize]).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    let span = killing_span(traj, &fields, 64)?;
    let passed = worst < KERNEL_TOLERANCE && span.listed_rank == 9 && span.combined_rank == 9;
    Ok((
        passed,
        format!(
            "max residual {worst:.2e}; ranks listed {} killing {} combined {}",
            span.listed_rank, span.killing_rank, span.combined_rank
        ),
    ))
}

fn oscillation(rotation: RotationNumber, traj: &Trajectory, cells: usize, tau: f64) -> Result<(bool, String)> {
    let (p, q) = (rotation.p as usize, rotation.q as usize);
    let half_periods = 2 * q;
    let zero_labels = |channel: Channel| -> Result<Vec<usize>> {
        let sys = geometry::l0_channel(channel, traj, Boundary::Periodic, half_periods)?;
        let s = spectrum_with_eigenfunctions(&sys, OSCILLATION_CUTOFF, cells * half_periods, tau)?;
        Ok(oscillation_index(&s)?
            .into_iter()
            .filter(|label| label.eigenvalue.abs() <= tau)
            .map(|label| label.index)
            .collect())
    };
    let first = zero_labels(Channel::First)?;
    let second = zero_labels(Channel::Second)?;
    let anti = antiperiodic_check_l0(traj, cells, tau)?;
    let passed = first == [4 * p - 1, 4 * p] && second == [2 * q] && anti.holds(tau);
    Ok((
        passed,
        format!(
            "channel 1 zero modes {first:?}, channel 2 {second:?}; antiperiodic {:.3e} < 0, {:.1e} ~ 0",
            anti.lambda1, anti.lambda2
        ),
    ))
}

fn forms(traj: &Trajectory, cells: usize, tau: f64) -> Result<(BoundaryFormData, BoundaryFormData)> {
    let (a, b) = rayon::join(|| boundary_form(1, traj, cells, tau), || boundary_form(2, traj, cells, tau));
    Ok((a?, b?))
}

fn roots(rotation: RotationNumber, l1: &BoundaryFormData, l2: &BoundaryFormData) -> Result<(bool, String)> {
    let s2 = l1.root_pair().map(|p| p.1);
    let s2_defect = s2.map_or(f64::INFINITY, |s| (s + (PI * rotation.ratio()).cos()).abs());
    let p2 = l2.polynomial()?;
    let p2_defect = p2.eval(1.0).abs() / p2.norm();
    let gram = l1.symmetry_defect.max(l1.sigma_defect).max(l2.symmetry_defect).max(l2.sigma_defect);
    let passed = s2_defect < S2_TOLERANCE && p2_defect < P2_TOLERANCE && gram < GRAM_TOLERANCE;
    Ok((
        passed,
        format!("|s2 + cos(p pi/q)| = {s2_defect:.2e}; |P2(1)|/|P2| = {p2_defect:.2e}; Gram defect {gram:.2e}"),
    ))
}

fn route_agreement(
    rotation: RotationNumber,
    traj: &Trajectory,
    data: &[&BoundaryFormData],
    cells: usize,
    tau: f64,
) -> Result<(bool, String)> {
    use rayon::prelude::*;
    let tasks: Vec<(&BoundaryFormData, u32)> =
        data.iter().flat_map(|d| (0..2 * rotation.q).map(move |r| (*d, r))).collect();
    let mismatches = tasks
        .par_iter()
        .map(|&(d, r)| -> Result<Option<String>> {
            let edw = twisted_counts(d, rotation.q, r)?;
            let sys = geometry::jacobi_system(d.l, traj, Boundary::Twisted(root_of_unity(rotation.q, r)), 1)?;
            let dir = count_signs(&sys, cells, tau)?;
            Ok(((edw.neg, edw.zero) != (dir.neg, dir.zero)).then(|| {
                format!("l={} r={r}: edwards {:?} direct {:?}", d.l, (edw.neg, edw.zero), (dir.neg, dir.zero))
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mismatches: Vec<String> = mismatches.into_iter().flatten().collect();
    let detail = if mismatches.is_empty() {
        format!("{} twisted problems agree", tasks.len())
    } else {
        mismatches.join("; ")
    };
    Ok((mismatches.is_empty(), detail))
}

/// Run the invariant suite for `p/q` at `cells` per half-period.
pub fn verify_family(p: u32, q: u32, cells: usize, tau: f64) -> Result<Vec<Check>> {
    let family = solve_parameter(p, q)?;
    let rotation = family.rotation.expect("solved families carry their rotation number");
    let traj = sample_trajectory(&family, 4 * cells)?;
    let mut checks = Vec::new();

    let (ok, detail) = closure(rotation, &traj);
    checks.push(Check::new("closed geodesic", ok, detail));
    let (ok, detail) = conservation(&traj);
    checks.push(Check::new("first integral", ok, detail));
    checks.push(Check::from_result("Killing kernel", kernel(&traj)));
    checks.push(Check::from_result("oscillation (l = 0)", oscillation(rotation, &traj, cells, tau)));

    match forms(&traj, cells, tau) {
        Ok((l1, l2)) => {
            checks.push(Check::from_result("root identities", roots(rotation, &l1, &l2)));
            checks.push(Check::from_result(
                "route agreement per root",
                route_agreement(rotation, &traj, &[&l1, &l2], cells, tau),
            ));
        }
        Err(e) => checks.push(Check::new("boundary forms", false, format!("error: {e}"))),
    }

    let opts = IndexOptions { method: Method::Both, cells, tau, confirm: false };
    match compute_index(p, q, &opts) {
        Ok(report) => {
            let l0 = report.mode(0).expect("mode 0 is always counted");
            let expected = if rotation.q_is_even() { q + 2 * p - 1 } else { 2 * q + 4 * p - 1 } as usize;
            checks.push(Check::new(
                "l = 0 counts",
                l0.neg == expected && l0.zero == 3,
                format!("neg {} (expected {expected}), zero {} (expected 3)", l0.neg, l0.zero),
            ));
            let b = bounds_check(&report);
            let bounds = &report.bounds;
            checks.push(Check::new(
                "index bounds",
                b.ind_lower && b.ind_upper,
                format!("ind {} in [{}, {}]", report.ind, bounds.thm_lower, bounds.thm_upper),
            ));
            checks.push(Check::new(
                "nullity bounds",
                b.nul_range,
                format!("nul {} in [{}, {}]", report.nul, bounds.nul_lower, bounds.nul_upper),
            ));
            checks.push(Check::new(
                "spectral index",
                b.ind_s_formula && b.rough,
                format!(
                    "ind_S {} (formula {}); ind {} <= {}",
                    bounds.ind_s, bounds.ind_s_formula, report.ind, bounds.rough_upper
                ),
            ));
        }
        Err(e) => checks.push(Check::new("index", false, format!("error: {e}"))),
    }
    Ok(checks)
}
