//! Acceptance criteria AC1 to AC10, one line each.
//!
//! Runs without the libtest harness so the lines appear in `cargo test`
//! output. Exits nonzero if any criterion fails.

use std::f64::consts::{PI, SQRT_2};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use otsuki::edwards::{boundary_form, dirichlet_negative_count, gram_matrix, root_of_unity, twisted_counts};
use otsuki::geodesic::{half_period, rotation_angle, sample_trajectory, solve_parameter, GeodesicFamily, Trajectory};
use otsuki::geometry::{self, kernel_fields, kernel_residual, separated_coefficients, Channel};
use otsuki::pipeline::{bounds_check, compute_index, direct_mode, IndexOptions, Method};
use otsuki::spectral::{
    antiperiodic_check_l0, count_signs, oscillation_index, spectral_index, spectral_index_formula,
    spectrum_with_eigenfunctions, Boundary, TAU_ZERO,
};

const CELLS: usize = 4096;
const FAMILIES: [(u32, u32); 4] = [(2, 3), (5, 8), (7, 10), (12, 17)];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn within(elapsed: Duration, budget: Duration) -> (bool, String) {
    (elapsed <= budget, format!("{:.2} s of {:.0} s", elapsed.as_secs_f64(), budget.as_secs_f64()))
}

fn trajectory(p: u32, q: u32, cells: usize) -> Trajectory {
    sample_trajectory(&solve_parameter(p, q).unwrap(), 4 * cells).unwrap()
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let xi = rotation_angle(-1e-4).unwrap();
    let t = half_period(-1e-4).unwrap();
    let (xi0, t0) = (SQRT_2 / 2.0 * PI, SQRT_2 * PI * PI);
    let (fast, time) = within(start.elapsed(), Duration::from_secs(1));
    let passed = (xi - xi0).abs() < 1e-3 && (t - t0).abs() < 1e-2 && fast;
    outcome(passed, format!("Xi = {xi:.6} (limit {xi0:.6}), T = {t:.5} (limit {t0:.5}); {time}"))
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let traj = sample_trajectory(&GeodesicFamily::clifford(), 4 * 1024).unwrap();
    let (g1, g2) = (gram_matrix(1, &traj).unwrap(), gram_matrix(2, &traj).unwrap());
    let (r6, r2) = (6f64.sqrt() / 2.0 * PI, SQRT_2 / 2.0 * PI);
    let mut worst = 0.0f64;
    for k in 0..16 {
        let w = Complex64::from_polar(1.0, k as f64 * PI / 8.0);
        let expected_1 = [
            4.0 * 3f64.sqrt() * PI / r6.sin() * (r6.cos() - w.re),
            4.0 * PI / r2.sin() * (r2.cos() + w.re),
        ];
        let expected_2 = [4.0 * SQRT_2 * (1.0 - w.re), 4.0 * SQRT_2 * PI / PI.sinh() * (PI.cosh() + w.re)];
        for (a, e) in [(g1.twisted_form(w), expected_1), (g2.twisted_form(w), expected_2)] {
            let exact = [[Complex64::new(e[0], 0.0), Complex64::ZERO], [Complex64::ZERO, Complex64::new(e[1], 0.0)]];
            for i in 0..2 {
                for j in 0..2 {
                    worst = worst.max((a[i][j] - exact[i][j]).norm());
                }
            }
        }
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(5));
    outcome(worst < 1e-6 && fast, format!("max entry error {worst:.2e} over 16 roots; {time}"))
}

fn ac3() -> Outcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for b in [0.0, -1e-3] {
        let family = if b == 0.0 { GeodesicFamily::clifford() } else { GeodesicFamily::from_b(b).unwrap() };
        let cells = 1024;
        let traj = sample_trajectory(&family, 8 * cells).unwrap();
        for (l, expected) in [(1, 1), (2, 0)] {
            let counts: Vec<usize> = [cells, 2 * cells]
                .iter()
                .map(|&n| dirichlet_negative_count(l, &traj, n, TAU_ZERO).map_or(usize::MAX, |d| d.neg))
                .collect();
            passed &= counts.iter().all(|&c| c == expected);
            lines.push(format!("b={b} l={l}: {counts:?}"));
        }
    }
    outcome(passed, lines.join(", "))
}

fn ac4() -> Outcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for (p, q) in [(2u32, 3u32), (5, 8), (7, 10)] {
        let start = Instant::now();
        let traj = trajectory(p, q, CELLS);
        let rotation = traj.family().rotation.unwrap();
        let coarse = direct_mode(0, rotation, &traj, CELLS, TAU_ZERO).unwrap();
        let (fast, time) = within(start.elapsed(), Duration::from_secs(60));
        let fine_traj = trajectory(p, q, 2 * CELLS);
        let fine = direct_mode(0, rotation, &fine_traj, 2 * CELLS, TAU_ZERO).unwrap();
        let full_expected = (2 * q + 4 * p - 1) as usize;
        let full = coarse.full().map_or((coarse.neg, coarse.zero), |c| (c.neg, c.zero));
        let mut ok = full == (full_expected, 3) && fast && coarse == fine;
        let mut line = format!("{p}/{q}: neg {} zero {} (expect {full_expected}, 3)", full.0, full.1);
        if rotation.q_is_even() {
            let plus_expected = (q + 2 * p - 1) as usize;
            ok &= (coarse.neg, coarse.zero) == (plus_expected, 3);
            line += &format!(", plus class {} {} (expect {plus_expected}, 3)", coarse.neg, coarse.zero);
        }
        line += &format!(", stable at 2n: {}, {time}", coarse == fine);
        passed &= ok;
        lines.push(line);
    }
    outcome(passed, lines.join("; "))
}

fn ac5() -> Outcome {
    let mut worst_s2 = 0.0f64;
    let mut worst_p2 = 0.0f64;
    for (p, q) in FAMILIES {
        let traj = trajectory(p, q, CELLS);
        let l1 = boundary_form(1, &traj, CELLS, TAU_ZERO).unwrap();
        let l2 = boundary_form(2, &traj, CELLS, TAU_ZERO).unwrap();
        let s2 = l1.root_pair().map_or(f64::NAN, |r| r.1);
        worst_s2 = worst_s2.max((s2 + (PI * p as f64 / q as f64).cos()).abs());
        let poly = l2.polynomial().unwrap();
        worst_p2 = worst_p2.max(poly.eval(1.0).abs() / poly.norm());
    }
    outcome(
        worst_s2 < 1e-6 && worst_p2 < 1e-8,
        format!("max |s2 + cos(p pi/q)| = {worst_s2:.2e}, max |P2(1)|/|P2| = {worst_p2:.2e} over {FAMILIES:?}"),
    )
}

fn ac6() -> Outcome {
    let (p, q) = (2, 3);
    let traj = trajectory(p, q, CELLS);
    let mut mismatches = Vec::new();
    let mut total = 0;
    for l in [1, 2] {
        let data = boundary_form(l, &traj, CELLS, TAU_ZERO).unwrap();
        for r in 0..2 * q {
            let edw = twisted_counts(&data, q, r).unwrap();
            let sys = geometry::jacobi_system(l, &traj, Boundary::Twisted(root_of_unity(q, r)), 1).unwrap();
            let dir = count_signs(&sys, CELLS, TAU_ZERO).unwrap();
            total += 1;
            if (edw.neg, edw.zero) != (dir.neg, dir.zero) {
                mismatches.push(format!("l={l} r={r}: {:?} vs {:?}", (edw.neg, edw.zero), (dir.neg, dir.zero)));
            }
        }
    }
    let detail = if mismatches.is_empty() { format!("{total} of {total} twisted problems agree") } else { mismatches.join("; ") };
    outcome(mismatches.is_empty(), detail)
}

fn ac7() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let opts = IndexOptions { method: Method::Both, cells: CELLS, tau: TAU_ZERO, confirm: true };
    let report = pool.install(|| compute_index(2, 3, &opts));
    let (fast, time) = within(start.elapsed(), Duration::from_secs(300));
    match report {
        Ok(r) => {
            let lower = (6 * r.q + 8 * r.p - 3) as usize;
            let passed = r.ind == 31 && r.nul == 9 && r.ind == lower && r.bounds.thm_lower == lower && fast;
            outcome(passed, format!("ind {} nul {}, lower bound {lower}, confirmed at {:?}; {time}", r.ind, r.nul, r.confirmed_at))
        }
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn ac8() -> Outcome {
    let family = solve_parameter(2, 3).unwrap();
    let worst_at = |n: usize| -> f64 {
        let traj = sample_trajectory(&family, n).unwrap();
        kernel_fields(&traj)
            .iter()
            .map(|f| kernel_residual(f, &separated_coefficients(f.l, &traj)).unwrap().value)
            .fold(0.0, f64::max)
    };
    let grids = [64, 128, 256, 512];
    let residuals: Vec<f64> = grids.iter().map(|&n| worst_at(n)).collect();
    let factors: Vec<f64> = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    let at_2048 = worst_at(2048);
    let floor_factor = worst_at(1024) / at_2048;
    let passed = at_2048 < 1e-6 && factors.iter().all(|f| (8.0..=32.0).contains(f));
    let shown: Vec<String> = factors.iter().map(|f| format!("{f:.1}")).collect();
    outcome(
        passed,
        format!(
            "residual {at_2048:.2e} at 2048; factors {} over {grids:?}; 1024 to 2048 factor {floor_factor:.2} (roundoff floor)",
            shown.join(", ")
        ),
    )
}

fn ac9() -> Outcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for (p, q) in [(2, 3), (5, 8)] {
        let traj = trajectory(p, q, CELLS);
        let rotation = traj.family().rotation.unwrap();
        let computed = spectral_index(rotation, &traj, CELLS, TAU_ZERO).unwrap().total;
        let formula = spectral_index_formula(rotation);
        passed &= computed == formula;
        lines.push(format!("{p}/{q}: ind_S {computed} (formula {formula})"));
    }
    let opts = IndexOptions { method: Method::Both, cells: 1024, tau: TAU_ZERO, confirm: false };
    for (p, q) in FAMILIES {
        match compute_index(p, q, &opts) {
            Ok(r) => {
                let rough = bounds_check(&r).rough;
                passed &= rough;
                lines.push(format!("{p}/{q}: ind {} <= {}", r.ind, r.bounds.rough_upper));
            }
            Err(e) => {
                passed = false;
                lines.push(format!("{p}/{q}: error {e}"));
            }
        }
    }
    outcome(passed, lines.join(", "))
}

fn ac10() -> Outcome {
    let (p, q) = (2usize, 3usize);
    let cells = 1024;
    let traj = trajectory(p as u32, q as u32, cells);
    let zero_labels = |channel: Channel| -> Vec<usize> {
        let sys = geometry::l0_channel(channel, &traj, Boundary::Periodic, 2 * q).unwrap();
        let s = spectrum_with_eigenfunctions(&sys, 0.01, cells * 2 * q, TAU_ZERO).unwrap();
        oscillation_index(&s)
            .unwrap()
            .into_iter()
            .filter(|label| label.eigenvalue.abs() <= TAU_ZERO)
            .map(|label| label.index)
            .collect()
    };
    let first = zero_labels(Channel::First);
    let second = zero_labels(Channel::Second);
    let anti = antiperiodic_check_l0(&traj, cells, TAU_ZERO).unwrap();
    let passed = first == [4 * p - 1, 4 * p] && second == [2 * q] && anti.holds(TAU_ZERO);
    outcome(
        passed,
        format!(
            "channel 1 zero modes {first:?} (expect [{}, {}]), channel 2 {second:?} (expect [{}]), tilde lambda {:.3e} < 0, {:.1e} ~ 0",
            4 * p - 1,
            4 * p,
            2 * q,
            anti.lambda1,
            anti.lambda2
        ),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("AC1 Clifford limits", ac1),
        ("AC2 Clifford Gram data", ac2),
        ("AC3 Dirichlet counts near b = 0", ac3),
        ("AC4 l = 0 counts", ac4),
        ("AC5 root identities", ac5),
        ("AC6 route equivalence (2,3)", ac6),
        ("AC7 index and nullity of 2/3", ac7),
        ("AC8 kernel residuals", ac8),
        ("AC9 spectral index", ac9),
        ("AC10 oscillation suite", ac10),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let result = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        let mark = if result.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!result.passed);
        println!("{mark} {name}: {}", result.detail);
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
