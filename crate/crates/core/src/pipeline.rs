//! Morse index and nullity of a bipolar surface from the separated counts.
//!
//! Mode `l = 0` counts once and modes `l = 1, 2` count twice; modes `l ≥ 3`
//! are dismissed once `Q_3` is shown positive. For even `q` only functions
//! invariant under the surface symmetry contribute: `t₀/2`-periodic ones for
//! `l = 0, 2` and `t₀/2`-antiperiodic ones for `l = 1`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::CACHE_VERSION;
use crate::edwards::{self, aggregate_roots, boundary_form, root_of_unity, BoundaryFormData};
use crate::error::{Error, Result};
use crate::geodesic::{sample_trajectory, solve_parameter, RotationNumber, Trajectory};
use crate::geometry;
use crate::spectral::{count_signs, spectral_index, spectral_index_formula, verify_high_l_positive, Boundary, TAU_ZERO};

/// Which route produces the `l = 1, 2` counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Edwards,
    Direct,
    Both,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Edwards => "edwards",
            Method::Direct => "direct",
            Method::Both => "both",
        })
    }
}

/// Default coarse mesh, cells per half-period.
pub const DEFAULT_CELLS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexOptions {
    pub method: Method,
    /// Coarse mesh in cells per half-period; the fine mesh doubles it.
    pub cells: usize,
    pub tau: f64,
    /// Repeat the counts at twice the mesh and require agreement.
    pub confirm: bool,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions { method: Method::Both, cells: DEFAULT_CELLS, tau: TAU_ZERO, confirm: true }
    }
}

/// Counts of one symmetry class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub neg: usize,
    pub zero: usize,
}

impl Counts {
    fn add(self, other: Counts) -> Counts {
        Counts { neg: self.neg + other.neg, zero: self.zero + other.zero }
    }
}

/// For even `q`: counts of `t₀/2`-periodic (`plus`) and `t₀/2`-antiperiodic
/// (`minus`) eigenfunctions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenSplit {
    pub plus: Counts,
    pub minus: Counts,
}

/// Counts for one Fourier mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub l: u32,
    /// Counts of the class that contributes to the surface.
    pub neg: usize,
    pub zero: usize,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub split: Option<EvenSplit>,
}

impl ModeRecord {
    fn new(l: u32, q_even: bool, method: Method, full: Counts, split: Option<EvenSplit>) -> Self {
        let chosen = match split {
            Some(s) if q_even => {
                if l.is_multiple_of(2) {
                    s.plus
                } else {
                    s.minus
                }
            }
            _ => full,
        };
        ModeRecord { l, neg: chosen.neg, zero: chosen.zero, method, split }
    }

    /// Counts over the whole closed geodesic, both classes together.
    pub fn full(&self) -> Option<Counts> {
        self.split.map(|s| s.plus.add(s.minus))
    }

    fn weight(&self) -> usize {
        if self.l == 0 {
            1
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub thm_lower: usize,
    pub thm_upper: usize,
    pub nul_lower: usize,
    pub nul_upper: usize,
    /// Computed Laplace eigenvalues below 2.
    pub ind_s: usize,
    /// Closed-form value of the same count.
    pub ind_s_formula: usize,
    /// `5·ind_S + 2`.
    pub rough_upper: usize,
}

impl Bounds {
    pub fn for_rotation(rotation: RotationNumber, ind_s: usize) -> Self {
        let (p, q) = (rotation.p as usize, rotation.q as usize);
        let (thm_lower, thm_upper) = if rotation.q_is_even() {
            (3 * q + 4 * p - 3, 5 * q + 2 * p - 5)
        } else {
            (6 * q + 8 * p - 3, 10 * q + 4 * p - 5)
        };
        Bounds {
            thm_lower,
            thm_upper,
            nul_lower: 9,
            nul_upper: 13,
            ind_s,
            ind_s_formula: spectral_index_formula(rotation),
            rough_upper: 5 * ind_s + 2,
        }
    }
}

/// Data about the roots of `P_1` recorded per family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub edwards_applicable: bool,
    #[serde(with = "crate::json17::option")]
    pub s1: Option<f64>,
    #[serde(with = "crate::json17::option")]
    pub s2: Option<f64>,
    /// `"below_minus_one"` or `"above_minus_one"` for `s₁`, `"unknown"` when
    /// `P_1` has no real root pair.
    pub s1_regime: String,
    /// Whether `|s₁| > s₂`.
    pub s1_dominates: Option<bool>,
}

impl Flags {
    fn from_form(l1: Option<&BoundaryFormData>, applicable: bool) -> Self {
        let pair = l1.and_then(BoundaryFormData::root_pair);
        Flags {
            edwards_applicable: applicable,
            s1: pair.map(|p| p.0),
            s2: pair.map(|p| p.1),
            s1_regime: match pair {
                Some((s1, _)) if s1 < -1.0 => "below_minus_one".into(),
                Some(_) => "above_minus_one".into(),
                None => "unknown".into(),
            },
            s1_dominates: pair.map(|(s1, s2)| s1.abs() > s2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub p: u32,
    pub q: u32,
    #[serde(with = "crate::json17")]
    pub b: f64,
    #[serde(rename = "T", with = "crate::json17")]
    pub half_period: f64,
    #[serde(rename = "Xi", with = "crate::json17")]
    pub rotation_angle: f64,
    pub method: Method,
    /// Coarse mesh, cells per half-period.
    pub n: usize,
    #[serde(with = "crate::json17")]
    pub tau_zero: f64,
    pub modes: Vec<ModeRecord>,
    pub ind: usize,
    pub nul: usize,
    pub bounds: Bounds,
    pub flags: Flags,
    /// Mesh of the confirmation pass, when one was run.
    pub confirmed_at: Option<usize>,
    /// Version of the numerics that produced the report.
    pub version: u32,
}

impl IndexReport {
    pub fn mode(&self, l: u32) -> Option<&ModeRecord> {
        self.modes.iter().find(|m| m.l == l)
    }
}

/// Direct counts of mode `l` on the closed geodesic.
pub fn direct_mode(l: u32, rotation: RotationNumber, traj: &Trajectory, cells: usize, tau: f64) -> Result<ModeRecord> {
    let q = rotation.q as usize;
    let count = |boundary: Boundary, half_periods: usize| -> Result<Counts> {
        let sys = geometry::jacobi_system(l, traj, boundary, half_periods)?;
        let c = count_signs(&sys, cells * half_periods, tau)?;
        Ok(Counts { neg: c.neg, zero: c.zero })
    };
    if rotation.q_is_even() {
        let (plus, minus) = rayon::join(|| count(Boundary::Periodic, q), || count(Boundary::Antiperiodic, q));
        let split = EvenSplit { plus: plus?, minus: minus? };
        Ok(ModeRecord::new(l, true, Method::Direct, split.plus.add(split.minus), Some(split)))
    } else {
        Ok(ModeRecord::new(l, false, Method::Direct, count(Boundary::Periodic, 2 * q)?, None))
    }
}

/// Boundary-form counts of mode `l ∈ {1, 2}`.
pub fn edwards_mode(data: &BoundaryFormData, rotation: RotationNumber) -> Result<ModeRecord> {
    let agg = aggregate_roots(data, rotation.q)?;
    let full = Counts { neg: agg.neg, zero: agg.zero };
    let split = match (agg.even, agg.odd) {
        (Some(e), Some(o)) => Some(EvenSplit {
            plus: Counts { neg: e.0, zero: e.1 },
            minus: Counts { neg: o.0, zero: o.1 },
        }),
        _ => None,
    };
    Ok(ModeRecord::new(data.l, rotation.q_is_even(), Method::Edwards, full, split))
}

/// Per-root comparison used to explain a disagreement between routes.
fn root_diff(data: &BoundaryFormData, rotation: RotationNumber, traj: &Trajectory, cells: usize, tau: f64) -> String {
    (0..2 * rotation.q)
        .map(|r| {
            let edw = edwards::twisted_counts(data, rotation.q, r).map(|c| (c.neg, c.zero));
            let dir = geometry::jacobi_system(data.l, traj, Boundary::Twisted(root_of_unity(rotation.q, r)), 1)
                .and_then(|sys| count_signs(&sys, cells, tau))
                .map(|c| (c.neg, c.zero));
            format!("l={} r={r}: edwards {edw:?} direct {dir:?}", data.l)
        })
        .collect::<Vec<_>>()
        .join("; ")
}

struct Modes {
    modes: Vec<ModeRecord>,
    forms: Vec<BoundaryFormData>,
    applicable: bool,
}

fn mode_counts(rotation: RotationNumber, traj: &Trajectory, opts: &IndexOptions) -> Result<Modes> {
    let (cells, tau) = (opts.cells, opts.tau);
    let want_direct = |l: u32| l == 0 || opts.method != Method::Edwards;
    let want_edwards = |l: u32| l > 0 && opts.method != Method::Direct;
    let direct: Vec<Option<Result<ModeRecord>>> = (0..3u32)
        .into_par_iter()
        .map(|l| want_direct(l).then(|| direct_mode(l, rotation, traj, cells, tau)))
        .collect();
    let forms: Vec<Option<Result<BoundaryFormData>>> = (0..3u32)
        .into_par_iter()
        .map(|l| want_edwards(l).then(|| boundary_form(l, traj, cells, tau)))
        .collect();

    let mut applicable = opts.method != Method::Direct;
    let mut kept_forms = Vec::new();
    let mut modes = Vec::new();
    for (l, (dir, form)) in (0..3u32).zip(direct.into_iter().zip(forms)) {
        let form = match form {
            Some(Err(Error::Inapplicable(msg))) => {
                if opts.method == Method::Edwards {
                    return Err(Error::Inapplicable(format!("{msg}; rerun with --method direct")));
                }
                log::warn!("boundary-form route skipped for l = {l}: {msg}");
                applicable = false;
                None
            }
            Some(other) => Some(other?),
            None => None,
        };
        let dir = dir.transpose()?;
        let record = match (dir, &form) {
            (Some(d), None) => d,
            (None, Some(data)) => edwards_mode(data, rotation)?,
            (Some(d), Some(data)) => {
                let e = edwards_mode(data, rotation)?;
                if (d.neg, d.zero, d.split) != (e.neg, e.zero, e.split) {
                    return Err(Error::Inconsistency(format!(
                        "l = {l}: direct {:?}/{:?} vs boundary form {:?}/{:?}; {}",
                        (d.neg, d.zero),
                        d.split,
                        (e.neg, e.zero),
                        e.split,
                        root_diff(data, rotation, traj, cells, tau)
                    )));
                }
                ModeRecord { method: Method::Both, ..d }
            }
            (None, None) => unreachable!("every mode has a route"),
        };
        if let Some(data) = form {
            kept_forms.push(data);
        }
        modes.push(record);
    }
    Ok(Modes { modes, forms: kept_forms, applicable })
}

/// Assemble the Morse index and nullity of the surface for `p/q`.
pub fn compute_index(p: u32, q: u32, opts: &IndexOptions) -> Result<IndexReport> {
    let family = solve_parameter(p, q)?;
    let rotation = family.rotation.expect("solved families carry their rotation number");
    let traj = sample_trajectory(&family, 4 * opts.cells)?;
    if !verify_high_l_positive(3, &traj, opts.cells)? {
        return Err(Error::Inconsistency("mode l = 3 is not positive; higher modes cannot be dismissed".into()));
    }
    let Modes { modes, forms, applicable } = mode_counts(rotation, &traj, opts)?;
    let ind = modes.iter().map(|m| m.weight() * m.neg).sum();
    let nul = modes.iter().map(|m| m.weight() * m.zero).sum();
    let ind_s = spectral_index(rotation, &traj, opts.cells, opts.tau)?.total;

    let confirmed_at = if opts.confirm {
        let fine = IndexOptions { cells: 2 * opts.cells, confirm: false, ..*opts };
        let fine_traj = sample_trajectory(&family, 4 * fine.cells)?;
        let check = mode_counts(rotation, &fine_traj, &fine)?;
        for (a, b) in modes.iter().zip(&check.modes) {
            if (a.neg, a.zero, a.split) != (b.neg, b.zero, b.split) {
                return Err(Error::Inconsistency(format!(
                    "l = {}: counts {:?} at n = {} but {:?} at n = {}",
                    a.l,
                    (a.neg, a.zero),
                    opts.cells,
                    (b.neg, b.zero),
                    fine.cells
                )));
            }
        }
        Some(fine.cells)
    } else {
        None
    };

    Ok(IndexReport {
        p,
        q,
        b: family.b,
        half_period: family.half_period,
        rotation_angle: family.rotation_angle,
        method: opts.method,
        n: opts.cells,
        tau_zero: opts.tau,
        modes,
        ind,
        nul,
        bounds: Bounds::for_rotation(rotation, ind_s),
        flags: Flags::from_form(forms.iter().find(|f| f.l == 1), applicable),
        confirmed_at,
        version: CACHE_VERSION,
    })
}

/// Which of the stated bounds a report satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsCheck {
    pub ind_lower: bool,
    pub ind_upper: bool,
    pub nul_range: bool,
    pub rough: bool,
    pub ind_s_formula: bool,
}

impl BoundsCheck {
    pub fn all(&self) -> bool {
        self.ind_lower && self.ind_upper && self.nul_range && self.rough && self.ind_s_formula
    }
}

pub fn bounds_check(report: &IndexReport) -> BoundsCheck {
    let b = &report.bounds;
    BoundsCheck {
        ind_lower: b.thm_lower <= report.ind,
        ind_upper: report.ind <= b.thm_upper,
        nul_range: (b.nul_lower..=b.nul_upper).contains(&report.nul),
        rough: report.ind <= b.rough_upper,
        ind_s_formula: b.ind_s == b.ind_s_formula,
    }
}

/// Reports for several families, ordered by `(p, q)` whatever the
/// completion order.
pub fn sweep(families: &[(u32, u32)], opts: &IndexOptions) -> Vec<((u32, u32), Result<IndexReport>)> {
    let mut sorted = families.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.into_par_iter().map(|(p, q)| ((p, q), compute_index(p, q, opts))).collect()
}

/// Parse a sweep file: one `p/q` (or `p q`, `p,q`) per line; blank lines and
/// `#` comments are skipped.
pub fn parse_families(text: &str) -> Result<Vec<(u32, u32)>> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i, line.split('#').next().unwrap_or("").trim()))
        .filter(|(_, line)| !line.is_empty())
        .map(|(i, line)| {
            let parts: Vec<&str> = line.split(['/', ',', ' ', '\t']).filter(|s| !s.is_empty()).collect();
            match parts.as_slice() {
                [p, q] => match (p.parse(), q.parse()) {
                    (Ok(p), Ok(q)) => {
                        RotationNumber::new(p, q)?;
                        Ok((p, q))
                    }
                    _ => Err(Error::Validation(format!("line {}: cannot parse {line:?}", i + 1))),
                },
                _ => Err(Error::Validation(format!("line {}: expected p/q, got {line:?}", i + 1))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formulas() {
        let b = Bounds::for_rotation(RotationNumber::new(2, 3).unwrap(), 12);
        assert_eq!((b.thm_lower, b.thm_upper, b.rough_upper, b.ind_s_formula), (31, 33, 62, 12));
        let b = Bounds::for_rotation(RotationNumber::new(5, 8).unwrap(), 16);
        assert_eq!((b.thm_lower, b.thm_upper, b.ind_s_formula), (41, 45, 16));
    }

    #[test]
    fn parses_family_lists() {
        let fams = parse_families("# families\n2/3\n5 8\n\n7,10 # comment\n").unwrap();
        assert_eq!(fams, vec![(2, 3), (5, 8), (7, 10)]);
        assert!(parse_families("1/2\n").is_err());
        assert!(parse_families("2/x\n").is_err());
    }

    #[test]
    fn mode_record_picks_symmetry_class() {
        let split = EvenSplit { plus: Counts { neg: 1, zero: 2 }, minus: Counts { neg: 3, zero: 4 } };
        let full = split.plus.add(split.minus);
        let r0 = ModeRecord::new(0, true, Method::Direct, full, Some(split));
        let r1 = ModeRecord::new(1, true, Method::Direct, full, Some(split));
        assert_eq!((r0.neg, r0.zero, r1.neg, r1.zero), (1, 2, 3, 4));
        assert_eq!(r0.full(), Some(full));
    }
}
