//! Scalar and 2×2 Sturm-Liouville problems `-(p h')' + Q h = λ h` on an
//! interval of length `L`, with periodic, antiperiodic, twisted or Dirichlet
//! boundary conditions.
//!
//! Problems are discretized in divergence form on a uniform grid (weight at
//! half nodes), which keeps the discrete operator Hermitian. Eigenvalues below
//! a cutoff come from inertia-count bisection; two meshes are combined by
//! Richardson extrapolation before eigenvalues are classified as negative,
//! zero or positive.

mod band;
pub mod checks;
mod eigen;
pub mod oscillation;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use band::{BorderedBand, Factorization, Field};
pub use checks::{spectral_index_formula, antiperiodic_check_l0, spectral_index, verify_high_l_positive, AntiperiodicCheck};
pub use oscillation::{oscillation_index, zero_count, Periodicity, SturmLabel};

/// Default zero threshold for extrapolated eigenvalues.
pub const TAU_ZERO: f64 = 1e-5;

/// Smallest mesh accepted by [`discretize`].
pub const MIN_CELLS: usize = 128;

/// Real symmetric 2×2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl Sym2 {
    pub fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Sym2 { a11, a12, a22 }
    }

    pub fn diagonal(a11: f64, a22: f64) -> Self {
        Sym2 { a11, a12: 0.0, a22 }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.a11 + self.a22);
        let rad = (0.25 * (self.a11 - self.a22).powi(2) + self.a12 * self.a12).sqrt();
        [mean - rad, mean + rad]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a11 > 0.0 && self.a11 * self.a22 - self.a12 * self.a12 > 0.0
    }

    /// `D S D` with `D = diag(1, -1)`.
    pub fn flip(&self) -> Self {
        Sym2 { a12: -self.a12, ..*self }
    }

    pub fn max_abs(&self) -> f64 {
        self.a11.abs().max(self.a12.abs()).max(self.a22.abs())
    }
}

/// Boundary condition on `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Periodic,
    Antiperiodic,
    /// `h₁(t + L) = ω h₁(t)`, `h₂(t + L) = -ω h₂(t)`; a scalar problem uses
    /// `h(t + L) = ω h(t)`.
    Twisted(Complex64),
    Dirichlet,
}

impl Boundary {
    /// Phase relating `h_c(t + L)` to `h_c(t)` for component `c`.
    fn wrap(&self, dim: usize, c: usize) -> Option<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            Boundary::Periodic => Some(one),
            Boundary::Antiperiodic => Some(-one),
            Boundary::Twisted(w) => Some(if dim == 2 && c == 1 { -w } else { w }),
            Boundary::Dirichlet => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::Antiperiodic => "antiperiodic",
            Boundary::Twisted(_) => "twisted",
            Boundary::Dirichlet => "dirichlet",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Twisted(w) => write!(f, "twisted({:.6}{:+.6}i)", w.re, w.im),
            other => f.write_str(other.label()),
        }
    }
}

/// A Sturm-Liouville problem with coefficients sampled at `resolution + 1`
/// uniform nodes of `[0, length]`.
#[derive(Debug, Clone)]
pub struct SlSystem {
    dim: usize,
    length: f64,
    boundary: Boundary,
    weight: Arc<Vec<f64>>,
    potential: Arc<Vec<Sym2>>,
}

impl SlSystem {
    /// Scalar problem; `potential` holds `Q(t)` samples.
    pub fn scalar(length: f64, boundary: Boundary, weight: Vec<f64>, potential: Vec<f64>) -> Result<Self> {
        let potential = potential.into_iter().map(|q| Sym2::diagonal(q, 0.0)).collect();
        Self::build(1, length, boundary, weight, potential)
    }

    /// 2×2 system.
    pub fn matrix(length: f64, boundary: Boundary, weight: Vec<f64>, potential: Vec<Sym2>) -> Result<Self> {
        Self::build(2, length, boundary, weight, potential)
    }

    fn build(dim: usize, length: f64, boundary: Boundary, weight: Vec<f64>, potential: Vec<Sym2>) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Validation(format!("interval length must be positive, got {length}")));
        }
        if weight.len() != potential.len() || weight.len() < 3 {
            return Err(Error::Validation(format!(
                "need matching coefficient samples, got {} weights and {} potentials",
                weight.len(),
                potential.len()
            )));
        }
        if let Some((i, w)) = weight.iter().enumerate().find(|(_, w)| !(**w > 0.0)) {
            return Err(Error::Validation(format!("weight must be positive; sample {i} is {w}")));
        }
        if let Boundary::Twisted(w) = boundary {
            if (w.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Validation(format!("twist must have modulus 1, got |ω| = {}", w.norm())));
            }
        }
        Ok(SlSystem {
            dim,
            length,
            boundary,
            weight: Arc::new(weight),
            potential: Arc::new(potential),
        })
    }

    /// Same coefficients under another boundary condition.
    pub fn with_boundary(&self, boundary: Boundary) -> Result<Self> {
        if let Boundary::Twisted(w) = boundary {
            if (w.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Validation(format!("twist must have modulus 1, got |ω| = {}", w.norm())));
            }
        }
        Ok(SlSystem { boundary, ..self.clone() })
    }

    /// The problem for `λ - shift`: the potential lowered by `shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        let potential = self
            .potential
            .iter()
            .map(|q| Sym2 { a11: q.a11 - shift, a22: q.a22 - shift, ..*q })
            .collect();
        SlSystem { potential: Arc::new(potential), ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Number of sample intervals.
    pub fn resolution(&self) -> usize {
        self.weight.len() - 1
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn potential(&self) -> &[Sym2] {
        &self.potential
    }

    /// `min_t λ_min(Q(t))`, a lower bound for every eigenvalue.
    pub fn potential_floor(&self) -> f64 {
        self.potential
            .iter()
            .map(|q| if self.dim == 1 { q.a11 } else { q.eigenvalues()[0] })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Real(BorderedBand<f64>),
    Complex(BorderedBand<Complex64>),
}

/// Discretized Hermitian operator of an [`SlSystem`].
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    dim: usize,
    step: f64,
    boundary: Boundary,
    floor: f64,
    layout: Layout,
    repr: Repr,
}

/// Discretize `sys` with `cells` uniform cells. The sample grid must
/// contain every node and half node, i.e. `resolution % (2·cells) == 0`.
pub fn discretize(sys: &SlSystem, cells: usize) -> Result<DiscreteOperator> {
    if cells < MIN_CELLS {
        return Err(Error::Validation(format!("mesh needs at least {MIN_CELLS} cells, got {cells}")));
    }
    let res = sys.resolution();
    if !res.is_multiple_of(2 * cells) {
        return Err(Error::Validation(format!(
            "mesh of {cells} cells incompatible with {res} coefficient samples"
        )));
    }
    let stride = res / cells;
    let h = sys.length / cells as f64;
    let inv_h2 = 1.0 / (h * h);
    let d = sys.dim;
    let m = cells;
    let half_weight = |i: usize| sys.weight[i * stride + stride / 2] * inv_h2;
    let node_q = |i: usize| sys.potential[i * stride];

    let wraps: Vec<Option<Complex64>> = (0..d).map(|c| sys.boundary.wrap(d, c)).collect();
    let real = wraps.iter().all(|w| w.is_none_or(|w| w.im == 0.0));
    let layout = Layout::new(m, sys.boundary == Boundary::Dirichlet);

    fn fill<T: Field>(
        a: &mut BorderedBand<T>,
        d: usize,
        layout: &Layout,
        half_weight: &dyn Fn(usize) -> f64,
        node_q: &dyn Fn(usize) -> Sym2,
        wraps: &[Option<Complex64>],
    ) {
        let real = |x: f64| T::from_complex(Complex64::new(x, 0.0));
        let m = layout.cells;
        for &i in &layout.nodes {
            let row = layout.index(i) * d;
            let q = node_q(i);
            let left = half_weight(if i == 0 { m - 1 } else { i - 1 });
            let diag = left + half_weight(i);
            a.add(row, row, real(diag + q.a11));
            if d == 2 {
                a.add(row + 1, row + 1, real(diag + q.a22));
                a.add(row + 1, row, real(q.a12));
            }
            let next = i + 1;
            if next < m && layout.contains(next) {
                let col = layout.index(next) * d;
                for c in 0..d {
                    a.add(col + c, row + c, real(-half_weight(i)));
                }
            }
        }
        if !layout.dirichlet {
            // h(t_m) = W h(t_0): the last node couples to the first through W.
            let w = half_weight(m - 1);
            let (last, first) = (layout.index(m - 1) * d, layout.index(0) * d);
            for (c, phase) in wraps.iter().enumerate().take(d) {
                let phase = phase.expect("cyclic boundary");
                a.add(last + c, first + c, T::from_complex(-phase * w));
            }
        }
    }

    let n_int = layout.interior * d;
    let nb = layout.border.len() * d;
    let repr = if real {
        let mut a = BorderedBand::<f64>::new(n_int, d, nb);
        fill(&mut a, d, &layout, &half_weight, &node_q, &wraps);
        Repr::Real(a)
    } else {
        let mut a = BorderedBand::<Complex64>::new(n_int, d, nb);
        fill(&mut a, d, &layout, &half_weight, &node_q, &wraps);
        Repr::Complex(a)
    };
    let floor = layout
        .nodes
        .iter()
        .map(|&i| node_q(i))
        .map(|q| if d == 1 { q.a11 } else { q.eigenvalues()[0] })
        .fold(f64::INFINITY, f64::min);
    Ok(DiscreteOperator { dim: d, step: h, boundary: sys.boundary, floor, layout, repr })
}

/// Placement of grid nodes in the bordered matrix. Cyclic problems put the
/// last node in the border so the rest is banded.
#[derive(Debug, Clone)]
struct Layout {
    cells: usize,
    dirichlet: bool,
    /// Grid nodes carrying unknowns, in node order.
    nodes: Vec<usize>,
    border: Vec<usize>,
    interior: usize,
    /// Matrix block index of each grid node (`usize::MAX` when absent).
    position: Vec<usize>,
}

impl Layout {
    fn new(cells: usize, dirichlet: bool) -> Self {
        let (nodes, border): (Vec<usize>, Vec<usize>) = if dirichlet {
            ((1..cells).collect(), Vec::new())
        } else {
            ((0..cells).collect(), vec![cells - 1])
        };
        let mut position = vec![usize::MAX; cells + 1];
        let mut next = 0;
        for &i in nodes.iter().filter(|i| !border.contains(i)) {
            position[i] = next;
            next += 1;
        }
        let interior = next;
        for &i in &border {
            position[i] = next;
            next += 1;
        }
        Layout { cells, dirichlet, nodes, border, interior, position }
    }

    fn contains(&self, node: usize) -> bool {
        self.position[node] != usize::MAX
    }

    fn index(&self, node: usize) -> usize {
        self.position[node]
    }
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> usize {
        self.layout.cells
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of unknowns.
    pub fn size(&self) -> usize {
        match &self.repr {
            Repr::Real(a) => a.dim(),
            Repr::Complex(a) => a.dim(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.repr, Repr::Complex(_))
    }

    /// Grid times of the unknowns, one per node.
    pub fn node_times(&self) -> Vec<f64> {
        self.layout.nodes.iter().map(|&i| i as f64 * self.step).collect()
    }

    /// Matrix index of the node-major unknown `r`.
    fn matrix_index(&self, r: usize) -> usize {
        let d = self.dim;
        self.layout.index(self.layout.nodes[r / d]) * d + r % d
    }

    /// Entry `(r, c)` with unknowns in node-major order.
    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        let (r, c) = (self.matrix_index(r), self.matrix_index(c));
        match &self.repr {
            Repr::Real(a) => a.get(r, c).to_complex(),
            Repr::Complex(a) => a.get(r, c),
        }
    }

    /// Dense copy, for verification on small meshes.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |r, c| self.entry(r, c))
    }

    /// Number of eigenvalues strictly below `shift`.
    pub fn count_below(&self, shift: f64) -> usize {
        match &self.repr {
            Repr::Real(a) => a.count_below(shift),
            Repr::Complex(a) => a.count_below(shift),
        }
    }

    /// Lower bound for the spectrum: the weight part is positive semidefinite.
    /// The margin keeps an eigenvalue sitting at the floor clear of roundoff
    /// in the inertia count.
    pub fn lower_bound(&self) -> f64 {
        self.floor - 1e-3 * (1.0 + self.floor.abs())
    }

    /// All eigenvalues below `cutoff`, ascending.
    pub fn eigenvalues_below(&self, cutoff: f64) -> Vec<f64> {
        let lo = self.lower_bound();
        match &self.repr {
            Repr::Real(a) => eigen::bisect_all(a, lo, cutoff),
            Repr::Complex(a) => eigen::bisect_all(a, lo, cutoff),
        }
    }

    /// Eigenvalues in `[lo, hi)`, ascending.
    pub fn eigenvalues_between(&self, lo: f64, hi: f64) -> Vec<f64> {
        match &self.repr {
            Repr::Real(a) => eigen::bisect_all(a, lo, hi),
            Repr::Complex(a) => eigen::bisect_all(a, lo, hi),
        }
    }

    /// Unit eigenvectors for the given (accurate) eigenvalues, node-major.
    pub fn eigenvectors(&self, values: &[f64]) -> Vec<Vec<Complex64>> {
        let raw: Vec<Vec<Complex64>> = match &self.repr {
            Repr::Real(a) => eigen::inverse_iteration(a, values)
                .into_iter()
                .map(|v| v.into_iter().map(Field::to_complex).collect())
                .collect(),
            Repr::Complex(a) => eigen::inverse_iteration(a, values),
        };
        raw.into_iter()
            .map(|v| (0..v.len()).map(|r| v[self.matrix_index(r)]).collect())
            .collect()
    }

    /// `A x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        assert_eq!(x.len(), n);
        let d = self.dim;
        let nodes = n / d;
        let cyclic = self.boundary != Boundary::Dirichlet;
        (0..n)
            .map(|r| {
                let node = r / d;
                let mut neighbours = vec![node];
                if node > 0 {
                    neighbours.push(node - 1);
                } else if cyclic {
                    neighbours.push(nodes - 1);
                }
                if node + 1 < nodes {
                    neighbours.push(node + 1);
                } else if cyclic {
                    neighbours.push(0);
                }
                neighbours.sort_unstable();
                neighbours.dedup();
                neighbours
                    .into_iter()
                    .flat_map(|j| (j * d..(j + 1) * d).map(|c| self.entry(r, c) * x[c]))
                    .sum()
            })
            .collect()
    }
}

/// Eigenvalues below a cutoff with their sign classification.
#[derive(Debug, Clone)]
pub struct SpectrumSummary {
    pub dim: usize,
    pub boundary: Boundary,
    pub cutoff: f64,
    /// Coarse mesh; the fine mesh has twice as many cells.
    pub mesh: usize,
    pub tau_zero: f64,
    /// Richardson-extrapolated eigenvalues below the cutoff.
    pub eigenvalues: Vec<f64>,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub neg: usize,
    pub zero: usize,
    /// Fine-mesh eigenfunctions, node-major, when requested.
    pub eigenfunctions: Option<Vec<Vec<Complex64>>>,
    /// Fine-mesh node times of the eigenfunctions.
    pub times: Vec<f64>,
    pub method: &'static str,
}

impl SpectrumSummary {
    /// Component `c` of eigenfunction `k`.
    pub fn component(&self, k: usize, c: usize) -> Option<Vec<Complex64>> {
        let f = self.eigenfunctions.as_ref()?.get(k)?;
        Some(f.iter().skip(c).step_by(self.dim).copied().collect())
    }
}

/// Classify eigenvalues against `τ`: negative below `-τ`, zero within `τ`.
/// Values with `τ < |λ| ≤ 3τ` are too close to call.
pub fn classify(values: &[f64], tau: f64) -> Result<(usize, usize)> {
    let mut neg = 0;
    let mut zero = 0;
    for &v in values {
        if v.abs() <= tau {
            zero += 1;
        } else if v.abs() <= 3.0 * tau {
            return Err(Error::Ambiguous(format!(
                "eigenvalue {v:.3e} lies between tau = {tau:.1e} and 3 tau"
            )));
        } else if v < 0.0 {
            neg += 1;
        }
    }
    Ok((neg, zero))
}

/// Fine operator with extrapolated, coarse and fine eigenvalues.
type Extrapolation = (DiscreteOperator, Vec<f64>, Vec<f64>, Vec<f64>);

fn richardson(sys: &SlSystem, cutoff: f64, cells: usize) -> Result<Extrapolation> {
    if !sys.resolution().is_multiple_of(4 * cells) {
        return Err(Error::Validation(format!(
            "{} coefficient samples cannot carry meshes of {cells} and {} cells",
            sys.resolution(),
            2 * cells
        )));
    }
    let coarse_op = discretize(sys, cells)?;
    let fine_op = discretize(sys, 2 * cells)?;
    let margin = 0.5 + 0.1 * cutoff.abs();
    let coarse = coarse_op.eigenvalues_below(cutoff + margin);
    let fine = fine_op.eigenvalues_below(cutoff + margin);
    let k = coarse.len().min(fine.len());
    let extrapolated: Vec<f64> = (0..k)
        .map(|i| (4.0 * fine[i] - coarse[i]) / 3.0)
        .take_while(|&v| v < cutoff)
        .collect();
    let kept = extrapolated.len();
    let coarse: Vec<f64> = coarse.into_iter().take(kept).collect();
    let fine: Vec<f64> = fine.into_iter().take(kept).collect();
    Ok((fine_op, extrapolated, coarse, fine))
}

/// Negative and zero counts without resolving the whole spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SignCount {
    pub neg: usize,
    pub zero: usize,
    /// Eigenvalues below `-window`, counted on both meshes.
    pub far_negative: usize,
    pub window: f64,
    /// Extrapolated eigenvalues inside `[-window, window)`.
    pub near_zero: Vec<f64>,
    pub mesh: usize,
}

/// Half-width of the window around 0 resolved by [`count_signs`].
pub const SIGN_WINDOW: f64 = 0.05;

/// Count negative and zero eigenvalues from meshes of `cells` and
/// `2·cells`. Only eigenvalues within [`SIGN_WINDOW`] of 0 are computed and
/// extrapolated; those further below are counted by inertia and must agree
/// on both meshes. Classification follows [`classify`].
pub fn count_signs(sys: &SlSystem, cells: usize, tau: f64) -> Result<SignCount> {
    if !sys.resolution().is_multiple_of(4 * cells) {
        return Err(Error::Validation(format!(
            "{} coefficient samples cannot carry meshes of {cells} and {} cells",
            sys.resolution(),
            2 * cells
        )));
    }
    let coarse_op = discretize(sys, cells)?;
    let fine_op = discretize(sys, 2 * cells)?;
    // A window edge that happens to sit on an eigenvalue is moved once or twice.
    for window in [SIGN_WINDOW, 1.37 * SIGN_WINDOW, 0.71 * SIGN_WINDOW] {
        let far = (coarse_op.count_below(-window), fine_op.count_below(-window));
        let coarse = coarse_op.eigenvalues_between(-window, window);
        let fine = fine_op.eigenvalues_between(-window, window);
        if far.0 != far.1 || coarse.len() != fine.len() {
            continue;
        }
        let near_zero: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
        let (neg, zero) = classify(&near_zero, tau)?;
        return Ok(SignCount { neg: far.1 + neg, zero, far_negative: far.1, window, near_zero, mesh: cells });
    }
    Err(Error::numerical("eigenvalue counts near 0 differ between meshes", cells as f64))
}

/// Eigenvalues of `sys` below `cutoff` from meshes of `cells` and
/// `2·cells`, classified with threshold `tau`.
pub fn spectrum_below(sys: &SlSystem, cutoff: f64, cells: usize, tau: f64) -> Result<SpectrumSummary> {
    summarize(sys, cutoff, cells, tau, false)
}

/// As [`spectrum_below`], also returning fine-mesh eigenfunctions.
pub fn spectrum_with_eigenfunctions(sys: &SlSystem, cutoff: f64, cells: usize, tau: f64) -> Result<SpectrumSummary> {
    summarize(sys, cutoff, cells, tau, true)
}

fn summarize(sys: &SlSystem, cutoff: f64, cells: usize, tau: f64, vectors: bool) -> Result<SpectrumSummary> {
    let (fine_op, eigenvalues, coarse, fine) = richardson(sys, cutoff, cells)?;
    let (neg, zero) = classify(&eigenvalues, tau)?;
    let eigenfunctions = vectors.then(|| fine_op.eigenvectors(&fine));
    Ok(SpectrumSummary {
        dim: sys.dim,
        boundary: sys.boundary,
        cutoff,
        mesh: cells,
        tau_zero: tau,
        eigenvalues,
        coarse,
        fine,
        neg,
        zero,
        eigenfunctions,
        times: if vectors { fine_op.node_times() } else { Vec::new() },
        method: "fd2-richardson",
    })
}

/// JSON form of a spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub l: u32,
    pub bc: String,
    pub omega_index: Option<u32>,
    pub n: usize,
    #[serde(with = "crate::json17")]
    pub cutoff: f64,
    #[serde(with = "crate::json17::vec")]
    pub eigenvalues: Vec<f64>,
    pub neg: usize,
    pub zero: usize,
}

impl SpectrumRecord {
    pub fn new(l: u32, omega_index: Option<u32>, s: &SpectrumSummary) -> Self {
        SpectrumRecord {
            l,
            bc: s.boundary.label().to_owned(),
            omega_index,
            n: s.mesh,
            cutoff: s.cutoff,
            eigenvalues: s.eigenvalues.clone(),
            neg: s.neg,
            zero: s.zero,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn constant(dim: usize, length: f64, bc: Boundary, p: f64, q: Sym2, res: usize) -> SlSystem {
        let w = vec![p; res + 1];
        let pot = vec![q; res + 1];
        if dim == 1 {
            SlSystem::scalar(length, bc, w, pot.iter().map(|s| s.a11).collect()).unwrap()
        } else {
            SlSystem::matrix(length, bc, w, pot).unwrap()
        }
    }

    #[test]
    fn fourier_modes_periodic_and_antiperiodic() {
        let sys = constant(1, 2.0 * PI, Boundary::Periodic, 1.0, Sym2::default(), 2048);
        let s = spectrum_below(&sys, 10.0, 256, TAU_ZERO).unwrap();
        let expected = [0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0];
        assert_eq!(s.eigenvalues.len(), expected.len());
        for (a, b) in s.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
        assert_eq!((s.neg, s.zero), (0, 1));

        let anti = sys.with_boundary(Boundary::Antiperiodic).unwrap();
        let s = spectrum_below(&anti, 7.0, 256, TAU_ZERO).unwrap();
        let expected = [0.25, 0.25, 2.25, 2.25, 6.25, 6.25];
        assert_eq!(s.eigenvalues.len(), expected.len());
        for (a, b) in s.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn raw_error_is_second_order() {
        let sys = constant(1, 2.0 * PI, Boundary::Periodic, 1.0, Sym2::default(), 2048);
        let e = |m: usize| (discretize(&sys, m).unwrap().eigenvalues_below(5.0)[3] - 4.0).abs();
        let ratio = e(128) / e(256);
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn dirichlet_sine_modes() {
        let sys = constant(1, PI, Boundary::Dirichlet, 1.0, Sym2::diagonal(-2.0, 0.0), 1024);
        let s = spectrum_below(&sys, 8.0, 128, TAU_ZERO).unwrap();
        let expected = [-1.0, 2.0, 7.0];
        for (a, b) in s.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-6);
        }
        assert_eq!(s.neg, 1);
    }

    #[test]
    fn operator_is_hermitian() {
        let mut pot = Vec::new();
        let mut w = Vec::new();
        let res = 512;
        for i in 0..=res {
            let t = i as f64 / res as f64;
            w.push(1.0 + 0.3 * (2.0 * PI * t).cos());
            pot.push(Sym2::new((2.0 * PI * t).sin(), 0.4 * (2.0 * PI * t).cos(), -1.0));
        }
        let w0 = Complex64::from_polar(1.0, 0.7);
        let sys = SlSystem::matrix(1.0, Boundary::Twisted(w0), w, pot).unwrap();
        let op = discretize(&sys, 128).unwrap();
        assert!(op.is_complex());
        let a = op.to_dense();
        assert_eq!(a, a.adjoint());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SlSystem::scalar(1.0, Boundary::Periodic, vec![1.0, 0.0, 1.0], vec![0.0; 3]).is_err());
        assert!(SlSystem::scalar(1.0, Boundary::Twisted(Complex64::new(2.0, 0.0)), vec![1.0; 3], vec![0.0; 3]).is_err());
        let sys = constant(1, 1.0, Boundary::Periodic, 1.0, Sym2::default(), 300);
        assert!(discretize(&sys, 128).is_err());
        assert!(discretize(&sys, 64).is_err());
    }

    #[test]
    fn classification_rules() {
        assert_eq!(classify(&[-1.0, -2e-6, 5e-6, 0.5], 1e-5).unwrap(), (1, 2));
        assert!(matches!(classify(&[2e-5], 1e-5), Err(Error::Ambiguous(_))));
    }

    #[test]
    fn apply_matches_dense() {
        let w0 = Complex64::from_polar(1.0, 1.1);
        let sys = constant(2, 3.0, Boundary::Twisted(w0), 1.3, Sym2::new(0.2, 0.5, -0.4), 512);
        let op = discretize(&sys, 128).unwrap();
        let x: Vec<Complex64> = (0..op.size()).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let dense = op.to_dense() * nalgebra::DVector::from_vec(x.clone());
        for (u, v) in op.apply(&x).iter().zip(dense.iter()) {
            assert!((u - v).norm() < 1e-9);
        }
    }
}
