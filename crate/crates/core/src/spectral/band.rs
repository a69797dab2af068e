//! Hermitian matrices made of a band (half-bandwidth `kd`) plus a small
//! border of at most four unknowns coupled to arbitrary interior rows.
//!
//! A cyclic block-tridiagonal operator fits this shape once its last node
//! is moved into the border. `A - λI` is factored as
//! `[L D Lᴴ, A_IB; A_BI, A_BB]` with a Schur complement on the border, which
//! yields the inertia (Sylvester) in `O(n kd²)` and linear solves for inverse
//! iteration.

// Index loops mirror the textbook LDLᴴ recurrences.
#![allow(clippy::needless_range_loop)]

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Largest border size.
pub const MAX_BORDER: usize = 4;
type Border<T> = [[T; MAX_BORDER]; MAX_BORDER];

/// Scalars the operator may be built over.
pub trait Field:
    Copy
    + Send
    + Sync
    + Debug
    + PartialEq
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const ZERO: Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn scale(self, s: f64) -> Self;
    /// Drops the imaginary part when `Self` is real.
    fn from_complex(z: Complex64) -> Self;
    fn to_complex(self) -> Complex64;
}

impl Field for f64 {
    const ZERO: Self = 0.0;
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Field for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn from_complex(z: Complex64) -> Self {
        z
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Hermitian band-plus-border matrix.
#[derive(Debug, Clone)]
pub struct BorderedBand<T> {
    n: usize,
    kd: usize,
    diag: Vec<f64>,
    /// `sub[c * kd + (j - 1)] = A[c + j][c]` for `j = 1..=kd`.
    sub: Vec<T>,
    nb: usize,
    border: Border<T>,
    /// Entries `(b, c, A[n + b][c])` of the border rows.
    coupling: Vec<(usize, usize, T)>,
}

impl<T: Field> BorderedBand<T> {
    pub fn new(n: usize, kd: usize, nb: usize) -> Self {
        assert!(kd >= 1 && nb <= MAX_BORDER);
        BorderedBand {
            n,
            kd,
            diag: vec![0.0; n],
            sub: vec![T::ZERO; n * kd],
            nb,
            border: [[T::ZERO; MAX_BORDER]; MAX_BORDER],
            coupling: Vec::new(),
        }
    }

    /// Total dimension.
    pub fn dim(&self) -> usize {
        self.n + self.nb
    }

    /// Adds `v` at `(r, c)` and its conjugate at `(c, r)`.
    /// Indices at or above the interior size address the border.
    pub fn add(&mut self, r: usize, c: usize, v: T) {
        if r < c {
            self.add(c, r, v.conj());
            return;
        }
        match (r >= self.n, c >= self.n) {
            (false, false) => {
                if r == c {
                    self.diag[r] += v.re();
                } else {
                    let j = r - c;
                    assert!(j <= self.kd, "entry ({r}, {c}) outside the band");
                    let k = c * self.kd + j - 1;
                    self.sub[k] = self.sub[k] + v;
                }
            }
            (true, false) => self.coupling.push((r - self.n, c, v)),
            (true, true) => {
                let (b, bc) = (r - self.n, c - self.n);
                self.border[b][bc] = self.border[b][bc] + v;
                if b != bc {
                    self.border[bc][b] = self.border[bc][b] + v.conj();
                }
            }
            (false, true) => unreachable!(),
        }
    }

    /// Entry `(r, c)` for any indices.
    pub fn get(&self, r: usize, c: usize) -> T {
        if r < c {
            return self.get(c, r).conj();
        }
        match (r >= self.n, c >= self.n) {
            (false, false) => {
                if r == c {
                    T::from_complex(Complex64::new(self.diag[r], 0.0))
                } else if r - c <= self.kd {
                    self.sub[c * self.kd + r - c - 1]
                } else {
                    T::ZERO
                }
            }
            (true, false) => self
                .coupling
                .iter()
                .filter(|e| e.0 == r - self.n && e.1 == c)
                .fold(T::ZERO, |acc, e| acc + e.2),
            (true, true) => self.border[r - self.n][c - self.n],
            (false, true) => unreachable!(),
        }
    }

    /// `A x`.
    pub fn mul(&self, x: &[T]) -> Vec<T> {
        let (n, kd, nb) = (self.n, self.kd, self.nb);
        assert_eq!(x.len(), n + nb);
        let mut y: Vec<T> = (0..n).map(|k| x[k].scale(self.diag[k])).collect();
        y.extend((0..nb).map(|b| (0..nb).fold(T::ZERO, |acc, c| acc + self.border[b][c] * x[n + c])));
        for c in 0..n {
            for j in 1..=kd.min(n - 1 - c) {
                let v = self.sub[c * kd + j - 1];
                y[c + j] = y[c + j] + v * x[c];
                y[c] = y[c] + v.conj() * x[c + j];
            }
        }
        for &(b, c, v) in &self.coupling {
            y[n + b] = y[n + b] + v * x[c];
            y[c] = y[c] + v.conj() * x[n + b];
        }
        y
    }

    /// Largest absolute row sum; bounds the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let mut rows = vec![0.0f64; self.dim()];
        for (r, d) in self.diag.iter().enumerate() {
            rows[r] += d.abs();
        }
        for c in 0..self.n {
            for j in 1..=self.kd {
                if c + j < self.n {
                    let a = self.sub[c * self.kd + j - 1].norm_sqr().sqrt();
                    rows[c + j] += a;
                    rows[c] += a;
                }
            }
        }
        for &(b, c, v) in &self.coupling {
            let a = v.norm_sqr().sqrt();
            rows[self.n + b] += a;
            rows[c] += a;
        }
        for b in 0..self.nb {
            for bc in 0..self.nb {
                rows[self.n + b] += self.border[b][bc].norm_sqr().sqrt();
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Factor `A - shift·I`.
    pub fn factor(&self, shift: f64) -> Factorization<T> {
        let (n, kd, nb) = (self.n, self.kd, self.nb);
        let tiny = f64::EPSILON * self.norm_bound().max(1.0);
        let mut d = vec![0.0; n];
        let mut l = vec![T::ZERO; n * kd];
        let mut y = vec![[T::ZERO; MAX_BORDER]; n];
        let mut a_ib = vec![[T::ZERO; MAX_BORDER]; n];
        for &(b, c, v) in &self.coupling {
            a_ib[c][b] = a_ib[c][b] + v.conj();
        }
        let lo = |r: usize, c: usize, l: &[T]| l[c * kd + r - c - 1];
        for k in 0..n {
            let first = k.saturating_sub(kd);
            let mut dk = self.diag[k] - shift;
            for c in first..k {
                dk -= lo(k, c, &l).norm_sqr() * d[c];
            }
            if dk.abs() < tiny {
                dk = tiny;
            }
            d[k] = dk;
            for i in 1..=kd {
                let r = k + i;
                if r >= n {
                    break;
                }
                let mut v = self.sub[k * kd + i - 1];
                for c in r.saturating_sub(kd)..k {
                    v = v - (lo(r, c, &l) * lo(k, c, &l).conj()).scale(d[c]);
                }
                l[k * kd + i - 1] = v.scale(1.0 / dk);
            }
            let mut yk = a_ib[k];
            for c in first..k {
                let lkc = lo(k, c, &l);
                for b in 0..nb {
                    yk[b] = yk[b] - lkc * y[c][b];
                }
            }
            y[k] = yk;
        }
        let mut schur = self.border;
        for b in 0..nb {
            schur[b][b] = schur[b][b] - T::from_complex(Complex64::new(shift, 0.0));
        }
        for k in 0..n {
            let inv = 1.0 / d[k];
            for b in 0..nb {
                for bc in 0..nb {
                    schur[b][bc] = schur[b][bc] - (y[k][b].conj() * y[k][bc]).scale(inv);
                }
            }
        }
        Factorization { n, kd, nb, d, l, y, schur }
    }

    /// Number of eigenvalues strictly below `shift`.
    pub fn count_below(&self, shift: f64) -> usize {
        self.factor(shift).negative_count()
    }
}

/// `A - σI = [L D Lᴴ, A_IB; A_BI, A_BB - σI]` with border Schur complement.
#[derive(Debug, Clone)]
pub struct Factorization<T> {
    n: usize,
    kd: usize,
    nb: usize,
    d: Vec<f64>,
    l: Vec<T>,
    y: Vec<[T; MAX_BORDER]>,
    schur: Border<T>,
}

fn small_matrix<T: Field>(m: &Border<T>, nb: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(nb, nb, |r, c| m[r][c].to_complex())
}

impl<T: Field> Factorization<T> {
    /// Negative inertia of the factored matrix.
    pub fn negative_count(&self) -> usize {
        let interior = self.d.iter().filter(|&&x| x < 0.0).count();
        let border = if self.nb == 0 {
            0
        } else {
            small_matrix(&self.schur, self.nb)
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .filter(|&&x| x < 0.0)
                .count()
        };
        interior + border
    }

    /// Solve `(A - σI) x = rhs`.
    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let (n, kd, nb) = (self.n, self.kd, self.nb);
        assert_eq!(rhs.len(), n + nb);
        let lo = |r: usize, c: usize| self.l[c * kd + r - c - 1];
        // z = L⁻¹ b_I
        let mut z = rhs[..n].to_vec();
        for k in 0..n {
            let mut v = z[k];
            for c in k.saturating_sub(kd)..k {
                v = v - lo(k, c) * z[c];
            }
            z[k] = v;
        }
        // Border: S x_B = b_B - Yᴴ D⁻¹ z
        let mut g = [T::ZERO; MAX_BORDER];
        for b in 0..nb {
            let mut v = rhs[n + b];
            for k in 0..n {
                v = v - (self.y[k][b].conj() * z[k]).scale(1.0 / self.d[k]);
            }
            g[b] = v;
        }
        let xb = solve_small(&self.schur, g, nb);
        // x_I = L⁻ᴴ D⁻¹ (z - Y x_B)
        let mut w: Vec<T> = (0..n)
            .map(|k| {
                let mut v = z[k];
                for b in 0..nb {
                    v = v - self.y[k][b] * xb[b];
                }
                v.scale(1.0 / self.d[k])
            })
            .collect();
        for k in (0..n).rev() {
            let mut v = w[k];
            for i in 1..=kd {
                if k + i >= n {
                    break;
                }
                v = v - lo(k + i, k).conj() * w[k + i];
            }
            w[k] = v;
        }
        w.extend_from_slice(&xb[..nb]);
        w
    }
}

fn solve_small<T: Field>(m: &Border<T>, g: [T; MAX_BORDER], nb: usize) -> [T; MAX_BORDER] {
    let mut out = [T::ZERO; MAX_BORDER];
    if nb == 0 {
        return out;
    }
    let a = small_matrix(m, nb);
    let rhs = DVector::from_fn(nb, |i, _| g[i].to_complex());
    // A singular Schur block only happens at an exact eigenvalue; a
    // pseudo-inverse keeps inverse iteration going.
    let x = a
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .unwrap_or_else(|| a.pseudo_inverse(1e-300).map(|p| p * &rhs).unwrap_or(rhs));
    for i in 0..nb {
        out[i] = T::from_complex(x[i]);
    }
    out
}
