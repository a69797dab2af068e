//! Eigenvalues by inertia-count bisection and eigenvectors by inverse
//! iteration on a [`BorderedBand`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::band::{BorderedBand, Field};
use nalgebra::DMatrix;
use num_complex::Complex64;

// Inertia counts are exact for a matrix within a few ulp of ‖A‖, so
// resolving eigenvalues below that scale is pointless.
const NORM_WIDTH: f64 = 2e-15;
const RELATIVE_WIDTH: f64 = 1e-14;
/// Eigenvalues closer than this (relative) share a Ritz subspace.
const CLUSTER: f64 = 1e-3;
// Inverse iteration shifts sit this far (relative) from the eigenvalue.
// An exact shift can coincide with an eigenvalue of a leading interior
// block, whose tiny pivot spoils the solve; anything outside the cluster
// window still decays by CLUSTER / OFFSET per solve.
const OFFSET: f64 = 1e-6;

/// All eigenvalues in `[lo, hi)`, ascending, with multiplicity. Sibling
/// brackets are refined in parallel.
pub(crate) fn bisect_all<T: Field>(a: &BorderedBand<T>, lo: f64, hi: f64) -> Vec<f64> {
    if hi <= lo {
        return Vec::new();
    }
    let width = NORM_WIDTH * a.norm_bound().max(1.0);
    // Counts within a few ulp of ‖A‖ of an eigenvalue can come out
    // non-monotone; clamping keeps the bracket tree consistent.
    let c_lo = a.count_below(lo);
    let c_hi = a.count_below(hi).max(c_lo);
    let mut out = bisect_bracket(a, width, (lo, hi), (c_lo, c_hi));
    out.sort_by(f64::total_cmp);
    out
}

fn bisect_bracket<T: Field>(a: &BorderedBand<T>, width: f64, (x0, x1): (f64, f64), (c0, c1): (usize, usize)) -> Vec<f64> {
    if c1 == c0 {
        return Vec::new();
    }
    let mid = 0.5 * (x0 + x1);
    if x1 - x0 <= width.max(RELATIVE_WIDTH * mid.abs()) {
        return vec![mid; c1 - c0];
    }
    let cm = a.count_below(mid).clamp(c0, c1);
    let (mut left, right) = rayon::join(
        || bisect_bracket(a, width, (x0, mid), (c0, cm)),
        || bisect_bracket(a, width, (mid, x1), (cm, c1)),
    );
    left.extend(right);
    left
}

fn norm<T: Field>(x: &[T]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn dot<T: Field>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::ZERO, |acc, (a, b)| acc + a.conj() * *b)
}

/// Unit eigenvectors for `values`, which must be accurate eigenvalues.
/// Vectors inside a cluster of close eigenvalues are orthogonalized.
pub(crate) fn inverse_iteration<T: Field>(a: &BorderedBand<T>, values: &[f64]) -> Vec<Vec<T>> {
    let n = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out: Vec<Vec<T>> = Vec::with_capacity(values.len());
    let mut cluster_start = 0;
    for (k, &lambda) in values.iter().enumerate() {
        if k > 0 && lambda - values[k - 1] > CLUSTER * (1.0 + lambda.abs()) {
            cluster_start = k;
        }
        let shift = lambda + OFFSET * (1.0 + lambda.abs());
        let f = a.factor(shift);
        let mut x: Vec<T> = (0..n)
            .map(|_| T::from_complex(Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        for _ in 0..6 {
            for prev in &out[cluster_start..k] {
                let c = dot(prev, &x);
                for (xi, pi) in x.iter_mut().zip(prev) {
                    *xi = *xi - c * *pi;
                }
            }
            let nx = norm(&x);
            x.iter_mut().for_each(|v| *v = v.scale(1.0 / nx));
            x = f.solve(&x);
        }
        for prev in &out[cluster_start..k] {
            let c = dot(prev, &x);
            for (xi, pi) in x.iter_mut().zip(prev) {
                *xi = *xi - c * *pi;
            }
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v = v.scale(1.0 / nx));
        out.push(x);
        let cluster_ends = k + 1 == values.len() || values[k + 1] - lambda > CLUSTER * (1.0 + values[k + 1].abs());
        if cluster_ends && k > cluster_start {
            rayleigh_ritz(a, &mut out[cluster_start..]);
        }
    }
    out
}

/// Rotate an orthonormal basis of a nearly invariant subspace onto its Ritz
/// vectors. Near a multiple eigenvalue the interior pivots of the bordered
/// factorization can be tiny, which limits each solve to about `1e-8`
/// relative accuracy; the Ritz vectors recover the residual.
fn rayleigh_ritz<T: Field>(a: &BorderedBand<T>, basis: &mut [Vec<T>]) {
    let k = basis.len();
    let images: Vec<Vec<T>> = basis.iter().map(|v| a.mul(v)).collect();
    let h = DMatrix::from_fn(k, k, |i, j| {
        let hij = dot(&basis[i], &images[j]).to_complex();
        let hji = dot(&basis[j], &images[i]).to_complex();
        0.5 * (hij + hji.conj())
    });
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let rotated: Vec<Vec<T>> = order
        .iter()
        .map(|&c| {
            let mut v = vec![T::ZERO; basis[0].len()];
            for (i, b) in basis.iter().enumerate() {
                let w = T::from_complex(eig.eigenvectors[(i, c)]);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = *vi + *bi * w;
                }
            }
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x = x.scale(1.0 / nv));
            v
        })
        .collect();
    for (b, r) in basis.iter_mut().zip(rotated) {
        *b = r;
    }
}
