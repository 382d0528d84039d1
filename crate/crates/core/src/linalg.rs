//! Thin dense-matrix helpers shared by the spectral modules.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

const SCHUR_MAX_ITER: usize = 10_000;

pub fn conj_mat(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

pub fn conj_vec(v: &CVec) -> CVec {
    v.map(|z| z.conj())
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn det(m: &CMat) -> Complex64 {
    if m.nrows() == 0 {
        return ONE;
    }
    m.clone().lu().determinant()
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn real_singular_values(m: &RMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Schatten p-norm of a matrix from its singular values.
pub fn schatten(singular: &[f64], p: f64) -> f64 {
    singular.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    let dim = m.nrows();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or_else(|| {
        Error::EigenSolver { dim, norm: m.norm() }
    })?;
    let (_, t) = schur.unpack();
    Ok((0..dim).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues (ascending) and eigenvectors (as columns) of a Hermitian matrix.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(h.nrows(), h.nrows(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Right singular vectors belonging to singular values at or below `tol`,
/// always including the smallest one. Returned as orthonormal columns with
/// the matching singular values.
pub fn near_null_space(m: &CMat, tol: f64) -> (CMat, Vec<f64>) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let mut keep: Vec<usize> = idx
        .iter()
        .copied()
        .filter(|&k| svd.singular_values[k] <= tol)
        .collect();
    if keep.is_empty() {
        keep.push(idx[0]);
    }
    let basis = CMat::from_fn(m.ncols(), keep.len(), |i, j| v_t[(keep[j], i)].conj());
    let sv = keep.iter().map(|&k| svd.singular_values[k]).collect();
    (basis, sv)
}

/// Fraction-free (Bareiss) determinant with partial pivoting.
pub fn bareiss_det(m: &CMat) -> Complex64 {
    let n = m.nrows();
    if n == 0 {
        return ONE;
    }
    let mut a = m.clone();
    let mut sign = 1.0;
    let mut prev = ONE;
    for k in 0..n - 1 {
        let pivot_row = (k..n)
            .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
            .expect("non-empty range");
        if a[(pivot_row, k)].norm() == 0.0 {
            return ZERO;
        }
        if pivot_row != k {
            a.swap_rows(pivot_row, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[(i, j)] = (a[(k, k)] * a[(i, j)] - a[(i, k)] * a[(k, j)]) / prev;
            }
        }
        prev = a[(k, k)];
    }
    a[(n - 1, n - 1)] * sign
}

/// Real roots of `coeffs[0] + coeffs[1] x + ...` from the companion matrix,
/// each polished by Newton's method. Returns `(root, converged)` pairs.
pub(crate) fn real_poly_roots(coeffs: &[f64], imag_tol: f64) -> Vec<(f64, bool)> {
    let mut c: Vec<f64> = coeffs.to_vec();
    let scale = c.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    while c.last().is_some_and(|x| x.abs() <= 1e-14 * scale) {
        c.pop();
    }
    let mut zero_roots = 0;
    while c.len() > 1 && c[0] == 0.0 {
        c.remove(0);
        zero_roots += 1;
    }
    let deg = c.len().saturating_sub(1);
    let mut roots: Vec<(f64, bool)> = vec![(0.0, true); zero_roots.min(1)];
    if deg == 0 {
        return roots;
    }
    let lead = c[deg];
    let companion = RMat::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    for z in companion.complex_eigenvalues().iter() {
        if z.im.abs() > imag_tol * (1.0 + z.re.abs()) {
            continue;
        }
        roots.push(newton_polish(&c, z.re));
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-12 * (1.0 + a.0.abs()));
    roots
}

pub(crate) fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

pub(crate) fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect()
}

fn newton_polish(c: &[f64], x0: f64) -> (f64, bool) {
    let dc = poly_derivative(c);
    let mut x = x0;
    for _ in 0..50 {
        let f = poly_eval(c, x);
        let df = poly_eval(&dc, x);
        if df == 0.0 {
            return (x, f == 0.0);
        }
        let step = f / df;
        let next = x - step;
        if !next.is_finite() {
            return (x, false);
        }
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            return (next, true);
        }
        // keep the eigenvalue estimate when Newton wanders off (multiple roots)
        if (next - x0).abs() > 1e-3 * (1.0 + x0.abs()) {
            return (x0, false);
        }
        x = next;
    }
    (x, poly_eval(c, x).abs() <= 1e-10)
}
