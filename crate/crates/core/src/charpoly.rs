//! The characteristic polynomial `p(λ, λ̄) = det(R − λ)^ℂ` and its Hermitian
//! coefficient matrix.
//!
//! Entry `H[i][j]` multiplies `λ^j · conj(λ)^i`, so `p(λ, λ̄) = v* H v` with
//! `v = (1, λ, …, λⁿ)`. Treating `λ` and `λ̄` as independent variables, the
//! matrix is recovered either by two-dimensional Fourier interpolation of
//! determinant values, or by a principal-minor expansion of the determinant.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, ONE};
use crate::oplib::RealLinearOperator;

/// Relative asymmetry of the extracted matrix above which extraction fails.
pub const HERMITIAN_TOL: f64 = 1e-6;
/// Positive definiteness requires `λ_min(H) > PD_THRESHOLD · ‖H‖`.
pub const PD_THRESHOLD: f64 = 1e-10;
/// Bracket width at which the real-axis bisection stops.
pub const BISECTION_TOL: f64 = 1e-10;
/// Largest dimension accepted by the minor-expansion route (`4ⁿ` minors).
pub const EXACT_MAX_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffMode {
    Interpolation,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMatrix {
    h: CMat,
    /// Largest `|H − H*|` entry relative to `max(1, max|H|)` before projection.
    pub asymmetry: f64,
    /// Radius scale `1 + ‖R‖` of the source operator, or a root bound when
    /// the matrix was supplied directly.
    pub scale: f64,
}

impl CoeffMatrix {
    /// Wrap a given matrix, projecting it onto the Hermitian matrices.
    pub fn from_matrix(h: CMat) -> Result<Self> {
        if h.nrows() < 2 || h.ncols() != h.nrows() {
            return Err(Error::InvalidArgument(format!(
                "coefficient matrix must be square of size at least 2, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        let (h, asymmetry) = hermitian_projection(h);
        let scale = cauchy_scale(&h);
        Ok(Self { h, asymmetry, scale })
    }

    /// Operator dimension `n` (the matrix is `(n+1)×(n+1)`).
    pub fn n(&self) -> usize {
        self.h.nrows() - 1
    }

    pub fn matrix(&self) -> &CMat {
        &self.h
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.h[(i, j)]
    }

    /// `v* H v` with `v = (1, λ, …, λⁿ)`.
    pub fn eval(&self, lambda: Complex64) -> f64 {
        let v = monomials(lambda, self.n());
        (v.adjoint() * &self.h * &v)[(0, 0)].re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.h).0
    }

    /// Coefficients `q_m` of the real polynomial `r ↦ p(r e^{iθ}, r e^{−iθ})`.
    pub fn ray_polynomial(&self, theta: f64) -> Vec<f64> {
        let n = self.n();
        let mut q = vec![0.0; 2 * n + 1];
        for i in 0..=n {
            for j in 0..=n {
                let phase = Complex64::from_polar(1.0, (j as f64 - i as f64) * theta);
                q[i + j] += (self.h[(i, j)] * phase).re;
            }
        }
        q
    }

    pub fn to_json(&self) -> CoeffMatrixJson {
        let (h_re, h_im) = split_rows(&self.h);
        CoeffMatrixJson { n: self.n(), h_re, h_im, asymmetry: self.asymmetry }
    }
}

/// `(1, λ, λ², …, λⁿ)`.
pub fn monomials(lambda: Complex64, n: usize) -> CVec {
    let mut v = CVec::zeros(n + 1);
    let mut acc = ONE;
    for k in 0..=n {
        v[k] = acc;
        acc *= lambda;
    }
    v
}

fn hermitian_projection(h: CMat) -> (CMat, f64) {
    let scale = linalg::max_abs(&h).max(1.0);
    let asym = linalg::max_abs(&(&h - h.adjoint())) / scale;
    let projected = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    (projected, asym)
}

// 1 + max|q_m| over the leading coefficient bounds the moduli of all zeros.
fn cauchy_scale(h: &CMat) -> f64 {
    let n = h.nrows() - 1;
    let lead = h[(n, n)].norm();
    if lead == 0.0 {
        return 1.0;
    }
    let m = linalg::max_abs(h);
    1.0 + m / lead
}

fn split_rows(m: &CMat) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
    };
    (rows(|z| z.re), rows(|z| z.im))
}

fn join_rows(re: &[Vec<f64>], im: &[Vec<f64>], rows: usize, cols: usize, name: &str) -> Result<CMat> {
    let ok = |a: &[Vec<f64>]| a.len() == rows && a.iter().all(|r| r.len() == cols);
    if !ok(re) || !ok(im) {
        return Err(Error::InvalidArgument(format!("{name}_re and {name}_im must be {rows}x{cols}")));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| Complex64::new(re[i][j], im[i][j])))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoeffMatrixJson {
    pub n: usize,
    #[serde(rename = "H_re")]
    pub h_re: Vec<Vec<f64>>,
    #[serde(rename = "H_im")]
    pub h_im: Vec<Vec<f64>>,
    pub asymmetry: f64,
}

impl TryFrom<CoeffMatrixJson> for CoeffMatrix {
    type Error = Error;

    fn try_from(j: CoeffMatrixJson) -> Result<Self> {
        let h = join_rows(&j.h_re, &j.h_im, j.n + 1, j.n + 1, "H")?;
        let mut cm = CoeffMatrix::from_matrix(h)?;
        cm.asymmetry = cm.asymmetry.max(j.asymmetry);
        Ok(cm)
    }
}

/// Raw complex determinant `det(R − λ)^ℂ`; its imaginary part is roundoff.
pub fn charpoly_value(op: &RealLinearOperator, lambda: Complex64) -> Complex64 {
    op.shift(lambda).complexify().det()
}

/// `p(λ, λ̄)`, a real number.
pub fn charpoly_eval(op: &RealLinearOperator, lambda: Complex64) -> f64 {
    charpoly_value(op, lambda).re
}

/// `e^{−iθ}C + Bτ`; satisfies `p(e^{iθ}r, e^{−iθ}r) = p_{−θ}(r, r)`.
pub fn rotate(op: &RealLinearOperator, theta: f64) -> RealLinearOperator {
    let phase = Complex64::from_polar(1.0, -theta);
    RealLinearOperator::new(op.c().map(|z| phase * z), op.b().clone()).expect("same shape")
}

pub fn coeff_matrix(op: &RealLinearOperator, mode: CoeffMode) -> Result<CoeffMatrix> {
    let raw = match mode {
        CoeffMode::Interpolation => interpolated_coefficients(op)?,
        CoeffMode::Exact => expanded_coefficients(op)?,
    };
    let (h, asymmetry) = hermitian_projection(raw);
    if asymmetry > HERMITIAN_TOL {
        return Err(Error::HermitianViolation { asymmetry, tolerance: HERMITIAN_TOL });
    }
    Ok(CoeffMatrix { h, asymmetry, scale: 1.0 + op.operator_norm() })
}

/// Sampling radius for the torus interpolation: `‖R‖`, which balances the
/// bound `|h_ij| ≲ ‖R‖^{2n−i−j}` so every term `h_ij ρ^{i+j}` has a comparable size.
fn interpolation_radius(op: &RealLinearOperator) -> f64 {
    let norm = op.operator_norm();
    if norm > 0.0 && norm.is_finite() {
        norm
    } else {
        1.0
    }
}

/// Samples `det(M − diag(xI, yI))` with `x = ρe^{iα}` and `y = ρe^{iβ}` varying
/// independently over the `(n+1)`-th roots of unity, then inverts the 2-D
/// discrete Fourier transform. The transform is unitary, so the coefficients
/// carry roughly `ε · max|p|` absolute error on the sampling torus.
fn interpolated_coefficients(op: &RealLinearOperator) -> Result<CMat> {
    let n = op.dim();
    let k = n + 1;
    let rho = interpolation_radius(op);
    let m = op.complexify().matrix;
    let roots: Vec<Complex64> =
        (0..k).map(|t| Complex64::from_polar(1.0, 2.0 * PI * t as f64 / k as f64)).collect();

    // samples[a][b] = p(x = ρ ω^a, y = ρ ω^b)
    let samples: Vec<Vec<Complex64>> = (0..k)
        .into_par_iter()
        .map(|a| {
            (0..k)
                .map(|b| {
                    let mut shifted = m.clone();
                    for d in 0..n {
                        shifted[(d, d)] -= roots[a] * rho;
                        shifted[(n + d, n + d)] -= roots[b] * rho;
                    }
                    linalg::det(&shifted)
                })
                .collect()
        })
        .collect();
    if samples.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::IllConditioned { condition: rho.powi(2 * n as i32) });
    }

    // p(x, y) = Σ h_ij x^j y^i, so h_ij ρ^{i+j} = mean_{a,b} p · ω^{−ja} ω^{−ib}
    let mut h = CMat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, row) in samples.iter().enumerate() {
                for (b, v) in row.iter().enumerate() {
                    acc += v * roots[(j * a) % k].conj() * roots[(i * b) % k].conj();
                }
            }
            h[(i, j)] = acc / (k * k) as f64 / rho.powi((i + j) as i32);
        }
    }
    Ok(h)
}

/// Principal-minor expansion of `det(M − diag(xI, yI))` with `M = R^ℂ`:
/// the coefficient of `x^j y^i` is `(−1)^{i+j}` times the sum of the principal
/// minors of `M` with `j` indices removed from the first block and `i` from
/// the second. Each minor is a fraction-free elimination.
fn expanded_coefficients(op: &RealLinearOperator) -> Result<CMat> {
    let n = op.dim();
    if n > EXACT_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "exact expansion supports n <= {EXACT_MAX_DIM}, got {n}"
        )));
    }
    let m = op.complexify().matrix;
    let dim = 2 * n;
    let first_mask = (1u32 << n) - 1;
    let partial: Vec<CMat> = (0u32..(1 << dim))
        .into_par_iter()
        .fold(
            || CMat::zeros(n + 1, n + 1),
            |mut acc, removed| {
                let keep: Vec<usize> = (0..dim).filter(|&k| removed & (1 << k) == 0).collect();
                let minor = CMat::from_fn(keep.len(), keep.len(), |a, b| m[(keep[a], keep[b])]);
                let j = (removed & first_mask).count_ones() as usize;
                let i = (removed >> n).count_ones() as usize;
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                acc[(i, j)] += linalg::bareiss_det(&minor) * sign;
                acc
            },
        )
        .collect();
    Ok(partial.into_iter().fold(CMat::zeros(n + 1, n + 1), |a, b| a + b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SosKind {
    Eigen,
    Cholesky,
}

/// `p(λ, λ̄) = Σ d_i |p_i(λ)|²` with `p_i(λ) = Σ_j U[i][j] λ^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SosDecomposition {
    pub d: Vec<f64>,
    pub u: CMat,
    pub kind: SosKind,
}

impl SosDecomposition {
    /// `p_i(λ)` for every row.
    pub fn poly_values(&self, lambda: Complex64) -> Vec<Complex64> {
        let v = monomials(lambda, self.u.ncols() - 1);
        (&self.u * v).iter().copied().collect()
    }

    pub fn eval(&self, lambda: Complex64) -> f64 {
        self.poly_values(lambda)
            .iter()
            .zip(&self.d)
            .map(|(p, d)| d * p.norm_sqr())
            .sum()
    }

    /// Highest power with a nonzero coefficient in each row.
    pub fn degrees(&self, tol: f64) -> Vec<usize> {
        (0..self.u.nrows())
            .map(|i| (0..self.u.ncols()).rev().find(|&j| self.u[(i, j)].norm() > tol).unwrap_or(0))
            .collect()
    }

    /// `‖U*U − I‖` entrywise maximum.
    pub fn unitarity_defect(&self) -> f64 {
        let k = self.u.nrows();
        linalg::max_abs(&(self.u.adjoint() * &self.u - CMat::identity(k, k)))
    }

    /// The `p_i` share a zero only if the coefficient matrix loses column rank.
    pub fn no_common_zero(&self) -> bool {
        let s = linalg::singular_values(&self.u);
        s.last().copied().unwrap_or(0.0) > 1e-12 * s.first().copied().unwrap_or(1.0)
    }

    pub fn to_json(&self) -> SosJson {
        let (u_re, u_im) = split_rows(&self.u);
        SosJson { kind: self.kind, d: self.d.clone(), u_re, u_im }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SosJson {
    pub kind: SosKind,
    pub d: Vec<f64>,
    #[serde(rename = "U_re")]
    pub u_re: Vec<Vec<f64>>,
    #[serde(rename = "U_im")]
    pub u_im: Vec<Vec<f64>>,
}

/// Eigendecomposition `H = U* D U`.
///
/// Rows are ordered by mean degree `Σ_j j|U_ij|²` (ties by eigenvalue) and
/// each row is rotated so its largest coefficient is real positive; a
/// diagonal `H` therefore yields `p_i = λ^i`.
pub fn sos_decompose(h: &CoeffMatrix) -> SosDecomposition {
    let (values, vectors) = linalg::hermitian_eigen(&h.h);
    let k = values.len();
    let mut rows: Vec<(f64, f64, Vec<Complex64>)> = (0..k)
        .map(|col| {
            let mut row: Vec<Complex64> = (0..k).map(|j| vectors[(j, col)].conj()).collect();
            let lead = row
                .iter()
                .copied()
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap_or(ONE);
            if lead.norm() > 0.0 {
                let phase = lead.conj() / lead.norm();
                row.iter_mut().for_each(|z| *z *= phase);
            }
            let mean_degree: f64 = row.iter().enumerate().map(|(j, z)| j as f64 * z.norm_sqr()).sum();
            (mean_degree, values[col], row)
        })
        .collect();
    rows.sort_by(|a, b| {
        if (a.0 - b.0).abs() > 1e-9 {
            a.0.total_cmp(&b.0)
        } else {
            a.1.total_cmp(&b.1)
        }
    });
    let d = rows.iter().map(|r| r.1).collect();
    let u = CMat::from_fn(k, k, |i, j| rows[i].2[j]);
    SosDecomposition { d, u, kind: SosKind::Eigen }
}

/// `p = Σ |p_i|²` with `deg p_i = i`, from the Cholesky factor of the
/// order-reversed `H`. Refuses unless `H` is positive definite.
pub fn cholesky_sos(h: &CoeffMatrix) -> Result<SosDecomposition> {
    let eig = h.eigenvalues();
    let min = eig[0];
    let norm = eig.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if min <= PD_THRESHOLD * norm {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    let k = h.n() + 1;
    let reversed = CMat::from_fn(k, k, |i, j| h.h[(k - 1 - i, k - 1 - j)]);
    let chol = reversed
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { min_eigenvalue: min })?;
    // reversed = L L* = T* T with T = L* upper triangular; row i of T·P has
    // degree k−1−i, so reverse the rows as well.
    let t = chol.l().adjoint();
    let u = CMat::from_fn(k, k, |i, j| t[(k - 1 - i, k - 1 - j)]);
    Ok(SosDecomposition { d: vec![1.0; k], u, kind: SosKind::Cholesky })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmptinessCertificates {
    /// Present when `H ≻ 0`; then `σ(R) = ∅`.
    pub pd_certificate: Option<SosDecomposition>,
    /// A real `r ≥ 0` with `p(r, r) ≈ 0`, found when `det R^ℂ ≤ 0`.
    pub real_axis_zero: Option<f64>,
    pub det_complexification: f64,
}

impl EmptinessCertificates {
    pub fn spectrum_empty(&self) -> Option<bool> {
        match (&self.pd_certificate, self.real_axis_zero) {
            (Some(_), _) => Some(true),
            (None, Some(_)) => Some(false),
            _ => None,
        }
    }
}

pub fn emptiness_certificates(op: &RealLinearOperator) -> Result<EmptinessCertificates> {
    let h = coeff_matrix(op, CoeffMode::Interpolation)?;
    let det = op.complexify().det().re;
    let pd_certificate = cholesky_sos(&h).ok();
    let real_axis_zero = if det <= 0.0 {
        Some(bisect_real_zero(op, det))
    } else {
        None
    };
    Ok(EmptinessCertificates { pd_certificate, real_axis_zero, det_complexification: det })
}

// f(0) = det ≤ 0 and f(r) > 0 once r exceeds the operator norm.
fn bisect_real_zero(op: &RealLinearOperator, f0: f64) -> f64 {
    if f0 == 0.0 {
        return 0.0;
    }
    let f = |r: f64| charpoly_eval(op, Complex64::new(r, 0.0));
    let (mut lo, mut hi) = (0.0, 1.0 + op.operator_norm());
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointCheck {
    pub holds: bool,
    /// Max entrywise `|H_{R*} − conj(H_R)|` relative to `max(1, max|H|)`.
    pub deviation: f64,
}

/// Checks that the coefficients of `p_{R*}` are the conjugates of those of `p_R`.
pub fn adjoint_coeff_check(op: &RealLinearOperator, tol: f64) -> Result<AdjointCheck> {
    let h = coeff_matrix(op, CoeffMode::Interpolation)?;
    let ha = coeff_matrix(&op.adjoint(), CoeffMode::Interpolation)?;
    let scale = linalg::max_abs(&h.h).max(1.0);
    let deviation = linalg::max_abs(&(&ha.h - linalg::conj_mat(&h.h))) / scale;
    Ok(AdjointCheck { holds: deviation <= tol, deviation })
}

/// `det R^ℂ`, equal to `H[0][0]`.
pub fn det_complexification(op: &RealLinearOperator) -> f64 {
    op.complexify().det().re
}
