//! The spectrum `σ(R)` as a point cloud, eigenvectors, and the
//! invariant-subspace and eigenvalue-free criteria.
//!
//! On the line through the origin at angle θ, `re^{iθ} ∈ σ(R)` exactly when
//! `r` is a real eigenvalue of the complexification of `e^{−iθ}C + Bτ`. One
//! dense eigensolve therefore yields the hits on both rays θ and θ + π.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charpoly::{charpoly_eval, rotate};
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::linalg::{self, conj_mat, conj_vec, CMat, CVec};
use crate::oplib::{unstack, RealLinearOperator};

/// Eigenvalues with `|Im μ| ≤ IMAG_TOL·(1 + |μ|)` count as real.
pub const IMAG_TOL: f64 = 1e-8;
/// Points with `|p(λ, λ̄)| > RESIDUAL_TOL·(1 + |λ|)^{2n}` are rejected.
pub const RESIDUAL_TOL: f64 = 1e-8;
// Real eigenvalues on one line closer than this (relative) are one root.
const MERGE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayHit {
    /// Ray angle in `[0, 2π)`.
    pub theta: f64,
    pub r: f64,
    /// Minimum modulus of `R − re^{iθ}`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub theta: f64,
    pub r: f64,
    pub lambda: Complex64,
    /// `|p(λ, λ̄)| / (1 + |λ|)^{2n}`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumCloud {
    pub points: Vec<SpectralPoint>,
    pub tol_imag: f64,
    pub tol_residual: f64,
    pub n_rays: usize,
    /// Real eigenvalues dropped by the residual test.
    pub rejected: usize,
}

impl SpectrumCloud {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lambdas(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.lambda).collect()
    }

    /// CSV with header `theta,r,re,im,residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,r,re,im,residual\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(p.theta),
                fmt_f64(p.r),
                fmt_f64(p.lambda.re),
                fmt_f64(p.lambda.im),
                fmt_f64(p.residual)
            ));
        }
        out
    }
}

fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

/// Real eigenvalues of `(e^{−iθ}C + Bτ)^ℂ` on the line at angle θ.
fn line_roots(op: &RealLinearOperator, theta: f64, imag_tol: f64) -> Result<Vec<f64>> {
    let m = rotate(op, theta).complexify().matrix;
    let eigs = linalg::eigenvalues(&m)?;
    let mut reals: Vec<f64> = eigs
        .iter()
        .filter(|z| z.im.abs() <= imag_tol * (1.0 + z.norm()))
        .map(|z| z.re)
        .collect();
    reals.sort_by(f64::total_cmp);
    let mut merged: Vec<(f64, usize)> = Vec::new();
    for r in reals {
        match merged.last_mut() {
            Some((sum, count)) if (r - *sum / *count as f64).abs() <= MERGE_TOL * (1.0 + r.abs()) => {
                *sum += r;
                *count += 1;
            }
            _ => merged.push((r, 1)),
        }
    }
    Ok(merged.into_iter().map(|(s, c)| s / c as f64).collect())
}

/// Spectral points on the line at angle θ. Nonnegative roots are reported at
/// θ and negative ones at θ + π with `r = |root|`.
pub fn ray_spectrum(op: &RealLinearOperator, theta: f64, imag_tol: f64) -> Result<Vec<RayHit>> {
    let roots = line_roots(op, theta, imag_tol)?;
    Ok(roots
        .into_iter()
        .map(|root| {
            let (angle, r) = if root >= 0.0 { (theta, root) } else { (theta + PI, -root) };
            let lambda = Complex64::from_polar(r, angle);
            RayHit { theta: normalize_angle(angle), r, residual: op.shift(lambda).min_modulus() }
        })
        .collect())
}

/// Sweep `n_rays` equally spaced rays over `[0, 2π)`.
///
/// With an even ray count each line eigensolve serves the ray pair θ, θ + π,
/// so the sweep performs `n_rays / 2` solves; with an odd count every ray is
/// solved on its own and only its nonnegative roots are kept.
pub fn spectrum_sweep(
    op: &RealLinearOperator,
    n_rays: usize,
    imag_tol: f64,
    residual_tol: f64,
) -> Result<SpectrumCloud> {
    if n_rays == 0 {
        return Err(Error::InvalidArgument("n_rays must be at least 1".into()));
    }
    let n = op.dim() as i32;
    let paired = n_rays % 2 == 0;
    let lines = if paired { n_rays / 2 } else { n_rays };
    let step = 2.0 * PI / n_rays as f64;

    let per_line: Vec<Vec<(f64, f64)>> = (0..lines)
        .into_par_iter()
        .map(|k| -> Result<Vec<(f64, f64)>> {
            let theta = k as f64 * step;
            let roots = line_roots(op, theta, imag_tol)?;
            Ok(roots
                .into_iter()
                .filter_map(|root| {
                    if root >= 0.0 {
                        Some((theta, root))
                    } else if paired {
                        Some(((k + n_rays / 2) as f64 * step, -root))
                    } else {
                        None
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::new();
    let mut rejected = 0;
    for (theta, r) in per_line.into_iter().flatten() {
        let lambda = Complex64::from_polar(r, theta);
        let residual = charpoly_eval(op, lambda).abs() / (1.0 + r).powi(2 * n);
        if residual <= residual_tol {
            points.push(SpectralPoint { theta, r, lambda, residual });
        } else {
            rejected += 1;
        }
    }
    points.sort_by(|a, b| a.theta.total_cmp(&b.theta).then(a.r.total_cmp(&b.r)));
    Ok(SpectrumCloud { points, tol_imag: imag_tol, tol_residual: residual_tol, n_rays, rejected })
}

/// Unit `x` with `R x ≈ λ x`, from the smallest singular vector of the
/// realification of `R − λ`; `None` when `λ` is not an eigenvalue within `tol`.
pub fn eigenvector(op: &RealLinearOperator, lambda: Complex64, tol: f64) -> Option<CVec> {
    let scale = 1.0 + op.operator_norm() + lambda.norm();
    let real = op.shift(lambda).realify().matrix;
    let svd = real.svd(false, true);
    let v_t = svd.v_t?;
    let (k, &sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    if sigma > tol * scale {
        return None;
    }
    let x = unstack(&v_t.row(k).transpose());
    let norm = x.norm();
    Some(x / Complex64::new(norm, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoEigenvalueCertificate {
    pub certified: bool,
    /// `j(T) − ‖R̂‖`; positive exactly when certified.
    pub margin: f64,
    pub hat_norm: f64,
    pub skew_min_modulus: f64,
}

/// Splits `R = R̂ + T` with `T = ½(A − A*)` (matrix `(B − Bᵀ)/2`) and
/// `R̂ = C + ½(A + A*)`. If `‖R̂‖ < j(T)` then `R` has no eigenvalues.
pub fn no_eigenvalue_certificate(op: &RealLinearOperator) -> NoEigenvalueCertificate {
    let half = Complex64::new(0.5, 0.0);
    let b = op.b();
    let skew = (b - b.transpose()) * half;
    let sym = (b + b.transpose()) * half;
    let hat = RealLinearOperator::new(op.c().clone(), sym).expect("same shape");
    let t = RealLinearOperator::antilinear(skew).expect("square");
    let hat_norm = hat.operator_norm();
    let skew_min_modulus = t.min_modulus();
    let margin = skew_min_modulus - hat_norm;
    NoEigenvalueCertificate { certified: margin > 0.0, margin, hat_norm, skew_min_modulus }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InvariantFlag {
    /// Every complex line in this eigenspace of `C` is invariant (`B` kills it).
    EigenspaceDegenerateAll { eigenvalue: Complex64, dim: usize },
    /// The search in this eigenspace is incomplete.
    Partial { eigenvalue: Complex64, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantLines {
    pub lines: Vec<CVec>,
    pub flags: Vec<InvariantFlag>,
}

/// Complex lines `span{x}` invariant under both `C` and `A = Bτ`.
///
/// Such a line must be spanned by an eigenvector of `C`. Eigenspaces of
/// dimension one are tested directly. In a two-dimensional eigenspace with
/// orthonormal basis `Q` the condition becomes an antilinear eigenproblem
/// `B' conj(c) = κc` for `B' = Q* B conj(Q)`, restricted to the `c` whose image
/// stays in the eigenspace; its solutions come from the eigenvectors of
/// `B' conj(B')`. Larger eigenspaces and Jordan blocks are flagged partial.
pub fn common_invariant_1d(op: &RealLinearOperator, tol: f64) -> Result<InvariantLines> {
    let c = op.c();
    let b = op.b();
    let n = op.dim();
    let c_norm = linalg::singular_values(c)[0];
    let scale = 1.0 + c_norm + linalg::singular_values(b)[0];
    let cluster_tol = 1e-4 * (1.0 + c_norm);
    let null_tol = 1e-7 * (1.0 + c_norm);

    let mut eigs = linalg::eigenvalues(c)?;
    eigs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for mu in eigs {
        match clusters.iter_mut().find(|cl| (cl[0] - mu).norm() <= cluster_tol) {
            Some(cl) => cl.push(mu),
            None => clusters.push(vec![mu]),
        }
    }

    let mut lines: Vec<CVec> = Vec::new();
    let mut flags = Vec::new();
    let invariant = |x: &CVec| -> bool {
        let cx = c * x;
        let bx = b * conj_vec(x);
        let off = |v: &CVec| (v - x * x.dotc(v)).norm();
        off(&cx) <= tol * scale && off(&bx) <= tol * scale
    };

    for cluster in clusters {
        let mu = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
        let shifted = c - CMat::identity(n, n) * mu;
        let (q, _) = linalg::near_null_space(&shifted, null_tol);
        let g = q.ncols();
        if g < cluster.len() {
            flags.push(InvariantFlag::Partial {
                eigenvalue: mu,
                reason: format!(
                    "Jordan block: algebraic multiplicity {} exceeds geometric multiplicity {g}",
                    cluster.len()
                ),
            });
        }
        let image = b * conj_mat(&q);
        if g >= 2 && linalg::max_abs(&image) <= tol * scale {
            flags.push(InvariantFlag::EigenspaceDegenerateAll { eigenvalue: mu, dim: g });
            lines.extend((0..g).map(|j| q.column(j).into_owned()));
            continue;
        }
        let candidates: Vec<CVec> = match g {
            1 => vec![q.column(0).into_owned()],
            2 => two_dim_candidates(&q, &image, tol * scale, &mut flags, mu),
            _ => {
                flags.push(InvariantFlag::Partial {
                    eigenvalue: mu,
                    reason: format!("eigenspace of dimension {g}; only basis vectors tested"),
                });
                (0..g).map(|j| q.column(j).into_owned()).collect()
            }
        };
        for x in candidates {
            let norm = x.norm();
            if norm == 0.0 {
                continue;
            }
            let x = x / Complex64::new(norm, 0.0);
            if invariant(&x) && !lines.iter().any(|y| y.dotc(&x).norm() >= 1.0 - 1e-8) {
                lines.push(x);
            }
        }
    }
    Ok(InvariantLines { lines, flags })
}

// Candidates x = Q c in a 2-dimensional eigenspace.
fn two_dim_candidates(
    q: &CMat,
    image: &CMat,
    tol: f64,
    flags: &mut Vec<InvariantFlag>,
    mu: Complex64,
) -> Vec<CVec> {
    let bp = q.adjoint() * image;
    let leak = image - q * &bp;
    // d = conj(c) must satisfy leak · d = 0
    let (kernel, sv) = linalg::near_null_space(&leak, tol);
    let kernel_dim = sv.iter().filter(|&&s| s <= tol).count();
    match kernel_dim {
        0 => Vec::new(),
        1 => vec![q * conj_vec(&kernel.column(0).into_owned())],
        _ => {
            let k = &bp * conj_mat(&bp);
            let (lo, hi) = (k[(0, 0)], k[(1, 1)]);
            let scalar = (lo - hi).norm() <= tol && k[(0, 1)].norm() <= tol && k[(1, 0)].norm() <= tol;
            if scalar {
                flags.push(InvariantFlag::Partial {
                    eigenvalue: mu,
                    reason: "infinitely many invariant lines in a 2-dimensional eigenspace".into(),
                });
            }
            let mut out = Vec::new();
            let basis: Vec<CVec> = if scalar {
                vec![CVec::from_column_slice(&[linalg::ONE, linalg::ZERO]), CVec::from_column_slice(&[linalg::ZERO, linalg::ONE])]
            } else {
                let (vecs, _) = eigenvectors_2x2(&k);
                vecs
            };
            for cvec in basis {
                let nu = (cvec.dotc(&(&k * &cvec)) / cvec.dotc(&cvec)).re.max(0.0);
                let w = &bp * conj_vec(&cvec) + &cvec * Complex64::new(nu.sqrt(), 0.0);
                let w = if w.norm() <= 1e-8 * (1.0 + cvec.norm()) { cvec * linalg::I } else { w };
                out.push(q * w);
            }
            out
        }
    }
}

fn eigenvectors_2x2(k: &CMat) -> (Vec<CVec>, Vec<Complex64>) {
    let (a, b, c, d) = (k[(0, 0)], k[(0, 1)], k[(1, 0)], k[(1, 1)]);
    let tr = a + d;
    let disc = ((a - d) * (a - d) + b * c * 4.0).sqrt();
    let vals = [(tr + disc) * 0.5, (tr - disc) * 0.5];
    let vecs = vals
        .iter()
        .map(|&l| {
            let v1 = CVec::from_column_slice(&[b, l - a]);
            let v2 = CVec::from_column_slice(&[l - d, c]);
            let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
            if v.norm() == 0.0 {
                CVec::from_column_slice(&[linalg::ONE, linalg::ZERO])
            } else {
                let nv = v.norm();
                v / Complex64::new(nv, 0.0)
            }
        })
        .collect();
    (vecs, vals.to_vec())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovSpan {
    /// Orthonormal basis of `span_ℂ{y, Ry, R²y, …}`.
    pub basis: Vec<CVec>,
    /// `‖(I − P) R q_k‖` for each basis vector `q_k`.
    pub residuals: Vec<f64>,
}

impl KrylovSpan {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn project_out(basis: &[CVec], v: &CVec) -> CVec {
    let mut w = v.clone();
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in basis {
            let coef = q.dotc(&w);
            w -= q * coef;
        }
    }
    w
}

/// Complex span of the iterates `R^j y`, grown until the next iterate lies in
/// the span within `tol` (relative to its norm) or `max_dim` is reached.
pub fn krylov_cspan(op: &RealLinearOperator, y: &CVec, max_dim: usize, tol: f64) -> Result<KrylovSpan> {
    if y.len() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: y.len() });
    }
    let y_norm = y.norm();
    if y_norm == 0.0 {
        return Err(Error::InvalidArgument("starting vector must be nonzero".into()));
    }
    let limit = max_dim.min(op.dim()).max(1);
    let mut basis = vec![y / Complex64::new(y_norm, 0.0)];
    let mut iterate = y.clone();
    while basis.len() < limit {
        iterate = op.apply(&iterate)?;
        let size = iterate.norm();
        if size == 0.0 {
            break;
        }
        let w = project_out(&basis, &iterate);
        let wn = w.norm();
        if wn <= tol * size {
            break;
        }
        basis.push(w / Complex64::new(wn, 0.0));
    }
    let residuals = basis
        .iter()
        .map(|q| op.apply(q).map(|rq| project_out(&basis, &rq).norm()))
        .collect::<Result<_>>()?;
    Ok(KrylovSpan { basis, residuals })
}
