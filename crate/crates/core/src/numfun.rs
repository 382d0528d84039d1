//! The numerical function `F(λ) = p(λ, λ̄) / Σ_j |λ|^{2j} = v*Hv / ‖v‖²`.
//!
//! `F` takes values in the field of values `W(H) = [λ_min(H), λ_max(H)]`, with
//! `F(0) = det R^ℂ` and `F → 1` at infinity. Along a ray `re^{iθ}` it is the
//! rational function `q_θ(r) / Σ r^{2j}`, so its range is computed one ray at a
//! time from the real critical points of that function.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charpoly::{sos_decompose, CoeffMatrix, SosDecomposition};
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::linalg::{self, CVec};

pub const DEFAULT_RAYS: usize = 128;
/// Critical points are searched on `[0, R_MAX_FACTOR · scale]`.
pub const R_MAX_FACTOR: f64 = 10.0;

/// `F(λ)`, evaluated with `v` rescaled by `|λ|^{−n}` when `|λ| > 1`.
pub fn f_eval(h: &CoeffMatrix, lambda: Complex64) -> f64 {
    let n = h.n();
    let mag = lambda.norm();
    let v = if mag > 1.0 {
        let unit = lambda / mag;
        CVec::from_fn(n + 1, |j, _| unit.powu(j as u32) * mag.powi(j as i32 - n as i32))
    } else {
        crate::charpoly::monomials(lambda, n)
    };
    let num = (v.adjoint() * h.matrix() * &v)[(0, 0)].re;
    num / v.norm_squared()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexCombination {
    /// `|p_i(λ)|² / Σ_j |p_j(λ)|²`.
    pub weights: Vec<f64>,
    /// Eigenvalues `d_i` of `H`, in the row order of the decomposition.
    pub eigenvalues: Vec<f64>,
    /// `Σ d_i w_i`.
    pub value: f64,
}

/// Writes `F(λ)` as a convex combination of the eigenvalues of `H`.
pub fn convex_comb_check(h: &CoeffMatrix, lambda: Complex64) -> ConvexCombination {
    convex_combination(&sos_decompose(h), lambda)
}

pub fn convex_combination(sos: &SosDecomposition, lambda: Complex64) -> ConvexCombination {
    let k = sos.u.ncols();
    let mag = lambda.norm();
    // same rescaling as f_eval; weights are invariant under it
    let v = if mag > 1.0 {
        let unit = lambda / mag;
        CVec::from_fn(k, |j, _| unit.powu(j as u32) * mag.powi(j as i32 - (k as i32 - 1)))
    } else {
        crate::charpoly::monomials(lambda, k - 1)
    };
    let values = &sos.u * v;
    let total: f64 = values.iter().map(|p| p.norm_sqr()).sum();
    let weights: Vec<f64> = values.iter().map(|p| p.norm_sqr() / total).collect();
    let value = weights.iter().zip(&sos.d).map(|(w, d)| w * d).sum();
    ConvexCombination { weights, eigenvalues: sos.d.clone(), value }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    /// `r = 0`, where `F = H[0][0]`.
    Origin,
    /// Real root of the derivative numerator.
    Interior,
    /// End of the searched interval.
    Boundary,
    /// The limit `r → ∞`, reported with `r = +∞`.
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub r: f64,
    pub value: f64,
    pub kind: CriticalKind,
    /// False when Newton polishing of the root did not converge.
    pub converged: bool,
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|k| a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0))
        .collect()
}

/// Critical points of `r ↦ F(re^{iθ})` on `[0, r_max]`, plus the origin,
/// the boundary `r_max` and the limit at infinity, sorted by `r`.
///
/// `r_max` defaults to `10 · scale` where `scale` is `1 + ‖R‖` of the source
/// operator.
pub fn f_ray_extrema(h: &CoeffMatrix, theta: f64, r_max: Option<f64>) -> Vec<CriticalPoint> {
    let n = h.n();
    let r_max = r_max.unwrap_or(R_MAX_FACTOR * h.scale);
    let q = h.ray_polynomial(theta);
    let mut w = vec![0.0; 2 * n + 1];
    for j in 0..=n {
        w[2 * j] = 1.0;
    }
    // r is rescaled by r_max so the companion matrix sees roots in [0, 1]
    let scaled = |c: &[f64]| -> Vec<f64> {
        c.iter().enumerate().map(|(k, a)| a * r_max.powi(k as i32)).collect()
    };
    let (qs, ws) = (scaled(&q), scaled(&w));
    let numerator = poly_sub(
        &poly_mul(&linalg::poly_derivative(&qs), &ws),
        &poly_mul(&qs, &linalg::poly_derivative(&ws)),
    );
    let f_at = |r: f64| f_eval(h, Complex64::from_polar(r, theta));

    let mut points = vec![CriticalPoint { r: 0.0, value: h.get(0, 0).re, kind: CriticalKind::Origin, converged: true }];
    for (x, converged) in linalg::real_poly_roots(&numerator, 1e-6) {
        if x > 0.0 && x < 1.0 {
            let r = x * r_max;
            points.push(CriticalPoint { r, value: f_at(r), kind: CriticalKind::Interior, converged });
        }
    }
    points.push(CriticalPoint { r: r_max, value: f_at(r_max), kind: CriticalKind::Boundary, converged: true });
    points.push(CriticalPoint {
        r: f64::INFINITY,
        value: h.get(n, n).re,
        kind: CriticalKind::Limit,
        converged: true,
    });
    points
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayMinimum {
    pub theta: f64,
    pub r: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridInfo {
    pub n_rays: usize,
    pub r_max: f64,
    /// Interior critical points whose Newton polish failed.
    pub unconverged_roots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumFunReport {
    pub f0: f64,
    pub f_inf: f64,
    pub range_est: [f64; 2],
    pub fov: [f64; 2],
    pub uncovered_low: f64,
    pub uncovered_high: f64,
    pub grid: GridInfo,
    #[serde(skip)]
    pub ray_minima: Vec<RayMinimum>,
}

impl NumFunReport {
    /// CSV with header `theta,r_min_F,F_min`; `inf` marks a minimum at infinity.
    pub fn ray_minima_csv(&self) -> String {
        let mut out = String::from("theta,r_min_F,F_min\n");
        for m in &self.ray_minima {
            out.push_str(&format!("{},{},{}\n", fmt_f64(m.theta), fmt_f64(m.r), fmt_f64(m.value)));
        }
        out
    }
}

/// Range of `F` over `n_rays` equally spaced rays compared with `W(H)`.
pub fn range_and_coverage(h: &CoeffMatrix, n_rays: usize) -> Result<NumFunReport> {
    if n_rays == 0 {
        return Err(Error::InvalidArgument("n_rays must be at least 1".into()));
    }
    let r_max = R_MAX_FACTOR * h.scale;
    let per_ray: Vec<(f64, Vec<CriticalPoint>)> = (0..n_rays)
        .into_par_iter()
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n_rays as f64;
            (theta, f_ray_extrema(h, theta, Some(r_max)))
        })
        .collect();

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut unconverged = 0;
    let mut ray_minima = Vec::with_capacity(n_rays);
    for (theta, points) in &per_ray {
        let mut best = points[0];
        for p in points {
            lo = lo.min(p.value);
            hi = hi.max(p.value);
            if p.value < best.value {
                best = *p;
            }
            if !p.converged {
                unconverged += 1;
            }
        }
        ray_minima.push(RayMinimum { theta: *theta, r: best.r, value: best.value });
    }

    let eig = h.eigenvalues();
    let fov = [eig[0], *eig.last().expect("nonempty")];
    Ok(NumFunReport {
        f0: h.get(0, 0).re,
        f_inf: h.get(h.n(), h.n()).re,
        range_est: [lo, hi],
        fov,
        uncovered_low: (lo - fov[0]).max(0.0),
        uncovered_high: (fov[1] - hi).max(0.0),
        grid: GridInfo { n_rays, r_max, unconverged_roots: unconverged },
        ray_minima,
    })
}
