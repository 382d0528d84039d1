//! Finite-rank real linear operators `z ↦ Cz + B·conj(z)` on ℂⁿ.
//!
//! An operator is stored as its complex linear part `C` and the matrix `B` of
//! its antilinear part `A = Bτ`, where `τ` is componentwise conjugation in the
//! working basis. Scalar multiples act from the left, so `λR` is
//! `z ↦ λ·R(z)` and corresponds to `(λC, λB)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, conj_mat, conj_vec, CMat, CVec, RMat, I, ONE};

#[derive(Debug, Clone, PartialEq)]
pub struct RealLinearOperator {
    c: CMat,
    b: CMat,
}

/// The 2n×2n block matrix `[[C, B], [conj(B), conj(C)]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Complexification {
    pub matrix: CMat,
}

/// The 2n×2n real matrix acting on stacked `(Re z, Im z)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Realification {
    pub matrix: RMat,
}

impl RealLinearOperator {
    pub fn new(c: CMat, b: CMat) -> Result<Self> {
        let n = c.nrows();
        if n == 0 {
            return Err(Error::InvalidOperator("dimension must be at least 1".into()));
        }
        if c.ncols() != n {
            return Err(Error::InvalidOperator(format!(
                "C must be square, got {}x{}",
                c.nrows(),
                c.ncols()
            )));
        }
        if b.nrows() != n || b.ncols() != n {
            return Err(Error::InvalidOperator(format!(
                "B must be {n}x{n}, got {}x{}",
                b.nrows(),
                b.ncols()
            )));
        }
        if c.iter().chain(b.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidOperator("entries must be finite".into()));
        }
        Ok(Self { c, b })
    }

    pub fn identity(n: usize) -> Self {
        Self { c: CMat::identity(n, n), b: CMat::zeros(n, n) }
    }

    /// Componentwise conjugation τ.
    pub fn conjugation(n: usize) -> Self {
        Self { c: CMat::zeros(n, n), b: CMat::identity(n, n) }
    }

    pub fn complex_linear(c: CMat) -> Result<Self> {
        let n = c.nrows();
        Self::new(c, CMat::zeros(n, n))
    }

    pub fn antilinear(b: CMat) -> Result<Self> {
        let n = b.nrows();
        Self::new(CMat::zeros(n, n), b)
    }

    /// The scalar operator `α + βτ` on ℂ¹.
    pub fn scalar(alpha: Complex64, beta: Complex64) -> Self {
        Self { c: CMat::from_element(1, 1, alpha), b: CMat::from_element(1, 1, beta) }
    }

    pub fn dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn c(&self) -> &CMat {
        &self.c
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn complex_part(&self) -> Self {
        let n = self.dim();
        Self { c: self.c.clone(), b: CMat::zeros(n, n) }
    }

    pub fn antilinear_part(&self) -> Self {
        let n = self.dim();
        Self { c: CMat::zeros(n, n), b: self.b.clone() }
    }

    pub fn apply(&self, z: &CVec) -> Result<CVec> {
        self.check_dim(z.len())?;
        Ok(&self.c * z + &self.b * conj_vec(z))
    }

    /// `self ∘ other`, using `τM = conj(M)τ`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        let c = &self.c * &other.c + &self.b * conj_mat(&other.b);
        let b = &self.c * &other.b + &self.b * conj_mat(&other.c);
        Ok(Self { c, b })
    }

    /// Adjoint with respect to the real inner product `Re⟨x, y⟩`: `(C*, Bᵀ)`.
    pub fn adjoint(&self) -> Self {
        Self { c: self.c.adjoint(), b: self.b.transpose() }
    }

    /// Left scalar multiple `z ↦ λ·R(z)`.
    pub fn scale(&self, lambda: Complex64) -> Self {
        Self { c: self.c.map(|z| lambda * z), b: self.b.map(|z| lambda * z) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self { c: &self.c + &other.c, b: &self.b + &other.b })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self { c: &self.c - &other.c, b: &self.b - &other.b })
    }

    /// `R − λ`, i.e. `(C − λI, B)`.
    pub fn shift(&self, lambda: Complex64) -> Self {
        let n = self.dim();
        Self { c: &self.c - CMat::identity(n, n) * lambda, b: self.b.clone() }
    }

    pub fn complexify(&self) -> Complexification {
        let n = self.dim();
        let mut m = CMat::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.c);
        m.view_mut((0, n), (n, n)).copy_from(&self.b);
        m.view_mut((n, 0), (n, n)).copy_from(&conj_mat(&self.b));
        m.view_mut((n, n), (n, n)).copy_from(&conj_mat(&self.c));
        Complexification { matrix: m }
    }

    pub fn realify(&self) -> Realification {
        let n = self.dim();
        // C z + B conj(z) with z = x + iy:
        //   Re = (Cr + Br) x + (Bi - Ci) y
        //   Im = (Ci + Bi) x + (Cr - Br) y
        let m = RMat::from_fn(2 * n, 2 * n, |i, j| {
            let (bi, bj) = (i / n, j / n);
            let (c, b) = (self.c[(i % n, j % n)], self.b[(i % n, j % n)]);
            match (bi, bj) {
                (0, 0) => c.re + b.re,
                (0, _) => b.im - c.im,
                (_, 0) => c.im + b.im,
                _ => c.re - b.re,
            }
        });
        Realification { matrix: m }
    }

    /// Largest singular value of the realification.
    pub fn operator_norm(&self) -> f64 {
        linalg::real_singular_values(&self.realify().matrix)[0]
    }

    /// Minimum modulus `inf ‖R z‖` over unit `z`.
    pub fn min_modulus(&self) -> f64 {
        *linalg::real_singular_values(&self.realify().matrix)
            .last()
            .expect("dimension is positive")
    }

    /// `‖C‖_p + ‖B‖_p`; the singular numbers of `Bτ` coincide with those of `B`.
    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::SchattenExponent(p));
        }
        Ok(matrix_schatten_norm(&self.c, p)? + matrix_schatten_norm(&self.b, p)?)
    }

    /// `Σ a_j R^j` with `R⁰ = I` and scalar coefficients acting from the left.
    pub fn poly_apply(&self, coeffs: &[Complex64]) -> Self {
        let n = self.dim();
        let mut power = Self::identity(n);
        let mut acc = Self { c: CMat::zeros(n, n), b: CMat::zeros(n, n) };
        for (j, &a) in coeffs.iter().enumerate() {
            if j > 0 {
                power = self.compose(&power).expect("same dimension");
            }
            acc.c += power.c.map(|z| a * z);
            acc.b += power.b.map(|z| a * z);
        }
        acc
    }

    /// Reconstruct `(C, B)` from a real linear map given as a black box.
    ///
    /// Column `k` is `C e_k = ½(f(e_k) − i f(i e_k))` and `B e_k = ½(f(e_k) + i f(i e_k))`.
    pub fn from_action<F>(n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&CVec) -> CVec,
    {
        if n == 0 {
            return Err(Error::InvalidOperator("dimension must be at least 1".into()));
        }
        let mut c = CMat::zeros(n, n);
        let mut b = CMat::zeros(n, n);
        for k in 0..n {
            let mut e = CVec::zeros(n);
            e[k] = ONE;
            let fe = f(&e);
            e[k] = I;
            let fie = f(&e);
            if fe.len() != n || fie.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: fe.len().min(fie.len()) });
            }
            for r in 0..n {
                c[(r, k)] = (fe[r] - I * fie[r]) * 0.5;
                b[(r, k)] = (fe[r] + I * fie[r]) * 0.5;
            }
        }
        Self::new(c, b)
    }

    /// Largest entrywise difference of the `(C, B)` pair.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        linalg::max_abs(&(&self.c - &other.c)).max(linalg::max_abs(&(&self.b - &other.b)))
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }
}

impl Complexification {
    pub fn det(&self) -> Complex64 {
        linalg::det(&self.matrix)
    }
}

impl Realification {
    pub fn apply_stacked(&self, z: &CVec) -> DVector<f64> {
        &self.matrix * stack(z)
    }
}

/// `(Re z, Im z)` stacked into one real vector.
pub fn stack(z: &CVec) -> DVector<f64> {
    let n = z.len();
    DVector::from_fn(2 * n, |i, _| if i < n { z[i].re } else { z[i - n].im })
}

pub fn unstack(v: &DVector<f64>) -> CVec {
    let n = v.len() / 2;
    CVec::from_fn(n, |i, _| Complex64::new(v[i], v[i + n]))
}

pub fn matrix_schatten_norm(m: &CMat, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::SchattenExponent(p));
    }
    Ok(linalg::schatten(&linalg::singular_values(m), p))
}

/// On-disk operator layout: four row-major `n×n` real arrays.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub n: usize,
    #[serde(rename = "C_re")]
    pub c_re: Vec<Vec<f64>>,
    #[serde(rename = "C_im")]
    pub c_im: Vec<Vec<f64>>,
    #[serde(rename = "B_re")]
    pub b_re: Vec<Vec<f64>>,
    #[serde(rename = "B_im")]
    pub b_im: Vec<Vec<f64>>,
}

impl From<&RealLinearOperator> for OperatorJson {
    fn from(op: &RealLinearOperator) -> Self {
        let split = |m: &CMat, f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        Self {
            n: op.dim(),
            c_re: split(&op.c, |z| z.re),
            c_im: split(&op.c, |z| z.im),
            b_re: split(&op.b, |z| z.re),
            b_im: split(&op.b, |z| z.im),
        }
    }
}

impl TryFrom<OperatorJson> for RealLinearOperator {
    type Error = Error;

    fn try_from(j: OperatorJson) -> Result<Self> {
        let n = j.n;
        if n == 0 {
            return Err(Error::InvalidOperator("n must be at least 1".into()));
        }
        let build = |re: &[Vec<f64>], im: &[Vec<f64>], name: &str| -> Result<CMat> {
            let shape_ok = |a: &[Vec<f64>]| a.len() == n && a.iter().all(|row| row.len() == n);
            if !shape_ok(re) || !shape_ok(im) {
                return Err(Error::InvalidOperator(format!("{name}_re and {name}_im must be {n}x{n}")));
            }
            Ok(DMatrix::from_fn(n, n, |r, c| Complex64::new(re[r][c], im[r][c])))
        };
        let c = build(&j.c_re, &j.c_im, "C")?;
        let b = build(&j.b_re, &j.b_im, "B")?;
        RealLinearOperator::new(c, b)
    }
}

impl RealLinearOperator {
    pub fn from_json_str(s: &str) -> std::result::Result<Self, OperatorParseError> {
        let raw: OperatorJson = serde_json::from_str(s).map_err(|e| OperatorParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        RealLinearOperator::try_from(raw).map_err(OperatorParseError::Invalid)
    }

    pub fn to_json(&self) -> OperatorJson {
        OperatorJson::from(self)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OperatorParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error(transparent)]
    Invalid(Error),
}
