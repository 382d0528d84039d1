//! Friedrichs operators given by a symbol, their finite truncations, and the
//! characteristic function `φ(re^{iθ}) = det[I − r⁻¹(e^{−iθ}C + A)]^ℂ` as the
//! limit of `p_n(λ, λ̄) / |λ|^{2n}` over growing truncations.
//!
//! Two symbol families are supported:
//!
//! - `circle-hankel`: `B_a f = P(a·conj(f))` on the Hardy space of the unit
//!   circle. In the Fourier basis its matrix is the Hankel matrix
//!   `B[l][k] = a_{k+l}`.
//! - `disk-monomial`: `F_a f = P(a·conj(f))` on the Bergman space of the unit
//!   disk with `a = c·z^m`. In the orthonormal basis `√(k+1) z^k` the only
//!   nonzero entries are `B[l][k] = c·√((k+1)(l+1)) / (m+1)` with `k + l = m`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charpoly::rotate;
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::linalg::{self, CMat};
use crate::oplib::RealLinearOperator;

/// Tail bounds above this are reported as truncation-limited.
pub const TAIL_WARN: f64 = 1e-6;
/// Default exclusion radius around the origin, relative to the symbol scale.
pub const DEFAULT_LAMBDA_MIN_FACTOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolKind {
    #[serde(rename = "circle-hankel")]
    CircleHankel,
    #[serde(rename = "disk-monomial")]
    DiskMonomial,
}

/// Declared decay of `|a_k|` beyond the given coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// All coefficients past the list are zero.
    Finite,
    /// `|a_k| ≲ q^k`, `0 ≤ q < 1`.
    Geometric(f64),
    /// `|a_k| ≲ k^{−s}`, `s > 2` so that `Σ (k+1)|a_k|` converges.
    Polynomial(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSeries {
    pub kind: SymbolKind,
    pub coeffs: Vec<Complex64>,
    pub m: usize,
    pub decay: Decay,
}

impl SymbolSeries {
    pub fn circle_hankel(coeffs: Vec<Complex64>, decay: Decay) -> Result<Self> {
        let s = Self { kind: SymbolKind::CircleHankel, coeffs, m: 0, decay };
        s.validate()?;
        Ok(s)
    }

    /// `a = c·z^m` on the unit disk.
    pub fn disk_monomial(m: usize, c: Complex64) -> Self {
        Self { kind: SymbolKind::DiskMonomial, coeffs: vec![c], m, decay: Decay::Finite }
    }

    pub fn validate(&self) -> Result<()> {
        match self.decay {
            Decay::Geometric(q) if !(0.0..1.0).contains(&q) => {
                Err(Error::InvalidSymbol(format!("geometric decay needs 0 <= q < 1, got {q}")))
            }
            Decay::Polynomial(s) if s.is_nan() || s <= 2.0 => {
                Err(Error::InvalidSymbol(format!("polynomial decay needs s > 2, got {s}")))
            }
            _ if self.coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) => {
                Err(Error::InvalidSymbol("coefficients must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// Largest coefficient modulus, used to scale the default λ grid.
    pub fn scale(&self) -> f64 {
        match self.kind {
            SymbolKind::CircleHankel => self.coeffs.iter().fold(0.0, |a, z| a.max(z.norm())),
            SymbolKind::DiskMonomial => self.coeffs.first().map_or(1.0, |c| c.norm()),
        }
    }

    /// Bound on `Σ_{k≥from} (k+1)|a_k|`: the given coefficients past `from`
    /// plus the declared decay extrapolated from the last given one.
    pub fn tail_bound(&self, from: usize) -> f64 {
        let given: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .skip(from)
            .map(|(k, a)| (k + 1) as f64 * a.norm())
            .sum();
        let last = self.coeffs.len();
        if last == 0 {
            return given;
        }
        let a_last = self.coeffs[last - 1].norm();
        let start = last.max(from) as f64;
        let beyond = match self.decay {
            Decay::Finite => 0.0,
            Decay::Geometric(q) => {
                if a_last == 0.0 || q == 0.0 {
                    0.0
                } else {
                    // M q^k with M fitted at the last coefficient; Σ_{k≥K} (k+1) q^k
                    let m = a_last / q.powi(last as i32 - 1);
                    let qk = q.powf(start);
                    m * qk * ((start + 1.0) / (1.0 - q) + q / ((1.0 - q) * (1.0 - q)))
                }
            }
            Decay::Polynomial(s) => {
                let m = a_last * (last as f64).powf(s);
                // Σ_{k≥K} (k+1) k^{−s} ≤ 2 Σ k^{1−s} ≤ 2 (K−1)^{2−s} / (s−2)
                2.0 * m * (start - 1.0).max(1.0).powf(2.0 - s) / (s - 2.0)
            }
        };
        given + beyond
    }

    fn coeff(&self, k: usize) -> Result<Complex64> {
        match self.coeffs.get(k) {
            Some(&a) => Ok(a),
            None if self.decay == Decay::Finite => Ok(Complex64::new(0.0, 0.0)),
            None => Err(Error::InsufficientCoefficients { needed: k + 1, available: self.coeffs.len() }),
        }
    }

    pub fn truncation(&self, n: usize) -> Result<RealLinearOperator> {
        match self.kind {
            SymbolKind::CircleHankel => hankel_truncation(self, n),
            SymbolKind::DiskMonomial => disk_truncation(self, n),
        }
    }

    pub fn to_json(&self) -> SymbolJson {
        let (tag, param) = match self.decay {
            Decay::Finite => ("finite", 0.0),
            Decay::Geometric(q) => ("geometric", q),
            Decay::Polynomial(s) => ("polynomial", s),
        };
        SymbolJson {
            kind: self.kind,
            coeffs_re: self.coeffs.iter().map(|z| z.re).collect(),
            coeffs_im: self.coeffs.iter().map(|z| z.im).collect(),
            m: self.m,
            decay: DecayJson { tag: tag.to_string(), param },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayJson {
    pub tag: String,
    #[serde(default)]
    pub param: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolJson {
    pub kind: SymbolKind,
    #[serde(default)]
    pub coeffs_re: Vec<f64>,
    #[serde(default)]
    pub coeffs_im: Vec<f64>,
    #[serde(default)]
    pub m: usize,
    pub decay: DecayJson,
}

impl TryFrom<SymbolJson> for SymbolSeries {
    type Error = Error;

    fn try_from(j: SymbolJson) -> Result<Self> {
        let im = if j.coeffs_im.is_empty() { vec![0.0; j.coeffs_re.len()] } else { j.coeffs_im };
        if im.len() != j.coeffs_re.len() {
            return Err(Error::InvalidSymbol(format!(
                "coeffs_re has {} entries but coeffs_im has {}",
                j.coeffs_re.len(),
                im.len()
            )));
        }
        let decay = match j.decay.tag.as_str() {
            "finite" => Decay::Finite,
            "geometric" => Decay::Geometric(j.decay.param),
            "polynomial" => Decay::Polynomial(j.decay.param),
            other => return Err(Error::InvalidSymbol(format!("unknown decay tag {other:?}"))),
        };
        let coeffs = j.coeffs_re.iter().zip(&im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        let s = SymbolSeries { kind: j.kind, coeffs, m: j.m, decay };
        s.validate()?;
        Ok(s)
    }
}

/// `C = 0`, `B[l][k] = a_{k+l}` for `k, l < n`.
pub fn hankel_truncation(s: &SymbolSeries, n: usize) -> Result<RealLinearOperator> {
    if s.kind != SymbolKind::CircleHankel {
        return Err(Error::InvalidSymbol("hankel truncation needs a circle-hankel symbol".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("truncation size must be at least 1".into()));
    }
    let a: Vec<Complex64> = (0..2 * n - 1).map(|k| s.coeff(k)).collect::<Result<_>>()?;
    RealLinearOperator::antilinear(CMat::from_fn(n, n, |l, k| a[k + l]))
}

/// `C = 0`, `B[l][k] = c·√((k+1)(l+1)) / (m+1)` when `k + l = m`.
pub fn disk_truncation(s: &SymbolSeries, n: usize) -> Result<RealLinearOperator> {
    if s.kind != SymbolKind::DiskMonomial {
        return Err(Error::InvalidSymbol("disk truncation needs a disk-monomial symbol".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("truncation size must be at least 1".into()));
    }
    let c = s.coeffs.first().copied().unwrap_or(Complex64::new(1.0, 0.0));
    let m = s.m;
    let b = CMat::from_fn(n, n, |l, k| {
        if k + l == m {
            c * (((k + 1) * (l + 1)) as f64).sqrt() / (m + 1) as f64
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    RealLinearOperator::antilinear(b)
}

/// `φ(λ) = det[I − r⁻¹(e^{−iθ}C + A)]^ℂ` for `λ = re^{iθ} ≠ 0`, which equals
/// `p(λ, λ̄) / |λ|^{2n}` without forming the possibly tiny or huge `p`.
pub fn phi_eval(op: &RealLinearOperator, lambda: Complex64) -> Result<f64> {
    let r = lambda.norm();
    if r == 0.0 {
        return Err(Error::ZeroLambda);
    }
    let m = rotate(op, lambda.arg()).complexify().matrix;
    let dim = m.nrows();
    let shifted = CMat::identity(dim, dim) - m / Complex64::new(r, 0.0);
    Ok(linalg::det(&shifted).re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiTable {
    pub lambdas: Vec<Complex64>,
    pub n_list: Vec<usize>,
    /// `values[g][k] = φ_{n_list[k]}(lambdas[g])`.
    pub values: Vec<Vec<f64>>,
    /// `sup_g |φ_{n_{k+1}} − φ_{n_k}|` for consecutive truncation sizes.
    pub diffs: Vec<f64>,
    /// Indices `k` into `diffs` where the difference grew instead of shrinking.
    pub stalls: Vec<usize>,
    pub warnings: Vec<String>,
}

impl PhiTable {
    /// CSV with columns `lambda_re,lambda_im` then one `n=<size>` column per truncation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda_re,lambda_im");
        for n in &self.n_list {
            out.push_str(&format!(",n={n}"));
        }
        out.push('\n');
        for (lambda, row) in self.lambdas.iter().zip(&self.values) {
            out.push_str(&fmt_f64(lambda.re));
            out.push(',');
            out.push_str(&fmt_f64(lambda.im));
            for v in row {
                out.push(',');
                out.push_str(&fmt_f64(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Tabulate `φ_n` over a grid of `λ` for each truncation size in `n_list`.
///
/// Every grid point must satisfy `|λ| ≥ lambda_min > 0`.
pub fn phi_converge(
    s: &SymbolSeries,
    lambdas: &[Complex64],
    n_list: &[usize],
    lambda_min: f64,
) -> Result<PhiTable> {
    if !(lambda_min > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda_min must be positive, got {lambda_min}")));
    }
    if let Some(bad) = lambdas.iter().find(|l| l.norm() < lambda_min) {
        return Err(Error::InvalidArgument(format!(
            "grid point {bad} lies inside the excluded disk |lambda| < {lambda_min}"
        )));
    }
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::InvalidArgument("truncation sizes must be positive".into()));
    }
    s.validate()?;

    let mut warnings = Vec::new();
    let n_max = *n_list.iter().max().expect("nonempty");
    if s.kind == SymbolKind::CircleHankel {
        let used = 2 * n_max - 1;
        if s.decay == Decay::Finite && s.coeffs.len() > used {
            warnings.push(format!(
                "finite symbol has {} coefficients but the largest truncation uses {used}",
                s.coeffs.len()
            ));
        }
        let tail = s.tail_bound(used);
        if tail > TAIL_WARN {
            warnings.push(format!("coefficient tail beyond the largest truncation is bounded by {tail:.3e}"));
        }
    }

    let truncations: Vec<RealLinearOperator> = n_list.iter().map(|&n| s.truncation(n)).collect::<Result<_>>()?;
    let values: Vec<Vec<f64>> = lambdas
        .par_iter()
        .map(|&l| truncations.iter().map(|t| phi_eval(t, l)).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;

    let diffs: Vec<f64> = (1..n_list.len())
        .map(|k| values.iter().map(|row| (row[k] - row[k - 1]).abs()).fold(0.0, f64::max))
        .collect();
    let stalls = (1..diffs.len()).filter(|&k| diffs[k] > diffs[k - 1] && diffs[k] > 1e-14).collect();
    Ok(PhiTable { lambdas: lambdas.to_vec(), n_list: n_list.to_vec(), values, diffs, stalls, warnings })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetContinuity {
    /// `|det(I + C1) − det(I + C2)|`.
    pub lhs: f64,
    /// `‖C1 − C2‖₁ · exp(1 + ‖C1‖₁ + ‖C2‖₁)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `|det(I+C1) − det(I+C2)| ≤ ‖C1−C2‖₁ exp(1 + ‖C1‖₁ + ‖C2‖₁)`.
pub fn det_continuity_check(c1: &CMat, c2: &CMat) -> Result<DetContinuity> {
    if c1.nrows() != c1.ncols() || c1.shape() != c2.shape() {
        return Err(Error::DimensionMismatch { expected: c1.nrows(), got: c2.nrows() });
    }
    let n = c1.nrows();
    let id = CMat::identity(n, n);
    let lhs = (linalg::det(&(&id + c1)) - linalg::det(&(&id + c2))).norm();
    let trace_norm = |m: &CMat| linalg::singular_values(m).iter().sum::<f64>();
    let rhs = trace_norm(&(c1 - c2)) * (1.0 + trace_norm(c1) + trace_norm(c2)).exp();
    // roundoff allowance for the C1 = C2 case
    let slack = 1e-12 * (1.0 + linalg::det(&(&id + c1)).norm());
    Ok(DetContinuity { lhs, rhs, holds: lhs <= rhs + slack })
}
