//! Random operator generators shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rlspec_core::{CMat, CVec, RealLinearOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Entries uniform in the unit square scaled by `1/sqrt(n)`, keeping the
/// operator norm of order one across dimensions.
pub fn matrix(rng: &mut impl Rng, n: usize) -> CMat {
    let s = 1.0 / (n as f64).sqrt();
    CMat::from_fn(n, n, |_, _| complex(rng) * s)
}

pub fn vector(rng: &mut impl Rng, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| complex(rng))
}

pub fn unit_vector(rng: &mut impl Rng, n: usize) -> CVec {
    let v = vector(rng, n);
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

pub fn operator(rng: &mut impl Rng, n: usize) -> RealLinearOperator {
    RealLinearOperator::new(matrix(rng, n), matrix(rng, n)).unwrap()
}

pub fn antilinear(rng: &mut impl Rng, n: usize) -> RealLinearOperator {
    RealLinearOperator::antilinear(matrix(rng, n)).unwrap()
}

/// `C = 0`, `B = [[a, b], [−b, a]]` with `a = sqrt((1+ε)/2)`, `b = sqrt((1−ε)/2)`.
pub fn epsilon_example(eps: f64) -> RealLinearOperator {
    let a = ((1.0 + eps) / 2.0).sqrt();
    let b = ((1.0 - eps) / 2.0).sqrt();
    let m = CMat::from_row_slice(2, 2, &[re(a), re(b), re(-b), re(a)]);
    RealLinearOperator::antilinear(m).unwrap()
}

/// `C = 0`, `B = [[0, 1], [−1, 0]]`.
pub fn skew_example() -> RealLinearOperator {
    let m = CMat::from_row_slice(2, 2, &[re(0.0), re(1.0), re(-1.0), re(0.0)]);
    RealLinearOperator::antilinear(m).unwrap()
}

/// `C = [[1, 1], [0, 1]]`, `B = [[0, 0], [1, 0]]`: no invariant complex line.
pub fn jordan_example() -> RealLinearOperator {
    let c = CMat::from_row_slice(2, 2, &[re(1.0), re(1.0), re(0.0), re(1.0)]);
    let b = CMat::from_row_slice(2, 2, &[re(0.0), re(0.0), re(1.0), re(0.0)]);
    RealLinearOperator::new(c, b).unwrap()
}

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn polar_grid(radii: &[f64], n_angles: usize) -> Vec<Complex64> {
    let mut out = Vec::new();
    for &r in radii {
        for t in 0..n_angles {
            let th = 2.0 * std::f64::consts::PI * t as f64 / n_angles as f64 + 0.1;
            out.push(Complex64::from_polar(r, th));
        }
    }
    out
}
