mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rlspec_core::charpoly::{charpoly_eval, emptiness_certificates};
use rlspec_core::spectrum::{
    common_invariant_1d, eigenvector, krylov_cspan, no_eigenvalue_certificate, ray_spectrum, spectrum_sweep,
    InvariantFlag, IMAG_TOL, RESIDUAL_TOL,
};
use rlspec_core::{CMat, CVec, RealLinearOperator};

fn sweep(op: &RealLinearOperator, n_rays: usize) -> rlspec_core::spectrum::SpectrumCloud {
    spectrum_sweep(op, n_rays, IMAG_TOL, RESIDUAL_TOL).unwrap()
}

fn basis(n: usize, k: usize) -> CVec {
    let mut e = CVec::zeros(n);
    e[k] = re(1.0);
    e
}

fn is_line_of(x: &CVec, e: &CVec) -> bool {
    (x.dotc(e).norm() - 1.0).abs() < 1e-10
}

#[test]
fn ray_examples() {
    let tau = RealLinearOperator::conjugation(1);
    for theta in [0.0, 0.7, 2.0, 4.5] {
        let hits = ray_spectrum(&tau, theta, IMAG_TOL).unwrap();
        assert!(hits.iter().any(|h| (h.theta - theta).abs() < 1e-12 && (h.r - 1.0).abs() < 1e-12), "{hits:?}");
    }
    let id = RealLinearOperator::identity(1);
    let hits = ray_spectrum(&id, 0.0, IMAG_TOL).unwrap();
    assert_eq!(hits.len(), 1);
    assert!((hits[0].r - 1.0).abs() < 1e-14 && hits[0].residual < 1e-14);
    assert!(ray_spectrum(&id, FRAC_PI_2, IMAG_TOL).unwrap().is_empty());
    for theta in [0.0, 1.0, 3.0] {
        assert!(ray_spectrum(&skew_example(), theta, IMAG_TOL).unwrap().is_empty());
    }
}

#[test]
fn sweep_examples() {
    let cloud = sweep(&RealLinearOperator::conjugation(1), 64);
    assert_eq!(cloud.points.len(), 64);
    assert!(cloud.points.iter().all(|p| (p.r - 1.0).abs() <= 1e-10));

    let c = CMat::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), Complex64::new(0.0, 2.0)]);
    let cloud = sweep(&RealLinearOperator::complex_linear(c).unwrap(), 16);
    let found = cloud.lambdas();
    assert_eq!(found.len(), 2);
    assert!((found[0] - re(1.0)).norm() < 1e-12 && (found[1] - Complex64::new(0.0, 2.0)).norm() < 1e-12);

    for eps in [0.25, 0.5, 0.9] {
        assert!(sweep(&epsilon_example(eps), 64).is_empty());
    }
    assert!(spectrum_sweep(&skew_example(), 0, IMAG_TOL, RESIDUAL_TOL).is_err());
}

#[test]
fn eigenvector_examples() {
    let id = RealLinearOperator::identity(3);
    let x = eigenvector(&id, re(1.0), 1e-10).unwrap();
    assert!((id.apply(&x).unwrap() - &x).norm() <= 1e-12);

    let tau = RealLinearOperator::conjugation(1);
    let x = eigenvector(&tau, re(1.0), 1e-10).unwrap();
    assert!(x[0].im.abs() < 1e-14 && (x[0].re.abs() - 1.0).abs() < 1e-14);

    for phi in [0.4, 1.3, 2.9] {
        let lambda = Complex64::from_polar(1.0, phi);
        let x = eigenvector(&tau, lambda, 1e-10).unwrap();
        let rotated = x[0] * Complex64::from_polar(1.0, phi / 2.0);
        assert!(rotated.im.abs() < 1e-12, "{x}");
        assert!((tau.apply(&x).unwrap() - &x * lambda).norm() < 1e-12);
    }
    assert!(eigenvector(&tau, re(0.5), 1e-10).is_none());
}

#[test]
fn certificate_examples() {
    let cert = no_eigenvalue_certificate(&skew_example());
    assert!(cert.certified);
    assert!((cert.margin - 1.0).abs() < 1e-14 && cert.hat_norm == 0.0);
    let cert = no_eigenvalue_certificate(&RealLinearOperator::identity(2));
    assert!(!cert.certified && cert.skew_min_modulus == 0.0);
}

#[test]
fn invariant_line_examples() {
    assert!(common_invariant_1d(&jordan_example(), 1e-9).unwrap().lines.is_empty());

    let found = common_invariant_1d(&RealLinearOperator::identity(3), 1e-9).unwrap();
    assert_eq!(found.lines.len(), 3);
    assert!(matches!(found.flags[..], [InvariantFlag::EigenspaceDegenerateAll { dim: 3, .. }]));

    let c = CMat::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(2.0)]);
    let found = common_invariant_1d(&RealLinearOperator::complex_linear(c).unwrap(), 1e-9).unwrap();
    assert_eq!(found.lines.len(), 2);
    assert!(found.lines.iter().any(|x| is_line_of(x, &basis(2, 0))));
    assert!(found.lines.iter().any(|x| is_line_of(x, &basis(2, 1))));
}

#[test]
fn krylov_examples() {
    let span = krylov_cspan(&RealLinearOperator::conjugation(3), &basis(3, 0), 3, 1e-12).unwrap();
    assert_eq!(span.dim(), 1);
    assert_eq!(span.max_residual(), 0.0);

    let span = krylov_cspan(&jordan_example(), &basis(2, 0), 2, 1e-12).unwrap();
    assert_eq!(span.dim(), 2);
    assert!(span.max_residual() < 1e-12);
}

/// `C` small, `B = S + E` with `S` block-diagonal skew of modulus at least one
/// and `E` symmetric small, so the no-eigenvalue certificate applies.
fn certified_operator(rng: &mut impl Rng, pairs: usize) -> RealLinearOperator {
    let n = 2 * pairs;
    let mut b = CMat::zeros(n, n);
    for k in 0..pairs {
        let s = complex(rng) * 0.5 + complex(rng).unscale(complex(rng).norm().max(1e-3)) * 1.2;
        b[(2 * k, 2 * k + 1)] = s;
        b[(2 * k + 1, 2 * k)] = -s;
    }
    let e = matrix(rng, n) * re(0.1);
    let b = b + &e + e.transpose();
    RealLinearOperator::new(matrix(rng, n) * re(0.1), b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cloud_points_are_spectral(seed in any::<u64>(), n in 1usize..=5) {
        let op = operator(&mut rng(seed), n);
        let cloud = sweep(&op, 32);
        let bound = op.operator_norm() + 1e-8;
        for p in &cloud.points {
            prop_assert!(p.r <= bound);
            let scale = (1.0 + p.r).powi(2 * n as i32);
            prop_assert!(charpoly_eval(&op, p.lambda).abs() <= cloud.tol_residual * scale);
            prop_assert!(eigenvector(&op, p.lambda, 1e-6).is_some());
        }
        let sorted = cloud.points.windows(2).all(|w| (w[0].theta, w[0].r) <= (w[1].theta, w[1].r));
        prop_assert!(sorted);
    }

    #[test]
    fn antilinear_spectrum_is_rotation_invariant(seed in any::<u64>(), n in 1usize..=5) {
        let op = antilinear(&mut rng(seed), n);
        let cloud = sweep(&op, 16);
        let mut radii: Vec<Vec<f64>> = vec![Vec::new(); 16];
        for p in &cloud.points {
            let k = (p.theta / (2.0 * PI) * 16.0).round() as usize % 16;
            radii[k].push(p.r);
        }
        for ray in &radii[1..] {
            prop_assert_eq!(ray.len(), radii[0].len());
            for (a, b) in ray.iter().zip(&radii[0]) {
                prop_assert!((a - b).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn complex_linear_cloud_is_eigenvalue_set(seed in any::<u64>(), n in 1usize..=5) {
        let mut g = rng(seed);
        let n_rays = 32;
        let mu: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(0.5 + 0.3 * k as f64, 2.0 * PI * g.gen_range(0..n_rays) as f64 / n_rays as f64))
            .collect();
        let c = CMat::from_fn(n, n, |i, j| if i == j { mu[i] } else if j > i { complex(&mut g) * 0.2 } else { re(0.0) });
        let cloud = sweep(&RealLinearOperator::complex_linear(c).unwrap(), n_rays);
        for l in cloud.lambdas() {
            prop_assert!(mu.iter().any(|m| (m - l).norm() <= 1e-8));
        }
        for m in &mu {
            prop_assert!(cloud.lambdas().iter().any(|l| (m - l).norm() <= 1e-8));
        }
    }

    #[test]
    fn certified_operators_have_empty_sweep(seed in any::<u64>(), pairs in 1usize..=3) {
        let op = certified_operator(&mut rng(seed), pairs);
        let cert = no_eigenvalue_certificate(&op);
        prop_assume!(cert.certified);
        prop_assert!(sweep(&op, 64).is_empty());
    }

    #[test]
    fn real_axis_zero_on_zero_ray(seed in any::<u64>(), n in 1usize..=4) {
        let op = operator(&mut rng(seed), n);
        let cert = emptiness_certificates(&op).unwrap();
        if let Some(r) = cert.real_axis_zero {
            let hits = ray_spectrum(&op, 0.0, IMAG_TOL).unwrap();
            prop_assert!(hits.iter().any(|h| (h.r - r).abs() <= 1e-6), "zero {} not in {:?}", r, hits);
        }
    }

    #[test]
    fn invariant_lines_are_invariant(seed in any::<u64>(), n in 1usize..=4) {
        let mut g = rng(seed);
        // a common eigenline planted in e_0
        let mut c = matrix(&mut g, n);
        let mut b = matrix(&mut g, n);
        for i in 1..n {
            c[(i, 0)] = re(0.0);
            b[(i, 0)] = re(0.0);
        }
        let op = RealLinearOperator::new(c.clone(), b.clone()).unwrap();
        let found = common_invariant_1d(&op, 1e-8).unwrap();
        prop_assert!(found.lines.iter().any(|x| is_line_of(x, &basis(n, 0))));
        for x in &found.lines {
            for m in [&c * x, &b * x.map(|z| z.conj())] {
                let along = x * x.dotc(&m);
                prop_assert!((m - along).norm() <= 1e-7);
            }
        }
    }

    #[test]
    fn antilinear_krylov_span_is_invariant(seed in any::<u64>(), n in 1usize..=8) {
        let mut g = rng(seed);
        let op = antilinear(&mut g, n);
        let span = krylov_cspan(&op, &vector(&mut g, n), n, 1e-10).unwrap();
        prop_assert!(span.max_residual() <= 1e-10);
        for (i, q) in span.basis.iter().enumerate() {
            for p in &span.basis[..i] {
                prop_assert!(p.dotc(q).norm() < 1e-12);
            }
        }
    }
}
