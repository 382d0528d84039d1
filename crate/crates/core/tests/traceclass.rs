mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rlspec_core::charpoly::{charpoly_value, rotate};
use rlspec_core::oplib::matrix_schatten_norm;
use rlspec_core::spectrum::{ray_spectrum, IMAG_TOL};
use rlspec_core::traceclass::{
    det_continuity_check, disk_truncation, hankel_truncation, phi_converge, phi_eval, Decay, SymbolJson,
    SymbolSeries,
};
use rlspec_core::{CMat, Error, RealLinearOperator};

fn geometric(q: f64, len: usize) -> SymbolSeries {
    SymbolSeries::circle_hankel((0..len).map(|k| re(q.powi(k as i32))).collect(), Decay::Geometric(q)).unwrap()
}

/// `⟨z^m conj(φ_k), φ_l⟩` in the Bergman space of the unit disk with
/// `φ_k = √(k+1) z^k`, by the trapezoid rule in angle and Simpson in radius.
fn bergman_entry(m: usize, k: usize, l: usize) -> Complex64 {
    let (n_theta, n_r) = (64, 2000);
    let h = 1.0 / n_r as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for a in 0..n_theta {
        let theta = 2.0 * PI * a as f64 / n_theta as f64;
        let mut radial = 0.0;
        for b in 0..=n_r {
            let r = b as f64 * h;
            let w = if b == 0 || b == n_r { 1.0 } else if b % 2 == 1 { 4.0 } else { 2.0 };
            radial += w * r.powi((m + k + l) as i32 + 1);
        }
        radial *= h / 3.0;
        let phase = Complex64::from_polar(1.0, (m as f64 - k as f64 - l as f64) * theta);
        total += phase * radial * (2.0 * PI / n_theta as f64);
    }
    total * (((k + 1) * (l + 1)) as f64).sqrt() / PI
}

#[test]
fn hankel_examples() {
    let t = hankel_truncation(&geometric(0.5, 3), 2).unwrap();
    assert_eq!(t.b(), &CMat::from_row_slice(2, 2, &[re(1.0), re(0.5), re(0.5), re(0.25)]));
    assert!(t.c().iter().all(|z| z.norm() == 0.0));

    let c = Complex64::new(0.3, -0.4);
    let t = hankel_truncation(&SymbolSeries::circle_hankel(vec![c], Decay::Finite).unwrap(), 6).unwrap();
    assert_eq!(t.b()[(0, 0)], c);
    assert_eq!(t.b().iter().filter(|z| z.norm() > 0.0).count(), 1);

    let t = hankel_truncation(&geometric(0.7, 40), 12).unwrap();
    assert_eq!(t.adjoint(), t);
    assert_eq!(
        hankel_truncation(&geometric(0.5, 5), 4),
        Err(Error::InsufficientCoefficients { needed: 6, available: 5 })
    );
    assert!(hankel_truncation(&SymbolSeries::disk_monomial(1, re(1.0)), 2).is_err());
}

#[test]
fn disk_examples_match_quadrature() {
    let t = disk_truncation(&SymbolSeries::disk_monomial(0, re(1.0)), 1).unwrap();
    assert_eq!(t.b(), &CMat::from_element(1, 1, re(1.0)));
    let h = 2f64.sqrt() / 2.0;
    let t = disk_truncation(&SymbolSeries::disk_monomial(1, re(1.0)), 2).unwrap();
    assert!((t.b() - CMat::from_row_slice(2, 2, &[re(0.0), re(h), re(h), re(0.0)])).norm() < 1e-15);
    for n in 1..=4 {
        let t = disk_truncation(&SymbolSeries::disk_monomial(2 * n - 1, re(1.0)), n).unwrap();
        assert!(t.b().iter().all(|z| z.norm() == 0.0));
    }
    for m in 0..5 {
        let t = disk_truncation(&SymbolSeries::disk_monomial(m, re(1.0)), 4).unwrap();
        for k in 0..4 {
            for l in 0..4 {
                let q = bergman_entry(m, k, l);
                assert!((t.b()[(l, k)] - q).norm() < 1e-8, "m={m} k={k} l={l}: {} vs {q}", t.b()[(l, k)]);
            }
        }
    }
}

#[test]
fn phi_examples() {
    let c = Complex64::new(0.5, 0.5);
    let s = SymbolSeries::circle_hankel(vec![c], Decay::Finite).unwrap();
    for n in [1, 2, 7] {
        let t = s.truncation(n).unwrap();
        for l in polar_grid(&[0.3, 0.7, 1.0, 4.0], 6) {
            assert!((phi_eval(&t, l).unwrap() - (1.0 - c.norm_sqr() / l.norm_sqr())).abs() < 1e-12);
        }
    }

    let zero = SymbolSeries::circle_hankel(vec![], Decay::Finite).unwrap().truncation(5).unwrap();
    assert!((phi_eval(&zero, Complex64::new(0.2, -0.1)).unwrap() - 1.0).abs() < 1e-15);

    let tau = RealLinearOperator::conjugation(1);
    for theta in [0.0, 1.1, 2.5] {
        let hits = ray_spectrum(&tau, theta, IMAG_TOL).unwrap();
        let on_ray: Vec<f64> = hits.iter().filter(|h| (h.theta - theta).abs() < 1e-12).map(|h| h.r).collect();
        assert_eq!(on_ray.len(), 1);
        let zero = Complex64::from_polar(on_ray[0], theta);
        assert!(phi_eval(&tau, zero).unwrap().abs() < 1e-14);
        assert!((phi_eval(&tau, Complex64::from_polar(2.0, theta)).unwrap() - 0.75).abs() < 1e-14);
    }
    assert_eq!(phi_eval(&tau, re(0.0)), Err(Error::ZeroLambda));
}

#[test]
fn convergence_examples() {
    let grid = polar_grid(&[0.5, 1.0, 3.0], 12);
    let table = phi_converge(&geometric(0.5, 200), &grid, &[2, 4, 8, 16, 32, 64], 0.5).unwrap();
    assert!(table.diffs.windows(2).all(|w| w[1] <= w[0]), "{:?}", table.diffs);
    assert!(table.diffs.last().unwrap() <= &1e-6);
    assert!(table.stalls.is_empty() && table.warnings.is_empty());

    let rank_one = SymbolSeries::circle_hankel(vec![re(0.8)], Decay::Finite).unwrap();
    let table = phi_converge(&rank_one, &grid, &[1, 2, 4, 8], 0.1).unwrap();
    assert!(table.diffs.iter().all(|&d| d == 0.0));

    let zero = SymbolSeries::circle_hankel(vec![], Decay::Finite).unwrap();
    let table = phi_converge(&zero, &grid, &[1, 3], 0.1).unwrap();
    assert!(table.values.iter().flatten().all(|&v| v == 1.0));
    let csv = table.to_csv();
    assert_eq!(csv.lines().next().unwrap(), "lambda_re,lambda_im,n=1,n=3");
    assert_eq!(csv.lines().count(), grid.len() + 1);

    let long = SymbolSeries::circle_hankel(vec![re(0.5); 10], Decay::Finite).unwrap();
    let warnings = phi_converge(&long, &grid, &[2], 0.1).unwrap().warnings;
    assert!(warnings.iter().any(|w| w.contains("10 coefficients")), "{warnings:?}");
    let slow = geometric(0.9, 20);
    assert!(!phi_converge(&slow, &grid, &[4, 8], 0.1).unwrap().warnings.is_empty());
    assert!(phi_converge(&zero, &[re(0.05)], &[1], 0.1).is_err());
    assert!(phi_converge(&zero, &grid, &[], 0.1).is_err());
}

#[test]
fn continuity_examples() {
    let mut g = rng(41);
    let c = matrix(&mut g, 4);
    let same = det_continuity_check(&c, &c).unwrap();
    assert!(same.holds && same.lhs == 0.0 && same.rhs == 0.0);
    for n in 1..=6 {
        let c1 = matrix(&mut g, n);
        assert!(det_continuity_check(&c1, &CMat::zeros(n, n)).unwrap().holds);
    }
    assert!(det_continuity_check(&CMat::zeros(2, 2), &CMat::zeros(3, 3)).is_err());
}

#[test]
fn symbol_json_roundtrip() {
    let s = geometric(0.5, 6);
    let text = serde_json::to_string(&s.to_json()).unwrap();
    assert!(text.contains("\"circle-hankel\"") && text.contains("\"geometric\""));
    let back = SymbolSeries::try_from(serde_json::from_str::<SymbolJson>(&text).unwrap()).unwrap();
    assert_eq!(back, s);

    let raw = r#"{"kind": "disk-monomial", "m": 3, "decay": {"tag": "finite"}}"#;
    let s = SymbolSeries::try_from(serde_json::from_str::<SymbolJson>(raw).unwrap()).unwrap();
    assert_eq!(s.m, 3);
    let raw = r#"{"kind": "circle-hankel", "coeffs_re": [1], "decay": {"tag": "polynomial", "param": 1.5}}"#;
    assert!(SymbolSeries::try_from(serde_json::from_str::<SymbolJson>(raw).unwrap()).is_err());
}

fn random_symbol(g: &mut impl rand::Rng, n: usize) -> SymbolSeries {
    let coeffs = (0..2 * n).map(|k| complex(g) * 0.8f64.powi(k as i32)).collect();
    SymbolSeries::circle_hankel(coeffs, Decay::Finite).unwrap()
}

fn pad(op: &RealLinearOperator, n: usize) -> CMat {
    let mut out = CMat::zeros(n, n);
    let k = op.dim();
    out.view_mut((0, 0), (k, k)).copy_from(op.b());
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn phi_is_real_and_radial(seed in any::<u64>(), n in 1usize..=6) {
        let mut g = rng(seed);
        let t = random_symbol(&mut g, n).truncation(n).unwrap();
        for r in [0.4, 1.0, 2.2] {
            let values: Vec<f64> = (0..8).map(|k| phi_eval(&t, Complex64::from_polar(r, 0.3 + k as f64)).unwrap()).collect();
            for v in &values {
                prop_assert!((v - values[0]).abs() <= 1e-10);
            }
            let l = Complex64::from_polar(r, 0.3);
            let raw = charpoly_value(&t, l) / l.norm_sqr().powi(n as i32);
            prop_assert!(raw.im.abs() <= 1e-10);
            prop_assert!((raw.re - values[0]).abs() <= 1e-10 * values[0].abs().max(1.0));
        }
    }

    #[test]
    fn phi_zeros_match_ray_spectrum(seed in any::<u64>(), n in 1usize..=5, theta in 0.0f64..PI) {
        let t = random_symbol(&mut rng(seed), n).truncation(n).unwrap();
        let hits = ray_spectrum(&t, theta, IMAG_TOL).unwrap();
        for h in hits.iter().filter(|h| h.r > 1e-6) {
            let l = Complex64::from_polar(h.r, h.theta);
            let slope = 2.0 * n as f64 * (1.0 + t.operator_norm() / h.r).powi(2 * n as i32);
            prop_assert!(phi_eval(&t, l).unwrap().abs() <= 1e-8 * slope);
        }
        // a sign change of φ along the ray brackets a hit
        let rs: Vec<f64> = (1..200).map(|k| 0.01 * k as f64 * (1.0 + t.operator_norm())).collect();
        let vals: Vec<f64> = rs.iter().map(|&r| phi_eval(&t, Complex64::from_polar(r, theta)).unwrap()).collect();
        for k in 1..rs.len() {
            if vals[k - 1] * vals[k] < 0.0 {
                prop_assert!(hits.iter().any(|h| h.r >= rs[k - 1] - 1e-6 && h.r <= rs[k] + 1e-6));
            }
        }
    }

    #[test]
    fn geometric_truncations_are_cauchy(q in 0.1f64..0.7) {
        let s = geometric(q, 300);
        let mut last = f64::INFINITY;
        for n in [4, 8, 16, 32, 64] {
            let diff = pad(&s.truncation(2 * n).unwrap(), 2 * n) - pad(&s.truncation(n).unwrap(), 2 * n);
            let d = matrix_schatten_norm(&diff, 1.0).unwrap();
            prop_assert!(d <= last * (1.0 + 1e-12) + 1e-15);
            last = d;
        }
        prop_assert!(last <= 1e-8);
    }

    #[test]
    fn truncation_complexification_doubles_schatten(seed in any::<u64>(), n in 1usize..=6, p in 1.0f64..3.0) {
        let t = random_symbol(&mut rng(seed), n).truncation(n).unwrap();
        let full = matrix_schatten_norm(&t.complexify().matrix, p).unwrap().powf(p);
        let half = matrix_schatten_norm(t.b(), p).unwrap().powf(p);
        prop_assert!((full - 2.0 * half).abs() <= 1e-9 * half.max(1.0));
        let rotated = rotate(&t, 0.7).complexify().matrix;
        prop_assert!((matrix_schatten_norm(&rotated, p).unwrap().powf(p) - full).abs() <= 1e-9 * full.max(1.0));
    }

    #[test]
    fn continuity_on_hankel_pairs(seed in any::<u64>(), n in 1usize..=6, size in -4i32..0) {
        let mut g = rng(seed);
        let t = random_symbol(&mut g, n).truncation(n).unwrap();
        let b2 = t.b() + matrix(&mut g, n) * re(10f64.powi(size));
        let c1 = t.complexify().matrix;
        let c2 = RealLinearOperator::antilinear(b2).unwrap().complexify().matrix;
        prop_assert!(det_continuity_check(&c1, &c2).unwrap().holds);
    }
}
