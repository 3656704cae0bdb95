use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use faer::{Mat, Side};
use proptest::prelude::*;
use qspectra::mathieu::{
    char_value, char_value_at_truncation, char_value_odd, floquet_exponent, mathieu_c, mathieu_ce,
    mathieu_s, mathieu_se, MathieuSolution, Parity,
};
use qspectra::Error;

/// Dense symmetric form of the `ce_{2m}` recurrence on `cos(2nz)`,
/// `n = 0..=n_max`, solved with a general Hermitian eigensolver. Returns
/// the lowest eigenvalue and its cosine coefficients `A_0, A_2, ...`.
fn dense_even_cos(q: f64, n_max: usize) -> (f64, Vec<f64>) {
    let dim = n_max + 1;
    let m = Mat::<f64>::from_fn(dim, dim, |i, j| {
        if i == j {
            (2.0 * i as f64).powi(2)
        } else if i.abs_diff(j) == 1 {
            if i == 0 || j == 0 {
                SQRT_2 * q
            } else {
                q
            }
        } else {
            0.0
        }
    });
    let eig = m.self_adjoint_eigen(Side::Lower).unwrap();
    let a = eig.S().column_vector()[0];
    let u = eig.U();
    let mut coeffs: Vec<f64> = (0..dim).map(|i| u[(i, 0)]).collect();
    coeffs[0] /= SQRT_2;
    (a, coeffs)
}

#[test]
fn integer_characteristic_values_at_zero_q() {
    assert!((char_value(3.0, 0.0).unwrap() - 9.0).abs() < 1e-13);
    assert!(char_value(0.0, 0.0).unwrap().abs() < 1e-13);
}

#[test]
fn a0_at_unit_q_matches_dense_oracle() {
    let (oracle, _) = dense_even_cos(1.0, 64);
    let a = char_value(0.0, 1.0).unwrap();
    assert!((a - oracle).abs() < 1e-13, "{a} vs {oracle}");
    // frozen regression constant (dense oracle, N = 64)
    assert!((a - -0.455_138_604_107_414_2).abs() < 1e-14);
}

#[test]
fn ce_and_se_at_zero_q() {
    assert!(mathieu_ce(2, 0.0, FRAC_PI_4).unwrap().abs() < 1e-15);
    assert!((mathieu_se(1, 0.0, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn ce0_at_origin_matches_fourier_oracle() {
    // same normalisation as the library: unit Euclidean norm of the
    // cosine coefficients, ce_0(0) > 0
    let (_, coeffs) = dense_even_cos(1.0, 64);
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let oracle = (coeffs.iter().sum::<f64>() / norm).abs();
    let ce = mathieu_ce(0, 1.0, 0.0).unwrap();
    assert!((ce - oracle).abs() < 1e-12, "{ce} vs {oracle}");
    assert!((ce - CE0_Q1_AT_0).abs() < 1e-12);
}

// frozen from the Fourier oracle above
const CE0_Q1_AT_0: f64 = 0.520_282_366_113_996;

#[test]
fn floquet_exponent_examples() {
    assert!((floquet_exponent(0.25, 0.0).unwrap() - 0.5).abs() < 1e-12);
    assert!((floquet_exponent(4.0, 0.0).unwrap() - 2.0).abs() < 1e-12);

    // independent bisection of nu -> char_value(nu, 0.5) - 1.5 on [1, 2]
    let (mut lo, mut hi) = (1.0_f64, 2.0_f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if char_value(mid, 0.5).unwrap() < 1.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let oracle = 0.5 * (lo + hi);
    let r = floquet_exponent(1.5, 0.5).unwrap();
    assert!((r - oracle).abs() < 1e-10, "{r} vs {oracle}");
    assert!((r - FLOQUET_1_5_0_5).abs() < 1e-10);
}

// frozen from the bisection oracle above
const FLOQUET_1_5_0_5: f64 = 1.081_840_448_629_249;

#[test]
fn unstable_region_reports_band_edges() {
    // b_1(1) < 1 < a_1(1): a gap of the stability chart
    let err = floquet_exponent(1.0, 1.0).unwrap_err();
    match err {
        Error::UnstableBand { lower, upper, .. } => {
            assert!((lower.unwrap() - char_value_odd(1.0, 1.0).unwrap()).abs() < 1e-10);
            assert!((upper.unwrap() - char_value(1.0, 1.0).unwrap()).abs() < 1e-10);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        floquet_exponent(-5.0, 1.0),
        Err(Error::UnstableBand { lower: None, .. })
    ));
}

#[test]
fn signed_q_identities() {
    for q in [0.3, 2.0, 7.5] {
        for m in 0..4 {
            let even = 2.0 * m as f64;
            let odd = even + 1.0;
            assert!((char_value(even, -q).unwrap() - char_value(even, q).unwrap()).abs() < 1e-11);
            assert!((char_value(odd, -q).unwrap() - char_value_odd(odd, q).unwrap()).abs() < 1e-11);
        }
        assert!((char_value(0.37, -q).unwrap() - char_value(0.37, q).unwrap()).abs() < 1e-11);
    }
}

#[test]
fn periodic_solutions_satisfy_the_equation() {
    let h = 1e-2;
    for q in [0.5, 4.0, 12.0] {
        for r in 0..4u32 {
            let a = char_value(r as f64, q).unwrap();
            let sol = MathieuSolution::new(r as f64, q, Parity::Even).unwrap();
            for i in 0..20 {
                let z = 0.31 * i as f64;
                let y = |x: f64| sol.value(x);
                let d2 = (-y(z + 2.0 * h) + 16.0 * y(z + h) - 30.0 * y(z) + 16.0 * y(z - h)
                    - y(z - 2.0 * h))
                    / (12.0 * h * h);
                let residual = d2 + (a - 2.0 * q * (2.0 * z).cos()) * y(z);
                assert!(residual.abs() < 1e-5 * (1.0 + a.abs()), "r={r} q={q} z={z}");
            }
        }
    }
}

#[test]
fn floquet_parts_reduce_at_zero_q() {
    for nu in [0.3, 1.7, 2.5] {
        for i in 0..50 {
            let z = 0.13 * i as f64;
            assert!((mathieu_c(nu, 0.0, z).unwrap() - (nu * z).cos()).abs() < 1e-13);
            assert!((mathieu_s(nu, 0.0, z).unwrap() - (nu * z).sin()).abs() < 1e-13);
        }
    }
}

#[test]
fn se_is_odd_and_ce_is_even() {
    for z in [0.2, 1.1, 2.9] {
        let ce = mathieu_ce(3, 2.5, z).unwrap();
        let se = mathieu_se(3, 2.5, z).unwrap();
        assert!((ce - mathieu_ce(3, 2.5, -z).unwrap()).abs() < 1e-14);
        assert!((se + mathieu_se(3, 2.5, -z).unwrap()).abs() < 1e-14);
        assert!((ce + mathieu_ce(3, 2.5, z + PI).unwrap()).abs() < 1e-13);
    }
    assert!(matches!(mathieu_se(0, 1.0, 0.3), Err(Error::InvalidParameter(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interlacing(q in 0.01f64..50.0) {
        let seq = [
            char_value(0.0, q).unwrap(),
            char_value_odd(1.0, q).unwrap(),
            char_value(1.0, q).unwrap(),
            char_value_odd(2.0, q).unwrap(),
            char_value(2.0, q).unwrap(),
            char_value_odd(3.0, q).unwrap(),
            char_value(3.0, q).unwrap(),
        ];
        for w in seq.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn truncation_n_and_n_plus_8_agree(q in 0.0f64..50.0, nu in 0.0f64..10.0) {
        let n = 32usize.max(nu.ceil() as usize + (2.0 * q.sqrt()).ceil() as usize + 16);
        let a = char_value_at_truncation(nu, q, Parity::Even, n).unwrap();
        let b = char_value_at_truncation(nu, q, Parity::Even, n + 8).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn continuity_in_order(q in 0.0f64..20.0, nu in 0.05f64..0.95) {
        let d = 1e-6;
        let lo = char_value(nu - d, q).unwrap();
        let mid = char_value(nu, q).unwrap();
        let hi = char_value(nu + d, q).unwrap();
        prop_assert!((hi - mid).abs() < 1e-3);
        let forward = (hi - mid) / d;
        let centred = (hi - lo) / (2.0 * d);
        prop_assert!((forward - centred).abs() < 1e-4 * centred.abs().max(1.0));
    }

    #[test]
    fn floquet_inverse_relation(q in 0.0f64..10.0, nu in 0.02f64..3.98) {
        prop_assume!((nu - nu.round()).abs() > 0.02);
        let a = char_value(nu, q).unwrap();
        let r = floquet_exponent(a, q).unwrap();
        prop_assert!((char_value(r, q).unwrap() - a).abs() < 1e-9 * a.abs().max(1.0));
    }
}
