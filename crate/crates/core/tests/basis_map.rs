use num_complex::Complex64;
use proptest::prelude::*;
use qspectra::andreev::{Channel, JunctionParams};
use qspectra::basis_map::{
    build_transform, closed_form_transform, conjugated_pauli_x, mat_vec, transport_pauli_x,
    verify_bijection, AndreevBasisPair,
};
use qspectra::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_pair(rng: &mut ChaCha8Rng) -> AndreevBasisPair {
    let amps = (c(rng), c(rng), c(rng), c(rng));
    let q = (c(rng), c(rng));
    AndreevBasisPair::from_amplitudes(amps, q, rng.random_range(0.0..2.0))
}

fn well_conditioned(pair: &AndreevBasisPair) -> bool {
    let n0 = (pair.state0[0].norm_sqr() + pair.state0[1].norm_sqr()).sqrt();
    let n1 = (pair.state1[0].norm_sqr() + pair.state1[1].norm_sqr()).sqrt();
    let det = pair.state0[0] * pair.state1[1] - pair.state0[1] * pair.state1[0];
    det.norm() > 1e-3 * n0 * n1
}

#[test]
fn closed_form_matches_inverse_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 10_000 {
        let pair = random_pair(&mut rng);
        if !well_conditioned(&pair) {
            continue;
        }
        // skip draws where a closed-form denominator nearly cancels
        let Some(closed) = closed_form_transform(&pair) else { continue };
        let t = build_transform(&pair).unwrap();
        let scale = t.matrix.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
        let ok = (0..2).all(|i| (0..2).all(|j| (closed[i][j] - t.matrix[i][j]).norm() <= 1e-10 * scale));
        if closed.iter().flatten().all(|x| x.norm() < 1e6 * scale) {
            assert!(ok, "{pair:?}");
            checked += 1;
        }
    }
}

#[test]
fn random_pairs_are_bijective_and_transport() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..2000 {
        let pair = random_pair(&mut rng);
        if !well_conditioned(&pair) {
            continue;
        }
        let t = build_transform(&pair).unwrap();
        assert!(verify_bijection(&t));
        let x = conjugated_pauli_x(&t);
        let once = transport_pauli_x(&t, &pair).unwrap();
        let twice = mat_vec(&x, &once);
        for k in 0..2 {
            assert!((twice[k] - pair.state0[k]).norm() < 1e-10 * pair.state0[k].norm().max(1e-3));
        }
    }
}

#[test]
fn singular_example_never_builds() {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let pair = AndreevBasisPair::from_amplitudes((one, one, one, one), (zero, zero), 0.0);
    let err = build_transform(&pair).unwrap_err();
    assert!(matches!(err, Error::Singular { .. }));
}

#[test]
fn bound_state_pair_from_the_junction() {
    let p = JunctionParams::default();
    let ch = Channel::new(1, 3, &p).unwrap();
    let pair = AndreevBasisPair::from_junction(1.0, &ch, &p, 0, None).unwrap();
    assert_eq!(pair.z, 1.0);
    match build_transform(&pair) {
        Ok(t) => {
            let out = transport_pauli_x(&t, &pair).unwrap();
            assert!((out[0] - pair.state1[0]).norm() < 1e-9 * pair.state1[0].norm().max(1e-12));
        }
        Err(Error::Singular { .. }) => {}
        Err(e) => panic!("{e}"),
    }
    assert!(AndreevBasisPair::from_junction(1.0, &ch, &p, 99, None).is_err());
}

proptest! {
    #[test]
    fn phase_covariance(seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let s = Complex64::new(re, im);
        prop_assume!(s.norm() > 1e-2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_pair(&mut rng);
        prop_assume!(well_conditioned(&pair));
        let t = build_transform(&pair).unwrap();
        let scaled = pair.scaled(s);
        let ts = build_transform(&scaled).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((ts.matrix[i][j] * s - t.matrix[i][j]).norm() <= 1e-12 * t.matrix[i][j].norm().max(1.0));
            }
        }
        prop_assert!(transport_pauli_x(&ts, &scaled).is_ok());
    }

    #[test]
    fn transform_maps_states_to_computational_basis(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_pair(&mut rng);
        prop_assume!(well_conditioned(&pair));
        let t = build_transform(&pair).unwrap();
        let e0 = mat_vec(&t.matrix, &pair.state0);
        let e1 = mat_vec(&t.matrix, &pair.state1);
        prop_assert!((e0[0] - 1.0).norm() < 1e-12 && e0[1].norm() < 1e-12);
        prop_assert!(e1[0].norm() < 1e-12 && (e1[1] - 1.0).norm() < 1e-12);
    }
}
