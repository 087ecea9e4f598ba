mod common;

use common::*;
use itertools::Itertools;
use magiclab::modular::{self, GoldenNumber, MonomialCandidate};
use magiclab::rng::seeded;

#[test]
fn exact_data_matches_float_fibonacci_product() {
    let d = modular::double_fibonacci();
    assert!((d.s_matrix() - doubled(&fib_s())).norm() < 1e-12);
    assert!((d.t_matrix() - doubled(&fib_t())).norm() < 1e-12);
}

#[test]
fn modular_relations_on_the_oracle() {
    let (s, t) = (doubled(&fib_s()), doubled(&fib_t()));
    let s2 = &s * &s;
    assert!((&s2 - M::identity(4, 4)).norm() < 1e-12);
    let st = &s * &t;
    assert!((&st * &st * &st - &s2).norm() < 1e-12);
    assert!((&s * s.adjoint() - M::identity(4, 4)).norm() < 1e-12);
}

#[test]
fn quantum_dimensions_from_first_row() {
    let d = modular::double_fibonacci();
    let s = d.s_matrix();
    for j in 0..4 {
        assert!((s[(0, j)].re / s[(0, 0)].re - d.dims[j].to_f64()).abs() < 1e-12);
    }
    assert_eq!(modular::dim_preserving_perms(&d.dims), vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]);
}

#[test]
fn verlinde_matches_float_sum() {
    let d = modular::double_fibonacci();
    let dims = [1.0, PHI, PHI, PHI * PHI];
    let total: f64 = dims.iter().map(|x| x * x).sum();
    for (g, expect) in [(1u32, 4i64), (2, 25), (3, 225)] {
        let float: f64 = dims.iter().map(|x| (total / (x * x)).powi(g as i32 - 1)).sum();
        let exact = modular::verlinde_dim(&d.dims, g).unwrap();
        assert_eq!(exact, GoldenNumber::from_ints(expect, 0));
        assert!((float - expect as f64).abs() < 1e-9 * expect as f64);
    }
}

#[test]
fn golden_field_matches_floats() {
    let mut rng = seeded(21);
    for _ in 0..100 {
        let a = GoldenNumber::from_ints(rand::Rng::gen_range(&mut rng, -9..10), rand::Rng::gen_range(&mut rng, -9..10));
        let b = GoldenNumber::from_ints(rand::Rng::gen_range(&mut rng, -9..10), rand::Rng::gen_range(&mut rng, -9..10));
        let (x, y) = (a.to_f64(), b.to_f64());
        assert!(((a.clone() * b.clone()).to_f64() - x * y).abs() < 1e-9);
        assert!(((a.clone() + b.clone()).to_f64() - (x + y)).abs() < 1e-12);
        if !b.is_zero() {
            assert!((a.div(&b).unwrap().to_f64() - x / y).abs() < 1e-9 * (x / y).abs().max(1.0));
        }
        assert_eq!(a.is_positive(), x > 0.0);
    }
}

#[test]
fn monomial_distance_matches_brute_force() {
    let mut rng = seeded(22);
    for k in 1..=5 {
        for _ in 0..40 {
            let m = M::from_fn(k, k, |_, _| {
                cx(rand::Rng::gen_range(&mut rng, -1.0..1.0), rand::Rng::gen_range(&mut rng, -1.0..1.0))
            });
            let (dist, _) = modular::monomial_distance(&m, 1e-9).unwrap();
            assert!((dist - brute_monomial_distance(&m)).abs() < 1e-12, "k={k}");
        }
    }
}

#[test]
fn monomial_distance_recovers_candidate() {
    let cand = MonomialCandidate { perm: vec![2, 0, 1], z: vec![cx(0.0, 1.0), cx(-1.0, 0.0), cx(1.0, 0.0)] };
    let (dist, found) = modular::monomial_distance(&cand.matrix(), 1e-12).unwrap();
    assert_eq!(dist, 0.0);
    let found = found.unwrap();
    assert_eq!(found.perm, cand.perm);
    assert!((found.matrix() - cand.matrix()).norm() < 1e-12);
}

#[test]
fn search_survivor_is_identity_and_conjugations_agree() {
    let d = modular::double_fibonacci();
    let r = modular::lpu_search(&d, 1e-9).unwrap();
    assert_eq!(r.unresolved, 0);
    assert_eq!(r.survivors.len(), 1);
    assert!(r.survivors[0].is_identity(1e-12));
    let (s, t) = (doubled(&fib_s()), doubled(&fib_t()));
    let st = &s * &t;
    for case in &r.cases {
        let l = MonomialCandidate { perm: case.perm.clone(), z: case.z.iter().map(|&x| cx(x, 0.0)).collect() }.matrix();
        assert!((brute_monomial_distance(&(&s * &l * s.adjoint())) - case.s_distance).abs() < 1e-10);
        assert!((brute_monomial_distance(&(&st * &l * st.adjoint())) - case.st_distance).abs() < 1e-10);
    }
}

#[test]
fn swap_case_commutes_with_s_but_not_st() {
    let (s, t) = (doubled(&fib_s()), doubled(&fib_t()));
    let l = MonomialCandidate { perm: vec![0, 2, 1, 3], z: vec![cx(1.0, 0.0); 4] }.matrix();
    assert!((&s * &l * s.adjoint() - &l).norm() < 1e-12);
    let st = &s * &t;
    let d = brute_monomial_distance(&(&st * &l * st.adjoint()));
    assert!(d > 0.1, "{d}");
}

#[test]
fn swap_offdiag_scan_is_bounded_away_from_zero() {
    // With π = (τ τ̄) and random phases, some off-diagonal entry stays large.
    let d = modular::double_fibonacci();
    let s = doubled(&fib_s());
    let mut rng = seeded(23);
    let mut min_max = f64::INFINITY;
    for _ in 0..500 {
        let mut z = vec![cx(1.0, 0.0)];
        z.extend((1..4).map(|_| num_complex::Complex64::from_polar(1.0, rand::Rng::gen_range(&mut rng, 0.0..std::f64::consts::TAU))));
        let l = MonomialCandidate { perm: vec![0, 2, 1, 3], z }.matrix();
        let m = &s * l * s.adjoint();
        let off = (0..4).cartesian_product(0..4).filter(|(i, j)| i != j).map(|(i, j)| m[(i, j)].norm()).fold(0.0, f64::max);
        min_max = min_max.min(off);
    }
    assert!(min_max > 0.0);
    assert!(modular::offdiag_modulus_scan(&d, &[0, 2, 1, 3], 500, 23) > 0.1);
}

#[test]
fn rigidity_witnesses_are_real() {
    let n = 3;
    let scalar = M::identity(9, 9) * cx(0.0, 1.0);
    assert!(modular::scalar_rigidity_trial(n, &scalar, 300, 31, 1e-9).unwrap().is_none());
    let mut rng = seeded(32);
    for trial in 0..20 {
        let k = modular::random_nonscalar_monomial(9, &mut rng);
        assert!(brute_monomial_distance(&k) < 1e-12);
        let (_, u) = modular::scalar_rigidity_trial(n, &k, 1000, 40 + trial, 1e-9).unwrap().expect("witness");
        assert!((&u * u.adjoint() - M::identity(3, 3)).norm() < 1e-10);
        let w = kron(&u, &u.map(|z| z.conj()));
        assert!(brute_monomial_distance(&(&w * &k * w.adjoint())) > 1e-9);
    }
}

#[test]
fn json_rejects_nonunitary_data() {
    let mut d = modular::double_fibonacci();
    d.s[0][0] = GoldenNumber::from_ints(2, 0);
    assert!(modular::ModularData::from_json(&d.to_json().unwrap()).is_err());
}
