mod common;

use common::*;
use magiclab::rng::seeded;
use magiclab::statevec::LayeredCircuit;
use magiclab::symplectic::CliffordMap;
use magiclab::zxcat::{self, Variant};

/// `(|0ⁿ⟩ + c|+ⁿ⟩)` normalized by brute force.
fn defining_vector(n: usize, coeff: num_complex::Complex64) -> V {
    let v = basis(n, 0) + plus(n) * coeff;
    let nrm = v.norm();
    v / cx(nrm, 0.0)
}

#[test]
fn states_match_definition() {
    for n in 1..=10 {
        for (variant, coeff) in [(Variant::Plus, cx(1.0, 0.0)), (Variant::Minus, cx(-1.0, 0.0)), (Variant::IPhase, cx(0.0, 1.0))] {
            let lib = from_lib(&zxcat::build(n, variant).unwrap());
            let oracle = defining_vector(n, coeff);
            assert!((lib - oracle).norm() < 1e-12, "n={n} {variant:?}");
        }
    }
}

#[test]
fn plus_and_minus_are_orthogonal() {
    for n in 1..=12 {
        let a = zxcat::build(n, Variant::Plus).unwrap();
        let b = zxcat::build(n, Variant::Minus).unwrap();
        assert!(a.inner(&b).unwrap().norm() < 1e-12);
    }
}

#[test]
fn normalizations() {
    for n in 1..=12 {
        let raw = (basis(n, 0) + plus(n)).norm_squared();
        assert!((raw - 2.0 * zxcat::alpha(n)).abs() < 1e-12);
        let raw = (basis(n, 0) - plus(n)).norm_squared();
        assert!((raw - 2.0 * zxcat::beta(n)).abs() < 1e-12);
    }
}

#[test]
fn z_expectation_closed_form() {
    for n in 2..=10 {
        let v = defining_vector(n, cx(1.0, 0.0));
        let rho = reduce(n, v.as_slice(), &[0]);
        let z = (rho[(0, 0)] - rho[(1, 1)]).re;
        assert!((z - zxcat::z_expectation_closed(n)).abs() < 1e-10);
        let expected = (1.0 + 2f64.powf(1.0 - n as f64 / 2.0)) / (2.0 * zxcat::alpha(n));
        assert!((z - expected).abs() < 1e-10);
    }
}

#[test]
fn mutual_information_matches_partial_trace_oracle() {
    for n in 2..=10 {
        let v = defining_vector(n, cx(1.0, 0.0));
        let oracle = mutual_info(n, v.as_slice(), &[0], &[1]);
        assert!((zxcat::mi_numeric(n).unwrap() - oracle).abs() < 1e-9);
        assert!(oracle > 0.0);
    }
}

#[test]
fn mutual_information_asymptote() {
    // Limit state on two qubits: (|00⟩⟨00| + |++⟩⟨++|)/2 on AB, with marginals (|0⟩⟨0| + |+⟩⟨+|)/2.
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zero = basis(1, 0);
    let p = V::from_column_slice(&[cx(h, 0.0), cx(h, 0.0)]);
    let rho_a = (&zero * zero.adjoint() + &p * p.adjoint()) * cx(0.5, 0.0);
    let z2 = basis(2, 0);
    let p2 = plus(2);
    let rho_ab = (&z2 * z2.adjoint() + &p2 * p2.adjoint()) * cx(0.5, 0.0);
    let limit = 2.0 * entropy(&rho_a) - entropy(&rho_ab);
    assert!((zxcat::mi_asymptote() - limit).abs() < 1e-12);
    assert!((limit - 0.3905).abs() < 1e-4);
    assert!((zxcat::mi_numeric(12).unwrap() - limit).abs() < 0.02);
}

#[test]
fn mutual_information_converges_monotonically() {
    let target = zxcat::mi_asymptote();
    let gaps: Vec<f64> = [4, 6, 8, 10, 12].iter().map(|&n| (zxcat::mi_numeric(n).unwrap() - target).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn mutual_information_pair_symmetry() {
    let n = 8;
    let a = zxcat::mi_pair(n, 0, 1).unwrap();
    let b = zxcat::mi_pair(n, 2, 5).unwrap();
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn crossterm_identity_overlap_is_exact() {
    for n in [4, 6, 8, 10] {
        let r = zxcat::crossterm_bound_check(n, 1, 20, 4).unwrap();
        assert!(r.pass);
        assert!(r.get("identity_overlap_deviation") < 1e-12);
    }
}

#[test]
fn crossterm_single_qubit_z() {
    let n = 8;
    let z0 = embed1(n, 0, &single('Z'));
    let v = inner(&basis(n, 0), &(z0 * plus(n))).norm();
    assert!((v - 2f64.powf(-(n as f64) / 2.0)).abs() < 1e-15);
    assert!(v <= 2.0 * 2f64.powf(-(n as f64) / 2.0));
}

#[test]
fn cu_witness_small_identity_case() {
    let n = 4;
    let w = zxcat::cu_correlation_witness(n, &CliffordMap::identity(n), &LayeredCircuit::new(n)).unwrap();
    let v = defining_vector(n, cx(1.0, 0.0));
    let z0 = (reduce(n, v.as_slice(), &[0])[(0, 0)] - reduce(n, v.as_slice(), &[0])[(1, 1)]).re;
    let r01 = reduce(n, v.as_slice(), &[0, 1]);
    let zz = (r01[(0, 0)] - r01[(1, 1)] - r01[(2, 2)] + r01[(3, 3)]).re;
    assert!((w.get("g") - z0).abs() < 1e-12);
    assert!((w.get("g_g_prime") - zz).abs() < 1e-12);
    assert!((w.get("g") - 0.6).abs() < 1e-12);
    assert!((w.get("g_g_prime") - 0.6).abs() < 1e-12);
    assert!((w.get("gap") - 0.24).abs() < 1e-12);
}

#[test]
fn uc_identity_is_equality_case() {
    for n in [4, 6, 10] {
        let w = zxcat::uc_sign_witness(n, &LayeredCircuit::new(n)).unwrap();
        assert!((w.get("fidelity") - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        assert!(w.pass);
    }
}

#[test]
fn uc_fidelity_matches_dense_oracle() {
    let n = 6;
    for seed in 0..5 {
        let mut rng = seeded(seed);
        let u = LayeredCircuit::random(n, 1, &mut rng);
        let w = zxcat::uc_sign_witness(n, &u).unwrap();
        let i = w.params["i"] as usize;
        let b: Vec<usize> = u.backward_cone(&[i]).into_iter().collect();
        let ud = circuit_unitary(&u).adjoint();
        let (p1, p2) = (&ud * basis(n, 0), &ud * plus(n));
        let f = fidelity(&reduce(n, p1.as_slice(), &b), &reduce(n, p2.as_slice(), &b));
        assert!((w.get("fidelity") - f).abs() < 1e-9, "seed {seed}: lib {} oracle {f} b {b:?} {w:?}", w.get("fidelity"));
        assert!(f >= 2f64.powf(-0.5 * w.get("lf_size")) - 1e-12);
    }
}

#[test]
fn dpi_bound_value_for_cone_of_four() {
    assert_eq!(2f64.powf(-0.5 * 4.0), 0.25);
}
