use magiclab::agsp;
use magiclab::modular::GoldenNumber;
use magiclab::rng::seeded;
use magiclab::statevec::StateVector;
use magiclab::suite::{CheckReport, Relation};
use magiclab::symplectic::{self, PauliString, StabilizerState};
use num_complex::Complex64;
use proptest::prelude::*;

fn pauli(n: usize, seed: u64, phase: u8) -> PauliString {
    PauliString::random(n, &mut seeded(seed)).with_phase(phase)
}

fn golden() -> impl Strategy<Value = GoldenNumber> {
    (-50i64..50, -50i64..50).prop_map(|(a, b)| GoldenNumber::from_ints(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pauli_product_is_associative(n in 1usize..12, s in any::<[u64; 3]>(), ph in 0u8..4) {
        let (a, b, c) = (pauli(n, s[0], ph), pauli(n, s[1], 0), pauli(n, s[2], 3));
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn commutation_matches_product_order(n in 1usize..12, s in any::<[u64; 2]>()) {
        let (a, b) = (pauli(n, s[0], 0), pauli(n, s[1], 0));
        let (ab, ba) = (a.mul(&b).unwrap(), b.mul(&a).unwrap());
        let commute = a.commutes_with(&b).unwrap();
        prop_assert_eq!(commute, b.commutes_with(&a).unwrap());
        if commute {
            prop_assert_eq!(ab, ba);
        } else {
            prop_assert_eq!(ab, ba.negate());
        }
    }

    #[test]
    fn pauli_squares_to_identity_when_hermitian(n in 1usize..12, s in any::<u64>()) {
        let a = pauli(n, s, 0);
        let sq = a.mul(&a).unwrap();
        prop_assert!(sq.is_identity_up_to_phase());
        prop_assert_eq!(sq.phase(), 0);
    }

    #[test]
    fn pauli_text_round_trip(n in 1usize..16, s in any::<u64>(), ph in 0u8..4) {
        let a = pauli(n, s, ph);
        prop_assert_eq!(a.to_string().parse::<PauliString>().unwrap(), a);
    }

    #[test]
    fn overlap_is_symmetric_and_dyadic(n in 1usize..10, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (StabilizerState::random(n, s1), StabilizerState::random(n, s2));
        let ab = symplectic::stabilizer_overlap(&a, &b).unwrap();
        prop_assert!((ab - symplectic::stabilizer_overlap(&b, &a).unwrap()).abs() < 1e-15);
        match symplectic::overlap_exponent(&a, &b).unwrap() {
            None => prop_assert_eq!(ab, 0.0),
            Some(k) => {
                prop_assert!(k <= n);
                prop_assert!((ab - 2f64.powf((k as f64 - n as f64) / 2.0)).abs() < 1e-15);
            }
        }
        prop_assert!((symplectic::stabilizer_overlap(&a, &a).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clifford_conjugation_is_a_homomorphism(n in 1usize..8, seed in any::<u64>(), s in any::<[u64; 2]>()) {
        let c = symplectic::random_clifford(n, seed);
        let (a, b) = (pauli(n, s[0], 0), pauli(n, s[1], 0));
        let lhs = c.conjugate(&a.mul(&b).unwrap()).unwrap();
        let rhs = c.conjugate(&a).unwrap().mul(&c.conjugate(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(c.inverse().conjugate(&c.conjugate(&a).unwrap()).unwrap(), a);
    }

    #[test]
    fn golden_field_axioms(x in golden(), y in golden(), z in golden()) {
        prop_assert_eq!((x.clone() + y.clone()) * z.clone(), x.clone() * z.clone() + y.clone() * z.clone());
        prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
        prop_assert_eq!((x.clone() * y.clone()) * z.clone(), x.clone() * (y.clone() * z.clone()));
        prop_assert_eq!((x.clone() * y.clone()).norm(), x.norm() * y.norm());
        if !x.is_zero() {
            prop_assert_eq!(x.clone() * x.inv().unwrap(), GoldenNumber::one());
        } else {
            prop_assert!(x.inv().is_err());
        }
    }

    #[test]
    fn chebyshev_bounded_on_unit_interval(m in 0u32..60, theta in 0.0f64..std::f64::consts::PI) {
        let v = agsp::chebyshev(m, theta.cos());
        prop_assert!(v.abs() <= 1.0 + 1e-12);
        prop_assert!((v - (m as f64 * theta).cos()).abs() < 1e-9);
    }

    #[test]
    fn agsp_polynomial_fixes_the_origin(n in 2usize..80, m in 1usize..40) {
        prop_assume!(m < n);
        let poly = agsp::build_polynomial(n, m).unwrap();
        prop_assert!(num_traits::One::is_one(&poly.coeffs[0]));
        prop_assert!(poly.signs_alternate());
    }

    #[test]
    fn snapshot_round_trip(n in 1usize..6, re in prop::collection::vec(-1.0f64..1.0, 64), im in prop::collection::vec(-1.0f64..1.0, 64)) {
        let amps: Vec<Complex64> = (0..1usize << n).map(|i| Complex64::new(re[i], im[i] + 1e-3)).collect();
        let v = StateVector::normalized(n, amps).unwrap();
        let text = serde_json::to_string(&v.to_snapshot()).unwrap();
        let back = StateVector::from_snapshot(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn report_pass_is_derived_from_bound(obs in -10.0f64..10.0, bound in -10.0f64..10.0, r in 0usize..4) {
        let rel = [Relation::Le, Relation::Lt, Relation::Ge, Relation::Gt][r];
        let rep = CheckReport::compare("x", obs, rel, bound);
        prop_assert_eq!(rep.derived_pass(), Some(rep.pass));
        let back: CheckReport = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
        prop_assert_eq!(back, rep);
    }
}
