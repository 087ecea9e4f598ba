mod common;

use common::*;
use magiclab::agsp::{self, AgspPolynomial};
use magiclab::zxcat::{self, Variant};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

/// Chebyshev value from the explicit power-basis formula `T_m(x) = Σ_k c_k x^k`,
/// with `c` generated by the coefficient recurrence of `T_{k+1} = 2xT_k − T_{k−1}`.
fn chebyshev_power_basis(m: usize) -> Vec<BigRational> {
    let mut prev = vec![BigRational::one()];
    let mut cur = vec![BigRational::zero(), BigRational::one()];
    if m == 0 {
        return prev;
    }
    for _ in 1..m {
        let mut next = vec![BigRational::zero(); cur.len() + 1];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += c * BigRational::from_integer(2.into());
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

fn eval(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// `P(x)` evaluated exactly through the power-basis Chebyshev, not the library.
fn p_oracle(n: usize, m: usize, x: &BigRational) -> BigRational {
    let t = chebyshev_power_basis(m);
    let nm1 = q(n as i64 - 1, 1);
    let arg = (q(n as i64 + 1, 1) - x * q(2, 1)) / &nm1;
    eval(&t, &arg) / eval(&t, &(q(n as i64 + 1, 1) / nm1))
}

#[test]
fn chebyshev_small_values() {
    assert!((agsp::chebyshev(3, 2.0) - 26.0).abs() < 1e-12);
    for m in 0..=10 {
        assert!((agsp::chebyshev(m, 1.0) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn chebyshev_float_matches_exact_at_rational_points() {
    for m in 0..=20u32 {
        for (p, d) in [(1, 3), (-2, 5), (7, 4), (-9, 7), (3, 1)] {
            let x = q(p, d);
            let exact = eval(&chebyshev_power_basis(m as usize), &x);
            assert_eq!(agsp::chebyshev_exact(m, &x), exact);
            let f = agsp::chebyshev(m, p as f64 / d as f64);
            let e = exact.to_f64().unwrap();
            assert!((f - e).abs() <= 1e-12 * e.abs().max(1.0), "m={m} x={p}/{d}");
        }
    }
}

#[test]
fn coefficients_match_power_basis_oracle_at_every_weight() {
    for (n, m) in [(16, 4), (16, 15), (64, 8), (30, 7)] {
        let poly = agsp::build_polynomial(n, m).unwrap();
        for x in 0..=n as i64 {
            assert_eq!(poly.eval_exact(&q(x, 1)), p_oracle(n, m, &q(x, 1)));
        }
        assert_eq!(poly.degree(), m);
    }
}

#[test]
fn p_at_zero_is_one() {
    for (n, m) in [(16, 4), (64, 8), (256, 48)] {
        let poly = agsp::build_polynomial(n, m).unwrap();
        assert!(poly.eval_exact(&BigRational::zero()).is_one());
        assert!(poly.coeffs[0].is_one());
    }
}

#[test]
fn evaluation_paths_agree_at_one() {
    for (n, m) in [(16, 4), (64, 8), (64, 20)] {
        let poly = agsp::build_polynomial(n, m).unwrap();
        let exact = poly.eval_exact(&BigRational::one()).to_f64().unwrap();
        assert!((poly.eval_f64(1.0) - exact).abs() < 1e-12);
    }
}

#[test]
fn sup_error_matches_oracle_and_bound() {
    for (n, m) in [(16, 8), (16, 15), (64, 4), (64, 12)] {
        let poly = agsp::build_polynomial(n, m).unwrap();
        let oracle = (1..=n as i64).map(|x| p_oracle(n, m, &q(x, 1)).abs()).max().unwrap();
        let (sup, _) = agsp::step_error_sup_exact(&poly);
        assert_eq!(sup, oracle);
        let s = agsp::step_error_sup(&poly);
        assert!(s.pass && s.sup <= 2.0 * (-2.0 * m as f64 / (n as f64).sqrt()).exp());
    }
    let s = agsp::step_error_sup(&agsp::build_polynomial(16, 8).unwrap());
    assert!(s.bound - 2.0 * (-4f64).exp() < 1e-15 && s.sup <= 0.0367);
}

#[test]
fn sup_error_decreases_in_m() {
    let sups: Vec<f64> = [4, 8, 12, 16].iter().map(|&m| agsp::step_error_sup(&agsp::build_polynomial(64, m).unwrap()).sup).collect();
    assert!(sups.windows(2).all(|w| w[1] < w[0]), "{sups:?}");
}

#[test]
fn coefficient_sum_identity_exact() {
    for (n, m) in [(16, 4), (16, 1), (64, 10), (40, 39)] {
        let poly: AgspPolynomial = agsp::build_polynomial(n, m).unwrap();
        let id = agsp::coeff_sum_identity(&poly);
        let oracle = p_oracle(n, m, &q(-(n as i64), 1)).abs();
        assert_eq!(id.sum_exact, oracle);
        assert!(id.exact_equal());
        assert!(id.relative_gap() < 1e-9);
    }
    let n = 16i64;
    let id = agsp::coeff_sum_identity(&agsp::build_polynomial(16, 1).unwrap());
    assert_eq!(id.sum_exact, q(3 * n + 1, n + 1));
}

#[test]
fn coefficient_sum_grows_exponentially_in_m() {
    // T_m(y) = cosh(m arccosh y) for y ≥ 1 and the denominator is at least 1.
    let n = 64;
    let rate = ((3.0 * n as f64 + 1.0) / (n as f64 - 1.0)).acosh();
    for m in 1..=20 {
        let v = agsp::coeff_sum_identity(&agsp::build_polynomial(n, m).unwrap()).p_minus_n;
        assert!(v.ln() <= rate * m as f64 + 1e-9, "m={m}");
    }
}

#[test]
fn signs_alternate() {
    for n in [16, 33, 64] {
        for m in 1..n.min(24) {
            let poly = agsp::build_polynomial(n, m).unwrap();
            assert!(poly.signs_alternate());
            for (k, a) in poly.coeffs.iter().enumerate() {
                assert_eq!(a.is_negative(), k % 2 == 1);
            }
        }
    }
}

#[test]
fn operator_check_matches_dense_diagonal() {
    let n = 9;
    for m in 1..n {
        let op = agsp::agsp_operator_check(n, m).unwrap();
        let mut dev = 0f64;
        for b in 0usize..1 << n {
            let w = b.count_ones() as usize;
            let p = p_oracle(n, m, &q(w as i64, 1)).to_f64().unwrap();
            dev = dev.max((p - if w == 0 { 1.0 } else { 0.0 }).abs());
        }
        assert!((op.deviation - dev).abs() < 1e-15);
    }
    let op = agsp::agsp_operator_check(9, 6).unwrap();
    assert!(op.pass && op.deviation <= 2.0 * (-4f64).exp());
}

#[test]
fn complexity_bound_examples() {
    let n = 1024;
    let b = agsp::complexity_bound(n, n, 0.0, 0.0).unwrap();
    assert!((b.bound - (n as f64).log2()).abs() < 1e-12);
    let small = agsp::complexity_bound(n, 100, 1e-5, 1e-5).unwrap();
    let double = agsp::complexity_bound(n, 200, 1e-5, 1e-5).unwrap();
    assert!((double.bound - small.bound - 1.0).abs() < 1e-12);
    assert!(agsp::complexity_bound(10, 11, 0.0, 0.0).is_err());
    assert!(b.convention.contains("set to 1"));
}

#[test]
fn complexity_bound_zx_instantiation_grows_like_log_n() {
    let bounds: Vec<f64> = [48usize, 96, 192, 384, 768]
        .iter()
        .map(|&n| agsp::complexity_bound(n, n / 3, (-(n as f64) / 6.0).exp(), 0.0).unwrap().bound)
        .collect();
    for w in bounds.windows(2) {
        assert!((w[1] - w[0] - 1.0).abs() < 1e-9);
    }
}

#[test]
fn local_indist_single_z_closed_form() {
    let n = 10;
    let plus = from_lib(&zxcat::build(n, Variant::Plus).unwrap());
    let minus = from_lib(&zxcat::build(n, Variant::Minus).unwrap());
    let z0 = embed1(n, 0, &single('Z'));
    let diff = (inner(&plus, &(&z0 * &plus)) - inner(&minus, &(&z0 * &minus))).re.abs();
    // ⟨Z⟩ on (|0ⁿ⟩ ± |+ⁿ⟩)/‖·‖ is (1 ± 2^{1−n/2})/(2(1 ± 2^{−n/2})).
    let s = 2f64.powf(-(n as f64) / 2.0);
    let closed = ((1.0 + 2.0 * s) / (2.0 * (1.0 + s)) - (1.0 - 2.0 * s) / (2.0 * (1.0 - s))).abs();
    assert!((diff - closed).abs() < 1e-12);
    let scan = agsp::local_indist_scan(n, 1, 0, 1).unwrap();
    assert!(scan.max_diff >= diff - 1e-12);
}

#[test]
fn local_indist_ratio_bounded_at_twelve() {
    let scan = agsp::local_indist_scan(12, 3, 50, 2).unwrap();
    assert!(scan.max_ratio <= 8.0);
}
