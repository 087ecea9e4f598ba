//! Chebyshev approximate ground-state projectors for `G = Σᵢ |1⟩⟨1|ᵢ` and the
//! circuit-depth lower bounds built on them.
//!
//! `P(x) = T_m((n+1−2x)/(n−1)) / T_m((n+1)/(n−1))` is kept with exact rational
//! coefficients. Floating point only enters at evaluation, through the
//! trigonometric and hyperbolic forms of `T_m`.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg;
use crate::rng::{seeded, trial_seed};
use crate::statevec::{self, StatevecError};
use crate::symplectic::PauliString;
use crate::zxcat::{self, Variant, ZxError};

#[derive(Debug, Error)]
pub enum AgspError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("n = {0} exceeds the dense operator limit of 12")]
    TooLarge(usize),
    #[error(transparent)]
    Statevec(#[from] StatevecError),
    #[error(transparent)]
    Zx(#[from] ZxError),
}

pub type Result<T> = std::result::Result<T, AgspError>;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `T_m(x)` in floating point, stable on the whole real line.
pub fn chebyshev(m: u32, x: f64) -> f64 {
    let mf = m as f64;
    if x.abs() <= 1.0 {
        (mf * x.acos()).cos()
    } else if x > 1.0 {
        (mf * x.acosh()).cosh()
    } else {
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * (mf * (-x).acosh()).cosh()
    }
}

/// `T_m(x)` exactly, by the three-term recurrence.
pub fn chebyshev_exact(m: u32, x: &BigRational) -> BigRational {
    let (mut prev, mut cur) = (BigRational::one(), x.clone());
    if m == 0 {
        return prev;
    }
    let two_x = x * rat(2);
    for _ in 1..m {
        let next = &two_x * &cur - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Polynomial product with rational coefficients, lowest degree first.
fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(k).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgspPolynomial {
    pub n: usize,
    pub m: usize,
    /// `a_k`, `k = 0..=m`.
    pub coeffs: Vec<BigRational>,
}

/// The degree-`m` Chebyshev approximation of the ground-state step on `{0, …, n}`.
pub fn build_polynomial(n: usize, m: usize) -> Result<AgspPolynomial> {
    if n < 2 || m == 0 || m >= n {
        return Err(AgspError::InvalidParams(format!("need n ≥ 2 and 1 ≤ m < n, got n = {n}, m = {m}")));
    }
    let (ni, nm1) = (n as i64, n as i64 - 1);
    let y = vec![frac(ni + 1, nm1), frac(-2, nm1)];
    let two_y: Vec<BigRational> = y.iter().map(|c| c * rat(2)).collect();
    let (mut prev, mut cur) = (vec![BigRational::one()], y);
    for _ in 1..m {
        let next = poly_sub(&poly_mul(&two_y, &cur), &prev);
        prev = std::mem::replace(&mut cur, next);
    }
    let norm = cur[0].clone();
    let coeffs = cur.into_iter().map(|c| c / &norm).collect();
    Ok(AgspPolynomial { n, m, coeffs })
}

impl AgspPolynomial {
    /// Exact value from the coefficient expansion.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, a| acc * x + a)
    }

    /// Exact value from the Chebyshev recurrence, independent of the coefficients.
    pub fn eval_recurrence(&self, x: &BigRational) -> BigRational {
        let nm1 = rat(self.n as i64 - 1);
        let arg = (rat(self.n as i64 + 1) - x * rat(2)) / &nm1;
        chebyshev_exact(self.m as u32, &arg) / chebyshev_exact(self.m as u32, &(rat(self.n as i64 + 1) / nm1))
    }

    /// Floating-point value through the cos/cosh forms.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let n = self.n as f64;
        chebyshev(self.m as u32, (n + 1.0 - 2.0 * x) / (n - 1.0)) / chebyshev(self.m as u32, (n + 1.0) / (n - 1.0))
    }

    pub fn signs_alternate(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(k, a)| {
            if k % 2 == 0 {
                a.is_positive()
            } else {
                a.is_negative()
            }
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|a| !a.is_zero()).unwrap_or(0)
    }

    /// `2e^{−2m/√n}`.
    pub fn step_bound(&self) -> f64 {
        2.0 * (-2.0 * self.m as f64 / (self.n as f64).sqrt()).exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupError {
    pub sup: f64,
    pub bound: f64,
    pub argmax: usize,
    pub pass: bool,
}

/// `max_{x ∈ {1..n}} |P(x)|` evaluated exactly through the recurrence.
pub fn step_error_sup_exact(poly: &AgspPolynomial) -> (BigRational, usize) {
    (1..=poly.n)
        .map(|x| (poly.eval_recurrence(&rat(x as i64)).abs(), x))
        .max_by(|a, b| a.0.cmp(&b.0))
        .expect("n ≥ 2")
}

pub fn step_error_sup(poly: &AgspPolynomial) -> SupError {
    let (sup, argmax) = step_error_sup_exact(poly);
    let sup = rational_to_f64(&sup);
    let bound = poly.step_bound();
    SupError { sup, bound, argmax, pass: sup <= bound }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSumIdentity {
    /// `Σ |a_k| nᵏ`.
    pub sum_exact: BigRational,
    /// `|T_m((3n+1)/(n−1)) / T_m((n+1)/(n−1))|` from the scalar recurrence.
    pub ratio_exact: BigRational,
    pub sum: f64,
    /// `|P(−n)|` through the cosh form.
    pub p_minus_n: f64,
}

impl CoeffSumIdentity {
    pub fn exact_equal(&self) -> bool {
        self.sum_exact == self.ratio_exact
    }

    pub fn relative_gap(&self) -> f64 {
        (self.sum - self.p_minus_n).abs() / self.p_minus_n.abs()
    }
}

pub fn coeff_sum_identity(poly: &AgspPolynomial) -> CoeffSumIdentity {
    let n = poly.n as i64;
    let nk = rat(n);
    let mut power = BigRational::one();
    let mut sum_exact = BigRational::zero();
    for a in &poly.coeffs {
        sum_exact += a.abs() * &power;
        power *= &nk;
    }
    let m = poly.m as u32;
    let ratio_exact = (chebyshev_exact(m, &frac(3 * n + 1, n - 1)) / chebyshev_exact(m, &frac(n + 1, n - 1))).abs();
    let nf = n as f64;
    let p_minus_n = (chebyshev(m, (3.0 * nf + 1.0) / (nf - 1.0)) / chebyshev(m, (nf + 1.0) / (nf - 1.0))).abs();
    CoeffSumIdentity { sum: rational_to_f64(&sum_exact), sum_exact, ratio_exact, p_minus_n }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorCheck {
    /// `‖|0ⁿ⟩⟨0ⁿ| − P(G)‖_∞` exactly.
    pub deviation_exact: BigRational,
    pub deviation: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Builds the diagonal of `P(G)` from the coefficient expansion over all `2ⁿ`
/// basis states and takes its distance from the ground-state projector.
pub fn agsp_operator_check(n: usize, m: usize) -> Result<OperatorCheck> {
    if n > 12 {
        return Err(AgspError::TooLarge(n));
    }
    let poly = build_polynomial(n, m)?;
    // One evaluation per distinct eigenvalue; the diagonal is read back per basis state.
    let by_weight: Vec<BigRational> = (0..=n).map(|w| poly.eval_exact(&rat(w as i64))).collect();
    let mut dev = BigRational::zero();
    for b in 0usize..1 << n {
        let w = b.count_ones() as usize;
        let target = if w == 0 { BigRational::one() } else { BigRational::zero() };
        let d = (&by_weight[w] - target).abs();
        if d > dev {
            dev = d;
        }
    }
    let deviation = rational_to_f64(&dev);
    let bound = poly.step_bound();
    Ok(OperatorCheck { deviation_exact: dev, deviation, bound, pass: deviation <= bound })
}

/// Default constant in `m = min{d − 1, c ln(1/ε)}`: with `c = 1/(2 arccosh 5)` the
/// coefficient growth `e^{m arccosh((3n+1)/(n−1))}` stays below `ε^{−1/2}` for `n ≥ 3`.
pub fn default_degree_constant() -> f64 {
    1.0 / (2.0 * 5f64.acosh())
}

pub fn select_degree(d: usize, epsilon: f64, c: Option<f64>) -> usize {
    let c = c.unwrap_or_else(default_degree_constant);
    let by_eps = (c * (1.0 / epsilon).ln()).floor().max(1.0) as usize;
    by_eps.min(d.saturating_sub(1)).max(1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityBound {
    pub n: usize,
    pub d: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// `log₂(d / max{n(δ+ε), 1})`.
    pub bound: f64,
    /// Smallest depth `t` at which `½ + e^{−d/(√n 2^t)} ≥ 1 − δ`, i.e. below which
    /// the projector argument excludes preparation. The constant in the
    /// exponent is set to one; `None` when `δ ≥ ½`.
    pub depth_threshold: Option<u32>,
    pub convention: String,
}

pub fn complexity_bound(n: usize, d: usize, epsilon: f64, delta: f64) -> Result<ComplexityBound> {
    if n == 0 || d == 0 || d > n {
        return Err(AgspError::InvalidParams(format!("need 1 ≤ d ≤ n, got d = {d}, n = {n}")));
    }
    if !(epsilon >= 0.0 && delta >= 0.0) || !epsilon.is_finite() || !delta.is_finite() {
        return Err(AgspError::InvalidParams("epsilon and delta must be finite and nonnegative".into()));
    }
    let denom = (n as f64 * (delta + epsilon)).max(1.0);
    let bound = (d as f64 / denom).log2();
    let depth_threshold = if delta < 0.5 {
        let l = (1.0 / (0.5 - delta)).ln();
        let ratio = d as f64 / ((n as f64).sqrt() * l);
        Some(if ratio <= 1.0 { 0 } else { ratio.log2().ceil() as u32 })
    } else {
        None
    };
    Ok(ComplexityBound {
        n,
        d,
        epsilon,
        delta,
        bound,
        depth_threshold,
        convention: "Θ-constant in e^{−Θ(n^α/2^t)} set to 1".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndistScan {
    pub n: usize,
    pub max_support: usize,
    pub count: usize,
    pub max_diff: f64,
    /// Largest `|⟨V⟩_ψ − ⟨V⟩_ψ′| / 2^{a−n/2}` over the scan.
    pub max_ratio: f64,
}

/// Local indistinguishability of the plus and minus ZX-cat states: every Pauli
/// of weight `1..=max_support` exhaustively, plus `samples` random Hermitian
/// operators of unit norm on random supports of that size range.
pub fn local_indist_scan(n: usize, max_support: usize, samples: usize, seed: u64) -> Result<IndistScan> {
    statevec::check_n(n)?;
    let max_support = max_support.clamp(1, n);
    let plus = zxcat::build(n, Variant::Plus)?;
    let minus = zxcat::build(n, Variant::Minus)?;
    let scale = |a: usize| 2f64.powf(a as f64 - n as f64 / 2.0);

    let mut paulis: Vec<PauliString> = Vec::new();
    for a in 1..=max_support {
        for support in (0..n).combinations(a) {
            for letters in (0..a).map(|_| ['X', 'Y', 'Z']).multi_cartesian_product() {
                let mut p = PauliString::identity(n);
                for (&q, &l) in support.iter().zip(&letters) {
                    let (x, z) = match l {
                        'X' => (true, false),
                        'Y' => (true, true),
                        _ => (false, true),
                    };
                    p.set(q, x, z);
                }
                paulis.push(p);
            }
        }
    }
    let pauli_results: Vec<Result<(f64, f64)>> = paulis
        .par_iter()
        .map(|p| {
            let d = (plus.pauli_expectation(p)? - minus.pauli_expectation(p)?).abs();
            Ok((d, d / scale(p.weight())))
        })
        .collect();
    let random_results: Vec<Result<(f64, f64)>> = (0..samples)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded(trial_seed(seed, t as u64));
            let a = 1 + (t % max_support);
            let support = sample(&mut rng, n, a).into_vec();
            let v = linalg::random_hermitian_unit(1 << a, &mut rng);
            let d = (plus.expectation(&support, &v)? - minus.expectation(&support, &v)?).norm();
            Ok((d, d / scale(a)))
        })
        .collect();
    let mut out = IndistScan { n, max_support, count: 0, max_diff: 0.0, max_ratio: 0.0 };
    for r in pauli_results.into_iter().chain(random_results) {
        let (d, ratio) = r?;
        out.count += 1;
        out.max_diff = out.max_diff.max(d);
        out.max_ratio = out.max_ratio.max(ratio);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    pub sup_error: f64,
    pub bound: f64,
    pub coeff_sum: f64,
    pub p_minus_n: f64,
}

/// One row per valid `(n, m)` pair; pairs with `m ≥ n` are skipped.
pub fn sweep(n_list: &[usize], m_list: &[usize]) -> Result<Vec<SweepRow>> {
    let pairs: Vec<(usize, usize)> =
        n_list.iter().flat_map(|&n| m_list.iter().map(move |&m| (n, m))).filter(|&(n, m)| n >= 2 && m >= 1 && m < n).collect();
    pairs
        .par_iter()
        .map(|&(n, m)| {
            let poly = build_polynomial(n, m)?;
            let sup = step_error_sup(&poly);
            let id = coeff_sum_identity(&poly);
            Ok(SweepRow { n, m, sup_error: sup.sup, bound: sup.bound, coeff_sum: id.sum, p_minus_n: id.p_minus_n })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_values() {
        assert!((chebyshev(3, 2.0) - 26.0).abs() < 1e-12);
        for m in 0..=10 {
            assert!((chebyshev(m, 1.0) - 1.0).abs() < 1e-12);
        }
        assert!((chebyshev(3, -2.0) + 26.0).abs() < 1e-9);
        assert!((chebyshev(4, 0.3) - (8.0 * 0.3f64.powi(4) - 8.0 * 0.09 + 1.0)).abs() < 1e-12);
        assert_eq!(chebyshev_exact(3, &rat(2)), rat(26));
    }

    #[test]
    fn polynomial_basics() {
        for (n, m) in [(16, 4), (64, 8), (5, 4)] {
            let p = build_polynomial(n, m).unwrap();
            assert_eq!(p.eval_exact(&BigRational::zero()), BigRational::one());
            assert!(p.signs_alternate());
            assert_eq!(p.degree(), m);
            let one = rat(1);
            assert_eq!(p.eval_exact(&one), p.eval_recurrence(&one));
            assert!((rational_to_f64(&p.eval_exact(&one)) - p.eval_f64(1.0)).abs() < 1e-12);
        }
        assert!(build_polynomial(4, 4).is_err());
        assert!(build_polynomial(1, 1).is_err());
    }

    #[test]
    fn sup_error_example() {
        let p = build_polynomial(16, 8).unwrap();
        let s = step_error_sup(&p);
        assert!((s.bound - 2.0 * (-4f64).exp()).abs() < 1e-15);
        assert!(s.pass);
    }

    #[test]
    fn degree_one_identity() {
        let p = build_polynomial(10, 1).unwrap();
        let id = coeff_sum_identity(&p);
        assert!(id.exact_equal());
        assert_eq!(id.sum_exact, frac(31, 11));
    }

    #[test]
    fn operator_check_small() {
        let op = agsp_operator_check(9, 6).unwrap();
        assert!(op.pass);
        let poly = build_polynomial(9, 6).unwrap();
        assert_eq!(op.deviation_exact, step_error_sup_exact(&poly).0);
        assert!(agsp_operator_check(13, 2).is_err());
    }

    #[test]
    fn complexity_examples() {
        let b = complexity_bound(64, 64, 0.0, 0.0).unwrap();
        assert_eq!(b.bound, 6.0);
        let half = complexity_bound(64, 32, 0.0, 0.0).unwrap();
        assert_eq!(b.bound - half.bound, 1.0);
        assert!(complexity_bound(8, 9, 0.0, 0.0).is_err());
        assert!(complexity_bound(8, 4, -1.0, 0.0).is_err());
        assert_eq!(complexity_bound(8, 4, 0.0, 0.6).unwrap().depth_threshold, None);
    }

    #[test]
    fn degree_selection() {
        assert_eq!(select_degree(5, 1e-100, None), 4);
        assert!(select_degree(1000, 1e-6, None) >= 1);
    }

    #[test]
    fn indist_identity_and_z() {
        let s = local_indist_scan(6, 1, 0, 0).unwrap();
        assert_eq!(s.count, 18);
        let sq = 2f64.powf(-3.0);
        // ⟨Z⟩ difference is s/(1 − s²) with s = 2^{−n/2}
        assert!(s.max_diff >= sq / (1.0 - sq * sq) - 1e-12);
    }
}
