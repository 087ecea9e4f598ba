//! Three ways to prepare ZX-cat states: the FDU∘Clifford∘FDU sandwich, the
//! constant-depth adaptive protocol with a GHZ ancilla, and the bond-dimension-2
//! MPS with Bell-measurement fusion.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::max_n;
use crate::linalg::{self, c, CMat, ONE, ZERO};
use crate::rng::seeded;
use crate::statevec::{self, ch_gate, cx_gate, h_gate, StateVector, StatevecError};
use crate::symplectic::{PauliString, SymplecticError};
use crate::zxcat::{self, Variant, ZxError};

#[derive(Debug, Error)]
pub enum PrepError {
    #[error("n = {0} out of range")]
    OutOfRange(usize),
    #[error("outcome record has {0} entries, expected {1}")]
    OutcomeLength(usize, usize),
    #[error(transparent)]
    Statevec(#[from] StatevecError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Zx(#[from] ZxError),
}

pub type Result<T> = std::result::Result<T, PrepError>;

const R2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `e^{−iπ/8 Y}`, a rotation by `π/4` about the y axis.
pub fn u_gate() -> CMat {
    let (cs, sn) = ((std::f64::consts::PI / 8.0).cos(), (std::f64::consts::PI / 8.0).sin());
    CMat::from_row_slice(2, 2, &[c(cs, 0.0), c(-sn, 0.0), c(sn, 0.0), c(cs, 0.0)])
}

/// `U Z U†`, which equals the Hadamard.
pub fn u_conjugated_z() -> CMat {
    let u = u_gate();
    &u * linalg::pauli_matrix('Z') * u.adjoint()
}

/// Diagonal entry of `C = e^{iπ/4 Z^{⊗n}} = (1 + iZ^{⊗n})/√2` on basis state `b`.
fn global_clifford_entry(b: usize) -> Complex64 {
    let sign = if b.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    c(R2, sign * R2)
}

fn apply_global_clifford(v: &StateVector) -> Result<StateVector> {
    let amps = v.amplitudes().iter().enumerate().map(|(b, a)| a * global_clifford_entry(b)).collect();
    Ok(StateVector::new(v.num_qubits(), amps)?)
}

/// `U^{⊗n} C U†^{⊗n} |0ⁿ⟩`.
pub fn prepare_sandwich(n: usize) -> Result<StateVector> {
    if n == 0 {
        return Err(PrepError::OutOfRange(n));
    }
    let u = u_gate();
    let ud = u.adjoint();
    let mut v = StateVector::zero(n)?;
    for q in 0..n {
        v.apply_op(&[q], &ud)?;
    }
    let mut v = apply_global_clifford(&v)?;
    for q in 0..n {
        v.apply_op(&[q], &u)?;
    }
    Ok(v)
}

/// Fidelity of the sandwich output with `(|0ⁿ⟩ + i|+ⁿ⟩)/√2`.
pub fn sandwich_fidelity(n: usize) -> Result<f64> {
    Ok(prepare_sandwich(n)?.overlap(&zxcat::build(n, Variant::IPhase)?)?)
}

/// `C P C†` by the commute/anticommute case split: `P` if `[P, Z^{⊗n}] = 0`,
/// otherwise `i Z^{⊗n} P`.
pub fn global_clifford_image(p: &PauliString) -> Result<PauliString> {
    let zn = PauliString::all_z(p.num_qubits());
    if p.commutes_with(&zn)? {
        Ok(p.clone())
    } else {
        let q = zn.mul(p)?;
        let ph = q.phase();
        Ok(q.with_phase(ph + 1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlobalCliffordCheck {
    pub n: usize,
    pub symbolic_ok: bool,
    /// `None` when `n` is above the dense limit.
    pub dense_ok: Option<bool>,
}

impl GlobalCliffordCheck {
    pub fn pass(&self) -> bool {
        self.symbolic_ok && self.dense_ok.unwrap_or(true)
    }
}

/// Images of every `X_i`, `Z_i` are Hermitian Paulis, and for `n ≤ dense_max` they
/// agree with `C P C†` computed on all basis vectors.
pub fn verify_global_clifford(n: usize, dense_max: usize) -> Result<GlobalCliffordCheck> {
    if n == 0 || n > 64 {
        return Err(PrepError::OutOfRange(n));
    }
    let gens: Vec<PauliString> = (0..n).flat_map(|q| [PauliString::x_on(n, q), PauliString::z_on(n, q)]).collect();
    let images: Vec<PauliString> = gens.iter().map(global_clifford_image).collect::<Result<_>>()?;
    let symbolic_ok = images.iter().all(PauliString::is_hermitian)
        && gens.iter().zip(&images).all(|(p, img)| {
            // commutation with Z^{⊗n} decides whether the image moved
            let moved = p != img;
            moved != p.commutes_with(&PauliString::all_z(n)).unwrap_or(false)
        });
    let dense_ok = if n <= dense_max.min(max_n()) {
        let mut ok = true;
        for (p, img) in gens.iter().zip(&images) {
            for b in 0..1usize << n {
                // C P C† |b⟩ with C diagonal
                let e = StateVector::basis(n, b)?;
                let mut w = e.clone();
                let cd = global_clifford_entry(b).conj();
                let moved = w.apply_pauli(p)?;
                let amps: Vec<Complex64> = moved
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * cd * global_clifford_entry(k))
                    .collect();
                w = StateVector::new(n, amps)?;
                let expected = e.apply_pauli(img)?;
                let diff: f64 =
                    w.amplitudes().iter().zip(expected.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                ok &= diff < 1e-12;
            }
        }
        Some(ok)
    } else {
        None
    };
    Ok(GlobalCliffordCheck { n, symbolic_ok, dense_ok })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveRunRecord {
    pub outcomes: Vec<bool>,
    pub parity: i8,
    /// Renormalized data register.
    pub post_state: StateVector,
    pub accepted: bool,
}

/// Data qubits `0..n`, ancillas `n..2n`: GHZ on the ancillas, `CH(aᵢ → dᵢ)`.
pub fn adaptive_pre_measurement(n: usize) -> Result<StateVector> {
    let mut v = StateVector::zero(2 * n)?;
    v.apply_gate(&h_gate(n))?;
    for a in n..2 * n - 1 {
        v.apply_gate(&cx_gate(a, a + 1))?;
    }
    for d in 0..n {
        v.apply_gate(&ch_gate(n + d, d))?;
    }
    for a in n..2 * n {
        v.apply_gate(&h_gate(a))?;
    }
    Ok(v)
}

fn data_register(v: &StateVector, n: usize, outcome_bits: usize) -> Vec<Complex64> {
    let data: Vec<usize> = (0..n).collect();
    v.slice(&data, outcome_bits)
}

pub fn adaptive_run(n: usize, seed: u64) -> Result<AdaptiveRunRecord> {
    if n == 0 {
        return Err(PrepError::OutOfRange(n));
    }
    let mut v = adaptive_pre_measurement(n)?;
    let mut rng = seeded(seed);
    let mut outcomes = Vec::with_capacity(n);
    for a in n..2 * n {
        let (bit, post) = v.measure(a, &mut rng)?;
        outcomes.push(bit);
        v = post;
    }
    let bits: usize = outcomes.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| 1 << k).sum();
    let post_state = StateVector::normalized(n, data_register(&v, n, bits))?;
    let odd = outcomes.iter().filter(|&&b| b).count() % 2 == 1;
    Ok(AdaptiveRunRecord { outcomes, parity: if odd { -1 } else { 1 }, post_state, accepted: !odd })
}

/// Probability of an even-parity ancilla record, summed over all `2ⁿ` outcomes.
/// Uses the full `2n`-qubit simulation when it fits, otherwise the per-outcome
/// branch amplitudes `⟨s_X|0ⁿ⟩ = 2^{−n/2}`, `⟨s_X|1ⁿ⟩ = (−1)^{|s|} 2^{−n/2}`.
pub fn adaptive_success_probability(n: usize) -> Result<f64> {
    if n == 0 || n > 12 {
        return Err(PrepError::OutOfRange(n));
    }
    if 2 * n <= max_n() {
        let v = adaptive_pre_measurement(n)?;
        let p: f64 = (0..1usize << n)
            .filter(|s| s.count_ones() % 2 == 0)
            .map(|s| data_register(&v, n, s).iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum();
        return Ok(p);
    }
    let zero = StateVector::zero(n)?;
    let plus = StateVector::plus(n)?;
    let scale = 2f64.powf(-(n as f64) / 2.0) * R2;
    let per_outcome: Vec<f64> = (0..1usize << n)
        .into_par_iter()
        .filter(|s| s.count_ones() % 2 == 0)
        .map(|s| {
            let sign = if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            zero.amplitudes()
                .iter()
                .zip(plus.amplitudes())
                .map(|(a, b)| ((a + b * sign) * scale).norm_sqr())
                .sum::<f64>()
        })
        .collect();
    // sequential sum keeps the result independent of the thread schedule
    Ok(per_outcome.iter().sum())
}

/// `(1 + 2^{−n/2}) / 2`.
pub fn adaptive_success_closed(n: usize) -> f64 {
    (1.0 + 2f64.powf(-(n as f64) / 2.0)) / 2.0
}

/// The site tensor `A^a_{ij}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MpsTensor {
    pub a0: CMat,
    pub a1: CMat,
    pub left: CMat,
    pub right: CMat,
}

impl MpsTensor {
    pub fn zx_cat() -> Self {
        Self {
            a0: CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(R2, 0.0)]),
            a1: CMat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, c(R2, 0.0)]),
            left: CMat::from_row_slice(1, 2, &[ONE, ONE]),
            right: CMat::from_row_slice(2, 1, &[ONE, ONE]),
        }
    }

    pub fn matrix(&self, a: usize) -> &CMat {
        if a == 0 {
            &self.a0
        } else {
            &self.a1
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl std::str::FromStr for Boundary {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            _ => Err(format!("unknown boundary {s:?}")),
        }
    }
}

/// Contract the tensor train (qubit `k` carries the `k`-th physical leg) and normalize.
pub fn mps_contract(n: usize, boundary: Boundary) -> Result<StateVector> {
    if n == 0 {
        return Err(PrepError::OutOfRange(n));
    }
    statevec::check_n(n)?;
    let t = MpsTensor::zx_cat();
    let amps = (0..1usize << n)
        .map(|b| {
            let mut prod = CMat::identity(2, 2);
            for k in 0..n {
                prod *= t.matrix(b >> k & 1);
            }
            match boundary {
                Boundary::Open => (&t.left * &prod * &t.right)[(0, 0)],
                Boundary::Periodic => linalg::trace(&prod),
            }
        })
        .collect();
    Ok(StateVector::normalized(n, amps)?)
}

/// `ZA^aZ = A^a` and `Σ_b H_{ab} A^b = X A^a X` for both `a`.
pub fn push_relation_residual() -> f64 {
    let t = MpsTensor::zx_cat();
    let (x, z, h) = (linalg::pauli_matrix('X'), linalg::pauli_matrix('Z'), linalg::hadamard());
    let mut worst = 0f64;
    for a in 0..2 {
        let am = t.matrix(a);
        worst = worst.max((&z * am * &z - am).norm());
        let pushed = t.matrix(0) * h[(a, 0)] + t.matrix(1) * h[(a, 1)];
        worst = worst.max((pushed - &x * am * &x).norm());
    }
    worst
}

pub fn push_relation_check() -> bool {
    push_relation_residual() <= 1e-12
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellRunRecord {
    /// `(z, x)` per bond `k = (R_k, L_{k+1})`, inserting `Z^z X^x` on that bond.
    pub outcomes: Vec<(bool, bool)>,
    /// Sites that received a pushed Hadamard.
    pub flags: Vec<bool>,
    pub accepted: bool,
    /// Physical register after the local Hadamard corrections.
    pub state: StateVector,
    /// Fidelity with the plus ZX-cat state.
    pub fidelity: f64,
}

/// Site `k` occupies qubits `3k` (left virtual), `3k+1` (physical), `3k+2` (right virtual).
fn site_state() -> Result<StateVector> {
    let t = MpsTensor::zx_cat();
    let mut amps = vec![ZERO; 8];
    for i in 0..2 {
        for a in 0..2 {
            for j in 0..2 {
                amps[i | a << 1 | j << 2] = t.matrix(a)[(i, j)];
            }
        }
    }
    Ok(StateVector::normalized(3, amps)?)
}

fn bell_prepared(n: usize) -> Result<StateVector> {
    if n == 0 || 3 * n > max_n() {
        return Err(PrepError::OutOfRange(n));
    }
    let site = site_state()?;
    let mut v = site.clone();
    for _ in 1..n {
        v = v.tensor(&site)?;
    }
    for k in 0..n {
        let (r, l) = (3 * k + 2, 3 * ((k + 1) % n));
        v.apply_gate(&cx_gate(r, l))?;
        v.apply_gate(&h_gate(r))?;
    }
    Ok(v)
}

fn bell_finish(n: usize, v: &StateVector, outcomes: Vec<(bool, bool)>) -> Result<BellRunRecord> {
    let phys: Vec<usize> = (0..n).map(|k| 3 * k + 1).collect();
    let mut rest = 0usize;
    let others: Vec<usize> = (0..3 * n).filter(|q| q % 3 != 1).collect();
    for (k, &(z, x)) in outcomes.iter().enumerate() {
        let (r, l) = (3 * k + 2, 3 * ((k + 1) % n));
        for (q, bit) in [(r, z), (l, x)] {
            if bit {
                rest |= 1 << others.iter().position(|&o| o == q).expect("virtual qubit");
            }
        }
    }
    let mut state = StateVector::normalized(n, v.slice(&phys, rest))?;
    let mut flags = vec![false; n];
    let mut parity = false;
    for (flag, o) in flags.iter_mut().zip(&outcomes) {
        *flag = parity;
        parity ^= o.1;
    }
    for (s, &f) in flags.iter().enumerate() {
        if f {
            state.apply_gate(&h_gate(s))?;
        }
    }
    let xs = outcomes.iter().filter(|o| o.1).count();
    let zs = outcomes.iter().filter(|o| o.0).count();
    let accepted = xs % 2 == 0 && zs % 2 == 0;
    let fidelity = state.overlap(&zxcat::build(n, Variant::Plus)?)?;
    Ok(BellRunRecord { outcomes, flags, accepted, state, fidelity })
}

/// One run of the fusion protocol on a periodic ring of `n` sites (`3n` qubits).
/// Byproducts are pushed rightward to the wrap bond: `Z` passes through a site
/// unchanged, `X` leaves a Hadamard on the site's physical leg. The run is
/// accepted when the residual byproduct at the wrap bond is the identity,
/// i.e. both `Σx` and `Σz` are even.
pub fn bell_protocol_run(n: usize, seed: u64) -> Result<BellRunRecord> {
    let mut v = bell_prepared(n)?;
    let mut rng = seeded(seed);
    let mut outcomes = Vec::with_capacity(n);
    for k in 0..n {
        let (r, l) = (3 * k + 2, 3 * ((k + 1) % n));
        let (z, post) = v.measure(r, &mut rng)?;
        let (x, post) = post.measure(l, &mut rng)?;
        v = post;
        outcomes.push((z, x));
    }
    bell_finish(n, &v, outcomes)
}

/// The run conditioned on a given outcome record; `None` when that record has
/// probability zero.
pub fn bell_postselect(n: usize, outcomes: &[(bool, bool)]) -> Result<Option<BellRunRecord>> {
    if outcomes.len() != n {
        return Err(PrepError::OutcomeLength(outcomes.len(), n));
    }
    let mut v = bell_prepared(n)?;
    for (k, &(z, x)) in outcomes.iter().enumerate() {
        let (r, l) = (3 * k + 2, 3 * ((k + 1) % n));
        for (q, bit) in [(r, z), (l, x)] {
            match v.project(q, bit)? {
                (_, Some(post)) => v = post,
                _ => return Ok(None),
            }
        }
    }
    Ok(Some(bell_finish(n, &v, outcomes.to_vec())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_conjugates_z_to_h() {
        assert!((u_conjugated_z() - linalg::hadamard()).norm() < 1e-12);
    }

    #[test]
    fn sandwich_single_qubit() {
        let v = prepare_sandwich(1).unwrap();
        let target = zxcat::build(1, Variant::IPhase).unwrap();
        assert!((v.overlap(&target).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn global_clifford_cases() {
        let xx: PauliString = "XX".parse().unwrap();
        assert_eq!(global_clifford_image(&xx).unwrap(), xx);
        let x0: PauliString = "XI".parse().unwrap();
        assert_eq!(global_clifford_image(&x0).unwrap(), "-YZ".parse().unwrap());
        assert!(verify_global_clifford(3, 4).unwrap().pass());
    }

    #[test]
    fn adaptive_two_qubits() {
        assert!((adaptive_success_probability(2).unwrap() - 0.75).abs() < 1e-12);
        let psi = zxcat::build(3, Variant::Plus).unwrap();
        for seed in 0..10 {
            let r = adaptive_run(3, seed).unwrap();
            if r.accepted {
                assert!((r.post_state.overlap(&psi).unwrap() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mps_two_sites() {
        let v = mps_contract(2, Boundary::Open).unwrap();
        // ∝ (1,0,0,0) + (½,½,½,½)
        let a = v.amplitudes();
        assert!((a[0].re / a[1].re - 3.0).abs() < 1e-12);
        assert!((a[1] - a[3]).norm() < 1e-15);
    }

    #[test]
    fn push_relations_hold() {
        assert!(push_relation_check());
    }

    #[test]
    fn bell_identity_outcomes_accept() {
        let r = bell_postselect(3, &[(false, false); 3]).unwrap().unwrap();
        assert!(r.accepted);
        assert!((r.fidelity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bell_random_runs() {
        let mut accepted = 0;
        for seed in 0..40 {
            let r = bell_protocol_run(2, seed).unwrap();
            if r.accepted {
                accepted += 1;
                assert!((r.fidelity - 1.0).abs() < 1e-10, "{:?}", r.outcomes);
            }
        }
        assert!(accepted > 0);
    }
}
