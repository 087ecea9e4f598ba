//! The ZX-cat family `(|0ⁿ⟩ + |+ⁿ⟩)/√(2α)`, its two-qubit mutual information,
//! and finite-size witnesses against shallow Clifford-dressed preparations.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, c, CMat};
use crate::rng::{seeded, trial_seed};
use crate::statevec::{self, apply_circuit, reduced_density, DensityMatrix, LayeredCircuit, StateVector, StatevecError};
use crate::symplectic::{apply_clifford, random_clifford, CliffordMap, PauliString, StabilizerState, SymplecticError};

#[derive(Debug, Error)]
pub enum ZxError {
    #[error("n = {0} out of range")]
    OutOfRange(usize),
    #[error("no pair of seeds with disjoint light cones")]
    NoDisjointCones,
    #[error("region of {0} qubits is too large for exhaustive Pauli search")]
    RegionTooLarge(usize),
    #[error(transparent)]
    Statevec(#[from] StatevecError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
}

pub type Result<T> = std::result::Result<T, ZxError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `(|0ⁿ⟩ + |+ⁿ⟩)/√(2α)`
    Plus,
    /// `(|0ⁿ⟩ − |+ⁿ⟩)/√(2β)`
    Minus,
    /// `(|0ⁿ⟩ + i|+ⁿ⟩)/√2`
    IPhase,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plus" => Ok(Variant::Plus),
            "minus" => Ok(Variant::Minus),
            "i-phase" | "iphase" => Ok(Variant::IPhase),
            _ => Err(format!("unknown variant {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZxFamily {
    pub n: usize,
    pub variant: Variant,
}

impl ZxFamily {
    pub fn new(n: usize, variant: Variant) -> Self {
        Self { n, variant }
    }

    pub fn alpha(&self) -> f64 {
        alpha(self.n)
    }

    pub fn beta(&self) -> f64 {
        beta(self.n)
    }

    /// Coefficient of `|+ⁿ⟩` relative to `|0ⁿ⟩`.
    pub fn branch_coefficient(&self) -> Complex64 {
        match self.variant {
            Variant::Plus => c(1.0, 0.0),
            Variant::Minus => c(-1.0, 0.0),
            Variant::IPhase => c(0.0, 1.0),
        }
    }

    /// `1/√(2α)`, `1/√(2β)` or `1/√2`.
    pub fn prefactor(&self) -> f64 {
        let norm2 = match self.variant {
            Variant::Plus => 2.0 * self.alpha(),
            Variant::Minus => 2.0 * self.beta(),
            Variant::IPhase => 2.0,
        };
        1.0 / norm2.sqrt()
    }

    pub fn build(&self) -> Result<StateVector> {
        build(self.n, self.variant)
    }
}

/// `α = 1 + 2^{−n/2}`.
pub fn alpha(n: usize) -> f64 {
    1.0 + 2f64.powf(-(n as f64) / 2.0)
}

/// Normalization of the minus branch, `β = 1 − 2^{−n/2}`, so that
/// `‖|0ⁿ⟩ − |+ⁿ⟩‖² = 2β`.
pub fn beta(n: usize) -> f64 {
    1.0 - 2f64.powf(-(n as f64) / 2.0)
}

pub fn build(n: usize, variant: Variant) -> Result<StateVector> {
    if n == 0 {
        return Err(ZxError::OutOfRange(n));
    }
    statevec::check_n(n).map_err(|_| ZxError::OutOfRange(n))?;
    let fam = ZxFamily::new(n, variant);
    let pre = fam.prefactor();
    let plus_amp = fam.branch_coefficient() * 2f64.powf(-(n as f64) / 2.0);
    let mut amps = vec![plus_amp * pre; 1 << n];
    amps[0] += c(pre, 0.0);
    Ok(StateVector::new(n, amps)?)
}

/// Large-`n` limit of the mutual information between two qubits of the
/// plus state, in bits.
pub fn mi_asymptote() -> f64 {
    let x = 2.0 * 2f64.sqrt() / 3.0;
    0.75 * 3f64.log2() + 1.0 - 2f64.sqrt() * x.atanh() / (2.0 * std::f64::consts::LN_2)
}

/// `I(i : j)` in the plus state.
pub fn mi_pair(n: usize, i: usize, j: usize) -> Result<f64> {
    if n < 2 || i == j || i >= n || j >= n {
        return Err(ZxError::OutOfRange(n));
    }
    let psi = build(n, Variant::Plus)?;
    Ok(statevec::mutual_information(&psi, &[i], &[j])?)
}

pub fn mi_numeric(n: usize) -> Result<f64> {
    mi_pair(n, 0, 1)
}

/// `⟨Z_i⟩` in the plus state, `(1 + 2^{1−n/2}) / (2α)`.
pub fn z_expectation_closed(n: usize) -> f64 {
    (1.0 + 2f64.powf(1.0 - n as f64 / 2.0)) / (2.0 * alpha(n))
}

/// Named diagnostics, each bound reported next to the value it constrains.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct WitnessReport {
    pub check: String,
    pub params: BTreeMap<String, f64>,
    pub observed: BTreeMap<String, f64>,
    pub bounds: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl WitnessReport {
    pub fn new(check: &str) -> Self {
        Self { check: check.to_string(), ..Default::default() }
    }

    pub fn param(mut self, key: &str, v: f64) -> Self {
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn obs(&mut self, key: &str, v: f64) {
        self.observed.insert(key.to_string(), v);
    }

    pub fn bound(&mut self, key: &str, v: f64) {
        self.bounds.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> f64 {
        self.observed.get(key).copied().unwrap_or(f64::NAN)
    }
}

/// Branch pair `φ₁ = C†|0ⁿ⟩`, `φ₂ = C†|+ⁿ⟩` as stabilizer states.
pub fn branch_pair(c_map: &CliffordMap) -> Result<(StabilizerState, StabilizerState)> {
    let n = c_map.num_qubits();
    let inv = c_map.inverse();
    Ok((apply_clifford(&inv, &StabilizerState::zero(n))?, apply_clifford(&inv, &StabilizerState::plus(n))?))
}

/// Lemma-style cross-term check: random Clifford branch pairs and random
/// Hermitian `V` of unit operator norm on `a ≤ max_support` qubits obey
/// `|⟨φ₁|V|φ₂⟩| ≤ 2^a · 2^{−n/2}`.
pub fn crossterm_bound_check(n: usize, seed: u64, trials: usize, max_support: usize) -> Result<WitnessReport> {
    statevec::check_n(n)?;
    let max_support = max_support.clamp(1, n);
    let results: Vec<Result<(f64, f64, f64)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = trial_seed(seed, t as u64);
            let (s1, s2) = branch_pair(&random_clifford(n, s))?;
            let phi1 = statevec::to_statevector(&s1)?;
            let phi2 = statevec::to_statevector(&s2)?;
            let mut rng = seeded(s ^ 0x5eed);
            let a = rng.gen_range(1..=max_support);
            let support = sample(&mut rng, n, a).into_vec();
            let v = linalg::random_hermitian_unit(1 << a, &mut rng);
            let mut w = phi2.clone();
            w.apply_op(&support, &v)?;
            let value = phi1.inner(&w)?.norm();
            let bound = 2f64.powi(a as i32) * 2f64.powf(-(n as f64) / 2.0);
            Ok((value, bound, phi1.overlap(&phi2)?))
        })
        .collect();
    let mut report = WitnessReport::new("zxcat.crossterm").param("n", n as f64).param("trials", trials as f64);
    let mut violations = 0usize;
    let mut max_ratio = 0f64;
    let mut overlap_dev = 0f64;
    let base = 2f64.powf(-(n as f64) / 2.0);
    for r in results {
        let (value, bound, overlap) = r?;
        if value > bound * (1.0 + 1e-12) {
            violations += 1;
        }
        max_ratio = max_ratio.max(value / bound);
        overlap_dev = overlap_dev.max((overlap - base).abs());
    }
    report.obs("violations", violations as f64);
    report.obs("max_ratio", max_ratio);
    report.obs("identity_overlap_deviation", overlap_dev);
    report.bound("max_ratio", 1.0);
    report.pass = violations == 0 && overlap_dev < 1e-10;
    Ok(report)
}

/// All non-identity elements of the subgroup of `group` supported in `region`,
/// enumerated when the subgroup has dimension at most 12 and otherwise
/// restricted to its generators.
fn region_elements(group: &StabilizerState, region: &[usize]) -> (Vec<PauliString>, bool) {
    let gens = group.subgroup_in_region(region);
    if gens.len() > 12 {
        return (gens, false);
    }
    let n = group.num_qubits();
    let mut out = Vec::with_capacity((1 << gens.len()) - 1);
    for mask in 1usize..1 << gens.len() {
        let mut acc = PauliString::identity(n);
        for (k, g) in gens.iter().enumerate() {
            if mask >> k & 1 == 1 {
                acc = acc.mul(g).expect("same size");
            }
        }
        out.push(acc);
    }
    (out, true)
}

fn disjoint(a: &statevec::LightCone, b: &statevec::LightCone) -> bool {
    a.intersection(b).next().is_none()
}

/// Correlation witness against `ψ = C U |0ⁿ⟩`.
///
/// With `φ = C†ψ` and `φ₁ = C†|0ⁿ⟩`, picks stabilizers `g`, `g′` of `φ₁` inside
/// the forward cones of two seeds whose cones have disjoint backward cones,
/// maximizing `⟨g⟩_φ`. A shallow `U` would force `⟨gg′⟩ = ⟨g⟩⟨g′⟩`; the report
/// carries the factorization gap. When no in-cone stabilizer exists the
/// canonical generator `C†Z_iC` is used and flagged in the notes.
pub fn cu_correlation_witness(n: usize, c_map: &CliffordMap, u: &LayeredCircuit) -> Result<WitnessReport> {
    if c_map.num_qubits() != n || u.num_qubits() != n {
        return Err(ZxError::OutOfRange(n));
    }
    let psi = build(n, Variant::Plus)?;
    let inv = c_map.inverse();
    let g1 = apply_clifford(&inv, &StabilizerState::zero(n))?;
    let cone_i = u.forward_cone(&[0]);
    let back_i = u.backward_cone(&cone_i.iter().copied().collect::<Vec<_>>());
    let j = (1..n)
        .find(|&j| {
            let cj: Vec<usize> = u.forward_cone(&[j]).into_iter().collect();
            disjoint(&back_i, &u.backward_cone(&cj))
        })
        .ok_or(ZxError::NoDisjointCones)?;
    let cone_j = u.forward_cone(&[j]);
    // ⟨g⟩_φ = ⟨ψ| C g C† |ψ⟩
    let expect = |g: &PauliString| -> Result<f64> { Ok(psi.pauli_expectation(&c_map.conjugate(g)?)?) };

    let mut report = WitnessReport::new("zxcat.witness_cu").param("n", n as f64).param("depth", u.depth() as f64);
    let mut pick = |seed: usize, cone: &statevec::LightCone, label: &str| -> Result<PauliString> {
        let region: Vec<usize> = cone.iter().copied().collect();
        let (cands, exhaustive) = region_elements(&g1, &region);
        if !exhaustive {
            report.notes.push(format!("{label}: greedy generator search"));
        }
        let mut best: Option<(f64, PauliString)> = None;
        for g in cands {
            let e = expect(&g)?;
            if best.as_ref().is_none_or(|(b, _)| e > *b) {
                best = Some((e, g));
            }
        }
        Ok(match best {
            Some((_, g)) => g,
            None => {
                report.notes.push(format!("{label}: no in-cone stabilizer, using C†Z_{seed}C"));
                inv.conjugate(&PauliString::z_on(n, seed))?
            }
        })
    };
    let g = pick(0, &cone_i, "g")?;
    let gp = pick(j, &cone_j, "g'")?;
    let eg = expect(&g)?;
    let egp = expect(&gp)?;
    let eggp = expect(&g.mul(&gp)?)?;
    let gap = (eggp - eg * egp).abs();
    report.params.insert("j".into(), j as f64);
    report.obs("g", eg);
    report.obs("g_prime", egp);
    report.obs("g_g_prime", eggp);
    report.obs("gap", gap);
    report.obs("g_support", g.weight() as f64);
    report.obs("g_prime_support", gp.weight() as f64);
    report.bound("gap", 0.1);
    report.bound("half_deviation", 2f64.powf(1.0 - n as f64 / 2.0));
    report.pass = gap > 0.1;
    Ok(report)
}

/// Seeds `i < j` whose backward cones have disjoint forward cones, plus those cones.
fn disjoint_seed_pair(u: &LayeredCircuit) -> Option<(usize, usize)> {
    let n = u.num_qubits();
    let lf = |i: usize| {
        let b: Vec<usize> = u.backward_cone(&[i]).into_iter().collect();
        u.forward_cone(&b)
    };
    for i in 0..n {
        let li = lf(i);
        for j in i + 1..n {
            if disjoint(&li, &lf(j)) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Branch reductions `ρ₁,₂` of `U†|0ⁿ⟩`, `U†|+ⁿ⟩` on `B = L_b(i)` and `|L_f(B)|`.
fn uc_branches(u: &LayeredCircuit, i: usize) -> Result<(Vec<usize>, usize, DensityMatrix, DensityMatrix)> {
    let n = u.num_qubits();
    let b: Vec<usize> = u.backward_cone(&[i]).into_iter().collect();
    let lf = u.forward_cone(&b).len();
    let inv = u.inverse();
    let phi1 = apply_circuit(&inv, &StateVector::zero(n)?)?;
    let phi2 = apply_circuit(&inv, &StateVector::plus(n)?)?;
    Ok((b.clone(), lf, reduced_density(&phi1, &b)?, reduced_density(&phi2, &b)?))
}

/// Fidelity witness against `ψ = U C |0ⁿ⟩`: data processing bounds the
/// fidelity of the two branch reductions on `B_i` from below by `2^{−|L_f(B_i)|/2}`.
pub fn uc_sign_witness(n: usize, u: &LayeredCircuit) -> Result<WitnessReport> {
    if u.num_qubits() != n {
        return Err(ZxError::OutOfRange(n));
    }
    let (i, j) = disjoint_seed_pair(u).ok_or(ZxError::NoDisjointCones)?;
    let (b, lf, r1, r2) = uc_branches(u, i)?;
    let f = statevec::fidelity(&r1, &r2)?;
    let bound = 2f64.powf(-(lf as f64) / 2.0);
    let mut report = WitnessReport::new("zxcat.witness_uc")
        .param("n", n as f64)
        .param("depth", u.depth() as f64)
        .param("i", i as f64)
        .param("j", j as f64);
    report.obs("fidelity", f);
    report.obs("b_size", b.len() as f64);
    report.obs("lf_size", lf as f64);
    report.bound("fidelity", bound);
    report.pass = f >= bound * (1.0 - 1e-10);
    Ok(report)
}

fn pauli_on_region(mut code: usize, k: usize) -> CMat {
    let mut m = CMat::identity(1, 1);
    for _ in 0..k {
        let kind = ['I', 'X', 'Y', 'Z'][code & 3];
        code >>= 2;
        // first region qubit is the low index bit: it sits rightmost in the Kronecker product
        m = linalg::kron(&linalg::pauli_matrix(kind), &m);
    }
    m
}

/// Finite-size report of the approximate-case pipeline. For seeds with
/// mutually disjoint `L_f(B_i)`, searches Paulis `P_i` on `B_i` maximizing
/// `a_i + b_i` with `a_i = ⟨(1+P_i)/2⟩_{φ₁}` and `b_i = ⟨(1−P_i)/2⟩_{φ₂}`, and checks
/// `√(a(1−b)) + √(b(1−a)) ≥ F(ρ₁,ρ₂) ≥ 2^{−|L_f(B_i)|/2}` per seed.
pub fn amgm_report(n: usize, u: &LayeredCircuit) -> Result<WitnessReport> {
    let mut seeds: Vec<usize> = Vec::new();
    let mut used = statevec::LightCone::new();
    for i in 0..n {
        let b: Vec<usize> = u.backward_cone(&[i]).into_iter().collect();
        let lf = u.forward_cone(&b);
        if disjoint(&lf, &used) {
            used.extend(lf);
            seeds.push(i);
        }
    }
    let mut report = WitnessReport::new("zxcat.amgm").param("n", n as f64).param("depth", u.depth() as f64);
    let (mut prod_a, mut prod_b, mut sum_ab) = (1.0, 1.0, 0.0);
    let mut pass = true;
    let mut worst_margin = f64::INFINITY;
    for &i in &seeds {
        let (b, lf, r1, r2) = uc_branches(u, i)?;
        if b.len() > 6 {
            return Err(ZxError::RegionTooLarge(b.len()));
        }
        let half = c(0.5, 0.0);
        let id = CMat::identity(1 << b.len(), 1 << b.len());
        let (mut best, mut ab) = (f64::NEG_INFINITY, (0.0, 0.0));
        for code in 1..1usize << (2 * b.len()) {
            let p = pauli_on_region(code, b.len());
            let a = linalg::trace(&(r1.matrix() * (&id + &p) * half)).re;
            let bb = linalg::trace(&(r2.matrix() * (&id - &p) * half)).re;
            if a + bb > best {
                best = a + bb;
                ab = (a, bb);
            }
        }
        let (a, bb) = ab;
        let f = statevec::fidelity(&r1, &r2)?;
        let classical = (a * (1.0 - bb)).max(0.0).sqrt() + (bb * (1.0 - a)).max(0.0).sqrt();
        let floor = 2f64.powf(-(lf as f64) / 2.0);
        pass &= classical >= f - 1e-9 && f >= floor * (1.0 - 1e-10);
        worst_margin = worst_margin.min((1.0 - a) + (1.0 - bb));
        prod_a *= a;
        prod_b *= bb;
        sum_ab += a + bb;
    }
    let m = seeds.len() as f64;
    report.obs("m", m);
    report.obs("prod_a", prod_a);
    report.obs("prod_b", prod_b);
    report.obs("sum_a_plus_b", sum_ab);
    report.obs("min_distance_from_one_one", worst_margin);
    report.bound("sum_a_plus_b", 2.0 * m);
    report.pass = pass && !seeds.is_empty();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_at_four() {
        assert_eq!(alpha(4), 1.25);
        assert_eq!(ZxFamily::new(4, Variant::Plus).alpha(), 1.25);
    }

    #[test]
    fn single_qubit_plus() {
        let v = build(1, Variant::Plus).unwrap();
        let a = v.amplitudes();
        assert!((v.norm() - 1.0).abs() < 1e-15);
        // ∝ |0⟩ + |+⟩ = (1 + 1/√2, 1/√2)
        let ratio = a[0].re / a[1].re;
        assert!((ratio - (1.0 + std::f64::consts::SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn variants_normalized_and_orthogonal() {
        for n in 1..=10 {
            let p = build(n, Variant::Plus).unwrap();
            let m = build(n, Variant::Minus).unwrap();
            let i = build(n, Variant::IPhase).unwrap();
            for v in [&p, &m, &i] {
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
            assert!(p.inner(&m).unwrap().norm() < 1e-12);
        }
        assert!(build(0, Variant::Plus).is_err());
    }

    #[test]
    fn asymptote_value() {
        let v = mi_asymptote();
        assert!(v > 0.0);
        assert!((v - 0.3905).abs() < 1e-4);
        assert_eq!(v, mi_asymptote());
    }

    #[test]
    fn z_expectation_matches_closed_form() {
        for n in 2..=10 {
            let psi = build(n, Variant::Plus).unwrap();
            let e = psi.pauli_expectation(&PauliString::z_on(n, n - 1)).unwrap();
            assert!((e - z_expectation_closed(n)).abs() < 1e-10);
        }
    }

    #[test]
    fn crossterm_identity_clifford() {
        let r = crossterm_bound_check(6, 3, 20, 2).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn cu_witness_at_four() {
        let r = cu_correlation_witness(4, &CliffordMap::identity(4), &LayeredCircuit::new(4)).unwrap();
        assert!((r.get("g") - 0.6).abs() < 1e-12);
        assert!((r.get("g_g_prime") - 0.6).abs() < 1e-12);
        assert!((r.get("gap") - 0.24).abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn uc_witness_identity_circuit() {
        let r = uc_sign_witness(4, &LayeredCircuit::new(4)).unwrap();
        assert!((r.get("fidelity") - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        assert_eq!(r.bounds["fidelity"], 2f64.powf(-0.5));
        assert!(r.pass);
    }

    #[test]
    fn amgm_identity_circuit() {
        let r = amgm_report(4, &LayeredCircuit::new(4)).unwrap();
        assert_eq!(r.get("m"), 4.0);
        // P = Z on each qubit: a = 1, b = 1/2
        assert!((r.get("sum_a_plus_b") - 6.0).abs() < 1e-12);
        assert!(r.pass);
    }
}
