//! Dense statevector and density-matrix engine.
//!
//! Qubit `0` is the least significant bit of the amplitude index. Multi-qubit
//! operators act on an ordered qubit list whose first entry is the low bit of
//! the operator's own index.

use std::collections::BTreeSet;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{max_n, MAX_DENSITY_QUBITS};
use crate::f2::{self, BitRow};
use crate::linalg::{self, c, CMat, ONE, ZERO};
use crate::symplectic::{PauliString, StabilizerState};

#[derive(Debug, Error)]
pub enum StatevecError {
    #[error("{n} qubits exceeds the dense limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("qubit {0} out of range for {1} qubits")]
    QubitOutOfRange(usize, usize),
    #[error("gate on qubits {0:?} is not unitary")]
    NonUnitary(Vec<usize>),
    #[error("gates within a layer overlap on qubit {0}")]
    OverlappingGates(usize),
    #[error("operator is not Hermitian")]
    NonHermitian,
    #[error("subsets overlap")]
    OverlappingSubsets,
    #[error("subset of {0} qubits exceeds the density-matrix limit of {MAX_DENSITY_QUBITS}")]
    SubsetTooLarge(usize),
    #[error("stabilizer tableau has no consistent basis vector")]
    InconsistentTableau,
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("density matrices on different subsets or shapes")]
    ShapeMismatch,
    #[error("matrix is not positive semidefinite (eigenvalue {0})")]
    NotPsd(f64),
    #[error("snapshot: {0}")]
    Snapshot(String),
}

pub type Result<T> = std::result::Result<T, StatevecError>;

pub fn check_n(n: usize) -> Result<()> {
    let max = max_n();
    if n > max {
        return Err(StatevecError::TooManyQubits { n, max });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that must already have unit norm (within `1e-12`).
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let v = Self::raw(n, amps)?;
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(StatevecError::NotNormalized(norm));
        }
        Ok(v)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let mut v = Self::raw(n, amps)?;
        v.renormalize()?;
        Ok(v)
    }

    fn raw(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_n(n)?;
        if amps.len() != 1 << n {
            return Err(StatevecError::SizeMismatch(amps.len(), 1 << n));
        }
        Ok(Self { n, amps })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_n(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(Self { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn plus(n: usize) -> Result<Self> {
        check_n(n)?;
        let a = c((0.5f64).powf(n as f64 / 2.0), 0.0);
        Ok(Self { n, amps: vec![a; 1 << n] })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn renormalize(&mut self) -> Result<f64> {
        let norm = self.norm();
        if norm < 1e-300 {
            return Err(StatevecError::ZeroNorm);
        }
        let inv = 1.0 / norm;
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(norm)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(StatevecError::SizeMismatch(self.n, other.n));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|`, the fidelity of two pure states.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// `self ⊗ other`, with `self` on the low qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        check_n(self.n + other.n)?;
        let mut amps = Vec::with_capacity(1 << (self.n + other.n));
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { n: self.n + other.n, amps })
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for (k, &q) in qubits.iter().enumerate() {
            if q >= self.n {
                return Err(StatevecError::QubitOutOfRange(q, self.n));
            }
            if qubits[..k].contains(&q) {
                return Err(StatevecError::OverlappingSubsets);
            }
        }
        Ok(())
    }

    /// Apply a `2^k × 2^k` operator to the ordered qubits (not necessarily unitary).
    pub fn apply_op(&mut self, qubits: &[usize], op: &CMat) -> Result<()> {
        self.check_qubits(qubits)?;
        let k = qubits.len();
        let d = 1usize << k;
        if op.nrows() != d || op.ncols() != d {
            return Err(StatevecError::SizeMismatch(op.nrows(), d));
        }
        let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
        let offsets: Vec<usize> = (0..d)
            .map(|j| qubits.iter().enumerate().filter(|(b, _)| j >> b & 1 == 1).map(|(_, &q)| 1 << q).sum())
            .collect();
        let mut local = vec![ZERO; d];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for j in 0..d {
                local[j] = self.amps[base | offsets[j]];
            }
            for i in 0..d {
                let mut acc = ZERO;
                for j in 0..d {
                    acc += op[(i, j)] * local[j];
                }
                self.amps[base | offsets[i]] = acc;
            }
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        self.apply_op(&gate.qubits, &gate.matrix)
    }

    /// `P|ψ⟩` including the phase of `P`.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<StateVector> {
        if p.num_qubits() != self.n {
            return Err(StatevecError::SizeMismatch(p.num_qubits(), self.n));
        }
        let (x, z, k) = p.masks();
        let ph = [ONE, c(0.0, 1.0), -ONE, c(0.0, -1.0)][k as usize];
        let mut amps = vec![ZERO; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let sign = if (z & b as u64).count_ones() % 2 == 1 { -ph } else { ph };
            amps[b ^ x as usize] = sign * a;
        }
        Ok(StateVector { n: self.n, amps })
    }

    /// `⟨ψ|P|ψ⟩` for Hermitian `P`.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        if !p.is_hermitian() {
            return Err(StatevecError::NonHermitian);
        }
        Ok(self.inner(&self.apply_pauli(p)?)?.re)
    }

    /// `⟨ψ|M|ψ⟩` for an operator on the ordered qubits.
    pub fn expectation(&self, qubits: &[usize], op: &CMat) -> Result<Complex64> {
        let mut w = self.clone();
        w.apply_op(qubits, op)?;
        self.inner(&w)
    }

    /// Probability of reading `bit` on qubit `q` and the collapsed state, or
    /// `None` for the state when the probability is below `1e-300`.
    pub fn project(&self, q: usize, bit: bool) -> Result<(f64, Option<StateVector>)> {
        self.check_qubits(&[q])?;
        let mut amps = self.amps.clone();
        for (b, a) in amps.iter_mut().enumerate() {
            if ((b >> q) & 1 == 1) != bit {
                *a = ZERO;
            }
        }
        let mut v = StateVector { n: self.n, amps };
        let prob = v.norm().powi(2);
        if prob < 1e-300 {
            return Ok((prob, None));
        }
        v.renormalize()?;
        Ok((prob, Some(v)))
    }

    /// Sample a computational-basis measurement of qubit `q` and collapse.
    pub fn measure<R: Rng + ?Sized>(&self, q: usize, rng: &mut R) -> Result<(bool, StateVector)> {
        let (p0, s0) = self.project(q, false)?;
        let u: f64 = rng.gen();
        if u < p0 {
            if let Some(s) = s0 {
                return Ok((false, s));
            }
        }
        match self.project(q, true)? {
            (_, Some(s)) => Ok((true, s)),
            _ => Ok((false, s0.ok_or(StatevecError::ZeroNorm)?)),
        }
    }

    /// Amplitudes restricted to the given qubits after fixing all others, as a
    /// `2^|keep|`-vector for every assignment `rest` of the remaining qubits
    /// (values read from the low bits of `rest` in ascending qubit order).
    pub fn slice(&self, keep: &[usize], rest: usize) -> Vec<Complex64> {
        let others: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let base: usize = others.iter().enumerate().filter(|(k, _)| rest >> k & 1 == 1).map(|(_, &q)| 1 << q).sum();
        (0..1usize << keep.len())
            .map(|j| {
                let idx: usize = keep.iter().enumerate().filter(|(b, _)| j >> b & 1 == 1).map(|(_, &q)| 1 << q).sum();
                self.amps[base | idx]
            })
            .collect()
    }

    /// Reorder qubits: new qubit `k` is old qubit `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<StateVector> {
        if order.len() != self.n {
            return Err(StatevecError::SizeMismatch(order.len(), self.n));
        }
        self.check_qubits(order)?;
        let mut amps = vec![ZERO; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let nb: usize = order.iter().enumerate().filter(|(_, &q)| b >> q & 1 == 1).map(|(k, _)| 1 << k).sum();
            amps[nb] = *a;
        }
        Ok(StateVector { n: self.n, amps })
    }

    /// Column vector view for dense linear algebra.
    pub fn to_cvec(&self) -> linalg::CVec {
        linalg::CVec::from_vec(self.amps.clone())
    }

    pub fn to_snapshot(&self) -> Snapshot {
        Snapshot { n: self.n, amplitudes: self.amps.iter().flat_map(|a| [a.re, a.im]).collect() }
    }

    pub fn from_snapshot(s: &Snapshot) -> Result<StateVector> {
        if s.amplitudes.len() != 2 << s.n {
            return Err(StatevecError::Snapshot(format!(
                "expected {} numbers, found {}",
                2 << s.n,
                s.amplitudes.len()
            )));
        }
        StateVector::new(s.n, s.amplitudes.chunks(2).map(|p| c(p[0], p[1])).collect())
    }

    pub fn write_snapshot(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(&self.to_snapshot()).map_err(|e| StatevecError::Snapshot(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| StatevecError::Snapshot(e.to_string()))
    }
}

/// On-disk form: `n` and amplitudes as `[re₀, im₀, re₁, im₁, …]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub n: usize,
    pub amplitudes: Vec<f64>,
}

/// The stabilizer state as a dense vector, fixed up to global phase.
pub fn to_statevector(s: &StabilizerState) -> Result<StateVector> {
    let n = s.num_qubits();
    check_n(n)?;
    // Z-type elements of the group pin the support: (−1)^{z·b} = sign.
    let mut rows: Vec<BitRow> = Vec::new();
    for g in s.canonical() {
        if (0..n).any(|q| g.x_bit(q)) {
            continue;
        }
        let mut row = BitRow::zeros(n + 1);
        for q in 0..n {
            row.set(q, g.z_bit(q));
        }
        row.set(n, g.sign() < 0);
        rows.push(row);
    }
    let r = f2::echelon(&mut rows, Some(n));
    if rows[r..].iter().any(|row| row.get(n)) {
        return Err(StatevecError::InconsistentTableau);
    }
    let mut seed = 0usize;
    for row in &rows[..r] {
        let pivot = (0..n).find(|&q| row.get(q)).expect("pivot row");
        if row.get(n) {
            seed |= 1 << pivot;
        }
    }
    let mut v = StateVector::basis(n, seed)?;
    for g in s.generators() {
        let gv = v.apply_pauli(g)?;
        for (a, b) in v.amps.iter_mut().zip(&gv.amps) {
            *a = (*a + b) * 0.5;
        }
    }
    v.renormalize().map_err(|_| StatevecError::InconsistentTableau)?;
    Ok(v)
}

/// A gate on one or two qubits (any small arity is accepted).
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub qubits: Vec<usize>,
    pub matrix: CMat,
}

impl Gate {
    pub fn new(qubits: Vec<usize>, matrix: CMat) -> Result<Self> {
        let d = 1usize << qubits.len();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(StatevecError::SizeMismatch(matrix.nrows(), d));
        }
        if !linalg::is_unitary(&matrix, 1e-12) {
            return Err(StatevecError::NonUnitary(qubits));
        }
        Ok(Self { qubits, matrix })
    }

    pub fn single(q: usize, matrix: CMat) -> Result<Self> {
        Self::new(vec![q], matrix)
    }

    pub fn pair(a: usize, b: usize, matrix: CMat) -> Result<Self> {
        Self::new(vec![a, b], matrix)
    }

    pub fn inverse(&self) -> Gate {
        Gate { qubits: self.qubits.clone(), matrix: self.matrix.adjoint() }
    }
}

pub type LightCone = BTreeSet<usize>;

/// A depth-`t` circuit: each layer holds gates with disjoint supports.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LayeredCircuit {
    n: usize,
    layers: Vec<Vec<Gate>>,
}

impl LayeredCircuit {
    pub fn new(n: usize) -> Self {
        Self { n, layers: Vec::new() }
    }

    pub fn from_layers(n: usize, layers: Vec<Vec<Gate>>) -> Result<Self> {
        let mut c = Self::new(n);
        for layer in layers {
            c.push_layer(layer)?;
        }
        Ok(c)
    }

    pub fn push_layer(&mut self, layer: Vec<Gate>) -> Result<()> {
        let mut used = vec![false; self.n];
        for g in &layer {
            for &q in &g.qubits {
                if q >= self.n {
                    return Err(StatevecError::QubitOutOfRange(q, self.n));
                }
                if used[q] {
                    return Err(StatevecError::OverlappingGates(q));
                }
                used[q] = true;
            }
        }
        self.layers.push(layer);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    /// First `t` layers.
    pub fn truncated(&self, t: usize) -> LayeredCircuit {
        LayeredCircuit { n: self.n, layers: self.layers[..t.min(self.layers.len())].to_vec() }
    }

    /// `U†`: reversed layers of adjoint gates.
    pub fn inverse(&self) -> LayeredCircuit {
        LayeredCircuit {
            n: self.n,
            layers: self.layers.iter().rev().map(|l| l.iter().map(Gate::inverse).collect()).collect(),
        }
    }

    /// Random circuit of `depth` layers; each layer pairs qubits by a random
    /// matching (all-to-all) and applies Haar two-qubit gates, leftovers get
    /// Haar single-qubit gates.
    pub fn random<R: Rng + ?Sized>(n: usize, depth: usize, rng: &mut R) -> LayeredCircuit {
        use rand::seq::SliceRandom;
        let mut c = LayeredCircuit::new(n);
        for _ in 0..depth {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut layer = Vec::new();
            for chunk in order.chunks(2) {
                let u = linalg::haar_unitary(1 << chunk.len(), rng);
                layer.push(Gate { qubits: chunk.to_vec(), matrix: u });
            }
            c.layers.push(layer);
        }
        c
    }

    /// Brick-wall circuit on a line with Haar two-qubit gates.
    pub fn random_brickwork<R: Rng + ?Sized>(n: usize, depth: usize, rng: &mut R) -> LayeredCircuit {
        let mut c = LayeredCircuit::new(n);
        for t in 0..depth {
            let layer = (t % 2..n.saturating_sub(1))
                .step_by(2)
                .map(|a| Gate { qubits: vec![a, a + 1], matrix: linalg::haar_unitary(4, rng) })
                .collect();
            c.layers.push(layer);
        }
        c
    }

    fn cone<'a>(&self, seed: &[usize], layers: impl Iterator<Item = &'a Vec<Gate>>) -> LightCone {
        let mut cone: LightCone = seed.iter().copied().collect();
        for layer in layers {
            for g in layer {
                if g.qubits.iter().any(|q| cone.contains(q)) {
                    cone.extend(g.qubits.iter().copied());
                }
            }
        }
        cone
    }

    /// Qubits influenced by `qubits` after running the circuit.
    pub fn forward_cone(&self, qubits: &[usize]) -> LightCone {
        self.cone(qubits, self.layers.iter())
    }

    /// Qubits that can influence `qubits` at the output.
    pub fn backward_cone(&self, qubits: &[usize]) -> LightCone {
        self.cone(qubits, self.layers.iter().rev())
    }
}

pub fn forward_cone(c: &LayeredCircuit, qubits: &[usize]) -> LightCone {
    c.forward_cone(qubits)
}

pub fn backward_cone(c: &LayeredCircuit, qubits: &[usize]) -> LightCone {
    c.backward_cone(qubits)
}

pub fn apply_circuit(c: &LayeredCircuit, v: &StateVector) -> Result<StateVector> {
    if c.n != v.n {
        return Err(StatevecError::SizeMismatch(c.n, v.n));
    }
    let mut out = v.clone();
    for layer in &c.layers {
        for g in layer {
            if !linalg::is_unitary(&g.matrix, 1e-12) {
                return Err(StatevecError::NonUnitary(g.qubits.clone()));
            }
            out.apply_gate(g)?;
        }
    }
    Ok(out)
}

/// Reduced state on an ordered qubit subset (first entry is the low index bit).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    subset: Vec<usize>,
    matrix: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(subset: Vec<usize>, matrix: CMat) -> Result<Self> {
        let d = 1usize << subset.len();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(StatevecError::ShapeMismatch);
        }
        if !linalg::is_hermitian(&matrix, 1e-12 * d as f64) {
            return Err(StatevecError::NonHermitian);
        }
        let tr = linalg::trace(&matrix);
        if (tr - ONE).norm() > 1e-10 {
            return Err(StatevecError::NotNormalized(tr.re));
        }
        let min = linalg::herm_eig(&matrix).0.first().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(StatevecError::NotPsd(min));
        }
        Ok(Self { subset, matrix })
    }

    pub fn pure(v: &StateVector) -> DensityMatrix {
        let col = v.to_cvec();
        DensityMatrix { subset: (0..v.n).collect(), matrix: &col * col.adjoint() }
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::herm_eig(&self.matrix).0
    }

    pub fn entropy(&self) -> f64 {
        linalg::entropy_bits(&self.eigenvalues())
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

pub fn reduced_density(v: &StateVector, subset: &[usize]) -> Result<DensityMatrix> {
    if subset.len() > MAX_DENSITY_QUBITS {
        return Err(StatevecError::SubsetTooLarge(subset.len()));
    }
    v.check_qubits(subset)?;
    let k = subset.len();
    let others = v.n - k;
    let mut m = CMat::zeros(1 << k, 1 << others);
    for r in 0..1usize << others {
        for (a, amp) in v.slice(subset, r).into_iter().enumerate() {
            m[(a, r)] = amp;
        }
    }
    Ok(DensityMatrix { subset: subset.to_vec(), matrix: &m * m.adjoint() })
}

/// Entropy in bits of the reduced state on `subset`.
pub fn entropy(v: &StateVector, subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Ok(0.0);
    }
    Ok(reduced_density(v, subset)?.entropy())
}

/// `S(A) + S(B) − S(AB)` in bits.
pub fn mutual_information(v: &StateVector, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.iter().any(|q| b.contains(q)) {
        return Err(StatevecError::OverlappingSubsets);
    }
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    if ab.len() > MAX_DENSITY_QUBITS {
        return Err(StatevecError::SubsetTooLarge(ab.len()));
    }
    Ok(entropy(v, a)? + entropy(v, b)? - entropy(v, &ab)?)
}

/// Uhlmann fidelity `Tr √(√ρ₁ ρ₂ √ρ₁) = ‖√ρ₁ √ρ₂‖₁`, clamped to `[0, 1]`.
pub fn fidelity(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    if r1.subset != r2.subset || r1.matrix.shape() != r2.matrix.shape() {
        return Err(StatevecError::ShapeMismatch);
    }
    for r in [r1, r2] {
        let min = r.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(StatevecError::NotPsd(min));
        }
    }
    let f = linalg::nuclear_norm(&(linalg::psd_sqrt(&r1.matrix) * linalg::psd_sqrt(&r2.matrix)));
    Ok(f.clamp(0.0, 1.0))
}

/// Single-qubit Hadamard gate.
pub fn h_gate(q: usize) -> Gate {
    Gate { qubits: vec![q], matrix: linalg::hadamard() }
}

/// CNOT with the given control and target.
pub fn cx_gate(control: usize, target: usize) -> Gate {
    Gate { qubits: vec![control, target], matrix: linalg::controlled(&linalg::pauli_matrix('X')) }
}

/// Controlled-Hadamard, control value 1.
pub fn ch_gate(control: usize, target: usize) -> Gate {
    Gate { qubits: vec![control, target], matrix: linalg::controlled(&linalg::hadamard()) }
}
