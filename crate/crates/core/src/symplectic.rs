//! Pauli strings, stabilizer states and Clifford maps over the binary symplectic
//! space F₂²ⁿ.
//!
//! A [`PauliString`] stores its X and Z parts as packed 64-bit words together with
//! a power of `i`. A qubit whose X and Z bits are both set denotes the Hermitian
//! `Y`, so a string is Hermitian exactly when its phase is `0` or `2`.
//!
//! Stabilizer overlaps are computed without touching amplitudes: for two states
//! whose stabilizer groups correspond to subspaces `S₁, S₂ ⊆ F₂²ⁿ`, the overlap
//! vanishes iff some element of `S₁ ∩ S₂` carries opposite signs in the two
//! groups, and otherwise `|⟨η₁|η₂⟩|² = 2^(dim(S₁∩S₂) − n)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::f2::{self, word_count, BitRow};
use crate::rng::seeded;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymplecticError {
    #[error("size mismatch: {0} vs {1} qubits")]
    SizeMismatch(usize, usize),
    #[error("invalid tableau: {0}")]
    InvalidTableau(String),
    #[error("invalid Clifford map: {0}")]
    InvalidClifford(String),
    #[error("cannot parse Pauli string {0:?}")]
    Parse(String),
    #[error("qubit {0} out of range for {1} qubits")]
    QubitOutOfRange(usize, usize),
}

pub type Result<T> = std::result::Result<T, SymplecticError>;

/// `i^phase · ⊗ⱼ σⱼ` with `σⱼ ∈ {I, X, Y, Z}` encoded by `(x_j, z_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { n, x: vec![0; word_count(n)], z: vec![0; word_count(n)], phase: 0 }
    }

    /// A single-qubit Pauli (`'I'`, `'X'`, `'Y'` or `'Z'`) on qubit `q`.
    pub fn single(n: usize, q: usize, kind: char) -> Result<Self> {
        if q >= n {
            return Err(SymplecticError::QubitOutOfRange(q, n));
        }
        let mut p = Self::identity(n);
        let (x, z) = match kind {
            'I' => (false, false),
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            _ => return Err(SymplecticError::Parse(kind.to_string())),
        };
        p.set(q, x, z);
        Ok(p)
    }

    pub fn x_on(n: usize, q: usize) -> Self {
        Self::single(n, q, 'X').expect("qubit in range")
    }

    pub fn z_on(n: usize, q: usize) -> Self {
        Self::single(n, q, 'Z').expect("qubit in range")
    }

    /// Z on every qubit.
    pub fn all_z(n: usize) -> Self {
        let mut p = Self::identity(n);
        for q in 0..n {
            p.set(q, false, true);
        }
        p
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut p = Self::identity(n);
        for q in 0..n {
            p.set(q, rng.gen(), rng.gen());
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q >> 6] >> (q & 63)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q >> 6] >> (q & 63)) & 1 == 1
    }

    pub fn set(&mut self, q: usize, x: bool, z: bool) {
        let mask = 1u64 << (q & 63);
        let w = q >> 6;
        if x {
            self.x[w] |= mask;
        } else {
            self.x[w] &= !mask;
        }
        if z {
            self.z[w] |= mask;
        } else {
            self.z[w] &= !mask;
        }
    }

    /// Character of the single-qubit factor on `q`.
    pub fn letter(&self, q: usize) -> char {
        match (self.x_bit(q), self.z_bit(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// True when the operator is `±I` or `±iI`.
    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x_bit(q) || self.z_bit(q)).collect()
    }

    /// Sign of a Hermitian string: `+1` for phase 0, `-1` for phase 2.
    pub fn sign(&self) -> i8 {
        match self.phase {
            0 => 1,
            2 => -1,
            _ => 0,
        }
    }

    pub fn negate(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    /// The symplectic vector `(x | z)` of length `2n`.
    pub fn to_bits(&self) -> BitRow {
        let mut row = BitRow::zeros(2 * self.n);
        for q in 0..self.n {
            row.set(q, self.x_bit(q));
            row.set(self.n + q, self.z_bit(q));
        }
        row
    }

    /// Unsigned string with the given symplectic vector.
    pub fn from_bits(n: usize, bits: &BitRow) -> Self {
        let mut p = Self::identity(n);
        for q in 0..n {
            p.set(q, bits.get(q), bits.get(n + q));
        }
        p
    }

    /// X and Z masks as single words together with the extra phase that converts
    /// the `Y`-convention into `i^k X^x Z^z` form. Only valid for `n ≤ 64`.
    pub fn masks(&self) -> (u64, u64, u8) {
        assert!(self.n <= 64, "mask form requires at most 64 qubits");
        let (x, z) = if self.n == 0 { (0, 0) } else { (self.x[0], self.z[0]) };
        let ys = (x & z).count_ones() as u8;
        (x, z, (self.phase + ys) & 3)
    }

    /// Restriction to a list of qubits, preserving the phase.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut p = PauliString::identity(qubits.len());
        for (k, &q) in qubits.iter().enumerate() {
            p.set(k, self.x_bit(q), self.z_bit(q));
        }
        p.phase = self.phase;
        p
    }

    fn check_size(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(SymplecticError::SizeMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// Exact product `self · other`.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        self.check_size(other)?;
        let mut plus = 0u32;
        let mut minus = 0u32;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i.
            let pos = (x1 & !z1 & x2 & z2) | (x1 & z1 & !x2 & z2) | (!x1 & z1 & x2 & !z2);
            let neg = (x1 & z1 & x2 & !z2) | (!x1 & z1 & x2 & z2) | (x1 & !z1 & !x2 & z2);
            plus += pos.count_ones();
            minus += neg.count_ones();
            x.push(x1 ^ x2);
            z.push(z1 ^ z2);
        }
        let phase = (self.phase as u32 + other.phase as u32 + plus + 3 * minus) & 3;
        Ok(PauliString { n: self.n, x, z, phase: phase as u8 })
    }

    /// Symplectic form `x_p·z_q + z_p·x_q` over F₂ vanishes.
    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        self.check_size(other)?;
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones() & 1;
        }
        Ok(parity == 0)
    }
}

/// `p · q` with exact phase bookkeeping.
pub fn pauli_product(p: &PauliString, q: &PauliString) -> Result<PauliString> {
    p.mul(q)
}

/// Whether `p` and `q` commute.
pub fn commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.commutes_with(q)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = SymplecticError;

    /// Optional sign prefix (`+`, `-`, `i`, `+i`, `-i`) followed by letters from
    /// `{I, X, Y, Z}`; character `k` acts on qubit `k`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let (phase, body) = if let Some(rest) = trimmed.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = trimmed.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = trimmed.strip_prefix('i') {
            (1, rest)
        } else if let Some(rest) = trimmed.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = trimmed.strip_prefix('+') {
            (0, rest)
        } else {
            (0, trimmed)
        };
        if body.is_empty() {
            return Err(SymplecticError::Parse(s.to_string()));
        }
        let n = body.chars().count();
        let mut p = PauliString::identity(n);
        for (q, c) in body.chars().enumerate() {
            let (x, z) = match c {
                'I' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                _ => return Err(SymplecticError::Parse(s.to_string())),
            };
            p.set(q, x, z);
        }
        p.phase = phase;
        Ok(p)
    }
}

/// A pure stabilizer state given by `n` independent commuting signed generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerState {
    n: usize,
    generators: Vec<PauliString>,
    canonical: Vec<PauliString>,
}

impl StabilizerState {
    pub fn new(generators: Vec<PauliString>) -> Result<Self> {
        let n = generators.first().map_or(0, PauliString::num_qubits);
        if generators.len() != n {
            return Err(SymplecticError::InvalidTableau(format!(
                "{} generators for {} qubits",
                generators.len(),
                n
            )));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.num_qubits() != n {
                return Err(SymplecticError::SizeMismatch(g.num_qubits(), n));
            }
            if !g.is_hermitian() {
                return Err(SymplecticError::InvalidTableau(format!("generator {i} ({g}) is not Hermitian")));
            }
            for (j, h) in generators.iter().enumerate().skip(i + 1) {
                if !g.commutes_with(h)? {
                    return Err(SymplecticError::InvalidTableau(format!("generators {i} and {j} anticommute")));
                }
            }
        }
        let canonical = canonical_form(&generators);
        if canonical.len() != n {
            return Err(SymplecticError::InvalidTableau("generators are dependent".into()));
        }
        Ok(Self { n, generators, canonical })
    }

    pub fn from_strs(gens: &[&str]) -> Result<Self> {
        Self::new(gens.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?)
    }

    /// |0ⁿ⟩, stabilized by every Zᵢ.
    pub fn zero(n: usize) -> Self {
        Self::new((0..n).map(|q| PauliString::z_on(n, q)).collect()).expect("valid tableau")
    }

    /// |+ⁿ⟩, stabilized by every Xᵢ.
    pub fn plus(n: usize) -> Self {
        Self::new((0..n).map(|q| PauliString::x_on(n, q)).collect()).expect("valid tableau")
    }

    /// (|0ⁿ⟩ + |1ⁿ⟩)/√2.
    pub fn ghz(n: usize) -> Self {
        let mut gens = Vec::with_capacity(n);
        let mut all_x = PauliString::identity(n);
        for q in 0..n {
            all_x.set(q, true, false);
        }
        gens.push(all_x);
        for q in 0..n.saturating_sub(1) {
            let mut zz = PauliString::identity(n);
            zz.set(q, false, true);
            zz.set(q + 1, false, true);
            gens.push(zz);
        }
        Self::new(gens).expect("valid tableau")
    }

    /// Random stabilizer state: a random Clifford applied to |0ⁿ⟩.
    pub fn random(n: usize, seed: u64) -> Self {
        apply_clifford(&random_clifford(n, seed), &Self::zero(n)).expect("sizes agree")
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn signs(&self) -> Vec<i8> {
        self.generators.iter().map(PauliString::sign).collect()
    }

    /// Reduced echelon generators, X-block columns before Z-block columns.
    pub fn canonical(&self) -> &[PauliString] {
        &self.canonical
    }

    /// Group element `∏ gᵢ^{aᵢ}` selected by the bit row `a`.
    pub fn element(&self, selection: &BitRow) -> PauliString {
        let mut acc = PauliString::identity(self.n);
        for i in selection.ones() {
            acc = acc.mul(&self.generators[i]).expect("same size");
        }
        acc
    }

    /// Whether a Hermitian Pauli lies in the stabilizer group with its sign.
    /// Returns `Some(+1)` / `Some(-1)` when `±p` is a stabilizer, `None` otherwise.
    pub fn membership(&self, p: &PauliString) -> Result<Option<i8>> {
        if p.num_qubits() != self.n {
            return Err(SymplecticError::SizeMismatch(p.num_qubits(), self.n));
        }
        let rows: Vec<BitRow> = self.generators.iter().map(PauliString::to_bits).collect();
        let Some(sel) = f2::solve_combination(&rows, &p.to_bits()) else {
            return Ok(None);
        };
        let elem = self.element(&sel);
        Ok(Some(if elem.phase() == p.phase() { 1 } else { -1 }))
    }

    /// The state `P|η⟩`: generators anticommuting with `P` flip sign.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<Self> {
        if p.num_qubits() != self.n {
            return Err(SymplecticError::SizeMismatch(p.num_qubits(), self.n));
        }
        let mut gens = self.generators.clone();
        for g in gens.iter_mut() {
            if !g.commutes_with(p)? {
                *g = g.clone().negate();
            }
        }
        Self::new(gens)
    }

    /// Generators of the subgroup supported inside `region`.
    pub fn subgroup_in_region(&self, region: &[usize]) -> Vec<PauliString> {
        let inside: Vec<bool> = (0..self.n).map(|q| region.contains(&q)).collect();
        let outside: Vec<usize> = (0..self.n).filter(|&q| !inside[q]).collect();
        let rows: Vec<BitRow> = self
            .generators
            .iter()
            .map(|g| {
                let mut r = BitRow::zeros(2 * outside.len());
                for (k, &q) in outside.iter().enumerate() {
                    r.set(k, g.x_bit(q));
                    r.set(outside.len() + k, g.z_bit(q));
                }
                r
            })
            .collect();
        if outside.is_empty() {
            return self.generators.clone();
        }
        f2::left_kernel(&rows).iter().map(|sel| self.element(sel)).collect()
    }
}

fn canonical_form(generators: &[PauliString]) -> Vec<PauliString> {
    let n = generators.first().map_or(0, PauliString::num_qubits);
    let mut rows = generators.to_vec();
    let mut r = 0;
    for col in 0..2 * n {
        let bit = |p: &PauliString| if col < n { p.x_bit(col) } else { p.z_bit(col - n) };
        let Some(p) = (r..rows.len()).find(|&i| bit(&rows[i])) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && bit(row) {
                *row = row.mul(&pivot).expect("same size");
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    rows
}

/// Dimension of `S₁ ∩ S₂` when the overlap is nonzero, `None` when it vanishes.
pub fn overlap_exponent(s1: &StabilizerState, s2: &StabilizerState) -> Result<Option<usize>> {
    let n = s1.num_qubits();
    if s2.num_qubits() != n {
        return Err(SymplecticError::SizeMismatch(n, s2.num_qubits()));
    }
    let rows: Vec<BitRow> = s1
        .generators()
        .iter()
        .chain(s2.generators())
        .map(PauliString::to_bits)
        .collect();
    let kernel = f2::left_kernel(&rows);
    for sel in &kernel {
        let left = s1.element(&sel.slice(0, n));
        let right = s2.element(&sel.slice(n, 2 * n));
        debug_assert_eq!(left.to_bits(), right.to_bits());
        if left.phase() != right.phase() {
            return Ok(None);
        }
    }
    Ok(Some(kernel.len()))
}

/// `|⟨η₁|η₂⟩|`.
pub fn stabilizer_overlap(s1: &StabilizerState, s2: &StabilizerState) -> Result<f64> {
    let n = s1.num_qubits() as i32;
    Ok(match overlap_exponent(s1, s2)? {
        None => 0.0,
        Some(k) => 2f64.powf((k as i32 - n) as f64 / 2.0),
    })
}

/// `|⟨η₂|P|η₁⟩|`.
pub fn pauli_sandwich(s2: &StabilizerState, p: &PauliString, s1: &StabilizerState) -> Result<f64> {
    stabilizer_overlap(s2, &s1.apply_pauli(p)?)
}

/// Elementary Clifford gates used to generate random Clifford maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Cx(usize, usize),
}

impl CliffordGate {
    /// Conjugate `p` in place: `p ← G p G†`.
    pub fn conjugate(&self, p: &mut PauliString) {
        match *self {
            CliffordGate::H(q) => {
                let (x, z) = (p.x_bit(q), p.z_bit(q));
                if x && z {
                    p.phase = (p.phase + 2) & 3;
                }
                p.set(q, z, x);
            }
            CliffordGate::S(q) => {
                let (x, z) = (p.x_bit(q), p.z_bit(q));
                if x && z {
                    p.phase = (p.phase + 2) & 3;
                }
                p.set(q, x, z ^ x);
            }
            CliffordGate::Cx(c, t) => {
                let (xc, zc, xt, zt) = (p.x_bit(c), p.z_bit(c), p.x_bit(t), p.z_bit(t));
                if xc && zt && !(xt ^ zc) {
                    p.phase = (p.phase + 2) & 3;
                }
                p.set(t, xt ^ xc, zt);
                p.set(c, xc, zc ^ zt);
            }
        }
    }
}

/// A Clifford unitary `C` recorded by the images `C Xᵢ C†` and `C Zᵢ C†`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordMap {
    n: usize,
    x_images: Vec<PauliString>,
    z_images: Vec<PauliString>,
}

impl CliffordMap {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x_images: (0..n).map(|q| PauliString::x_on(n, q)).collect(),
            z_images: (0..n).map(|q| PauliString::z_on(n, q)).collect(),
        }
    }

    pub fn new(x_images: Vec<PauliString>, z_images: Vec<PauliString>) -> Result<Self> {
        let n = x_images.len();
        if z_images.len() != n {
            return Err(SymplecticError::InvalidClifford("image lists differ in length".into()));
        }
        let map = Self { n, x_images, z_images };
        map.validate()?;
        Ok(map)
    }

    /// Circuit order: `gates[0]` acts first.
    pub fn from_gates(n: usize, gates: &[CliffordGate]) -> Self {
        let mut map = Self::identity(n);
        for gate in gates {
            map.then(gate);
        }
        map
    }

    /// Post-compose with one more gate.
    pub fn then(&mut self, gate: &CliffordGate) {
        for p in self.x_images.iter_mut().chain(self.z_images.iter_mut()) {
            gate.conjugate(p);
        }
    }

    /// Hadamard on every qubit.
    pub fn hadamard_all(n: usize) -> Self {
        Self::from_gates(n, &(0..n).map(CliffordGate::H).collect::<Vec<_>>())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, q: usize) -> &PauliString {
        &self.x_images[q]
    }

    pub fn z_image(&self, q: usize) -> &PauliString {
        &self.z_images[q]
    }

    /// Images are Hermitian, of the right size and satisfy the canonical
    /// commutation relations; such a symplectic map is automatically invertible.
    pub fn validate(&self) -> Result<()> {
        for p in self.x_images.iter().chain(&self.z_images) {
            if p.num_qubits() != self.n {
                return Err(SymplecticError::SizeMismatch(p.num_qubits(), self.n));
            }
            if !p.is_hermitian() {
                return Err(SymplecticError::InvalidClifford(format!("image {p} is not Hermitian")));
            }
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let xx = self.x_images[i].commutes_with(&self.x_images[j])?;
                let zz = self.z_images[i].commutes_with(&self.z_images[j])?;
                let xz = self.x_images[i].commutes_with(&self.z_images[j])?;
                if !xx || !zz || xz == (i == j) {
                    return Err(SymplecticError::InvalidClifford(format!(
                        "commutation relations broken at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `C P C†`.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.num_qubits() != self.n {
            return Err(SymplecticError::SizeMismatch(p.num_qubits(), self.n));
        }
        let mut acc = PauliString::identity(self.n).with_phase(p.phase());
        for q in 0..self.n {
            match (p.x_bit(q), p.z_bit(q)) {
                (false, false) => {}
                (true, false) => acc = acc.mul(&self.x_images[q])?,
                (false, true) => acc = acc.mul(&self.z_images[q])?,
                (true, true) => {
                    // Y = i X Z
                    acc = acc.mul(&self.x_images[q])?.mul(&self.z_images[q])?;
                    acc.phase = (acc.phase + 1) & 3;
                }
            }
        }
        Ok(acc)
    }

    /// `C₂ ∘ C₁`: first `self`, then `other`.
    pub fn then_map(&self, other: &CliffordMap) -> Result<CliffordMap> {
        if other.n != self.n {
            return Err(SymplecticError::SizeMismatch(self.n, other.n));
        }
        Ok(CliffordMap {
            n: self.n,
            x_images: self.x_images.iter().map(|p| other.conjugate(p)).collect::<Result<_>>()?,
            z_images: self.z_images.iter().map(|p| other.conjugate(p)).collect::<Result<_>>()?,
        })
    }

    /// `C†`, obtained by solving for preimages over F₂ and then fixing phases.
    pub fn inverse(&self) -> CliffordMap {
        let n = self.n;
        let rows: Vec<BitRow> = self.x_images.iter().chain(&self.z_images).map(PauliString::to_bits).collect();
        let preimage = |target: &PauliString| -> PauliString {
            let sel = f2::solve_combination(&rows, &target.to_bits()).expect("symplectic map is invertible");
            let mut cand = PauliString::from_bits(n, &BitRow::zeros(2 * n));
            for i in sel.ones() {
                let (q, is_x) = if i < n { (i, true) } else { (i - n, false) };
                let (x, z) = (cand.x_bit(q) ^ is_x, cand.z_bit(q) ^ !is_x);
                cand.set(q, x, z);
            }
            let image = self.conjugate(&cand).expect("same size");
            let fix = (target.phase + 4 - image.phase) & 3;
            cand.with_phase(fix)
        };
        CliffordMap {
            n,
            x_images: (0..n).map(|q| preimage(&PauliString::x_on(n, q))).collect(),
            z_images: (0..n).map(|q| preimage(&PauliString::z_on(n, q))).collect(),
        }
    }
}

/// Random elementary Clifford word of length `2n² + 4n` or one more, gates drawn
/// uniformly from `{H, S, CX}` on uniformly chosen qubits. Not uniform over the
/// Clifford group. The random parity of the length matters: every generator is
/// odd in the single-qubit quotient, so fixed-parity words miss half of it.
pub fn random_clifford_gates(n: usize, seed: u64) -> Vec<CliffordGate> {
    let mut rng = seeded(seed);
    let len = 2 * n * n + 4 * n + rng.gen_range(0..2);
    (0..len)
        .map(|_| {
            let kind = if n < 2 { rng.gen_range(0..2) } else { rng.gen_range(0..3) };
            match kind {
                0 => CliffordGate::H(rng.gen_range(0..n)),
                1 => CliffordGate::S(rng.gen_range(0..n)),
                _ => {
                    let c = rng.gen_range(0..n);
                    let mut t = rng.gen_range(0..n - 1);
                    if t >= c {
                        t += 1;
                    }
                    CliffordGate::Cx(c, t)
                }
            }
        })
        .collect()
}

/// Deterministic random Clifford map built from [`random_clifford_gates`].
pub fn random_clifford(n: usize, seed: u64) -> CliffordMap {
    CliffordMap::from_gates(n, &random_clifford_gates(n, seed))
}

/// The state `C|η⟩`.
pub fn apply_clifford(c: &CliffordMap, s: &StabilizerState) -> Result<StabilizerState> {
    if c.num_qubits() != s.num_qubits() {
        return Err(SymplecticError::SizeMismatch(c.num_qubits(), s.num_qubits()));
    }
    StabilizerState::new(s.generators().iter().map(|g| c.conjugate(g)).collect::<Result<_>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        assert_eq!(pauli_product(&p("X"), &p("Z")).unwrap(), p("-iY"));
        assert_eq!(pauli_product(&p("Z"), &p("X")).unwrap(), p("iY"));
        assert_eq!(pauli_product(&p("Y"), &p("Y")).unwrap(), p("I"));
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = seeded(3);
        for _ in 0..20 {
            let q = PauliString::random(7, &mut rng).with_phase(rng.gen_range(0..4));
            assert_eq!(PauliString::identity(7).mul(&q).unwrap(), q);
        }
    }

    #[test]
    fn commutation_basics() {
        assert!(!commutes(&p("X"), &p("Z")).unwrap());
        assert!(commutes(&p("XI"), &p("IZ")).unwrap());
        assert!(commutes(&p("XX"), &p("ZZ")).unwrap());
        assert!(matches!(commutes(&p("X"), &p("XX")), Err(SymplecticError::SizeMismatch(1, 2))));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["-XIZY", "iZZ", "-iY", "XYZI"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("+XZ"), p("XZ"));
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
    }

    #[test]
    fn product_spans_word_boundary() {
        let n = 130;
        let a = PauliString::x_on(n, 100);
        let b = PauliString::z_on(n, 100);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.phase(), 3);
        assert_eq!(ab.letter(100), 'Y');
        assert_eq!(ab.weight(), 1);
    }

    #[test]
    fn tableau_validation() {
        assert!(StabilizerState::from_strs(&["XX", "ZZ"]).is_ok());
        assert!(matches!(
            StabilizerState::from_strs(&["XI", "ZI"]),
            Err(SymplecticError::InvalidTableau(_))
        ));
        assert!(StabilizerState::from_strs(&["ZZ", "ZZ"]).is_err());
        assert!(StabilizerState::from_strs(&["iZ"]).is_err());
        assert!(StabilizerState::from_strs(&["Z"]).is_ok());
    }

    #[test]
    fn canonical_form_is_basis_independent() {
        let a = StabilizerState::from_strs(&["XX", "ZZ"]).unwrap();
        let b = StabilizerState::from_strs(&["-YY", "ZZ"]).unwrap();
        assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn overlap_examples() {
        for n in 1..6 {
            assert_eq!(stabilizer_overlap(&StabilizerState::zero(n), &StabilizerState::zero(n)).unwrap(), 1.0);
        }
        let o = stabilizer_overlap(&StabilizerState::zero(2), &StabilizerState::plus(2)).unwrap();
        assert!((o * o - 0.25).abs() < 1e-15);
        for n in 2..=8 {
            let o = stabilizer_overlap(&StabilizerState::zero(n), &StabilizerState::ghz(n)).unwrap();
            assert!((o * o - 0.5).abs() < 1e-15);
        }
        let one = StabilizerState::from_strs(&["-Z"]).unwrap();
        assert_eq!(stabilizer_overlap(&StabilizerState::zero(1), &one).unwrap(), 0.0);
    }

    #[test]
    fn sandwich_examples() {
        let zero = StabilizerState::zero(1);
        let plus = StabilizerState::plus(1);
        let v = pauli_sandwich(&zero, &p("X"), &plus).unwrap();
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let eta = StabilizerState::random(5, 11);
        for g in eta.generators() {
            let a = pauli_sandwich(&StabilizerState::zero(5), g, &eta).unwrap();
            let b = stabilizer_overlap(&StabilizerState::zero(5), &eta).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn random_clifford_is_deterministic_and_valid() {
        assert_eq!(random_clifford(6, 42), random_clifford(6, 42));
        assert_ne!(random_clifford(6, 42), random_clifford(6, 43));
        for seed in 0..100 {
            random_clifford(8, seed).validate().unwrap();
        }
    }

    #[test]
    fn inverse_round_trips() {
        let mut rng = seeded(9);
        for seed in 0..20 {
            let c = random_clifford(5, seed);
            let ci = c.inverse();
            ci.validate().unwrap();
            for _ in 0..5 {
                let q = PauliString::random(5, &mut rng).with_phase(rng.gen_range(0..4));
                assert_eq!(ci.conjugate(&c.conjugate(&q).unwrap()).unwrap(), q);
            }
            assert_eq!(c.then_map(&ci).unwrap(), CliffordMap::identity(5));
        }
    }

    #[test]
    fn hadamard_maps_zero_to_plus() {
        let h = CliffordMap::hadamard_all(4);
        let out = apply_clifford(&h, &StabilizerState::zero(4)).unwrap();
        assert_eq!(out.canonical(), StabilizerState::plus(4).canonical());
        let same = apply_clifford(&CliffordMap::identity(4), &StabilizerState::ghz(4)).unwrap();
        assert_eq!(same, StabilizerState::ghz(4));
    }

    #[test]
    fn membership_reports_sign() {
        let ghz = StabilizerState::ghz(3);
        assert_eq!(ghz.membership(&p("ZIZ")).unwrap(), Some(1));
        assert_eq!(ghz.membership(&p("-YYX")).unwrap(), Some(1));
        assert_eq!(ghz.membership(&p("YYX")).unwrap(), Some(-1));
        assert_eq!(ghz.membership(&p("ZII")).unwrap(), None);
    }

    #[test]
    fn region_subgroup() {
        let ghz = StabilizerState::ghz(4);
        let sub = ghz.subgroup_in_region(&[0, 1]);
        assert_eq!(sub.len(), 1);
        assert_eq!(sub[0].to_bits(), p("ZZII").to_bits());
        assert!(StabilizerState::ghz(4).subgroup_in_region(&[0]).is_empty());
    }
}
