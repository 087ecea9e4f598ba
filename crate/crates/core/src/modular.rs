//! Modular data in exact golden-ratio arithmetic: double Fibonacci, Verlinde
//! dimensions, the monomial logical-gate exclusion search, and the scalar
//! rigidity trial for `U ⊗ U*` conjugation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{self, c, CMat, ZERO};
use crate::rng::{seeded, trial_seed};

#[derive(Debug, Error)]
pub enum ModularError {
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("genus must be at least 1, got {0}")]
    InvalidGenus(u32),
    #[error("invalid modular data: {0}")]
    InvalidData(String),
    #[error("division by zero in the golden field")]
    DivisionByZero,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ModularError>;

/// `a + bφ` with `φ² = φ + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GoldenNumber {
    pub a: BigRational,
    pub b: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl GoldenNumber {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Self::new(rat(a), rat(b))
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn phi() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Galois conjugate `a + bφ̄`, `φ̄ = 1 − φ`.
    pub fn conj(&self) -> Self {
        Self::new(&self.a + &self.b, -self.b.clone())
    }

    /// Field norm `(a + bφ)(a + bφ̄) = a² + ab − b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a + &self.a * &self.b - &self.b * &self.b
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(ModularError::DivisionByZero);
        }
        let c = self.conj();
        Ok(Self::new(c.a / &n, c.b / &n))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.clone() * other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc * self.clone())
    }

    pub fn to_f64(&self) -> f64 {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * phi
    }

    /// Sign of the real embedding, decided exactly.
    pub fn is_positive(&self) -> bool {
        // a + bφ > 0  ⇔  2a + b > −b√5
        let lhs = rat(2) * &self.a + &self.b;
        let rhs = -self.b.clone();
        match (lhs.is_negative(), rhs.is_negative()) {
            (false, true) => !(lhs.is_zero() && rhs.is_zero()),
            (true, false) => false,
            (false, false) => lhs.clone() * &lhs > rhs.clone() * &rhs * rat(5),
            (true, true) => lhs.clone() * &lhs < rhs.clone() * &rhs * rat(5),
        }
    }
}

impl Add for GoldenNumber {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for GoldenNumber {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for GoldenNumber {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Mul for GoldenNumber {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        // (a + bφ)(c + dφ) = ac + bd + (ad + bc + bd)φ
        let bd = &self.b * &o.b;
        Self::new(&self.a * &o.a + &bd, &self.a * &o.b + &self.b * &o.a + bd)
    }
}

impl fmt::Display for GoldenNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}φ", self.a, self.b)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Int(i64),
    Str(String),
}

impl RatRepr {
    fn parse(self) -> Result<BigRational> {
        match self {
            RatRepr::Int(n) => Ok(rat(n)),
            RatRepr::Str(s) => BigRational::from_str(s.trim()).map_err(|_| ModularError::Parse(s)),
        }
    }
}

/// Serialized as `["a", "b"]`; integers or `"p/q"` strings accepted on input.
impl Serialize for GoldenNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a.to_string(), self.b.to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for GoldenNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[RatRepr; 2]>::deserialize(d)?;
        let a = a.parse().map_err(serde::de::Error::custom)?;
        let b = b.parse().map_err(serde::de::Error::custom)?;
        Ok(GoldenNumber::new(a, b))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularData {
    pub labels: Vec<String>,
    pub dims: Vec<GoldenNumber>,
    /// `S = s_prefactor · s`.
    pub s_prefactor: GoldenNumber,
    pub s: Vec<Vec<GoldenNumber>>,
    /// `T_jj = exp(2πi · t_exponents[j] / t_root)`.
    pub t_root: u32,
    pub t_exponents: Vec<u32>,
}

impl ModularData {
    pub fn k(&self) -> usize {
        self.dims.len()
    }

    pub fn s_exact(&self, i: usize, j: usize) -> GoldenNumber {
        self.s_prefactor.clone() * self.s[i][j].clone()
    }

    pub fn s_matrix(&self) -> CMat {
        let k = self.k();
        CMat::from_fn(k, k, |i, j| c(self.s_exact(i, j).to_f64(), 0.0))
    }

    pub fn t_phase(&self, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.t_exponents[j] as f64 / self.t_root as f64)
    }

    pub fn t_matrix(&self) -> CMat {
        let k = self.k();
        CMat::from_fn(k, k, |i, j| if i == j { self.t_phase(i) } else { ZERO })
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        let bad = |m: String| Err(ModularError::InvalidData(m));
        if k == 0 || self.labels.len() != k || self.t_exponents.len() != k {
            return bad("label, dimension and T lengths differ".into());
        }
        if self.s.len() != k || self.s.iter().any(|r| r.len() != k) {
            return bad(format!("S must be {k}x{k}"));
        }
        if self.t_root == 0 {
            return bad("T root of unity order must be positive".into());
        }
        if !self.dims.iter().all(GoldenNumber::is_positive) {
            return bad("quantum dimensions must be positive".into());
        }
        if (0..k).any(|i| (0..i).any(|j| self.s[i][j] != self.s[j][i])) {
            return bad("S is not symmetric".into());
        }
        if !linalg::is_unitary(&self.s_matrix(), 1e-12) {
            return bad("S is not unitary".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: ModularData = serde_json::from_str(text)?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Doubled Fibonacci theory: labels `1, τ, τ̄, ττ̄`, dims `(1, φ, φ, φ²)`,
/// `S = (2+φ)⁻¹ [...]`, `T = diag(1, e^{4πi/5}, e^{−4πi/5}, 1)`.
pub fn double_fibonacci() -> ModularData {
    let g = GoldenNumber::from_ints;
    let (one, p, p2) = (g(1, 0), g(0, 1), g(1, 1));
    let neg = |x: &GoldenNumber| -x.clone();
    let s = vec![
        vec![one.clone(), p.clone(), p.clone(), p2.clone()],
        vec![p.clone(), neg(&one), p2.clone(), neg(&p)],
        vec![p.clone(), p2.clone(), neg(&one), neg(&p)],
        vec![p2.clone(), neg(&p), neg(&p), one.clone()],
    ];
    // 1/(2+φ) = (3−φ)/5
    let s_prefactor = GoldenNumber::new(BigRational::new(3.into(), 5.into()), BigRational::new((-1).into(), 5.into()));
    ModularData {
        labels: ["1", "τ", "τ̄", "ττ̄"].iter().map(|s| s.to_string()).collect(),
        dims: vec![one, p.clone(), p, p2],
        s_prefactor,
        s,
        t_root: 10,
        t_exponents: vec![0, 4, 6, 0],
    }
}

/// `Σᵢ (𝒟/dᵢ)^{2g−2}` with `𝒟² = Σ dᵢ²`, evaluated exactly.
pub fn verlinde_dim(dims: &[GoldenNumber], genus: u32) -> Result<GoldenNumber> {
    if genus == 0 {
        return Err(ModularError::InvalidGenus(genus));
    }
    if dims.is_empty() || !dims.iter().all(GoldenNumber::is_positive) {
        return Err(ModularError::InvalidData("dimensions must be positive".into()));
    }
    let total = dims.iter().fold(GoldenNumber::zero(), |acc, d| acc + d.clone() * d.clone());
    let e = genus - 1;
    dims.iter().try_fold(GoldenNumber::zero(), |acc, d| {
        Ok(acc + total.pow(e).div(&(d.clone() * d.clone()).pow(e))?)
    })
}

/// Permutations `π` (as `π[i] = π(i)`) with `d_{π(i)} = d_i`, identity first.
pub fn dim_preserving_perms(dims: &[GoldenNumber]) -> Vec<Vec<usize>> {
    let k = dims.len();
    (0..k).permutations(k).filter(|p| p.iter().enumerate().all(|(i, &j)| dims[i] == dims[j])).collect()
}

/// `L = Π_π D` with `D = diag(z)`: `L_{ij} = z_j` iff `π(i) = j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonomialCandidate {
    pub perm: Vec<usize>,
    /// Entries divided by the first row's entry, so `z[π(0)] = 1`.
    pub z: Vec<Complex64>,
}

impl MonomialCandidate {
    pub fn identity(k: usize) -> Self {
        Self { perm: (0..k).collect(), z: vec![c(1.0, 0.0); k] }
    }

    pub fn matrix(&self) -> CMat {
        let k = self.perm.len();
        CMat::from_fn(k, k, |i, j| if self.perm[i] == j { self.z[j] } else { ZERO })
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j) && self.z.iter().all(|z| (z - c(1.0, 0.0)).norm() <= tol)
    }
}

/// Maximum-weight perfect assignment on a square weight matrix (Hungarian
/// algorithm, O(k³)); returns `col[row]`.
pub fn max_weight_assignment(w: &[Vec<f64>]) -> Vec<usize> {
    let k = w.len();
    let big = w.iter().flatten().cloned().fold(0.0, f64::max);
    // minimise cost = big − w with 1-based potentials
    let cost = |i: usize, j: usize| big - w[i - 1][j - 1];
    let (mut u, mut v) = (vec![0.0; k + 1], vec![0.0; k + 1]);
    let (mut p, mut way) = (vec![0usize; k + 1], vec![0usize; k + 1]);
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let (mut delta, mut j1) = (f64::INFINITY, 0);
            for j in 1..=k {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0; k];
    for j in 1..=k {
        if p[j] > 0 {
            col[p[j] - 1] = j - 1;
        }
    }
    col
}

/// Frobenius norm of the entries outside the best single-entry-per-row/column
/// pattern. The pattern maximises `Σ|m_{i,σ(i)}|²`, which makes the distance the
/// minimum over patterns.
pub fn monomial_distance(m: &CMat, tol: f64) -> Result<(f64, Option<MonomialCandidate>)> {
    if !m.is_square() {
        return Err(ModularError::NotSquare(m.nrows(), m.ncols()));
    }
    let k = m.nrows();
    let w: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| m[(i, j)].norm_sqr()).collect()).collect();
    let perm = max_weight_assignment(&w);
    let off: f64 = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|&(i, j)| perm[i] != j).map(|(i, j)| w[i][j]).sum();
    let dist = off.sqrt();
    if dist > tol || k == 0 {
        return Ok((dist, None));
    }
    let first = m[(0, perm[0])];
    if first.norm() == 0.0 {
        return Ok((dist, None));
    }
    let mut z = vec![ZERO; k];
    for i in 0..k {
        z[perm[i]] = m[(i, perm[i])] / first;
    }
    Ok((dist, Some(MonomialCandidate { perm, z })))
}

/// `S Π_π diag(z) S†` entry `(r, c)` as coefficients of `(z_0, …, z_{k−1})`:
/// `Σᵢ S_{ri} S_{c π(i)} z_{π(i)}` (S is real).
fn conjugate_coefficients(data: &ModularData, perm: &[usize], r: usize, col: usize) -> Vec<GoldenNumber> {
    let mut coef = vec![GoldenNumber::zero(); data.k()];
    for (i, &j) in perm.iter().enumerate() {
        coef[j] = coef[j].clone() + data.s_exact(r, i) * data.s_exact(col, j);
    }
    coef
}

/// Numerical `S Π_π diag(z) S†`.
pub fn s_conjugate(data: &ModularData, perm: &[usize], z: &[Complex64]) -> CMat {
    let s = data.s_matrix();
    let l = MonomialCandidate { perm: perm.to_vec(), z: z.to_vec() }.matrix();
    &s * l * s.adjoint()
}

/// Numerical `(ST) L (ST)†`.
pub fn st_conjugate(data: &ModularData, l: &CMat) -> CMat {
    let st = data.s_matrix() * data.t_matrix();
    &st * l * st.adjoint()
}

/// Outcome of the exact linear solve for one `(π, σ)` pair.
#[derive(Clone, Debug, PartialEq)]
pub enum PatternSolve {
    /// Some constraint cannot vanish for unimodular `z` (triangle inequality).
    Pruned,
    Inconsistent,
    /// Unique solution with `z_0 = 1`.
    Unique(Vec<GoldenNumber>),
    /// Solution space of the given dimension.
    Underdetermined(usize),
}

/// Require the entries of `S Π_π D S†` outside the pattern `σ` to vanish and
/// solve for `D = diag(1, z_1, …)` over `Q(φ)`.
pub fn solve_pattern(data: &ModularData, perm: &[usize], sigma: &[usize]) -> PatternSolve {
    let k = data.k();
    let mut rows: Vec<Vec<GoldenNumber>> = Vec::new();
    for (r, &target) in sigma.iter().enumerate().take(k) {
        for col in 0..k {
            if target == col {
                continue;
            }
            let coef = conjugate_coefficients(data, perm, r, col);
            let mags: Vec<f64> = coef.iter().map(|g| g.to_f64().abs()).collect();
            let total: f64 = mags.iter().sum();
            if mags.iter().any(|&m| m > total - m + 1e-9) {
                return PatternSolve::Pruned;
            }
            // Σ_{j≥1} coef_j z_j = −coef_0
            let mut row: Vec<GoldenNumber> = coef[1..].to_vec();
            row.push(-coef[0].clone());
            rows.push(row);
        }
    }
    let unknowns = k - 1;
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..unknowns {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][col].inv().expect("nonzero pivot");
        rows[r] = rows[r].iter().map(|x| x.clone() * inv.clone()).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                rows[i] = rows[i].iter().zip(&rows[r]).map(|(a, b)| a.clone() - f.clone() * b.clone()).collect();
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[unknowns].is_zero()) {
        return PatternSolve::Inconsistent;
    }
    if pivots.len() < unknowns {
        return PatternSolve::Underdetermined(unknowns - pivots.len());
    }
    let mut z = vec![GoldenNumber::one()];
    z.extend(rows[..unknowns].iter().map(|row| row[unknowns].clone()));
    PatternSolve::Unique(z)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpuCase {
    pub perm: Vec<usize>,
    /// Monomial pattern imposed on `S L S†`.
    pub sigma: Vec<usize>,
    pub z: Vec<f64>,
    pub s_distance: f64,
    pub st_distance: f64,
    pub survives: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpuSearch {
    pub cases: Vec<LpuCase>,
    pub survivors: Vec<MonomialCandidate>,
    /// `(π, σ)` pairs whose linear system left free parameters; nonzero means the
    /// search is incomplete.
    pub unresolved: usize,
}

/// For every dimension-preserving `π` and every pattern `σ`, solve exactly for
/// unimodular `z` making `S Π_π D S†` monomial with pattern `σ`, then keep the
/// solutions for which `(ST) L (ST)†` is also monomial.
pub fn lpu_search(data: &ModularData, tol: f64) -> Result<LpuSearch> {
    data.validate()?;
    let k = data.k();
    let mut cases = Vec::new();
    let mut survivors = Vec::new();
    let mut unresolved = 0;
    for perm in dim_preserving_perms(&data.dims) {
        for sigma in (0..k).permutations(k) {
            let z = match solve_pattern(data, &perm, &sigma) {
                PatternSolve::Unique(z) => z,
                PatternSolve::Underdetermined(_) => {
                    unresolved += 1;
                    continue;
                }
                _ => continue,
            };
            // real solutions are unimodular iff z² = 1
            if !z.iter().all(|x| x.clone() * x.clone() == GoldenNumber::one()) {
                continue;
            }
            let zc: Vec<Complex64> = z.iter().map(|x| c(x.to_f64(), 0.0)).collect();
            let cand = MonomialCandidate { perm: perm.clone(), z: zc.clone() };
            let s_distance = monomial_distance(&s_conjugate(data, &perm, &zc), tol)?.0;
            let st_distance = monomial_distance(&st_conjugate(data, &cand.matrix()), tol)?.0;
            let survives = s_distance <= tol && st_distance <= tol;
            if survives {
                survivors.push(cand);
            }
            cases.push(LpuCase { perm: perm.clone(), sigma, z: zc.iter().map(|x| x.re).collect(), s_distance, st_distance, survives });
        }
    }
    Ok(LpuSearch { cases, survivors, unresolved })
}

/// Largest off-diagonal modulus of `S Π_π D S†` over random unimodular `z`.
pub fn offdiag_modulus_scan(data: &ModularData, perm: &[usize], samples: usize, seed: u64) -> f64 {
    let k = data.k();
    (0..samples)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded(trial_seed(seed, t as u64));
            let mut z = vec![c(1.0, 0.0)];
            z.extend((1..k).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))));
            max_offdiag(&s_conjugate(data, perm, &z))
        })
        .reduce(|| 0.0, f64::max)
}

pub fn max_offdiag(m: &CMat) -> f64 {
    let k = m.nrows();
    (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| m[(i, j)].norm()).fold(0.0, f64::max)
}

/// Random monomial `d×d` matrix with unimodular entries that is not a scalar.
pub fn random_nonscalar_monomial<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    loop {
        let mut perm: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let z: Vec<Complex64> =
            (0..d).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))).collect();
        let m = MonomialCandidate { perm, z }.matrix();
        if !is_scalar(&m, 1e-9) {
            return m;
        }
    }
}

fn is_scalar(m: &CMat, tol: f64) -> bool {
    let lam = m[(0, 0)];
    (m - CMat::identity(m.nrows(), m.ncols()) * lam).norm() <= tol
}

/// Conjugate `K` by `U ⊗ U*` for Haar-random `U` on `Cⁿ` and return the first
/// attempt index and `U` for which the result is not monomial within `tol`.
/// A `None` result is not a proof of monomiality for every `U`.
pub fn scalar_rigidity_trial(n: usize, k: &CMat, attempts: usize, seed: u64, tol: f64) -> Result<Option<(usize, CMat)>> {
    if k.nrows() != n * n || k.ncols() != n * n {
        return Err(ModularError::NotSquare(k.nrows(), k.ncols()));
    }
    let mut rng = seeded(seed);
    for t in 0..attempts {
        let u = linalg::haar_unitary(n, &mut rng);
        let w = linalg::kron(&u, &u.map(|x| x.conj()));
        let ku = &w * k * w.adjoint();
        if monomial_distance(&ku, tol)?.0 > tol {
            return Ok(Some((t, u)));
        }
    }
    Ok(None)
}
