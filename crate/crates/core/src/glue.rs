//! Gluing two pure states that agree on a middle region: instance generation,
//! the unitary construction `Ψ = U_A ψ′`, and the Petz-map realization.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::config::MAX_DENSITY_QUBITS;
use crate::linalg::{self, c, CMat, CVec, ZERO};
use crate::rng::{seeded, Rng64};
use crate::statevec::{self, StateVector, StatevecError};

#[derive(Debug, Error)]
pub enum GlueError {
    #[error("premise {which} violated: residual {residual:e}")]
    Premise { which: &'static str, residual: f64 },
    #[error("input support leaves the Petz cutoff support by {0:e}")]
    SupportMismatch(f64),
    #[error("{0} qubits exceed the limit of {1}")]
    TooLarge(usize, usize),
    #[error("every block size must be at least 1")]
    EmptyBlock,
    #[error(transparent)]
    Statevec(#[from] StatevecError),
}

pub type Result<T> = std::result::Result<T, GlueError>;

pub const PREMISE_TOL: f64 = 1e-8;
pub const CONCLUSION_TOL: f64 = 1e-8;
pub const PETZ_TOL: f64 = 1e-7;
pub const PETZ_CUTOFF: f64 = 1e-10;

/// Qubit blocks laid out contiguously as `A | B₁ B₂ | C₁ C₂ | D`, `A` on the low bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub a: usize,
    pub b1: usize,
    pub b2: usize,
    pub c1: usize,
    pub c2: usize,
    pub d: usize,
}

impl Partition {
    pub fn new(dims: [usize; 6]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(GlueError::EmptyBlock);
        }
        let [a, b1, b2, c1, c2, d] = dims;
        Ok(Self { a, b1, b2, c1, c2, d })
    }

    pub fn num_qubits(&self) -> usize {
        self.a + self.b1 + self.b2 + self.c1 + self.c2 + self.d
    }

    fn range(start: usize, len: usize) -> Vec<usize> {
        (start..start + len).collect()
    }

    pub fn a_qubits(&self) -> Vec<usize> {
        Self::range(0, self.a)
    }

    pub fn b_qubits(&self) -> Vec<usize> {
        Self::range(self.a, self.b1 + self.b2)
    }

    pub fn b2c1_qubits(&self) -> Vec<usize> {
        Self::range(self.a + self.b1, self.b2 + self.c1)
    }

    pub fn c_qubits(&self) -> Vec<usize> {
        Self::range(self.a + self.b1 + self.b2, self.c1 + self.c2)
    }

    pub fn d_qubits(&self) -> Vec<usize> {
        Self::range(self.num_qubits() - self.d, self.d)
    }
}

fn join(parts: &[Vec<usize>]) -> Vec<usize> {
    parts.concat()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PremiseReport {
    /// `‖ψ_BC − ψ′_BC‖_F`.
    pub bc_equal: f64,
    /// `I(A, CD)_ψ` in bits.
    pub mi_a_cd: f64,
    /// `I(AB, D)_{ψ′}` in bits.
    pub mi_ab_d: f64,
    /// `|S(D)_ψ − S(D)_{ψ′}|`.
    pub sd_diff: f64,
}

impl PremiseReport {
    pub fn check(&self, tol: f64) -> Result<()> {
        for (which, residual) in [
            ("marginal equality on BC", self.bc_equal),
            ("I(A,CD) = 0", self.mi_a_cd.abs()),
            ("I(AB,D) = 0", self.mi_ab_d.abs()),
            ("S(D) equality", self.sd_diff),
        ] {
            if residual > tol {
                return Err(GlueError::Premise { which, residual });
            }
        }
        Ok(())
    }
}

fn marginal_distance(x: &StateVector, y: &StateVector, subset: &[usize]) -> Result<f64> {
    let rx = statevec::reduced_density(x, subset)?;
    let ry = statevec::reduced_density(y, subset)?;
    Ok((rx.matrix() - ry.matrix()).norm())
}

pub fn premises(p: &Partition, psi: &StateVector, psi_prime: &StateVector) -> Result<PremiseReport> {
    let (a, b, cc, d) = (p.a_qubits(), p.b_qubits(), p.c_qubits(), p.d_qubits());
    Ok(PremiseReport {
        bc_equal: marginal_distance(psi, psi_prime, &join(&[b.clone(), cc.clone()]))?,
        mi_a_cd: statevec::mutual_information(psi, &a, &join(&[cc, d.clone()]))?,
        mi_ab_d: statevec::mutual_information(psi_prime, &join(&[a, b]), &d)?,
        sd_diff: (statevec::entropy(psi, &d)? - statevec::entropy(psi_prime, &d)?).abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// Haar factors, random local unitaries on `A` and `D`, random `V_B`, `V_C`.
    Random,
    /// All factors product states, `V_B = V_C = I`.
    Product,
    /// `ψ′ = W_A ψ` for a recorded random `W_A`.
    PlantedA,
    /// Independent `C₂D` factors, which breaks the `S(D)` premise.
    Violating,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GluableInstance {
    pub partition: Partition,
    pub psi: StateVector,
    pub psi_prime: StateVector,
    pub premises: PremiseReport,
    /// The `A` unitary relating `ψ′` to `ψ` for `PlantedA` instances.
    pub planted_w: Option<CMat>,
    /// `(V_B, V_C)` used by the generator; never read by the gluing constructions.
    pub frame: (CMat, CMat),
}

impl GluableInstance {
    /// `(φ, φ′) = V_B† V_C† (ψ, ψ′)`.
    pub fn frame_states(&self) -> Result<(StateVector, StateVector)> {
        let (b, cq) = (self.partition.b_qubits(), self.partition.c_qubits());
        let (v_b, v_c) = &self.frame;
        let mut out = [self.psi.clone(), self.psi_prime.clone()];
        for v in &mut out {
            v.apply_op(&b, &v_b.adjoint())?;
            v.apply_op(&cq, &v_c.adjoint())?;
        }
        let [phi, phi_prime] = out;
        Ok((phi, phi_prime))
    }

    /// `S(B₂C₁)` of both frame states, in bits.
    pub fn middle_entropy(&self) -> Result<(f64, f64)> {
        let (phi, phi_prime) = self.frame_states()?;
        let q = self.partition.b2c1_qubits();
        Ok((statevec::entropy(&phi, &q)?, statevec::entropy(&phi_prime, &q)?))
    }
}

fn random_factor(k: usize, product: bool, rng: &mut Rng64) -> Result<StateVector> {
    if product {
        let mut v = StateVector::normalized(1, linalg::random_unit_vector(2, rng).iter().copied().collect())?;
        for _ in 1..k {
            let q = StateVector::normalized(1, linalg::random_unit_vector(2, rng).iter().copied().collect())?;
            v = v.tensor(&q)?;
        }
        Ok(v)
    } else {
        Ok(StateVector::normalized(k, linalg::random_unit_vector(1 << k, rng).iter().copied().collect())?)
    }
}

/// `ψ = V_B V_C φ_{AB₁} χ_{B₂C₁} φ_{C₂D}` and `ψ′ = V_B V_C φ′_{AB₁} χ_{B₂C₁} φ′_{C₂D}`
/// with `φ′_{AB₁} = W_A φ_{AB₁}` and `φ_{C₂D} = W_D φ′_{C₂D}`.
pub fn generate_gluable_instance(p: Partition, kind: InstanceKind, seed: u64) -> Result<GluableInstance> {
    let n = p.num_qubits();
    if n > crate::config::max_n() {
        return Err(GlueError::TooLarge(n, crate::config::max_n()));
    }
    let mut rng = seeded(seed);
    let product = kind == InstanceKind::Product;
    let f_ab1 = random_factor(p.a + p.b1, product, &mut rng)?;
    let chi = random_factor(p.b2 + p.c1, product, &mut rng)?;
    let f_c2d = random_factor(p.c2 + p.d, product, &mut rng)?;

    let w_a = match kind {
        InstanceKind::Product => CMat::identity(1 << p.a, 1 << p.a),
        _ => linalg::haar_unitary(1 << p.a, &mut rng),
    };
    let w_d = match kind {
        InstanceKind::Random => linalg::haar_unitary(1 << p.d, &mut rng),
        _ => CMat::identity(1 << p.d, 1 << p.d),
    };
    let mut f_ab1_prime = f_ab1.clone();
    f_ab1_prime.apply_op(&(0..p.a).collect::<Vec<_>>(), &w_a)?;
    let f_c2d_prime = if kind == InstanceKind::Violating { random_factor(p.c2 + p.d, false, &mut rng)? } else { f_c2d.clone() };
    let mut f_c2d_psi = f_c2d;
    f_c2d_psi.apply_op(&(p.c2..p.c2 + p.d).collect::<Vec<_>>(), &w_d)?;

    let mut psi = f_ab1.tensor(&chi)?.tensor(&f_c2d_psi)?;
    let mut psi_prime = f_ab1_prime.tensor(&chi)?.tensor(&f_c2d_prime)?;
    let (b, cq) = (p.b_qubits(), p.c_qubits());
    let (v_b, v_c) = if product {
        (CMat::identity(1 << b.len(), 1 << b.len()), CMat::identity(1 << cq.len(), 1 << cq.len()))
    } else {
        (linalg::haar_unitary(1 << b.len(), &mut rng), linalg::haar_unitary(1 << cq.len(), &mut rng))
    };
    for v in [&mut psi, &mut psi_prime] {
        v.apply_op(&b, &v_b)?;
        v.apply_op(&cq, &v_c)?;
    }
    let premises = premises(&p, &psi, &psi_prime)?;
    let planted_w = (kind == InstanceKind::PlantedA).then_some(w_a);
    Ok(GluableInstance { partition: p, psi, psi_prime, premises, planted_w, frame: (v_b, v_c) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConclusionReport {
    /// `‖Ψ_ABC − ψ_ABC‖_F`.
    pub abc: f64,
    /// `‖Ψ_BCD − ψ′_BCD‖_F`.
    pub bcd: f64,
    pub mi_a_cd: f64,
    pub mi_ab_d: f64,
}

impl ConclusionReport {
    pub fn max_residual(&self) -> f64 {
        [self.abc, self.bcd, self.mi_a_cd.abs(), self.mi_ab_d.abs()].into_iter().fold(0.0, f64::max)
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlueResult {
    pub u_a: CMat,
    pub glued: StateVector,
    pub conclusions: ConclusionReport,
}

/// Row-major view of a vector on `low ⊗ high` qubits as a `2^low × 2^high` matrix.
fn as_matrix(v: &[Complex64], low: usize) -> CMat {
    CMat::from_column_slice(1 << low, v.len() >> low, v)
}

/// `U_A` with `U_A ψ′_AB U_A† = ψ_AB`, found from `ψ` and `ψ′` alone.
///
/// Every vector in the support of `ψ_AB` has the form `V_B(φ_{AB₁} ⊗ κ)`. Take
/// `t` as the top eigenvector of `ψ_AB`, pick `t′` in the support of `ψ′_AB`
/// whose `B` marginal best overlaps that of `t` (this aligns `κ′` with `κ`), and
/// return the polar unitary of `Tr_B |t⟩⟨t′| ∝ ρ_A W†`.
pub fn matching_unitary(p: &Partition, psi: &StateVector, psi_prime: &StateVector) -> Result<CMat> {
    let ab = join(&[p.a_qubits(), p.b_qubits()]);
    let x = statevec::reduced_density(psi, &ab)?;
    let xp = statevec::reduced_density(psi_prime, &ab)?;
    let (_, vecs) = linalg::herm_eig(x.matrix());
    let mut t: CVec = vecs.column(vecs.ncols() - 1).into_owned();
    linalg::fix_phase(&mut t);
    let tm = as_matrix(t.as_slice(), p.a);
    let sigma = tm.transpose() * tm.map(|z| z.conj());

    let (vals_p, vecs_p) = linalg::herm_eig(xp.matrix());
    let support: Vec<CMat> = (0..vals_p.len())
        .filter(|&k| vals_p[k] > PETZ_CUTOFF)
        .map(|k| as_matrix(vecs_p.column(k).into_owned().as_slice(), p.a))
        .collect();
    let r = support.len();
    // G_{ji} = Σ_a y_j[a,:]† σ y_i[a,:]
    let g = CMat::from_fn(r, r, |j, i| {
        let yi = &support[i];
        let yj = &support[j];
        (0..yi.nrows())
            .map(|a| (yj.row(a).map(|z| z.conj()) * &sigma * yi.row(a).transpose())[(0, 0)])
            .sum::<Complex64>()
    });
    let (_, gv) = linalg::herm_eig(&g);
    let coeffs = gv.column(r - 1);
    let mut tp = CMat::zeros(1 << p.a, support[0].ncols());
    for (i, y) in support.iter().enumerate() {
        tp += y * coeffs[i];
    }
    let m = &tm * tp.adjoint();
    Ok(linalg::polar_unitary(&m))
}

/// `Ψ = U_A ψ′`, after checking the premises.
pub fn glue_states(inst: &GluableInstance) -> Result<GlueResult> {
    let p = &inst.partition;
    inst.premises.check(PREMISE_TOL)?;
    let u_a = matching_unitary(p, &inst.psi, &inst.psi_prime)?;
    let mut glued = inst.psi_prime.clone();
    glued.apply_op(&p.a_qubits(), &u_a)?;
    let (a, b, cq, d) = (p.a_qubits(), p.b_qubits(), p.c_qubits(), p.d_qubits());
    let conclusions = ConclusionReport {
        abc: marginal_distance(&glued, &inst.psi, &join(&[a.clone(), b.clone(), cq.clone()]))?,
        bcd: marginal_distance(&glued, &inst.psi_prime, &join(&[b.clone(), cq.clone(), d.clone()]))?,
        mi_a_cd: statevec::mutual_information(&glued, &a, &join(&[cq, d.clone()]))?,
        mi_ab_d: statevec::mutual_information(&glued, &join(&[a, b]), &d)?,
    };
    Ok(GlueResult { u_a, glued, conclusions })
}

/// A positive operator `Σ_k |v_k⟩⟨v_k|` kept in factored form.
#[derive(Clone, Debug, PartialEq)]
pub struct PetzOutput {
    pub n: usize,
    pub vectors: Vec<Vec<Complex64>>,
}

impl PetzOutput {
    fn gram(&self) -> CMat {
        let k = self.vectors.len();
        CMat::from_fn(k, k, |i, j| self.vectors[i].iter().zip(&self.vectors[j]).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn trace(&self) -> f64 {
        self.vectors.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    /// Smallest eigenvalue of the nonzero spectrum (that of the Gram matrix).
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::herm_eig(&self.gram()).0.first().copied().unwrap_or(0.0)
    }

    pub fn expectation(&self, psi: &StateVector) -> f64 {
        self.vectors
            .iter()
            .map(|v| v.iter().zip(psi.amplitudes()).map(|(a, b)| b.conj() * a).sum::<Complex64>().norm_sqr())
            .sum()
    }

    /// `‖P − |ψ⟩⟨ψ|‖_F`.
    pub fn distance_to_pure(&self, psi: &StateVector) -> f64 {
        let g = self.gram();
        let tr_sq: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        (tr_sq - 2.0 * self.expectation(psi) + 1.0).max(0.0).sqrt()
    }

    pub fn to_density(&self) -> Option<CMat> {
        if self.n > MAX_DENSITY_QUBITS {
            return None;
        }
        let d = 1 << self.n;
        let mut m = CMat::zeros(d, d);
        for v in &self.vectors {
            let col = CVec::from_column_slice(v);
            m += &col * col.adjoint();
        }
        Some(m)
    }
}

/// `𝒫(σ_BCD) = ψ_AB^{1/2} ψ_B^{−1/2} (I_A ⊗ σ_BCD) ψ_B^{−1/2} ψ_AB^{1/2}` for
/// `σ_BCD = Tr_A |φ⟩⟨φ|`, using `I_A ⊗ Tr_A|φ⟩⟨φ| = Σ_{ij} |i⟩⟨j|_A φ φ† |j⟩⟨i|_A`.
pub fn petz_apply(p: &Partition, psi: &StateVector, input: &StateVector) -> Result<PetzOutput> {
    let (a, b) = (p.a, p.b1 + p.b2);
    let ab = join(&[p.a_qubits(), p.b_qubits()]);
    let psi_ab = statevec::reduced_density(psi, &ab)?;
    let psi_b = statevec::reduced_density(psi, &p.b_qubits())?;
    let sqrt_ab = linalg::psd_sqrt(psi_ab.matrix());
    let inv_sqrt_b = linalg::psd_pinv_sqrt(psi_b.matrix(), PETZ_CUTOFF);

    // the input's B marginal must live in the support kept by the cutoff
    let in_b = statevec::reduced_density(input, &p.b_qubits())?;
    let (vals, vecs) = linalg::herm_eig(psi_b.matrix());
    let mut proj = CMat::zeros(1 << b, 1 << b);
    for (k, &v) in vals.iter().enumerate() {
        if v > PETZ_CUTOFF {
            let col = vecs.column(k);
            proj += col * col.adjoint();
        }
    }
    let leak = (in_b.matrix() - &proj * in_b.matrix() * &proj).norm();
    if leak > 1e-8 {
        return Err(GlueError::SupportMismatch(leak));
    }

    let k_ab = sqrt_ab * linalg::kron(&inv_sqrt_b, &CMat::identity(1 << a, 1 << a));
    let amps = input.amplitudes();
    let da = 1usize << a;
    let mut vectors = Vec::with_capacity(da * da);
    for i in 0..da {
        for j in 0..da {
            let moved: Vec<Complex64> =
                (0..amps.len()).map(|idx| if idx % da == i { amps[idx - i + j] } else { ZERO }).collect();
            let out = &k_ab * as_matrix(&moved, a + b);
            vectors.push(out.as_slice().to_vec());
        }
    }
    Ok(PetzOutput { n: input.num_qubits(), vectors })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PetzReport {
    /// `‖𝒫(ψ_BCD) − |ψ⟩⟨ψ|‖_F`.
    pub on_psi: f64,
    /// `‖𝒫(ψ′_BCD) − |Ψ⟩⟨Ψ|‖_F` with `Ψ` from the unitary construction.
    pub on_psi_prime: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl PetzReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.on_psi <= tol && self.on_psi_prime <= tol && (self.trace - 1.0).abs() <= 1e-9 && self.min_eigenvalue >= -1e-9
    }
}

pub fn petz_glue(inst: &GluableInstance) -> Result<(PetzOutput, PetzReport)> {
    inst.premises.check(PREMISE_TOL)?;
    let p = &inst.partition;
    let glued = glue_states(inst)?.glued;
    let on_self = petz_apply(p, &inst.psi, &inst.psi)?;
    let out = petz_apply(p, &inst.psi, &inst.psi_prime)?;
    let report = PetzReport {
        on_psi: on_self.distance_to_pure(&inst.psi),
        on_psi_prime: out.distance_to_pure(&glued),
        trace: out.trace(),
        min_eigenvalue: out.min_eigenvalue(),
    };
    Ok((out, report))
}

/// `|P (U W) P − e^{iθ} P|` on the support `P` of `ψ_A`, minimised over `θ`.
pub fn planted_mismatch(p: &Partition, psi: &StateVector, u_a: &CMat, w: &CMat) -> Result<f64> {
    let rho = statevec::reduced_density(psi, &p.a_qubits())?;
    let (vals, vecs) = linalg::herm_eig(rho.matrix());
    let cols: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > 1e-10).collect();
    let basis = CMat::from_fn(vecs.nrows(), cols.len(), |r, k| vecs[(r, cols[k])]);
    let restricted = basis.adjoint() * u_a * w * &basis;
    let phase = linalg::trace(&restricted);
    let phase = if phase.norm() > 0.0 { phase / phase.norm() } else { c(1.0, 0.0) };
    Ok((restricted - CMat::identity(cols.len(), cols.len()) * phase).norm())
}
