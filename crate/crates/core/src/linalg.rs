//! Dense complex matrix helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `diag(R)` removed.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| complex_gaussian(rng));
    let (q, r) = g.qr().unpack();
    let mut u = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
        for i in 0..d {
            u[(i, j)] *= ph;
        }
    }
    u
}

/// Gaussian Hermitian matrix rescaled to unit operator norm.
pub fn random_hermitian_unit<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| complex_gaussian(rng));
    let h = (&g + g.adjoint()) * c(0.5, 0.0);
    let norm = spectral_norm(&h);
    h.map(|z| z / norm)
}

pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    let v = CVec::from_fn(d, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v.map(|z| z / norm)
}

pub fn spectral_norm(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn herm_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(m.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    (vals, vecs)
}

/// `f(H)` for Hermitian `H` via its spectral decomposition.
pub fn herm_apply(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = herm_eig(m);
    let d = CMat::from_diagonal(&CVec::from_iterator(vals.len(), vals.iter().map(|&v| c(f(v), 0.0))));
    &vecs * d * vecs.adjoint()
}

/// Square root of a positive semidefinite matrix; eigenvalues below `1e-14` clip to zero.
pub fn psd_sqrt(m: &CMat) -> CMat {
    herm_apply(m, |v| if v > 1e-14 { v.sqrt() } else { 0.0 })
}

/// Sum of singular values.
pub fn nuclear_norm(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Moore-Penrose inverse square root: eigenvalues at or below `cutoff` map to zero.
pub fn psd_pinv_sqrt(m: &CMat, cutoff: f64) -> CMat {
    herm_apply(m, |v| if v > cutoff { 1.0 / v.sqrt() } else { 0.0 })
}

/// Von Neumann entropy in bits of a spectrum; eigenvalues below `1e-12` are dropped.
pub fn entropy_bits(eigs: &[f64]) -> f64 {
    eigs.iter().filter(|&&p| p > 1e-12).map(|&p| -p * p.log2()).sum()
}

/// Unitary factor `W` of the polar decomposition `M = W |M|`.
pub fn polar_unitary(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    u.is_square() && (u.adjoint() * u - CMat::identity(u.nrows(), u.ncols())).norm() <= tol
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).norm() <= tol
}

/// Trace of a square matrix.
pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Complete an orthonormal set of columns to a unitary basis, keeping the given
/// columns in place (Gram-Schmidt against the standard basis).
pub fn complete_basis(cols: &CMat) -> CMat {
    let d = cols.nrows();
    let mut basis: Vec<CVec> = cols.column_iter().map(|c| c.into_owned()).collect();
    for e in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = CVec::zeros(d);
        v[e] = ONE;
        for b in &basis {
            let proj = b.dotc(&v);
            v -= b * proj;
        }
        for b in &basis {
            let proj = b.dotc(&v);
            v -= b * proj;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / c(norm, 0.0));
        }
    }
    CMat::from_columns(&basis)
}

/// Rotate a vector so its first component above `1e-9` in magnitude is real positive.
pub fn fix_phase(v: &mut CVec) {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-9).copied() {
        let ph = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

pub fn pauli_matrix(kind: char) -> CMat {
    match kind {
        'X' => CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        'Y' => CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        'Z' => CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => CMat::identity(2, 2),
    }
}

pub fn hadamard() -> CMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
}

pub fn phase_s() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, I])
}

/// 4×4 matrix of a two-qubit gate `controlled-U` with the control as the low bit.
pub fn controlled(u: &CMat) -> CMat {
    let mut m = CMat::identity(4, 4);
    // basis index = control + 2·target
    for (a, b) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
        m[(1 + 2 * a, 1 + 2 * b)] = u[(a, b)];
    }
    m
}
