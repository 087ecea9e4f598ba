//! Dense brute-force oracles shared by the integration tests. They use only
//! nalgebra and explicit matrices, never the library's tableau code.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use magiclab::symplectic::{CliffordGate, PauliString, StabilizerState};

pub type M = DMatrix<Complex64>;
pub type V = DVector<Complex64>;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn single(kind: char) -> M {
    let (o, z, i) = (cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 1.0));
    match kind {
        'I' => M::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => M::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => M::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => M::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("bad Pauli letter {kind}"),
    }
}

pub fn kron(a: &M, b: &M) -> M {
    a.kronecker(b)
}

/// Embeds a one-qubit operator on qubit `q` of `n` (qubit 0 is the least significant bit).
pub fn embed1(n: usize, q: usize, op: &M) -> M {
    let mut m = M::identity(1, 1);
    for k in (0..n).rev() {
        m = kron(&m, &if k == q { op.clone() } else { M::identity(2, 2) });
    }
    m
}

pub fn dense_pauli(p: &PauliString) -> M {
    let n = p.num_qubits();
    let mut m = M::identity(1 << n, 1 << n);
    for q in 0..n {
        m = embed1(n, q, &single(p.letter(q))) * m;
    }
    let ph = [cx(1.0, 0.0), cx(0.0, 1.0), cx(-1.0, 0.0), cx(0.0, -1.0)][p.phase() as usize];
    m * ph
}

/// Unit vector in the joint +1 eigenspace of the generators.
pub fn stabilizer_vector(s: &StabilizerState) -> V {
    let n = s.num_qubits();
    let d = 1 << n;
    let mut proj = M::identity(d, d);
    for g in s.generators() {
        proj = (M::identity(d, d) + dense_pauli(g)) * cx(0.5, 0.0) * proj;
    }
    let best = (0..d).max_by(|&a, &b| proj.column(a).norm().partial_cmp(&proj.column(b).norm()).unwrap()).unwrap();
    let col: V = proj.column(best).into_owned();
    let nrm = col.norm();
    col / cx(nrm, 0.0)
}

pub fn hadamard() -> M {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    M::from_row_slice(2, 2, &[cx(h, 0.0), cx(h, 0.0), cx(h, 0.0), cx(-h, 0.0)])
}

pub fn phase_s() -> M {
    M::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 1.0)])
}

/// CNOT built by permuting basis states.
pub fn cnot(n: usize, control: usize, target: usize) -> M {
    let d = 1 << n;
    let mut m = M::zeros(d, d);
    for b in 0..d {
        let out = if b >> control & 1 == 1 { b ^ (1 << target) } else { b };
        m[(out, b)] = cx(1.0, 0.0);
    }
    m
}

pub fn gate_unitary(n: usize, g: &CliffordGate) -> M {
    match *g {
        CliffordGate::H(q) => embed1(n, q, &hadamard()),
        CliffordGate::S(q) => embed1(n, q, &phase_s()),
        CliffordGate::Cx(c, t) => cnot(n, c, t),
    }
}

pub fn gates_unitary(n: usize, gates: &[CliffordGate]) -> M {
    gates.iter().fold(M::identity(1 << n, 1 << n), |acc, g| gate_unitary(n, g) * acc)
}

pub fn basis(n: usize, index: usize) -> V {
    let mut v = V::zeros(1 << n);
    v[index] = cx(1.0, 0.0);
    v
}

pub fn plus(n: usize) -> V {
    V::from_element(1 << n, cx(2f64.powf(-(n as f64) / 2.0), 0.0))
}

pub fn inner(a: &V, b: &V) -> Complex64 {
    a.dotc(b)
}

/// Reduced density matrix on `keep`, with `keep[0]` as the least significant bit.
pub fn reduce(n: usize, v: &[Complex64], keep: &[usize]) -> M {
    let k = keep.len();
    let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let mut rho = M::zeros(1 << k, 1 << k);
    for r in 0..(1usize << rest.len()) {
        let mut base = 0usize;
        for (j, &q) in rest.iter().enumerate() {
            base |= (r >> j & 1) << q;
        }
        let idx = |a: usize| keep.iter().enumerate().fold(base, |acc, (j, &q)| acc | ((a >> j & 1) << q));
        for a in 0..(1 << k) {
            for b in 0..(1 << k) {
                rho[(a, b)] += v[idx(a)] * v[idx(b)].conj();
            }
        }
    }
    rho
}

pub fn eigvals(m: &M) -> Vec<f64> {
    let h = (m + m.adjoint()) * cx(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().collect()
}

pub fn entropy(m: &M) -> f64 {
    eigvals(m).into_iter().filter(|&x| x > 1e-12).map(|x| -x * x.log2()).sum()
}

pub fn mutual_info(n: usize, v: &[Complex64], a: &[usize], b: &[usize]) -> f64 {
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    entropy(&reduce(n, v, a)) + entropy(&reduce(n, v, b)) - entropy(&reduce(n, v, &ab))
}

pub fn psd_sqrt(m: &M) -> M {
    let h = (m + m.adjoint()) * cx(0.5, 0.0);
    let e = h.symmetric_eigen();
    let d = e.eigenvalues.map(|x| cx(x.max(0.0).sqrt(), 0.0));
    &e.eigenvectors * M::from_diagonal(&d) * e.eigenvectors.adjoint()
}

/// Uhlmann fidelity `Tr √(√ρ σ √ρ)`; round-off eigenvalues are dropped before the root.
pub fn fidelity(rho: &M, sigma: &M) -> f64 {
    let s = psd_sqrt(rho);
    eigvals(&(&s * sigma * &s)).into_iter().filter(|&x| x > 1e-13).map(f64::sqrt).sum()
}

pub fn from_lib(v: &magiclab::statevec::StateVector) -> V {
    V::from_column_slice(v.amplitudes())
}

/// Embeds a `2^k × 2^k` operator on ordered `qubits` (first listed is the low local bit).
pub fn embed(n: usize, qubits: &[usize], op: &M) -> M {
    let d = 1usize << n;
    let mut m = M::zeros(d, d);
    let local = |b: usize| qubits.iter().enumerate().fold(0usize, |acc, (j, &q)| acc | ((b >> q & 1) << j));
    let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
    for col in 0..d {
        for row in 0..d {
            if row & !mask == col & !mask {
                m[(row, col)] = op[(local(row), local(col))];
            }
        }
    }
    m
}

pub fn circuit_unitary(c: &magiclab::statevec::LayeredCircuit) -> M {
    let n = c.num_qubits();
    let mut u = M::identity(1 << n, 1 << n);
    for layer in c.layers() {
        for g in layer {
            u = embed(n, &g.qubits, &g.matrix) * u;
        }
    }
    u
}

pub const PHI: f64 = 1.618_033_988_749_895;

/// Float Fibonacci `S`; the doubled theory is `Fib ⊗ conj(Fib)`.
pub fn fib_s() -> M {
    let p = (2.0 + PHI).powf(-0.5);
    M::from_row_slice(2, 2, &[cx(p, 0.0), cx(p * PHI, 0.0), cx(p * PHI, 0.0), cx(-p, 0.0)])
}

pub fn fib_t() -> M {
    let w = Complex64::from_polar(1.0, 4.0 * std::f64::consts::PI / 5.0);
    M::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), w])
}

/// `m ⊗ conj(m)` in label order `(1, τ, τ̄, ττ̄)`: the plain factor is the low index.
pub fn doubled(m: &M) -> M {
    kron(&m.map(|z| z.conj()), m)
}

/// Minimum over all patterns of the off-pattern Frobenius norm.
pub fn brute_monomial_distance(m: &M) -> f64 {
    let k = m.nrows();
    itertools::Itertools::permutations(0..k, k)
        .map(|p| {
            let mut off = 0.0;
            for i in 0..k {
                for j in 0..k {
                    if p[i] != j {
                        off += m[(i, j)].norm_sqr();
                    }
                }
            }
            off.sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}
