//! Dense reference implementations kept independent of the library kernels:
//! gates are embedded by explicit Kronecker products of their Pauli-basis
//! expansion, and exponentials come from Taylor scaling and squaring.
#![allow(dead_code)]

use faer::Mat;
use num_complex::Complex64 as C64;
use qp_floquet::circuit::Circuit;
use qp_floquet::gate::{gate_unitary, Gate, GateMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

pub type Dense = Vec<Vec<C64>>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> Dense {
    (0..d).map(|i| (0..d).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()).collect()
}

pub fn paulis() -> [Dense; 4] {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    [vec![vec![o, z], vec![z, o]], vec![vec![z, o], vec![o, z]], vec![vec![z, -i], vec![i, z]], vec![vec![o, z], vec![z, -o]]]
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (m, n) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); m * n]; m * n];
    for i in 0..m {
        for j in 0..m {
            for k in 0..n {
                for l in 0..n {
                    out[i * n + k][j * n + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// `op_{N-1} ⊗ … ⊗ op_0`, so qubit `j` is bit `j` of the basis index.
pub fn kron_chain(ops: &[Dense]) -> Dense {
    let mut acc = vec![vec![c(1.0, 0.0)]];
    for op in ops.iter().rev() {
        acc = kron(&acc, op);
    }
    acc
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn add_scaled(a: &mut Dense, b: &Dense, s: C64) {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (x, y) in ra.iter_mut().zip(rb) {
            *x += s * y;
        }
    }
}

pub fn matvec(a: &Dense, v: &[C64]) -> Vec<C64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Full `2^n`-dimensional matrix of `gate`, via Kronecker products of the
/// gate's expansion in Pauli products.
pub fn embed(gate: &Gate, n: usize) -> Dense {
    let p = paulis();
    let id = identity(2);
    let dim = 1usize << n;
    let mut full = vec![vec![c(0.0, 0.0); dim]; dim];
    match gate_unitary(gate) {
        GateMatrix::One(m) => {
            let q = gate.qubits()[0];
            let mut ops = vec![id.clone(); n];
            ops[q] = m.iter().map(|r| r.to_vec()).collect();
            full = kron_chain(&ops);
        }
        GateMatrix::Two(m) => {
            let (a, b) = (gate.qubits()[0], gate.qubits()[1]);
            for pa in &p {
                for pb in &p {
                    // Coefficient tr((P_a ⊗ P_b)† M) / 4 in the gate's own
                    // basis, index = bit(first) + 2·bit(second).
                    let mut coeff = c(0.0, 0.0);
                    for r in 0..4 {
                        for col in 0..4 {
                            let pr = pa[r & 1][col & 1] * pb[r >> 1][col >> 1];
                            coeff += pr.conj() * m[r][col];
                        }
                    }
                    coeff /= 4.0;
                    if coeff.norm() < 1e-15 {
                        continue;
                    }
                    let mut ops = vec![id.clone(); n];
                    ops[a] = pa.clone();
                    ops[b] = pb.clone();
                    add_scaled(&mut full, &kron_chain(&ops), coeff);
                }
            }
        }
    }
    full
}

/// Product of all gate matrices of `circuit` (later gates on the left).
pub fn circuit_unitary(circuit: &Circuit) -> Dense {
    let n = circuit.num_qubits;
    let mut u = identity(1 << n);
    for g in circuit.gates() {
        u = matmul(&embed(g, n), &u);
    }
    u
}

/// Evolves `psi` gate by gate with embedded dense matrices.
pub fn evolve_dense(circuit: &Circuit, psi: &[C64]) -> Vec<C64> {
    let n = circuit.num_qubits;
    let mut v = psi.to_vec();
    for g in circuit.gates() {
        v = matvec(&embed(g, n), &v);
    }
    v
}

pub fn basis_state(n: usize, index: usize) -> Vec<C64> {
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[index] = c(1.0, 0.0);
    v
}

fn one_norm(a: &Dense) -> f64 {
    (0..a.len()).map(|j| a.iter().map(|r| r[j].norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(A)` by scaling to norm < 1/2, an 18-term Taylor series and squaring.
pub fn expm(a: &Dense) -> Dense {
    let norm = one_norm(a);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = c(0.5f64.powi(s), 0.0);
    let scaled: Dense = a.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
    let mut result = identity(a.len());
    let mut term = identity(a.len());
    for k in 1..=18 {
        term = matmul(&term, &scaled);
        let inv = c(1.0 / k as f64, 0.0);
        term.iter_mut().for_each(|r| r.iter_mut().for_each(|x| *x *= inv));
        add_scaled(&mut result, &term, c(1.0, 0.0));
    }
    for _ in 0..s {
        result = matmul(&result, &result);
    }
    result
}

/// `min_φ ‖U - e^{iφ} V‖₂`, with φ from the phase of `tr(V† U)`.
pub fn phase_aligned_distance(u: &Dense, v: &Dense) -> f64 {
    let n = u.len();
    let mut tr = c(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            tr += v[k][i].conj() * u[k][i];
        }
    }
    let phase = if tr.norm() > 0.0 { tr / tr.norm() } else { c(1.0, 0.0) };
    let diff = Mat::<C64>::from_fn(n, n, |i, j| u[i][j] - phase * v[i][j]);
    diff.singular_values().expect("svd").into_iter().fold(0.0, f64::max)
}

/// Haar-random pure state as a normalized complex Gaussian vector.
pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..1usize << n).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// `⟨Z_i⟩` by explicit projector sums.
pub fn z_dense(psi: &[C64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|q| psi.iter().enumerate().map(|(k, a)| if (k >> q) & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() }).sum())
        .collect()
}

/// Eq.-style double sum `4 Σ_{ij} (⟨Z_iZ_j⟩ - ⟨Z_i⟩⟨Z_j⟩)`, term by term.
pub fn qfi_double_sum(psi: &[C64], n: usize) -> f64 {
    let z = z_dense(psi, n);
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let zz: f64 = psi
                .iter()
                .enumerate()
                .map(|(k, a)| if ((k >> i) ^ (k >> j)) & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
                .sum();
            total += zz - z[i] * z[j];
        }
    }
    4.0 * total
}

/// Kicked Ising Floquet operator written directly as matrix exponentials:
/// `exp(-i h_x Σ X) · exp(-i J Σ ZZ - i Σ h_j Z_j)` for an open chain.
pub fn floquet_exponential(h: &[f64], j: f64, h_x: f64) -> Dense {
    let n = h.len();
    let p = paulis();
    let id = identity(2);
    let dim = 1usize << n;
    let mut hz = vec![vec![c(0.0, 0.0); dim]; dim];
    for (q, &hq) in h.iter().enumerate() {
        let mut ops = vec![id.clone(); n];
        ops[q] = p[3].clone();
        add_scaled(&mut hz, &kron_chain(&ops), c(0.0, -hq));
    }
    for q in 0..n - 1 {
        let mut ops = vec![id.clone(); n];
        ops[q] = p[3].clone();
        ops[q + 1] = p[3].clone();
        add_scaled(&mut hz, &kron_chain(&ops), c(0.0, -j));
    }
    let mut hx = vec![vec![c(0.0, 0.0); dim]; dim];
    for q in 0..n {
        let mut ops = vec![id.clone(); n];
        ops[q] = p[1].clone();
        add_scaled(&mut hx, &kron_chain(&ops), c(0.0, -h_x));
    }
    matmul(&expm(&hx), &expm(&hz))
}
