//! Dense state-vector backend.
//!
//! Amplitudes are little-endian: qubit `j` is bit `j` of the basis index.
//! Kernels go parallel above 2^16 amplitudes; every reduction sums fixed-size
//! chunks in index order, so results do not depend on the thread count.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::backend::{BackendKind, Bitstring, QuantumState};
use crate::checkpoint::{Reader, Writer};
use crate::error::{Error, Result};
use crate::gate::{gate_unitary, Gate, GateMatrix, Mat2, Mat4, Pauli};

const CHUNK: usize = 1 << 14;
const PARALLEL_MIN_LEN: usize = 1 << 16;
const MAGIC: &[u8; 4] = b"QPSV";
const FORMAT_VERSION: u8 = 1;

/// Upper bound on the number of amplitudes a state may allocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget {
    pub max_amplitudes: u128,
}

impl Default for MemoryBudget {
    /// 2^26 amplitudes (1 GiB).
    fn default() -> Self {
        MemoryBudget { max_amplitudes: 1 << 26 }
    }
}

impl MemoryBudget {
    pub fn qubits(n: u32) -> Self {
        MemoryBudget { max_amplitudes: 1u128 << n.min(127) }
    }

    pub fn required_bytes(n: usize) -> u128 {
        16u128.saturating_mul(1u128.checked_shl(n as u32).unwrap_or(u128::MAX))
    }

    pub fn check(&self, n: usize) -> Result<()> {
        let required = MemoryBudget::required_bytes(n);
        let limit = self.max_amplitudes.saturating_mul(16);
        if n >= usize::BITS as usize || required > limit {
            return Err(Error::Capacity { required_bytes: required, limit_bytes: limit });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn all_up(n: usize, budget: MemoryBudget) -> Result<Self> {
        StateVector::basis(n, 0, budget)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize, budget: MemoryBudget) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("a state needs at least one qubit".into()));
        }
        budget.check(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::InvalidParameter(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidSize(format!("amplitude count {dim} is not a power of two >= 2")));
        }
        Ok(StateVector { n: dim.trailing_zeros() as usize, amps })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { qubit: q, num_qubits: self.n });
        }
        Ok(())
    }

    fn multiply_phases<F: Fn(usize) -> C64 + Sync>(&mut self, phase: F) {
        let kernel = |(c, chunk): (usize, &mut [C64])| {
            for (i, a) in chunk.iter_mut().enumerate() {
                *a *= phase(c * CHUNK + i);
            }
        };
        if self.amps.len() < PARALLEL_MIN_LEN {
            self.amps.chunks_mut(CHUNK).enumerate().for_each(kernel);
        } else {
            self.amps.par_chunks_mut(CHUNK).enumerate().for_each(kernel);
        }
    }

    fn apply_one_qubit(&mut self, q: usize, m: &Mat2) {
        if m[0][1] == C64::new(0.0, 0.0) && m[1][0] == C64::new(0.0, 0.0) {
            let d = [m[0][0], m[1][1]];
            self.multiply_phases(|k| d[(k >> q) & 1]);
            return;
        }
        let s = 1usize << q;
        let m = *m;
        let mix = move |lo: &mut [C64], hi: &mut [C64]| {
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m[0][0] * x + m[0][1] * y;
                *b = m[1][0] * x + m[1][1] * y;
            }
        };
        let blocks = move |chunk: &mut [C64]| {
            for pair in chunk.chunks_exact_mut(2 * s) {
                let (lo, hi) = pair.split_at_mut(s);
                mix(lo, hi);
            }
        };
        if self.amps.len() < PARALLEL_MIN_LEN {
            blocks(&mut self.amps);
        } else if 2 * s <= CHUNK {
            self.amps.par_chunks_mut(CHUNK).for_each(blocks);
        } else {
            self.amps.par_chunks_mut(2 * s).for_each(|pair| {
                let (lo, hi) = pair.split_at_mut(s);
                lo.par_chunks_mut(CHUNK).zip(hi.par_chunks_mut(CHUNK)).for_each(|(l, h)| mix(l, h));
            });
        }
    }

    /// Two-qubit gates in this gate set are diagonal; others go through a
    /// general four-amplitude update.
    fn apply_two_qubit(&mut self, a: usize, b: usize, m: &Mat4) {
        let zero = C64::new(0.0, 0.0);
        let diagonal = (0..4).all(|i| (0..4).all(|j| i == j || m[i][j] == zero));
        if diagonal {
            let d = [m[0][0], m[1][1], m[2][2], m[3][3]];
            self.multiply_phases(|k| d[((k >> a) & 1) | (((k >> b) & 1) << 1)]);
            return;
        }
        let (ma, mb) = (1usize << a, 1usize << b);
        for k in 0..self.amps.len() {
            if k & ma != 0 || k & mb != 0 {
                continue;
            }
            let idx = [k, k | ma, k | mb, k | ma | mb];
            let v = idx.map(|i| self.amps[i]);
            for (r, &i) in idx.iter().enumerate() {
                self.amps[i] = (0..4).map(|c| m[r][c] * v[c]).sum();
            }
        }
    }

    /// Per-chunk partial results in index order.
    fn chunk_map<T: Send, F: Fn(usize, &[C64]) -> T + Sync>(&self, f: F) -> Vec<T> {
        if self.amps.len() < PARALLEL_MIN_LEN {
            self.amps.chunks(CHUNK).enumerate().map(|(c, ch)| f(c * CHUNK, ch)).collect()
        } else {
            self.amps.par_chunks(CHUNK).enumerate().map(|(c, ch)| f(c * CHUNK, ch)).collect()
        }
    }

    pub fn expect_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let parts = self.chunk_map(|offset, ch| {
            ch.iter()
                .enumerate()
                .map(|(i, a)| if ((offset + i) >> qubit) & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
                .sum::<f64>()
        });
        Ok(parts.into_iter().sum())
    }

    /// Full `⟨Z_i Z_j⟩` matrix; `O(N² 2^N)`.
    pub fn zz_correlators(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        let parts = self.chunk_map(|offset, ch| {
            let mut acc = vec![0.0; n * n];
            for (i, a) in ch.iter().enumerate() {
                let k = offset + i;
                let p = a.norm_sqr();
                for x in 0..n {
                    for y in 0..n {
                        let parity = ((k >> x) ^ (k >> y)) & 1;
                        acc[x * n + y] += if parity == 0 { p } else { -p };
                    }
                }
            }
            acc
        });
        let mut total = vec![0.0; n * n];
        for part in parts {
            total.iter_mut().zip(part).for_each(|(t, v)| *t += v);
        }
        total.chunks(n).map(<[f64]>::to_vec).collect()
    }

    /// Von Neumann entropy of qubits `[0, cut)`.
    pub fn half_cut_entropy(&self, cut: usize) -> Result<f64> {
        if cut == 0 || cut >= self.n {
            return Err(Error::InvalidParameter(format!("cut must lie in [1, {}), got {cut}", self.n)));
        }
        let rows = 1usize << cut;
        let cols = 1usize << (self.n - cut);
        // Column-major reshape: row = low bits, column = high bits.
        let m = Mat::<C64>::from_fn(rows, cols, |i, j| self.amps[i + j * rows]);
        let s = m.singular_values().map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
        Ok(entropy_from_singular_values(&s))
    }

    pub fn write_checkpoint(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = Writer::new(BufWriter::new(file));
        w.bytes(MAGIC)?;
        w.bytes(&[FORMAT_VERSION, b'L'])?;
        w.u64(self.n as u64)?;
        w.c64s(&self.amps)?;
        w.finish()?;
        Ok(())
    }

    pub fn read_checkpoint(path: &Path, budget: MemoryBudget) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = Reader::new(BufReader::new(file));
        r.expect(MAGIC)?;
        let version = r.u8()?;
        let endian = r.u8()?;
        if version != FORMAT_VERSION || endian != b'L' {
            return Err(Error::Checkpoint(format!("unsupported version {version} / endianness tag {endian}")));
        }
        let n = r.u64()? as usize;
        budget.check(n)?;
        let amps = r.c64s(1usize << n)?;
        r.end()?;
        Ok(StateVector { n, amps })
    }
}

/// `-Σ p ln p` over normalized squared singular values.
pub fn entropy_from_singular_values(s: &[f64]) -> f64 {
    let total: f64 = s.iter().map(|x| x * x).sum();
    if total <= 0.0 {
        return 0.0;
    }
    s.iter()
        .map(|x| x * x / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum::<f64>()
        .max(0.0)
}

impl QuantumState for StateVector {
    fn backend(&self) -> BackendKind {
        BackendKind::Sv
    }

    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        for &q in gate.qubits() {
            self.check_qubit(q)?;
        }
        match gate_unitary(gate) {
            GateMatrix::One(m) => self.apply_one_qubit(gate.qubits()[0], &m),
            GateMatrix::Two(m) => self.apply_two_qubit(gate.qubits()[0], gate.qubits()[1], &m),
        }
        Ok(())
    }

    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) -> Result<()> {
        self.check_qubit(qubit)?;
        self.apply_one_qubit(qubit, &pauli.matrix());
        Ok(())
    }

    fn z_expectations(&self) -> Vec<f64> {
        let n = self.n;
        let parts = self.chunk_map(|offset, ch| {
            let mut ones = vec![0.0; n];
            let mut total = 0.0;
            for (i, a) in ch.iter().enumerate() {
                let k = offset + i;
                let p = a.norm_sqr();
                total += p;
                for (q, o) in ones.iter_mut().enumerate() {
                    if (k >> q) & 1 == 1 {
                        *o += p;
                    }
                }
            }
            (total, ones)
        });
        let mut total = 0.0;
        let mut ones = vec![0.0; n];
        for (t, o) in parts {
            total += t;
            ones.iter_mut().zip(o).for_each(|(x, v)| *x += v);
        }
        ones.into_iter().map(|o| total - 2.0 * o).collect()
    }

    fn magnetization_moments(&self) -> (f64, f64) {
        let n = self.n as i64;
        let parts = self.chunk_map(|offset, ch| {
            ch.iter().enumerate().fold((0.0, 0.0), |(m1, m2), (i, a)| {
                let m = (n - 2 * (offset + i).count_ones() as i64) as f64;
                let p = a.norm_sqr();
                (m1 + p * m, m2 + p * m * m)
            })
        });
        parts.into_iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y))
    }

    /// Sorts the uniform draws once and walks the cumulative distribution in a
    /// single pass; outcomes are returned in draw order.
    fn sample_bitstrings(&self, shots: usize, rng: &mut ChaCha8Rng) -> Vec<Bitstring> {
        let total: f64 = self.norm_sqr();
        let mut draws: Vec<(f64, usize)> = (0..shots).map(|i| (rng.random::<f64>() * total, i)).collect();
        draws.sort_by(|a, b| a.0.total_cmp(&b.0));
        let last_nonzero = self.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0);
        let mut out = vec![0usize; shots];
        let mut cdf = 0.0;
        let mut k = 0usize;
        for (u, slot) in draws {
            while k < last_nonzero && cdf + self.amps[k].norm_sqr() <= u {
                cdf += self.amps[k].norm_sqr();
                k += 1;
            }
            out[slot] = k;
        }
        out.into_iter().map(|k| Bitstring::from_index(self.n, k as u64)).collect()
    }

    fn half_chain_entropy(&self) -> Result<f64> {
        if self.n < 2 {
            return Ok(0.0);
        }
        self.half_cut_entropy(self.n / 2)
    }

    fn norm_sqr(&self) -> f64 {
        self.chunk_map(|_, ch| ch.iter().map(C64::norm_sqr).sum::<f64>()).into_iter().sum()
    }
}
