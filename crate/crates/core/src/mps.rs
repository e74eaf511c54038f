//! Matrix-product-state backend for open chains (gate-wise TEBD).
//!
//! The state is kept in mixed canonical form around `center`: sites to the
//! left are left-isometries, sites to the right are right-isometries. Two-site
//! gates act on adjacent sites only; the updated pair is split by SVD and
//! truncated to `chi_max` singular values, dropping values below
//! `cutoff · s_max` as well. Kept values are renormalized to unit norm and the
//! relative discarded weight is accumulated.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::time::Instant;

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::backend::{BackendKind, Bitstring, Evolution, NoiseMode, QuantumState, Snapshot};
use crate::checkpoint::{Reader, Writer};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{gate_unitary, swap_qubit_order, Gate, GateMatrix, Mat2, Mat4, Pauli};
use crate::statevector::entropy_from_singular_values;

const MAGIC: &[u8; 4] = b"QPMP";
const FORMAT_VERSION: u8 = 1;
/// Relative singular-value cutoff applied on top of the bond-dimension cap.
pub const DEFAULT_CUTOFF: f64 = 1e-12;

/// Site tensor `T[a, s, b]` stored row-major with shape `(l, 2, r)`.
#[derive(Debug, Clone, PartialEq)]
struct Tensor {
    l: usize,
    r: usize,
    data: Vec<C64>,
}

impl Tensor {
    fn up() -> Self {
        Tensor { l: 1, r: 1, data: vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)] }
    }

    #[inline]
    fn at(&self, a: usize, s: usize, b: usize) -> C64 {
        self.data[(a * 2 + s) * self.r + b]
    }

    /// `(a s) × b` view.
    fn left_grouped(&self) -> Mat<C64> {
        Mat::from_fn(2 * self.l, self.r, |i, j| self.data[i * self.r + j])
    }

    /// `a × (s b)` view.
    fn right_grouped(&self) -> Mat<C64> {
        Mat::from_fn(self.l, 2 * self.r, |i, j| self.data[i * 2 * self.r + j])
    }

    /// Physical slice `T^s` as an `l × r` matrix.
    fn slice(&self, s: usize) -> Mat<C64> {
        Mat::from_fn(self.l, self.r, |a, b| self.at(a, s, b))
    }

    fn from_left_grouped(m: &Mat<C64>) -> Self {
        let (rows, r) = (m.nrows(), m.ncols());
        Tensor { l: rows / 2, r, data: row_major(m) }
    }

    fn from_right_grouped(m: &Mat<C64>) -> Self {
        let (l, cols) = (m.nrows(), m.ncols());
        Tensor { l, r: cols / 2, data: row_major(m) }
    }

    fn apply_one_site(&mut self, m: &Mat2) {
        for a in 0..self.l {
            for b in 0..self.r {
                let i0 = (a * 2) * self.r + b;
                let i1 = (a * 2 + 1) * self.r + b;
                let (x, y) = (self.data[i0], self.data[i1]);
                self.data[i0] = m[0][0] * x + m[0][1] * y;
                self.data[i1] = m[1][0] * x + m[1][1] * y;
            }
        }
    }
}

fn row_major(m: &Mat<C64>) -> Vec<C64> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push(m[(i, j)]);
        }
    }
    out
}

fn identity(d: usize) -> Mat<C64> {
    Mat::from_fn(d, d, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

fn trace(m: &Mat<C64>) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// Per-cycle diagnostic record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpsDiagnostics {
    pub cycle: u64,
    pub max_bond: usize,
    pub discarded_weight_cum: f64,
    /// Seconds since the start of the run; zero when timing is not recorded.
    pub wall_time: f64,
}

/// Last cycle up to which the cumulative discarded weight stays within `tol`,
/// or `None` if it was exceeded from the first record on.
pub fn convergence_horizon(diagnostics: &[MpsDiagnostics], tol: f64) -> Option<u64> {
    diagnostics.iter().take_while(|d| d.discarded_weight_cum <= tol).last().map(|d| d.cycle)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpsState {
    n: usize,
    chi_max: usize,
    cutoff: f64,
    tensors: Vec<Tensor>,
    /// Normalized Schmidt values of bond `b` (between sites `b` and `b + 1`).
    spectra: Vec<Vec<f64>>,
    center: usize,
    discarded_weight: f64,
}

impl MpsState {
    /// Bond-dimension-1 product state `|0…0⟩`.
    pub fn all_up(n: usize, chi_max: usize) -> Result<Self> {
        MpsState::product(&vec![false; n], chi_max)
    }

    /// Computational-basis product state; `bits[j]` set means qubit `j` is `|1⟩`.
    pub fn product(bits: &[bool], chi_max: usize) -> Result<Self> {
        let n = bits.len();
        if n < 2 {
            return Err(Error::InvalidSize(format!("an MPS needs at least 2 sites, got {n}")));
        }
        if chi_max == 0 {
            return Err(Error::InvalidParameter("bond dimension must be at least 1".into()));
        }
        let tensors = bits
            .iter()
            .map(|&b| {
                let mut t = Tensor::up();
                if b {
                    t.data.swap(0, 1);
                }
                t
            })
            .collect();
        Ok(MpsState {
            n,
            chi_max,
            cutoff: DEFAULT_CUTOFF,
            tensors,
            spectra: vec![vec![1.0]; n - 1],
            center: 0,
            discarded_weight: 0.0,
        })
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn chi_max(&self) -> usize {
        self.chi_max
    }

    pub fn center(&self) -> usize {
        self.center
    }

    /// Right bond dimension of each site except the last.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors[..self.n - 1].iter().map(|t| t.r).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Cumulative relative weight of all truncated singular values.
    pub fn discarded_weight(&self) -> f64 {
        self.discarded_weight
    }

    pub fn schmidt_values(&self, bond: usize) -> Result<&[f64]> {
        self.spectra
            .get(bond)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidParameter(format!("bond {bond} out of range for {} sites", self.n)))
    }

    /// `-Σ λ² ln λ²` across `bond`.
    pub fn bond_entropy(&self, bond: usize) -> Result<f64> {
        Ok(entropy_from_singular_values(self.schmidt_values(bond)?))
    }

    fn qr_right(&mut self, c: usize) {
        let m = self.tensors[c].left_grouped();
        let qr = m.qr();
        let q = qr.compute_thin_Q();
        let r = qr.thin_R().to_owned();
        self.tensors[c] = Tensor::from_left_grouped(&q);
        let next = self.tensors[c + 1].right_grouped();
        self.tensors[c + 1] = Tensor::from_right_grouped(&(&r * &next));
    }

    fn lq_left(&mut self, c: usize) {
        let m = self.tensors[c].right_grouped();
        let adj = m.adjoint().to_owned();
        let qr = adj.qr();
        let q = qr.compute_thin_Q();
        let r = qr.thin_R().to_owned();
        self.tensors[c] = Tensor::from_right_grouped(&q.adjoint().to_owned());
        let prev = self.tensors[c - 1].left_grouped();
        self.tensors[c - 1] = Tensor::from_left_grouped(&(&prev * r.adjoint()));
    }

    /// Moves the orthogonality center by QR sweeps.
    pub fn move_center_to(&mut self, site: usize) {
        assert!(site < self.n);
        while self.center < site {
            self.qr_right(self.center);
            self.center += 1;
        }
        while self.center > site {
            self.lq_left(self.center);
            self.center -= 1;
        }
    }

    fn check_site(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { qubit: q, num_qubits: self.n });
        }
        Ok(())
    }

    pub fn apply_one_site(&mut self, site: usize, m: &Mat2) -> Result<()> {
        self.check_site(site)?;
        self.tensors[site].apply_one_site(m);
        Ok(())
    }

    /// Applies `m` (first index on site `a`) to the adjacent pair `(a, b)`.
    pub fn apply_two_site(&mut self, a: usize, b: usize, m: &Mat4) -> Result<()> {
        self.check_site(a)?;
        self.check_site(b)?;
        if a.abs_diff(b) != 1 {
            return Err(Error::NotAdjacent { a, b });
        }
        let (i, m) = if a < b { (a, *m) } else { (b, swap_qubit_order(m)) };
        let from_right = self.center > i;
        if self.center < i {
            self.move_center_to(i);
        } else if self.center > i + 1 {
            self.move_center_to(i + 1);
        }

        let (l, r) = (self.tensors[i].l, self.tensors[i + 1].r);
        let mut theta = &self.tensors[i].left_grouped() * &self.tensors[i + 1].right_grouped();
        let zero = C64::new(0.0, 0.0);
        let diagonal = (0..4).all(|x| (0..4).all(|y| x == y || m[x][y] == zero));
        for x in 0..l {
            for y in 0..r {
                // theta row = 2x + s1, column = s2·r + y.
                let idx = [(2 * x, y), (2 * x + 1, y), (2 * x, r + y), (2 * x + 1, r + y)];
                if diagonal {
                    for (k, &(p, q)) in idx.iter().enumerate() {
                        theta[(p, q)] *= m[k][k];
                    }
                } else {
                    let v = idx.map(|(p, q)| theta[(p, q)]);
                    for (k, &(p, q)) in idx.iter().enumerate() {
                        theta[(p, q)] = (0..4).map(|c| m[k][c] * v[c]).sum();
                    }
                }
            }
        }

        let svd = theta.thin_svd().map_err(|e| Error::LinearAlgebra(format!("SVD failed: {e:?}")))?;
        let (u, v) = (svd.U(), svd.V());
        let s_diag = svd.S().column_vector();
        let mut order: Vec<usize> = (0..s_diag.nrows()).collect();
        let s: Vec<f64> = (0..s_diag.nrows()).map(|k| s_diag[k].re).collect();
        order.sort_by(|&x, &y| s[y].total_cmp(&s[x]));
        let total: f64 = s.iter().map(|x| x * x).sum();
        let s_max = s[order[0]];
        let keep = order
            .iter()
            .take(self.chi_max)
            .take_while(|&&k| s[k] > self.cutoff * s_max)
            .count()
            .max(1);
        let kept_weight: f64 = order[..keep].iter().map(|&k| s[k] * s[k]).sum();
        if total > 0.0 {
            self.discarded_weight += ((total - kept_weight) / total).max(0.0);
        }
        let norm = kept_weight.sqrt();
        let kept: Vec<f64> = order[..keep].iter().map(|&k| s[k] / norm).collect();

        let left = if from_right {
            Mat::from_fn(2 * l, keep, |p, c| u[(p, order[c])] * kept[c])
        } else {
            Mat::from_fn(2 * l, keep, |p, c| u[(p, order[c])])
        };
        let right = if from_right {
            Mat::from_fn(keep, 2 * r, |c, q| v[(q, order[c])].conj())
        } else {
            Mat::from_fn(keep, 2 * r, |c, q| v[(q, order[c])].conj() * kept[c])
        };
        self.tensors[i] = Tensor::from_left_grouped(&left);
        self.tensors[i + 1] = Tensor::from_right_grouped(&right);
        self.spectra[i] = kept;
        self.center = if from_right { i } else { i + 1 };
        Ok(())
    }

    /// `Σ_s w_s (T^s)† L T^s`.
    fn transfer_left(t: &Tensor, env: &Mat<C64>, w: [f64; 2]) -> Mat<C64> {
        let mut out = Mat::<C64>::zeros(t.r, t.r);
        for (s, &ws) in w.iter().enumerate() {
            if ws == 0.0 {
                continue;
            }
            let ts = t.slice(s);
            let term = ts.adjoint() * (env * &ts);
            out += term * faer::Scale(C64::new(ws, 0.0));
        }
        out
    }

    /// `Σ_s w_s T^s R (T^s)†`.
    fn transfer_right(t: &Tensor, env: &Mat<C64>, w: [f64; 2]) -> Mat<C64> {
        let mut out = Mat::<C64>::zeros(t.l, t.l);
        for (s, &ws) in w.iter().enumerate() {
            if ws == 0.0 {
                continue;
            }
            let ts = t.slice(s);
            let term = (&ts * env) * ts.adjoint();
            out += term * faer::Scale(C64::new(ws, 0.0));
        }
        out
    }

    pub fn expect_z(&self, site: usize) -> Result<f64> {
        self.check_site(site)?;
        Ok(self.z_expectations()[site])
    }

    /// Converts to a dense vector; only sensible for small `n`.
    pub fn to_dense(&self) -> Vec<C64> {
        let mut acc: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0)]];
        // acc[k][a]: amplitude prefix for basis prefix k ending on bond index a.
        for (site, t) in self.tensors.iter().enumerate() {
            let mut next = vec![vec![C64::new(0.0, 0.0); t.r]; acc.len() * 2];
            for (k, prefix) in acc.iter().enumerate() {
                for s in 0..2 {
                    let row = &mut next[k | (s << site)];
                    for (a, &pa) in prefix.iter().enumerate() {
                        for (b, v) in row.iter_mut().enumerate() {
                            *v += pa * t.at(a, s, b);
                        }
                    }
                }
            }
            acc = next;
        }
        acc.into_iter().map(|v| v[0]).collect()
    }

    pub fn write_checkpoint(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = Writer::new(BufWriter::new(file));
        w.bytes(MAGIC)?;
        w.bytes(&[FORMAT_VERSION, b'L'])?;
        for v in [self.n, self.chi_max, self.center] {
            w.u64(v as u64)?;
        }
        w.f64(self.cutoff)?;
        w.f64(self.discarded_weight)?;
        for t in &self.tensors {
            w.u64(t.l as u64)?;
            w.u64(t.r as u64)?;
            w.c64s(&t.data)?;
        }
        for s in &self.spectra {
            w.f64s(s)?;
        }
        w.finish()?;
        Ok(())
    }

    pub fn read_checkpoint(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = Reader::new(BufReader::new(file));
        r.expect(MAGIC)?;
        let (version, endian) = (r.u8()?, r.u8()?);
        if version != FORMAT_VERSION || endian != b'L' {
            return Err(Error::Checkpoint(format!("unsupported version {version} / endianness tag {endian}")));
        }
        let n = r.u64()? as usize;
        let chi_max = r.u64()? as usize;
        let center = r.u64()? as usize;
        if n < 2 || center >= n {
            return Err(Error::Checkpoint(format!("inconsistent header: n = {n}, center = {center}")));
        }
        let cutoff = r.f64()?;
        let discarded_weight = r.f64()?;
        let mut tensors = Vec::with_capacity(n);
        for _ in 0..n {
            let l = r.u64()? as usize;
            let rr = r.u64()? as usize;
            let data = r.c64s(l * 2 * rr)?;
            tensors.push(Tensor { l, r: rr, data });
        }
        let spectra = (0..n - 1).map(|_| r.f64s()).collect::<Result<Vec<_>>>()?;
        r.end()?;
        Ok(MpsState { n, chi_max, cutoff, tensors, spectra, center, discarded_weight })
    }
}

impl QuantumState for MpsState {
    fn backend(&self) -> BackendKind {
        BackendKind::Mps
    }

    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        match gate_unitary(gate) {
            GateMatrix::One(m) => self.apply_one_site(gate.qubits()[0], &m),
            GateMatrix::Two(m) => self.apply_two_site(gate.qubits()[0], gate.qubits()[1], &m),
        }
    }

    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) -> Result<()> {
        self.apply_one_site(qubit, &pauli.matrix())
    }

    /// Two-site gates of a layer commute, so they are swept starting from the
    /// end nearer to the current center.
    fn apply_layer(&mut self, gates: &[Gate], faults: &[(usize, Pauli)]) -> Result<()> {
        let (mut two, one): (Vec<&Gate>, Vec<&Gate>) = gates.iter().partition(|g| g.is_two_qubit());
        let pos = |g: &&Gate| g.qubits().iter().copied().min().unwrap_or(0);
        two.sort_by_key(pos);
        if self.center > self.n / 2 {
            two.reverse();
        }
        for g in one.into_iter().chain(two) {
            self.apply_gate(g)?;
        }
        for &(q, p) in faults {
            self.apply_pauli(q, p)?;
        }
        Ok(())
    }

    fn z_expectations(&self) -> Vec<f64> {
        let c = self.center;
        let norm = self.norm_sqr();
        let mut z = vec![0.0; self.n];
        let mut env = identity(self.tensors[c].r);
        for k in (0..=c).rev() {
            let t = &self.tensors[k];
            z[k] = trace(&MpsState::transfer_right(t, &env, [1.0, -1.0])).re / norm;
            env = MpsState::transfer_right(t, &env, [1.0, 1.0]);
        }
        let mut env = identity(self.tensors[c].l);
        for k in c..self.n {
            let t = &self.tensors[k];
            if k > c {
                z[k] = trace(&MpsState::transfer_left(t, &env, [1.0, -1.0])).re / norm;
            }
            env = MpsState::transfer_left(t, &env, [1.0, 1.0]);
        }
        z
    }

    /// Left-to-right sweep of the three MPO channels of `M` and `M²`.
    fn magnetization_moments(&self) -> (f64, f64) {
        let one = identity(1);
        let (mut c0, mut c1, mut c2) = (one.clone(), Mat::<C64>::zeros(1, 1), Mat::<C64>::zeros(1, 1));
        for t in &self.tensors {
            let i0 = MpsState::transfer_left(t, &c0, [1.0, 1.0]);
            let z0 = MpsState::transfer_left(t, &c0, [1.0, -1.0]);
            let i1 = MpsState::transfer_left(t, &c1, [1.0, 1.0]);
            let z1 = MpsState::transfer_left(t, &c1, [1.0, -1.0]);
            let i2 = MpsState::transfer_left(t, &c2, [1.0, 1.0]);
            c2 = i2 + z1;
            c1 = i1 + z0;
            c0 = i0;
        }
        let norm = c0[(0, 0)].re;
        let m1 = c1[(0, 0)].re / norm;
        let pairs = c2[(0, 0)].re / norm;
        (m1, self.n as f64 + 2.0 * pairs)
    }

    /// Sequential sampling from a copy with the center moved to site 0.
    fn sample_bitstrings(&self, shots: usize, rng: &mut ChaCha8Rng) -> Vec<Bitstring> {
        let mut work = self.clone();
        work.move_center_to(0);
        let slices: Vec<[Mat<C64>; 2]> = work.tensors.iter().map(|t| [t.slice(0), t.slice(1)]).collect();
        (0..shots)
            .map(|_| {
                let mut bits = Bitstring::zeros(self.n);
                let mut v = Mat::<C64>::from_fn(1, 1, |_, _| C64::new(1.0, 0.0));
                for (site, sl) in slices.iter().enumerate() {
                    let w0 = &v * &sl[0];
                    let w1 = &v * &sl[1];
                    let p0 = w0.norm_l2().powi(2);
                    let p1 = w1.norm_l2().powi(2);
                    let one = rng.random::<f64>() * (p0 + p1) >= p0;
                    bits.set(site, one);
                    let (w, p) = if one { (w1, p1) } else { (w0, p0) };
                    v = w * faer::Scale(C64::new(1.0 / p.sqrt(), 0.0));
                }
                bits
            })
            .collect()
    }

    fn half_chain_entropy(&self) -> Result<f64> {
        if self.n < 2 {
            return Ok(0.0);
        }
        self.bond_entropy(self.n / 2 - 1)
    }

    fn norm_sqr(&self) -> f64 {
        self.tensors[self.center].data.iter().map(C64::norm_sqr).sum()
    }
}

/// Noiseless run recording per-cycle diagnostics alongside the observer.
pub fn mps_run_circuit<F>(
    state: MpsState,
    circuit: &Circuit,
    record_wall_time: bool,
    mut observer: F,
) -> Result<(MpsState, Vec<MpsDiagnostics>)>
where
    F: FnMut(&Snapshot<'_, MpsState>) -> Result<()>,
{
    let start = Instant::now();
    let mut diagnostics = Vec::new();
    let mut evo = Evolution::new(state, NoiseMode::None, 0, 0)?;
    evo.run(circuit, |snap| {
        diagnostics.push(MpsDiagnostics {
            cycle: snap.cycle,
            max_bond: snap.state.max_bond(),
            discarded_weight_cum: snap.state.discarded_weight(),
            wall_time: if record_wall_time { start.elapsed().as_secs_f64() } else { 0.0 },
        });
        observer(snap)
    })?;
    Ok((evo.into_state(), diagnostics))
}
