//! Backend-independent evolution: the state trait, noise models and the
//! cycle-by-cycle driver that invokes observers at cycle boundaries.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Layer};
use crate::error::{Error, Result};
use crate::gate::{Gate, Pauli};

/// A computational-basis measurement outcome, one bit per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitstring {
    n: usize,
    words: Vec<u64>,
}

impl Bitstring {
    pub fn zeros(n: usize) -> Self {
        Bitstring { n, words: vec![0; n.div_ceil(64)] }
    }

    /// Bits of a basis index; qubit `j` is bit `j`. Requires `n <= 64`.
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n <= 64, "basis index form needs n <= 64");
        let mut b = Bitstring::zeros(n);
        if n > 0 {
            b.words[0] = if n == 64 { index } else { index & ((1u64 << n) - 1) };
        }
        b
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, qubit: usize) -> bool {
        (self.words[qubit / 64] >> (qubit % 64)) & 1 == 1
    }

    pub fn set(&mut self, qubit: usize, value: bool) {
        let mask = 1u64 << (qubit % 64);
        if value {
            self.words[qubit / 64] |= mask;
        } else {
            self.words[qubit / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Eigenvalue of `M = Σ Z_j`: `N - 2·popcount`.
    pub fn magnetization(&self) -> i64 {
        self.n as i64 - 2 * self.count_ones() as i64
    }

    /// Uniformly random bitstring.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut b = Bitstring::zeros(n);
        for w in b.words.iter_mut() {
            *w = rng.random();
        }
        if !n.is_multiple_of(64) {
            let last = b.words.len() - 1;
            b.words[last] &= (1u64 << (n % 64)) - 1;
        }
        b
    }
}

/// Printed with qubit 0 leftmost.
impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            f.write_str(if self.get(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Sv,
    Mps,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Sv => "sv",
            BackendKind::Mps => "mps",
        })
    }
}

/// Operations every simulation backend provides.
pub trait QuantumState: Clone + Send + Sync {
    fn backend(&self) -> BackendKind;

    fn num_qubits(&self) -> usize;

    fn apply_gate(&mut self, gate: &Gate) -> Result<()>;

    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) -> Result<()>;

    /// Applies a layer of gates on disjoint qubits followed by the faults drawn
    /// for it. A fault on a gate's support commutes with the rest of the layer,
    /// so deferring it to the end of the layer is exact.
    fn apply_layer(&mut self, gates: &[Gate], faults: &[(usize, Pauli)]) -> Result<()> {
        for g in gates {
            self.apply_gate(g)?;
        }
        for &(q, p) in faults {
            self.apply_pauli(q, p)?;
        }
        Ok(())
    }

    /// `⟨Z_j⟩` for every qubit.
    fn z_expectations(&self) -> Vec<f64>;

    /// `(⟨M⟩, ⟨M²⟩)` for the total magnetization `M = Σ Z_j`.
    fn magnetization_moments(&self) -> (f64, f64);

    fn sample_bitstrings(&self, shots: usize, rng: &mut ChaCha8Rng) -> Vec<Bitstring>;

    /// Von Neumann entropy (natural log) across the middle cut `N/2`.
    fn half_chain_entropy(&self) -> Result<f64>;

    fn norm_sqr(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum NoiseMode {
    None,
    /// Noiseless evolution; outputs are attenuated by `lambda^layers`.
    GlobalDepolarizing { lambda: f64 },
    /// A uniformly random non-identity Pauli on the support of each gate, with
    /// probability `p1` (one-qubit gates) or `p2` (two-qubit gates).
    PauliTrajectory { p1: f64, p2: f64 },
}

impl NoiseMode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseMode::None => Ok(()),
            NoiseMode::GlobalDepolarizing { lambda } if lambda > 0.0 && lambda <= 1.0 => Ok(()),
            NoiseMode::GlobalDepolarizing { lambda } => {
                Err(Error::InvalidParameter(format!("depolarizing lambda must lie in (0, 1], got {lambda}")))
            }
            NoiseMode::PauliTrajectory { p1, p2 } if (0.0..=1.0).contains(&p1) && (0.0..=1.0).contains(&p2) => Ok(()),
            NoiseMode::PauliTrajectory { p1, p2 } => {
                Err(Error::InvalidParameter(format!("Pauli error rates must lie in [0, 1], got p1 = {p1}, p2 = {p2}")))
            }
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            NoiseMode::None => "none".into(),
            NoiseMode::GlobalDepolarizing { lambda } => format!("global:{lambda}"),
            NoiseMode::PauliTrajectory { p1, p2 } => format!("pauli:{p1}:{p2}"),
        }
    }

    /// Only stochastic trajectories differ from one another.
    pub fn is_stochastic(&self) -> bool {
        matches!(self, NoiseMode::PauliTrajectory { p1, p2 } if *p1 > 0.0 || *p2 > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub mode: NoiseMode,
    pub trajectories: usize,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn noiseless(seed: u64) -> Self {
        NoiseSpec { mode: NoiseMode::None, trajectories: 1, seed }
    }

    pub fn validate(&self) -> Result<()> {
        self.mode.validate()?;
        if self.trajectories == 0 {
            return Err(Error::InvalidParameter("trajectory count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Generator for trajectory `trajectory` of a run seeded with `seed`: one
/// ChaCha8 key per seed, one stream per trajectory.
pub fn trajectory_rng(seed: u64, trajectory: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory);
    rng
}

/// State handed to observers at a cycle boundary.
pub struct Snapshot<'a, S> {
    pub cycle: u64,
    pub layers_applied: u64,
    /// Global depolarizing attenuation `λ^layers` (1 without that noise mode).
    pub attenuation: f64,
    pub state: &'a S,
}

/// Resumable position of an [`Evolution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolutionCursor {
    pub cycles: u64,
    pub layers_applied: u64,
    pub rng_stream: u64,
    pub rng_word_pos: u128,
}

/// Drives one state (one trajectory) through a circuit.
pub struct Evolution<S> {
    state: S,
    noise: NoiseMode,
    rng: ChaCha8Rng,
    cycles: u64,
    layers_applied: u64,
    norm_tolerance: f64,
}

impl<S: QuantumState> Evolution<S> {
    pub fn new(state: S, noise: NoiseMode, seed: u64, trajectory: u64) -> Result<Self> {
        noise.validate()?;
        Ok(Evolution { state, noise, rng: trajectory_rng(seed, trajectory), cycles: 0, layers_applied: 0, norm_tolerance: 1e-8 })
    }

    /// Continues from a checkpointed state and cursor.
    pub fn resume(state: S, noise: NoiseMode, seed: u64, cursor: EvolutionCursor) -> Result<Self> {
        let mut evo = Evolution::new(state, noise, seed, cursor.rng_stream)?;
        evo.rng.set_word_pos(cursor.rng_word_pos);
        evo.cycles = cursor.cycles;
        evo.layers_applied = cursor.layers_applied;
        Ok(evo)
    }

    /// Largest tolerated `|1 - ‖ψ‖²|` at a cycle boundary.
    pub fn with_norm_tolerance(mut self, tol: f64) -> Self {
        self.norm_tolerance = tol;
        self
    }

    pub fn cursor(&self) -> EvolutionCursor {
        EvolutionCursor {
            cycles: self.cycles,
            layers_applied: self.layers_applied,
            rng_stream: self.rng.get_stream(),
            rng_word_pos: self.rng.get_word_pos(),
        }
    }

    pub fn state(&self) -> &S {
        &self.state
    }

    pub fn into_state(self) -> S {
        self.state
    }

    pub fn cycles(&self) -> u64 {
        self.cycles
    }

    pub fn layers_applied(&self) -> u64 {
        self.layers_applied
    }

    pub fn attenuation(&self) -> f64 {
        match self.noise {
            NoiseMode::GlobalDepolarizing { lambda } => lambda.powf(self.layers_applied as f64),
            _ => 1.0,
        }
    }

    pub fn snapshot(&self) -> Snapshot<'_, S> {
        Snapshot { cycle: self.cycles, layers_applied: self.layers_applied, attenuation: self.attenuation(), state: &self.state }
    }

    fn draw_faults(&mut self, gates: &[Gate]) -> Vec<(usize, Pauli)> {
        let NoiseMode::PauliTrajectory { p1, p2 } = self.noise else { return Vec::new() };
        let mut faults = Vec::new();
        for g in gates {
            let qs = g.qubits();
            let p = if qs.len() == 2 { p2 } else { p1 };
            if p == 0.0 || self.rng.random::<f64>() >= p {
                continue;
            }
            if qs.len() == 1 {
                faults.push((qs[0], Pauli::ALL[self.rng.random_range(0..3)]));
            } else {
                // 15 non-identity two-qubit Paulis: k = a + 4b with a, b in {I, X, Y, Z}.
                let k = self.rng.random_range(1..16usize);
                for (q, code) in [(qs[0], k % 4), (qs[1], k / 4)] {
                    if code > 0 {
                        faults.push((q, Pauli::ALL[code - 1]));
                    }
                }
            }
        }
        faults
    }

    pub fn apply_layer(&mut self, layer: &Layer) -> Result<()> {
        let faults = self.draw_faults(&layer.gates);
        self.state.apply_layer(&layer.gates, &faults)?;
        self.layers_applied += 1;
        Ok(())
    }

    fn check_norm(&self) -> Result<()> {
        let drift = (1.0 - self.state.norm_sqr()).abs();
        if !(drift <= self.norm_tolerance) {
            return Err(Error::NumericalInvariant(format!(
                "norm drift {drift:.3e} after cycle {} exceeds {:.1e}",
                self.cycles, self.norm_tolerance
            )));
        }
        Ok(())
    }

    /// Applies `circuit` and calls `observer` after each of its cycles.
    pub fn run<F>(&mut self, circuit: &Circuit, mut observer: F) -> Result<()>
    where
        F: FnMut(&Snapshot<'_, S>) -> Result<()>,
    {
        if circuit.num_qubits != self.state.num_qubits() {
            return Err(Error::QubitCountMismatch { circuit: circuit.num_qubits, state: self.state.num_qubits() });
        }
        let mut start = 0;
        for &end in &circuit.cycle_ends {
            for layer in &circuit.layers[start..end] {
                self.apply_layer(layer)?;
            }
            start = end;
            self.cycles += 1;
            self.check_norm()?;
            observer(&self.snapshot())?;
        }
        for layer in &circuit.layers[start..] {
            self.apply_layer(layer)?;
        }
        Ok(())
    }

    /// Applies `count` repetitions of a one-cycle circuit.
    pub fn run_cycles<F>(&mut self, cycle: &Circuit, count: u64, mut observer: F) -> Result<()>
    where
        F: FnMut(&Snapshot<'_, S>) -> Result<()>,
    {
        for _ in 0..count {
            self.run(cycle, &mut observer)?;
        }
        Ok(())
    }
}

/// Runs one trajectory of `circuit` from `state`.
pub fn run_circuit<S, F>(state: S, circuit: &Circuit, noise: &NoiseSpec, trajectory: u64, observer: F) -> Result<S>
where
    S: QuantumState,
    F: FnMut(&Snapshot<'_, S>) -> Result<()>,
{
    noise.validate()?;
    let mut evo = Evolution::new(state, noise.mode, noise.seed, trajectory)?;
    evo.run(circuit, observer)?;
    Ok(evo.into_state())
}

/// Samples under global depolarization: each shot is replaced by a uniformly
/// random bitstring with probability `1 - attenuation`.
pub fn sample_attenuated<S: QuantumState>(state: &S, shots: usize, attenuation: f64, rng: &mut ChaCha8Rng) -> Vec<Bitstring> {
    let mut samples = state.sample_bitstrings(shots, rng);
    if attenuation < 1.0 {
        for s in samples.iter_mut() {
            if rng.random::<f64>() >= attenuation {
                *s = Bitstring::random(state.num_qubits(), rng);
            }
        }
    }
    samples
}
