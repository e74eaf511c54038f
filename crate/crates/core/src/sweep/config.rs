use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::backend::{BackendKind, NoiseMode, NoiseSpec};
use crate::circuit::FloquetParams;
use crate::error::{Error, Result};
use crate::lattice::{build_chain, build_heavy_hex, CouplingMapFile, LatticeSpec};
use crate::observables::DEFAULT_BOOTSTRAP;
use crate::statevector::MemoryBudget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Chain,
    Heavyhex,
    CouplingMap,
}

/// Recording times. An explicit `times` list wins; otherwise every cycle up
/// to `dense_until`, then `per_decade` log-spaced points up to `t_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    #[serde(default)]
    pub times: Option<Vec<u64>>,
    #[serde(default = "default_t_max")]
    pub t_max: u64,
    #[serde(default = "default_dense_until")]
    pub dense_until: u64,
    #[serde(default = "default_per_decade")]
    pub per_decade: u32,
}

fn default_t_max() -> u64 {
    100
}

fn default_dense_until() -> u64 {
    100
}

fn default_per_decade() -> u32 {
    20
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { times: None, t_max: default_t_max(), dense_until: default_dense_until(), per_decade: default_per_decade() }
    }
}

impl Schedule {
    pub fn every_cycle(t_max: u64) -> Self {
        Schedule { t_max, dense_until: t_max, ..Schedule::default() }
    }

    /// Strictly increasing recording times, always starting at `t = 0`.
    pub fn times(&self) -> Result<Vec<u64>> {
        if let Some(times) = &self.times {
            if times.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config("schedule times must be strictly increasing".into()));
            }
            let mut out = times.clone();
            if out.first() != Some(&0) {
                out.insert(0, 0);
            }
            return Ok(out);
        }
        if self.per_decade == 0 {
            return Err(Error::Config("schedule per_decade must be positive".into()));
        }
        let dense = self.dense_until.min(self.t_max);
        let mut out: Vec<u64> = (0..=dense).collect();
        let mut k = 1u32;
        loop {
            let next = (dense.max(1) as f64 * 10f64.powf(k as f64 / self.per_decade as f64)).round() as u64;
            k += 1;
            if next > self.t_max {
                break;
            }
            if next > *out.last().unwrap() {
                out.push(next);
            }
        }
        if *out.last().unwrap() < self.t_max {
            out.push(self.t_max);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelKind,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub rows: Option<usize>,
    #[serde(default)]
    pub cols: Option<usize>,
    #[serde(default)]
    pub coupling_map: Option<PathBuf>,
    pub w: Vec<f64>,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default = "default_backend")]
    pub backend: BackendKind,
    #[serde(default = "default_chi")]
    pub chi: usize,
    /// Shots per recorded point; 0 means exact observables.
    #[serde(default)]
    pub shots: usize,
    #[serde(default = "default_noise")]
    pub noise: NoiseMode,
    #[serde(default = "default_trajectories")]
    pub trajectories: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Lifts the default 2^26-amplitude state-vector budget.
    #[serde(default)]
    pub memory_override: bool,
    /// Rejects W below the self-dual point, where RZZ(2J) leaves the hardware window.
    #[serde(default)]
    pub hardware_faithful: bool,
    /// Worker threads; 0 uses all cores.
    #[serde(default)]
    pub threads: usize,
    /// Cycles between checkpoints; 0 disables checkpointing.
    #[serde(default)]
    pub checkpoint_every: u64,
    #[serde(default = "default_bootstrap")]
    pub bootstrap_resamples: usize,
    #[serde(default = "default_true")]
    pub entropy: bool,
    /// Real elapsed time in the MPS diagnostics; off keeps outputs reproducible.
    #[serde(default)]
    pub record_wall_time: bool,
    /// Haar states sampled for the reference QFI in the manifest (N <= 14).
    #[serde(default = "default_haar_samples")]
    pub haar_samples: usize,
}

fn default_backend() -> BackendKind {
    BackendKind::Sv
}

fn default_chi() -> usize {
    256
}

fn default_noise() -> NoiseMode {
    NoiseMode::None
}

fn default_trajectories() -> usize {
    1
}

fn default_output_dir() -> PathBuf {
    std::env::var_os("QP_FLOQUET_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("qp-floquet-out"))
}

fn default_bootstrap() -> usize {
    DEFAULT_BOOTSTRAP
}

fn default_true() -> bool {
    true
}

fn default_haar_samples() -> usize {
    200
}

impl SweepConfig {
    /// Chain of `n` qubits with otherwise default settings.
    pub fn chain(n: usize, w: Vec<f64>) -> Self {
        SweepConfig {
            model: ModelKind::Chain,
            n: Some(n),
            rows: None,
            cols: None,
            coupling_map: None,
            w,
            schedule: Schedule::default(),
            backend: default_backend(),
            chi: default_chi(),
            shots: 0,
            noise: default_noise(),
            trajectories: 1,
            seed: 0,
            output_dir: default_output_dir(),
            memory_override: false,
            hardware_faithful: false,
            threads: 0,
            checkpoint_every: 0,
            bootstrap_resamples: DEFAULT_BOOTSTRAP,
            entropy: true,
            record_wall_time: false,
            haar_samples: default_haar_samples(),
        }
    }

    pub fn heavy_hex(rows: usize, cols: usize, w: Vec<f64>) -> Self {
        SweepConfig { model: ModelKind::Heavyhex, n: None, rows: Some(rows), cols: Some(cols), ..SweepConfig::chain(0, w) }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialization is infallible")
    }

    pub fn memory_budget(&self) -> MemoryBudget {
        if self.memory_override {
            MemoryBudget { max_amplitudes: u128::MAX }
        } else {
            MemoryBudget::default()
        }
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        NoiseSpec { mode: self.noise, trajectories: self.effective_trajectories(), seed: self.seed }
    }

    /// Deterministic noise modes need only one trajectory.
    pub fn effective_trajectories(&self) -> usize {
        if self.noise.is_stochastic() {
            self.trajectories
        } else {
            1
        }
    }

    pub fn lattice(&self) -> Result<LatticeSpec> {
        match self.model {
            ModelKind::Chain => build_chain(self.n.ok_or_else(|| Error::Config("chain model needs n".into()))?),
            ModelKind::Heavyhex => {
                let rows = self.rows.ok_or_else(|| Error::Config("heavyhex model needs rows".into()))?;
                let cols = self.cols.ok_or_else(|| Error::Config("heavyhex model needs cols".into()))?;
                build_heavy_hex(rows, cols)
            }
            ModelKind::CouplingMap => {
                let path = self.coupling_map.as_ref().ok_or_else(|| Error::Config("coupling-map model needs coupling_map".into()))?;
                CouplingMapFile::read(path)?.to_lattice()
            }
        }
    }

    pub fn floquet_params(&self, w: f64) -> Result<FloquetParams> {
        Ok(FloquetParams::new(w)?.hardware_faithful(self.hardware_faithful))
    }

    pub fn validate(&self) -> Result<()> {
        if self.w.is_empty() {
            return Err(Error::Config("W list is empty".into()));
        }
        for &w in &self.w {
            self.floquet_params(w)?.validate()?;
        }
        self.schedule.times()?;
        self.noise.validate()?;
        if self.trajectories == 0 {
            return Err(Error::Config("trajectories must be at least 1".into()));
        }
        if self.backend == BackendKind::Mps {
            if self.model != ModelKind::Chain {
                return Err(Error::Config("the MPS backend supports chains only".into()));
            }
            if self.chi == 0 {
                return Err(Error::Config("chi must be at least 1".into()));
            }
        }
        if self.shots == 1 {
            return Err(Error::Config("sampled observables need at least 2 shots".into()));
        }
        Ok(())
    }

    /// Hash of every setting that affects output bytes.
    pub fn run_id(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        canonical.threads = 0;
        canonical.checkpoint_every = 0;
        let json = serde_json::to_string(&canonical).expect("config serialization is infallible");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_schedule() {
        let s = Schedule { times: None, t_max: 5000, dense_until: 100, per_decade: 10 };
        let t = s.times().unwrap();
        assert_eq!(&t[..3], &[0, 1, 2]);
        assert_eq!(t[100], 100);
        assert_eq!(*t.last().unwrap(), 5000);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!(t.len() < 130);
    }

    #[test]
    fn explicit_schedule_must_increase() {
        let s = Schedule { times: Some(vec![1, 5, 5]), ..Schedule::default() };
        assert!(s.times().is_err());
        let s = Schedule { times: Some(vec![1, 5]), ..Schedule::default() };
        assert_eq!(s.times().unwrap(), vec![0, 1, 5]);
    }

    #[test]
    fn toml_round_trip_and_validation() {
        let text = r#"
            model = "chain"
            n = 8
            w = [1.5, 8.0]
            backend = "mps"
            chi = 64
            noise = { mode = "pauli_trajectory", p1 = 0.001, p2 = 0.01 }
            trajectories = 4
            [schedule]
            t_max = 50
        "#;
        let c = SweepConfig::from_toml(text).unwrap();
        c.validate().unwrap();
        assert_eq!(c.effective_trajectories(), 4);
        assert_eq!(SweepConfig::from_toml(&c.to_toml()).unwrap(), c);
        assert!(SweepConfig::from_toml("model = \"chain\"\nw = [1.0]\nbogus = 3").is_err());

        let mut hw = SweepConfig::chain(6, vec![1.0]);
        hw.hardware_faithful = true;
        assert!(matches!(hw.validate(), Err(Error::AngleWindow { .. })));
    }

    #[test]
    fn run_id_ignores_placement() {
        let a = SweepConfig::chain(6, vec![2.0]);
        let mut b = a.clone();
        b.output_dir = PathBuf::from("/elsewhere");
        b.threads = 3;
        assert_eq!(a.run_id(), b.run_id());
        b.seed = 1;
        assert_ne!(a.run_id(), b.run_id());
    }
}
