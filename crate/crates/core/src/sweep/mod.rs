//! Parameter sweeps over `W` and noise trajectories with CSV/JSON output.
//!
//! Each (W, trajectory) task evolves one state continuously and records at
//! the scheduled cycles into its own file under `tasks/`. Tasks checkpoint
//! their state, RNG position and output offsets, so an interrupted sweep
//! resumes to byte-identical results. Once every task has finished, the
//! per-task files are assembled in task order into `series.csv`,
//! `aggregate.csv`, `mps_diagnostics.jsonl` and `manifest.json`.

mod compare;
mod config;
mod fits;

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use compare::{compare_backends, BackendComparison, CompareConfig, CompareReport};
pub use config::{ModelKind, Schedule, SweepConfig};
pub use fits::{run_fits, FitRecord, FitSpec, LogFitSpec, PowerLawFitSpec};

use crate::backend::{sample_attenuated, trajectory_rng, BackendKind, Evolution, EvolutionCursor, NoiseMode, QuantumState, Snapshot};
use crate::circuit::{build_floquet_cycle, Circuit};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, QpFieldParams};
use crate::mps::{MpsDiagnostics, MpsState};
use crate::observables::{autocorrelation, haar_qfi_baseline, qfi_attenuated, qfi_from_moments, qfi_from_samples, HaarBaseline, InitialPattern, HAAR_MAX_QUBITS};
use crate::statevector::{MemoryBudget, StateVector};

pub const SCHEMA_VERSION: u32 = 1;

pub const SERIES_COLUMNS: [&str; 18] = [
    "run_id",
    "model",
    "N",
    "W",
    "t",
    "trajectory",
    "A",
    "A_err",
    "FQ",
    "FQ_err",
    "FQ_per_qubit",
    "S_half",
    "backend",
    "chi",
    "max_bond",
    "discarded_weight",
    "shots",
    "seed",
];

/// One `series.csv` row; field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub run_id: String,
    pub model: ModelKind,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "W")]
    pub w: f64,
    pub t: u64,
    pub trajectory: usize,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "A_err")]
    pub a_err: f64,
    #[serde(rename = "FQ")]
    pub fq: f64,
    #[serde(rename = "FQ_err")]
    pub fq_err: f64,
    #[serde(rename = "FQ_per_qubit")]
    pub fq_per_qubit: f64,
    #[serde(rename = "S_half")]
    pub s_half: Option<f64>,
    pub backend: BackendKind,
    pub chi: Option<usize>,
    pub max_bond: Option<usize>,
    pub discarded_weight: Option<f64>,
    pub shots: usize,
    pub seed: u64,
}

/// Trajectory-averaged row of `aggregate.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub run_id: String,
    pub model: ModelKind,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "W")]
    pub w: f64,
    pub t: u64,
    pub trajectories: usize,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "A_err")]
    pub a_err: f64,
    #[serde(rename = "FQ")]
    pub fq: f64,
    #[serde(rename = "FQ_err")]
    pub fq_err: f64,
    #[serde(rename = "FQ_per_qubit")]
    pub fq_per_qubit: f64,
    #[serde(rename = "S_half")]
    pub s_half: Option<f64>,
    pub backend: BackendKind,
    pub shots: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
struct DiagnosticLine {
    #[serde(rename = "W")]
    w: f64,
    trajectory: usize,
    #[serde(flatten)]
    record: MpsDiagnostics,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeSummary {
    pub kind: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub edges: usize,
    pub color_counts: BTreeMap<String, usize>,
    pub degenerate_stripes: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub run_id: String,
    pub columns: Vec<String>,
    pub config: SweepConfig,
    pub lattice: LatticeSummary,
    pub tasks: usize,
    pub files: Vec<String>,
    /// Empirical Haar QFI reference (registers up to 14 qubits).
    pub haar: Option<HaarBaseline>,
}

/// Test hook: stop a task right after the given cycle as if interrupted.
#[derive(Debug, Clone, Copy, Default)]
pub struct SweepControl {
    pub interrupt_at: Option<(usize, u64)>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub run_id: String,
    pub output_dir: PathBuf,
    pub series: PathBuf,
    pub aggregate: PathBuf,
    pub manifest: PathBuf,
    pub rows: usize,
}

#[derive(Debug, Clone, Copy)]
struct Task {
    index: usize,
    w_index: usize,
    w: f64,
    trajectory: usize,
}

impl Task {
    fn stem(&self) -> String {
        format!("w{:03}_traj{:04}", self.w_index, self.trajectory)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct TaskCursor {
    evolution: EvolutionCursor,
    rows_bytes: u64,
    diag_bytes: u64,
    next_record: usize,
}

/// Derives an independent 64-bit seed from the run seed and a labelled path.
pub fn derive_seed(seed: u64, tag: &str, parts: &[u64]) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(tag.as_bytes());
    for p in parts {
        h.update(p.to_le_bytes());
    }
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

trait TaskState: QuantumState + Sized {
    fn init(n: usize, config: &SweepConfig) -> Result<Self>;
    fn save(&self, path: &Path) -> Result<()>;
    fn load(path: &Path, config: &SweepConfig) -> Result<Self>;
    fn mps_info(&self) -> Option<(usize, f64)>;
}

impl TaskState for StateVector {
    fn init(n: usize, config: &SweepConfig) -> Result<Self> {
        StateVector::all_up(n, config.memory_budget())
    }

    fn save(&self, path: &Path) -> Result<()> {
        self.write_checkpoint(path)
    }

    fn load(path: &Path, config: &SweepConfig) -> Result<Self> {
        StateVector::read_checkpoint(path, config.memory_budget())
    }

    fn mps_info(&self) -> Option<(usize, f64)> {
        None
    }
}

impl TaskState for MpsState {
    fn init(n: usize, config: &SweepConfig) -> Result<Self> {
        MpsState::all_up(n, config.chi)
    }

    fn save(&self, path: &Path) -> Result<()> {
        self.write_checkpoint(path)
    }

    fn load(path: &Path, _config: &SweepConfig) -> Result<Self> {
        MpsState::read_checkpoint(path)
    }

    fn mps_info(&self) -> Option<(usize, f64)> {
        Some((self.max_bond(), self.discarded_weight()))
    }
}

struct TaskFiles {
    rows: PathBuf,
    diag: PathBuf,
    state: PathBuf,
    cursor: PathBuf,
    done: PathBuf,
}

impl TaskFiles {
    fn new(dir: &Path, task: &Task) -> Self {
        let stem = task.stem();
        TaskFiles {
            rows: dir.join(format!("{stem}.csv")),
            diag: dir.join(format!("{stem}.diag.jsonl")),
            state: dir.join(format!("{stem}.state")),
            cursor: dir.join(format!("{stem}.cursor.json")),
            done: dir.join(format!("{stem}.done")),
        }
    }
}

fn open_append(path: &Path, keep_bytes: Option<u64>) -> Result<BufWriter<File>> {
    let file = match keep_bytes {
        Some(len) => {
            let f = OpenOptions::new().append(true).open(path).map_err(|e| Error::io(path, e))?;
            f.set_len(len).map_err(|e| Error::io(path, e))?;
            f
        }
        None => File::create(path).map_err(|e| Error::io(path, e))?,
    };
    Ok(BufWriter::new(file))
}

fn flushed_len(w: &mut BufWriter<File>, path: &Path) -> Result<u64> {
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(w.get_ref().metadata().map_err(|e| Error::io(path, e))?.len())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

struct Recorder<'a> {
    config: &'a SweepConfig,
    run_id: &'a str,
    task: Task,
    n: usize,
    pattern: InitialPattern,
}

impl Recorder<'_> {
    fn measure<S: TaskState>(&self, snap: &Snapshot<'_, S>) -> Result<SeriesRow> {
        let cfg = self.config;
        let state = snap.state;
        let f = snap.attenuation;
        let n = self.n as f64;
        let (a, a_err, fq, fq_err) = if cfg.shots == 0 {
            let a = f * autocorrelation(&state.z_expectations(), &self.pattern)?;
            let (m1, m2) = state.magnetization_moments();
            let fq = match cfg.noise {
                NoiseMode::GlobalDepolarizing { .. } => qfi_attenuated(self.n, m1, m2, f),
                _ => qfi_from_moments(m1, m2),
            };
            (a, 0.0, fq, 0.0)
        } else {
            let parts = [self.task.w_index as u64, self.task.trajectory as u64, snap.cycle];
            let mut rng = trajectory_rng(derive_seed(cfg.seed, "sample", &parts), 0);
            let samples = sample_attenuated(state, cfg.shots, f, &mut rng);
            let per_shot: Vec<f64> = samples
                .iter()
                .map(|b| (0..self.n).map(|q| if b.get(q) == self.pattern.bits[q] { 1.0 } else { -1.0 }).sum::<f64>() / n)
                .collect();
            let shots = per_shot.len() as f64;
            let mean = per_shot.iter().sum::<f64>() / shots;
            let var = per_shot.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (shots - 1.0);
            let est = qfi_from_samples(&samples, cfg.bootstrap_resamples, derive_seed(cfg.seed, "bootstrap", &parts))?;
            (mean, (var / shots).sqrt(), est.estimate, est.bootstrap_err)
        };
        let s_half = if cfg.entropy { Some(state.half_chain_entropy()?) } else { None };
        let mps = state.mps_info();
        Ok(SeriesRow {
            run_id: self.run_id.to_string(),
            model: cfg.model,
            n: self.n,
            w: self.task.w,
            t: snap.cycle,
            trajectory: self.task.trajectory,
            a,
            a_err,
            fq,
            fq_err,
            fq_per_qubit: fq / n,
            s_half,
            backend: state.backend(),
            chi: mps.map(|_| cfg.chi),
            max_bond: mps.map(|m| m.0),
            discarded_weight: mps.map(|m| m.1),
            shots: cfg.shots,
            seed: cfg.seed,
        })
    }
}

fn write_row(w: &mut BufWriter<File>, row: &SeriesRow, path: &Path) -> Result<()> {
    let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    csv.serialize(row).map_err(|e| Error::parse(path, e))?;
    let bytes = csv.into_inner().map_err(|e| Error::parse(path, e))?;
    w.write_all(&bytes).map_err(|e| Error::io(path, e))
}

#[allow(clippy::too_many_arguments)]
fn run_task<S: TaskState>(
    config: &SweepConfig,
    control: &SweepControl,
    run_id: &str,
    lattice: &LatticeSpec,
    task: Task,
    times: &[u64],
    dir: &Path,
) -> Result<()> {
    let files = TaskFiles::new(dir, &task);
    if files.done.exists() {
        return Ok(());
    }
    let lat = lattice.assign_qp_fields(&QpFieldParams::new(task.w));
    let cycle: Circuit = build_floquet_cycle(&lat, &config.floquet_params(task.w)?)?;
    let noise_seed = derive_seed(config.seed, "noise", &[task.w_index as u64]);
    let is_mps = config.backend == BackendKind::Mps;

    let (mut evo, mut rows, mut diag, mut next) = if files.cursor.exists() {
        let text = fs::read_to_string(&files.cursor).map_err(|e| Error::io(&files.cursor, e))?;
        let cursor: TaskCursor = serde_json::from_str(&text).map_err(|e| Error::parse(&files.cursor, e))?;
        let state = S::load(&files.state, config)?;
        let evo = Evolution::resume(state, config.noise, noise_seed, cursor.evolution)?;
        let rows = open_append(&files.rows, Some(cursor.rows_bytes))?;
        let diag = if is_mps { Some(open_append(&files.diag, Some(cursor.diag_bytes))?) } else { None };
        (evo, rows, diag, cursor.next_record)
    } else {
        let evo = Evolution::new(S::init(lattice.num_qubits, config)?, config.noise, noise_seed, task.trajectory as u64)?;
        let rows = open_append(&files.rows, None)?;
        let diag = if is_mps { Some(open_append(&files.diag, None)?) } else { None };
        (evo, rows, diag, 0)
    };

    let recorder = Recorder { config, run_id, task, n: lattice.num_qubits, pattern: InitialPattern::all_up(lattice.num_qubits) };
    if next < times.len() && times[next] == evo.cycles() {
        write_row(&mut rows, &recorder.measure(&evo.snapshot())?, &files.rows)?;
        next += 1;
    }
    let start = Instant::now();
    let t_max = *times.last().expect("schedule is nonempty");
    while evo.cycles() < t_max {
        evo.run(&cycle, |snap| {
            if let Some(d) = diag.as_mut() {
                let (max_bond, discarded) = snap.state.mps_info().expect("MPS task");
                let line = DiagnosticLine {
                    w: task.w,
                    trajectory: task.trajectory,
                    record: MpsDiagnostics {
                        cycle: snap.cycle,
                        max_bond,
                        discarded_weight_cum: discarded,
                        wall_time: if config.record_wall_time { start.elapsed().as_secs_f64() } else { 0.0 },
                    },
                };
                let json = serde_json::to_string(&line).expect("diagnostic serialization is infallible");
                writeln!(d, "{json}").map_err(|e| Error::io(&files.diag, e))?;
            }
            if next < times.len() && times[next] == snap.cycle {
                write_row(&mut rows, &recorder.measure(snap)?, &files.rows)?;
                next += 1;
            }
            Ok(())
        })?;
        let cycles = evo.cycles();
        let interrupt = control.interrupt_at == Some((task.index, cycles));
        if interrupt || (config.checkpoint_every > 0 && cycles % config.checkpoint_every == 0 && cycles < t_max) {
            let rows_bytes = flushed_len(&mut rows, &files.rows)?;
            let diag_bytes = match diag.as_mut() {
                Some(d) => flushed_len(d, &files.diag)?,
                None => 0,
            };
            evo.state().save(&files.state)?;
            let cursor = TaskCursor { evolution: evo.cursor(), rows_bytes, diag_bytes, next_record: next };
            write_atomic(&files.cursor, serde_json::to_string(&cursor).expect("cursor serialization").as_bytes())?;
            if interrupt {
                return Err(Error::Interrupted { task: task.index, cycle: cycles });
            }
        }
    }
    flushed_len(&mut rows, &files.rows)?;
    if let Some(d) = diag.as_mut() {
        flushed_len(d, &files.diag)?;
    }
    fs::write(&files.done, format!("{next}\n")).map_err(|e| Error::io(&files.done, e))?;
    for p in [&files.state, &files.cursor] {
        if p.exists() {
            fs::remove_file(p).map_err(|e| Error::io(p, e))?;
        }
    }
    Ok(())
}

fn read_rows(path: &Path) -> Result<Vec<SeriesRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_path(path).map_err(|e| Error::parse(path, e))?;
    reader.deserialize().map(|r| r.map_err(|e| Error::parse(path, e))).collect()
}

fn mean_and_sem(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Means over trajectories; single-trajectory errors pass through unchanged.
fn aggregate(rows: &[SeriesRow]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(u64, u64), Vec<&SeriesRow>> = BTreeMap::new();
    let mut w_order: Vec<u64> = Vec::new();
    for r in rows {
        let key = r.w.to_bits();
        if !w_order.contains(&key) {
            w_order.push(key);
        }
        let wi = w_order.iter().position(|&k| k == key).unwrap() as u64;
        groups.entry((wi, r.t)).or_default().push(r);
    }
    groups
        .into_values()
        .map(|g| {
            let first = g[0];
            let col = |f: fn(&SeriesRow) -> f64| g.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let (a, mut a_err) = mean_and_sem(&col(|r| r.a));
            let (fq, mut fq_err) = mean_and_sem(&col(|r| r.fq));
            if g.len() == 1 {
                a_err = first.a_err;
                fq_err = first.fq_err;
            }
            let s_half = g.iter().map(|r| r.s_half).collect::<Option<Vec<f64>>>().map(|s| mean_and_sem(&s).0);
            AggregateRow {
                run_id: first.run_id.clone(),
                model: first.model,
                n: first.n,
                w: first.w,
                t: first.t,
                trajectories: g.len(),
                a,
                a_err,
                fq,
                fq_err,
                fq_per_qubit: fq / first.n as f64,
                s_half,
                backend: first.backend,
                shots: first.shots,
                seed: first.seed,
            }
        })
        .collect()
}

fn summarize(lattice: &LatticeSpec) -> LatticeSummary {
    LatticeSummary {
        kind: format!("{:?}", lattice.kind),
        n: lattice.num_qubits,
        edges: lattice.edges.len(),
        color_counts: lattice.color_classes().into_iter().map(|(c, e)| (c.to_string(), e.len())).collect(),
        degenerate_stripes: lattice.degenerate_stripes,
    }
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    run_sweep_with(config, &SweepControl::default())
}

pub fn run_sweep_with(config: &SweepConfig, control: &SweepControl) -> Result<SweepOutcome> {
    config.validate()?;
    let lattice = config.lattice()?;
    if config.backend == BackendKind::Sv {
        config.memory_budget().check(lattice.num_qubits)?;
    }
    let times = config.schedule.times()?;
    let run_id = config.run_id();
    let out = config.output_dir.clone();
    let task_dir = out.join("tasks");
    fs::create_dir_all(&task_dir).map_err(|e| Error::io(&task_dir, e))?;

    let trajectories = config.effective_trajectories();
    let tasks: Vec<Task> = config
        .w
        .iter()
        .enumerate()
        .flat_map(|(w_index, &w)| (0..trajectories).map(move |trajectory| (w_index, w, trajectory)))
        .enumerate()
        .map(|(index, (w_index, w, trajectory))| Task { index, w_index, w, trajectory })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<()>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&task| match config.backend {
                BackendKind::Sv => run_task::<StateVector>(config, control, &run_id, &lattice, task, &times, &task_dir),
                BackendKind::Mps => run_task::<MpsState>(config, control, &run_id, &lattice, task, &times, &task_dir),
            })
            .collect()
    });
    results.into_iter().collect::<Result<Vec<()>>>()?;

    let series_path = out.join("series.csv");
    let mut series = BufWriter::new(File::create(&series_path).map_err(|e| Error::io(&series_path, e))?);
    writeln!(series, "{}", SERIES_COLUMNS.join(",")).map_err(|e| Error::io(&series_path, e))?;
    let mut all_rows = Vec::new();
    let mut diag_bytes = Vec::new();
    for task in &tasks {
        let files = TaskFiles::new(&task_dir, task);
        let bytes = fs::read(&files.rows).map_err(|e| Error::io(&files.rows, e))?;
        series.write_all(&bytes).map_err(|e| Error::io(&series_path, e))?;
        all_rows.extend(read_rows(&files.rows)?);
        if config.backend == BackendKind::Mps {
            diag_bytes.extend(fs::read(&files.diag).map_err(|e| Error::io(&files.diag, e))?);
        }
    }
    series.flush().map_err(|e| Error::io(&series_path, e))?;

    let aggregate_path = out.join("aggregate.csv");
    let mut agg = csv::Writer::from_path(&aggregate_path).map_err(|e| Error::parse(&aggregate_path, e))?;
    for row in aggregate(&all_rows) {
        agg.serialize(row).map_err(|e| Error::parse(&aggregate_path, e))?;
    }
    agg.flush().map_err(|e| Error::io(&aggregate_path, e))?;

    let mut files = vec!["series.csv".to_string(), "aggregate.csv".to_string()];
    if config.backend == BackendKind::Mps {
        let p = out.join("mps_diagnostics.jsonl");
        fs::write(&p, &diag_bytes).map_err(|e| Error::io(&p, e))?;
        files.push("mps_diagnostics.jsonl".into());
    }

    let haar = if lattice.num_qubits <= HAAR_MAX_QUBITS && config.haar_samples >= 2 {
        Some(haar_qfi_baseline(lattice.num_qubits, config.haar_samples, derive_seed(config.seed, "haar", &[]))?)
    } else {
        None
    };
    let mut canonical = config.clone();
    canonical.output_dir = PathBuf::new();
    canonical.threads = 0;
    canonical.checkpoint_every = 0;
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        run_id: run_id.clone(),
        columns: SERIES_COLUMNS.iter().map(|s| s.to_string()).collect(),
        config: canonical,
        lattice: summarize(&lattice),
        tasks: tasks.len(),
        files,
        haar,
    };
    let manifest_path = out.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serialization is infallible");
    fs::write(&manifest_path, json + "\n").map_err(|e| Error::io(&manifest_path, e))?;

    Ok(SweepOutcome {
        run_id,
        output_dir: out,
        series: series_path,
        aggregate: aggregate_path,
        manifest: manifest_path,
        rows: all_rows.len(),
    })
}

/// Reads a `series.csv` written by [`run_sweep`].
pub fn read_series(path: &Path) -> Result<Vec<SeriesRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, format!("{other:?}")),
    })?;
    reader.deserialize().map(|r| r.map_err(|e| Error::parse(path, e))).collect()
}

/// Memory check helper for callers that want to branch before allocating.
pub fn fits_in_budget(n: usize, budget: MemoryBudget) -> bool {
    budget.check(n).is_ok()
}
