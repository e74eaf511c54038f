use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qp_floquet::backend::{BackendKind, NoiseMode};
use qp_floquet::circuit::{build_floquet_cycle, repeat_cycles, transpile_to_clifford_set, FloquetParams};
use qp_floquet::error::{Error, Result};
use qp_floquet::lattice::{build_chain, build_heavy_hex, CouplingMapFile, LatticeSpec, QpFieldParams};
use qp_floquet::statevector::MemoryBudget;
use qp_floquet::sweep::{
    compare_backends, run_fits, run_sweep, CompareConfig, FitSpec, LogFitSpec, ModelKind, PowerLawFitSpec, Schedule, SweepConfig,
};

#[derive(Parser)]
#[command(name = "qp-floquet", version, about = "Quasiperiodic kicked Ising Floquet circuit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a (W, trajectory) sweep and write series.csv, aggregate.csv and manifest.json.
    Sweep(SweepArgs),
    /// Fit a power law in W and/or a + b ln t to a series file.
    Fit(FitArgs),
    /// Cross-check the state-vector and MPS backends on a chain.
    Compare(CompareArgs),
    /// Lattice utilities.
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Circuit utilities.
    Circuit {
        #[command(subcommand)]
        command: CircuitCommand,
    },
}

#[derive(Subcommand)]
enum LatticeCommand {
    /// Write a lattice (with fields when --w is given) as JSON.
    Export(LatticeExportArgs),
}

#[derive(Subcommand)]
enum CircuitCommand {
    /// Write the gate layers of one or more Floquet cycles as JSON.
    Export(CircuitExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Chain,
    Heavyhex,
    CouplingMap,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Chain => ModelKind::Chain,
            Model::Heavyhex => ModelKind::Heavyhex,
            Model::CouplingMap => ModelKind::CouplingMap,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Sv,
    Mps,
}

#[derive(Clone, Copy, ValueEnum)]
enum Noise {
    None,
    Global,
    Pauli,
}

#[derive(Args)]
struct GeometryArgs {
    #[arg(long, value_enum)]
    model: Option<Model>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    coupling_map: Option<PathBuf>,
}

impl GeometryArgs {
    fn lattice(&self) -> Result<LatticeSpec> {
        match self.model.unwrap_or(Model::Chain) {
            Model::Chain => build_chain(self.n.ok_or_else(|| Error::Config("--n is required for a chain".into()))?),
            Model::Heavyhex => build_heavy_hex(
                self.rows.ok_or_else(|| Error::Config("--rows is required for heavyhex".into()))?,
                self.cols.ok_or_else(|| Error::Config("--cols is required for heavyhex".into()))?,
            ),
            Model::CouplingMap => {
                let path = self.coupling_map.as_ref().ok_or_else(|| Error::Config("--coupling-map is required".into()))?;
                CouplingMapFile::read(path)?.to_lattice()
            }
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// TOML configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Disorder strengths (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    w: Vec<f64>,
    #[arg(long)]
    t_max: Option<u64>,
    /// Record every cycle up to this one, then log-spaced.
    #[arg(long)]
    dense_until: Option<u64>,
    /// Explicit recording times (comma separated).
    #[arg(long, value_delimiter = ',')]
    times: Vec<u64>,
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    #[arg(long)]
    chi: Option<usize>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long, value_enum)]
    noise: Option<Noise>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    trajectories: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "QP_FLOQUET_OUT")]
    out: Option<PathBuf>,
    #[arg(long)]
    memory_override: bool,
    #[arg(long)]
    hardware_faithful: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    checkpoint_every: Option<u64>,
    #[arg(long)]
    no_entropy: bool,
    #[arg(long)]
    record_wall_time: bool,
}

impl SweepArgs {
    fn config(&self) -> Result<SweepConfig> {
        let mut c = match &self.config {
            Some(path) => SweepConfig::read(path)?,
            None => {
                if self.w.is_empty() {
                    return Err(Error::Config("either --config or --w is required".into()));
                }
                SweepConfig::chain(0, self.w.clone())
            }
        };
        let g = &self.geometry;
        if let Some(m) = g.model {
            c.model = m.into();
        }
        c.n = g.n.or(c.n);
        c.rows = g.rows.or(c.rows);
        c.cols = g.cols.or(c.cols);
        c.coupling_map = g.coupling_map.clone().or(c.coupling_map);
        if !self.w.is_empty() {
            c.w = self.w.clone();
        }
        if !self.times.is_empty() {
            c.schedule = Schedule { times: Some(self.times.clone()), ..Schedule::default() };
        }
        if let Some(t) = self.t_max {
            c.schedule.t_max = t;
        }
        if let Some(d) = self.dense_until {
            c.schedule.dense_until = d;
        }
        if let Some(b) = self.backend {
            c.backend = match b {
                Backend::Sv => BackendKind::Sv,
                Backend::Mps => BackendKind::Mps,
            };
        }
        c.chi = self.chi.unwrap_or(c.chi);
        c.shots = self.shots.unwrap_or(c.shots);
        if let Some(noise) = self.noise {
            c.noise = match noise {
                Noise::None => NoiseMode::None,
                Noise::Global => NoiseMode::GlobalDepolarizing {
                    lambda: self.lambda.ok_or_else(|| Error::Config("--noise global needs --lambda".into()))?,
                },
                Noise::Pauli => NoiseMode::PauliTrajectory { p1: self.p1.unwrap_or(0.0), p2: self.p2.unwrap_or(0.0) },
            };
        }
        c.trajectories = self.trajectories.unwrap_or(c.trajectories);
        c.seed = self.seed.unwrap_or(c.seed);
        if let Some(out) = &self.out {
            c.output_dir = out.clone();
        }
        c.memory_override |= self.memory_override;
        c.hardware_faithful |= self.hardware_faithful;
        c.threads = self.threads.unwrap_or(c.threads);
        c.checkpoint_every = self.checkpoint_every.unwrap_or(c.checkpoint_every);
        c.entropy &= !self.no_entropy;
        c.record_wall_time |= self.record_wall_time;
        Ok(c)
    }
}

#[derive(Args)]
struct FitArgs {
    /// series.csv written by `sweep`.
    #[arg(long)]
    series: PathBuf,
    /// Output JSON (default: fits.json next to the series).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fit the late-time autocorrelation against W.
    #[arg(long)]
    power_law: bool,
    #[arg(long)]
    w_min: Option<f64>,
    #[arg(long)]
    w_max: Option<f64>,
    #[arg(long, default_value_t = 0.2)]
    late_fraction: f64,
    #[arg(long, default_value_t = 1000.0)]
    late_t_min: f64,
    /// Fit F_Q = a + b ln t per W.
    #[arg(long)]
    log: bool,
    #[arg(long, default_value_t = 10.0)]
    t_min: f64,
    #[arg(long)]
    t_max: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    w: Vec<f64>,
    #[arg(long)]
    t: u64,
    #[arg(long, default_value_t = 256)]
    chi: usize,
    /// Also run at 2χ and report the agreement horizon.
    #[arg(long)]
    doubling: bool,
    #[arg(long)]
    stop_on_divergence: bool,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[arg(long)]
    memory_override: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LatticeExportArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Assign quasiperiodic fields of this strength.
    #[arg(long)]
    w: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CircuitExportArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    #[arg(long)]
    w: f64,
    #[arg(long, default_value_t = 1)]
    cycles: usize,
    /// Rewrite into the CZ/SX/RZ gate set.
    #[arg(long)]
    transpile: bool,
    #[arg(long)]
    hardware_faithful: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(text: String, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| Error::Io { path: path.clone(), source: e }),
        None => say(&text),
    }
}

/// Prints a line to stdout; a reader that closed the pipe early is not an error.
fn say(text: &str) -> Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io { path: PathBuf::from("<stdout>"), source: e }),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(args) => {
            let outcome = run_sweep(&args.config()?)?;
            say(&format!("run {}: {} rows in {}", outcome.run_id, outcome.rows, outcome.output_dir.display()))?;
        }
        Command::Fit(args) => {
            let both = !args.power_law && !args.log;
            let spec = FitSpec {
                power_law: (both || args.power_law).then_some(PowerLawFitSpec {
                    w_min: args.w_min,
                    w_max: args.w_max,
                    late_fraction: args.late_fraction,
                    t_min: args.late_t_min,
                }),
                log: (both || args.log).then_some(LogFitSpec { t_min: args.t_min, t_max: args.t_max }),
            };
            let out = args.out.unwrap_or_else(|| args.series.with_file_name("fits.json"));
            let fits = run_fits(&args.series, &spec, Some(&out))?;
            for f in &fits {
                let w = f.w.map_or(String::new(), |w| format!(" W = {w}"));
                say(&format!("{}{w}: coeffs = {:?}, r2 = {:.4}", f.fit.model, f.fit.coeffs, f.fit.r2))?;
            }
        }
        Command::Compare(args) => {
            let mut cfg = CompareConfig::new(args.n, args.w, args.t, args.chi);
            cfg.doubling = args.doubling;
            cfg.stop_on_divergence = args.stop_on_divergence;
            cfg.discarded_tolerance = args.tolerance;
            if args.memory_override {
                cfg.budget = MemoryBudget { max_amplitudes: u128::MAX };
            }
            let report = compare_backends(&cfg)?;
            emit(serde_json::to_string_pretty(&report).expect("report serialization"), args.out.as_ref())?;
        }
        Command::Lattice { command: LatticeCommand::Export(args) } => {
            let mut lattice = args.geometry.lattice()?;
            if let Some(w) = args.w {
                lattice = lattice.assign_qp_fields(&QpFieldParams::new(w));
            }
            emit(lattice.to_json(), args.out.as_ref())?;
        }
        Command::Circuit { command: CircuitCommand::Export(args) } => {
            let lattice = args.geometry.lattice()?.assign_qp_fields(&QpFieldParams::new(args.w));
            let params = FloquetParams::new(args.w)?.hardware_faithful(args.hardware_faithful);
            let mut circuit = repeat_cycles(&build_floquet_cycle(&lattice, &params)?, args.cycles);
            if args.transpile {
                circuit = transpile_to_clifford_set(&circuit)?;
            }
            emit(circuit.to_json(), args.out.as_ref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
