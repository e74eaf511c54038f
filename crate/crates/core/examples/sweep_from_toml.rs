//! A sweep described in TOML, interrupted and resumed from its checkpoints.
//!
//! Usage: `cargo run --release --example sweep_from_toml -- [config.toml]`

use qp_floquet::sweep::{run_sweep, run_sweep_with, SweepConfig, SweepControl};

const DEFAULT: &str = r#"
model = "chain"
n = 10
w = [2.0, 6.0]
shots = 1024
trajectories = 4
seed = 2024
checkpoint_every = 10

[noise]
mode = "pauli_trajectory"
p1 = 0.001
p2 = 0.01

[schedule]
t_max = 60
dense_until = 20
"#;

fn main() -> qp_floquet::error::Result<()> {
    let mut config = match std::env::args().nth(1) {
        Some(path) => SweepConfig::read(path.as_ref())?,
        None => SweepConfig::from_toml(DEFAULT)?,
    };
    config.output_dir = std::env::temp_dir().join("qp-floquet-toml");
    let _ = std::fs::remove_dir_all(&config.output_dir);

    let stop = SweepControl { interrupt_at: Some((0, 25)) };
    match run_sweep_with(&config, &stop) {
        Err(e) => println!("first attempt stopped: {e}"),
        Ok(_) => println!("first attempt finished without reaching the interrupt"),
    }
    let outcome = run_sweep(&config)?;
    println!("run {} resumed and finished: {} rows", outcome.run_id, outcome.rows);
    println!("artifacts: {}", outcome.output_dir.display());
    Ok(())
}
