//! Pauli-trajectory noise averaged over runs, next to the global depolarizing
//! model it approximates.
//!
//! Usage: `cargo run --release --example noisy_trajectories -- [N] [trajectories] [p2]`

use qp_floquet::backend::{Evolution, QuantumState};
use qp_floquet::circuit::{build_floquet_cycle, FloquetParams};
use qp_floquet::lattice::{build_chain, QpFieldParams};
use qp_floquet::observables::{autocorrelation, InitialPattern};
use qp_floquet::statevector::{MemoryBudget, StateVector};
use qp_floquet::NoiseMode;
use rayon::prelude::*;

fn main() -> qp_floquet::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(10, |s| s.parse().expect("N"));
    let trajectories: u64 = args.get(1).map_or(200, |s| s.parse().expect("trajectories"));
    let p2: f64 = args.get(2).map_or(0.01, |s| s.parse().expect("p2"));
    let (w, t_max) = (8.0, 40);

    let lattice = build_chain(n)?.assign_qp_fields(&QpFieldParams::new(w));
    let cycle = build_floquet_cycle(&lattice, &FloquetParams::new(w)?)?;
    let pattern = InitialPattern::all_up(n);
    let series = |noise: NoiseMode, traj: u64| -> qp_floquet::error::Result<Vec<(f64, f64)>> {
        let mut evo = Evolution::new(StateVector::all_up(n, MemoryBudget::default())?, noise, 3, traj)?;
        let mut out = Vec::new();
        evo.run_cycles(&cycle, t_max, |snap| {
            out.push((snap.attenuation, autocorrelation(&snap.state.z_expectations(), &pattern)?));
            Ok(())
        })?;
        Ok(out)
    };

    let pauli = NoiseMode::PauliTrajectory { p1: p2 / 10.0, p2 };
    let runs: Vec<Vec<(f64, f64)>> = (0..trajectories).into_par_iter().map(|k| series(pauli, k)).collect::<Result<_, _>>()?;
    // Per-layer lambda with the same Z-flip rate per cycle as the Pauli model:
    // two one-qubit gates and up to two RZZ gates per qubit.
    let lambda = ((1.0 - 4.0 * p2 / 30.0).powi(2) * (1.0 - 16.0 * p2 / 15.0).powi(2)).powf(1.0 / cycle.layers.len() as f64);
    let global = series(NoiseMode::GlobalDepolarizing { lambda }, 0)?;
    let clean = series(NoiseMode::None, 0)?;
    println!("lambda = {lambda:.5} per layer");
    println!("{:>4} {:>10} {:>14} {:>16}", "t", "noiseless", "Pauli mean", "f * noiseless");
    for t in (4..=t_max as usize).step_by(4) {
        let mean = runs.iter().map(|r| r[t - 1].1).sum::<f64>() / trajectories as f64;
        let (f, a) = global[t - 1];
        println!("{t:>4} {:>10.4} {mean:>14.4} {:>16.4}", clean[t - 1].1, f * a);
    }
    Ok(())
}
