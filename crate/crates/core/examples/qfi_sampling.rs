//! Quantum Fisher information from measured bitstrings with bootstrap errors,
//! against the exact value and the Haar-random baseline.
//!
//! Usage: `cargo run --release --example qfi_sampling -- [N] [t] [shots]`

use qp_floquet::backend::{trajectory_rng, QuantumState};
use qp_floquet::circuit::{build_floquet_cycle, FloquetParams};
use qp_floquet::lattice::{build_chain, QpFieldParams};
use qp_floquet::observables::{haar_qfi_baseline, qfi_exact, qfi_from_samples, DEFAULT_BOOTSTRAP};
use qp_floquet::statevector::{MemoryBudget, StateVector};

fn main() -> qp_floquet::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(12, |s| s.parse().expect("N"));
    let t: u64 = args.get(1).map_or(100, |s| s.parse().expect("t"));
    let shots: usize = args.get(2).map_or(1 << 14, |s| s.parse().expect("shots"));

    let haar = haar_qfi_baseline(n, 200, 1)?;
    println!("Haar baseline N = {n}: F_Q = {:.2} +- {:.2} (F_Q/N = {:.3})", haar.fq_mean, haar.fq_sem, haar.density_mean);
    for w in [1.5, 3.0, 8.0] {
        let lattice = build_chain(n)?.assign_qp_fields(&QpFieldParams::new(w));
        let cycle = build_floquet_cycle(&lattice, &FloquetParams::new(w)?)?;
        let mut psi = StateVector::all_up(n, MemoryBudget::default())?;
        for _ in 0..t {
            for layer in &cycle.layers {
                psi.apply_layer(&layer.gates, &[])?;
            }
        }
        let samples = psi.sample_bitstrings(shots, &mut trajectory_rng(7, 0));
        let est = qfi_from_samples(&samples, DEFAULT_BOOTSTRAP, 7)?;
        println!(
            "W = {w}: exact F_Q = {:.3}, sampled {:.3} +- {:.3} from {shots} shots",
            qfi_exact(&psi),
            est.estimate,
            est.bootstrap_err
        );
    }
    Ok(())
}
