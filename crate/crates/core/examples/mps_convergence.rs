//! Discarded-weight convergence horizon of the MPS backend on a long chain.
//!
//! Usage: `cargo run --example mps_convergence -- [N] [chi] [t_max] [W...]`

use std::time::Instant;

use qp_floquet::backend::QuantumState;
use qp_floquet::circuit::{build_floquet_cycle, FloquetParams};
use qp_floquet::lattice::{build_chain, QpFieldParams};
use qp_floquet::mps::MpsState;
use qp_floquet::observables::{autocorrelation, InitialPattern};

const TOLERANCE: f64 = 1e-8;

fn main() -> qp_floquet::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(40, |s| s.parse().expect("N"));
    let chi: usize = args.get(1).map_or(128, |s| s.parse().expect("chi"));
    let t_max: u64 = args.get(2).map_or(30, |s| s.parse().expect("t_max"));
    let ws: Vec<f64> = if args.len() > 3 { args[3..].iter().map(|s| s.parse().expect("W")).collect() } else { vec![1.5, 8.0] };

    for w in ws {
        let lattice = build_chain(n)?.assign_qp_fields(&QpFieldParams::new(w));
        let cycle = build_floquet_cycle(&lattice, &FloquetParams::new(w)?)?;
        let mut state = MpsState::all_up(n, chi)?;
        let start = Instant::now();
        let mut horizon = None;
        for t in 1..=t_max {
            for layer in &cycle.layers {
                state.apply_layer(&layer.gates, &[])?;
            }
            if state.discarded_weight() > TOLERANCE {
                horizon = Some(t - 1);
                break;
            }
        }
        let a = autocorrelation(&state.z_expectations(), &InitialPattern::all_up(n))?;
        match horizon {
            Some(h) => println!(
                "W = {w}: non-converged after cycle {h} (discarded weight {:.2e}, max bond {}, {:.1} s)",
                state.discarded_weight(),
                state.max_bond(),
                start.elapsed().as_secs_f64()
            ),
            None => println!(
                "W = {w}: converged through t = {t_max}, A = {a:.6}, max bond {}, discarded weight {:.2e}, {:.1} s",
                state.max_bond(),
                state.discarded_weight(),
                start.elapsed().as_secs_f64()
            ),
        }
    }
    Ok(())
}
