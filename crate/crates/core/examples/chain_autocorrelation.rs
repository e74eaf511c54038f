//! Autocorrelation `A(t)` of the all-up state on a chain across the
//! ergodic-to-localized crossover.
//!
//! Usage: `cargo run --release --example chain_autocorrelation -- [N] [t_max]`

use qp_floquet::backend::QuantumState;
use qp_floquet::circuit::{build_floquet_cycle, FloquetParams};
use qp_floquet::lattice::{build_chain, QpFieldParams};
use qp_floquet::observables::{autocorrelation, late_time_mean, InitialPattern};
use qp_floquet::statevector::{MemoryBudget, StateVector};

fn main() -> qp_floquet::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(12, |s| s.parse().expect("N"));
    let t_max: u64 = args.get(1).map_or(500, |s| s.parse().expect("t_max"));
    let pattern = InitialPattern::all_up(n);

    println!("{:>6} {:>8} {:>8} {:>8} {:>10}", "W", "A(10)", "A(100)", "A(t_max)", "late mean");
    for w in [1.5, 4.0 / std::f64::consts::PI, 2.0, 3.0, 4.0, 6.0, 8.0] {
        let lattice = build_chain(n)?.assign_qp_fields(&QpFieldParams::new(w));
        let cycle = build_floquet_cycle(&lattice, &FloquetParams::new(w)?)?;
        let mut psi = StateVector::all_up(n, MemoryBudget::default())?;
        let mut series = vec![(0.0, 1.0)];
        for t in 1..=t_max {
            for layer in &cycle.layers {
                psi.apply_layer(&layer.gates, &[])?;
            }
            series.push((t as f64, autocorrelation(&psi.z_expectations(), &pattern)?));
        }
        let at = |t: u64| series.get(t as usize).map_or(f64::NAN, |p| p.1);
        let late = late_time_mean(&series, 0.2, 0.0)?;
        println!("{w:>6.3} {:>8.4} {:>8.4} {:>8.4} {late:>10.4}", at(10), at(100), at(t_max));
    }
    Ok(())
}
