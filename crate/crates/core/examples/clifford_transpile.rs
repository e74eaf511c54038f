//! Rewriting a Floquet cycle into the CZ/SX/RZ gate set, and the angle window
//! of hardware-native RZZ gates.
//!
//! Usage: `cargo run --example clifford_transpile -- [N] [W]`

use qp_floquet::circuit::{build_floquet_cycle, transpile_to_clifford_set, FloquetParams};
use qp_floquet::gate::GateKind;
use qp_floquet::lattice::{build_chain, QpFieldParams};

fn main() -> qp_floquet::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(129, |s| s.parse().expect("N"));
    let w: f64 = args.get(1).map_or(2.0, |s| s.parse().expect("W"));

    let lattice = build_chain(n)?.assign_qp_fields(&QpFieldParams::new(w));
    let cycle = build_floquet_cycle(&lattice, &FloquetParams::new(w)?)?;
    let native = transpile_to_clifford_set(&cycle)?;
    let kinds = [GateKind::Rz, GateKind::Rx, GateKind::Rzz, GateKind::Cz, GateKind::Sx];
    for (name, c) in [("fractional", &cycle), ("CZ/SX/RZ", &native)] {
        let counts: Vec<String> = kinds.iter().map(|&k| format!("{k:?} {}", c.count(k))).filter(|s| !s.ends_with(" 0")).collect();
        println!("{name:>10}: {} layers, {}", c.layers.len(), counts.join(", "));
    }

    // Native RZZ angles must stay in (0, π/2], i.e. W >= 4/π with J = 1/W.
    for w in [1.0, 4.0 / std::f64::consts::PI, 2.0] {
        let params = FloquetParams::new(w)?.hardware_faithful(true);
        match params.validate() {
            Ok(()) => println!("W = {w:.4}: RZZ({:.4}) runs natively", params.rzz_angle()),
            Err(e) => println!("W = {w:.4}: {e}"),
        }
    }
    Ok(())
}
