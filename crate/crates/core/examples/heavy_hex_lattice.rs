//! Heavy-hex lattice: bond colors, stripes and the quasiperiodic fields they
//! carry, written as JSON.
//!
//! Usage: `cargo run --example heavy_hex_lattice -- [rows] [cols] [W] [out.json]`

use std::path::Path;

use qp_floquet::circuit::{build_floquet_cycle, FloquetParams};
use qp_floquet::lattice::{build_heavy_hex, QpFieldParams};

fn main() -> qp_floquet::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let rows: usize = args.first().map_or(7, |s| s.parse().expect("rows"));
    let cols: usize = args.get(1).map_or(3, |s| s.parse().expect("cols"));
    let w: f64 = args.get(2).map_or(4.0, |s| s.parse().expect("W"));

    let lattice = build_heavy_hex(rows, cols)?.assign_qp_fields(&QpFieldParams::new(w));
    println!("{rows}x{cols} heavy-hex: {} qubits, {} bonds", lattice.num_qubits, lattice.edges.len());
    for (color, bonds) in lattice.color_classes() {
        let stripes = &lattice.stripes[&color];
        let longest = stripes.iter().map(Vec::len).max().unwrap_or(0);
        println!("  {color}: {} bonds, {} stripes (longest {longest})", bonds.len(), stripes.len());
    }
    let cycle = build_floquet_cycle(&lattice, &FloquetParams::new(w)?)?;
    let roles: Vec<String> = cycle.layers.iter().map(|l| format!("{:?}", l.role)).collect();
    println!("cycle layers: {}", roles.join(", "));

    if let Some(out) = args.get(3) {
        lattice.write_json(Path::new(out))?;
        println!("wrote {out}");
    }
    Ok(())
}
