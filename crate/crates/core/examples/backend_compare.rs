//! State-vector and MPS backends side by side, with the bond-doubling check.
//!
//! Usage: `cargo run --release --example backend_compare -- [N] [t] [chi]`

use qp_floquet::sweep::{compare_backends, CompareConfig};

fn main() -> qp_floquet::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(12, |s| s.parse().expect("N"));
    let t: u64 = args.get(1).map_or(40, |s| s.parse().expect("t"));
    let chi: usize = args.get(2).map_or(16, |s| s.parse().expect("chi"));

    let mut config = CompareConfig::new(n, vec![1.5, 3.0, 8.0], t, chi);
    config.doubling = true;
    let report = compare_backends(&config)?;
    println!("N = {n}, chi = {chi}, t = {t}");
    for e in &report.entries {
        println!(
            "W = {}: max|dA| = {}, max bond {}, discarded {:.2e}, discarded horizon {:?}, doubling horizon {:?}, converged {}",
            e.w,
            e.max_delta_a.map_or("-".into(), |d| format!("{d:.2e}")),
            e.max_bond,
            e.discarded_weight,
            e.discarded_horizon,
            e.doubling_horizon,
            e.converged
        );
    }
    Ok(())
}
