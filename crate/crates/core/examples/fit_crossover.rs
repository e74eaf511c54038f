//! Power-law fit of the late-time autocorrelation in `W` and logarithmic fits
//! of the QFI in `t`, from a sweep written to disk.
//!
//! Usage: `cargo run --release --example fit_crossover -- [N] [t_max] [out_dir]`

use qp_floquet::sweep::{run_fits, run_sweep, FitSpec, LogFitSpec, PowerLawFitSpec, Schedule, SweepConfig};

fn main() -> qp_floquet::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(10, |s| s.parse().expect("N"));
    let t_max: u64 = args.get(1).map_or(300, |s| s.parse().expect("t_max"));
    let out = args.get(2).map_or_else(|| std::env::temp_dir().join("qp-floquet-fit"), Into::into);

    let mut config = SweepConfig::chain(n, vec![1.5, 2.0, 2.5, 3.0, 3.5, 4.0]);
    config.schedule = Schedule { t_max, dense_until: 50, ..Schedule::default() };
    config.output_dir = out;
    let outcome = run_sweep(&config)?;
    println!("sweep {}: {} rows in {}", outcome.run_id, outcome.rows, outcome.output_dir.display());

    let spec = FitSpec {
        power_law: Some(PowerLawFitSpec { t_min: 0.5 * t_max as f64, ..PowerLawFitSpec::default() }),
        log: Some(LogFitSpec::default()),
    };
    let fits_path = outcome.output_dir.join("fits.json");
    for f in run_fits(&outcome.series, &spec, Some(&fits_path))? {
        let label = f.w.map_or("all W".to_string(), |w| format!("W = {w}"));
        println!("{:>8} {}: coeffs [{:.4e}, {:.4}], R2 = {:.3}", label, f.fit.model, f.fit.coeffs[0], f.fit.coeffs[1], f.fit.r2);
    }
    println!("wrote {}", fits_path.display());
    Ok(())
}
