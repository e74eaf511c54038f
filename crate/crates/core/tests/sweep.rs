//! Sweep artifacts, fits over them and the backend comparison.

use qp_floquet::sweep::{
    compare_backends, read_series, run_fits, run_sweep, run_sweep_with, CompareConfig, FitSpec, LogFitSpec, Manifest,
    ModelKind, PowerLawFitSpec, Schedule, SweepConfig, SweepControl, SERIES_COLUMNS,
};
use qp_floquet::{BackendKind, Error, MemoryBudget, NoiseMode};

fn small(dir: &std::path::Path) -> SweepConfig {
    let mut c = SweepConfig::chain(6, vec![1.5, 4.0]);
    c.schedule = Schedule::every_cycle(12);
    c.output_dir = dir.to_path_buf();
    c
}

#[test]
fn series_has_the_fixed_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_sweep(&small(dir.path())).unwrap();
    let text = std::fs::read_to_string(&out.series).unwrap();
    assert_eq!(text.lines().next().unwrap(), SERIES_COLUMNS.join(","));
    let rows = read_series(&out.series).unwrap();
    assert_eq!(rows.len(), 2 * 13);
    assert_eq!(out.rows, rows.len());
    assert!(rows.iter().all(|r| r.run_id == out.run_id && r.backend == BackendKind::Sv && r.model == ModelKind::Chain));
    let first = &rows[0];
    assert_eq!((first.t, first.a, first.fq), (0, 1.0, 0.0));
    assert!(rows.iter().all(|r| (r.fq_per_qubit - r.fq / 6.0).abs() < 1e-12));
    let manifest: Manifest = serde_json::from_str(&std::fs::read_to_string(&out.manifest).unwrap()).unwrap();
    assert_eq!(manifest.run_id, out.run_id);
    assert!(manifest.haar.is_some(), "N <= 14 records a sampled Haar baseline");
}

#[test]
fn run_id_ignores_execution_settings_only() {
    let a = SweepConfig::chain(8, vec![2.0]);
    let mut b = a.clone();
    b.output_dir = "elsewhere".into();
    b.threads = 3;
    b.checkpoint_every = 7;
    assert_eq!(a.run_id(), b.run_id());
    let mut c = a.clone();
    c.seed += 1;
    assert_ne!(a.run_id(), c.run_id());
    assert_eq!(SweepConfig::from_toml(&a.to_toml()).unwrap(), a);
}

#[test]
fn thread_count_does_not_change_outputs() {
    let root = tempfile::tempdir().unwrap();
    let mut one = small(&root.path().join("one"));
    one.noise = NoiseMode::PauliTrajectory { p1: 0.01, p2: 0.01 };
    one.trajectories = 4;
    one.shots = 200;
    one.threads = 1;
    let mut many = one.clone();
    many.output_dir = root.path().join("many");
    many.threads = 4;
    let a = run_sweep(&one).unwrap();
    let b = run_sweep(&many).unwrap();
    for f in ["series.csv", "aggregate.csv", "manifest.json"] {
        assert_eq!(std::fs::read(a.output_dir.join(f)).unwrap(), std::fs::read(b.output_dir.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn resume_after_repeated_interrupts_matches_a_straight_run() {
    let root = tempfile::tempdir().unwrap();
    let straight = small(&root.path().join("straight"));
    run_sweep(&straight).unwrap();
    let mut broken = small(&root.path().join("broken"));
    broken.checkpoint_every = 3;
    // Other tasks run to completion; task 0 stops twice, once after a resume.
    for (task, cycle) in [(0, 5), (0, 8)] {
        let r = run_sweep_with(&broken, &SweepControl { interrupt_at: Some((task, cycle)) });
        assert!(matches!(r, Err(Error::Interrupted { .. })), "{r:?}");
    }
    run_sweep(&broken).unwrap();
    for f in ["series.csv", "aggregate.csv", "manifest.json"] {
        assert_eq!(
            std::fs::read(straight.output_dir.join(f)).unwrap(),
            std::fs::read(broken.output_dir.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn oversized_state_vector_is_refused_before_allocating() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = SweepConfig::chain(40, vec![2.0]);
    c.output_dir = dir.path().to_path_buf();
    assert!(matches!(run_sweep(&c), Err(Error::Capacity { .. })));
    c.backend = BackendKind::Mps;
    c.chi = 8;
    c.schedule = Schedule::every_cycle(3);
    run_sweep(&c).unwrap();
    assert!(dir.path().join("mps_diagnostics.jsonl").exists());
}

#[test]
fn invalid_configurations_are_rejected() {
    let mut heavy_mps = SweepConfig::heavy_hex(1, 1, vec![2.0]);
    heavy_mps.backend = BackendKind::Mps;
    assert!(matches!(heavy_mps.validate(), Err(Error::Config(_))));
    let mut one_shot = SweepConfig::chain(4, vec![2.0]);
    one_shot.shots = 1;
    assert!(one_shot.validate().is_err());
    let mut narrow = SweepConfig::chain(4, vec![1.0]);
    narrow.hardware_faithful = true;
    assert!(matches!(narrow.validate(), Err(Error::AngleWindow { .. })));
    assert!(SweepConfig::from_toml("model = \"chain\"\nn = 4\nw = [2.0]\nbogus = 1\n").is_err());
}

#[test]
fn fits_read_back_the_series() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = SweepConfig::chain(6, vec![3.0, 4.0, 6.0, 8.0]);
    c.schedule = Schedule { times: None, t_max: 60, dense_until: 20, per_decade: 10 };
    c.output_dir = dir.path().to_path_buf();
    let out = run_sweep(&c).unwrap();
    let spec = FitSpec {
        power_law: Some(PowerLawFitSpec { t_min: 30.0, ..PowerLawFitSpec::default() }),
        log: Some(LogFitSpec::default()),
    };
    let fits_path = dir.path().join("fits.json");
    let fits = run_fits(&out.series, &spec, Some(&fits_path)).unwrap();
    assert_eq!(fits.len(), 1 + 4);
    assert!(fits[0].w.is_none() && fits[0].fit.points == 4);
    assert!(fits[1..].iter().all(|f| f.w.is_some() && f.fit.window.lo >= 10.0));
    assert!(fits_path.exists());
}

#[test]
fn comparison_skips_state_vector_beyond_budget() {
    let mut cfg = CompareConfig::new(12, vec![6.0], 5, 32);
    cfg.budget = MemoryBudget::qubits(10);
    cfg.doubling = true;
    let report = compare_backends(&cfg).unwrap();
    let e = &report.entries[0];
    assert!(!e.sv_ran && e.max_delta_a.is_none());
    assert_eq!(e.mps_cycles, 5);
    assert_eq!(e.doubling_horizon, Some(5));
    assert!(e.converged);
}
