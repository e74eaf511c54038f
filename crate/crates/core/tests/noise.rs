//! Noise models against their closed-form channel averages.

use qp_floquet::backend::{run_circuit, sample_attenuated, trajectory_rng, Evolution, QuantumState};
use qp_floquet::circuit::{build_floquet_cycle, repeat_cycles, Circuit, FloquetParams, Layer, LayerRole};
use qp_floquet::gate::Gate;
use qp_floquet::lattice::{build_chain, Color, QpFieldParams};
use qp_floquet::observables::{qfi_attenuated, qfi_exact};
use qp_floquet::statevector::{MemoryBudget, StateVector};
use qp_floquet::{NoiseMode, NoiseSpec};
use rayon::prelude::*;

/// `layers` cycles, each a single layer holding `gates`.
fn repeated(n: usize, gates: Vec<Gate>, layers: usize) -> Circuit {
    let mut c = Circuit::empty(n);
    for k in 0..layers {
        c.layers.push(Layer { role: LayerRole::Coupling(Color::Chain), gates: gates.clone() });
        c.cycle_ends.push(k + 1);
    }
    c
}

/// Trajectory average of `⟨Z_0⟩` and its standard error.
fn mean_z0(circuit: &Circuit, noise: NoiseMode, trajectories: u64) -> (f64, f64) {
    let values: Vec<f64> = (0..trajectories)
        .into_par_iter()
        .map(|k| {
            let psi = StateVector::all_up(circuit.num_qubits, MemoryBudget::default()).unwrap();
            let spec = NoiseSpec { mode: noise, trajectories: trajectories as usize, seed: 99 };
            run_circuit(psi, circuit, &spec, k, |_| Ok(())).unwrap().z_expectations()[0]
        })
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn one_qubit_faults_average_to_depolarizing_decay() {
    // X or Y flips Z: each faulty gate scales ⟨Z⟩ by 1 - 4p/3 on average.
    let (p, layers) = (0.05, 12);
    let circuit = repeated(1, vec![Gate::rz(0, 0.3)], layers);
    let (mean, sem) = mean_z0(&circuit, NoiseMode::PauliTrajectory { p1: p, p2: 0.0 }, 20_000);
    let expected = (1.0 - 4.0 * p / 3.0).powi(layers as i32);
    assert!((mean - expected).abs() < 5.0 * sem, "{mean} vs {expected} (sem {sem})");
}

#[test]
fn two_qubit_faults_average_to_depolarizing_decay() {
    // 8 of the 15 two-qubit Paulis anticommute with Z_0.
    let (p, layers) = (0.04, 10);
    let circuit = repeated(2, vec![Gate::rzz(0, 1, 0.7)], layers);
    let (mean, sem) = mean_z0(&circuit, NoiseMode::PauliTrajectory { p1: 0.0, p2: p }, 20_000);
    let expected = (1.0 - 16.0 * p / 15.0).powi(layers as i32);
    assert!((mean - expected).abs() < 5.0 * sem, "{mean} vs {expected} (sem {sem})");
}

#[test]
fn zero_rate_trajectories_equal_noiseless_evolution() {
    let lattice = build_chain(8).unwrap().assign_qp_fields(&QpFieldParams::new(2.0));
    let circuit = repeat_cycles(&build_floquet_cycle(&lattice, &FloquetParams::new(2.0).unwrap()).unwrap(), 7);
    let psi = StateVector::all_up(8, MemoryBudget::default()).unwrap();
    let clean = run_circuit(psi.clone(), &circuit, &NoiseSpec::noiseless(1), 0, |_| Ok(())).unwrap();
    let spec = NoiseSpec { mode: NoiseMode::PauliTrajectory { p1: 0.0, p2: 0.0 }, trajectories: 1, seed: 1 };
    let zero = run_circuit(psi, &circuit, &spec, 0, |_| Ok(())).unwrap();
    assert_eq!(clean.amplitudes(), zero.amplitudes());
}

#[test]
fn trajectories_are_reproducible_and_distinct() {
    let lattice = build_chain(6).unwrap().assign_qp_fields(&QpFieldParams::new(3.0));
    let circuit = repeat_cycles(&build_floquet_cycle(&lattice, &FloquetParams::new(3.0).unwrap()).unwrap(), 10);
    let noise = NoiseMode::PauliTrajectory { p1: 0.02, p2: 0.05 };
    let run = |seed, traj| {
        let mut evo = Evolution::new(StateVector::all_up(6, MemoryBudget::default()).unwrap(), noise, seed, traj).unwrap();
        evo.run(&circuit, |_| Ok(())).unwrap();
        evo.into_state().into_amplitudes()
    };
    assert_eq!(run(5, 0), run(5, 0));
    assert_ne!(run(5, 0), run(5, 1));
    assert_ne!(run(5, 0), run(6, 0));
}

#[test]
fn global_depolarizing_attenuates_per_layer() {
    let lattice = build_chain(6).unwrap().assign_qp_fields(&QpFieldParams::new(2.0));
    let cycle = build_floquet_cycle(&lattice, &FloquetParams::new(2.0).unwrap()).unwrap();
    let lambda = 0.99;
    let mut evo =
        Evolution::new(StateVector::all_up(6, MemoryBudget::default()).unwrap(), NoiseMode::GlobalDepolarizing { lambda }, 0, 0)
            .unwrap();
    let mut seen = Vec::new();
    evo.run_cycles(&cycle, 5, |snap| {
        seen.push((snap.layers_applied, snap.attenuation));
        Ok(())
    })
    .unwrap();
    for (layers, f) in seen {
        assert_eq!(layers % cycle.layers.len() as u64, 0);
        assert!((f - lambda.powi(layers as i32)).abs() < 1e-14);
    }
}

#[test]
fn attenuated_qfi_interpolates_to_the_mixed_state() {
    let lattice = build_chain(6).unwrap().assign_qp_fields(&QpFieldParams::new(1.5));
    let circuit = repeat_cycles(&build_floquet_cycle(&lattice, &FloquetParams::new(1.5).unwrap()).unwrap(), 4);
    let psi = run_circuit(StateVector::all_up(6, MemoryBudget::default()).unwrap(), &circuit, &NoiseSpec::noiseless(0), 0, |_| Ok(()))
        .unwrap();
    let (m1, m2) = psi.magnetization_moments();
    assert!((qfi_attenuated(6, m1, m2, 1.0) - qfi_exact(&psi)).abs() < 1e-12);
    // The maximally mixed state has Var(M) = N.
    assert!((qfi_attenuated(6, m1, m2, 0.0) - 24.0).abs() < 1e-12);
}

#[test]
fn fully_attenuated_samples_are_uniform() {
    let psi = StateVector::all_up(4, MemoryBudget::default()).unwrap();
    let shots = 64_000;
    let samples = sample_attenuated(&psi, shots, 0.0, &mut trajectory_rng(4, 0));
    let mut counts = [0usize; 16];
    for s in &samples {
        counts[(0..4).map(|q| (s.get(q) as usize) << q).sum::<usize>()] += 1;
    }
    let expected = shots as f64 / 16.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 15 degrees of freedom; the 1e-6 tail starts near 50.
    assert!(chi2 < 50.0, "chi2 = {chi2}");
    let kept = sample_attenuated(&psi, 1000, 1.0, &mut trajectory_rng(4, 0));
    assert!(kept.iter().all(|s| s.count_ones() == 0));
}
