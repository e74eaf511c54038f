//! Invariants checked over generated inputs.

mod common;

use common::*;
use proptest::prelude::*;
use qp_floquet::backend::{Bitstring, QuantumState};
use qp_floquet::circuit::{build_floquet_cycle, transpile_to_clifford_set, Circuit, FloquetParams};
use qp_floquet::gate::{gate_unitary, normalize_angle, Gate, GateMatrix};
use qp_floquet::lattice::{build_chain, build_heavy_hex, LatticeSpec, QpFieldParams};
use qp_floquet::mps::MpsState;
use qp_floquet::observables::{autocorrelation, fit_log_in_t, fit_power_law_in_w, qfi_exact, FitWindow, InitialPattern};
use qp_floquet::statevector::{MemoryBudget, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
    let angle = -20.0..20.0f64;
    (0..n, 1..n, angle, 0..6u8).prop_map(move |(q, d, theta, kind)| {
        let r = (q + d) % n;
        match kind {
            0 => Gate::rx(q, theta),
            1 => Gate::rz(q, theta),
            2 => Gate::rzz(q, r, theta),
            3 => Gate::cz(q, r),
            4 => Gate::sx(q),
            _ => Gate::x(q),
        }
    })
}

fn random_psi(n: usize, seed: u64) -> StateVector {
    StateVector::from_amplitudes(random_state(n, &mut ChaCha8Rng::seed_from_u64(seed))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn angle_normalization_lands_in_window_and_keeps_the_unitary(theta in -1e3..1e3f64) {
        let r = normalize_angle(theta);
        prop_assert!(r > -2.0 * std::f64::consts::PI && r <= 2.0 * std::f64::consts::PI);
        let (GateMatrix::One(a), GateMatrix::One(b)) = (gate_unitary(&Gate::rx(0, theta)), gate_unitary(&Gate::rx(0, r))) else {
            unreachable!()
        };
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((a[i][j] - b[i][j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn gates_preserve_the_norm(seed in 0u64..1000, gates in prop::collection::vec(gate_strategy(6), 1..40)) {
        let mut psi = random_psi(6, seed);
        let mut mps = MpsState::all_up(6, 64).unwrap();
        for g in &gates {
            psi.apply_gate(g).unwrap();
            if !g.is_two_qubit() || g.qubits()[0].abs_diff(g.qubits()[1]) == 1 {
                mps.apply_gate(g).unwrap();
            }
        }
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((mps.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_gates_leave_z_statistics_unchanged(seed in 0u64..1000, gates in prop::collection::vec(gate_strategy(5), 1..30)) {
        let mut psi = random_psi(5, seed);
        let z = psi.z_expectations();
        let moments = psi.magnetization_moments();
        for g in gates.iter().filter(|g| g.is_diagonal()) {
            psi.apply_gate(g).unwrap();
        }
        for (a, b) in z.iter().zip(psi.z_expectations()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let after = psi.magnetization_moments();
        prop_assert!((moments.0 - after.0).abs() < 1e-12 && (moments.1 - after.1).abs() < 1e-12);
    }

    #[test]
    fn observables_stay_in_range(n in 1usize..9, seed in 0u64..1000, flips in any::<u16>()) {
        let psi = random_psi(n, seed);
        let pattern = InitialPattern { bits: (0..n).map(|q| (flips >> q) & 1 == 1).collect() };
        let a = autocorrelation(&psi.z_expectations(), &pattern).unwrap();
        prop_assert!((-1.0..=1.0).contains(&a));
        let f = qfi_exact(&psi);
        prop_assert!(f >= 0.0 && f <= 4.0 * (n * n) as f64 + 1e-9);
        prop_assert!((f - qfi_double_sum(psi.amplitudes(), n)).abs() < 1e-9);
        for cut in 1..n {
            let s = psi.half_cut_entropy(cut).unwrap();
            let bound = cut.min(n - cut) as f64 * std::f64::consts::LN_2;
            prop_assert!(s >= -1e-12 && s <= bound + 1e-9, "cut {}: {} > {}", cut, s, bound);
        }
    }

    #[test]
    fn variance_identity_holds_for_mps(gates in prop::collection::vec(gate_strategy(6), 1..30)) {
        let mut mps = MpsState::all_up(6, 64).unwrap();
        let mut psi = StateVector::all_up(6, MemoryBudget::default()).unwrap();
        for g in gates.iter().filter(|g| !g.is_two_qubit() || g.qubits()[0].abs_diff(g.qubits()[1]) == 1) {
            mps.apply_gate(g).unwrap();
            psi.apply_gate(g).unwrap();
        }
        prop_assert!((qfi_exact(&mps) - qfi_exact(&psi)).abs() < 1e-9);
    }

    #[test]
    fn bitstring_index_round_trips(n in 1usize..64, index in any::<u64>()) {
        let index = if n == 64 { index } else { index & ((1u64 << n) - 1) };
        let b = Bitstring::from_index(n, index);
        let back: u64 = (0..n).map(|q| (b.get(q) as u64) << q).sum();
        prop_assert_eq!(back, index);
        prop_assert_eq!(b.magnetization(), n as i64 - 2 * b.count_ones() as i64);
    }

    #[test]
    fn heavy_hex_is_well_formed(rows in 1usize..5, cols in 1usize..5) {
        let hex = build_heavy_hex(rows, cols).unwrap();
        hex.validate().unwrap();
        prop_assert!(!hex.degenerate_stripes);
        for class in hex.color_classes().values() {
            let mut seen = std::collections::BTreeSet::new();
            for &(a, b) in class {
                prop_assert!(seen.insert(a) && seen.insert(b), "color class is not a matching");
            }
        }
        let round = LatticeSpec::from_json(&hex.to_json()).unwrap();
        prop_assert_eq!(&round, &hex);
        let cycle = build_floquet_cycle(&hex.assign_qp_fields(&QpFieldParams::new(3.0)), &FloquetParams::new(3.0).unwrap()).unwrap();
        cycle.validate().unwrap();
        prop_assert_eq!(cycle.layers.len(), 7);
    }

    #[test]
    fn transpilation_preserves_small_cycles(n in 2usize..5, w in 1.0..10.0f64, omega in 0.0..std::f64::consts::TAU) {
        let lattice = build_chain(n).unwrap().assign_qp_fields(&QpFieldParams::new(w).with_omega0(omega));
        let cycle = build_floquet_cycle(&lattice, &FloquetParams::new(w).unwrap()).unwrap();
        let native = transpile_to_clifford_set(&cycle).unwrap();
        prop_assert!(phase_aligned_distance(&circuit_unitary(&cycle), &circuit_unitary(&native)) < 1e-11);
    }

    #[test]
    fn circuit_json_round_trips(n in 2usize..20, w in 0.5..10.0f64) {
        let lattice = build_chain(n).unwrap().assign_qp_fields(&QpFieldParams::new(w));
        let cycle = build_floquet_cycle(&lattice, &FloquetParams::new(w).unwrap()).unwrap();
        prop_assert_eq!(Circuit::from_json(&cycle.to_json()).unwrap(), cycle);
    }

    #[test]
    fn fits_are_deterministic_and_recover_planted_laws(
        c in 1e-4..1.0f64, a in -6.0..6.0f64, off in -5.0..5.0f64, slope in -3.0..3.0f64
    ) {
        let pw: Vec<(f64, f64)> = (0..8).map(|k| { let w = 1.0 + 0.5 * k as f64; (w, c * w.powf(a)) }).collect();
        let f1 = fit_power_law_in_w(&pw, FitWindow::ALL).unwrap();
        prop_assert_eq!(&f1, &fit_power_law_in_w(&pw, FitWindow::ALL).unwrap());
        prop_assert!((f1.coeffs[1] - a).abs() < 1e-9 && ((f1.coeffs[0] - c) / c).abs() < 1e-9);
        let lt: Vec<(f64, f64)> = (1..200).map(|t| (t as f64, off + slope * (t as f64).ln())).collect();
        let f2 = fit_log_in_t(&lt, FitWindow::new(5.0, 150.0)).unwrap();
        prop_assert!((f2.coeffs[0] - off).abs() < 1e-9 && (f2.coeffs[1] - slope).abs() < 1e-9);
        prop_assert_eq!(f2.points, 146);
    }
}
