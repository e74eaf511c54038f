use serde::{Deserialize, Serialize};

use crate::backend::QuantumState;
use crate::circuit::{build_floquet_cycle, Circuit, FloquetParams};
use crate::error::{Error, Result};
use crate::lattice::{build_chain, QpFieldParams};
use crate::mps::MpsState;
use crate::observables::{autocorrelation, InitialPattern};
use crate::statevector::{MemoryBudget, StateVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub n: usize,
    pub w: Vec<f64>,
    pub t_max: u64,
    pub chi: usize,
    #[serde(skip, default)]
    pub budget: MemoryBudget,
    /// Also rerun at `2χ` and report the cycle up to which `A(t)` agrees.
    pub doubling: bool,
    /// Cumulative discarded weight above which the MPS run counts as diverged.
    pub discarded_tolerance: f64,
    /// `|ΔA|` allowed between `χ` and `2χ`.
    pub doubling_tolerance: f64,
    /// Stop the MPS run at the first cycle beyond `discarded_tolerance`.
    pub stop_on_divergence: bool,
}

impl CompareConfig {
    pub fn new(n: usize, w: Vec<f64>, t_max: u64, chi: usize) -> Self {
        CompareConfig {
            n,
            w,
            t_max,
            chi,
            budget: MemoryBudget::default(),
            doubling: false,
            discarded_tolerance: 1e-8,
            doubling_tolerance: 1e-4,
            stop_on_divergence: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendComparison {
    #[serde(rename = "W")]
    pub w: f64,
    /// False when the state vector does not fit the memory budget.
    pub sv_ran: bool,
    pub max_delta_a: Option<f64>,
    pub max_delta_z: Option<f64>,
    /// Cycles the MPS run completed.
    pub mps_cycles: u64,
    pub max_bond: usize,
    pub discarded_weight: f64,
    /// Last cycle with cumulative discarded weight within tolerance.
    pub discarded_horizon: Option<u64>,
    /// Last cycle up to which `χ` and `2χ` agree on `A(t)`.
    pub doubling_horizon: Option<u64>,
    /// Both horizons (when computed) reach `t_max`.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub config: CompareConfig,
    pub entries: Vec<BackendComparison>,
}

struct Trace {
    a: Vec<f64>,
    z: Vec<Vec<f64>>,
    discarded: Vec<f64>,
    max_bond: usize,
}

fn trace<S: QuantumState>(mut state: S, cycle: &Circuit, t_max: u64, stop_above: Option<f64>, info: impl Fn(&S) -> (usize, f64)) -> Result<Trace> {
    let pattern = InitialPattern::all_up(state.num_qubits());
    let mut out = Trace { a: Vec::new(), z: Vec::new(), discarded: Vec::new(), max_bond: 1 };
    for _ in 0..t_max {
        for layer in &cycle.layers {
            state.apply_layer(&layer.gates, &[])?;
        }
        let z = state.z_expectations();
        out.a.push(autocorrelation(&z, &pattern)?);
        out.z.push(z);
        let (bond, dw) = info(&state);
        out.max_bond = out.max_bond.max(bond);
        out.discarded.push(dw);
        if stop_above.is_some_and(|tol| dw > tol) {
            break;
        }
    }
    Ok(out)
}

/// Cycle index (1-based) of the last element of the leading run satisfying `ok`.
fn horizon(len: usize, ok: impl Fn(usize) -> bool) -> Option<u64> {
    (0..len).take_while(|&i| ok(i)).last().map(|i| i as u64 + 1)
}

/// Runs the state vector (when it fits) and the MPS on identical chains.
pub fn compare_backends(config: &CompareConfig) -> Result<CompareReport> {
    if config.t_max == 0 {
        return Err(Error::Config("compare needs t_max >= 1".into()));
    }
    let chain = build_chain(config.n)?;
    let sv_fits = config.budget.check(config.n).is_ok();
    let mut entries = Vec::new();
    for &w in &config.w {
        let lattice = chain.assign_qp_fields(&QpFieldParams::new(w));
        let cycle = build_floquet_cycle(&lattice, &FloquetParams::new(w)?)?;
        let stop = config.stop_on_divergence.then_some(config.discarded_tolerance);
        let mps_info = |m: &MpsState| (m.max_bond(), m.discarded_weight());
        let mps = trace(MpsState::all_up(config.n, config.chi)?, &cycle, config.t_max, stop, mps_info)?;
        let ran = mps.a.len();

        let (max_delta_a, max_delta_z) = if sv_fits {
            let sv = trace(StateVector::all_up(config.n, config.budget)?, &cycle, ran as u64, None, |_| (0, 0.0))?;
            let da = (0..ran).map(|i| (sv.a[i] - mps.a[i]).abs()).fold(0.0, f64::max);
            let dz = (0..ran)
                .flat_map(|i| sv.z[i].iter().zip(&mps.z[i]).map(|(x, y)| (x - y).abs()).collect::<Vec<_>>())
                .fold(0.0, f64::max);
            (Some(da), Some(dz))
        } else {
            (None, None)
        };

        let discarded_horizon = horizon(ran, |i| mps.discarded[i] <= config.discarded_tolerance);
        let doubling_horizon = if config.doubling {
            let wide = trace(MpsState::all_up(config.n, 2 * config.chi)?, &cycle, ran as u64, None, mps_info)?;
            Some(horizon(ran, |i| (wide.a[i] - mps.a[i]).abs() < config.doubling_tolerance))
        } else {
            None
        };
        let converged = discarded_horizon == Some(config.t_max)
            && doubling_horizon.is_none_or(|h| h == Some(config.t_max));
        entries.push(BackendComparison {
            w,
            sv_ran: sv_fits,
            max_delta_a,
            max_delta_z,
            mps_cycles: ran as u64,
            max_bond: mps.max_bond,
            discarded_weight: mps.discarded.last().copied().unwrap_or(0.0),
            discarded_horizon,
            doubling_horizon: doubling_horizon.flatten(),
            converged,
        });
    }
    Ok(CompareReport { config: config.clone(), entries })
}
