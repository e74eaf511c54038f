//! Backend-agnostic Floquet gate program.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind};
use crate::lattice::{Color, LatticeKind, LatticeSpec};

/// Kick and coupling strengths of one Floquet cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloquetParams {
    pub w: f64,
    pub j: f64,
    pub h_x: f64,
    /// Enforce the hardware window `0 < 2J <= π/2` on RZZ angles.
    pub hardware_faithful: bool,
}

impl FloquetParams {
    /// `J = h_x = 1/W`.
    pub fn new(w: f64) -> Result<Self> {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParameter(format!("W must be positive and finite, got {w}")));
        }
        Ok(FloquetParams { w, j: 1.0 / w, h_x: 1.0 / w, hardware_faithful: false })
    }

    /// Explicit couplings, e.g. `J = h_x = 0` for the bond-decoupling limit.
    pub fn with_couplings(w: f64, j: f64, h_x: f64) -> Self {
        FloquetParams { w, j, h_x, hardware_faithful: false }
    }

    pub fn hardware_faithful(mut self, on: bool) -> Self {
        self.hardware_faithful = on;
        self
    }

    pub fn rzz_angle(&self) -> f64 {
        2.0 * self.j
    }

    pub fn rx_angle(&self) -> f64 {
        2.0 * self.h_x
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j.is_finite() && self.h_x.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite couplings J = {}, h_x = {}", self.j, self.h_x)));
        }
        if self.hardware_faithful {
            let theta = self.rzz_angle();
            // A few ulps of slack so that W = 4/π itself is admitted.
            if !(theta > 0.0 && theta <= FRAC_PI_2 * (1.0 + 4.0 * f64::EPSILON)) {
                return Err(Error::AngleWindow { w: self.w, theta });
            }
        }
        Ok(())
    }
}

/// What a layer implements within the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", content = "color", rename_all = "snake_case")]
pub enum LayerRole {
    Field(Color),
    Coupling(Color),
    Kick,
    /// Sub-layer produced by transpilation into the native Clifford+RZ set.
    Native,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    #[serde(flatten)]
    pub role: LayerRole,
    pub gates: Vec<Gate>,
}

impl Layer {
    /// Gates in a layer must act on pairwise distinct qubits.
    pub fn check_disjoint(&self, num_qubits: usize) -> Result<()> {
        let mut used = vec![false; num_qubits];
        for g in &self.gates {
            for &q in g.qubits() {
                if q >= num_qubits {
                    return Err(Error::QubitOutOfRange { qubit: q, num_qubits });
                }
                if std::mem::replace(&mut used[q], true) {
                    return Err(Error::InvalidParameter(format!("qubit {q} used twice in one layer")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub layers: Vec<Layer>,
    /// Cumulative layer count at the end of each cycle.
    pub cycle_ends: Vec<usize>,
}

impl Circuit {
    pub fn empty(num_qubits: usize) -> Self {
        Circuit { num_qubits, layers: Vec::new(), cycle_ends: Vec::new() }
    }

    pub fn num_cycles(&self) -> usize {
        self.cycle_ends.len()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flat_map(|l| l.gates.iter())
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates().filter(|g| g.kind() == kind).count()
    }

    pub fn validate(&self) -> Result<()> {
        for layer in &self.layers {
            layer.check_disjoint(self.num_qubits)?;
        }
        if self.cycle_ends.windows(2).any(|w| w[0] > w[1]) || self.cycle_ends.last().is_some_and(|&e| e > self.layers.len()) {
            return Err(Error::InvalidParameter("cycle boundaries out of order".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let c: Circuit = serde_json::from_str(text).map_err(|e| Error::parse("<circuit>", e))?;
        c.validate()?;
        Ok(c)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

/// One Floquet cycle: RZ field layers, RZZ coupling layers, RX kick.
///
/// Chains give `[RZ] [RZZ even] [RZZ odd] [RX]`; heavy-hex lattices give
/// `[RZ R] [RZ G] [RZ B] [RZZ R] [RZZ G] [RZZ B] [RX]`.
pub fn build_floquet_cycle(lattice: &LatticeSpec, params: &FloquetParams) -> Result<Circuit> {
    params.validate()?;
    if !lattice.has_fields() {
        return Err(Error::FieldsNotAssigned);
    }
    let n = lattice.num_qubits;
    let mut layers = Vec::new();

    match lattice.kind {
        LatticeKind::Chain => {
            let h = lattice.total_fields();
            layers.push(Layer {
                role: LayerRole::Field(Color::Chain),
                gates: (0..n).map(|q| Gate::rz(q, 2.0 * h[q])).collect(),
            });
        }
        LatticeKind::HeavyHex => {
            for (&color, values) in &lattice.fields {
                let mut members = lattice.stripe_members(color);
                members.sort_unstable();
                layers.push(Layer {
                    role: LayerRole::Field(color),
                    gates: members.into_iter().map(|q| Gate::rz(q, 2.0 * values[q])).collect(),
                });
            }
        }
    }

    let theta_zz = params.rzz_angle();
    for (color, pairs) in lattice.color_classes() {
        layers.push(Layer {
            role: LayerRole::Coupling(color),
            gates: pairs.into_iter().map(|(a, b)| Gate::rzz(a, b, theta_zz)).collect(),
        });
    }

    let theta_x = params.rx_angle();
    layers.push(Layer { role: LayerRole::Kick, gates: (0..n).map(|q| Gate::rx(q, theta_x)).collect() });

    let cycle_ends = vec![layers.len()];
    let circuit = Circuit { num_qubits: n, layers, cycle_ends };
    circuit.validate()?;
    Ok(circuit)
}

/// `t` back-to-back copies of `cycle`; `t = 0` is the empty circuit.
pub fn repeat_cycles(cycle: &Circuit, t: usize) -> Circuit {
    let per = cycle.layers.len();
    let mut layers = Vec::with_capacity(per * t);
    let mut cycle_ends = Vec::with_capacity(t * cycle.cycle_ends.len().max(1));
    for k in 0..t {
        layers.extend(cycle.layers.iter().cloned());
        if cycle.cycle_ends.is_empty() {
            cycle_ends.push((k + 1) * per);
        } else {
            cycle_ends.extend(cycle.cycle_ends.iter().map(|e| k * per + e));
        }
    }
    Circuit { num_qubits: cycle.num_qubits, layers, cycle_ends }
}

/// RZ–SX–RZ–SX–RZ form of `RX(θ)` (equal up to global phase).
fn rx_native(q: usize, theta: f64) -> Vec<Gate> {
    use std::f64::consts::PI;
    vec![
        Gate::rz(q, FRAC_PI_2),
        Gate::sx(q),
        Gate::rz(q, theta + PI),
        Gate::sx(q),
        Gate::rz(q, FRAC_PI_2),
    ]
}

/// `H` as RZ–SX–RZ (up to global phase).
fn hadamard_native(q: usize) -> Vec<Gate> {
    vec![Gate::rz(q, FRAC_PI_2), Gate::sx(q), Gate::rz(q, FRAC_PI_2)]
}

/// `RZZ(θ) = H_b · CZ · RX_b(θ) · CZ · H_b`: 2 CZ, 4 SX, 7 RZ.
pub fn rzz_native(a: usize, b: usize, theta: f64) -> Vec<Gate> {
    let mut seq = hadamard_native(b);
    seq.push(Gate::cz(a, b));
    seq.extend(rx_native(b, theta));
    seq.push(Gate::cz(a, b));
    seq.extend(hadamard_native(b));
    seq
}

/// Rewrites RX and RZZ into the native `{CZ, SX, X, RZ}` set; RZ passes through.
/// Each layer becomes as many sub-layers as its longest replacement, keeping
/// gates on disjoint qubits together.
pub fn transpile_to_clifford_set(circuit: &Circuit) -> Result<Circuit> {
    let mut layers = Vec::new();
    let mut ends_map = vec![0usize; circuit.layers.len() + 1];
    for (i, layer) in circuit.layers.iter().enumerate() {
        let sequences: Vec<Vec<Gate>> = layer
            .gates
            .iter()
            .map(|g| match *g {
                Gate::Rz { .. } => Ok(vec![*g]),
                Gate::Rx { qubit, theta } => Ok(rx_native(qubit, theta)),
                Gate::Rzz { qubits: [a, b], theta } => Ok(rzz_native(a, b, theta)),
                other => Err(Error::UnsupportedGate(other.kind())),
            })
            .collect::<Result<_>>()?;
        let depth = sequences.iter().map(Vec::len).max().unwrap_or(0);
        for step in 0..depth {
            let gates = sequences.iter().filter_map(|s| s.get(step).copied()).collect();
            let role = if depth == 1 { layer.role } else { LayerRole::Native };
            layers.push(Layer { role, gates });
        }
        ends_map[i + 1] = layers.len();
    }
    let cycle_ends = circuit.cycle_ends.iter().map(|&e| ends_map[e]).collect();
    Ok(Circuit { num_qubits: circuit.num_qubits, layers, cycle_ends })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_chain, build_heavy_hex, QpFieldParams};
    use std::f64::consts::PI;

    fn chain_cycle(n: usize, w: f64) -> Circuit {
        let lattice = build_chain(n).unwrap().assign_qp_fields(&QpFieldParams::new(w));
        build_floquet_cycle(&lattice, &FloquetParams::new(w).unwrap()).unwrap()
    }

    #[test]
    fn chain_cycle_layout() {
        let c = chain_cycle(129, 2.0);
        assert_eq!(c.layers.len(), 4);
        assert_eq!(c.count(GateKind::Rzz), 128);
        assert_eq!(c.count(GateKind::Rz), 129);
        assert_eq!(c.count(GateKind::Rx), 129);
        assert_eq!(c.cycle_ends, vec![4]);
    }

    #[test]
    fn heavy_hex_cycle_layout() {
        let lattice = build_heavy_hex(1, 1).unwrap().assign_qp_fields(&QpFieldParams::new(3.0));
        let c = build_floquet_cycle(&lattice, &FloquetParams::new(3.0).unwrap()).unwrap();
        let roles: Vec<_> = c.layers.iter().map(|l| l.role).collect();
        assert_eq!(
            roles,
            vec![
                LayerRole::Field(Color::Red),
                LayerRole::Field(Color::Green),
                LayerRole::Field(Color::Blue),
                LayerRole::Coupling(Color::Red),
                LayerRole::Coupling(Color::Green),
                LayerRole::Coupling(Color::Blue),
                LayerRole::Kick,
            ]
        );
        // 6 corners in 3 stripe directions + 6 bridges in 2.
        assert_eq!(c.count(GateKind::Rz), 30);
    }

    #[test]
    fn fields_required() {
        let lattice = build_chain(4).unwrap();
        assert!(matches!(
            build_floquet_cycle(&lattice, &FloquetParams::new(2.0).unwrap()),
            Err(Error::FieldsNotAssigned)
        ));
    }

    #[test]
    fn hardware_window() {
        let lattice = build_chain(4).unwrap().assign_qp_fields(&QpFieldParams::new(1.0));
        let p = FloquetParams::new(1.0).unwrap().hardware_faithful(true);
        assert!(matches!(build_floquet_cycle(&lattice, &p), Err(Error::AngleWindow { .. })));
        let self_dual = FloquetParams::new(4.0 / PI).unwrap().hardware_faithful(true);
        assert!(self_dual.validate().is_ok());
        assert!((self_dual.rzz_angle() - PI / 2.0).abs() <= 4.0 * f64::EPSILON);
        let decoupled = FloquetParams::with_couplings(1e9, 0.0, 0.0).hardware_faithful(true);
        assert!(decoupled.validate().is_err());
    }

    #[test]
    fn repeat_counts() {
        let c = chain_cycle(6, 2.0);
        let r0 = repeat_cycles(&c, 0);
        assert!(r0.layers.is_empty() && r0.cycle_ends.is_empty());
        let r3 = repeat_cycles(&c, 3);
        assert_eq!(r3.layers.len(), 12);
        assert_eq!(r3.cycle_ends, vec![4, 8, 12]);
    }

    #[test]
    fn repeat_heavy_hex_5000() {
        let lattice = build_heavy_hex(1, 1).unwrap().assign_qp_fields(&QpFieldParams::new(3.0));
        let c = build_floquet_cycle(&lattice, &FloquetParams::new(3.0).unwrap()).unwrap();
        let r = repeat_cycles(&c, 5000);
        assert_eq!(r.layers.len(), 35_000);
        assert_eq!(r.num_cycles(), 5000);
    }

    #[test]
    fn transpile_doubles_two_qubit_count() {
        let c = chain_cycle(129, 2.0);
        let t = transpile_to_clifford_set(&c).unwrap();
        assert_eq!(t.count(GateKind::Cz), 256);
        assert_eq!(t.count(GateKind::Rzz), 0);
        assert_eq!(t.count(GateKind::Rx), 0);
        assert_eq!(t.count(GateKind::Sx), 4 * 128 + 2 * 129);
        assert_eq!(t.cycle_ends, vec![t.layers.len()]);
        t.validate().unwrap();
    }

    #[test]
    fn transpile_rejects_native_input() {
        let mut c = Circuit::empty(2);
        c.layers.push(Layer { role: LayerRole::Native, gates: vec![Gate::cz(0, 1)] });
        assert!(matches!(transpile_to_clifford_set(&c), Err(Error::UnsupportedGate(GateKind::Cz))));
    }

    #[test]
    fn rzz_block_counts() {
        let seq = rzz_native(0, 1, 0.4);
        let count = |k| seq.iter().filter(|g| g.kind() == k).count();
        assert_eq!((count(GateKind::Cz), count(GateKind::Sx)), (2, 4));
        assert!(seq.iter().all(|g| matches!(g.kind(), GateKind::Cz | GateKind::Sx | GateKind::Rz)));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let c = chain_cycle(5, 1.7);
        let back = Circuit::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        for (a, b) in back.gates().zip(c.gates()) {
            assert_eq!(a.angle().map(f64::to_bits), b.angle().map(f64::to_bits));
        }
    }
}
