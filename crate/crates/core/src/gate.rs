//! Gate set and matrix conventions.
//!
//! `RZ(θ) = diag(e^{-iθ/2}, e^{iθ/2})`, `RX(θ) = exp(-iθX/2)`,
//! `RZZ(θ) = exp(-iθ Z⊗Z/2)`. Two-qubit matrices index their basis as
//! `bit(first) + 2·bit(second)`, matching the little-endian state layout.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

const TWO_PI: f64 = 2.0 * PI;
const FOUR_PI: f64 = 4.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Rx,
    Rz,
    Rzz,
    Cz,
    Sx,
    X,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateRecord", into = "GateRecord")]
pub enum Gate {
    Rx { qubit: usize, theta: f64 },
    Rz { qubit: usize, theta: f64 },
    Rzz { qubits: [usize; 2], theta: f64 },
    Cz { qubits: [usize; 2] },
    Sx { qubit: usize },
    X { qubit: usize },
}

/// Reduces a rotation angle into (-2π, 2π]. Rotation gates have period 4π, so
/// the unitary is unchanged.
pub fn normalize_angle(theta: f64) -> f64 {
    if theta > -TWO_PI && theta <= TWO_PI {
        return theta;
    }
    let r = theta.rem_euclid(FOUR_PI);
    if r > TWO_PI {
        r - FOUR_PI
    } else {
        r
    }
}

impl Gate {
    pub fn rx(qubit: usize, theta: f64) -> Gate {
        Gate::Rx { qubit, theta: normalize_angle(theta) }
    }

    pub fn rz(qubit: usize, theta: f64) -> Gate {
        Gate::Rz { qubit, theta: normalize_angle(theta) }
    }

    pub fn rzz(a: usize, b: usize, theta: f64) -> Gate {
        Gate::Rzz { qubits: [a, b], theta: normalize_angle(theta) }
    }

    pub fn cz(a: usize, b: usize) -> Gate {
        Gate::Cz { qubits: [a, b] }
    }

    pub fn sx(qubit: usize) -> Gate {
        Gate::Sx { qubit }
    }

    pub fn x(qubit: usize) -> Gate {
        Gate::X { qubit }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Rx { .. } => GateKind::Rx,
            Gate::Rz { .. } => GateKind::Rz,
            Gate::Rzz { .. } => GateKind::Rzz,
            Gate::Cz { .. } => GateKind::Cz,
            Gate::Sx { .. } => GateKind::Sx,
            Gate::X { .. } => GateKind::X,
        }
    }

    pub fn qubits(&self) -> &[usize] {
        match self {
            Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } | Gate::Sx { qubit } | Gate::X { qubit } => {
                std::slice::from_ref(qubit)
            }
            Gate::Rzz { qubits, .. } | Gate::Cz { qubits } => qubits,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { theta, .. } | Gate::Rz { theta, .. } | Gate::Rzz { theta, .. } => Some(theta),
            _ => None,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().len() == 2
    }

    /// Diagonal in the computational basis: leaves every `<Z_j>` unchanged.
    pub fn is_diagonal(&self) -> bool {
        matches!(self, Gate::Rz { .. } | Gate::Rzz { .. } | Gate::Cz { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateMatrix {
    One(Mat2),
    Two(Mat4),
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rz_matrix(theta: f64) -> Mat2 {
    let z = c(0.0, 0.0);
    [[C64::from_polar(1.0, -theta / 2.0), z], [z, C64::from_polar(1.0, theta / 2.0)]]
}

pub fn rx_matrix(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

pub fn sx_matrix() -> Mat2 {
    [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]]
}

pub fn x_matrix() -> Mat2 {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    [[z, o], [o, z]]
}

fn diag4(d: [C64; 4]) -> Mat4 {
    let mut m = [[c(0.0, 0.0); 4]; 4];
    for (i, v) in d.into_iter().enumerate() {
        m[i][i] = v;
    }
    m
}

pub fn rzz_matrix(theta: f64) -> Mat4 {
    let even = C64::from_polar(1.0, -theta / 2.0);
    let odd = C64::from_polar(1.0, theta / 2.0);
    diag4([even, odd, odd, even])
}

pub fn cz_matrix() -> Mat4 {
    let o = c(1.0, 0.0);
    diag4([o, o, o, -o])
}

/// Dense matrix of a gate under the conventions above.
pub fn gate_unitary(gate: &Gate) -> GateMatrix {
    match *gate {
        Gate::Rx { theta, .. } => GateMatrix::One(rx_matrix(theta)),
        Gate::Rz { theta, .. } => GateMatrix::One(rz_matrix(theta)),
        Gate::Sx { .. } => GateMatrix::One(sx_matrix()),
        Gate::X { .. } => GateMatrix::One(x_matrix()),
        Gate::Rzz { theta, .. } => GateMatrix::Two(rzz_matrix(theta)),
        Gate::Cz { .. } => GateMatrix::Two(cz_matrix()),
    }
}

/// Reorders a two-qubit matrix so its first index refers to the other qubit.
pub fn swap_qubit_order(m: &Mat4) -> Mat4 {
    let swap = |i: usize| ((i & 1) << 1) | (i >> 1);
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[swap(i)][swap(j)];
        }
    }
    out
}

/// Single-qubit Pauli operators used for stochastic noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Mat2 {
        let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        match self {
            Pauli::X => [[z, o], [o, z]],
            Pauli::Y => [[z, -i], [i, z]],
            Pauli::Z => [[o, z], [z, -o]],
        }
    }
}

/// Wire form `{kind, qubits, angle}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct GateRecord {
    kind: GateKind,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
}

impl From<Gate> for GateRecord {
    fn from(g: Gate) -> Self {
        GateRecord { kind: g.kind(), qubits: g.qubits().to_vec(), angle: g.angle() }
    }
}

impl TryFrom<GateRecord> for Gate {
    type Error = Error;

    fn try_from(r: GateRecord) -> Result<Gate> {
        let arity = match r.kind {
            GateKind::Rzz | GateKind::Cz => 2,
            _ => 1,
        };
        if r.qubits.len() != arity {
            return Err(Error::LengthMismatch { expected: arity, found: r.qubits.len() });
        }
        if arity == 2 && r.qubits[0] == r.qubits[1] {
            return Err(Error::InvalidParameter(format!("two-qubit gate on repeated qubit {}", r.qubits[0])));
        }
        let needs_angle = matches!(r.kind, GateKind::Rx | GateKind::Rz | GateKind::Rzz);
        let theta = match (needs_angle, r.angle) {
            (true, Some(t)) => t,
            (true, None) => return Err(Error::InvalidParameter(format!("{:?} gate without angle", r.kind))),
            (false, Some(_)) => return Err(Error::InvalidParameter(format!("{:?} gate takes no angle", r.kind))),
            (false, None) => 0.0,
        };
        let q = &r.qubits;
        // Angles are stored as written so serialization round-trips bit-exactly.
        Ok(match r.kind {
            GateKind::Rx => Gate::Rx { qubit: q[0], theta },
            GateKind::Rz => Gate::Rz { qubit: q[0], theta },
            GateKind::Rzz => Gate::Rzz { qubits: [q[0], q[1]], theta },
            GateKind::Cz => Gate::Cz { qubits: [q[0], q[1]] },
            GateKind::Sx => Gate::Sx { qubit: q[0] },
            GateKind::X => Gate::X { qubit: q[0] },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close2(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn rz_zero_is_identity() {
        let GateMatrix::One(m) = gate_unitary(&Gate::rz(0, 0.0)) else { panic!() };
        let id = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(close2(&m, &id, 1e-15));
    }

    #[test]
    fn rx_pi_is_minus_i_x() {
        let GateMatrix::One(m) = gate_unitary(&Gate::rx(0, PI)) else { panic!() };
        let want = [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, -1.0), c(0.0, 0.0)]];
        assert!(close2(&m, &want, 1e-15));
    }

    #[test]
    fn rzz_half_pi_diagonal() {
        let GateMatrix::Two(m) = gate_unitary(&Gate::rzz(0, 1, PI / 2.0)) else { panic!() };
        let e = |s: f64| C64::from_polar(1.0, s * PI / 4.0);
        let want = [e(-1.0), e(1.0), e(1.0), e(-1.0)];
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { want[i] } else { c(0.0, 0.0) };
                assert!((m[i][j] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn sx_squares_to_x() {
        let s = sx_matrix();
        let mut sq = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                sq[i][j] = s[i][0] * s[0][j] + s[i][1] * s[1][j];
            }
        }
        assert!(close2(&sq, &x_matrix(), 1e-15));
    }

    #[test]
    fn angle_normalization_range() {
        assert_eq!(normalize_angle(1.0), 1.0);
        assert_eq!(normalize_angle(TWO_PI), TWO_PI);
        let r = normalize_angle(-TWO_PI);
        assert!((r - TWO_PI).abs() < 1e-12);
        let r = normalize_angle(5.0 * PI);
        assert!((r - PI).abs() < 1e-12);
        let r = normalize_angle(-5.0 * PI);
        assert!((r + PI).abs() < 1e-12);
    }

    #[test]
    fn record_rejects_malformed_gates() {
        let bad = r#"{"kind":"RZZ","qubits":[1],"angle":0.5}"#;
        assert!(serde_json::from_str::<Gate>(bad).is_err());
        let bad = r#"{"kind":"CZ","qubits":[1,2],"angle":0.5}"#;
        assert!(serde_json::from_str::<Gate>(bad).is_err());
        let good = r#"{"kind":"RX","qubits":[3],"angle":0.25}"#;
        assert_eq!(serde_json::from_str::<Gate>(good).unwrap(), Gate::rx(3, 0.25));
    }

    #[test]
    fn swap_order_is_involution() {
        let m = rzz_matrix(0.3);
        let mut generic = m;
        generic[1][2] = c(0.7, 0.1);
        assert_eq!(swap_qubit_order(&swap_qubit_order(&generic)), generic);
        assert_eq!(swap_qubit_order(&generic)[2][1], c(0.7, 0.1));
    }
}
