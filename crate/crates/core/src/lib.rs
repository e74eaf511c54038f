//! Simulation and analysis of quasiperiodic kicked Ising Floquet circuits.
//!
//! One Floquet cycle applies the quasiperiodic longitudinal field and the
//! Ising couplings as RZ/RZZ layers, followed by a global RX kick, on a chain
//! or a heavy-hexagonal lattice. With `J = h_x = 1/W` a single parameter `W`
//! tunes the dynamics from ergodic (small `W`) to many-body localized (large
//! `W`), passing the self-dual point `W = 4/π`.
//!
//! * [`lattice`] builds chains and heavy-hex lattices with colored bond layers,
//!   stripes and quasiperiodic fields.
//! * [`circuit`] turns a lattice into the gate layers of one cycle, repeats
//!   and transpiles them.
//! * [`statevector`] and [`mps`] are the two simulation backends behind the
//!   [`backend::QuantumState`] trait; [`backend`] also holds the noise models
//!   and the cycle-by-cycle driver.
//! * [`observables`] computes the autocorrelation, quantum Fisher information
//!   and the fits applied to them.
//! * [`sweep`] runs reproducible, resumable parameter sweeps and writes
//!   CSV/JSON artifacts.
//!
//! ```
//! use qp_floquet::backend::QuantumState;
//! use qp_floquet::circuit::{build_floquet_cycle, FloquetParams};
//! use qp_floquet::lattice::{build_chain, QpFieldParams};
//! use qp_floquet::observables::{autocorrelation, InitialPattern};
//! use qp_floquet::statevector::{MemoryBudget, StateVector};
//!
//! let w = 8.0;
//! let lattice = build_chain(8)?.assign_qp_fields(&QpFieldParams::new(w));
//! let cycle = build_floquet_cycle(&lattice, &FloquetParams::new(w)?)?;
//! let mut psi = StateVector::all_up(8, MemoryBudget::default())?;
//! for _ in 0..20 {
//!     for layer in &cycle.layers {
//!         psi.apply_layer(&layer.gates, &[])?;
//!     }
//! }
//! let a = autocorrelation(&psi.z_expectations(), &InitialPattern::all_up(8))?;
//! assert!(a > 0.5);
//! # Ok::<(), qp_floquet::error::Error>(())
//! ```

pub mod backend;
mod checkpoint;
pub mod circuit;
pub mod error;
pub mod gate;
pub mod lattice;
pub mod mps;
pub mod observables;
pub mod statevector;
pub mod sweep;

pub use backend::{BackendKind, Bitstring, NoiseMode, NoiseSpec, QuantumState};
pub use circuit::{Circuit, FloquetParams};
pub use error::{Error, Result};
pub use lattice::{Color, LatticeSpec, QpFieldParams};
pub use mps::MpsState;
pub use statevector::{MemoryBudget, StateVector};
