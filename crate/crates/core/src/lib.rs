//! Simulation of linear-optical W-state expansion.
//!
//! The crate models polarization qubits as a dense state vector and
//! implements a family of expansion schemes built from one primitive: a
//! controlled-Hadamard / CNOT block acting on a W-state qubit and a fresh
//! ancilla, followed by polarization-dependent loss to equalize
//! amplitudes. Closed-form success probabilities for every scheme live in
//! [`analysis`] and are cross-checked against the simulator.
//!
//! Modules:
//! * [`state`]: labeled-mode state vectors, gates application, PDL,
//!   measurement, fidelity, serialization.
//! * [`gates`]: the gate set, including the controlled Hadamard and its
//!   wave-plate decomposition.
//! * [`schemes`]: cascade, parallel, partial and odd-size expansion, plus
//!   back-propagation verification.
//! * [`analysis`]: exact success-probability formulas and the
//!   analytic-vs-simulated cross-validation table.

pub mod analysis;
pub mod error;
pub mod gates;
pub mod schemes;
pub mod state;

pub use error::{Error, Result};
pub use gates::{ControlSlot, DecomposedCircuit, GateMatrix};
pub use schemes::{ExpansionOutcome, ParallelLayout, WSpec, VERIFY_TOL};
pub use state::{MeasurementRecord, ModeId, Polarization, PureState, MAX_QUBITS, TOL};
