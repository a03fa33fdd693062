//! Single-shot information flow and leakage in amplitude-amplification
//! dynamics.
//!
//! The crate simulates three realizations of Grover search (gate circuit,
//! analog Hamiltonian, local adiabatic evolution), extracts the reduced
//! dynamical map on a few qubits, and measures how much information about a
//! binary preparation flows back into that subsystem.
//!
//! Conventions: qubit 0 is the most significant bit of a basis label and
//! matrices are indexed `(row, column)`.

pub mod channel;
pub mod engine;
pub mod entanglement;
pub mod error;
pub mod experiment;
pub mod flow;
pub mod linalg;
pub mod selftest;
pub mod state;
pub mod tolerance;

pub use channel::{channel_at, channels_at, ChannelSnapshot, OperatorBasis};
pub use engine::{Engine, EngineKind, EngineParams, Trajectory};
pub use entanglement::{bipartite_concurrence, multipartite_concurrence, EntanglementRecord};
pub use error::{Error, Result};
pub use experiment::{preset, run, Dataset, ExperimentConfig, Format, Output};
pub use flow::{
    conditional_min_entropy, guessing_probability, information_flow, leakage, proposition_check,
    trace_distance, FlowAnalyzer, FlowRecord,
};
pub use linalg::{Operator, C64};
pub use state::{DensityMatrix, PureState};
