//! Three realizations of amplitude amplification behind one interface.
//!
//! Every engine starts from the uniform superposition `|ψ_n⟩` and exposes
//! its global evolution through [`Engine::propagate`], which pushes a set of
//! kets through the dynamics and records them at ascending times.

mod adiabatic;
mod analog;
mod circuit;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use adiabatic::{AdiabaticMode, AdiabaticSearch, StepMethod};
pub use analog::{analog_hamiltonian, AnalogSearch};
pub use circuit::{grover_angle, grover_unitary, GroverCircuit};

use crate::error::{Error, Result};
use crate::linalg::{Ket, Operator, C64};
use crate::state::{uniform_superposition, PureState};
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Circuit,
    Analog,
    Adiabatic,
}

impl EngineKind {
    pub const ALL: [EngineKind; 3] = [EngineKind::Circuit, EngineKind::Analog, EngineKind::Adiabatic];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Circuit => "circuit",
            EngineKind::Analog => "analog",
            EngineKind::Adiabatic => "adiabatic",
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circuit" => Ok(EngineKind::Circuit),
            "analog" => Ok(EngineKind::Analog),
            "adiabatic" => Ok(EngineKind::Adiabatic),
            other => Err(Error::config(
                "engine",
                format!("unknown engine `{other}` (expected circuit, analog or adiabatic)"),
            )),
        }
    }
}

/// Engine selection and physical parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub kind: EngineKind,
    pub qubits: usize,
    /// Marked basis index `w`.
    pub target: usize,
    /// Analog energy scale `E`.
    pub energy: f64,
    /// Adiabatic error bound `ε`.
    pub epsilon: f64,
    /// Continuous integration step; `None` picks `T/2000` and halves until converged.
    pub dt: Option<f64>,
    /// Circuit iteration count; `None` picks `⌊π / 4θ⌋`.
    pub iterations: Option<usize>,
    pub adiabatic_mode: AdiabaticMode,
}

impl EngineParams {
    pub fn new(kind: EngineKind, qubits: usize, target: usize) -> Self {
        EngineParams {
            kind,
            qubits,
            target,
            energy: 1.0,
            epsilon: 0.2,
            dt: None,
            iterations: None,
            adiabatic_mode: AdiabaticMode::Integrated,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let limit = tolerance::max_qubits();
        if self.qubits == 0 || self.qubits > limit {
            return Err(Error::config(
                "n",
                format!("must satisfy 1 <= n <= {limit}, got {}", self.qubits),
            ));
        }
        if self.target >= 1 << self.qubits {
            return Err(Error::config(
                "target",
                format!(
                    "must be below 2^n = {}, got {}",
                    1usize << self.qubits,
                    self.target
                ),
            ));
        }
        if !(self.energy > 0.0 && self.energy.is_finite()) {
            return Err(Error::config(
                "energy",
                format!("must be positive, got {}", self.energy),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::config(
                "epsilon",
                format!("must lie in (0, 1), got {}", self.epsilon),
            ));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::config("dt", format!("must be positive, got {dt}")));
            }
        }
        if self.iterations == Some(0) {
            return Err(Error::config("iterations", "must be at least 1"));
        }
        Ok(())
    }
}

/// An amplitude-amplification dynamics.
#[derive(Clone, Debug)]
pub enum Engine {
    Circuit(GroverCircuit),
    Analog(AnalogSearch),
    Adiabatic(AdiabaticSearch),
}

impl Engine {
    pub fn new(params: &EngineParams) -> Result<Self> {
        params.validate()?;
        Ok(match params.kind {
            EngineKind::Circuit => Engine::Circuit(GroverCircuit::new(params)?),
            EngineKind::Analog => Engine::Analog(AnalogSearch::new(params)?),
            EngineKind::Adiabatic => Engine::Adiabatic(AdiabaticSearch::new(params)?),
        })
    }

    pub fn kind(&self) -> EngineKind {
        match self {
            Engine::Circuit(_) => EngineKind::Circuit,
            Engine::Analog(_) => EngineKind::Analog,
            Engine::Adiabatic(_) => EngineKind::Adiabatic,
        }
    }

    pub fn qubits(&self) -> usize {
        match self {
            Engine::Circuit(e) => e.qubits(),
            Engine::Analog(e) => e.qubits(),
            Engine::Adiabatic(e) => e.qubits(),
        }
    }

    pub fn target(&self) -> usize {
        match self {
            Engine::Circuit(e) => e.target(),
            Engine::Analog(e) => e.target(),
            Engine::Adiabatic(e) => e.target(),
        }
    }

    /// Iteration count for the circuit, evolution time for the others.
    pub fn run_time(&self) -> f64 {
        match self {
            Engine::Circuit(e) => e.iterations() as f64,
            Engine::Analog(e) => e.run_time(),
            Engine::Adiabatic(e) => e.run_time(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Engine::Circuit(_))
    }

    /// Every iteration for the circuit, `points` evenly spaced times otherwise.
    pub fn default_grid(&self, points: usize) -> Vec<f64> {
        match self {
            Engine::Circuit(e) => (0..=e.iterations()).map(|k| k as f64).collect(),
            _ => linspace(0.0, self.run_time(), points.max(2)),
        }
    }

    /// Evolves every ket to each of the ascending `times`; indexed `[time][ket]`.
    pub fn propagate(&self, kets: &[Ket], times: &[f64]) -> Result<Vec<Vec<Ket>>> {
        let dim = 1usize << self.qubits();
        if let Some(k) = kets.iter().find(|k| k.len() != dim) {
            return Err(Error::argument(format!(
                "ket of length {} does not match register dimension {dim}",
                k.len()
            )));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::argument("times must be ascending"));
        }
        if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(Error::argument(format!(
                "time {t} must be finite and non-negative"
            )));
        }
        match self {
            Engine::Circuit(e) => e.propagate(kets, times),
            Engine::Analog(e) => Ok(e.propagate(kets, times)),
            Engine::Adiabatic(e) => e.propagate(kets, times),
        }
    }

    /// The global unitary at `t`, assembled column by column.
    pub fn unitary_at(&self, t: f64) -> Result<Operator> {
        let dim = 1usize << self.qubits();
        let basis: Vec<Ket> = (0..dim)
            .map(|k| {
                let mut v = vec![C64::new(0.0, 0.0); dim];
                v[k] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        let cols = self.propagate(&basis, &[t])?.pop().expect("one time requested");
        Ok(Operator::from_fn(dim, |i, j| cols[j][i]))
    }

    pub fn initial_state(&self) -> PureState {
        uniform_superposition(self.qubits()).expect("engine register size already validated")
    }

    /// Global states `|ψ(t)⟩` on the grid.
    pub fn trajectory(&self, times: &[f64]) -> Result<Trajectory> {
        let psi0 = self.initial_state();
        let n = psi0.qubit_count();
        let kets = self.propagate(&[psi0.into_amplitudes()], times)?;
        let states = kets
            .into_iter()
            .map(|mut ks| PureState::normalized(n, ks.pop().expect("one ket")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory {
            kind: self.kind(),
            target: self.target(),
            time_grid: times.to_vec(),
            states,
        })
    }
}

/// Global states of one engine run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub kind: EngineKind,
    pub target: usize,
    pub time_grid: Vec<f64>,
    pub states: Vec<PureState>,
}

impl Trajectory {
    pub fn success_probabilities(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| success_probability(s, self.target))
            .collect()
    }
}

/// `|⟨w|ψ⟩|²`.
pub fn success_probability(state: &PureState, target: usize) -> f64 {
    state.probability(target).clamp(0.0, 1.0)
}

pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (points - 1) as f64;
            (0..points)
                .map(|i| {
                    if i + 1 == points {
                        end
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

/// `(a, b)` with `a = ⟨w|ψ_n⟩ = 2^{-n/2}` and `b = √(1 − a²)`.
pub(crate) fn overlap_pair(qubits: usize) -> (f64, f64) {
    let a = (1usize << qubits) as f64;
    let a = a.sqrt().recip();
    (a, (1.0 - a * a).sqrt())
}

/// Coordinates of `x` in the orthonormal basis `{|w⟩, |r⟩}` of
/// `span{|w⟩, |ψ_n⟩}`, where `|r⟩ ∝ |ψ_n⟩ − a|w⟩`.
pub(crate) fn search_plane_coords(x: &[C64], target: usize, a: f64, b: f64) -> (C64, C64) {
    let total: C64 = x.iter().sum();
    let xw = x[target];
    (xw, (total - xw) * (a / b))
}

/// `x + (|w⟩, |r⟩) · delta`.
pub(crate) fn add_in_search_plane(x: &mut [C64], target: usize, a: f64, b: f64, delta: (C64, C64)) {
    let r = delta.1 * (a / b);
    for v in x.iter_mut() {
        *v += r;
    }
    x[target] += delta.0 - r;
}
