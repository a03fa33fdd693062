use std::f64::consts::PI;

use crate::error::Result;
use crate::linalg::{herm_eig, HermitianEigen, Ket, Operator, C64};
use crate::state::uniform_superposition;

use super::EngineParams;

/// `E(|w⟩⟨w| + |ψ_n⟩⟨ψ_n|)`.
pub fn analog_hamiltonian(qubits: usize, target: usize, energy: f64) -> Result<Operator> {
    let psi = uniform_superposition(qubits)?;
    let mut h = Operator::projector(psi.amplitudes())?;
    let d = h.get(target, target);
    h.set(target, target, d + C64::new(1.0, 0.0));
    Ok(h.scale_real(energy))
}

/// Continuous-time search under a time-independent Hamiltonian.
#[derive(Clone, Debug)]
pub struct AnalogSearch {
    qubits: usize,
    target: usize,
    energy: f64,
    spectrum: HermitianEigen,
}

impl AnalogSearch {
    pub fn new(params: &EngineParams) -> Result<Self> {
        params.validate()?;
        let h = analog_hamiltonian(params.qubits, params.target, params.energy)?;
        Ok(AnalogSearch {
            qubits: params.qubits,
            target: params.target,
            energy: params.energy,
            spectrum: herm_eig(&h)?,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// `π√N / (2E)`, when the target is reached with certainty.
    pub fn run_time(&self) -> f64 {
        PI * ((1usize << self.qubits) as f64).sqrt() / (2.0 * self.energy)
    }

    pub fn spectrum(&self) -> &HermitianEigen {
        &self.spectrum
    }

    pub(super) fn propagate(&self, kets: &[Ket], times: &[f64]) -> Vec<Vec<Ket>> {
        times
            .iter()
            .map(|&t| kets.iter().map(|k| self.spectrum.evolve_ket(t, k)).collect())
            .collect()
    }
}
