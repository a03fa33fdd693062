use crate::error::{Error, Result};
use crate::linalg::{Ket, Operator, C64};
use crate::state::uniform_superposition;

use super::EngineParams;

/// `θ = arcsin(2^{-n/2})`; after `k` iterations the target amplitude is `sin((2k+1)θ)`.
pub fn grover_angle(qubits: usize) -> f64 {
    ((1usize << qubits) as f64).sqrt().recip().asin()
}

/// Grover iteration `(2|ψ_n⟩⟨ψ_n| − I)·G_w`, where `G_w` flips the sign of `|w⟩`.
pub fn grover_unitary(qubits: usize, target: usize) -> Result<Operator> {
    let mut params = EngineParams::new(super::EngineKind::Circuit, qubits, target);
    params.iterations = Some(1);
    params.validate()?;
    let dim = 1usize << qubits;
    let inv = 2.0 / dim as f64;
    Ok(Operator::from_fn(dim, |i, j| {
        let diffusion = if i == j { inv - 1.0 } else { inv };
        let oracle = if j == target { -1.0 } else { 1.0 };
        C64::new(diffusion * oracle, 0.0)
    }))
}

/// Discrete-time search: repeated application of the Grover iteration.
#[derive(Clone, Debug)]
pub struct GroverCircuit {
    qubits: usize,
    target: usize,
    iterations: usize,
    unitary: Operator,
}

impl GroverCircuit {
    pub fn new(params: &EngineParams) -> Result<Self> {
        params.validate()?;
        let iterations = params.iterations.unwrap_or_else(|| {
            let theta = grover_angle(params.qubits);
            ((std::f64::consts::PI / (4.0 * theta)).floor() as usize).max(1)
        });
        Ok(GroverCircuit {
            qubits: params.qubits,
            target: params.target,
            iterations,
            unitary: grover_unitary(params.qubits, params.target)?,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Length of the run in iterations.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn unitary(&self) -> &Operator {
        &self.unitary
    }

    pub(super) fn propagate(&self, kets: &[Ket], times: &[f64]) -> Result<Vec<Vec<Ket>>> {
        let mut steps = Vec::with_capacity(times.len());
        for &t in times {
            if t.fract() != 0.0 {
                return Err(Error::argument(format!(
                    "circuit time must be a whole number of iterations, got {t}"
                )));
            }
            steps.push(t as u64);
        }
        let mut current: Vec<Ket> = kets.to_vec();
        let mut done = 0u64;
        let mut out = Vec::with_capacity(times.len());
        for k in steps {
            while done < k {
                current = current
                    .iter()
                    .map(|v| self.unitary.apply(v))
                    .collect::<Result<_>>()?;
                done += 1;
            }
            out.push(current.clone());
        }
        Ok(out)
    }

    /// `U_G^k |ψ_n⟩` by direct matrix powering.
    pub fn state_by_powering(&self, k: u32) -> Result<Ket> {
        let psi = uniform_superposition(self.qubits)?;
        self.unitary.pow(k).apply(psi.amplitudes())
    }
}
