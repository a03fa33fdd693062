//! Entanglement of globally pure register states.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::Trajectory;
use crate::error::{Error, Result};
use crate::linalg::{Split, C64};
use crate::state::PureState;

/// Largest register for which the `2^n − 2` marginal sum is evaluated.
pub const MAX_MULTIPARTITE_QUBITS: usize = 10;

/// `√(2(1 − tr ρ₁²))` across the cut between qubit 0 and the rest.
pub fn bipartite_concurrence(psi: &PureState) -> Result<f64> {
    if psi.qubit_count() < 2 {
        return Err(Error::argument("a bipartite cut needs at least two qubits"));
    }
    Ok((2.0 * linear_entropy(psi, &[0])?).sqrt().min(1.0))
}

/// `2^{1−n/2} √((2^n − 2) − Σ_A tr ρ_A²)` over every nonempty proper subset `A`.
pub fn multipartite_concurrence(psi: &PureState) -> Result<f64> {
    let n = psi.qubit_count();
    if n > MAX_MULTIPARTITE_QUBITS {
        return Err(Error::Size {
            qubits: n,
            limit: MAX_MULTIPARTITE_QUBITS,
        });
    }
    if n < 2 {
        return Err(Error::argument(
            "multipartite concurrence needs at least two qubits",
        ));
    }
    // A and its complement share the same purity, so sum over the subsets
    // holding qubit 0 and double.
    let full = (1usize << n) - 1;
    let mut deficit = 0.0;
    for mask in (0..full).filter(|m| m & 1 == 1) {
        let keep: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        deficit += 2.0 * linear_entropy(psi, &keep)?;
    }
    Ok(2f64.powf(1.0 - n as f64 / 2.0) * deficit.sqrt())
}

/// `1 − tr ρ_A²` for the marginal on `keep`.
///
/// With `ψ` reshaped to a matrix `M` (rows on `A`), the Lagrange identity
/// gives `1 − tr ρ_A² = 2 Σ_{i<j, k<l} |M_ik M_jl − M_il M_jk|²`, a sum of
/// non-negative terms that stays accurate near product states.
pub fn linear_entropy(psi: &PureState, keep: &[usize]) -> Result<f64> {
    let split = Split::new(psi.qubit_count(), keep)?;
    let amps = psi.amplitudes();
    let rows: Vec<Vec<C64>> = (0..split.kept_dim)
        .map(|a| (0..split.env_dim).map(|b| amps[split.full_index(a, b)]).collect())
        .collect();
    let mut sum = 0.0;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (ri, rj) = (&rows[i], &rows[j]);
            for k in 0..split.env_dim {
                for l in k + 1..split.env_dim {
                    sum += (ri[k] * rj[l] - ri[l] * rj[k]).norm_sqr();
                }
            }
        }
    }
    Ok(2.0 * sum)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementRecord {
    pub t: f64,
    pub c_bipartite: f64,
    pub e_multipartite: f64,
}

pub fn entanglement_record(t: f64, psi: &PureState) -> Result<EntanglementRecord> {
    Ok(EntanglementRecord {
        t,
        c_bipartite: bipartite_concurrence(psi)?,
        e_multipartite: multipartite_concurrence(psi)?,
    })
}

/// Both measures at every point of a trajectory.
pub fn entanglement_series(trajectory: &Trajectory) -> Result<Vec<EntanglementRecord>> {
    trajectory
        .time_grid
        .par_iter()
        .zip(trajectory.states.par_iter())
        .map(|(&t, psi)| entanglement_record(t, psi))
        .collect()
}
