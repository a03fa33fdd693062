//! Qubit-register states and Haar sampling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, inner, ket_norm, Ket, Operator, Split, C64};
use crate::tolerance;

/// Normalized state vector of a qubit register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    qubits: usize,
    amplitudes: Ket,
}

fn check_qubits(n: usize) -> Result<()> {
    let limit = tolerance::max_qubits();
    if n == 0 {
        return Err(Error::argument("register must hold at least one qubit"));
    }
    if n > limit {
        return Err(Error::Size { qubits: n, limit });
    }
    Ok(())
}

impl PureState {
    pub fn new(qubits: usize, amplitudes: Ket) -> Result<Self> {
        check_qubits(qubits)?;
        if amplitudes.len() != 1 << qubits {
            return Err(Error::argument(format!(
                "{qubits}-qubit state needs {} amplitudes, got {}",
                1usize << qubits,
                amplitudes.len()
            )));
        }
        let norm = ket_norm(&amplitudes);
        if (norm * norm - 1.0).abs() > tolerance::NORMALIZATION {
            return Err(Error::precondition(format!(
                "state is not normalized (squared norm {})",
                norm * norm
            )));
        }
        Ok(PureState { qubits, amplitudes })
    }

    /// Normalizes `amplitudes` before wrapping them.
    pub fn normalized(qubits: usize, mut amplitudes: Ket) -> Result<Self> {
        let norm = ket_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::argument("cannot normalize a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(qubits, amplitudes)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        check_qubits(qubits)?;
        if index >= 1 << qubits {
            return Err(Error::argument(format!(
                "basis index {index} out of range for {qubits} qubits"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << qubits];
        amps[index] = C64::new(1.0, 0.0);
        Ok(PureState {
            qubits,
            amplitudes: amps,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Ket {
        self.amplitudes
    }

    /// `|⟨index|ψ⟩|²`.
    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes.get(index).map_or(0.0, |a| a.norm_sqr())
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let qubits = self.qubits + other.qubits;
        check_qubits(qubits)?;
        Ok(PureState {
            qubits,
            amplitudes: linalg::kron_ket(&self.amplitudes, &other.amplitudes),
        })
    }

    pub fn density(&self) -> DensityMatrix {
        density_of(self)
    }

    /// Marginal on the listed qubits, computed straight from the amplitudes.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<Operator> {
        let split = Split::new(self.qubits, keep)?;
        Ok(linalg::partial_trace_outer(
            &self.amplitudes,
            &self.amplitudes,
            &split,
        ))
    }

    /// `tr ρ_A²` for the marginal on `keep`.
    pub fn marginal_purity(&self, keep: &[usize]) -> Result<f64> {
        let red = self.reduced_density(keep)?;
        Ok(red.matrix().iter().map(|z| z.norm_sqr()).sum())
    }
}

/// `H^{⊗n}|0…0⟩`, every amplitude `2^{-n/2}`.
pub fn uniform_superposition(n: usize) -> Result<PureState> {
    check_qubits(n)?;
    let dim = 1usize << n;
    let a = C64::new((dim as f64).sqrt().recip(), 0.0);
    Ok(PureState {
        qubits: n,
        amplitudes: vec![a; dim],
    })
}

/// Unit-trace positive semidefinite matrix on a qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    matrix: Operator,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(matrix: Operator) -> Result<Self> {
        Self::with_positivity(matrix, tolerance::POSITIVITY)
    }

    pub(crate) fn with_positivity(matrix: Operator, floor: f64) -> Result<Self> {
        let qubits = linalg::qubits_for_dim(matrix.dim())
            .ok_or_else(|| Error::argument("density matrix dimension must be a power of two"))?;
        check_qubits(qubits.max(1))?;
        if !matrix.is_hermitian(tolerance::HERMITICITY) {
            return Err(Error::precondition("density matrix must be Hermitian"));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tolerance::NORMALIZATION || tr.im.abs() > tolerance::NORMALIZATION {
            return Err(Error::precondition(format!(
                "density matrix trace is {tr}, not 1"
            )));
        }
        let min = linalg::herm_eigenvalues(&matrix)?[0];
        if min < -floor {
            return Err(Error::precondition(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(DensityMatrix { qubits, matrix })
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        check_qubits(qubits)?;
        let dim = 1usize << qubits;
        Ok(DensityMatrix {
            qubits,
            matrix: Operator::identity(dim).scale_real(1.0 / dim as f64),
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn into_operator(self) -> Operator {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn density_of(psi: &PureState) -> DensityMatrix {
    DensityMatrix {
        qubits: psi.qubits,
        matrix: Operator::projector(&psi.amplitudes).expect("state vectors are non-empty"),
    }
}

/// `tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
    rho.matrix.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// Single-qubit Haar state and its orthogonal partner:
/// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` and `sin(θ/2)|0⟩ − e^{iφ} cos(θ/2)|1⟩`
/// with `cos θ ~ U[−1, 1]` and `φ ~ U[0, 2π)`.
pub fn haar_orthogonal_qubit_pair<R: Rng + ?Sized>(rng: &mut R) -> (PureState, PureState) {
    let cos_theta: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    qubit_pair_from_angles(cos_theta, phi)
}

pub(crate) fn qubit_pair_from_angles(cos_theta: f64, phi: f64) -> (PureState, PureState) {
    // cos(θ/2) and sin(θ/2) from cos θ, θ ∈ [0, π].
    let c = ((1.0 + cos_theta) / 2.0).max(0.0).sqrt();
    let s = ((1.0 - cos_theta) / 2.0).max(0.0).sqrt();
    let phase = C64::from_polar(1.0, phi);
    let psi = vec![C64::new(c, 0.0), phase * s];
    let perp = vec![C64::new(s, 0.0), -phase * c];
    (
        PureState {
            qubits: 1,
            amplitudes: psi,
        },
        PureState {
            qubits: 1,
            amplitudes: perp,
        },
    )
}

/// Largest subsystem for which orthogonal pairs are sampled.
pub const MAX_PAIR_QUBITS: usize = 4;

const GRAM_SCHMIDT_ATTEMPTS: usize = 10;

/// Haar-random state on `n_s` qubits together with a partner drawn
/// uniformly from its orthogonal complement.
///
/// One qubit uses the angle parametrization of [`haar_orthogonal_qubit_pair`];
/// larger registers normalize complex Gaussian vectors and Gram–Schmidt the
/// second draw against the first.
pub fn haar_orthogonal_pair<R: Rng + ?Sized>(n_s: usize, rng: &mut R) -> Result<(PureState, PureState)> {
    if !(1..=MAX_PAIR_QUBITS).contains(&n_s) {
        return Err(Error::argument(format!(
            "orthogonal pairs need 1 <= n_S <= {MAX_PAIR_QUBITS}, got {n_s}"
        )));
    }
    if n_s == 1 {
        return Ok(haar_orthogonal_qubit_pair(rng));
    }
    gaussian_orthogonal_pair(n_s, rng)
}

fn gaussian_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Ket {
    (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Gaussian + Gram–Schmidt construction for any register size.
pub fn gaussian_orthogonal_pair<R: Rng + ?Sized>(n_s: usize, rng: &mut R) -> Result<(PureState, PureState)> {
    check_qubits(n_s)?;
    let dim = 1usize << n_s;
    let first = PureState::normalized(n_s, gaussian_ket(dim, rng))?;
    for _ in 0..GRAM_SCHMIDT_ATTEMPTS {
        let mut v = gaussian_ket(dim, rng);
        let proj = inner(&first.amplitudes, &v);
        for (x, f) in v.iter_mut().zip(&first.amplitudes) {
            *x -= proj * f;
        }
        let norm = ket_norm(&v);
        if norm < 1e-6 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        // One re-orthogonalization pass keeps the overlap at machine precision.
        let proj = inner(&first.amplitudes, &v);
        for (x, f) in v.iter_mut().zip(&first.amplitudes) {
            *x -= proj * f;
        }
        let second = PureState::normalized(n_s, v)?;
        return Ok((first, second));
    }
    Err(Error::Sampling(format!(
        "Gram-Schmidt degenerate after {GRAM_SCHMIDT_ATTEMPTS} attempts"
    )))
}

/// Independent deterministic random stream for sample `index` under `seed`.
///
/// Streams do not depend on how many samples or time points are requested,
/// so refining a grid or adding samples never reshuffles existing draws.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn uniform_superposition_amplitudes() {
        let one = uniform_superposition(1).unwrap();
        for a in one.amplitudes() {
            assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-15 && a.im == 0.0);
        }
        let two = uniform_superposition(2).unwrap();
        assert!(two.amplitudes().iter().all(|a| *a == C64::new(0.5, 0.0)));
    }

    #[test]
    fn uniform_superposition_target_overlap() {
        let psi = uniform_superposition(8).unwrap();
        for w in [0, 17, 255] {
            assert!((psi.probability(w) - 1.0 / 256.0).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_superposition_rejects_bad_sizes() {
        assert!(uniform_superposition(0).is_err());
        assert!(uniform_superposition(13).is_err());
    }

    #[test]
    fn qubit_pair_is_orthogonal_and_deterministic() {
        let mut a = sample_stream(7, 3);
        let mut b = sample_stream(7, 3);
        for _ in 0..1000 {
            let (p, q) = haar_orthogonal_qubit_pair(&mut a);
            assert!(p.overlap(&q).norm() < 1e-12);
            assert_eq!((p, q), haar_orthogonal_qubit_pair(&mut b));
        }
    }

    #[test]
    fn multiqubit_pair_orthogonality() {
        let mut rng = sample_stream(11, 0);
        for _ in 0..10_000 {
            let (p, q) = haar_orthogonal_pair(4, &mut rng).unwrap();
            assert!(p.overlap(&q).norm() < 1e-12);
            assert_eq!(p.qubit_count(), 4);
        }
    }

    #[test]
    fn pair_size_validation() {
        let mut rng = sample_stream(0, 0);
        assert!(haar_orthogonal_pair(0, &mut rng).is_err());
        assert!(haar_orthogonal_pair(5, &mut rng).is_err());
    }

    #[test]
    fn purity_examples() {
        let psi = PureState::normalized(2, vec![C64::new(1.0, 0.5); 4]).unwrap();
        assert!((psi.density().purity() - 1.0).abs() < 1e-12);
        assert!((DensityMatrix::maximally_mixed(1).unwrap().purity() - 0.5).abs() < 1e-15);
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        let bell = PureState::new(2, vec![h, z, z, h]).unwrap();
        assert!((bell.marginal_purity(&[0]).unwrap() - 0.5).abs() < 1e-15);
        let marginal = linalg::partial_trace(bell.density().matrix(), 2, &[1]).unwrap();
        let rho = DensityMatrix::new(marginal).unwrap();
        assert!((rho.purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        let not_unit = Operator::diagonal(&[1.0, 1.0]);
        assert!(DensityMatrix::new(not_unit).is_err());
        let negative = Operator::diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(negative).is_err());
        assert!(PureState::new(1, vec![C64::new(1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn reduced_density_matches_partial_trace() {
        let mut rng = sample_stream(5, 1);
        let (psi, _) = gaussian_orthogonal_pair(4, &mut rng).unwrap();
        for keep in [vec![0], vec![1, 3], vec![0, 2, 3]] {
            let fast = psi.reduced_density(&keep).unwrap();
            let slow = linalg::partial_trace(psi.density().matrix(), 4, &keep).unwrap();
            assert!((&fast - &slow).max_abs() < 1e-14);
        }
    }
}
