//! Reduced dynamical maps on a subsystem of the search register.
//!
//! For a subsystem `S` of `n_S` qubits and the environment prepared in the
//! uniform superposition of the remaining qubits,
//!
//! ```text
//! Λ_t(ρ) = tr_E [ U(t) (ρ ⊗ |ψ_E⟩⟨ψ_E|) U(t)† ].
//! ```
//!
//! A [`ChannelSnapshot`] stores `Λ_t` through its action on a Hilbert–Schmidt
//! orthonormal Hermitian basis `{B_k}`, so evaluating it on any input is a
//! `4^{n_S}`-term linear combination. Snapshots are built from the
//! `2^{n_S}` evolved kets `U(t)(|c⟩ ⊗ |ψ_E⟩)`: with `W_c` those kets,
//! `Λ_t(|c⟩⟨d|) = tr_E |W_c⟩⟨W_d|`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::linalg::{self, Ket, Operator, Split, C64};
use crate::state::DensityMatrix;

/// Positivity floor accepted for channel outputs.
pub const OUTPUT_POSITIVITY: f64 = 1e-8;

/// Orthonormal Hermitian operator bases.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OperatorBasis {
    /// Normalized tensor products of `{I, X, Y, Z}`, qubit 0 as the leading factor.
    #[default]
    Pauli,
    /// Normalized generalized Gell-Mann matrices plus `I/√d`.
    GellMann,
}

impl OperatorBasis {
    pub fn elements(self, qubits: usize) -> Vec<Operator> {
        match self {
            OperatorBasis::Pauli => pauli_basis(qubits),
            OperatorBasis::GellMann => gell_mann_basis(1 << qubits),
        }
    }
}

fn pauli_basis(qubits: usize) -> Vec<Operator> {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let single = [
        [one, z, z, one],
        [z, one, one, z],
        [z, -i, i, z],
        [one, z, z, -one],
    ]
    .map(|e| Operator::from_rows(2, &e).expect("2x2"));
    let norm = ((1usize << qubits) as f64).sqrt().recip();
    (0..1usize << (2 * qubits))
        .map(|k| {
            let mut op = Operator::identity(1);
            for q in 0..qubits {
                let digit = (k >> (2 * (qubits - 1 - q))) & 3;
                op = linalg::kron(&op, &single[digit]).expect("within register cap");
            }
            op.scale_real(norm)
        })
        .collect()
}

fn gell_mann_basis(dim: usize) -> Vec<Operator> {
    let mut out = vec![Operator::identity(dim).scale_real((dim as f64).sqrt().recip())];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..dim {
        for k in j + 1..dim {
            let mut sym = Operator::zeros(dim);
            sym.set(j, k, C64::new(h, 0.0));
            sym.set(k, j, C64::new(h, 0.0));
            out.push(sym);
            let mut anti = Operator::zeros(dim);
            anti.set(j, k, C64::new(0.0, -h));
            anti.set(k, j, C64::new(0.0, h));
            out.push(anti);
        }
    }
    for l in 1..dim {
        let scale = ((l * (l + 1)) as f64).sqrt().recip();
        let mut diag = vec![0.0; dim];
        diag[..l].iter_mut().for_each(|d| *d = scale);
        diag[l] = -(l as f64) * scale;
        out.push(Operator::diagonal(&diag));
    }
    out
}

/// `Λ_t` on an `n_S`-qubit subsystem at one time.
#[derive(Clone, Debug)]
pub struct ChannelSnapshot {
    qubits: usize,
    time: f64,
    basis: Arc<Vec<Operator>>,
    images: Vec<Operator>,
}

impl ChannelSnapshot {
    /// The identity map, i.e. `Λ_0`.
    pub fn identity(qubits: usize, basis: OperatorBasis) -> Self {
        let basis = Arc::new(basis.elements(qubits));
        ChannelSnapshot {
            qubits,
            time: 0.0,
            images: basis.as_ref().clone(),
            basis,
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn basis(&self) -> &[Operator] {
        &self.basis
    }

    /// `Λ_t(B_k)` for every basis element.
    pub fn images(&self) -> &[Operator] {
        &self.images
    }

    /// Real transfer matrix `T_jk = tr(B_j Λ(B_k))` of the map in the stored basis.
    pub fn transfer_matrix(&self) -> DMatrix<f64> {
        let n = self.basis.len();
        let sparse: Vec<Vec<(usize, usize, C64)>> = self
            .basis
            .iter()
            .map(|b| {
                let d = b.dim();
                (0..d * d)
                    .map(|idx| (idx / d, idx % d, b.get(idx / d, idx % d)))
                    .filter(|e| e.2.norm_sqr() != 0.0)
                    .collect()
            })
            .collect();
        // tr(B Λ) = Σ_{ij} B_ij Λ_ji
        DMatrix::from_fn(n, n, |j, k| {
            let img = self.images[k].matrix();
            sparse[j].iter().map(|&(r, c, b)| (b * img[(c, r)]).re).sum()
        })
    }

    /// Expansion coefficients `tr(B_k X)` of `X` in the stored basis.
    pub fn coefficients(&self, x: &Operator) -> Result<Vec<C64>> {
        if x.dim() != 1 << self.qubits {
            return Err(Error::argument(format!(
                "operator of dimension {} does not act on {} qubits",
                x.dim(),
                self.qubits
            )));
        }
        // tr(B X) = Σ conj(B_ij) X_ij for Hermitian B.
        Ok(self.basis.iter().map(|b| b.hilbert_schmidt(x)).collect())
    }

    /// Linear extension of the map to an arbitrary operator.
    pub fn apply_operator(&self, x: &Operator) -> Result<Operator> {
        let coeffs = self.coefficients(x)?;
        Ok(self.combine(&coeffs))
    }

    pub(crate) fn combine(&self, coeffs: &[C64]) -> Operator {
        let dim = 1usize << self.qubits;
        let mut out = Operator::zeros(dim);
        let mut buf = vec![C64::new(0.0, 0.0); dim * dim];
        self.combine_into(coeffs, &mut buf);
        for i in 0..dim {
            for j in 0..dim {
                out.set(i, j, buf[i * dim + j]);
            }
        }
        out
    }

    /// `Σ_k c_k Λ(B_k)` written row by row into `buf`.
    pub(crate) fn combine_into(&self, coeffs: &[C64], buf: &mut [C64]) {
        let dim = 1usize << self.qubits;
        buf.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (c, img) in coeffs.iter().zip(&self.images) {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let m = img.matrix();
            for i in 0..dim {
                for j in 0..dim {
                    buf[i * dim + j] += c * m[(i, j)];
                }
            }
        }
    }

    /// `Λ_t(ρ)`, validated as a density matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.qubit_count() != self.qubits {
            return Err(Error::argument(format!(
                "input acts on {} qubits, channel on {}",
                rho.qubit_count(),
                self.qubits
            )));
        }
        let out = self.apply_operator(rho.matrix())?.hermitian_part();
        DensityMatrix::with_positivity(out, OUTPUT_POSITIVITY)
    }
}

/// Qubits `0..n_S`, the default subsystem.
pub fn leading_qubits(n_s: usize) -> Vec<usize> {
    (0..n_s).collect()
}

/// `Λ_t` on the first `n_S` qubits in the Pauli basis.
pub fn channel_at(engine: &Engine, t: f64, n_s: usize) -> Result<ChannelSnapshot> {
    Ok(
        channels_at(engine, &[t], &leading_qubits(n_s), OperatorBasis::Pauli)?
            .pop()
            .expect("one time requested"),
    )
}

/// Snapshots at every ascending time for an arbitrary subsystem.
///
/// The subsystem output is ordered by ascending qubit index.
pub fn channels_at(
    engine: &Engine,
    times: &[f64],
    subsystem: &[usize],
    basis: OperatorBasis,
) -> Result<Vec<ChannelSnapshot>> {
    let n = engine.qubits();
    let split = subsystem_split(n, subsystem)?;
    let n_s = subsystem.len();
    let inputs = dilation_inputs(&split);
    let evolved = engine.propagate(&inputs, times)?;
    let basis = Arc::new(basis.elements(n_s));
    Ok(evolved
        .par_iter()
        .zip(times.par_iter())
        .map(|(kets, &t)| snapshot_from_kets(kets, &split, n_s, t, Arc::clone(&basis)))
        .collect())
}

pub(crate) fn subsystem_split(n: usize, subsystem: &[usize]) -> Result<Split> {
    if subsystem.is_empty() {
        return Err(Error::argument("subsystem must contain at least one qubit"));
    }
    if subsystem.len() >= n {
        return Err(Error::argument(format!(
            "subsystem of {} qubits leaves no environment in a {n}-qubit register",
            subsystem.len()
        )));
    }
    Split::new(n, subsystem)
}

/// `|c⟩_S ⊗ |ψ_E⟩` for every subsystem basis label `c`.
pub(crate) fn dilation_inputs(split: &Split) -> Vec<Ket> {
    let amp = C64::new((split.env_dim as f64).sqrt().recip(), 0.0);
    let dim = split.kept_dim * split.env_dim;
    (0..split.kept_dim)
        .map(|c| {
            let mut v = vec![C64::new(0.0, 0.0); dim];
            for e in 0..split.env_dim {
                v[split.full_index(c, e)] = amp;
            }
            v
        })
        .collect()
}

fn snapshot_from_kets(
    kets: &[Ket],
    split: &Split,
    qubits: usize,
    time: f64,
    basis: Arc<Vec<Operator>>,
) -> ChannelSnapshot {
    let d = split.kept_dim;
    // blocks[c * d + e] = tr_E |W_c⟩⟨W_e| = Λ(|c⟩⟨e|)
    let blocks: Vec<Operator> = (0..d * d)
        .map(|ce| linalg::partial_trace_outer(&kets[ce / d], &kets[ce % d], split))
        .collect();
    let images = basis
        .iter()
        .map(|b| {
            let mut acc = vec![C64::new(0.0, 0.0); d * d];
            for c in 0..d {
                for e in 0..d {
                    let coeff = b.get(c, e);
                    if coeff.norm_sqr() == 0.0 {
                        continue;
                    }
                    let m = blocks[c * d + e].matrix();
                    for i in 0..d {
                        for j in 0..d {
                            acc[i * d + j] += coeff * m[(i, j)];
                        }
                    }
                }
            }
            Operator::from_rows(d, &acc).expect("d x d")
        })
        .collect();
    ChannelSnapshot {
        qubits,
        time,
        basis,
        images,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{EngineKind, EngineParams};
    use crate::state::{density_of, haar_orthogonal_pair, sample_stream};

    fn orthonormal(basis: &[Operator]) -> bool {
        basis.iter().enumerate().all(|(j, a)| {
            basis.iter().enumerate().all(|(k, b)| {
                let expect = if j == k { 1.0 } else { 0.0 };
                (a.hilbert_schmidt(b) - C64::new(expect, 0.0)).norm() < 1e-12
            }) && a.is_hermitian(1e-15)
        })
    }

    #[test]
    fn bases_are_orthonormal_and_hermitian() {
        for q in 1..=3 {
            for basis in [OperatorBasis::Pauli, OperatorBasis::GellMann] {
                let b = basis.elements(q);
                assert_eq!(b.len(), 1 << (2 * q));
                assert!(orthonormal(&b), "{basis:?} on {q} qubits");
            }
        }
    }

    #[test]
    fn identity_snapshot_is_identity() {
        let id = ChannelSnapshot::identity(2, OperatorBasis::Pauli);
        let mut rng = sample_stream(1, 1);
        let (p, _) = haar_orthogonal_pair(2, &mut rng).unwrap();
        let rho = density_of(&p);
        let out = id.apply(&rho).unwrap();
        assert!((out.matrix() - rho.matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn map_at_time_zero_is_identity() {
        for kind in EngineKind::ALL {
            let e = Engine::new(&EngineParams::new(kind, 4, 5)).unwrap();
            let snap = channel_at(&e, 0.0, 2).unwrap();
            for (b, img) in snap.basis().iter().zip(snap.images()) {
                assert!((b - img).max_abs() < 1e-12, "{kind}");
            }
        }
    }

    #[test]
    fn trace_and_hermiticity_preserved() {
        let e = Engine::new(&EngineParams::new(EngineKind::Analog, 5, 9)).unwrap();
        let snap = channel_at(&e, 2.7, 2).unwrap();
        for (b, img) in snap.basis().iter().zip(snap.images()) {
            assert!((b.trace() - img.trace()).norm() < 1e-10);
            assert!(img.is_hermitian(1e-12));
        }
    }

    #[test]
    fn rejects_oversized_subsystem() {
        let e = Engine::new(&EngineParams::new(EngineKind::Circuit, 3, 0)).unwrap();
        assert!(matches!(channel_at(&e, 1.0, 3), Err(Error::Argument(_))));
        assert!(matches!(channel_at(&e, 1.0, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let id = ChannelSnapshot::identity(1, OperatorBasis::Pauli);
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(id.apply(&rho).is_err());
    }
}
