//! Dense complex linear algebra on qubit registers.
//!
//! Matrices are indexed `(row, column)`. Basis label bits follow the
//! big-endian convention used everywhere in the crate: qubit 0 is the most
//! significant bit of a computational-basis index, so in a register of `n`
//! qubits the bit of qubit `q` in index `i` is `(i >> (n - 1 - q)) & 1`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

pub type C64 = Complex64;

/// A column vector of amplitudes.
pub type Ket = Vec<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: DMatrix<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Operator {
            m: DMatrix::identity(dim, dim),
        }
    }

    /// Builds a `dim × dim` operator from entries listed row by row.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::argument("operator dimension must be positive"));
        }
        if entries.len() != dim * dim {
            return Err(Error::argument(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Operator {
            m: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    /// Real-valued convenience constructor, row by row.
    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_rows(dim, &c)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Operator {
            m: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::argument(format!(
                "operator must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Operator { m })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Operator::from_fn(n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Result<Self> {
        if u.len() != v.len() || u.is_empty() {
            return Err(Error::argument("outer product needs equal, non-empty vectors"));
        }
        Ok(Operator::from_fn(u.len(), |i, j| u[i] * v[j].conj()))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(psi: &[C64]) -> Result<Self> {
        Self::outer(psi, psi)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.m[(row, col)] = value;
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    /// Entries listed row by row.
    pub fn to_rows(&self) -> Vec<C64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.m[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Operator { m: self.m.adjoint() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Operator { m: &self.m * s }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `Σ_ij conj(a_ij) b_ij`.
    pub fn hilbert_schmidt(&self, other: &Operator) -> C64 {
        self.m.iter().zip(other.m.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i..n).all(|j| (self.m[(i, j)] - self.m[(j, i)].conj()).norm() <= tol))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.m.adjoint() * &self.m;
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let target = if i == j { ONE } else { ZERO };
                (prod[(i, j)] - target).norm() <= tol
            })
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Ket> {
        let n = self.dim();
        if v.len() != n {
            return Err(Error::argument(format!(
                "vector of length {} does not match operator dimension {n}",
                v.len()
            )));
        }
        let mut out = vec![ZERO; n];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (j, x) in v.iter().enumerate() {
                acc += self.m[(i, j)] * x;
            }
            *o = acc;
        }
        Ok(out)
    }

    /// Hermitian part `(A + A†)/2`, used to scrub rounding asymmetry.
    pub fn hermitian_part(&self) -> Self {
        Operator {
            m: (&self.m + self.m.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Operator::identity(self.dim());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator { m: &self.m * &rhs.m }
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator { m: &self.m + &rhs.m }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator { m: &self.m - &rhs.m }
    }
}

/// Number of qubits `q` with `2^q == dim`, if any.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    (dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}

fn check_register_dim(dim: usize) -> Result<()> {
    let limit = tolerance::max_qubits();
    if dim > 1usize << limit {
        let qubits = (usize::BITS - (dim - 1).leading_zeros()) as usize;
        return Err(Error::Size { qubits, limit });
    }
    Ok(())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    let (da, db) = (a.dim(), b.dim());
    let dim = da.checked_mul(db).ok_or(Error::Size {
        qubits: usize::BITS as usize,
        limit: tolerance::max_qubits(),
    })?;
    check_register_dim(dim)?;
    Ok(Operator::from_fn(dim, |r, c| {
        a.m[(r / db, c / db)] * b.m[(r % db, c % db)]
    }))
}

/// Kronecker product of two kets.
pub fn kron_ket(a: &[C64], b: &[C64]) -> Ket {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Index bookkeeping for splitting a register into kept and traced qubits.
///
/// `full_index(kept, env)` rebuilds the register index from the kept-qubit
/// label (bits ordered by ascending qubit index) and the environment label.
#[derive(Clone, Debug)]
pub(crate) struct Split {
    pub kept_dim: usize,
    pub env_dim: usize,
    kept_part: Vec<usize>,
    env_part: Vec<usize>,
}

impl Split {
    pub fn new(qubits: usize, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::argument("set of kept qubits must be non-empty"));
        }
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != keep.len() {
            return Err(Error::argument("kept qubit indices must be distinct"));
        }
        if let Some(&q) = sorted.iter().find(|&&q| q >= qubits) {
            return Err(Error::argument(format!(
                "qubit index {q} out of range for a {qubits}-qubit register"
            )));
        }
        let env: Vec<usize> = (0..qubits).filter(|q| !sorted.contains(q)).collect();
        let spread = |label: usize, positions: &[usize]| -> usize {
            let k = positions.len();
            positions.iter().enumerate().fold(0, |acc, (slot, &q)| {
                let bit = (label >> (k - 1 - slot)) & 1;
                acc | (bit << (qubits - 1 - q))
            })
        };
        let kept_dim = 1usize << sorted.len();
        let env_dim = 1usize << env.len();
        Ok(Split {
            kept_dim,
            env_dim,
            kept_part: (0..kept_dim).map(|a| spread(a, &sorted)).collect(),
            env_part: (0..env_dim).map(|e| spread(e, &env)).collect(),
        })
    }

    #[inline]
    pub fn full_index(&self, kept: usize, env: usize) -> usize {
        self.kept_part[kept] | self.env_part[env]
    }
}

/// Traces out every qubit not listed in `keep`.
///
/// The result acts on the kept qubits in ascending index order.
pub fn partial_trace(rho: &Operator, qubit_count: usize, keep: &[usize]) -> Result<Operator> {
    if rho.dim() != 1usize << qubit_count {
        return Err(Error::argument(format!(
            "operator of dimension {} is not a {qubit_count}-qubit operator",
            rho.dim()
        )));
    }
    let split = Split::new(qubit_count, keep)?;
    Ok(Operator::from_fn(split.kept_dim, |a, b| {
        (0..split.env_dim)
            .map(|e| rho.m[(split.full_index(a, e), split.full_index(b, e))])
            .sum()
    }))
}

/// `tr_env |u⟩⟨v|` without forming the outer product.
pub(crate) fn partial_trace_outer(u: &[C64], v: &[C64], split: &Split) -> Operator {
    Operator::from_fn(split.kept_dim, |a, b| {
        (0..split.env_dim)
            .map(|e| u[split.full_index(a, e)] * v[split.full_index(b, e)].conj())
            .sum()
    })
}

/// Spectral decomposition of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: Operator,
}

impl HermitianEigen {
    /// `V f(λ) V†` for a complex-valued spectral function.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> Operator {
        let v = &self.vectors.m;
        let n = v.nrows();
        let mut scaled = v.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let s = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        Operator {
            m: scaled * v.adjoint(),
        }
    }

    /// `e^{-iHt}` from the stored decomposition.
    pub fn exp_unitary(&self, t: f64) -> Operator {
        self.map_spectrum(|lam| C64::from_polar(1.0, -lam * t))
    }

    /// Applies `e^{-iHt}` to a ket in `O(dim²)`.
    pub fn evolve_ket(&self, t: f64, ket: &[C64]) -> Ket {
        let v = &self.vectors.m;
        let n = v.nrows();
        let coeffs: Vec<C64> = (0..n)
            .map(|j| {
                let c: C64 = (0..n).map(|i| v[(i, j)].conj() * ket[i]).sum();
                c * C64::from_polar(1.0, -self.values[j] * t)
            })
            .collect();
        (0..n)
            .map(|i| (0..n).map(|j| v[(i, j)] * coeffs[j]).sum())
            .collect()
    }

    pub fn reconstruct(&self) -> Operator {
        self.map_spectrum(|lam| C64::new(lam, 0.0))
    }
}

fn require_hermitian(h: &Operator, what: &str) -> Result<()> {
    if !h.is_hermitian(tolerance::HERMITICITY) {
        return Err(Error::precondition(format!(
            "{what} requires a Hermitian operator (tolerance {:e})",
            tolerance::HERMITICITY
        )));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
pub fn herm_eig(h: &Operator) -> Result<HermitianEigen> {
    require_hermitian(h, "herm_eig")?;
    let eig = SymmetricEigen::new(h.hermitian_part().m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = order.len();
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen {
        values,
        vectors: Operator { m: vectors },
    })
}

/// Eigenvalues of a Hermitian operator, ascending.
pub fn herm_eigenvalues(h: &Operator) -> Result<Vec<f64>> {
    require_hermitian(h, "herm_eigenvalues")?;
    Ok(hermitian_spectrum_unchecked(h))
}

fn hermitian_spectrum_unchecked(h: &Operator) -> Vec<f64> {
    if h.dim() == 1 {
        return vec![h.m[(0, 0)].re];
    }
    if h.dim() == 2 {
        let (a, d, b) = (h.m[(0, 0)].re, h.m[(1, 1)].re, h.m[(0, 1)]);
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return vec![mean - r, mean + r];
    }
    let mut values: Vec<f64> = h
        .hermitian_part()
        .m
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// `e^{-iHt}` for Hermitian `H`, through its eigendecomposition.
pub fn matexp_unitary(h: &Operator, t: f64) -> Result<Operator> {
    Ok(herm_eig(h)?.exp_unitary(t))
}

/// `‖A‖₁ = Σ|λᵢ|` for Hermitian `A`.
pub fn trace_norm_hermitian(a: &Operator) -> Result<f64> {
    require_hermitian(a, "trace_norm_hermitian")?;
    Ok(hermitian_spectrum_unchecked(a).iter().map(|l| l.abs()).sum())
}

pub fn ket_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨u|v⟩`.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn pauli_x() -> Operator {
        Operator::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn pauli_z() -> Operator {
        Operator::from_real_rows(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    fn plus() -> Ket {
        vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(&Operator::identity(2), &Operator::identity(2)).unwrap();
        assert_eq!(k, Operator::identity(4));
    }

    #[test]
    fn kron_places_basis_projectors() {
        let p0 = Operator::diagonal(&[1.0, 0.0]);
        let p1 = Operator::diagonal(&[0.0, 1.0]);
        assert_eq!(kron(&p0, &p1).unwrap(), Operator::diagonal(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_xx_flips_both_qubits() {
        let xx = kron(&pauli_x(), &pauli_x()).unwrap();
        let out = xx.apply(&[c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        assert_eq!(out, vec![c(0.0), c(0.0), c(0.0), c(1.0)]);
    }

    #[test]
    fn kron_respects_register_cap() {
        let big = Operator::identity(1 << 7);
        let err = kron(&big, &big).unwrap_err();
        assert!(matches!(err, Error::Size { .. }), "{err}");
    }

    #[test]
    fn partial_trace_of_product_state() {
        let rho = Operator::diagonal(&[1.0, 0.0, 0.0, 0.0]);
        let red = partial_trace(&rho, 2, &[0]).unwrap();
        assert_eq!(red, Operator::diagonal(&[1.0, 0.0]));
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let h = FRAC_1_SQRT_2;
        let bell = Operator::projector(&[c(h), c(0.0), c(0.0), c(h)]).unwrap();
        for q in 0..2 {
            let red = partial_trace(&bell, 2, &[q]).unwrap();
            assert!((&red - &Operator::diagonal(&[0.5, 0.5])).max_abs() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_keeping_everything_is_identity_map() {
        let v: Ket = (0..8).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let rho = Operator::projector(&v).unwrap();
        assert_eq!(partial_trace(&rho, 3, &[0, 1, 2]).unwrap(), rho);
    }

    #[test]
    fn partial_trace_uses_big_endian_qubits() {
        // |0⟩ on qubit 0, |1⟩ on qubit 1.
        let rho = Operator::diagonal(&[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(
            partial_trace(&rho, 2, &[0]).unwrap(),
            Operator::diagonal(&[1.0, 0.0])
        );
        assert_eq!(
            partial_trace(&rho, 2, &[1]).unwrap(),
            Operator::diagonal(&[0.0, 1.0])
        );
    }

    #[test]
    fn partial_trace_rejects_bad_indices() {
        let rho = Operator::identity(4);
        assert!(matches!(partial_trace(&rho, 2, &[2]), Err(Error::Argument(_))));
        assert!(matches!(partial_trace(&rho, 2, &[]), Err(Error::Argument(_))));
        assert!(matches!(partial_trace(&rho, 2, &[0, 0]), Err(Error::Argument(_))));
    }

    #[test]
    fn eig_of_identity() {
        let e = herm_eig(&Operator::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
    }

    #[test]
    fn eig_of_pauli_x() {
        let e = herm_eig(&pauli_x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        // |−⟩ for −1, |+⟩ for +1, up to phase.
        let v0 = [e.vectors.get(0, 0), e.vectors.get(1, 0)];
        let v1 = [e.vectors.get(0, 1), e.vectors.get(1, 1)];
        let minus = [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)];
        assert!((inner(&minus, &v0).norm() - 1.0).abs() < 1e-12);
        assert!((inner(&plus(), &v1).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_of_rank_one_projector() {
        let e = herm_eig(&Operator::projector(&plus()).unwrap()).unwrap();
        assert!(e.values[0].abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = Operator::from_real_rows(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(herm_eig(&a), Err(Error::Precondition(_))));
        assert!(matches!(trace_norm_hermitian(&a), Err(Error::Precondition(_))));
    }

    #[test]
    fn matexp_at_zero_is_identity() {
        let u = matexp_unitary(&pauli_x(), 0.0).unwrap();
        assert!((&u - &Operator::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn matexp_of_z_at_pi_is_minus_identity() {
        let u = matexp_unitary(&pauli_z(), PI).unwrap();
        assert!((&u - &Operator::identity(2).scale_real(-1.0)).max_abs() < 1e-12);
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm_hermitian(&Operator::zeros(3)).unwrap(), 0.0);
        assert!((trace_norm_hermitian(&pauli_z()).unwrap() - 2.0).abs() < 1e-15);
        let p0 = Operator::diagonal(&[1.0, 0.0]);
        let pp = Operator::projector(&plus()).unwrap();
        let tn = trace_norm_hermitian(&(&p0 - &pp)).unwrap();
        assert!((tn - 2f64.sqrt()).abs() < 1e-14);
        // Same value through the general (dim > 2) path.
        let big = kron(&(&p0 - &pp), &Operator::diagonal(&[1.0, 0.0])).unwrap();
        assert!((trace_norm_hermitian(&big).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn matrix_power_matches_repeated_product() {
        let u = matexp_unitary(&pauli_x(), 0.3).unwrap();
        let p = u.pow(5);
        let mut q = Operator::identity(2);
        for _ in 0..5 {
            q = &q * &u;
        }
        assert!((&p - &q).max_abs() < 1e-14);
    }
}
