//! Numerical tolerances shared by every module.

/// Entrywise tolerance for `A == A†`.
pub const HERMITICITY: f64 = 1e-10;

/// Entrywise tolerance for `U†U == I`.
pub const UNITARITY: f64 = 1e-9;

/// Per-dimension Frobenius tolerance for `V diag(λ) V† == A`.
pub const RECONSTRUCTION_PER_DIM: f64 = 1e-9;

/// Deviation of a state norm (or density trace) from one.
pub const NORMALIZATION: f64 = 1e-10;

/// Most negative eigenvalue still accepted for a density matrix.
pub const POSITIVITY: f64 = 1e-9;

/// Overlap below which two states count as orthogonal.
pub const ORTHOGONALITY: f64 = 1e-12;

/// Largest register accepted when `INFOFLUX_MAX_QUBITS` is unset.
pub const DEFAULT_MAX_QUBITS: usize = 12;

/// Register cap, overridable through the `INFOFLUX_MAX_QUBITS` environment variable.
pub fn max_qubits() -> usize {
    std::env::var("INFOFLUX_MAX_QUBITS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&q| q >= 1 && q < usize::BITS as usize / 2)
        .unwrap_or(DEFAULT_MAX_QUBITS)
}
