//! Global numerical tolerances.

/// Structural tolerance: Hermiticity, trace, normalisation, orthonormality
/// and unbiasedness.
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// Spectral tolerance: smallest admissible eigenvalue of a density matrix is
/// `-SPECTRAL_TOL`; reconstruction error of decompositions.
pub const SPECTRAL_TOL: f64 = 1e-9;

/// A criterion value must exceed its separable bound by more than this to be
/// reported as a violation.
pub const VIOLATION_MARGIN: f64 = 1e-9;

/// Default cap on the number of entries of any constructed matrix.
pub const MAX_ENTRIES: usize = 100_000_000;

/// The one settings record through which the tolerances can be overridden.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub structural_tol: f64,
    pub spectral_tol: f64,
    pub violation_margin: f64,
    pub max_entries: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            structural_tol: STRUCTURAL_TOL,
            spectral_tol: SPECTRAL_TOL,
            violation_margin: VIOLATION_MARGIN,
            max_entries: MAX_ENTRIES,
        }
    }
}
