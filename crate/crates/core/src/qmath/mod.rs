//! Dense complex linear algebra and quantum-state primitives.
//!
//! Everything here is row-major and dense: the objects the criteria work with
//! are small (local dimensions up to a few dozen), so no sparsity is exploited.
//! Spectral routines (eigenvalues, SVD, QR) are delegated to `nalgebra`.

mod matrix;
mod random;
mod schmidt;
mod state;

pub use matrix::{dagger, kron, kron_with_cap, ComplexMatrix};
pub use random::{
    random_pure_state, random_pure_state_from, random_unitary, random_unitary_from, seeded_rng,
    SeededRng,
};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};
pub use state::{
    validate_density_matrix, validate_density_matrix_with, DensityMatrix, PureState,
    ValidationReport,
};

pub use num_complex::Complex64 as C64;

/// `exp(2πi k / n)`.
pub fn root_of_unity(k: i64, n: usize) -> C64 {
    let n = n as i64;
    let k = k.rem_euclid(n);
    if (4 * k) % n == 0 {
        return [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)]
            [(4 * k / n) as usize];
    }
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
}

/// `⟨a|b⟩ = Σ conj(a_i) b_i`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_unity() {
        assert_eq!(root_of_unity(1, 2), C64::new(-1.0, 0.0));
        assert_eq!(root_of_unity(3, 4), C64::new(0.0, -1.0));
        assert_eq!(root_of_unity(-1, 4), C64::new(0.0, -1.0));
        for n in 1..12usize {
            let total: C64 = (0..n as i64).map(|k| root_of_unity(k, n)).sum();
            assert!(n == 1 || total.norm() < 1e-14);
            assert!((root_of_unity(5, n).powu(n as u32) - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn vector_helpers() {
        let a = [C64::new(0.0, 1.0), C64::new(1.0, 0.0)];
        assert_eq!(inner(&a, &a), C64::new(2.0, 0.0));
        assert!((norm(&a) - 2f64.sqrt()).abs() < 1e-15);
        let k = kron_vec(&a, &[C64::new(2.0, 0.0), C64::new(0.0, 0.0)]);
        assert_eq!(k, vec![C64::new(0.0, 2.0), C64::new(0.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 0.0)]);
    }
}
