use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, PureState, C64};
use crate::error::{Error, Result};

/// The RNG behind every seeded operation in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Unitarily invariant random state: i.i.d. complex Gaussian amplitudes,
/// normalised.
pub fn random_pure_state(dim: usize, seed: u64) -> Result<PureState> {
    random_pure_state_from(dim, &mut seeded_rng(seed))
}

pub fn random_pure_state_from<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    if dim == 0 {
        return Err(Error::domain("random_pure_state: dim must be >= 1"));
    }
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        // zero norm has probability zero, but resample rather than fail
        if amps.iter().any(|z| z.norm_sqr() > 0.0) {
            return PureState::normalized(amps);
        }
    }
}

/// Haar-distributed unitary.
pub fn random_unitary(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    random_unitary_from(dim, &mut seeded_rng(seed))
}

/// QR of a complex Ginibre matrix with the phases of `diag(R)` pushed into
/// `Q`, which makes the result Haar distributed.
pub fn random_unitary_from<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::domain("random_unitary: dim must be >= 1"));
    }
    let z = DMatrix::<C64>::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = z.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    Ok(ComplexMatrix::from_nalgebra(&u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_one_state_has_unit_modulus() {
        let psi = random_pure_state(1, 5).unwrap();
        assert!((psi.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(random_pure_state(0, 1).is_err());
        assert!(random_unitary(0, 1).is_err());
    }

    #[test]
    fn seeds_are_deterministic() {
        assert_eq!(random_pure_state(5, 42).unwrap(), random_pure_state(5, 42).unwrap());
        assert_ne!(random_pure_state(5, 42).unwrap(), random_pure_state(5, 43).unwrap());
        assert_eq!(random_unitary(4, 7).unwrap(), random_unitary(4, 7).unwrap());
    }

    #[test]
    fn qubit_population_is_uniform_on_average() {
        let mut rng = seeded_rng(2024);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| random_pure_state_from(2, &mut rng).unwrap().amplitudes()[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn unitary_contracts() {
        let u = random_unitary(1, 3).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);

        let u = random_unitary(7, 11).unwrap();
        assert!(u.unitarity_defect() < 1e-10);
        for j in 0..7 {
            let n = super::super::norm(&u.column(j));
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert!((u.determinant().norm() - 1.0).abs() < 1e-9);
    }
}
