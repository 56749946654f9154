use super::mutual_predictability_pure;
use crate::error::{Error, Result};
use crate::mubs::fourier_pair;
use crate::qmath::{PureState, C64};
use crate::settings::STRUCTURAL_TOL;

fn check_coefficients(lambdas: &[f64], d: usize) -> Result<()> {
    if lambdas.is_empty() || lambdas.len() > d {
        return Err(Error::domain(format!("need between 1 and d = {d} Schmidt coefficients")));
    }
    if lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::domain("Schmidt coefficients must be finite and non-negative"));
    }
    let total: f64 = lambdas.iter().map(|l| l * l).sum();
    if (total - 1.0).abs() > STRUCTURAL_TOL {
        return Err(Error::domain(format!("Σλ² = {total}, expected 1")));
    }
    Ok(())
}

/// `I_2 = 1 + (1 + Σ_{m≠n} λ_m λ_n)/d` for a pure state in Schmidt form,
/// measured in its Schmidt basis and the Fourier-conjugate pair.
pub fn schmidt_i2(lambdas: &[f64], d: usize) -> Result<f64> {
    check_coefficients(lambdas, d)?;
    let sum: f64 = lambdas.iter().sum();
    let squares: f64 = lambdas.iter().map(|l| l * l).sum();
    let cross = sum * sum - squares;
    Ok(1.0 + (1.0 + cross) / d as f64)
}

/// Same quantity from joint probabilities: builds `Σ λ_i |i⟩|i⟩` and measures
/// the computational basis on both sides plus the DFT basis on A and its
/// conjugate on B.
pub fn schmidt_i2_direct(lambdas: &[f64], d: usize) -> Result<f64> {
    check_coefficients(lambdas, d)?;
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for (i, l) in lambdas.iter().enumerate() {
        amps[i * d + i] = C64::new(*l, 0.0);
    }
    let psi = PureState::normalized(amps)?;
    let pair = fourier_pair(d)?;
    pair.bases()
        .iter()
        .map(|b| mutual_predictability_pure(&psi, b, &b.conjugate()))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_state() {
        for d in 2..=6 {
            let v = schmidt_i2(&[1.0], d).unwrap();
            assert!((v - (1.0 + 1.0 / d as f64)).abs() < 1e-15);
            assert!((schmidt_i2_direct(&[1.0], d).unwrap() - v).abs() < 1e-12);
        }
    }

    #[test]
    fn maximally_entangled() {
        for d in 2..=6 {
            let l = vec![1.0 / (d as f64).sqrt(); d];
            assert!((schmidt_i2(&l, d).unwrap() - 2.0).abs() < 1e-12);
            assert!((schmidt_i2_direct(&l, d).unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_nonzero_coefficients_exceed_the_bound() {
        let l = [0.999f64.sqrt(), 0.001f64.sqrt()];
        assert!(schmidt_i2(&l, 3).unwrap() > 1.0 + 1.0 / 3.0);
    }

    #[test]
    fn invalid_inputs() {
        assert!(schmidt_i2(&[0.5, 0.5], 2).is_err());
        assert!(schmidt_i2(&[1.0, 0.0, 0.0], 2).is_err());
        assert!(schmidt_i2(&[-1.0], 2).is_err());
        assert!(schmidt_i2(&[], 2).is_err());
    }
}
