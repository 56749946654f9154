//! Finite-shot estimates of the mutual predictabilities.
//!
//! Outcome pairs are drawn by inverse-CDF sampling from the exact joint
//! distribution of each basis pair. `Ĉ_k` is the observed fraction of equal
//! outcomes with binomial standard error `√(Ĉ(1-Ĉ)/N)`; the errors of the
//! independent settings add in quadrature.

use rand::Rng;
use serde::Serialize;

use crate::criteria::{joint_probabilities, separable_bound};
use crate::error::{Error, Result};
use crate::mubs::MubSet;
use crate::qmath::{seeded_rng, DensityMatrix};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleConfig {
    pub shots: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleEstimate {
    pub shots: u64,
    pub seed: u64,
    pub per_basis: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub value: f64,
    pub standard_error: f64,
    pub bound: f64,
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let total: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p.max(0.0) / total;
            acc
        })
        .collect()
}

/// Draws `shots` outcome pairs for each basis pair `(mub_a[k], mub_b[k])`.
pub fn sample_im(rho: &DensityMatrix, mub_a: &MubSet, mub_b: &MubSet, config: &SampleConfig) -> Result<SampleEstimate> {
    if config.shots == 0 {
        return Err(Error::domain("shots must be >= 1"));
    }
    if mub_a.len() != mub_b.len() || mub_a.dim() != mub_b.dim() {
        return Err(Error::domain("MUB sets for A and B differ in size"));
    }
    let d = mub_a.dim();
    let mut rng = seeded_rng(config.seed);
    let n = config.shots as f64;
    let mut per_basis = Vec::with_capacity(mub_a.len());
    let mut standard_errors = Vec::with_capacity(mub_a.len());
    for (a, b) in mub_a.bases().iter().zip(mub_b.bases()) {
        let cdf = cumulative(&joint_probabilities(rho, a, b)?);
        let mut hits = 0u64;
        for _ in 0..config.shots {
            let u: f64 = rng.gen();
            let outcome = cdf.partition_point(|&c| c <= u).min(d * d - 1);
            if outcome / d == outcome % d {
                hits += 1;
            }
        }
        let c = hits as f64 / n;
        per_basis.push(c);
        standard_errors.push((c * (1.0 - c) / n).sqrt());
    }
    let value = per_basis.iter().sum();
    let standard_error = standard_errors.iter().map(|s| s * s).sum::<f64>().sqrt();
    Ok(SampleEstimate {
        shots: config.shots,
        seed: config.seed,
        per_basis,
        standard_errors,
        value,
        standard_error,
        bound: separable_bound(mub_a.len(), d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{i_m, isotropic_state};
    use crate::mubs::construct_mub_set;

    #[test]
    fn single_shot_is_binary() {
        let rho = isotropic_state(3, 0.5).unwrap();
        let set = construct_mub_set(3).unwrap();
        for seed in 0..20 {
            let e = sample_im(&rho, &set, &set.conjugate(), &SampleConfig { shots: 1, seed }).unwrap();
            assert!(e.per_basis.iter().all(|&c| c == 0.0 || c == 1.0));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let rho = isotropic_state(2, 0.3).unwrap();
        let set = construct_mub_set(2).unwrap();
        let config = SampleConfig { shots: 1000, seed: 5 };
        let a = sample_im(&rho, &set, &set.conjugate(), &config).unwrap();
        let b = sample_im(&rho, &set, &set.conjugate(), &config).unwrap();
        assert_eq!(a, b);
        let c = sample_im(&rho, &set, &set.conjugate(), &SampleConfig { shots: 1000, seed: 6 }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn estimate_tracks_exact_value() {
        let rho = isotropic_state(3, 0.4).unwrap();
        let set = construct_mub_set(3).unwrap();
        let exact = i_m(&rho, &set, &set.conjugate()).unwrap().value;
        let e = sample_im(&rho, &set, &set.conjugate(), &SampleConfig { shots: 200_000, seed: 1 }).unwrap();
        assert!((e.value - exact).abs() < 5.0 * e.standard_error, "{} vs {exact}", e.value);
    }

    #[test]
    fn perfect_correlation_has_no_spread() {
        let rho = isotropic_state(2, 1.0).unwrap();
        let set = construct_mub_set(2).unwrap();
        let e = sample_im(&rho, &set, &set.conjugate(), &SampleConfig { shots: 10_000, seed: 3 }).unwrap();
        assert_eq!(e.value, 3.0);
        assert_eq!(e.standard_error, 0.0);
    }

    #[test]
    fn zero_shots_rejected() {
        let rho = isotropic_state(2, 1.0).unwrap();
        let set = construct_mub_set(2).unwrap();
        assert!(sample_im(&rho, &set, &set, &SampleConfig { shots: 0, seed: 0 }).is_err());
    }
}
