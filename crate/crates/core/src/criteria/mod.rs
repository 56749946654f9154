//! Mutual predictability and the `I_m` criterion for two qudits.
//!
//! For bases `a` on A and `b` on B the mutual predictability is
//! `C_{a,b} = Σ_i ⟨i_a, i_b|ρ|i_a, i_b⟩`. Summed over `m` pairs of mutually
//! unbiased bases, every separable state satisfies
//! `I_m = Σ_k C_k ≤ 1 + (m-1)/d`.

mod assignment;
mod bell;
mod isotropic;
mod schmidt;

pub use assignment::max_weight_assignment;
pub use bell::{
    bell_diagonal_state, bell_state, enclosure_check, weyl_operator, BellDiagonalCoeffs, EnclosureReport,
};
pub use isotropic::{isotropic_closed_form, isotropic_state, isotropic_threshold, IsotropicParams};
pub use schmidt::{schmidt_i2, schmidt_i2_direct};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mubs::{Basis, MubSet};
use crate::qmath::{kron_vec, ComplexMatrix, DensityMatrix, PureState, C64};
use crate::settings::VIOLATION_MARGIN;

/// Per-basis values, their sum, the separable bound and the verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub per_basis: Vec<f64>,
    pub value: f64,
    pub bound: f64,
    /// `value - bound`.
    pub margin: f64,
    /// `margin > threshold`; certifies entanglement when true.
    pub violated: bool,
    /// Outcome relabelling used for each basis, when relabelling was enabled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relabelings: Option<Vec<Vec<usize>>>,
}

impl CriterionReport {
    pub fn new(per_basis: Vec<f64>, bound: f64, threshold: f64) -> Self {
        let value = per_basis.iter().sum::<f64>();
        let margin = value - bound;
        Self {
            per_basis,
            value,
            bound,
            margin,
            violated: margin > threshold,
            relabelings: None,
        }
    }

    pub fn with_relabelings(mut self, relabelings: Vec<Vec<usize>>) -> Self {
        self.relabelings = Some(relabelings);
        self
    }
}

/// Separable bound `1 + (m-1)/d`.
pub fn separable_bound(m: usize, d: usize) -> f64 {
    1.0 + (m as f64 - 1.0) / d as f64
}

fn check_bipartite(rho: &DensityMatrix, da: usize, db: usize) -> Result<()> {
    if da != db {
        return Err(Error::domain(format!("local bases have different dimensions {da} and {db}")));
    }
    if rho.dim() != da * db {
        return Err(Error::domain(format!(
            "state of dimension {} does not match local dimensions {da} x {db}",
            rho.dim()
        )));
    }
    Ok(())
}

/// `Σ_i ⟨a_i ⊗ b_i|ρ|a_i ⊗ b_i⟩` with the basis vectors as matrix columns.
pub(crate) fn diagonal_predictability(rho: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = a.cols();
    (0..d)
        .map(|i| rho.quadratic_form(&kron_vec(&a.column(i), &b.column(i))).re)
        .sum()
}

/// Row-major `P(i, j) = ⟨a_i ⊗ b_j|ρ|a_i ⊗ b_j⟩`.
pub(crate) fn joint_matrix(rho: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Vec<f64> {
    let d = a.cols();
    let bs: Vec<Vec<C64>> = (0..d).map(|j| b.column(j)).collect();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let ai = a.column(i);
        for bj in &bs {
            out.push(rho.quadratic_form(&kron_vec(&ai, bj)).re);
        }
    }
    out
}

/// Joint outcome distribution, row-major `P[i*d + j]`.
pub fn joint_probabilities(rho: &DensityMatrix, a: &Basis, b: &Basis) -> Result<Vec<f64>> {
    check_bipartite(rho, a.dim(), b.dim())?;
    Ok(joint_matrix(rho.matrix(), &a.matrix(), &b.matrix()))
}

/// `C_{a,b} = Σ_i P(i, i)`.
pub fn mutual_predictability(rho: &DensityMatrix, a: &Basis, b: &Basis) -> Result<f64> {
    check_bipartite(rho, a.dim(), b.dim())?;
    Ok(diagonal_predictability(rho.matrix(), &a.matrix(), &b.matrix()))
}

/// Pure-state shortcut `Σ_i |⟨a_i ⊗ b_i|ψ⟩|²`.
pub fn mutual_predictability_pure(psi: &PureState, a: &Basis, b: &Basis) -> Result<f64> {
    if a.dim() != b.dim() || psi.dim() != a.dim() * b.dim() {
        return Err(Error::domain("state and basis dimensions do not match"));
    }
    Ok(a.vectors()
        .iter()
        .zip(b.vectors())
        .map(|(x, y)| x.kron(y).inner(psi).norm_sqr())
        .sum())
}

/// Best relabelling `max_σ Σ_i P(i, σ(i))` of the outcomes of `b`.
///
/// Relabelling keeps each basis as a set, so the maximised value can be used
/// in the separable bound unchanged.
pub fn optimal_relabeling(rho: &DensityMatrix, a: &Basis, b: &Basis) -> Result<(f64, Vec<usize>)> {
    let p = joint_probabilities(rho, a, b)?;
    Ok(max_weight_assignment(&p, a.dim()))
}

/// Evaluation switches for [`i_m_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ImOptions {
    /// Optimise the outcome labelling of each basis pair independently.
    pub relabel: bool,
}

/// `I_m` with fixed labelling.
pub fn i_m(rho: &DensityMatrix, mub_a: &MubSet, mub_b: &MubSet) -> Result<CriterionReport> {
    i_m_with(rho, mub_a, mub_b, ImOptions::default())
}

/// `I_m` using `mub` on A and its complex conjugate on B.
pub fn i_m_conjugate(rho: &DensityMatrix, mub: &MubSet, options: ImOptions) -> Result<CriterionReport> {
    i_m_with(rho, mub, &mub.conjugate(), options)
}

pub fn i_m_with(rho: &DensityMatrix, mub_a: &MubSet, mub_b: &MubSet, options: ImOptions) -> Result<CriterionReport> {
    if mub_a.dim() != mub_b.dim() || mub_a.len() != mub_b.len() {
        return Err(Error::domain(format!(
            "MUB sets differ: {} bases in d = {} vs {} bases in d = {}",
            mub_a.len(),
            mub_a.dim(),
            mub_b.len(),
            mub_b.dim()
        )));
    }
    check_bipartite(rho, mub_a.dim(), mub_b.dim())?;
    let mats: Vec<(ComplexMatrix, ComplexMatrix)> = mub_a
        .bases()
        .iter()
        .zip(mub_b.bases())
        .map(|(a, b)| (a.matrix(), b.matrix()))
        .collect();
    Ok(evaluate_pairs(rho.matrix(), &mats, options.relabel))
}

/// Core evaluator on basis matrices; shared with the optimiser.
pub(crate) fn evaluate_pairs(
    rho: &ComplexMatrix,
    pairs: &[(ComplexMatrix, ComplexMatrix)],
    relabel: bool,
) -> CriterionReport {
    let d = pairs[0].0.cols();
    let bound = separable_bound(pairs.len(), d);
    if relabel {
        let (values, perms): (Vec<f64>, Vec<Vec<usize>>) = pairs
            .iter()
            .map(|(a, b)| max_weight_assignment(&joint_matrix(rho, a, b), d))
            .unzip();
        CriterionReport::new(values, bound, VIOLATION_MARGIN).with_relabelings(perms)
    } else {
        let values = pairs.iter().map(|(a, b)| diagonal_predictability(rho, a, b)).collect();
        CriterionReport::new(values, bound, VIOLATION_MARGIN)
    }
}
