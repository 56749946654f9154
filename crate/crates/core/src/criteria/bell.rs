//! Weyl operators, the `d²` Bell states and Bell-diagonal mixtures.

use rand::Rng;
use serde::Serialize;

use super::{evaluate_pairs, CriterionReport};
use crate::error::{Error, Result};
use crate::mubs::MubSet;
use crate::qmath::{root_of_unity, ComplexMatrix, DensityMatrix, PureState, C64};

fn check_indices(d: usize, k: usize, l: usize) -> Result<()> {
    if d == 0 || k >= d || l >= d {
        return Err(Error::domain(format!("Weyl indices ({k}, {l}) out of range for d = {d}")));
    }
    Ok(())
}

/// `W_{k,l} = Σ_s ω^{sk} |s⟩⟨s+l mod d|`.
pub fn weyl_operator(d: usize, k: usize, l: usize) -> Result<ComplexMatrix> {
    check_indices(d, k, l)?;
    let mut w = ComplexMatrix::zeros(d, d);
    for s in 0..d {
        w[(s, (s + l) % d)] = root_of_unity((s * k) as i64, d);
    }
    Ok(w)
}

/// `|Ω_{k,l}⟩ = (W_{k,l} ⊗ 𝟙)|Ω_{0,0}⟩` with `|Ω_{0,0}⟩ = Σ_i |ii⟩/√d`.
pub fn bell_state(d: usize, k: usize, l: usize) -> Result<PureState> {
    check_indices(d, k, l)?;
    let norm = 1.0 / (d as f64).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for s in 0..d {
        amps[s * d + (s + l) % d] = root_of_unity((s * k) as i64, d) * norm;
    }
    PureState::new(amps)
}

/// Weights `c_{k,l}` of a point of the Bell-diagonal simplex, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BellDiagonalCoeffs {
    d: usize,
    c: Vec<f64>,
}

impl BellDiagonalCoeffs {
    pub fn new(d: usize, c: Vec<f64>) -> Result<Self> {
        if d == 0 || c.len() != d * d {
            return Err(Error::domain(format!("expected {} coefficients", d * d)));
        }
        if c.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::domain("Bell-diagonal weights must be non-negative"));
        }
        let total: f64 = c.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("Bell-diagonal weights sum to {total}, expected 1")));
        }
        Ok(Self { d, c })
    }

    /// Uniform point of the simplex (flat Dirichlet).
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        let raw: Vec<f64> = (0..d * d).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let total: f64 = raw.iter().sum();
        let mut c: Vec<f64> = raw.iter().map(|x| x / total).collect();
        // absorb rounding so the weights sum to 1 to machine precision
        let drift = 1.0 - c.iter().sum::<f64>();
        c[0] = (c[0] + drift).max(0.0);
        Self::new(d, c)
    }

    pub fn point(d: usize, k: usize, l: usize) -> Result<Self> {
        check_indices(d, k, l)?;
        let mut c = vec![0.0; d * d];
        c[k * d + l] = 1.0;
        Self::new(d, c)
    }

    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(d, vec![1.0 / (d * d) as f64; d * d])
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn weight(&self, k: usize, l: usize) -> f64 {
        self.c[k * self.d + l]
    }

    pub fn weights(&self) -> &[f64] {
        &self.c
    }

    /// Largest weight `h`.
    pub fn max_weight(&self) -> f64 {
        self.c.iter().copied().fold(0.0, f64::max)
    }
}

pub fn bell_diagonal_state(coeffs: &BellDiagonalCoeffs) -> Result<DensityMatrix> {
    let d = coeffs.d;
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for k in 0..d {
        for l in 0..d {
            let c = coeffs.weight(k, l);
            if c == 0.0 {
                continue;
            }
            let psi = bell_state(d, k, l)?;
            let a = psi.amplitudes();
            // each Bell state has exactly d non-zero amplitudes
            let support: Vec<usize> = (0..d * d).filter(|&i| a[i].norm() > 0.0).collect();
            for &i in &support {
                for &j in &support {
                    m[(i, j)] += a[i] * a[j].conj() * c;
                }
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Result of [`enclosure_check`].
#[derive(Clone, Debug, Serialize)]
pub struct EnclosureReport {
    /// `I_{d+1}` at the best Weyl alignment, with the induced relabellings.
    pub report: CriterionReport,
    /// Largest Bell weight `h`.
    pub h: f64,
    /// `1 + h·d`.
    pub closed_form: f64,
    /// `(k, l)` of the Weyl operator realising the alignment.
    pub alignment: (usize, usize),
    /// `I_{d+1}` when every basis pair is relabelled independently; never
    /// smaller than the aligned value.
    pub independent_relabel_value: f64,
}

/// Evaluates `I_{d+1}` on a Bell-diagonal state with `mub` on A and its
/// conjugate on B.
///
/// The outcome labels are aligned jointly across all bases: for each Weyl
/// operator `W_{k,l}` the A-side bases are replaced by `W_{k,l}` applied to
/// them, which for a Weyl-covariant complete set permutes the vectors of every
/// basis. The best of the `d²` alignments equals `1 + h·d`, so the verdict is
/// `h > 1/d`.
pub fn enclosure_check(coeffs: &BellDiagonalCoeffs, mub: &MubSet) -> Result<EnclosureReport> {
    let d = coeffs.dim();
    if mub.dim() != d {
        return Err(Error::domain(format!("MUB set has d = {}, coefficients d = {d}", mub.dim())));
    }
    if !mub.is_complete() {
        return Err(Error::domain(format!(
            "enclosure check needs a complete set of {} bases, got {}",
            d + 1,
            mub.len()
        )));
    }
    let rho = bell_diagonal_state(coeffs)?;
    let pairs: Vec<(ComplexMatrix, ComplexMatrix)> = mub
        .bases()
        .iter()
        .map(|b| (b.matrix(), b.conjugate().matrix()))
        .collect();

    let mut best: Option<(f64, (usize, usize), CriterionReport, ComplexMatrix)> = None;
    for k in 0..d {
        for l in 0..d {
            let w = weyl_operator(d, k, l)?;
            let rotated: Vec<(ComplexMatrix, ComplexMatrix)> =
                pairs.iter().map(|(a, b)| (&w * a, b.clone())).collect();
            let r = evaluate_pairs(rho.matrix(), &rotated, false);
            if best.as_ref().is_none_or(|(v, ..)| r.value > *v) {
                best = Some((r.value, (k, l), r, w));
            }
        }
    }
    let (_, alignment, report, w) = best.expect("d >= 1");
    let report = match induced_relabelings(&w, &pairs) {
        Some(perms) => report.with_relabelings(perms),
        None => report,
    };
    let h = coeffs.max_weight();
    let independent_relabel_value = evaluate_pairs(rho.matrix(), &pairs, true).value;
    Ok(EnclosureReport {
        report,
        h,
        closed_form: 1.0 + h * d as f64,
        alignment,
        independent_relabel_value,
    })
}

/// For each basis, the permutation `σ` with `W|a_{σ⁻¹(j)}⟩ ∝ |a_j⟩`, written
/// in the `Σ_i P(i, σ(i))` convention; `None` if `W` does not permute some
/// basis.
fn induced_relabelings(w: &ComplexMatrix, pairs: &[(ComplexMatrix, ComplexMatrix)]) -> Option<Vec<Vec<usize>>> {
    pairs
        .iter()
        .map(|(a, _)| {
            let d = a.cols();
            let overlaps = &a.dagger() * &(w * a);
            let mut sigma = vec![usize::MAX; d];
            for i in 0..d {
                let j = (0..d).find(|&j| (overlaps[(j, i)].norm() - 1.0).abs() < 1e-8)?;
                // B label i now pairs with A label j
                sigma[j] = i;
            }
            sigma.iter().all(|&s| s < d).then_some(sigma)
        })
        .collect()
}
