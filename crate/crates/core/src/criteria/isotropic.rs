use super::i_m;
use crate::error::{Error, Result};
use crate::mubs::MubSet;
use crate::qmath::{ComplexMatrix, DensityMatrix, C64};
use crate::settings::STRUCTURAL_TOL;

const BISECTION_TOL: f64 = 1e-9;
const BISECTION_MAX_ITER: usize = 200;

/// `ρ_I = α|φ⁺_d⟩⟨φ⁺_d| + (1-α)/d² 𝟙`, a valid state for
/// `-1/(d²-1) ≤ α ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsotropicParams {
    pub d: usize,
    pub alpha: f64,
}

impl IsotropicParams {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain("isotropic states need d >= 2"));
        }
        let lower = -1.0 / ((d * d - 1) as f64);
        if !alpha.is_finite() || alpha < lower - STRUCTURAL_TOL || alpha > 1.0 + STRUCTURAL_TOL {
            return Err(Error::domain(format!(
                "alpha = {alpha} outside the valid range [{lower}, 1] for d = {d}"
            )));
        }
        Ok(Self { d, alpha })
    }

    pub fn state(&self) -> DensityMatrix {
        let d = self.d;
        let n = d * d;
        let noise = (1.0 - self.alpha) / n as f64;
        let mut m = ComplexMatrix::identity(n).scale_real(noise);
        // |φ⁺⟩ has amplitude 1/√d on the indices i·d + i
        let w = self.alpha / d as f64;
        for i in 0..d {
            for j in 0..d {
                m[(i * d + i, j * d + j)] += C64::new(w, 0.0);
            }
        }
        DensityMatrix::from_matrix_unchecked(m)
    }
}

pub fn isotropic_state(d: usize, alpha: f64) -> Result<DensityMatrix> {
    Ok(IsotropicParams::new(d, alpha)?.state())
}

/// `m(α + (1-α)/d)`, the value of `I_m` on `ρ_I` with conjugate bases on B.
pub fn isotropic_closed_form(d: usize, m: usize, alpha: f64) -> f64 {
    m as f64 * (alpha + (1.0 - alpha) / d as f64)
}

/// Smallest `α` for which `ρ_I` violates `I_m ≤ 1 + (m-1)/d`, measured with
/// `mub` on A and its conjugate on B. Found by bisection on the violation
/// predicate of the direct evaluation; analytically `1/m`.
pub fn isotropic_threshold(mub: &MubSet) -> Result<f64> {
    let d = mub.dim();
    let m = mub.len();
    if m < 2 || d < 2 {
        return Err(Error::domain("the isotropic threshold needs at least two bases and d >= 2"));
    }
    let conj = mub.conjugate();
    let violated = |alpha: f64| -> Result<bool> { Ok(i_m(&isotropic_state(d, alpha)?, mub, &conj)?.violated) };
    let (mut lo, mut hi) = (0.0, 1.0);
    if violated(lo)? || !violated(hi)? {
        return Err(Error::Numerical {
            message: "isotropic threshold is not bracketed by [0, 1]".into(),
            achieved: f64::NAN,
        });
    }
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if violated(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
