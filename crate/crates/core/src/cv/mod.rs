//! Two-mode squeezed state measured with two-outcome (sign) detectors in
//! position and momentum.
//!
//! `|ψ_S(x₁,x₂)|² = (2/π) exp(-e^{-2r}(x₁+x₂)² - e^{2r}(x₁-x₂)²)` and the
//! momentum density swaps the roles of sum and difference. Separable states
//! obey `C_xx + C_pp ≤ 1.5`.
//!
//! Quadrant probabilities are computed twice: by nested adaptive quadrature
//! over the sign regions, and by Sheppard's formula for a centered bivariate
//! normal, `P(+,+) = 1/4 + asin(ρ)/(2π)`.

pub mod quad;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::CriterionReport;
use crate::error::{Error, Result};
use quad::{integrate_half_line, Tolerance};

/// Separable bound for two sign-binned measurements.
pub const CV_BOUND: f64 = 1.5;
/// `I` must exceed the bound by more than this to count as a violation.
pub const CV_VIOLATION_MARGIN: f64 = 1e-7;
/// Reference onset value, reported next to the computed threshold.
pub const PUBLISHED_THRESHOLD: f64 = 0.3279;

const THRESHOLD_BRACKET: (f64, f64) = (0.0, 2.0);
const THRESHOLD_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SqueezedParams {
    r: f64,
}

impl SqueezedParams {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::domain(format!("squeezing r = {r} must be finite and >= 0")));
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Coefficients `(a, b)` of `|ψ|² ∝ exp(-a·u² - b·v²)` with
    /// `u = q₁ + q₂`, `v = q₁ - q₂`.
    fn exponents(&self, observable: Observable) -> (f64, f64) {
        let (squeezed, anti) = ((-2.0 * self.r).exp(), (2.0 * self.r).exp());
        match observable {
            Observable::Position => (squeezed, anti),
            Observable::Momentum => (anti, squeezed),
        }
    }

    /// Correlation coefficient of the two quadratures.
    pub fn correlation(&self, observable: Observable) -> f64 {
        let (a, b) = self.exponents(observable);
        (b - a) / (a + b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Position,
    Momentum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CvMethod {
    Quadrature,
    ClosedForm,
}

/// `p[s₁][s₂]` with index 0 = negative, 1 = positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BinnedProbabilities {
    pub observable: Observable,
    pub p: [[f64; 2]; 2],
}

impl BinnedProbabilities {
    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    pub fn same_sign(&self) -> f64 {
        self.p[0][0] + self.p[1][1]
    }

    pub fn opposite_sign(&self) -> f64 {
        self.p[0][1] + self.p[1][0]
    }
}

fn tolerance() -> (Tolerance, Tolerance) {
    let inner = Tolerance {
        abs: 1e-15,
        rel: 1e-12,
        max_intervals: 2000,
    };
    let outer = Tolerance {
        abs: 1e-12,
        rel: 1e-11,
        max_intervals: 2000,
    };
    (inner, outer)
}

/// `∫_ℝ dy ∫_{|y|}^{±∞} dz (1/π) exp(-c_y y² - c_z z²)`, the probability of
/// one wedge in `(u, v)` coordinates (Jacobian 1/2 included).
fn wedge(c_outer: f64, c_inner: f64, upward: bool) -> Result<f64> {
    let (tol_in, tol_out) = tolerance();
    let sigma_out = (0.5 / c_outer).sqrt();
    let sigma_in = (0.5 / c_inner).sqrt();
    let mut failure = None;
    let mut inner = |y: f64| {
        let start = if upward { y.abs() } else { -y.abs() };
        let scale = sigma_in * sigma_in / (sigma_in + y.abs());
        match integrate_half_line(|z| (-c_inner * z * z).exp(), start, upward, scale, tol_in) {
            Ok(q) => (-c_outer * y * y).exp() * q.value / PI,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let scale = sigma_out.min(sigma_in);
    let pos = integrate_half_line(&mut inner, 0.0, true, scale, tol_out)?;
    let neg = integrate_half_line(&mut inner, 0.0, false, scale, tol_out)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let achieved = pos.error + neg.error;
    if achieved > 1e-9 {
        return Err(Error::Numerical {
            message: "quadrant quadrature above accuracy target".into(),
            achieved,
        });
    }
    Ok(pos.value + neg.value)
}

/// Quadrant probabilities by nested adaptive quadrature.
pub fn squeezed_quadrant_probs(params: SqueezedParams, observable: Observable) -> Result<BinnedProbabilities> {
    let (a, b) = params.exponents(observable);
    // (+,+): u > |v|   (-,-): u < -|v|   (+,-): v > |u|   (-,+): v < -|u|
    let pp = wedge(b, a, true)?;
    let nn = wedge(b, a, false)?;
    let pn = wedge(a, b, true)?;
    let np = wedge(a, b, false)?;
    Ok(BinnedProbabilities {
        observable,
        p: [[nn, np], [pn, pp]],
    })
}

/// Quadrant probabilities from Sheppard's formula.
pub fn squeezed_quadrant_probs_closed_form(params: SqueezedParams, observable: Observable) -> BinnedProbabilities {
    let rho = params.correlation(observable);
    let same = 0.25 + rho.asin() / (2.0 * PI);
    let opposite = 0.25 - rho.asin() / (2.0 * PI);
    BinnedProbabilities {
        observable,
        p: [[same, opposite], [opposite, same]],
    }
}

fn quadrant_probs(params: SqueezedParams, observable: Observable, method: CvMethod) -> Result<BinnedProbabilities> {
    match method {
        CvMethod::Quadrature => squeezed_quadrant_probs(params, observable),
        CvMethod::ClosedForm => Ok(squeezed_quadrant_probs_closed_form(params, observable)),
    }
}

/// `C_xx` (same-sign positions) and `C_pp` (opposite-sign momenta) with the
/// bound 1.5.
pub fn cv_criterion_with(params: SqueezedParams, method: CvMethod) -> Result<CriterionReport> {
    let c_xx = quadrant_probs(params, Observable::Position, method)?.same_sign();
    let c_pp = quadrant_probs(params, Observable::Momentum, method)?.opposite_sign();
    Ok(CriterionReport::new(vec![c_xx, c_pp], CV_BOUND, CV_VIOLATION_MARGIN))
}

pub fn cv_criterion(params: SqueezedParams) -> Result<CriterionReport> {
    cv_criterion_with(params, CvMethod::Quadrature)
}

/// `r` at which `tanh 2r = 1/√2`, i.e. `I(r) = 1.5` exactly.
pub fn analytic_threshold() -> f64 {
    0.5 * 1f64.asinh()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CvThresholdReport {
    pub quadrature: f64,
    pub closed_form: f64,
    pub published: f64,
    /// `quadrature - published`.
    pub deviation: f64,
    pub paths_agree: bool,
}

fn bisect_threshold(method: CvMethod) -> Result<f64> {
    let violated = |r: f64| -> Result<bool> { Ok(cv_criterion_with(SqueezedParams::new(r)?, method)?.violated) };
    let (mut lo, mut hi) = THRESHOLD_BRACKET;
    if violated(lo)? || !violated(hi)? {
        return Err(Error::Numerical {
            message: "CV threshold not bracketed".into(),
            achieved: f64::NAN,
        });
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if violated(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Violation onset by bisection, once per evaluation path.
pub fn cv_threshold() -> Result<CvThresholdReport> {
    let (quadrature, closed_form) = rayon::join(
        || bisect_threshold(CvMethod::Quadrature),
        || bisect_threshold(CvMethod::ClosedForm),
    );
    let (quadrature, closed_form) = (quadrature?, closed_form?);
    Ok(CvThresholdReport {
        quadrature,
        closed_form,
        published: PUBLISHED_THRESHOLD,
        deviation: quadrature - PUBLISHED_THRESHOLD,
        paths_agree: (quadrature - closed_form).abs() < 1e-5,
    })
}

/// Evaluates the criterion on every grid point in parallel.
pub fn cv_scan(r_values: &[f64], method: CvMethod) -> Result<Vec<(f64, CriterionReport)>> {
    r_values
        .par_iter()
        .map(|&r| Ok((r, cv_criterion_with(SqueezedParams::new(r)?, method)?)))
        .collect()
}
