use nalgebra::SymmetricEigen;

use super::{inner, kron_vec, norm, ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::settings::Settings;

/// Normalised state vector `|ψ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Accepts amplitudes whose Euclidean norm is 1 within the structural
    /// tolerance.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let tol = Settings::default().structural_tol;
        check_finite(&amplitudes)?;
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > tol {
            return Err(Error::domain(format!("state norm {n} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        check_finite(&amplitudes)?;
        let n = norm(&amplitudes);
        if n == 0.0 {
            return Err(Error::domain("cannot normalise the zero vector"));
        }
        for a in &mut amplitudes {
            *a /= n;
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis vector `|i⟩`.
    pub fn basis_state(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::domain(format!("basis index {i} out of range for dim {dim}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[i] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: amps })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn kron(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    pub fn conj(&self) -> PureState {
        PureState {
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn apply(&self, op: &ComplexMatrix) -> Result<PureState> {
        if op.cols() != self.dim() || op.rows() != self.dim() {
            return Err(Error::domain("operator and state dimensions differ"));
        }
        PureState::normalized(op.mul_vec(&self.amplitudes))
    }

    /// Equality of rays: `|⟨ψ|φ⟩| = 1` within `tol`. Global phases are ignored.
    pub fn same_ray(&self, other: &PureState, tol: f64) -> bool {
        self.dim() == other.dim() && (1.0 - self.inner(other).norm()).abs() <= tol
    }

    pub fn projector(&self) -> DensityMatrix {
        let d = self.dim();
        let m = ComplexMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityMatrix { matrix: m }
    }
}

fn check_finite(v: &[C64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::domain("state must have dimension >= 1"));
    }
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::domain("state has non-finite amplitudes"));
    }
    Ok(())
}

/// Outcome of [`validate_density_matrix`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub accepted: bool,
}

pub fn validate_density_matrix(m: &ComplexMatrix) -> Result<ValidationReport> {
    validate_density_matrix_with(m, &Settings::default())
}

/// Reports the Hermiticity defect, `|tr ρ - 1|` and the smallest eigenvalue of
/// the Hermitian part. Accepts iff all are within `settings`.
pub fn validate_density_matrix_with(m: &ComplexMatrix, settings: &Settings) -> Result<ValidationReport> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::domain(format!(
            "density matrix must be square and non-empty, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::domain("density matrix has non-finite entries"));
    }
    let hermiticity_defect = m.hermiticity_defect();
    let trace_defect = (m.trace() - C64::new(1.0, 0.0)).norm();
    let min_eigenvalue = hermitian_eigenvalues(m).into_iter().fold(f64::INFINITY, f64::min);
    let accepted = hermiticity_defect <= settings.structural_tol
        && trace_defect <= settings.structural_tol
        && min_eigenvalue >= -settings.spectral_tol;
    Ok(ValidationReport {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
        accepted,
    })
}

/// Eigenvalues (ascending) of the Hermitian part of `m`.
fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let h = &(m + &m.dagger()).scale_real(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(h.to_nalgebra()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Validated density operator `ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps `matrix`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let report = validate_density_matrix(&matrix)?;
        if !report.accepted {
            return Err(Error::domain(format!(
                "not a density matrix: hermiticity defect {:e}, trace defect {:e}, min eigenvalue {:e}",
                report.hermiticity_defect, report.trace_defect, report.min_eigenvalue
            )));
        }
        Ok(Self { matrix })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        psi.projector()
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be >= 1"));
        }
        Ok(Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `⟨v|ρ|v⟩` (real for Hermitian ρ).
    pub fn expectation(&self, v: &[C64]) -> f64 {
        self.matrix.quadratic_form(v).re
    }

    /// `p·a + (1-p)·b` for `p ∈ [0, 1]`.
    pub fn mix(p: f64, a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("mixing weight {p} outside [0, 1]")));
        }
        if a.dim() != b.dim() {
            return Err(Error::domain("mixed states have different dimensions"));
        }
        Ok(Self {
            matrix: &a.matrix.scale_real(p) + &b.matrix.scale_real(1.0 - p),
        })
    }

    /// `U ρ U†`.
    pub fn conjugated_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::domain("unitary and state dimensions differ"));
        }
        Ok(Self {
            matrix: &(u * &self.matrix) * &u.dagger(),
        })
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::isotropic_state;

    #[test]
    fn maximally_mixed_is_accepted() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let r = validate_density_matrix(rho.matrix()).unwrap();
        assert!(r.accepted);
        assert!((r.min_eigenvalue - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn off_diagonal_outer_product_is_rejected() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        let r = validate_density_matrix(&m).unwrap();
        assert!(!r.accepted);
        assert!(r.hermiticity_defect > 0.5);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn isotropic_state_is_accepted() {
        let rho = isotropic_state(3, 0.9).unwrap();
        assert!(validate_density_matrix(rho.matrix()).unwrap().accepted);
    }

    #[test]
    fn non_square_is_a_domain_error() {
        assert!(matches!(
            validate_density_matrix(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let m = ComplexMatrix::diagonal(&[C64::new(1.1, 0.0), C64::new(-0.1, 0.0)]);
        let r = validate_density_matrix(&m).unwrap();
        assert!(!r.accepted);
        assert!((r.min_eigenvalue + 0.1).abs() < 1e-12);
    }

    #[test]
    fn pure_state_norm_is_checked() {
        assert!(PureState::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        let psi = PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert!((norm(psi.amplitudes()) - 1.0).abs() < 1e-15);
        assert!(PureState::normalized(vec![C64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn same_ray_ignores_global_phase() {
        let psi = PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let phase = C64::from_polar(1.0, 0.7);
        let phi = PureState::new(psi.amplitudes().iter().map(|z| z * phase).collect()).unwrap();
        assert!(psi.same_ray(&phi, 1e-12));
        assert_ne!(psi, phi);
    }
}
