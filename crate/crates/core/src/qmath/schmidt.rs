use nalgebra::DMatrix;

use super::{PureState, C64};
use crate::error::{Error, Result};

/// Coefficients below this are treated as zero and dropped.
const COEFFICIENT_FLOOR: f64 = 1e-12;

/// `|ψ⟩ = Σ_i λ_i |a_i⟩ ⊗ |b_i⟩` with `λ` sorted descending.
///
/// Only the `rank` vectors belonging to non-zero coefficients are kept.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub basis_a: Vec<PureState>,
    pub basis_b: Vec<PureState>,
    pub dims: (usize, usize),
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn reconstruct(&self) -> Vec<C64> {
        let (da, db) = self.dims;
        let mut out = vec![C64::new(0.0, 0.0); da * db];
        for ((l, a), b) in self.coefficients.iter().zip(&self.basis_a).zip(&self.basis_b) {
            for (i, x) in a.amplitudes().iter().enumerate() {
                for (j, y) in b.amplitudes().iter().enumerate() {
                    out[i * db + j] += x * y * *l;
                }
            }
        }
        out
    }
}

/// Reshapes the amplitudes into a `dA×dB` matrix and takes its SVD.
pub fn schmidt_decompose(psi: &PureState, da: usize, db: usize) -> Result<SchmidtDecomposition> {
    if da == 0 || db == 0 || da.checked_mul(db) != Some(psi.dim()) {
        return Err(Error::domain(format!(
            "cannot split a {}-dimensional state as {da} x {db}",
            psi.dim()
        )));
    }
    let m = DMatrix::from_row_slice(da, db, psi.amplitudes());
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

    let mut coefficients = Vec::new();
    let mut basis_a = Vec::new();
    let mut basis_b = Vec::new();
    for k in order {
        let s = svd.singular_values[k];
        if s <= COEFFICIENT_FLOOR {
            continue;
        }
        coefficients.push(s);
        // M = Σ s_k u_k v_k†, so the B-side vector is the k-th row of V†.
        basis_a.push(PureState::normalized(u.column(k).iter().copied().collect())?);
        basis_b.push(PureState::normalized(v_t.row(k).iter().copied().collect())?);
    }
    Ok(SchmidtDecomposition {
        coefficients,
        basis_a,
        basis_b,
        dims: (da, db),
    })
}
