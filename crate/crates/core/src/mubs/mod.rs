//! Mutually unbiased bases: constructions, conjugation and verification.
//!
//! Bases `B_k = {|i_k⟩}` and `B_l` are mutually unbiased when every cross
//! overlap satisfies `|⟨i_k|j_l⟩|² = 1/d`. A set of `m` pairwise unbiased
//! bases has `m ≤ d + 1`; the bound is attained for prime-power `d`.

mod construct;
mod field;

pub use construct::{construct_mub_set, fourier_pair};
pub use field::{gf_build, is_prime, prime_power, FieldTable};

use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, PureState, C64};
use crate::settings::STRUCTURAL_TOL;

/// Amplitudes below this modulus are skipped when fixing the canonical phase.
const PHASE_FLOOR: f64 = 1e-12;

/// Orthonormal basis `{|0⟩, …, |d-1⟩}` of `C^d`, each vector carrying the
/// canonical phase (first non-negligible amplitude real and positive).
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    vectors: Vec<PureState>,
}

impl Basis {
    /// Checks orthonormality within the structural tolerance.
    pub fn new(vectors: Vec<PureState>) -> Result<Self> {
        let basis = Self::new_unchecked(vectors)?;
        let report = verify_mub_set(&[basis.matrix()], STRUCTURAL_TOL)?;
        if report.worst_orthonormality_defect > STRUCTURAL_TOL {
            return Err(Error::Verification(format!(
                "basis is not orthonormal (defect {:e})",
                report.worst_orthonormality_defect
            )));
        }
        Ok(basis)
    }

    /// Only checks shapes; orthonormality is the caller's responsibility.
    pub(crate) fn new_unchecked(vectors: Vec<PureState>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 || vectors.iter().any(|v| v.dim() != d) {
            return Err(Error::domain("a basis of C^d needs d vectors of dimension d"));
        }
        Ok(Self {
            vectors: vectors.into_iter().map(canonical_phase).collect(),
        })
    }

    /// Basis whose vectors are the columns of `m`.
    pub fn from_columns(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::domain("basis matrix must be square"));
        }
        let vectors = (0..m.cols())
            .map(|j| PureState::new(m.column(j)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vectors)
    }

    pub fn computational(d: usize) -> Self {
        Self {
            vectors: (0..d).map(|i| PureState::basis_state(d, i).expect("index in range")).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &PureState {
        &self.vectors[i]
    }

    /// Matrix with the basis vectors as columns.
    pub fn matrix(&self) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, d, |i, j| self.vectors[j].amplitudes()[i])
    }

    /// Entrywise complex conjugate `{|i⟩*}`.
    pub fn conjugate(&self) -> Basis {
        Basis {
            vectors: self.vectors.iter().map(|v| canonical_phase(v.conj())).collect(),
        }
    }

    /// Outcome distribution `|⟨i|ψ⟩|²`.
    pub fn probabilities(&self, psi: &PureState) -> Result<Vec<f64>> {
        if psi.dim() != self.dim() {
            return Err(Error::domain("state and basis dimensions differ"));
        }
        Ok(self.vectors.iter().map(|v| v.inner(psi).norm_sqr()).collect())
    }
}

fn canonical_phase(v: PureState) -> PureState {
    let Some(first) = v.amplitudes().iter().find(|z| z.norm() > PHASE_FLOOR).copied() else {
        return v;
    };
    let phase = first.conj() / first.norm();
    let amps: Vec<C64> = v.amplitudes().iter().map(|z| z * phase).collect();
    PureState::new(amps).unwrap_or(v)
}

/// Collection of pairwise mutually unbiased bases in one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct MubSet {
    dim: usize,
    bases: Vec<Basis>,
}

impl MubSet {
    /// Verifies the set at the default tolerance and rejects it on failure.
    pub fn new(bases: Vec<Basis>) -> Result<Self> {
        let set = Self::new_unchecked(bases)?;
        let report = set.verify(STRUCTURAL_TOL)?;
        if !report.pass {
            return Err(Error::Verification(report.summary()));
        }
        Ok(set)
    }

    pub(crate) fn new_unchecked(bases: Vec<Basis>) -> Result<Self> {
        let dim = bases.first().map(Basis::dim).ok_or_else(|| Error::domain("empty MUB set"))?;
        if bases.iter().any(|b| b.dim() != dim) {
            return Err(Error::domain("bases of a MUB set must share one dimension"));
        }
        if bases.len() > dim + 1 {
            return Err(Error::domain(format!(
                "{} bases exceed the maximum d + 1 = {} in dimension {dim}",
                bases.len(),
                dim + 1
            )));
        }
        Ok(Self { dim, bases })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of bases `m`.
    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.len() == self.dim + 1
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn basis(&self, k: usize) -> &Basis {
        &self.bases[k]
    }

    /// The first `m` bases, which are again mutually unbiased.
    pub fn take(&self, m: usize) -> Result<MubSet> {
        if m == 0 || m > self.len() {
            return Err(Error::domain(format!("cannot take {m} of {} bases", self.len())));
        }
        Ok(MubSet {
            dim: self.dim,
            bases: self.bases[..m].to_vec(),
        })
    }

    pub fn conjugate(&self) -> MubSet {
        conjugate_mub_set(self)
    }

    pub fn verify(&self, tolerance: f64) -> Result<MubVerificationReport> {
        let mats: Vec<ComplexMatrix> = self.bases.iter().map(Basis::matrix).collect();
        verify_mub_set(&mats, tolerance)
    }
}

/// Entrywise conjugation of every vector; `|z̄| = |z|` keeps the set unbiased.
pub fn conjugate_mub_set(set: &MubSet) -> MubSet {
    MubSet {
        dim: set.dim,
        bases: set.bases.iter().map(Basis::conjugate).collect(),
    }
}

/// Result of [`verify_mub_set`].
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct MubVerificationReport {
    pub pass: bool,
    /// `max |⟨i_k|j_k⟩ - δ_ij|` over all bases.
    pub worst_orthonormality_defect: f64,
    /// `max ||⟨i_k|j_l⟩|² - 1/d|` over all pairs `k ≠ l`.
    pub worst_unbiasedness_defect: f64,
    /// Basis pair `(k, l)` holding the worst defect above tolerance; `k == l`
    /// for an orthonormality failure.
    pub offending: Option<(usize, usize)>,
    pub tolerance: f64,
}

impl MubVerificationReport {
    pub fn summary(&self) -> String {
        format!(
            "{}: orthonormality defect {:e}, unbiasedness defect {:e}{}",
            if self.pass { "pass" } else { "fail" },
            self.worst_orthonormality_defect,
            self.worst_unbiasedness_defect,
            self.offending.map_or(String::new(), |(k, l)| format!(", worst pair ({k}, {l})"))
        )
    }
}

/// Checks candidate bases, given as square matrices whose columns are the
/// basis vectors, for orthonormality and pairwise unbiasedness. Reports the
/// worst defects instead of stopping at the first failure.
pub fn verify_mub_set(bases: &[ComplexMatrix], tolerance: f64) -> Result<MubVerificationReport> {
    let d = bases.first().map(ComplexMatrix::rows).ok_or_else(|| Error::domain("no bases supplied"))?;
    if bases.iter().any(|b| b.rows() != d || b.cols() != d) || d == 0 {
        return Err(Error::domain("all candidate bases must be d x d matrices of one dimension"));
    }
    let daggers: Vec<ComplexMatrix> = bases.iter().map(ComplexMatrix::dagger).collect();
    let inv_d = 1.0 / d as f64;

    let mut worst_orth = 0.0f64;
    let mut orth_pair = None;
    for (k, b) in bases.iter().enumerate() {
        let defect = (&daggers[k] * b).max_abs_diff(&ComplexMatrix::identity(d));
        if defect > worst_orth {
            worst_orth = defect;
            orth_pair = Some((k, k));
        }
    }
    let mut worst_unb = 0.0f64;
    let mut unb_pair = None;
    for (k, dag) in daggers.iter().enumerate() {
        for (l, b) in bases.iter().enumerate().skip(k + 1) {
            let g = dag * b;
            let defect = g.as_slice().iter().map(|z| (z.norm_sqr() - inv_d).abs()).fold(0.0, f64::max);
            if defect > worst_unb {
                worst_unb = defect;
                unb_pair = Some((k, l));
            }
        }
    }
    let orth_ok = worst_orth <= tolerance;
    let unb_ok = worst_unb <= tolerance;
    let offending = match (orth_ok, unb_ok) {
        (true, true) => None,
        (false, true) => orth_pair,
        (true, false) => unb_pair,
        (false, false) => {
            if worst_orth >= worst_unb {
                orth_pair
            } else {
                unb_pair
            }
        }
    };
    Ok(MubVerificationReport {
        pass: orth_ok && unb_ok,
        worst_orthonormality_defect: worst_orth,
        worst_unbiasedness_defect: worst_unb,
        offending,
        tolerance,
    })
}

/// `Σ_k Σ_i |⟨i_k|ψ⟩|⁴`, bounded by `1 + (m-1)/d` for any `ψ`.
pub fn quartic_sum(psi: &PureState, set: &MubSet) -> Result<f64> {
    if psi.dim() != set.dim() {
        return Err(Error::domain("state and MUB set dimensions differ"));
    }
    let mut total = 0.0;
    for b in set.bases() {
        total += b.probabilities(psi)?.iter().map(|p| p * p).sum::<f64>();
    }
    Ok(total)
}
