//! Genuine multipartite entanglement of `n` qudits with `d = n`, detected
//! through anti-correlations in common mutually unbiased bases.
//!
//! The anti-correlation function `A` is the probability that all `n` local
//! outcomes are pairwise different. For `m` common MUBs every biseparable
//! state obeys `J_m = Σ_k A_k ≤ 1 + (m-1)/n`.
//!
//! Pure states are evaluated through their amplitudes (cost `n·n^{n+1}`);
//! density matrices are accepted up to `d^n ≤ 512`.

use crate::criteria::CriterionReport;
use crate::error::{Error, Result};
use crate::mubs::{construct_mub_set, Basis, MubSet};
use crate::qmath::{kron_vec, ComplexMatrix, DensityMatrix, PureState, C64};
use crate::settings::VIOLATION_MARGIN;

/// Largest Hilbert-space dimension for the density representation.
pub const MAX_MIXED_DIM: usize = 512;
/// Largest `n` for which the Aharonov state is materialised (`n^n` amplitudes).
pub const MAX_AHARONOV_PARTIES: usize = 7;

const BISECTION_TOL: f64 = 1e-9;
const BISECTION_MAX_ITER: usize = 200;

/// Per-basis anti-correlations, `J_m`, the biseparable bound and the verdict.
pub type AntiCorrReport = CriterionReport;

#[derive(Clone, Debug, PartialEq)]
pub enum StateRepr {
    Pure(PureState),
    Mixed(DensityMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultipartiteState {
    parties: usize,
    local_dim: usize,
    repr: StateRepr,
}

fn total_dim(parties: usize, local_dim: usize) -> Result<usize> {
    u32::try_from(parties)
        .ok()
        .and_then(|n| local_dim.checked_pow(n))
        .ok_or_else(|| Error::Size(format!("{local_dim}^{parties} overflows")))
}

impl MultipartiteState {
    pub fn pure(parties: usize, local_dim: usize, psi: PureState) -> Result<Self> {
        if parties == 0 || local_dim == 0 {
            return Err(Error::domain("need at least one party of dimension >= 1"));
        }
        if psi.dim() != total_dim(parties, local_dim)? {
            return Err(Error::domain(format!(
                "state of dimension {} is not {local_dim}^{parties}",
                psi.dim()
            )));
        }
        Ok(Self {
            parties,
            local_dim,
            repr: StateRepr::Pure(psi),
        })
    }

    pub fn mixed(parties: usize, local_dim: usize, rho: DensityMatrix) -> Result<Self> {
        if parties == 0 || local_dim == 0 {
            return Err(Error::domain("need at least one party of dimension >= 1"));
        }
        let dim = total_dim(parties, local_dim)?;
        if dim > MAX_MIXED_DIM {
            return Err(Error::Size(format!(
                "density representation limited to dimension {MAX_MIXED_DIM}, got {dim}"
            )));
        }
        if rho.dim() != dim {
            return Err(Error::domain(format!(
                "density matrix of dimension {} is not {local_dim}^{parties}",
                rho.dim()
            )));
        }
        Ok(Self {
            parties,
            local_dim,
            repr: StateRepr::Mixed(rho),
        })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    /// Density representation (materialises `|ψ⟩⟨ψ|` for pure states).
    pub fn to_density(&self) -> Result<DensityMatrix> {
        match &self.repr {
            StateRepr::Mixed(rho) => Ok(rho.clone()),
            StateRepr::Pure(psi) => {
                if psi.dim() > MAX_MIXED_DIM {
                    return Err(Error::Size(format!("dimension {} exceeds {MAX_MIXED_DIM}", psi.dim())));
                }
                Ok(psi.projector())
            }
        }
    }

    /// Applies the same single-qudit unitary to every party.
    pub fn rotate_all(&self, u: &ComplexMatrix) -> Result<Self> {
        let (n, d) = (self.parties, self.local_dim);
        if u.rows() != d || u.cols() != d {
            return Err(Error::domain("local unitary has the wrong dimension"));
        }
        let repr = match &self.repr {
            StateRepr::Pure(psi) => {
                let mut amps = psi.amplitudes().to_vec();
                for party in 0..n {
                    amps = apply_local(&amps, n, d, party, u);
                }
                StateRepr::Pure(PureState::normalized(amps)?)
            }
            StateRepr::Mixed(rho) => {
                let mut full = u.clone();
                for _ in 1..n {
                    full = crate::qmath::kron(&full, u)?;
                }
                StateRepr::Mixed(rho.conjugated_by(&full)?)
            }
        };
        Ok(Self { repr, ..*self })
    }
}

/// Applies `op` to tensor factor `party` of an `n`-qudit amplitude vector.
fn apply_local(amps: &[C64], n: usize, d: usize, party: usize, op: &ComplexMatrix) -> Vec<C64> {
    let stride = d.pow((n - 1 - party) as u32);
    let outer = d.pow(party as u32);
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    let mut fiber = vec![C64::new(0.0, 0.0); d];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * d * stride + s;
            for (k, f) in fiber.iter_mut().enumerate() {
                *f = amps[base + k * stride];
            }
            for i in 0..d {
                let row = op.row(i);
                out[base + i * stride] = row.iter().zip(&fiber).map(|(a, b)| a * b).sum();
            }
        }
    }
    out
}

/// Reorders the tensor factors: factor `k` of the input becomes factor
/// `perm[k]` of the output.
pub fn permute_parties(psi: &PureState, n: usize, d: usize, perm: &[usize]) -> Result<PureState> {
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if perm.len() != n || sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::domain("perm must be a permutation of the parties"));
    }
    if psi.dim() != total_dim(n, d)? {
        return Err(Error::domain("state dimension does not match parties"));
    }
    let mut out = vec![C64::new(0.0, 0.0); psi.dim()];
    let mut digits = vec![0usize; n];
    for (idx, amp) in psi.amplitudes().iter().enumerate() {
        let mut rest = idx;
        for k in (0..n).rev() {
            digits[k] = rest % d;
            rest /= d;
        }
        let mut target = vec![0usize; n];
        for k in 0..n {
            target[perm[k]] = digits[k];
        }
        let t = target.iter().fold(0, |acc, &x| acc * d + x);
        out[t] = *amp;
    }
    PureState::new(out)
}

/// Sign of the permutation `indices` of `0..n`, or 0 on a repeated index.
pub fn levi_civita(indices: &[usize]) -> Result<i8> {
    let n = indices.len();
    if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::domain(format!("index {bad} out of range 0..{n}")));
    }
    let mut seen = vec![false; n];
    for &i in indices {
        if seen[i] {
            return Ok(0);
        }
        seen[i] = true;
    }
    let inversions = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| indices[i] > indices[j])
        .count();
    Ok(if inversions % 2 == 0 { 1 } else { -1 })
}

/// Flat indices of `n`-digit base-`n` tuples with pairwise distinct digits.
fn distinct_tuples(n: usize) -> Vec<usize> {
    let total = n.pow(n as u32);
    (0..total)
        .filter(|&idx| {
            let mut rest = idx;
            let mut mask = 0u64;
            for _ in 0..n {
                let bit = 1u64 << (rest % n);
                if mask & bit != 0 {
                    return false;
                }
                mask |= bit;
                rest /= n;
            }
            true
        })
        .collect()
}

/// `|𝒮_n⟩ = Σ ε_{j…l} |j…l⟩ / √(n!)`, the totally antisymmetric state of `n`
/// qudits of dimension `n`.
pub fn aharonov_state(n: usize) -> Result<MultipartiteState> {
    if !(2..=MAX_AHARONOV_PARTIES).contains(&n) {
        return Err(Error::Size(format!(
            "Aharonov state supported for 2 <= n <= {MAX_AHARONOV_PARTIES}, got {n}"
        )));
    }
    let total = n.pow(n as u32);
    let mut amps = vec![C64::new(0.0, 0.0); total];
    let norm = 1.0 / (factorial(n) as f64).sqrt();
    let mut digits = vec![0usize; n];
    for idx in distinct_tuples(n) {
        let mut rest = idx;
        for k in (0..n).rev() {
            digits[k] = rest % n;
            rest /= n;
        }
        amps[idx] = C64::new(levi_civita(&digits)? as f64 * norm, 0.0);
    }
    MultipartiteState::pure(n, n, PureState::new(amps)?)
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// `A = Σ_{|ε|=1} ⟨j_a … l_z|ρ|j_a … l_z⟩` with one basis per party.
pub fn anticorrelation(state: &MultipartiteState, bases: &[Basis]) -> Result<f64> {
    let (n, d) = (state.parties, state.local_dim);
    if d != n {
        return Err(Error::domain(format!("anti-correlation needs d = n, got d = {d}, n = {n}")));
    }
    if bases.len() != n || bases.iter().any(|b| b.dim() != d) {
        return Err(Error::domain(format!("need {n} bases of dimension {d}")));
    }
    let tuples = distinct_tuples(n);
    match &state.repr {
        StateRepr::Pure(psi) => {
            let mut amps = psi.amplitudes().to_vec();
            for (party, b) in bases.iter().enumerate() {
                amps = apply_local(&amps, n, d, party, &b.matrix().dagger());
            }
            Ok(tuples.iter().map(|&i| amps[i].norm_sqr()).sum())
        }
        StateRepr::Mixed(rho) => {
            let columns: Vec<ComplexMatrix> = bases.iter().map(Basis::matrix).collect();
            let mut digits = vec![0usize; n];
            let mut total = 0.0;
            for &idx in &tuples {
                let mut rest = idx;
                for k in (0..n).rev() {
                    digits[k] = rest % n;
                    rest /= n;
                }
                let v = digits
                    .iter()
                    .zip(&columns)
                    .skip(1)
                    .fold(columns[0].column(digits[0]), |acc, (&j, m)| kron_vec(&acc, &m.column(j)));
                total += rho.expectation(&v);
            }
            Ok(total)
        }
    }
}

/// Biseparable bound `1 + (m-1)/n`.
pub fn biseparable_bound(m: usize, n: usize) -> f64 {
    1.0 + (m as f64 - 1.0) / n as f64
}

/// `J_m = Σ_k A(B_k, …, B_k)` with the same basis on every party.
pub fn j_m(state: &MultipartiteState, mub: &MubSet) -> Result<AntiCorrReport> {
    let n = state.parties;
    if mub.dim() != n {
        return Err(Error::domain(format!("MUB dimension {} differs from n = {n}", mub.dim())));
    }
    let per_basis = mub
        .bases()
        .iter()
        .map(|b| anticorrelation(state, &vec![b.clone(); n]))
        .collect::<Result<Vec<_>>>()?;
    Ok(CriterionReport::new(per_basis, biseparable_bound(mub.len(), n), VIOLATION_MARGIN))
}

/// `J_m` of `α|ψ⟩⟨ψ| + (1-α) 𝟙/n^n` by linearity: white noise contributes
/// `n!/n^n` per basis.
pub fn j_m_white_noise(state: &MultipartiteState, alpha: f64, mub: &MubSet) -> Result<AntiCorrReport> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha = {alpha} outside [0, 1]")));
    }
    let n = state.parties;
    let pure = j_m(state, mub)?;
    let noise = white_noise_anticorrelation(n);
    let per_basis = pure.per_basis.iter().map(|a| alpha * a + (1.0 - alpha) * noise).collect();
    Ok(CriterionReport::new(per_basis, pure.bound, VIOLATION_MARGIN))
}

/// `n!/n^n`.
pub fn white_noise_anticorrelation(n: usize) -> f64 {
    factorial(n) as f64 / (n as f64).powi(n as i32)
}

fn check_threshold_params(n: usize, m: usize, max_n: usize) -> Result<()> {
    if !(2..=max_n).contains(&n) || !(2..=n + 1).contains(&m) {
        return Err(Error::domain(format!(
            "need 2 <= n <= {max_n} and 2 <= m <= n + 1, got n = {n}, m = {m}"
        )));
    }
    Ok(())
}

/// Noise threshold of `J_m` on `α|𝒮_n⟩⟨𝒮_n| + (1-α)𝟙/n^n`:
/// `α* = (n^n(m+n-1) - m·n·n!) / (m·n·(n^n - n!))`.
pub fn aharonov_noise_threshold(n: usize, m: usize) -> Result<f64> {
    check_threshold_params(n, m, 12)?;
    let nn = (n as f64).powi(n as i32);
    let nf = factorial(n) as f64;
    let (n, m) = (n as f64, m as f64);
    Ok((nn * (m + n - 1.0) - m * n * nf) / (m * n * (nn - nf)))
}

/// The same threshold found by bisection on the violation predicate of the
/// directly evaluated `J_m`, using the first `m` bases of the built-in
/// complete set in dimension `n`.
pub fn aharonov_threshold_bisection(n: usize, m: usize) -> Result<f64> {
    check_threshold_params(n, m, MAX_AHARONOV_PARTIES)?;
    let mub = construct_mub_set(n)?.take(m)?;
    let state = aharonov_state(n)?;
    let pure = j_m(&state, &mub)?;
    let noise = white_noise_anticorrelation(n);
    let violated = |alpha: f64| {
        let per_basis = pure.per_basis.iter().map(|a| alpha * a + (1.0 - alpha) * noise).collect();
        CriterionReport::new(per_basis, pure.bound, VIOLATION_MARGIN).violated
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if violated(lo) || !violated(hi) {
        return Err(Error::Numerical {
            message: "Aharonov threshold is not bracketed by [0, 1]".into(),
            achieved: f64::NAN,
        });
    }
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if violated(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
