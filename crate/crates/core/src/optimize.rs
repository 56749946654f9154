//! Local-unitary search that improves the `I_m` witness.
//!
//! Any value found is a lower bound on `max_{U_A,U_B} I_m`; a violation found
//! here certifies entanglement because the separable bound holds for every
//! choice of local bases. Failing to find one proves nothing.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{evaluate_pairs, CriterionReport};
use crate::error::{Error, Result};
use crate::mubs::MubSet;
use crate::qmath::{seeded_rng, ComplexMatrix, DensityMatrix, C64};

const GOLDEN_ITERATIONS: usize = 48;
const TAU: f64 = 2.0 * PI;

/// Givens angles and phases for every pair `p < q`, plus `d-1` diagonal
/// phases. Together these cover `U(d)` modulo a global phase.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitaryParams {
    dim: usize,
    angles: Vec<f64>,
    phases: Vec<f64>,
    diagonal_phases: Vec<f64>,
}

impl UnitaryParams {
    pub fn new(dim: usize, angles: Vec<f64>, phases: Vec<f64>, diagonal_phases: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("unitary dimension must be positive"));
        }
        let pairs = dim * (dim - 1) / 2;
        if angles.len() != pairs || phases.len() != pairs || diagonal_phases.len() != dim - 1 {
            return Err(Error::domain(format!(
                "d = {dim} needs {pairs} angles, {pairs} phases and {} diagonal phases; got {}, {}, {}",
                dim - 1,
                angles.len(),
                phases.len(),
                diagonal_phases.len()
            )));
        }
        if angles.iter().chain(&phases).chain(&diagonal_phases).any(|x| !x.is_finite()) {
            return Err(Error::domain("unitary parameters must be finite"));
        }
        Ok(Self {
            dim,
            angles,
            phases,
            diagonal_phases,
        })
    }

    pub fn identity(dim: usize) -> Self {
        let pairs = dim * dim.saturating_sub(1) / 2;
        Self {
            dim,
            angles: vec![0.0; pairs],
            phases: vec![0.0; pairs],
            diagonal_phases: vec![0.0; dim.saturating_sub(1)],
        }
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let mut p = Self::identity(dim);
        for i in 0..p.len() {
            let (lo, hi, _) = p.range(i);
            p.set(i, rng.gen_range(lo..hi));
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn diagonal_phases(&self) -> &[f64] {
        &self.diagonal_phases
    }

    /// Number of real parameters, `d² - 1`.
    pub fn len(&self) -> usize {
        self.angles.len() + self.phases.len() + self.diagonal_phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, i: usize) -> f64 {
        let (a, p) = (self.angles.len(), self.phases.len());
        if i < a {
            self.angles[i]
        } else if i < a + p {
            self.phases[i - a]
        } else {
            self.diagonal_phases[i - a - p]
        }
    }

    fn set(&mut self, i: usize, x: f64) {
        let (a, p) = (self.angles.len(), self.phases.len());
        if i < a {
            self.angles[i] = x;
        } else if i < a + p {
            self.phases[i - a] = x;
        } else {
            self.diagonal_phases[i - a - p] = x;
        }
    }

    /// Search interval of coordinate `i` and whether it is periodic.
    fn range(&self, i: usize) -> (f64, f64, bool) {
        if i < self.angles.len() {
            (0.0, FRAC_PI_2, false)
        } else {
            (0.0, TAU, true)
        }
    }
}

/// `U = diag(1, e^{iδ₁}, …) · Π_{p<q} G_pq(θ, φ)` where `G_pq` acts on the
/// `(p, q)` plane as `[[cos θ, -e^{-iφ} sin θ], [e^{iφ} sin θ, cos θ]]`.
pub fn parameterize_unitary(params: &UnitaryParams) -> ComplexMatrix {
    let d = params.dim;
    let mut u = ComplexMatrix::identity(d);
    let mut idx = 0;
    for p in 0..d {
        for q in p + 1..d {
            let (s, c) = params.angles[idx].sin_cos();
            let e = C64::from_polar(1.0, params.phases[idx]);
            // right-multiply by G_pq: only columns p and q change
            for r in 0..d {
                let (up, uq) = (u[(r, p)], u[(r, q)]);
                u[(r, p)] = up * c + uq * e * s;
                u[(r, q)] = -up * e.conj() * s + uq * c;
            }
            idx += 1;
        }
    }
    for (k, &delta) in params.diagonal_phases.iter().enumerate() {
        let e = C64::from_polar(1.0, delta);
        for c in 0..d {
            u[(k + 1, c)] *= e;
        }
    }
    u
}

fn rotated_pairs(mub: &MubSet, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Vec<(ComplexMatrix, ComplexMatrix)> {
    let (ua_dag, ub_dag) = (ua.dagger(), ub.dagger());
    mub.bases()
        .iter()
        .map(|b| {
            let m = b.matrix();
            (&ua_dag * &m, &ub_dag * &m.conj())
        })
        .collect()
}

fn check_dims(rho: &DensityMatrix, mub: &MubSet, pa: &UnitaryParams, pb: &UnitaryParams) -> Result<()> {
    let d = mub.dim();
    if pa.dim != d || pb.dim != d || rho.dim() != d * d {
        return Err(Error::domain(format!(
            "dimension mismatch: state {}, MUBs {d}, unitaries {} and {}",
            rho.dim(),
            pa.dim,
            pb.dim
        )));
    }
    if mub.is_empty() {
        return Err(Error::domain("empty MUB set"));
    }
    Ok(())
}

/// `I_m` of `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†` with `mub` on A and its conjugate
/// on B, evaluated by rotating the bases instead of the state.
pub fn objective_report(
    rho: &DensityMatrix,
    mub: &MubSet,
    pa: &UnitaryParams,
    pb: &UnitaryParams,
    relabel: bool,
) -> Result<CriterionReport> {
    check_dims(rho, mub, pa, pb)?;
    let pairs = rotated_pairs(mub, &parameterize_unitary(pa), &parameterize_unitary(pb));
    Ok(evaluate_pairs(rho.matrix(), &pairs, relabel))
}

pub fn objective(rho: &DensityMatrix, mub: &MubSet, pa: &UnitaryParams, pb: &UnitaryParams, relabel: bool) -> Result<f64> {
    Ok(objective_report(rho, mub, pa, pb, relabel)?.value)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// A restart stops once a full sweep improves by less than this.
    pub tolerance: f64,
    pub seed: u64,
    pub relabel: bool,
    /// Coarse grid size of each coordinate line search.
    pub grid_points: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_sweeps: 200,
            tolerance: 1e-8,
            seed: 0,
            relabel: true,
            grid_points: 16,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_sweeps == 0 || self.grid_points < 3 {
            return Err(Error::domain("restarts and sweeps must be positive, grid needs >= 3 points"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::domain("tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartTrace {
    pub start_value: f64,
    /// Best value after each sweep.
    pub history: Vec<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub violated: bool,
    /// True when the best restart met the sweep tolerance.
    pub converged: bool,
    pub params_a: UnitaryParams,
    pub params_b: UnitaryParams,
    pub report: CriterionReport,
    pub restarts: Vec<RestartTrace>,
}

struct Restart {
    value: f64,
    pa: UnitaryParams,
    pb: UnitaryParams,
    trace: RestartTrace,
}

fn golden_max(f: &mut impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn run_restart(
    rho: &DensityMatrix,
    mub: &MubSet,
    config: &OptimizerConfig,
    mut pa: UnitaryParams,
    mut pb: UnitaryParams,
) -> Restart {
    let eval = |pa: &UnitaryParams, pb: &UnitaryParams| {
        let pairs = rotated_pairs(mub, &parameterize_unitary(pa), &parameterize_unitary(pb));
        evaluate_pairs(rho.matrix(), &pairs, config.relabel).value
    };
    let mut best = eval(&pa, &pb);
    let start_value = best;
    let mut history = Vec::new();
    let mut converged = false;
    let na = pa.len();
    for _ in 0..config.max_sweeps {
        let sweep_start = best;
        for coord in 0..na + pb.len() {
            let (on_a, i) = if coord < na { (true, coord) } else { (false, coord - na) };
            let target = if on_a { &pa } else { &pb };
            let (lo, hi, periodic) = target.range(i);
            let current = target.get(i);
            let mut trial = |x: f64| {
                let (mut a, mut b) = (pa.clone(), pb.clone());
                if on_a {
                    a.set(i, x);
                } else {
                    b.set(i, x);
                }
                eval(&a, &b)
            };
            let n = config.grid_points;
            let step = (hi - lo) / if periodic { n as f64 } else { (n - 1) as f64 };
            let (mut gx, mut gv) = (current, best);
            for k in 0..n {
                let x = lo + k as f64 * step;
                let v = trial(x);
                if v > gv {
                    gx = x;
                    gv = v;
                }
            }
            let (a, b) = if periodic {
                (gx - step, gx + step)
            } else {
                ((gx - step).max(lo), (gx + step).min(hi))
            };
            let (mut x, v) = golden_max(&mut trial, a, b);
            let (x_new, v_new) = if v > gv { (x, v) } else { (gx, gv) };
            if v_new > best {
                if periodic {
                    x = x_new.rem_euclid(TAU);
                } else {
                    x = x_new;
                }
                best = v_new;
                if on_a {
                    pa.set(i, x);
                } else {
                    pb.set(i, x);
                }
            }
        }
        history.push(best);
        if best - sweep_start < config.tolerance {
            converged = true;
            break;
        }
    }
    Restart {
        value: best,
        pa,
        pb,
        trace: RestartTrace {
            start_value,
            history,
            converged,
        },
    }
}

/// Multi-start cyclic coordinate ascent with a grid-plus-golden-section line
/// search per coordinate. Restart 0 starts from the identity; the others from
/// seeded random parameters. Restarts run in parallel.
pub fn maximize_im(rho: &DensityMatrix, mub: &MubSet, config: &OptimizerConfig) -> Result<OptimizeResult> {
    config.validate()?;
    let d = mub.dim();
    check_dims(rho, mub, &UnitaryParams::identity(d), &UnitaryParams::identity(d))?;
    let mut rng = seeded_rng(config.seed);
    let starts: Vec<(UnitaryParams, UnitaryParams)> = (0..config.restarts)
        .map(|k| {
            if k == 0 {
                (UnitaryParams::identity(d), UnitaryParams::identity(d))
            } else {
                (UnitaryParams::random(d, &mut rng), UnitaryParams::random(d, &mut rng))
            }
        })
        .collect();
    let runs: Vec<Restart> = starts
        .into_par_iter()
        .map(|(pa, pb)| run_restart(rho, mub, config, pa, pb))
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.value.total_cmp(&y.1.value).then(y.0.cmp(&x.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let report = objective_report(rho, mub, &runs[best].pa, &runs[best].pb, config.relabel)?;
    Ok(OptimizeResult {
        value: report.value,
        bound: report.bound,
        margin: report.margin,
        violated: report.violated,
        converged: runs[best].trace.converged,
        params_a: runs[best].pa.clone(),
        params_b: runs[best].pb.clone(),
        report,
        restarts: runs.into_iter().map(|r| r.trace).collect(),
    })
}
