//! Command implementations behind the `mubent` binary.
//!
//! Every command writes either JSON (same value encoding as the file
//! formats), CSV with a header row, or a short text summary. Exit codes:
//! 0 when the command ran (whatever the verdict), 2 for input errors,
//! 3 for numerical failures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use mubent::criteria::{
    bell_diagonal_state, i_m_with, isotropic_state, isotropic_threshold, BellDiagonalCoeffs,
    CriterionReport, ImOptions,
};
use mubent::cv::{cv_scan, cv_threshold, CvMethod};
use mubent::io::{read_density, read_mub_set, write_density, write_mub_set, MubFile};
use mubent::mubs::{construct_mub_set, verify_mub_set, MubSet};
use mubent::multipartite::{
    aharonov_noise_threshold, aharonov_state, aharonov_threshold_bisection, j_m, j_m_white_noise, MultipartiteState,
};
use mubent::optimize::{maximize_im, OptimizeResult, OptimizerConfig};
use mubent::qmath::{random_pure_state, ComplexMatrix, DensityMatrix};
use mubent::sampling::{sample_im, SampleConfig, SampleEstimate};
use mubent::settings::STRUCTURAL_TOL;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<mubent::Error> for CliError {
    fn from(e: mubent::Error) -> Self {
        match e {
            mubent::Error::Numerical { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "mubent", version, about = "Entanglement detection with mutually unbiased bases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the built-in complete MUB set for dimension d.
    ConstructMubs {
        #[arg(long)]
        d: usize,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Check a MUB file for orthonormality and unbiasedness.
    VerifyMubs {
        file: PathBuf,
        #[arg(long, default_value_t = STRUCTURAL_TOL)]
        tolerance: f64,
    },
    /// Write a density-matrix file for one of the standard state families.
    MakeState(MakeStateArgs),
    /// Evaluate I_m (two parties) or J_m (--parties n) on a density-matrix file.
    Evaluate(EvaluateArgs),
    /// Threshold and grid scans as CSV.
    Scan(ScanArgs),
    /// Maximise I_m over local unitaries.
    Optimize(OptimizeArgs),
    /// Finite-shot estimate of I_m.
    Sample(SampleArgs),
}

#[derive(Debug, Args)]
pub struct MakeStateArgs {
    #[arg(value_enum)]
    pub kind: StateKind,
    /// Local dimension (isotropic, bell-diagonal) or total dimension
    /// (maximally-mixed, random-pure).
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of parties for the Aharonov state.
    #[arg(long)]
    pub n: Option<usize>,
    /// Weight of the entangled part (isotropic, aharonov).
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Comma-separated Bell-diagonal weights c_{k,l}, row-major.
    #[arg(long, value_delimiter = ',')]
    pub coeffs: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Isotropic,
    MaximallyMixed,
    BellDiagonal,
    Aharonov,
    RandomPure,
}

#[derive(Debug, Args)]
pub struct MubSource {
    /// MUB file; overrides --d.
    #[arg(long)]
    pub mubs: Option<PathBuf>,
    /// Use the built-in complete set of this dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Use only the first m bases.
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub state: PathBuf,
    #[command(flatten)]
    pub source: MubSource,
    /// Optimise the outcome labelling of every basis pair.
    #[arg(long)]
    pub relabel: bool,
    /// Measure party B in the complex-conjugate bases.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub conjugate_b: bool,
    /// Also search over local unitaries (with relabelling).
    #[arg(long)]
    pub optimize: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Treat the state as n parties and evaluate J_m.
    #[arg(long)]
    pub parties: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(value_enum)]
    pub kind: ScanKind,
    /// Local dimension (isotropic).
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of parties (aharonov).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub m_min: usize,
    /// Defaults to the size of a complete set.
    #[arg(long)]
    pub m_max: Option<usize>,
    /// Grid over alpha in [0, 1] with this many intervals instead of thresholds.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub r_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 0.02)]
    pub r_step: f64,
    #[arg(long, value_enum, default_value_t = CvPath::Quadrature)]
    pub method: CvPath,
    /// For cv: report the violation onset instead of a grid.
    #[arg(long)]
    pub threshold: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    Isotropic,
    Aharonov,
    Cv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CvPath {
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    pub state: PathBuf,
    #[command(flatten)]
    pub source: MubSource,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 200)]
    pub max_sweeps: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep the outcome labelling fixed.
    #[arg(long)]
    pub no_relabel: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub state: PathBuf,
    #[command(flatten)]
    pub source: MubSource,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub conjugate_b: bool,
}

pub fn run(cli: &Cli, out: &mut impl Write) -> CliResult<()> {
    match &cli.command {
        Command::ConstructMubs { d, output } => {
            let set = cmd_construct(*d, output)?;
            writeln!(out, "wrote {} bases for d = {} to {}", set.len(), set.dim(), output.display())?;
        }
        Command::VerifyMubs { file, tolerance } => {
            let report = cmd_verify(file, *tolerance)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        }
        Command::MakeState(args) => {
            let rho = cmd_make_state(args)?;
            writeln!(out, "wrote density matrix of dimension {} to {}", rho.dim(), args.output.display())?;
        }
        Command::Evaluate(args) => {
            let report = cmd_evaluate(args)?;
            if args.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                write!(out, "{}", report.render_text())?;
            }
        }
        Command::Scan(args) => {
            let csv = cmd_scan(args)?;
            match &args.output {
                Some(path) => fs::write(path, csv)?,
                None => write!(out, "{csv}")?,
            }
        }
        Command::Optimize(args) => {
            let result = cmd_optimize(args)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&OptimizeSummary::from(&result))?)?;
        }
        Command::Sample(args) => {
            let estimate = cmd_sample(args)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&estimate)?)?;
        }
    }
    Ok(())
}

pub fn cmd_construct(d: usize, output: &Path) -> CliResult<MubSet> {
    let set = construct_mub_set(d)?;
    write_mub_set(output, &set)?;
    Ok(set)
}

#[derive(Debug, Serialize)]
pub struct VerifySummary {
    pub d: usize,
    pub bases: usize,
    pub pass: bool,
    pub worst_orthonormality_defect: f64,
    pub worst_unbiasedness_defect: f64,
    pub offending: Option<(usize, usize)>,
    pub tolerance: f64,
}

/// Verifies without rejecting, so that failing files still get a report.
pub fn cmd_verify(file: &Path, tolerance: f64) -> CliResult<VerifySummary> {
    let raw: MubFile = serde_json::from_str(&fs::read_to_string(file)?)?;
    let d = raw.d;
    let mut matrices = Vec::new();
    for (k, basis) in raw.bases.iter().enumerate() {
        if basis.len() != d || basis.iter().any(|v| v.len() != d) {
            return Err(CliError::Input(format!("basis {k} is not {d} vectors of length {d}")));
        }
        let columns: Vec<Vec<_>> = basis
            .iter()
            .map(|v| v.iter().map(|&[re, im]| mubent::qmath::C64::new(re, im)).collect())
            .collect();
        matrices.push(ComplexMatrix::from_columns(&columns)?);
    }
    let r = verify_mub_set(&matrices, tolerance)?;
    Ok(VerifySummary {
        d,
        bases: matrices.len(),
        pass: r.pass,
        worst_orthonormality_defect: r.worst_orthonormality_defect,
        worst_unbiasedness_defect: r.worst_unbiasedness_defect,
        offending: r.offending,
        tolerance,
    })
}

fn require(value: Option<usize>, flag: &str) -> CliResult<usize> {
    value.ok_or_else(|| CliError::Input(format!("--{flag} is required")))
}

pub fn cmd_make_state(args: &MakeStateArgs) -> CliResult<DensityMatrix> {
    let rho = match args.kind {
        StateKind::Isotropic => isotropic_state(require(args.d, "d")?, args.alpha)?,
        StateKind::MaximallyMixed => DensityMatrix::maximally_mixed(require(args.d, "d")?)?,
        StateKind::BellDiagonal => {
            let coeffs = BellDiagonalCoeffs::new(require(args.d, "d")?, args.coeffs.clone())?;
            bell_diagonal_state(&coeffs)?
        }
        StateKind::Aharonov => {
            let n = require(args.n, "n")?;
            if !(0.0..=1.0).contains(&args.alpha) {
                return Err(CliError::Input(format!("alpha = {} outside [0, 1]", args.alpha)));
            }
            let pure = aharonov_state(n)?.to_density()?;
            let noise = DensityMatrix::maximally_mixed(pure.dim())?;
            DensityMatrix::mix(args.alpha, &pure, &noise)?
        }
        StateKind::RandomPure => random_pure_state(require(args.d, "d")?, args.seed)?.projector(),
    };
    write_density(&args.output, &rho)?;
    Ok(rho)
}

/// MUB set from a file or the built-in construction, truncated to `m`.
pub fn load_mubs(source: &MubSource, default_d: usize) -> CliResult<MubSet> {
    let set = match &source.mubs {
        Some(path) => read_mub_set(path)?,
        None => construct_mub_set(source.d.unwrap_or(default_d))?,
    };
    match source.m {
        Some(m) => Ok(set.take(m)?),
        None => Ok(set),
    }
}

fn local_dim(rho: &DensityMatrix) -> CliResult<usize> {
    let n = rho.dim();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(CliError::Input(format!("state dimension {n} is not a square d x d")));
    }
    Ok(d)
}

fn parties_local_dim(dim: usize, n: usize) -> CliResult<usize> {
    (1..=dim)
        .find(|d| d.checked_pow(n as u32) == Some(dim))
        .ok_or_else(|| CliError::Input(format!("state dimension {dim} is not d^{n}")))
}

#[derive(Debug, Serialize)]
pub struct EvaluateReport {
    pub criterion: &'static str,
    pub d: usize,
    pub m: usize,
    pub per_basis: Vec<f64>,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub violated: bool,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relabelings: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimized: Option<OptimizeSummary>,
}

fn verdict(violated: bool) -> &'static str {
    if violated {
        "violated (entangled)"
    } else {
        "not violated"
    }
}

impl EvaluateReport {
    fn from_report(criterion: &'static str, d: usize, r: CriterionReport) -> Self {
        Self {
            criterion,
            d,
            m: r.per_basis.len(),
            value: r.value,
            bound: r.bound,
            margin: r.margin,
            violated: r.violated,
            verdict: verdict(r.violated),
            relabelings: r.relabelings,
            per_basis: r.per_basis,
            optimized: None,
        }
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        for (k, c) in self.per_basis.iter().enumerate() {
            s += &format!("basis {k}: {c:.12}\n");
        }
        s += &format!(
            "{} = {:.12}\nbound = {:.12}\nmargin = {:+.3e}\nverdict: {}\n",
            self.criterion, self.value, self.bound, self.margin, self.verdict
        );
        if let Some(o) = &self.optimized {
            s += &format!(
                "optimized {} = {:.12} (margin {:+.3e}, {})\n",
                self.criterion,
                o.value,
                o.margin,
                verdict(o.violated)
            );
        }
        s
    }
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> CliResult<EvaluateReport> {
    let rho = read_density(&args.state)?;
    if let Some(n) = args.parties {
        let d = parties_local_dim(rho.dim(), n)?;
        let mub = load_mubs(&args.source, d)?;
        let state = MultipartiteState::mixed(n, d, rho)?;
        return Ok(EvaluateReport::from_report("J_m", d, j_m(&state, &mub)?));
    }
    let d = local_dim(&rho)?;
    let mub = load_mubs(&args.source, d)?;
    let mub_b = if args.conjugate_b { mub.conjugate() } else { mub.clone() };
    let options = ImOptions { relabel: args.relabel };
    let mut report = EvaluateReport::from_report("I_m", d, i_m_with(&rho, &mub, &mub_b, options)?);
    if args.optimize {
        if !args.conjugate_b {
            return Err(CliError::Input("--optimize always measures B in the conjugate bases".into()));
        }
        let config = OptimizerConfig {
            seed: args.seed,
            ..OptimizerConfig::default()
        };
        report.optimized = Some(OptimizeSummary::from(&maximize_im(&rho, &mub, &config)?));
    }
    Ok(report)
}

pub fn cmd_scan(args: &ScanArgs) -> CliResult<String> {
    match args.kind {
        ScanKind::Isotropic => scan_isotropic(args),
        ScanKind::Aharonov => scan_aharonov(args),
        ScanKind::Cv => scan_cv(args),
    }
}

fn m_range(args: &ScanArgs, complete: usize) -> CliResult<Vec<usize>> {
    let hi = args.m_max.unwrap_or(complete);
    if args.m_min < 2 || hi < args.m_min || hi > complete {
        return Err(CliError::Input(format!("need 2 <= m_min <= m_max <= {complete}")));
    }
    Ok((args.m_min..=hi).collect())
}

fn alpha_grid(steps: usize) -> CliResult<Vec<f64>> {
    if steps == 0 {
        return Err(CliError::Input("--grid must be positive".into()));
    }
    Ok((0..=steps).map(|i| i as f64 / steps as f64).collect())
}

fn scan_isotropic(args: &ScanArgs) -> CliResult<String> {
    let d = require(args.d, "d")?;
    let set = construct_mub_set(d)?;
    let ms = m_range(args, d + 1)?;
    let mut csv = String::new();
    match args.grid {
        None => {
            csv += "m,threshold,bound\n";
            let rows = ms
                .par_iter()
                .map(|&m| Ok((m, isotropic_threshold(&set.take(m)?)?)))
                .collect::<mubent::Result<Vec<_>>>()?;
            for (m, t) in rows {
                csv += &format!("{m},{t:.12},{:.12}\n", mubent::criteria::separable_bound(m, d));
            }
        }
        Some(steps) => {
            csv += "m,alpha,value,bound,violated\n";
            let alphas = alpha_grid(steps)?;
            for &m in &ms {
                let sub = set.take(m)?;
                let rows = alphas
                    .par_iter()
                    .map(|&a| {
                        let rho = isotropic_state(d, a)?;
                        i_m_with(&rho, &sub, &sub.conjugate(), ImOptions::default())
                    })
                    .collect::<mubent::Result<Vec<_>>>()?;
                for (a, r) in alphas.iter().zip(rows) {
                    csv += &format!("{m},{a:.12},{:.12},{:.12},{}\n", r.value, r.bound, r.violated);
                }
            }
        }
    }
    Ok(csv)
}

fn scan_aharonov(args: &ScanArgs) -> CliResult<String> {
    let n = require(args.n, "n")?;
    let ms = m_range(args, n + 1)?;
    let mut csv = String::new();
    match args.grid {
        None => {
            csv += "m,threshold,bisection\n";
            let rows = ms
                .par_iter()
                .map(|&m| {
                    let closed = aharonov_noise_threshold(n, m)?;
                    let direct = aharonov_threshold_bisection(n, m).ok();
                    Ok((m, closed, direct))
                })
                .collect::<mubent::Result<Vec<_>>>()?;
            for (m, closed, direct) in rows {
                let direct = direct.map_or(String::new(), |t| format!("{t:.12}"));
                csv += &format!("{m},{closed:.12},{direct}\n");
            }
        }
        Some(steps) => {
            csv += "m,alpha,value,bound,violated\n";
            let set = construct_mub_set(n)?;
            let state = aharonov_state(n)?;
            let alphas = alpha_grid(steps)?;
            for &m in &ms {
                let sub = set.take(m)?;
                for &a in &alphas {
                    let r = j_m_white_noise(&state, a, &sub)?;
                    csv += &format!("{m},{a:.12},{:.12},{:.12},{}\n", r.value, r.bound, r.violated);
                }
            }
        }
    }
    Ok(csv)
}

fn scan_cv(args: &ScanArgs) -> CliResult<String> {
    if args.threshold {
        let t = cv_threshold()?;
        return Ok(format!(
            "path,r_star,published,deviation\nquadrature,{:.9},{},{:+.9}\nclosed_form,{:.9},{},{:+.9}\n",
            t.quadrature,
            t.published,
            t.quadrature - t.published,
            t.closed_form,
            t.published,
            t.closed_form - t.published
        ));
    }
    if args.r_step.is_nan() || args.r_step <= 0.0 || args.r_min < 0.0 || args.r_max < args.r_min || !args.r_max.is_finite() {
        return Err(CliError::Input("need 0 <= r_min <= r_max and r_step > 0".into()));
    }
    let count = ((args.r_max - args.r_min) / args.r_step + 1e-9).floor() as usize;
    let rs: Vec<f64> = (0..=count).map(|i| args.r_min + i as f64 * args.r_step).collect();
    let method = match args.method {
        CvPath::Quadrature => CvMethod::Quadrature,
        CvPath::ClosedForm => CvMethod::ClosedForm,
    };
    let mut csv = String::from("r,C_xx,C_pp,I,bound,violated\n");
    for (r, rep) in cv_scan(&rs, method)? {
        csv += &format!(
            "{r:.6},{:.12},{:.12},{:.12},{},{}\n",
            rep.per_basis[0], rep.per_basis[1], rep.value, rep.bound, rep.violated
        );
    }
    Ok(csv)
}

#[derive(Debug, Serialize)]
pub struct OptimizeSummary {
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub violated: bool,
    pub converged: bool,
    pub per_basis: Vec<f64>,
    pub params_a: mubent::optimize::UnitaryParams,
    pub params_b: mubent::optimize::UnitaryParams,
    pub restart_values: Vec<f64>,
}

impl From<&OptimizeResult> for OptimizeSummary {
    fn from(r: &OptimizeResult) -> Self {
        Self {
            value: r.value,
            bound: r.bound,
            margin: r.margin,
            violated: r.violated,
            converged: r.converged,
            per_basis: r.report.per_basis.clone(),
            params_a: r.params_a.clone(),
            params_b: r.params_b.clone(),
            restart_values: r
                .restarts
                .iter()
                .map(|t| t.history.last().copied().unwrap_or(t.start_value))
                .collect(),
        }
    }
}

pub fn cmd_optimize(args: &OptimizeArgs) -> CliResult<OptimizeResult> {
    let rho = read_density(&args.state)?;
    let mub = load_mubs(&args.source, local_dim(&rho)?)?;
    let config = OptimizerConfig {
        restarts: args.restarts,
        max_sweeps: args.max_sweeps,
        tolerance: args.tolerance,
        seed: args.seed,
        relabel: !args.no_relabel,
        ..OptimizerConfig::default()
    };
    Ok(maximize_im(&rho, &mub, &config)?)
}

pub fn cmd_sample(args: &SampleArgs) -> CliResult<SampleEstimate> {
    let rho = read_density(&args.state)?;
    let mub = load_mubs(&args.source, local_dim(&rho)?)?;
    let mub_b = if args.conjugate_b { mub.conjugate() } else { mub.clone() };
    let config = SampleConfig {
        shots: args.shots,
        seed: args.seed,
    };
    Ok(sample_im(&rho, &mub, &mub_b, &config)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(mubent::Error::UnsupportedDimension { d: 6 }).exit_code(), 2);
        let numerical = mubent::Error::Numerical {
            message: "x".into(),
            achieved: 1.0,
        };
        assert_eq!(CliError::from(numerical).exit_code(), 3);
    }

    #[test]
    fn dimension_helpers() {
        assert_eq!(parties_local_dim(27, 3).unwrap(), 3);
        assert!(parties_local_dim(28, 3).is_err());
        assert_eq!(local_dim(&DensityMatrix::maximally_mixed(16).unwrap()).unwrap(), 4);
        assert!(local_dim(&DensityMatrix::maximally_mixed(8).unwrap()).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
