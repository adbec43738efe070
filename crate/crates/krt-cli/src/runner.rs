//! One experiment end to end, with stage-tagged errors and exit-code
//! mapping for the binary.

use std::fmt;
use std::time::Instant;

use krt_core::arnoldi::{arnoldi, ArnoldiOptions, DEFAULT_BREAKDOWN_TOL};
use krt_core::discrepancy::{build_spectrum, feasibility_check, solve_alpha, DiscrepancyConfig};
use krt_core::lowrank::{approximation_gap, GapMethod, LowRankApproximation};
use krt_core::numerics::{weighted_norm, InnerProductWeight};
use krt_core::problems::{
    add_noise, baart_galerkin, phillips_galerkin, phillips_nystrom, ProblemKind, TestProblem,
};
use krt_core::tikhonov::{relative_error, solve_full, solve_reduced, DEFAULT_CG_TOL};

use crate::record::ExperimentRecord;

/// Pipeline stage in which an error occurred.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Generate,
    Noise,
    Arnoldi,
    LowRank,
    Gap,
    Spectrum,
    Feasibility,
    SolveAlpha,
    SolveReduced,
    SolveFull,
    Metrics,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Generate => "generate",
            Stage::Noise => "noise",
            Stage::Arnoldi => "arnoldi",
            Stage::LowRank => "lowrank",
            Stage::Gap => "gap",
            Stage::Spectrum => "spectrum",
            Stage::Feasibility => "feasibility",
            Stage::SolveAlpha => "solve-alpha",
            Stage::SolveReduced => "solve-reduced",
            Stage::SolveFull => "solve-full",
            Stage::Metrics => "metrics",
        };
        f.write_str(name)
    }
}

/// A core error annotated with the stage that produced it.
#[derive(Clone, Debug)]
pub struct RunError {
    pub stage: Stage,
    pub source: krt_core::Error,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.source)
    }
}

impl std::error::Error for RunError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

impl RunError {
    /// Process exit code contract: 2 invalid input, 3 infeasible bound,
    /// 4 Krylov breakdown before the requested depth, 5 non-convergence.
    pub fn exit_code(&self) -> u8 {
        match self.source {
            krt_core::Error::Breakdown { .. } => 4,
            krt_core::Error::Infeasible { .. } => 3,
            krt_core::Error::Convergence { .. } => 5,
            _ => 2,
        }
    }
}

pub(crate) fn at_stage(stage: Stage) -> impl Fn(krt_core::Error) -> RunError {
    move |source| RunError { stage, source }
}

/// Knobs shared by single runs, tables, and profiles.
#[derive(Clone, Copy, Debug)]
pub struct ExperimentOptions {
    pub weight: InnerProductWeight,
    pub gap_method: GapMethod,
    /// Skip the full-space comparison solve; `rel_diff_full` stays empty.
    pub skip_full: bool,
    pub breakdown_tol: f64,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            weight: InnerProductWeight::Euclidean,
            gap_method: GapMethod::Spectral,
            skip_full: false,
            breakdown_tol: DEFAULT_BREAKDOWN_TOL,
        }
    }
}

pub fn generate_problem(kind: ProblemKind, n: usize) -> Result<TestProblem, RunError> {
    match kind {
        ProblemKind::PhillipsNystrom => phillips_nystrom(n),
        ProblemKind::PhillipsGalerkin => phillips_galerkin(n),
        ProblemKind::BaartGalerkin => baart_galerkin(n),
    }
    .map_err(at_stage(Stage::Generate))
}

/// Builds the test problem and runs the full pipeline on it.
pub fn run_experiment(
    kind: ProblemKind,
    n: usize,
    ell: usize,
    nu: f64,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<ExperimentRecord, RunError> {
    let problem = generate_problem(kind, n)?;
    run_on_problem(&problem, ell, nu, seed, opts)
}

/// Everything the reduction half of the pipeline produces; shared by the
/// record runner and the profile writer.
pub(crate) struct ReducedRun {
    pub noisy: krt_core::problems::NoisyData,
    pub low: LowRankApproximation,
    pub gap: krt_core::lowrank::ApproximationGap,
    pub alpha: f64,
    pub reduced: krt_core::tikhonov::RegularizedSolution,
}

/// Perturbs the data, reduces by the Arnoldi process, measures the gap,
/// selects the regularization parameter from the discrepancy equation, and
/// solves the reduced problem.
pub(crate) fn reduce_and_solve(
    problem: &TestProblem,
    ell: usize,
    nu: f64,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<ReducedRun, RunError> {
    let noisy = add_noise(problem, nu, seed).map_err(at_stage(Stage::Noise))?;

    let arnoldi_opts = ArnoldiOptions {
        weight: opts.weight,
        breakdown_tol: opts.breakdown_tol,
        allow_truncation: false,
    };
    let dec = arnoldi(problem.operator(), noisy.y_delta(), ell, &arnoldi_opts)
        .map_err(at_stage(Stage::Arnoldi))?;
    let low = LowRankApproximation::with_default_rank_tol(dec).map_err(at_stage(Stage::LowRank))?;
    let gap = approximation_gap(problem.operator(), &low, opts.gap_method)
        .map_err(at_stage(Stage::Gap))?;

    let spectrum = build_spectrum(&low, noisy.y_delta()).map_err(at_stage(Stage::Spectrum))?;
    let e_bound = 3.0 * weighted_norm(problem.x_exact(), opts.weight);
    let delta = nu * weighted_norm(problem.y_exact(), opts.weight);
    let cfg = DiscrepancyConfig::new(e_bound, 1.0, delta, gap.value)
        .map_err(at_stage(Stage::Feasibility))?;
    if !feasibility_check(&spectrum, &cfg) {
        return Err(RunError {
            stage: Stage::Feasibility,
            source: krt_core::Error::Infeasible {
                rhs: cfg.rhs(),
                limit: spectrum.ry_norm_sq().sqrt(),
            },
        });
    }
    let alpha = solve_alpha(&spectrum, &cfg).map_err(at_stage(Stage::SolveAlpha))?;
    let reduced =
        solve_reduced(&low, noisy.y_delta(), alpha).map_err(at_stage(Stage::SolveReduced))?;
    Ok(ReducedRun {
        noisy,
        low,
        gap,
        alpha,
        reduced,
    })
}

/// The pipeline on an existing problem, through the optional full-space
/// comparison solve and the error metrics.
///
/// Deterministic for fixed inputs except for the runtime column.
pub fn run_on_problem(
    problem: &TestProblem,
    ell: usize,
    nu: f64,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<ExperimentRecord, RunError> {
    let started = Instant::now();
    let run = reduce_and_solve(problem, ell, nu, seed, opts)?;
    let rel_err_xn =
        relative_error(&run.reduced.x, problem.x_exact()).map_err(at_stage(Stage::Metrics))?;

    let rel_diff_full = if opts.skip_full {
        None
    } else {
        let full = solve_full(
            problem.operator(),
            run.noisy.y_delta(),
            run.alpha,
            opts.weight,
            DEFAULT_CG_TOL,
        )
        .map_err(at_stage(Stage::SolveFull))?;
        let mut diff = 0.0;
        for (a, b) in run.reduced.x.iter().zip(&full.x) {
            diff += (a - b) * (a - b);
        }
        let xn_norm: f64 = problem.x_exact().iter().map(|v| v * v).sum::<f64>().sqrt();
        Some(diff.sqrt() / xn_norm)
    };

    let s = run.low.svd().singular_values();
    Ok(ExperimentRecord {
        problem: problem.kind(),
        n: problem.n(),
        ell: run.low.ell(),
        nu,
        seed,
        weight: opts.weight,
        gap_method: opts.gap_method,
        h_ell: run.gap.value,
        alpha: run.alpha,
        rel_err_xn,
        rel_diff_full,
        sigma_max_h: s[0],
        sigma_min_h: s[run.low.ell() - 1],
        feasible: true,
        runtime_ms: started.elapsed().as_millis() as u64,
    })
}
