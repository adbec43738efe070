//! `krt` — generate classic ill-posed test systems, solve them by Arnoldi
//! reduction plus Tikhonov regularization with a discrepancy-selected
//! parameter, reproduce benchmark tables, and emit solution profiles.
//!
//! Exit codes: 0 success, 2 invalid arguments or inputs, 3 discrepancy
//! bound infeasible, 4 Krylov breakdown before the requested depth,
//! 5 numerical non-convergence, 1 anything else (IO).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use krt_cli::matrix_market;
use krt_cli::profile::emit_profile;
use krt_cli::record::CSV_HEADER;
use krt_cli::runner::{generate_problem, run_experiment, ExperimentOptions, RunError};
use krt_cli::tables::{reproduce_table, TableId};
use krt_core::arnoldi::DEFAULT_BREAKDOWN_TOL;
use krt_core::lowrank::GapMethod;
use krt_core::numerics::InnerProductWeight;
use krt_core::problems::ProblemKind;

#[derive(Parser)]
#[command(
    name = "krt",
    version,
    about = "Krylov-reduced Tikhonov solver for discretized ill-posed systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    #[value(alias = "phillips_nystrom")]
    PhillipsNystrom,
    #[value(alias = "phillips_galerkin")]
    PhillipsGalerkin,
    #[value(alias = "baart_galerkin")]
    BaartGalerkin,
}

impl From<ProblemArg> for ProblemKind {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::PhillipsNystrom => ProblemKind::PhillipsNystrom,
            ProblemArg::PhillipsGalerkin => ProblemKind::PhillipsGalerkin,
            ProblemArg::BaartGalerkin => ProblemKind::BaartGalerkin,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Euclidean,
    #[value(name = "one-over-n", alias = "one_over_n")]
    OneOverN,
}

impl From<WeightArg> for InnerProductWeight {
    fn from(w: WeightArg) -> Self {
        match w {
            WeightArg::Euclidean => InnerProductWeight::Euclidean,
            WeightArg::OneOverN => InnerProductWeight::OneOverN,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GapArg {
    Spectral,
    Frobenius,
}

impl From<GapArg> for GapMethod {
    fn from(g: GapArg) -> Self {
        match g {
            GapArg::Spectral => GapMethod::Spectral,
            GapArg::Frobenius => GapMethod::Frobenius,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TableArg {
    Tab1,
    Tab2,
    Tab1b,
    Tab2b,
    Tab3,
    Tab4,
}

impl From<TableArg> for TableId {
    fn from(t: TableArg) -> Self {
        match t {
            TableArg::Tab1 => TableId::Tab1,
            TableArg::Tab2 => TableId::Tab2,
            TableArg::Tab1b => TableId::Tab1b,
            TableArg::Tab2b => TableId::Tab2b,
            TableArg::Tab3 => TableId::Tab3,
            TableArg::Tab4 => TableId::Tab4,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a test-problem matrix and exact solution to MatrixMarket files.
    Generate {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long)]
        n: usize,
        #[arg(long, value_name = "PATH")]
        out_matrix: PathBuf,
        #[arg(long, value_name = "PATH")]
        out_x: PathBuf,
    },
    /// Run one experiment and write a single-row CSV.
    Solve {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: usize,
        /// Relative noise level.
        #[arg(long)]
        noise: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "euclidean")]
        weight: WeightArg,
        #[arg(long, value_enum, default_value = "spectral")]
        gap: GapArg,
        /// Skip the full-space comparison solve.
        #[arg(long)]
        skip_full: bool,
        /// Relative Arnoldi breakdown tolerance.
        #[arg(long, default_value_t = DEFAULT_BREAKDOWN_TOL)]
        breakdown_tol: f64,
        #[arg(long, value_name = "CSV")]
        out: PathBuf,
    },
    /// Reproduce a benchmark table across seeds and write the CSV.
    Table {
        #[arg(long, value_enum)]
        id: TableArg,
        /// Comma-separated seed list.
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(long, value_name = "CSV")]
        out: PathBuf,
    },
    /// Emit a solution profile (t, x_exact, x_computed) as CSV.
    Profile {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        noise: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "CSV")]
        out: PathBuf,
    },
}

/// Worker-thread cap: `KRT_THREADS` if set, else the logical CPU count.
fn thread_budget() -> usize {
    if let Ok(v) = std::env::var("KRT_THREADS") {
        if let Ok(k) = v.trim().parse::<usize>() {
            if k >= 1 {
                return k;
            }
        }
        eprintln!("krt: ignoring invalid KRT_THREADS value `{v}`");
    }
    std::thread::available_parallelism().map_or(1, |p| p.get())
}

fn run_failure(err: RunError) -> ExitCode {
    eprintln!("krt: {err}");
    ExitCode::from(err.exit_code())
}

fn io_failure(context: &str, err: impl std::fmt::Display) -> ExitCode {
    eprintln!("krt: {context}: {err}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate {
            problem,
            n,
            out_matrix,
            out_x,
        } => {
            let problem = match generate_problem(problem.into(), n) {
                Ok(p) => p,
                Err(e) => return run_failure(e),
            };
            if let Err(e) = matrix_market::save_matrix(&out_matrix, problem.operator().matrix()) {
                return io_failure("writing matrix", e);
            }
            if let Err(e) = matrix_market::save_vector(&out_x, problem.x_exact()) {
                return io_failure("writing solution vector", e);
            }
            ExitCode::SUCCESS
        }
        Command::Solve {
            problem,
            n,
            ell,
            noise,
            seed,
            weight,
            gap,
            skip_full,
            breakdown_tol,
            out,
        } => {
            let opts = ExperimentOptions {
                weight: weight.into(),
                gap_method: gap.into(),
                skip_full,
                breakdown_tol,
            };
            match run_experiment(problem.into(), n, ell, noise, seed, &opts) {
                Ok(record) => {
                    let body = format!("{CSV_HEADER}\n{}\n", record.csv_row());
                    if let Err(e) = fs::write(&out, body) {
                        return io_failure("writing record", e);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => run_failure(e),
            }
        }
        Command::Table { id, seeds, out } => {
            let opts = ExperimentOptions::default();
            match reproduce_table(id.into(), &seeds, thread_budget(), &opts) {
                Ok(table) => {
                    if let Err(e) = fs::write(&out, table.to_csv()) {
                        return io_failure("writing table", e);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => run_failure(e),
            }
        }
        Command::Profile {
            problem,
            n,
            ell,
            noise,
            seed,
            out,
        } => {
            let opts = ExperimentOptions {
                skip_full: true,
                ..ExperimentOptions::default()
            };
            match emit_profile(problem.into(), n, ell, noise, seed, &opts) {
                Ok(profile) => {
                    if let Err(e) = fs::write(&out, profile.to_csv()) {
                        return io_failure("writing profile", e);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => run_failure(e),
            }
        }
    }
}
