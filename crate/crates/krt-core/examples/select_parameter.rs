//! Minimal end-to-end use of the solver library: reduce a test system,
//! select the regularization parameter, and solve.

use krt_core::arnoldi::{arnoldi, ArnoldiOptions};
use krt_core::discrepancy::{build_spectrum, solve_alpha, DiscrepancyConfig};
use krt_core::lowrank::{approximation_gap, GapMethod, LowRankApproximation};
use krt_core::problems::{add_noise, phillips_nystrom};
use krt_core::tikhonov::{relative_error, solve_reduced};

fn main() -> Result<(), krt_core::Error> {
    let problem = phillips_nystrom(1000)?;
    let data = add_noise(&problem, 1e-2, 42)?;
    let dec = arnoldi(problem.operator(), data.y_delta(), 20, &ArnoldiOptions::default())?;
    let low = LowRankApproximation::with_default_rank_tol(dec)?;
    let gap = approximation_gap(problem.operator(), &low, GapMethod::Spectral)?;

    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let cfg =
        DiscrepancyConfig::new(3.0 * norm(problem.x_exact()), 1.0, data.delta(), gap.value)?;
    let spectrum = build_spectrum(&low, data.y_delta())?;
    let alpha = solve_alpha(&spectrum, &cfg)?;
    let solution = solve_reduced(&low, data.y_delta(), alpha)?;

    println!("approximation gap   h = {:.4e}", gap.value);
    println!("selected parameter  alpha = {alpha:.4}");
    println!(
        "relative error      {:.4e}",
        relative_error(&solution.x, problem.x_exact())?
    );
    Ok(())
}
