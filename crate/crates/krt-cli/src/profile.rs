//! Solution profiles: abscissa, exact solution, and computed solution on
//! the physical scale, for plotting.

use krt_core::problems::ProblemKind;

use crate::runner::{generate_problem, reduce_and_solve, ExperimentOptions, RunError};

/// Columns of a solution profile; all three have length `n`.
#[derive(Clone, Debug)]
pub struct ProfileOutput {
    pub abscissae: Vec<f64>,
    pub x_exact: Vec<f64>,
    pub x_computed: Vec<f64>,
}

/// Runs the reduction pipeline and returns exact and computed solutions on
/// the physical value scale (box coefficients are divided by the
/// square-root cell normalization, Nystrom values pass through).
pub fn emit_profile(
    kind: ProblemKind,
    n: usize,
    ell: usize,
    nu: f64,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<ProfileOutput, RunError> {
    let problem = generate_problem(kind, n)?;
    let run = reduce_and_solve(&problem, ell, nu, seed, opts)?;
    let scale = problem.physical_scale();
    Ok(ProfileOutput {
        abscissae: problem.grid().abscissae.to_vec(),
        x_exact: problem.x_exact().iter().map(|v| v * scale).collect(),
        x_computed: run.reduced.x.iter().map(|v| v * scale).collect(),
    })
}

impl ProfileOutput {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x_exact,x_computed\n");
        for i in 0..self.abscissae.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.abscissae[i], self.x_exact[i], self.x_computed[i]
            ));
        }
        out
    }
}
