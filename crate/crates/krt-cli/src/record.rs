//! The per-run result record and its CSV projection.

use krt_core::lowrank::GapMethod;
use krt_core::numerics::InnerProductWeight;
use krt_core::problems::ProblemKind;

/// Everything measured in one solver run; one CSV row.
#[derive(Clone, Debug)]
pub struct ExperimentRecord {
    pub problem: ProblemKind,
    pub n: usize,
    pub ell: usize,
    pub nu: f64,
    pub seed: u64,
    pub weight: InnerProductWeight,
    pub gap_method: GapMethod,
    /// Approximation gap `||A - A_l||` by the configured method.
    pub h_ell: f64,
    /// Regularization parameter selected by the discrepancy equation.
    pub alpha: f64,
    /// `||x_reduced - x_exact||_2 / ||x_exact||_2`.
    pub rel_err_xn: f64,
    /// `||x_reduced - x_full||_2 / ||x_exact||_2`; absent when the
    /// full-space comparison solve was skipped.
    pub rel_diff_full: Option<f64>,
    pub sigma_max_h: f64,
    pub sigma_min_h: f64,
    pub feasible: bool,
    /// Wall-clock duration of the run. Everything else in the record is
    /// bit-reproducible for fixed inputs; this column is not.
    pub runtime_ms: u64,
}

/// Fixed CSV header, record fields in order plus a trailing error column
/// used by table sweeps for rows whose run failed.
pub const CSV_HEADER: &str = "problem,n,ell,nu,seed,weight,gap_method,h_ell,alpha,rel_err_xn,rel_diff_full,sigma_max_h,sigma_min_h,feasible,runtime_ms,error";

pub fn weight_name(weight: InnerProductWeight) -> &'static str {
    match weight {
        InnerProductWeight::Euclidean => "euclidean",
        InnerProductWeight::OneOverN => "one-over-n",
    }
}

pub fn gap_name(method: GapMethod) -> &'static str {
    match method {
        GapMethod::Spectral => "spectral",
        GapMethod::Frobenius => "frobenius",
    }
}

/// RFC 4180 field escaping; only error messages can ever need it.
pub fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

impl ExperimentRecord {
    /// One CSV row; the seed column is overridable so aggregate rows can
    /// label themselves. Measured values are written in scientific
    /// notation, which round-trips `f64` exactly.
    pub fn csv_row_with_seed_label(&self, seed_label: &str) -> String {
        format!(
            "{},{},{},{},{},{},{},{:e},{:e},{:e},{},{:e},{:e},{},{},",
            self.problem.name(),
            self.n,
            self.ell,
            self.nu,
            seed_label,
            weight_name(self.weight),
            gap_name(self.gap_method),
            self.h_ell,
            self.alpha,
            self.rel_err_xn,
            self.rel_diff_full.map(|v| format!("{v:e}")).unwrap_or_default(),
            self.sigma_max_h,
            self.sigma_min_h,
            self.feasible,
            self.runtime_ms,
        )
    }

    pub fn csv_row(&self) -> String {
        self.csv_row_with_seed_label(&self.seed.to_string())
    }
}
