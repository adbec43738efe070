//! Canned benchmark sweeps: `(n, l, nu)` grids per table id, run across
//! seeds with per-configuration medians.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use krt_core::problems::{ProblemKind, TestProblem};

use crate::record::{csv_escape, ExperimentRecord, CSV_HEADER};
use crate::runner::{generate_problem, run_on_problem, ExperimentOptions, RunError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableId {
    Tab1,
    Tab2,
    Tab1b,
    Tab2b,
    Tab3,
    Tab4,
}

impl TableId {
    pub const ALL: [TableId; 6] = [
        TableId::Tab1,
        TableId::Tab2,
        TableId::Tab1b,
        TableId::Tab2b,
        TableId::Tab3,
        TableId::Tab4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::Tab1 => "tab1",
            TableId::Tab2 => "tab2",
            TableId::Tab1b => "tab1b",
            TableId::Tab2b => "tab2b",
            TableId::Tab3 => "tab3",
            TableId::Tab4 => "tab4",
        }
    }

    /// The singular-value table reuses the noisy benchmark pipeline but has
    /// no use for the full-space comparison solve.
    pub fn skips_full_solve(self) -> bool {
        matches!(self, TableId::Tab3)
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One `(problem, n, l, nu)` cell of a table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableConfig {
    pub kind: ProblemKind,
    pub n: usize,
    pub ell: usize,
    pub nu: f64,
}

/// The `(n, l, nu)` grid behind each table id.
pub fn table_configs(id: TableId) -> Vec<TableConfig> {
    let grid = |kind: ProblemKind, nu: f64| -> Vec<TableConfig> {
        let mut v = Vec::new();
        for n in [1000usize, 2000, 4000] {
            for ell in [20usize, 30, 40] {
                v.push(TableConfig { kind, n, ell, nu });
            }
        }
        v
    };
    match id {
        TableId::Tab1 | TableId::Tab3 => grid(ProblemKind::PhillipsNystrom, 1e-2),
        TableId::Tab2 => grid(ProblemKind::PhillipsNystrom, 1e-3),
        TableId::Tab1b => grid(ProblemKind::PhillipsGalerkin, 1e-2),
        TableId::Tab2b => grid(ProblemKind::PhillipsGalerkin, 1e-3),
        TableId::Tab4 => {
            let mut v = Vec::new();
            for nu in [1e-2, 1e-3] {
                for n in [1000usize, 2000, 4000] {
                    v.push(TableConfig {
                        kind: ProblemKind::BaartGalerkin,
                        n,
                        ell: 10,
                        nu,
                    });
                }
            }
            v
        }
    }
}

/// Per-seed outcome of one table cell.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub config: TableConfig,
    pub seed: u64,
    pub outcome: Result<ExperimentRecord, RunError>,
}

/// All rows of a sweep, ordered by configuration then seed, plus the
/// per-configuration medians.
#[derive(Clone, Debug)]
pub struct TableOutput {
    pub rows: Vec<TableRow>,
    pub medians: Vec<(TableConfig, Option<ExperimentRecord>)>,
}

/// Runs every configuration of the named table across `seeds`, using up to
/// `threads` worker threads. Failed cells keep their row (the CSV carries
/// the error message); medians aggregate the successful seeds of each
/// configuration.
pub fn reproduce_table(
    id: TableId,
    seeds: &[u64],
    threads: usize,
    base: &ExperimentOptions,
) -> Result<TableOutput, RunError> {
    let opts = ExperimentOptions {
        skip_full: base.skip_full || id.skips_full_solve(),
        ..*base
    };
    run_sweep(&table_configs(id), seeds, threads, &opts)
}

/// Runs an arbitrary configuration sweep; the building block behind
/// [`reproduce_table`]. Problems are generated once per `(kind, n)` and
/// shared across all cells and seeds; the emitted row order is independent
/// of scheduling.
pub fn run_sweep(
    configs: &[TableConfig],
    seeds: &[u64],
    threads: usize,
    opts: &ExperimentOptions,
) -> Result<TableOutput, RunError> {
    assert!(!seeds.is_empty(), "at least one seed is required");

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool construction");

    // Share one matrix per (kind, n) across the whole sweep.
    let mut shapes: Vec<(ProblemKind, usize)> = configs.iter().map(|c| (c.kind, c.n)).collect();
    shapes.sort_by_key(|s| (s.0.name(), s.1));
    shapes.dedup();
    let problems: HashMap<(ProblemKind, usize), Arc<TestProblem>> = pool.install(|| {
        shapes
            .par_iter()
            .map(|&(kind, n)| generate_problem(kind, n).map(|p| ((kind, n), Arc::new(p))))
            .collect::<Result<_, _>>()
    })?;

    let jobs: Vec<(usize, TableConfig, u64)> = configs
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| seeds.iter().map(move |&s| (ci, *c, s)))
        .collect();
    let mut rows: Vec<(usize, TableRow)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(ci, config, seed)| {
                let problem = &problems[&(config.kind, config.n)];
                let outcome = run_on_problem(problem, config.ell, config.nu, seed, opts);
                (
                    ci,
                    TableRow {
                        config,
                        seed,
                        outcome,
                    },
                )
            })
            .collect()
    });
    // Deterministic emission order regardless of scheduling.
    rows.sort_by_key(|(ci, row)| (*ci, row.seed));

    let mut medians = Vec::with_capacity(configs.len());
    for (ci, config) in configs.iter().enumerate() {
        let group: Vec<&ExperimentRecord> = rows
            .iter()
            .filter(|(i, _)| *i == ci)
            .filter_map(|(_, row)| row.outcome.as_ref().ok())
            .collect();
        medians.push((*config, median_record(&group)));
    }

    Ok(TableOutput {
        rows: rows.into_iter().map(|(_, row)| row).collect(),
        medians,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

fn median_record(group: &[&ExperimentRecord]) -> Option<ExperimentRecord> {
    let first = group.first()?;
    let pick = |f: fn(&ExperimentRecord) -> f64| -> f64 {
        let mut vals: Vec<f64> = group.iter().map(|r| f(r)).collect();
        median(&mut vals)
    };
    let rel_diff_full = if group.iter().all(|r| r.rel_diff_full.is_some()) {
        let mut vals: Vec<f64> = group.iter().map(|r| r.rel_diff_full.unwrap()).collect();
        Some(median(&mut vals))
    } else {
        None
    };
    let mut runtimes: Vec<f64> = group.iter().map(|r| r.runtime_ms as f64).collect();
    Some(ExperimentRecord {
        problem: first.problem,
        n: first.n,
        ell: first.ell,
        nu: first.nu,
        seed: 0,
        weight: first.weight,
        gap_method: first.gap_method,
        h_ell: pick(|r| r.h_ell),
        alpha: pick(|r| r.alpha),
        rel_err_xn: pick(|r| r.rel_err_xn),
        rel_diff_full,
        sigma_max_h: pick(|r| r.sigma_max_h),
        sigma_min_h: pick(|r| r.sigma_min_h),
        feasible: group.iter().all(|r| r.feasible),
        runtime_ms: median(&mut runtimes) as u64,
    })
}

impl TableOutput {
    /// Per-seed rows grouped by configuration, each group followed by its
    /// median row (seed column `median`). Failed cells carry the error
    /// message in the trailing column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        let configs: Vec<TableConfig> = self.medians.iter().map(|(c, _)| *c).collect();
        for (ci, config) in configs.iter().enumerate() {
            // Configurations are unique within a table, so equality picks
            // out exactly this group.
            for row in self.rows.iter().filter(|r| r.config == *config) {
                match &row.outcome {
                    Ok(rec) => {
                        out.push_str(&rec.csv_row());
                        out.push('\n');
                    }
                    Err(e) => {
                        out.push_str(&format!(
                            "{},{},{},{},{},,,,,,,,,,,{}\n",
                            config.kind.name(),
                            config.n,
                            config.ell,
                            config.nu,
                            row.seed,
                            csv_escape(&e.to_string())
                        ));
                    }
                }
            }
            if let Some(med) = &self.medians[ci].1 {
                out.push_str(&med.csv_row_with_seed_label("median"));
                out.push('\n');
            } else {
                out.push_str(&format!(
                    "{},{},{},{},median,,,,,,,,,,,{}\n",
                    config.kind.name(),
                    config.n,
                    config.ell,
                    config.nu,
                    csv_escape("no successful runs")
                ));
            }
        }
        out
    }
}
