//! Experiment harness, file formats, and the `krt` command-line interface
//! for the `krt-core` solver library.
//!
//! The library half of this crate exposes the building blocks the binary is
//! made of, so tests and downstream tools can drive the same pipeline
//! programmatically:
//!
//! * [`runner`] — one experiment end to end: generate, perturb, reduce,
//!   select the regularization parameter, solve, measure.
//! * [`tables`] — canned benchmark sweeps over `(n, l, nu)` grids with
//!   multi-seed medians and CSV output.
//! * [`profile`] — solution profiles (abscissa, exact, computed) as CSV.
//! * [`matrix_market`] — dense matrix/vector serialization in the
//!   MatrixMarket array format at 17 significant digits.

pub mod matrix_market;
pub mod profile;
pub mod record;
pub mod runner;
pub mod tables;

pub use record::ExperimentRecord;
pub use runner::{run_experiment, run_on_problem, ExperimentOptions, RunError, Stage};
pub use tables::{reproduce_table, run_sweep, TableConfig, TableId, TableOutput};
