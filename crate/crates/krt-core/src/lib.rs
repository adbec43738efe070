//! Krylov reduction and Tikhonov regularization for large, ill-conditioned
//! dense linear systems.
//!
//! The solver pipeline implemented here reduces a square system `A x = y` by a
//! few steps of the Arnoldi process, replaces `A` by the resulting low-rank
//! approximation, applies Tikhonov regularization to the reduced problem, and
//! selects the regularization parameter from a discrepancy equation that
//! accounts for both the data noise and the operator approximation error.
//!
//! The crate is `no_std` (with `alloc`); all floating-point kernels go through
//! [`libm`] so results are bit-reproducible across platforms. IO, file
//! formats, and the experiment harness live in the companion `krt-cli` crate.
//!
//! Module map:
//!
//! * [`numerics`] — dense vectors/matrices, the uniformly weighted inner
//!   product, small dense SVD, power-iteration spectral-norm estimation.
//! * [`arnoldi`] — the Arnoldi process with full reorthogonalization and
//!   breakdown detection.
//! * [`lowrank`] — the rank-`l` approximation, its approximation gap, and the
//!   orthogonal projector onto its range.
//! * [`tikhonov`] — reduced and full-space Tikhonov solvers.
//! * [`discrepancy`] — evaluation of the discrepancy equation and the root
//!   finder for the regularization parameter.
//! * [`problems`] — classic first-kind Fredholm test problems (`phillips`,
//!   `baart`) and the seeded noise model.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod arnoldi;
pub mod discrepancy;
mod error;
mod fmath;
pub mod lowrank;
pub mod numerics;
pub mod problems;
mod sampling;
pub mod tikhonov;

pub use error::{Error, Result};
