//! Scalar floating-point kernels, routed through `libm` so the crate stays
//! `no_std` and produces identical bits on every platform.

#[allow(unused_imports)]
pub(crate) use libm::{cos, exp, fabs, log, sin, sinh, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;
