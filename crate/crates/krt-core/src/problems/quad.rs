//! Gauss-Legendre nodes and weights on `[-1, 1]`, computed at runtime by
//! Newton iteration on the Legendre recurrence.

use alloc::vec::Vec;

use crate::fmath;

/// Returns the `m`-point Gauss-Legendre rule `(nodes, weights)`, nodes
/// ascending. Exact for polynomials of degree `2m - 1`.
pub fn legendre_rule(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "quadrature order must be positive");
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for i in 0..m {
        // Tricomi-style initial guess, then Newton on P_m.
        let mut x = fmath::cos(fmath::PI * (i as f64 + 0.75) / (m as f64 + 0.5));
        for _ in 0..100 {
            let (p, d) = legendre_eval(m, x);
            let step = p / d;
            x -= step;
            if fmath::fabs(step) <= 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_eval(m, x);
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial `P_m` at `x`.
fn legendre_eval(m: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=m {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    if m == 1 {
        return (x, 1.0);
    }
    let d = m as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}
