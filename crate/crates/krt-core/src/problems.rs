//! First-kind Fredholm test problems and the noise model used by the
//! experiment harness.
//!
//! Three discretizations are provided:
//!
//! * `phillips_nystrom` — the classic convolution-kernel equation on
//!   `[-6, 6]`, discretized by the Nystrom method on the composite closed
//!   trapezoidal rule. Nonsymmetric.
//! * `phillips_galerkin` — the same equation discretized with orthonormal
//!   box test/trial functions; symmetric indefinite.
//! * `baart_galerkin` — the exponential-kernel equation with
//!   `kappa(s,t) = exp(s cos t)` on `[0, pi/2] x [0, pi]` and solution
//!   `sin t`, with the same orthonormal box convention. Severely
//!   ill-conditioned: the singular values decay exponentially.
//!
//! Galerkin entries are computed by per-cell tensor Gauss-Legendre
//! quadrature of order 20. For the piecewise-trigonometric convolution
//! kernel the inner integral is clipped to the kernel support, whose
//! endpoints fall on cell boundaries because `n` is required to be divisible
//! by 4; every quadrature panel then sees an analytic integrand and the
//! entries are accurate to machine precision.

use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::{norm2, DenseMatrix, DenseOperator};
use crate::{fmath, sampling, Error, Result};

mod quad;

pub use quad::legendre_rule;

const QUAD_ORDER: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    PhillipsNystrom,
    PhillipsGalerkin,
    BaartGalerkin,
}

impl ProblemKind {
    /// Stable lowercase name used in records and file outputs.
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::PhillipsNystrom => "phillips_nystrom",
            ProblemKind::PhillipsGalerkin => "phillips_galerkin",
            ProblemKind::BaartGalerkin => "baart_galerkin",
        }
    }
}

/// Discretization grid on the solution side.
#[derive(Clone, Debug)]
pub struct Grid {
    /// Nodes (Nystrom) or cell centers (Galerkin).
    pub abscissae: Vec<f64>,
    /// Node spacing or cell width.
    pub mesh_width: f64,
}

/// A generated test system `A x = y` with known exact solution.
#[derive(Clone, Debug)]
pub struct TestProblem {
    kind: ProblemKind,
    operator: DenseOperator,
    x_exact: Vec<f64>,
    y_exact: Vec<f64>,
    grid: Grid,
}

impl TestProblem {
    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.operator.n()
    }

    pub fn operator(&self) -> &DenseOperator {
        &self.operator
    }

    pub fn x_exact(&self) -> &[f64] {
        &self.x_exact
    }

    /// The exact right-hand side `y = A x`, treated as unknown by the solver
    /// pipeline and used only to synthesize data and measure errors.
    pub fn y_exact(&self) -> &[f64] {
        &self.y_exact
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Conversion from stored coefficients to physical solution values: box
    /// coefficients carry a `1/sqrt(cell width)` normalization, Nystrom
    /// values are already physical.
    pub fn physical_scale(&self) -> f64 {
        match self.kind {
            ProblemKind::PhillipsNystrom => 1.0,
            ProblemKind::PhillipsGalerkin | ProblemKind::BaartGalerkin => {
                1.0 / fmath::sqrt(self.grid.mesh_width)
            }
        }
    }
}

/// Exact solution of the convolution test equation: `1 + cos(pi t / 3)`
/// inside `|t| < 3`, zero outside.
pub fn phillips_solution(t: f64) -> f64 {
    if fmath::fabs(t) < 3.0 {
        1.0 + fmath::cos(fmath::PI * t / 3.0)
    } else {
        0.0
    }
}

/// Analytic right-hand side of the convolution test equation on `[-6, 6]`.
pub fn phillips_rhs(s: f64) -> f64 {
    let a = fmath::fabs(s);
    (6.0 - a) * (1.0 + 0.5 * fmath::cos(fmath::PI * s / 3.0))
        + 9.0 / (2.0 * fmath::PI) * fmath::sin(fmath::PI * a / 3.0)
}

/// Analytic right-hand side `2 sinh(s) / s` of the exponential-kernel test
/// equation, with the removable singularity filled in at `s = 0`.
pub fn baart_rhs(s: f64) -> f64 {
    if s == 0.0 {
        2.0
    } else {
        2.0 * fmath::sinh(s) / s
    }
}

/// Nystrom discretization of the convolution equation on the closed
/// trapezoidal rule with `n` nodes: `A[i][j] = w_j kappa(s_i - t_j)` with
/// weights `h * (1/2, 1, ..., 1, 1/2)`.
pub fn phillips_nystrom(n: usize) -> Result<TestProblem> {
    if n < 3 {
        return Err(Error::InvalidInput("phillips_nystrom requires n >= 3"));
    }
    let h = 12.0 / (n - 1) as f64;
    let t: Vec<f64> = (0..n).map(|i| -6.0 + h * i as f64).collect();
    let matrix = DenseMatrix::from_fn(n, n, |i, j| {
        let w = if j == 0 || j == n - 1 { 0.5 * h } else { h };
        w * phillips_solution(t[i] - t[j])
    });
    let x_exact: Vec<f64> = t.iter().map(|&ti| phillips_solution(ti)).collect();
    finish(
        ProblemKind::PhillipsNystrom,
        matrix,
        x_exact,
        Grid {
            abscissae: t,
            mesh_width: h,
        },
    )
}

/// Galerkin discretization of the convolution equation with `n` orthonormal
/// box functions; `n` must be divisible by 4 so the kernel support edges
/// `+-3` fall on cell boundaries.
///
/// The kernel depends only on `s - t` and the mesh is uniform, so entries
/// depend only on `i - j`; one band of values is computed and the matrix is
/// filled as a symmetric Toeplitz band.
pub fn phillips_galerkin(n: usize) -> Result<TestProblem> {
    if n < 4 || !n.is_multiple_of(4) {
        return Err(Error::InvalidInput(
            "phillips_galerkin requires n >= 4 divisible by 4",
        ));
    }
    let h = 12.0 / n as f64;
    let edges: Vec<f64> = (0..=n).map(|i| -6.0 + h * i as f64).collect();
    let (nodes, weights) = legendre_rule(QUAD_ORDER);

    // Inner integral of the kernel over the first t-cell, clipped to the
    // support |s - t| < 3.
    let inner = |s: f64| -> f64 {
        let lo = edges[0].max(s - 3.0);
        let hi = edges[1].min(s + 3.0);
        if hi <= lo {
            return 0.0;
        }
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut sum = 0.0;
        for (xi, wi) in nodes.iter().zip(&weights) {
            let t = mid + half * xi;
            sum += wi * (1.0 + fmath::cos(fmath::PI * (s - t) / 3.0));
        }
        half * sum
    };

    let band = n / 4; // entries vanish beyond |i - j| = n/4
    let mut vals = vec![0.0; n];
    for (d, v) in vals.iter_mut().enumerate().take(band + 1) {
        let mid = 0.5 * (edges[d] + edges[d + 1]);
        let half = 0.5 * h;
        let mut sum = 0.0;
        for (xi, wi) in nodes.iter().zip(&weights) {
            sum += wi * inner(mid + half * xi);
        }
        *v = half * sum / h;
    }
    let matrix = DenseMatrix::from_fn(n, n, |i, j| vals[i.abs_diff(j)]);

    let x_exact: Vec<f64> = (0..n)
        .map(|j| {
            let mid = 0.5 * (edges[j] + edges[j + 1]);
            let half = 0.5 * h;
            let mut sum = 0.0;
            for (xi, wi) in nodes.iter().zip(&weights) {
                sum += wi * phillips_solution(mid + half * xi);
            }
            half * sum / fmath::sqrt(h)
        })
        .collect();
    let centers = (0..n).map(|j| 0.5 * (edges[j] + edges[j + 1])).collect();
    finish(
        ProblemKind::PhillipsGalerkin,
        matrix,
        x_exact,
        Grid {
            abscissae: centers,
            mesh_width: h,
        },
    )
}

/// Galerkin discretization of the exponential-kernel equation with `n`
/// orthonormal box functions on `[0, pi/2]` (data side) and `[0, pi]`
/// (solution side).
pub fn baart_galerkin(n: usize) -> Result<TestProblem> {
    if n < 2 {
        return Err(Error::InvalidInput("baart_galerkin requires n >= 2"));
    }
    let hs = fmath::PI / (2.0 * n as f64);
    let ht = fmath::PI / n as f64;
    let (nodes, weights) = legendre_rule(QUAD_ORDER);
    let s_centers: Vec<f64> = (0..n).map(|i| hs * (i as f64 + 0.5)).collect();
    let t_centers: Vec<f64> = (0..n).map(|j| ht * (j as f64 + 0.5)).collect();
    let s_offsets: Vec<f64> = nodes.iter().map(|xi| 0.5 * hs * xi).collect();

    // exp(s_k cos t_m) = exp(center_i cos t_m) * exp(offset_k cos t_m); the
    // inner sum over k collapses per t-node, leaving 20 exponentials per
    // entry instead of 400.
    let scale = fmath::sqrt(hs * ht) / 4.0;
    let mut matrix = DenseMatrix::zeros(n, n);
    let mut cos_t = [0.0; QUAD_ORDER];
    let mut folded = [0.0; QUAD_ORDER];
    for j in 0..n {
        for m in 0..QUAD_ORDER {
            cos_t[m] = fmath::cos(t_centers[j] + 0.5 * ht * nodes[m]);
            let mut f = 0.0;
            for (k, wk) in weights.iter().enumerate() {
                f += wk * fmath::exp(s_offsets[k] * cos_t[m]);
            }
            folded[m] = f * weights[m];
        }
        for i in 0..n {
            let mut sum = 0.0;
            for m in 0..QUAD_ORDER {
                sum += folded[m] * fmath::exp(s_centers[i] * cos_t[m]);
            }
            matrix[(i, j)] = scale * sum;
        }
    }

    let x_exact: Vec<f64> = (0..n)
        .map(|j| {
            let half = 0.5 * ht;
            let mut sum = 0.0;
            for (xi, wi) in nodes.iter().zip(&weights) {
                sum += wi * fmath::sin(t_centers[j] + half * xi);
            }
            half * sum / fmath::sqrt(ht)
        })
        .collect();
    finish(
        ProblemKind::BaartGalerkin,
        matrix,
        x_exact,
        Grid {
            abscissae: t_centers,
            mesh_width: ht,
        },
    )
}

fn finish(
    kind: ProblemKind,
    matrix: DenseMatrix,
    x_exact: Vec<f64>,
    grid: Grid,
) -> Result<TestProblem> {
    let operator = DenseOperator::from_matrix(matrix)?;
    let mut y_exact = vec![0.0; operator.n()];
    operator.apply(&x_exact, &mut y_exact);
    Ok(TestProblem {
        kind,
        operator,
        x_exact,
        y_exact,
        grid,
    })
}

/// Synthetic data `y + e` with `||e|| / ||y|| = nu` exactly.
#[derive(Clone, Debug)]
pub struct NoisyData {
    y_delta: Vec<f64>,
    nu: f64,
    delta: f64,
    seed: u64,
}

impl NoisyData {
    pub fn y_delta(&self) -> &[f64] {
        &self.y_delta
    }

    /// Relative noise level `||e||_2 / ||y||_2`.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Absolute noise bound `delta = nu ||y||_2`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Draws a seeded Gaussian perturbation and rescales it to the prescribed
/// relative noise level. The same seed reproduces the same data bitwise.
pub fn add_noise(problem: &TestProblem, nu: f64, seed: u64) -> Result<NoisyData> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::InvalidInput("noise level must be finite and >= 0"));
    }
    let y = problem.y_exact();
    let e = sampling::standard_normal_vec(seed, y.len());
    let enorm = norm2(&e);
    let ynorm = norm2(y);
    let scale = if enorm > 0.0 { nu * ynorm / enorm } else { 0.0 };
    let y_delta: Vec<f64> = y.iter().zip(&e).map(|(yi, ei)| yi + scale * ei).collect();
    Ok(NoisyData {
        y_delta,
        nu,
        delta: nu * ynorm,
        seed,
    })
}
