//! Tikhonov-regularized solvers: the reduced functional built on the
//! low-rank approximation, and the full-space functional used as a
//! comparison.
//!
//! The reduced minimizer of `||A_l x - y||^2 + alpha ||x||^2` lies in
//! `span(V_l)`: any component orthogonal to the Krylov subspace leaves the
//! data term unchanged and only grows the penalty. In the coordinates
//! `x = V_l z` the problem becomes `min ||H z - c||^2 + alpha ||z||^2` with
//! `c = V_{l+1}^T y`, solved through the SVD of `H` instead of forming
//! `H^T H` (which would square the condition number).

use alloc::vec;
use alloc::vec::Vec;

use crate::lowrank::LowRankApproximation;
use crate::numerics::{norm2, weighted_norm, DenseMatrix, DenseOperator, InnerProductWeight};
use crate::{Error, Result};

/// Largest `n` for which the full-space solver factorizes the normal
/// equations directly; above this, conjugate gradients are used.
pub const DIRECT_SOLVE_MAX_N: usize = 512;

/// Default relative residual tolerance for the conjugate-gradient solver.
pub const DEFAULT_CG_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TikhonovVariant {
    Reduced,
    Full,
}

/// A Tikhonov minimizer together with the norms that enter parameter
/// diagnostics; `residual_norm` is taken with the variant's own operator.
#[derive(Clone, Debug)]
pub struct RegularizedSolution {
    pub x: Vec<f64>,
    pub alpha: f64,
    pub variant: TikhonovVariant,
    pub residual_norm: f64,
    pub solution_norm: f64,
}

/// Minimizes `||A_l x - y||_w^2 + alpha ||x||_w^2` exactly through the SVD of
/// the Hessenberg factor.
pub fn solve_reduced(
    l: &LowRankApproximation,
    y_delta: &[f64],
    alpha: f64,
) -> Result<RegularizedSolution> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidInput("alpha must be positive and finite"));
    }
    let dec = l.decomposition();
    let h = dec.hessenberg();
    let ell = h.cols();
    let c = dec.coefficients(y_delta, dec.basis_len())?;
    let u = l.svd().u();
    let mut d = vec![0.0; u.rows()];
    u.matvec_transpose(&c, &mut d);
    // Filter factors s_i / (s_i^2 + alpha) in the right singular basis.
    let s = l.svd().singular_values();
    let mut filtered = vec![0.0; ell];
    for i in 0..ell {
        filtered[i] = d[i] * s[i] / (s[i] * s[i] + alpha);
    }
    let mut z = vec![0.0; ell];
    l.svd().w().matvec(&filtered, &mut z);
    let x = dec.combine(&z);

    let ax = l.apply(&x)?;
    let weight = dec.weight();
    let residual_norm = weighted_diff_norm(&ax, y_delta, weight);
    let solution_norm = weighted_norm(&x, weight);
    Ok(RegularizedSolution {
        x,
        alpha,
        variant: TikhonovVariant::Reduced,
        residual_norm,
        solution_norm,
    })
}

/// Minimizes `||A x - y||_w^2 + alpha ||x||_w^2` over the full space, i.e.
/// solves `(A^T A + alpha I) x = A^T y` (the uniform weight cancels).
///
/// Dense Cholesky below [`DIRECT_SOLVE_MAX_N`], conjugate gradients on the
/// normal equations above, run to relative residual `tol` within `10 n`
/// iterations.
pub fn solve_full(
    a: &DenseOperator,
    y_delta: &[f64],
    alpha: f64,
    weight: InnerProductWeight,
    tol: f64,
) -> Result<RegularizedSolution> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidInput("alpha must be positive and finite"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput("cg tolerance must be positive"));
    }
    let n = a.n();
    if y_delta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: y_delta.len(),
        });
    }
    let mut b = vec![0.0; n];
    a.apply_transpose(y_delta, &mut b);

    let x = if n <= DIRECT_SOLVE_MAX_N {
        let mut m = normal_matrix(a, alpha);
        cholesky_solve(&mut m, &b)?
    } else {
        cg_normal_equations(a, &b, alpha, tol)?
    };

    let mut ax = vec![0.0; n];
    a.apply(&x, &mut ax);
    let residual_norm = weighted_diff_norm(&ax, y_delta, weight);
    let solution_norm = weighted_norm(&x, weight);
    Ok(RegularizedSolution {
        x,
        alpha,
        variant: TikhonovVariant::Full,
        residual_norm,
        solution_norm,
    })
}

/// Euclidean relative error `||x - x_ref||_2 / ||x_ref||_2`.
pub fn relative_error(x: &[f64], x_ref: &[f64]) -> Result<f64> {
    if x.len() != x_ref.len() {
        return Err(Error::DimensionMismatch {
            expected: x_ref.len(),
            actual: x.len(),
        });
    }
    let denom = norm2(x_ref);
    if denom == 0.0 {
        return Err(Error::InvalidInput("relative_error needs a nonzero reference"));
    }
    let mut sum = 0.0;
    for (a, b) in x.iter().zip(x_ref) {
        sum += (a - b) * (a - b);
    }
    Ok(crate::fmath::sqrt(sum) / denom)
}

fn weighted_diff_norm(u: &[f64], v: &[f64], weight: InnerProductWeight) -> f64 {
    let mut sum = 0.0;
    for (a, b) in u.iter().zip(v) {
        sum += (a - b) * (a - b);
    }
    crate::fmath::sqrt(weight.factor(u.len()) * sum)
}

fn normal_matrix(a: &DenseOperator, alpha: f64) -> DenseMatrix {
    let n = a.n();
    let m = a.matrix();
    let mut out = DenseMatrix::zeros(n, n);
    // A^T A is symmetric; fill the lower triangle and mirror.
    for i in 0..n {
        for j in 0..=i {
            let mut s = 0.0;
            for r in 0..n {
                s += m[(r, i)] * m[(r, j)];
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
        out[(i, i)] += alpha;
    }
    out
}

/// In-place Cholesky factorization and solve for a symmetric positive
/// definite system.
fn cholesky_solve(m: &mut DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = m.rows();
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= m[(j, k)] * m[(j, k)];
        }
        if d <= 0.0 {
            return Err(Error::Degenerate("normal equations lost positive definiteness"));
        }
        let djj = crate::fmath::sqrt(d);
        m[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= m[(i, k)] * m[(j, k)];
            }
            m[(i, j)] = s / djj;
        }
    }
    // Forward then backward substitution.
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= m[(i, k)] * x[k];
        }
        x[i] /= m[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            x[i] -= m[(k, i)] * x[k];
        }
        x[i] /= m[(i, i)];
    }
    Ok(x)
}

fn cg_normal_equations(a: &DenseOperator, b: &[f64], alpha: f64, tol: f64) -> Result<Vec<f64>> {
    let n = a.n();
    let max_iter = 10 * n;
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let apply = |x: &[f64], tmp: &mut Vec<f64>, out: &mut Vec<f64>| {
        a.apply(x, tmp);
        a.apply_transpose(tmp, out);
        for (o, xi) in out.iter_mut().zip(x) {
            *o += alpha * xi;
        }
    };
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut tmp = vec![0.0; n];
    let mut mp = vec![0.0; n];
    let mut rr = crate::numerics::dot(&r, &r);
    for _ in 0..max_iter {
        if crate::fmath::sqrt(rr) <= tol * bnorm {
            return Ok(x);
        }
        apply(&p, &mut tmp, &mut mp);
        let pmp = crate::numerics::dot(&p, &mp);
        let step = rr / pmp;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * mp[i];
        }
        let rr_next = crate::numerics::dot(&r, &r);
        let beta = rr_next / rr;
        rr = rr_next;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    if crate::fmath::sqrt(rr) <= tol * bnorm {
        return Ok(x);
    }
    Err(Error::Convergence {
        iterations: max_iter,
        best: crate::fmath::sqrt(rr) / bnorm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arnoldi::{arnoldi, ArnoldiOptions};
    use crate::lowrank::LowRankApproximation;
    use crate::numerics::weighted_dot;
    use crate::sampling;

    fn unit(n: usize, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        e
    }

    /// Gaussian elimination with partial pivoting; the dense oracle used to
    /// cross-check both solvers. Independent of the Cholesky/CG paths.
    fn gauss_solve(a: &DenseMatrix, b: &[f64]) -> Vec<f64> {
        let n = a.rows();
        let mut m = a.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if m[(r, col)].abs() > m[(piv, col)].abs() {
                    piv = r;
                }
            }
            if piv != col {
                for j in 0..n {
                    let t = m[(col, j)];
                    m[(col, j)] = m[(piv, j)];
                    m[(piv, j)] = t;
                }
                x.swap(col, piv);
            }
            let d = m[(col, col)];
            for r in col + 1..n {
                let f = m[(r, col)] / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    m[(r, j)] -= f * m[(col, j)];
                }
                x[r] -= f * x[col];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= m[(i, j)] * x[j];
            }
            x[i] /= m[(i, i)];
        }
        x
    }

    fn materialize_lowrank(l: &LowRankApproximation) -> DenseMatrix {
        let dec = l.decomposition();
        let n = dec.n();
        let h = dec.hessenberg();
        let wf = dec.weight().factor(n);
        DenseMatrix::from_fn(n, n, |i, j| {
            let mut s = 0.0;
            for t in 0..h.rows() {
                for k in 0..h.cols() {
                    s += dec.basis_column(t)[i] * h[(t, k)] * dec.basis_column(k)[j];
                }
            }
            wf * s
        })
    }

    #[test]
    fn scalar_reduced_problem() {
        // Identity operator breaks down after one step with H = [1]; the
        // reduced Tikhonov solution with alpha = 1 is y/(1 + 1) = v1/2.
        let a = DenseOperator::from_matrix(DenseMatrix::identity(5)).unwrap();
        let opts = ArnoldiOptions {
            allow_truncation: true,
            ..ArnoldiOptions::default()
        };
        let dec = arnoldi(&a, &unit(5, 0), 1, &opts).unwrap();
        let l = LowRankApproximation::with_default_rank_tol(dec).unwrap();
        let sol = solve_reduced(&l, &unit(5, 0), 1.0).unwrap();
        for (i, xi) in sol.x.iter().enumerate() {
            let want = if i == 0 { 0.5 } else { 0.0 };
            assert!((xi - want).abs() <= 1e-15);
        }
    }

    #[test]
    fn huge_alpha_crushes_the_solution() {
        let problem = crate::problems::phillips_nystrom(60).unwrap();
        let dec = arnoldi(
            problem.operator(),
            problem.y_exact(),
            8,
            &ArnoldiOptions::default(),
        )
        .unwrap();
        let l = LowRankApproximation::with_default_rank_tol(dec).unwrap();
        let alpha = 1e12;
        let sol = solve_reduced(&l, problem.y_exact(), alpha).unwrap();
        let bound = problem.operator().frobenius_norm() * norm2(problem.y_exact()) / alpha;
        assert!(sol.solution_norm <= bound);
    }

    #[test]
    fn reduced_solver_matches_dense_normal_equations() {
        let problem = crate::problems::phillips_nystrom(50).unwrap();
        let noisy = crate::problems::add_noise(&problem, 1e-2, 3).unwrap();
        let dec = arnoldi(
            problem.operator(),
            noisy.y_delta(),
            10,
            &ArnoldiOptions::default(),
        )
        .unwrap();
        let l = LowRankApproximation::with_default_rank_tol(dec).unwrap();
        let dense = materialize_lowrank(&l);
        for alpha in [1e-3, 1.0, 1e3] {
            let sol = solve_reduced(&l, noisy.y_delta(), alpha).unwrap();
            // Oracle: (M^T M + alpha I) x = M^T y by Gaussian elimination.
            let mut normal = DenseMatrix::from_fn(50, 50, |i, j| {
                (0..50).map(|r| dense[(r, i)] * dense[(r, j)]).sum()
            });
            for i in 0..50 {
                normal[(i, i)] += alpha;
            }
            let mut rhs = vec![0.0; 50];
            dense.matvec_transpose(noisy.y_delta(), &mut rhs);
            let want = gauss_solve(&normal, &rhs);
            let scale = norm2(&want);
            for (g, w) in sol.x.iter().zip(&want) {
                assert!(
                    (g - w).abs() <= 1e-10 * scale,
                    "alpha={alpha}: {g} vs {w}"
                );
            }
        }
    }

    #[test]
    fn reduced_solution_stays_in_the_krylov_subspace() {
        let problem = crate::problems::phillips_nystrom(60).unwrap();
        let noisy = crate::problems::add_noise(&problem, 1e-2, 9).unwrap();
        let dec = arnoldi(
            problem.operator(),
            noisy.y_delta(),
            9,
            &ArnoldiOptions::default(),
        )
        .unwrap();
        let l = LowRankApproximation::with_default_rank_tol(dec).unwrap();
        let sol = solve_reduced(&l, noisy.y_delta(), 0.5).unwrap();
        let coeffs = l.decomposition().coefficients(&sol.x, l.ell()).unwrap();
        let proj = l.decomposition().combine(&coeffs);
        let mut orth = 0.0;
        for (xi, pi) in sol.x.iter().zip(&proj) {
            orth += (xi - pi) * (xi - pi);
        }
        assert!(crate::fmath::sqrt(orth) <= 1e-12 * norm2(&sol.x));
    }

    #[test]
    fn gradient_vanishes_at_the_reduced_minimizer() {
        // A_l^T (A_l x - y) + alpha x = 0 at the solution, in the w-geometry.
        let problem = crate::problems::phillips_nystrom(60).unwrap();
        let noisy = crate::problems::add_noise(&problem, 1e-2, 11).unwrap();
        let dec = arnoldi(
            problem.operator(),
            noisy.y_delta(),
            8,
            &ArnoldiOptions::default(),
        )
        .unwrap();
        let l = LowRankApproximation::with_default_rank_tol(dec).unwrap();
        let alpha = 0.3;
        let sol = solve_reduced(&l, noisy.y_delta(), alpha).unwrap();
        let mut resid = l.apply(&sol.x).unwrap();
        for (r, yi) in resid.iter_mut().zip(noisy.y_delta()) {
            *r -= yi;
        }
        let mut grad = l.apply_adjoint(&resid).unwrap();
        for (g, xi) in grad.iter_mut().zip(&sol.x) {
            *g += alpha * xi;
        }
        let bound =
            1e-10 * problem.operator().frobenius_norm() * norm2(noisy.y_delta());
        assert!(norm2(&grad) <= bound);
    }

    #[test]
    fn norms_are_monotone_in_alpha() {
        let problem = crate::problems::phillips_nystrom(80).unwrap();
        let noisy = crate::problems::add_noise(&problem, 1e-2, 13).unwrap();
        let dec = arnoldi(
            problem.operator(),
            noisy.y_delta(),
            10,
            &ArnoldiOptions::default(),
        )
        .unwrap();
        let l = LowRankApproximation::with_default_rank_tol(dec).unwrap();
        let mut prev_norm = f64::INFINITY;
        let mut prev_resid = 0.0;
        for k in 0..9 {
            let alpha = 1e-4 * crate::fmath::exp(2.3 * k as f64);
            let sol = solve_reduced(&l, noisy.y_delta(), alpha).unwrap();
            assert!(sol.solution_norm <= prev_norm * (1.0 + 1e-12));
            assert!(sol.residual_norm >= prev_resid * (1.0 - 1e-12));
            prev_norm = sol.solution_norm;
            prev_resid = sol.residual_norm;
        }
    }

    #[test]
    fn reduced_solution_is_weight_invariant() {
        let problem = crate::problems::phillips_nystrom(70).unwrap();
        let noisy = crate::problems::add_noise(&problem, 1e-2, 17).unwrap();
        let mut sols = Vec::new();
        for weight in [InnerProductWeight::Euclidean, InnerProductWeight::OneOverN] {
            let dec = arnoldi(
                problem.operator(),
                noisy.y_delta(),
                9,
                &ArnoldiOptions {
                    weight,
                    ..ArnoldiOptions::default()
                },
            )
            .unwrap();
            let l = LowRankApproximation::with_default_rank_tol(dec).unwrap();
            sols.push(solve_reduced(&l, noisy.y_delta(), 2.5).unwrap());
        }
        let scale = norm2(&sols[0].x);
        for (a, b) in sols[0].x.iter().zip(&sols[1].x) {
            assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn full_solver_with_identity_operator() {
        let a = DenseOperator::from_matrix(DenseMatrix::identity(6)).unwrap();
        let y = sampling::standard_normal_vec(1, 6);
        let sol = solve_full(&a, &y, 1.0, InnerProductWeight::Euclidean, 1e-12).unwrap();
        for (xi, yi) in sol.x.iter().zip(&y) {
            assert!((xi - yi / 2.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn full_solver_matches_gaussian_elimination() {
        // Well-conditioned diagonally dominant random matrix, direct branch.
        let vals = sampling::standard_normal_vec(2, 2500);
        let m = DenseMatrix::from_fn(50, 50, |i, j| {
            vals[i * 50 + j] + if i == j { 12.0 } else { 0.0 }
        });
        let a = DenseOperator::from_matrix(m.clone()).unwrap();
        let y = sampling::standard_normal_vec(3, 50);
        let alpha = 0.1;
        let sol = solve_full(&a, &y, alpha, InnerProductWeight::Euclidean, 1e-12).unwrap();
        let mut normal = DenseMatrix::from_fn(50, 50, |i, j| {
            (0..50).map(|r| m[(r, i)] * m[(r, j)]).sum()
        });
        for i in 0..50 {
            normal[(i, i)] += alpha;
        }
        let mut rhs = vec![0.0; 50];
        m.matvec_transpose(&y, &mut rhs);
        let want = gauss_solve(&normal, &rhs);
        let scale = norm2(&want);
        for (g, w) in sol.x.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn cg_branch_agrees_with_direct_branch() {
        // n = 600 forces conjugate gradients; validate against the same
        // system shrunk through the direct path is impossible, so check the
        // normal-equations residual instead.
        let problem = crate::problems::phillips_nystrom(600).unwrap();
        let noisy = crate::problems::add_noise(&problem, 1e-2, 5).unwrap();
        let alpha = 4.0;
        let sol = solve_full(
            problem.operator(),
            noisy.y_delta(),
            alpha,
            InnerProductWeight::Euclidean,
            1e-12,
        )
        .unwrap();
        let a = problem.operator();
        let n = a.n();
        let mut ax = vec![0.0; n];
        a.apply(&sol.x, &mut ax);
        let mut atax = vec![0.0; n];
        a.apply_transpose(&ax, &mut atax);
        let mut aty = vec![0.0; n];
        a.apply_transpose(noisy.y_delta(), &mut aty);
        let mut resid = 0.0;
        let mut scale = 0.0;
        for i in 0..n {
            let r = atax[i] + alpha * sol.x[i] - aty[i];
            resid += r * r;
            scale += aty[i] * aty[i];
        }
        assert!(crate::fmath::sqrt(resid) <= 1e-10 * crate::fmath::sqrt(scale));
    }

    #[test]
    fn residual_norm_uses_the_declared_weight() {
        let problem = crate::problems::phillips_nystrom(40).unwrap();
        let sol = solve_full(
            problem.operator(),
            problem.y_exact(),
            0.7,
            InnerProductWeight::OneOverN,
            1e-12,
        )
        .unwrap();
        let n = 40;
        let mut ax = vec![0.0; n];
        problem.operator().apply(&sol.x, &mut ax);
        let diff: Vec<f64> = ax
            .iter()
            .zip(problem.y_exact())
            .map(|(a, b)| a - b)
            .collect();
        let want = weighted_norm(&diff, InnerProductWeight::OneOverN);
        assert!((sol.residual_norm - want).abs() <= 1e-12 * want.max(1e-300));
        let want_dot = weighted_dot(&sol.x, &sol.x, InnerProductWeight::OneOverN).unwrap();
        assert!((sol.solution_norm * sol.solution_norm - want_dot).abs() <= 1e-12 * want_dot);
    }

    #[test]
    fn relative_error_basics() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(relative_error(&x, &x).unwrap(), 0.0);
        let twice: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!((relative_error(&twice, &x).unwrap() - 1.0).abs() <= 1e-15);
        assert!(relative_error(&x, &[0.0; 3]).is_err());
        assert!(relative_error(&x, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn rejects_nonpositive_alpha() {
        let a = DenseOperator::from_matrix(DenseMatrix::identity(3)).unwrap();
        let y = [1.0, 0.0, 0.0];
        assert!(solve_full(&a, &y, 0.0, InnerProductWeight::Euclidean, 1e-10).is_err());
        assert!(solve_full(&a, &y, -1.0, InnerProductWeight::Euclidean, 1e-10).is_err());
    }
}
