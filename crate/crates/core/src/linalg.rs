//! Dense linear solves for the per-step collocation system.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Absolute residual accepted when the relative target is out of reach
/// (right-hand sides close to zero).
pub const RESIDUAL_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearMethod {
    #[default]
    DirectLu,
    RestartedGmres,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    /// Relative residual target `‖b − A x‖ / ‖b‖`.
    pub tol: f64,
    /// Krylov dimension before restart.
    pub restart: usize,
    /// Cap on the total number of Arnoldi steps.
    pub max_iter: usize,
}

impl GmresOptions {
    /// Defaults for an `n × n` system: tol `1e-12`, restart `n`, `10 n` iterations.
    pub fn for_dim(n: usize) -> Self {
        Self {
            tol: 1e-12,
            restart: n.max(1),
            max_iter: 10 * n.max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub solution: DVector<f64>,
    /// `‖A x − b‖₂`.
    pub residual: f64,
    /// Arnoldi steps taken (0 for the direct solver).
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinearError {
    #[error("matrix is {rows}x{cols} but right-hand side has length {rhs}")]
    Dimension {
        rows: usize,
        cols: usize,
        rhs: usize,
    },
    #[error("system matrix is singular")]
    Singular,
    #[error("GMRES did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { residual: f64, iterations: usize },
}

fn check_dims(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(), LinearError> {
    if a.nrows() != a.ncols() || a.nrows() != b.len() {
        return Err(LinearError::Dimension {
            rows: a.nrows(),
            cols: a.ncols(),
            rhs: b.len(),
        });
    }
    Ok(())
}

fn residual_norm(a: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a * x - b).norm()
}

/// Partial-pivoting LU solve.
pub fn solve_lu(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<LinearSolution, LinearError> {
    check_dims(a, b)?;
    let solution = a.clone().lu().solve(b).ok_or(LinearError::Singular)?;
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(LinearError::Singular);
    }
    let residual = residual_norm(a, &solution, b);
    Ok(LinearSolution {
        solution,
        residual,
        iterations: 0,
    })
}

/// Restarted GMRES with modified Gram–Schmidt Arnoldi and Givens rotations,
/// started from zero.
pub fn solve_gmres(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    opts: &GmresOptions,
) -> Result<LinearSolution, LinearError> {
    check_dims(a, b)?;
    let n = b.len();
    let b_norm = b.norm();
    let mut x = DVector::zeros(n);
    if b_norm == 0.0 {
        return Ok(LinearSolution {
            solution: x,
            residual: 0.0,
            iterations: 0,
        });
    }
    let target = opts.tol * b_norm;
    let restart = opts.restart.clamp(1, n.max(1));
    let mut iterations = 0;
    let mut r = b - a * &x;
    let mut r_norm = r.norm();

    while r_norm > target && iterations < opts.max_iter {
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(restart + 1);
        basis.push(&r / r_norm);
        let mut h = DMatrix::<f64>::zeros(restart + 1, restart);
        let mut cs = vec![0.0; restart];
        let mut sn = vec![0.0; restart];
        let mut g = DVector::<f64>::zeros(restart + 1);
        g[0] = r_norm;
        let mut used = 0;

        for j in 0..restart {
            if iterations >= opts.max_iter {
                break;
            }
            let mut w = a * &basis[j];
            for (i, v) in basis.iter().enumerate() {
                let hij = w.dot(v);
                h[(i, j)] = hij;
                w.axpy(-hij, v, 1.0);
            }
            let w_norm = w.norm();
            h[(j + 1, j)] = w_norm;
            for i in 0..j {
                let t = cs[i] * h[(i, j)] + sn[i] * h[(i + 1, j)];
                h[(i + 1, j)] = -sn[i] * h[(i, j)] + cs[i] * h[(i + 1, j)];
                h[(i, j)] = t;
            }
            let denom = h[(j, j)].hypot(h[(j + 1, j)]);
            if denom == 0.0 {
                break;
            }
            cs[j] = h[(j, j)] / denom;
            sn[j] = h[(j + 1, j)] / denom;
            h[(j, j)] = denom;
            h[(j + 1, j)] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            used = j + 1;
            iterations += 1;
            let breakdown = w_norm <= f64::EPSILON * denom;
            if g[j + 1].abs() <= target || breakdown {
                break;
            }
            basis.push(w / w_norm);
        }

        if used == 0 {
            break;
        }
        // back substitution on the triangular part of H
        let mut y = DVector::<f64>::zeros(used);
        for i in (0..used).rev() {
            let mut s = g[i];
            for k in i + 1..used {
                s -= h[(i, k)] * y[k];
            }
            y[i] = s / h[(i, i)];
        }
        for (i, yi) in y.iter().enumerate() {
            x.axpy(*yi, &basis[i], 1.0);
        }
        r = b - a * &x;
        let new_norm = r.norm();
        let stalled = new_norm > 0.9 * r_norm;
        r_norm = new_norm;
        if stalled {
            break;
        }
    }

    if !r_norm.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return Err(LinearError::Singular);
    }
    if r_norm <= target.max(RESIDUAL_FLOOR) {
        Ok(LinearSolution {
            solution: x,
            residual: r_norm,
            iterations,
        })
    } else {
        Err(LinearError::NotConverged {
            residual: r_norm,
            iterations,
        })
    }
}
