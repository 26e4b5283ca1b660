//! Jacobi-preconditioned Krylov solvers on CSR matrices.
//!
//! Conjugate gradients serve the symmetric (SIP) systems, BiCGStab the
//! nonsymmetric (IIP) ones. Every reported residual is recomputed from
//! scratch as `||b - A x|| / ||b||` once the iteration stops.

mod csr;
pub mod dense;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use csr::CsrMatrix;

/// Relative symmetry defect tolerated by [`solve_spd`].
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("no convergence after {} iterations (relative residual {:.3e})", .0.iterations, .0.relative_residual)]
    NotConverged(SolveReport),
    #[error("matrix is not symmetric (relative defect {0:.3e})")]
    NonSymmetric(f64),
    #[error("breakdown at iteration {iteration}: {reason}")]
    Breakdown { iteration: usize, reason: String },
    #[error("dimension mismatch: matrix {rows}x{cols}, right-hand side {rhs}")]
    Dimension { rows: usize, cols: usize, rhs: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    /// Defaults to ten times the number of unknowns.
    pub max_iter: Option<usize>,
    pub jacobi: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
            jacobi: true,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual_norm(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    b.iter().zip(&ax).map(|(bi, ai)| (bi - ai).powi(2)).sum::<f64>().sqrt()
}

struct Setup {
    inv_diag: Vec<f64>,
    max_iter: usize,
    b_norm: f64,
}

fn setup(a: &CsrMatrix, b: &[f64], opts: &SolverOptions) -> Result<Setup, SolveError> {
    if a.nrows() != a.ncols() || b.len() != a.nrows() {
        return Err(SolveError::Dimension {
            rows: a.nrows(),
            cols: a.ncols(),
            rhs: b.len(),
        });
    }
    let diag = a.diagonal();
    if let Some(i) = diag.iter().position(|&d| d == 0.0 || !d.is_finite()) {
        return Err(SolveError::Breakdown {
            iteration: 0,
            reason: format!("zero diagonal entry in row {i}"),
        });
    }
    let inv_diag = if opts.jacobi {
        diag.iter().map(|d| 1.0 / d).collect()
    } else {
        vec![1.0; diag.len()]
    };
    Ok(Setup {
        inv_diag,
        max_iter: opts.max_iter.unwrap_or(10 * a.nrows().max(1)),
        b_norm: norm(b),
    })
}

fn finish(
    a: &CsrMatrix,
    b: &[f64],
    x: Vec<f64>,
    iterations: usize,
    start: Instant,
    b_norm: f64,
    tol: f64,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    let relative_residual = residual_norm(a, &x, b) / b_norm;
    let report = SolveReport {
        iterations,
        relative_residual,
        converged: relative_residual <= tol,
        wall_time: start.elapsed().as_secs_f64(),
    };
    if report.converged {
        Ok((x, report))
    } else {
        Err(SolveError::NotConverged(report))
    }
}

fn trivial(n: usize, start: Instant) -> (Vec<f64>, SolveReport) {
    (
        vec![0.0; n],
        SolveReport {
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
            wall_time: start.elapsed().as_secs_f64(),
        },
    )
}

/// Preconditioned conjugate gradients for symmetric positive definite `a`.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], opts: &SolverOptions) -> Result<(Vec<f64>, SolveReport), SolveError> {
    let start = Instant::now();
    let s = setup(a, b, opts)?;
    let defect = a.symmetry_defect();
    if defect > SYMMETRY_TOL {
        return Err(SolveError::NonSymmetric(defect));
    }
    let n = b.len();
    if s.b_norm == 0.0 {
        return Ok(trivial(n, start));
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&s.inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    // iterate a little below tol so the recomputed residual also meets it
    let target = 0.5 * opts.tol * s.b_norm;
    while iterations < s.max_iter {
        if norm(&r) <= target {
            break;
        }
        iterations += 1;
        a.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(SolveError::Breakdown {
                iteration: iterations,
                reason: format!("p^T A p = {pap:e}; matrix not positive definite"),
            });
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * s.inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    finish(a, b, x, iterations, start, s.b_norm, opts.tol)
}

/// Right-preconditioned BiCGStab for general nonsingular `a`.
pub fn solve_general(
    a: &CsrMatrix,
    b: &[f64],
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    let start = Instant::now();
    let s = setup(a, b, opts)?;
    let n = b.len();
    if s.b_norm == 0.0 {
        return Ok(trivial(n, start));
    }
    let precond = |v: &[f64]| -> Vec<f64> { v.iter().zip(&s.inv_diag).map(|(a, d)| a * d).collect() };
    let breakdown = |iteration: usize, what: &str| SolveError::Breakdown {
        iteration,
        reason: what.to_string(),
    };
    let target = 0.5 * opts.tol * s.b_norm;
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut iterations = 0;
    while iterations < s.max_iter && norm(&r) > target {
        iterations += 1;
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || !rho_new.is_finite() {
            return Err(breakdown(iterations, "rho vanished"));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let p_hat = precond(&p);
        a.matvec_into(&p_hat, &mut v);
        let rv = dot(&r_hat, &v);
        if rv == 0.0 || !rv.is_finite() {
            return Err(breakdown(iterations, "r_hat^T v vanished"));
        }
        alpha = rho / rv;
        let sv: Vec<f64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
        if norm(&sv) <= target {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            break;
        }
        let s_hat = precond(&sv);
        let t = a.matvec(&s_hat);
        let tt = dot(&t, &t);
        if tt == 0.0 || !tt.is_finite() {
            return Err(breakdown(iterations, "t vanished"));
        }
        omega = dot(&t, &sv) / tt;
        if omega == 0.0 {
            return Err(breakdown(iterations, "omega vanished"));
        }
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = sv[i] - omega * t[i];
        }
    }
    finish(a, b, x, iterations, start, s.b_norm, opts.tol)
}
