//! Linear solvers for the assembled systems.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::solver::{SolveOptions, SparseSystem};
use crate::{Error, Result};

/// Systems with at most this many unknowns are factorized directly.
pub const DENSE_LIMIT: usize = 500;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearMethod {
    /// Dense LU up to [`DENSE_LIMIT`] unknowns, GMRES above.
    #[default]
    Auto,
    DenseLu,
    Gmres,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution {
    pub x: Vec<f64>,
    /// `‖Ax − b‖₂ / ‖b‖₂` (absolute when `b = 0`).
    pub relative_residual: f64,
    pub iterations: usize,
    pub method: LinearMethod,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn relative_residual(system: &SparseSystem, x: &[f64]) -> f64 {
    let bn = norm(&system.rhs);
    let r = system.residual_norm(x);
    if bn > 0.0 {
        r / bn
    } else {
        r
    }
}

pub fn linear_solve(system: &SparseSystem, opts: &SolveOptions) -> Result<LinearSolution> {
    linear_solve_from(system, opts, None)
}

/// Solves with an optional initial guess, used only by GMRES.
pub fn linear_solve_from(system: &SparseSystem, opts: &SolveOptions, x0: Option<&[f64]>) -> Result<LinearSolution> {
    let n = system.matrix.n();
    if system.rhs.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: system.rhs.len() });
    }
    if let Some(x0) = x0 {
        if x0.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: x0.len() });
        }
    }
    let method = match opts.linear_method {
        LinearMethod::Auto if n <= DENSE_LIMIT => LinearMethod::DenseLu,
        LinearMethod::Auto => LinearMethod::Gmres,
        m => m,
    };
    match method {
        LinearMethod::DenseLu => dense_lu(system, opts),
        _ => gmres(system, opts, x0),
    }
}

fn dense_lu(system: &SparseSystem, opts: &SolveOptions) -> Result<LinearSolution> {
    let a = system.matrix.to_dense();
    let b = DVector::from_column_slice(&system.rhs);
    let lu = a.lu();
    let mut x = lu.solve(&b).ok_or(Error::LinearSolveDiverged { residual: f64::INFINITY, iterations: 0 })?;
    let mut res = relative_residual(system, x.as_slice());
    let mut steps = 0;
    while res > opts.linear_tol && steps < 3 {
        let r = &b - DVector::from_vec(system.matrix.mul(x.as_slice()));
        match lu.solve(&r) {
            Some(dx) => x += dx,
            None => break,
        }
        res = relative_residual(system, x.as_slice());
        steps += 1;
    }
    if !(res <= opts.linear_tol) {
        return Err(Error::LinearSolveDiverged { residual: res, iterations: steps });
    }
    Ok(LinearSolution {
        x: x.as_slice().to_vec(),
        relative_residual: res,
        iterations: 1 + steps,
        method: LinearMethod::DenseLu,
    })
}

/// Restarted GMRES with right Jacobi preconditioning and modified
/// Gram-Schmidt orthogonalization.
fn gmres(system: &SparseSystem, opts: &SolveOptions, x0: Option<&[f64]>) -> Result<LinearSolution> {
    let a = &system.matrix;
    let b = &system.rhs;
    let n = a.n();
    let restart = opts.gmres_restart.max(1);
    let inv_diag: Vec<f64> =
        a.diagonal().into_iter().map(|d| if d != 0.0 && d.is_finite() { 1.0 / d } else { 1.0 }).collect();
    let precondition = |v: &[f64]| -> Vec<f64> { v.iter().zip(&inv_diag).map(|(x, d)| x * d).collect() };

    let bnorm = norm(b);
    let scale = if bnorm > 0.0 { bnorm } else { 1.0 };
    let target = opts.linear_tol * scale;
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut iterations = 0;
    let mut r: Vec<f64> = a.mul(&x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
    let mut beta = norm(&r);

    while beta > target && iterations < opts.linear_max_iter {
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let mut cs = vec![0.0; restart];
        let mut sn = vec![0.0; restart];
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut k = 0;
        while k < restart && iterations < opts.linear_max_iter {
            let z = precondition(&basis[k]);
            let mut w = a.mul(&z);
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(&w, v);
                h[i][k] = hij;
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= hij * vi);
            }
            let wn = norm(&w);
            h[k + 1][k] = wn;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                break;
            }
            cs[k] = h[k][k] / denom;
            sn[k] = h[k + 1][k] / denom;
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            iterations += 1;
            k += 1;
            if g[k].abs() <= target || wn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = ((i + 1)..k).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        let mut update = vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis) {
            update.iter_mut().zip(v).for_each(|(u, vi)| *u += yi * vi);
        }
        x.iter_mut().zip(precondition(&update)).for_each(|(xi, d)| *xi += d);
        r = a.mul(&x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
        let new_beta = norm(&r);
        if k == 0 || !(new_beta < beta) && new_beta > target {
            beta = new_beta;
            break;
        }
        beta = new_beta;
    }
    let res = beta / scale;
    if !(res <= opts.linear_tol) {
        return Err(Error::LinearSolveDiverged { residual: res, iterations });
    }
    Ok(LinearSolution { x, relative_residual: res, iterations, method: LinearMethod::Gmres })
}
