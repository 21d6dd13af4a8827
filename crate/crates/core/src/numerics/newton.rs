use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::sup_norm;

/// A nonlinear system F(x) = 0 together with a solver for its linearization.
pub trait NewtonSystem {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// Solve J(x) δ = r for δ.
    fn linear_solve(&self, x: &[f64], r: &[f64]) -> Result<Vec<f64>>;
}

/// Closure-backed [`NewtonSystem`].
pub struct FnSystem<R, S> {
    pub residual: R,
    pub solve: S,
}

impl<R, S> NewtonSystem for FnSystem<R, S>
where
    R: Fn(&[f64]) -> Vec<f64>,
    S: Fn(&[f64], &[f64]) -> Result<Vec<f64>>,
{
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok((self.residual)(x))
    }

    fn linear_solve(&self, x: &[f64], r: &[f64]) -> Result<Vec<f64>> {
        (self.solve)(x, r)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100,
            max_halvings: 30,
        }
    }
}

impl NewtonOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NewtonReport {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
}

fn finite_norm(r: &[f64]) -> f64 {
    if r.iter().all(|v| v.is_finite()) {
        sup_norm(r)
    } else {
        f64::INFINITY
    }
}

/// Newton iteration with step halving: a trial step is accepted as soon as
/// it strictly lowers the sup norm of the residual.
pub fn newton_damped<S: NewtonSystem + ?Sized>(
    system: &S,
    initial: &[f64],
    opts: &NewtonOptions,
) -> Result<NewtonReport> {
    let mut x = initial.to_vec();
    let mut r = system.residual(&x)?;
    let mut norm = finite_norm(&r);
    let mut iterations = 0;
    while norm > opts.tol {
        if iterations >= opts.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual: norm,
                last: x,
            });
        }
        iterations += 1;
        let delta = system.linear_solve(&x, &r)?;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a - step * d).collect();
            let rt = system.residual(&trial)?;
            let nt = finite_norm(&rt);
            if nt < norm {
                x = trial;
                r = rt;
                norm = nt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iterations,
                residual: norm,
                last: x,
            });
        }
    }
    Ok(NewtonReport {
        solution: x,
        iterations,
        residual_norm: norm,
    })
}
