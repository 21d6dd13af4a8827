//! Quasilinear two-point boundary value problems of the form
//!
//!   u'' / (1 + σ u'²) + q(x) u' + g(x, u) = 0
//!
//! discretized with three-point stencils and solved by damped Newton with a
//! tridiagonal Jacobian. At a symmetric left end (x = 0, u'(0) = 0) a ghost
//! node u(−h) = u(h) is used and the singular drift (m − 1)/x · u' is
//! replaced by its limit (m − 1) u''.

use crate::error::{Error, Result};
use crate::numerics::grid::Grid1D;
use crate::numerics::linalg::Tridiagonal;
use crate::numerics::newton::{newton_damped, NewtonOptions, NewtonReport, NewtonSystem};
use crate::numerics::stencil::{first_weights, second_weights};

pub trait QuasilinearOde: Sync {
    /// σ in the gradient factor 1/(1 + σ u'²).
    fn gradient_scale(&self) -> f64 {
        1.0
    }

    /// Coefficient q(x) of u'.
    fn drift(&self, x: f64) -> f64;

    /// Zero-order term g(x, u) and its derivative in u.
    fn source(&self, x: f64, u: f64) -> (f64, f64);

    /// Multiplier of u''(0) at a symmetric origin: 1 + (m − 1) for a radial
    /// problem in m dimensions.
    fn origin_factor(&self) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeftEnd {
    Symmetric,
    Dirichlet(f64),
}

pub struct Bvp<'a, O: QuasilinearOde> {
    pub ode: &'a O,
    pub grid: &'a Grid1D,
    pub left: LeftEnd,
    pub right: f64,
}

impl<'a, O: QuasilinearOde> Bvp<'a, O> {
    pub fn new(ode: &'a O, grid: &'a Grid1D, left: LeftEnd, right: f64) -> Self {
        Self {
            ode,
            grid,
            left,
            right,
        }
    }

    /// Residual of the differential equation at interior node i (and at
    /// node 0 for a symmetric end).
    pub fn node_residual(&self, u: &[f64], i: usize) -> f64 {
        let x = self.grid.nodes();
        if i == 0 {
            let h = x[1] - x[0];
            let upp = 2.0 * (u[1] - u[0]) / (h * h);
            return self.ode.origin_factor() * upp + self.ode.source(x[0], u[0]).0;
        }
        let hm = x[i] - x[i - 1];
        let hp = x[i + 1] - x[i];
        let w1 = first_weights(hm, hp);
        let w2 = second_weights(hm, hp);
        let up = w1[0] * u[i - 1] + w1[1] * u[i] + w1[2] * u[i + 1];
        let upp = w2[0] * u[i - 1] + w2[1] * u[i] + w2[2] * u[i + 1];
        let a = 1.0 / (1.0 + self.ode.gradient_scale() * up * up);
        a * upp + self.ode.drift(x[i]) * up + self.ode.source(x[i], u[i]).0
    }

    fn full_residual(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let mut r = vec![0.0; n];
        r[0] = match self.left {
            LeftEnd::Symmetric => self.node_residual(u, 0),
            LeftEnd::Dirichlet(v) => u[0] - v,
        };
        for (i, ri) in r.iter_mut().enumerate().take(n - 1).skip(1) {
            *ri = self.node_residual(u, i);
        }
        r[n - 1] = u[n - 1] - self.right;
        r
    }

    pub fn jacobian(&self, u: &[f64]) -> Tridiagonal {
        let x = self.grid.nodes();
        let n = u.len();
        let sigma = self.ode.gradient_scale();
        let mut j = Tridiagonal::zeros(n);
        match self.left {
            LeftEnd::Symmetric => {
                let h = x[1] - x[0];
                let c = 2.0 * self.ode.origin_factor() / (h * h);
                j.add(0, 0, -c + self.ode.source(x[0], u[0]).1);
                j.add(0, 1, c);
            }
            LeftEnd::Dirichlet(_) => j.add(0, 0, 1.0),
        }
        for i in 1..n - 1 {
            let hm = x[i] - x[i - 1];
            let hp = x[i + 1] - x[i];
            let w1 = first_weights(hm, hp);
            let w2 = second_weights(hm, hp);
            let up = w1[0] * u[i - 1] + w1[1] * u[i] + w1[2] * u[i + 1];
            let upp = w2[0] * u[i - 1] + w2[1] * u[i] + w2[2] * u[i + 1];
            let den = 1.0 + sigma * up * up;
            let a = 1.0 / den;
            let da = -2.0 * sigma * up / (den * den);
            let q = self.ode.drift(x[i]);
            for k in 0..3 {
                let v = a * w2[k] + (da * upp + q) * w1[k];
                j.add(i, i + k - 1, v);
            }
            j.add(i, i, self.ode.source(x[i], u[i]).1);
        }
        j.add(n - 1, n - 1, 1.0);
        j
    }

    /// Solve from `initial`; boundary entries of the guess are overwritten.
    pub fn solve(&self, initial: &[f64], opts: &NewtonOptions) -> Result<(Vec<f64>, NewtonReport)> {
        let n = self.grid.len();
        if initial.len() != n {
            return Err(Error::Precondition("initial guess length differs from grid".into()));
        }
        if self.left == LeftEnd::Symmetric && self.grid.first().abs() > 1e-14 {
            return Err(Error::Precondition("a symmetric end must sit at x = 0".into()));
        }
        let mut guess = initial.to_vec();
        if let LeftEnd::Dirichlet(v) = self.left {
            guess[0] = v;
        }
        guess[n - 1] = self.right;
        let report = newton_damped(self, &guess, opts)?;
        Ok((report.solution.clone(), report))
    }

    /// Sup norm of the differential residual over the equation nodes.
    pub fn residual_norm(&self, u: &[f64]) -> f64 {
        let start = if self.left == LeftEnd::Symmetric { 0 } else { 1 };
        (start..u.len() - 1)
            .map(|i| self.node_residual(u, i).abs())
            .fold(0.0, f64::max)
    }
}

impl<O: QuasilinearOde> NewtonSystem for Bvp<'_, O> {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.full_residual(x))
    }

    fn linear_solve(&self, x: &[f64], r: &[f64]) -> Result<Vec<f64>> {
        self.jacobian(x).solve(r)
    }
}
