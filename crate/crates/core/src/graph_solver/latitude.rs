//! Log-radial graphs over a rotational band of Sⁿ.
//!
//! For a function F(θ) of the polar angle alone the operator
//! (δ_ij − F_iF_j/(1 + |∇F|²))F_{,ij} − e^{2F}/(2ε²) on Sⁿ reduces to
//!
//!   F''/(1 + F'²) + (n − 1) cot θ F' − e^{2F}/(2ε²),
//!
//! since the spherical Hessian of F is F'' along ∂_θ and cot θ F' on the
//! n − 1 orthogonal directions. The band problem sets this equal to n with
//! F = 0 at θ₁ and θ₂. θ₁ = 0 gives a polar cap, where F'(0) = 0 and the
//! drift term tends to (n − 1)F''(0). ε = ∞ drops the exponential term.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::bvp::{Bvp, LeftEnd, QuasilinearOde};
use crate::numerics::{stencil, Grid1D, NewtonOptions};

#[derive(Debug, Clone, Copy)]
pub struct LatitudeOde {
    pub n: u32,
    /// 1/(2ε²).
    pub weight: f64,
}

impl LatitudeOde {
    pub fn new(n: u32, epsilon: f64) -> Self {
        Self {
            n,
            weight: 0.5 / (epsilon * epsilon),
        }
    }
}

impl QuasilinearOde for LatitudeOde {
    fn drift(&self, theta: f64) -> f64 {
        (self.n as f64 - 1.0) / theta.tan()
    }

    fn origin_factor(&self) -> f64 {
        self.n as f64
    }

    fn source(&self, _theta: f64, f: f64) -> (f64, f64) {
        let e = (2.0 * f).exp();
        (-self.weight * e - self.n as f64, -2.0 * self.weight * e)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LatitudeField {
    pub n: u32,
    pub epsilon: f64,
    pub band: [f64; 2],
    pub theta_grid: Grid1D,
    pub values: Vec<f64>,
    pub residual: f64,
    /// sup |F'| on the band.
    pub gradient_sup: f64,
}

impl LatitudeField {
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Solve the band problem on `nodes` equally spaced latitudes.
pub fn solve_latitude_band(epsilon: f64, band: [f64; 2], n: u32, nodes: usize) -> Result<LatitudeField> {
    let [t1, t2] = band;
    if !(0.0 <= t1 && t1 < t2 && t2 < std::f64::consts::PI) {
        return Err(Error::Precondition("band must satisfy 0 <= θ1 < θ2 < π".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    if n < 1 {
        return Err(Error::Precondition("sphere dimension must be at least 1".into()));
    }
    let grid = Grid1D::uniform(t1, t2, nodes)?;
    let opts = NewtonOptions {
        tol: 1e-8,
        max_iter: 100,
        max_halvings: 30,
    };
    let left = if t1 == 0.0 { LeftEnd::Symmetric } else { LeftEnd::Dirichlet(0.0) };
    let solve = |eps: f64, guess: &[f64]| {
        let ode = LatitudeOde::new(n, eps);
        Bvp::new(&ode, &grid, left, 0.0)
            .solve(guess, &opts)
            .map(|r| r.0)
    };
    let zero = vec![0.0; nodes];
    let values = match solve(epsilon, &zero) {
        Ok(v) => v,
        Err(Error::NoConvergence { .. }) => {
            // Continue from ε = 1 down to the target in geometric steps.
            let mut eps = 1.0f64.max(epsilon);
            let mut guess = solve(eps, &zero)?;
            while eps > epsilon {
                eps = (eps / 2f64.sqrt()).max(epsilon);
                guess = solve(eps, &guess)?;
            }
            guess
        }
        Err(e) => return Err(e),
    };
    let ode = LatitudeOde::new(n, epsilon);
    let residual = Bvp::new(&ode, &grid, left, 0.0).residual_norm(&values);
    let gradient_sup = stencil::derivative(grid.nodes(), &values)
        .iter()
        .fold(0.0, |m: f64, d| m.max(d.abs()));
    Ok(LatitudeField {
        n,
        epsilon,
        band,
        theta_grid: grid,
        values,
        residual,
        gradient_sup,
    })
}
