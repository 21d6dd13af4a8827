//! Shared kernels: special functions, quadrature, grids, linear solvers and
//! damped Newton iteration.

pub mod bvp;
pub mod grid;
pub mod interp;
pub mod linalg;
pub mod newton;
pub mod quadrature;
pub mod special;
pub mod stencil;

pub use grid::Grid1D;
pub use interp::CubicHermite;
pub use linalg::{solve_tridiagonal, SparseBuilder, Tridiagonal};
pub use newton::{newton_damped, FnSystem, NewtonOptions, NewtonReport, NewtonSystem};
pub use quadrature::{integrate, integrate_with, QuadOptions, QuadratureResult};
pub use special::{gamma, ln_gamma, sphere_volume, unit_ball_volume};

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}
