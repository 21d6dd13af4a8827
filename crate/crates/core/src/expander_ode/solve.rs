use std::f64::consts::E;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expander_ode::profile::RadialProfile;
use crate::numerics::bvp::{Bvp, LeftEnd, QuasilinearOde};
use crate::numerics::{Grid1D, NewtonOptions};

/// The rotational self-expander operator
/// u''/(1+u'²) + ((n−1)/r + r/2) u' − u/2, with n = 1 giving the
/// one-dimensional equation.
#[derive(Debug, Clone, Copy)]
pub struct ExpanderOde {
    pub n: u32,
}

impl QuasilinearOde for ExpanderOde {
    fn drift(&self, r: f64) -> f64 {
        if self.n > 1 {
            (self.n - 1) as f64 / r + 0.5 * r
        } else {
            0.5 * r
        }
    }

    fn source(&self, _r: f64, u: f64) -> (f64, f64) {
        (-0.5 * u, -0.5)
    }

    fn origin_factor(&self) -> f64 {
        self.n as f64
    }
}

/// Barrier constants for a given dimension and cone slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierSpec {
    pub n: u32,
    pub kappa: f64,
    /// Constant K of the upper barrier κr + K/r.
    pub k_const: f64,
    /// Constant τ of the one-dimensional barrier κy + (τ/y) e^{−y²/4}.
    pub tau: f64,
}

impl BarrierSpec {
    pub fn new(n: u32, kappa: f64) -> Self {
        let k_const = match n {
            0 | 1 => f64::NAN,
            2 => 2.0 + 2.0 * kappa,
            _ => (n - 1) as f64 * kappa,
        };
        Self {
            n,
            kappa,
            k_const,
            tau: 2.0 * E * kappa.max(2.0),
        }
    }

    pub fn lower(&self, r: f64) -> f64 {
        self.kappa * r
    }

    pub fn upper(&self, r: f64) -> f64 {
        if self.n == 1 {
            self.kappa * r + self.tau / r * (-0.25 * r * r).exp()
        } else {
            self.kappa * r + self.k_const / r
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BarrierReport {
    pub barrier: BarrierSpec,
    pub residual: f64,
    /// max(κr − u, 0) over all nodes.
    pub lower_violation: f64,
    /// max(u − upper(r), 0) over nodes r ≥ `upper_from`.
    pub upper_violation: f64,
    pub upper_from: f64,
    pub monotonicity_defect: f64,
    /// Second bound 0 ≤ u − κy ≤ 3κ + 2 of the one-dimensional problem.
    pub plateau_violation: Option<f64>,
}

impl BarrierReport {
    pub fn passes(&self, slack: f64, residual_tol: f64) -> bool {
        self.residual <= residual_tol
            && self.lower_violation <= slack
            && self.upper_violation <= slack
            && self.monotonicity_defect <= 1e-10
            && self.plateau_violation.is_none_or(|v| v <= slack)
    }
}

fn check_grid(grid: &Grid1D, radius: f64) -> Result<()> {
    if grid.first() != 0.0 {
        return Err(Error::Precondition("radial grids must start at 0".into()));
    }
    if (grid.last() - radius).abs() > 1e-12 * radius.max(1.0) {
        return Err(Error::Precondition(format!(
            "grid ends at {} but R = {radius}",
            grid.last()
        )));
    }
    Ok(())
}

/// Newton settings whose tolerance sits above the rounding floor
/// ε·|u|/h² of the three-point stencil.
pub(crate) fn newton_defaults(grid: &Grid1D, magnitude: f64) -> NewtonOptions {
    let h = grid.min_spacing();
    let floor = 16.0 * f64::EPSILON * magnitude.abs().max(1.0) / (h * h);
    NewtonOptions {
        tol: floor.max(5e-10),
        max_iter: 200,
        max_halvings: 30,
    }
}

/// Residual of the rotational operator at an interior node index.
pub fn residual_j(n: u32, profile: &RadialProfile, index: usize) -> Result<f64> {
    let len = profile.grid.len();
    if index == 0 || index + 1 >= len {
        return Err(Error::Precondition(
            "the operator is only evaluated at interior nodes".into(),
        ));
    }
    let ode = ExpanderOde { n };
    let bvp = Bvp::new(&ode, &profile.grid, LeftEnd::Symmetric, 0.0);
    Ok(bvp.node_residual(&profile.values, index))
}

/// Residual of the rotational operator at the node located at radius `r`.
pub fn residual_j_at(n: u32, profile: &RadialProfile, r: f64) -> Result<f64> {
    let i = profile
        .grid
        .node_index(r)
        .ok_or_else(|| Error::Precondition(format!("r = {r} is not a grid node")))?;
    residual_j(n, profile, i)
}

/// Discrete φ_{κ,R}: u'(0) = 0, u(R) = κR, started from the lower barrier.
pub fn solve_rotational(n: u32, kappa: f64, radius: f64, grid: &Grid1D) -> Result<RadialProfile> {
    solve_rotational_with(
        n,
        kappa,
        radius,
        grid,
        None,
        &newton_defaults(grid, kappa * radius),
    )
}

pub fn solve_rotational_with(
    n: u32,
    kappa: f64,
    radius: f64,
    grid: &Grid1D,
    initial: Option<&[f64]>,
    opts: &NewtonOptions,
) -> Result<RadialProfile> {
    if n < 2 {
        return Err(Error::Precondition("rotational solves need n >= 2".into()));
    }
    if !(kappa > 0.0) {
        return Err(Error::Precondition("kappa must be positive".into()));
    }
    if radius < 1.0 {
        return Err(Error::Precondition("R must be at least 1".into()));
    }
    check_grid(grid, radius)?;
    let profile = solve_expander(n, kappa, grid, kappa * radius, initial, opts)?;
    let report = barrier_report(&profile);
    if report.lower_violation > 1e-9 || report.upper_violation > 1e-9 {
        return Err(Error::Invariant(format!(
            "barrier violated after convergence: lower {:.3e}, upper {:.3e}",
            report.lower_violation, report.upper_violation
        )));
    }
    Ok(profile)
}

fn solve_expander(
    n: u32,
    kappa: f64,
    grid: &Grid1D,
    outer: f64,
    initial: Option<&[f64]>,
    opts: &NewtonOptions,
) -> Result<RadialProfile> {
    let ode = ExpanderOde { n };
    let bvp = Bvp::new(&ode, grid, LeftEnd::Symmetric, outer);
    let guess: Vec<f64> = match initial {
        Some(g) => g.to_vec(),
        None => grid.nodes().iter().map(|r| kappa * r).collect(),
    };
    let (values, _) = bvp.solve(&guess, opts)?;
    Ok(RadialProfile::new(n, kappa, grid.clone(), values))
}

/// Approximation of the entire solution φ_κ on [0, R]: the outer value is
/// taken from the expansion κR + c₁/R + c₃/R³ instead of κR.
pub fn entire_profile(n: u32, kappa: f64, radius: f64, grid: &Grid1D) -> Result<RadialProfile> {
    check_grid(grid, radius)?;
    let c1 = (n as f64 - 1.0) * kappa;
    let c3 = c1 * (1.0 / (1.0 + kappa * kappa) - (n as f64 - 1.0) / 2.0);
    let outer = kappa * radius + c1 / radius + c3 / radius.powi(3);
    solve_expander(n, kappa, grid, outer, None, &newton_defaults(grid, outer))
}

/// Barrier, residual and monotonicity certificate for a solved profile.
pub fn barrier_report(profile: &RadialProfile) -> BarrierReport {
    let spec = BarrierSpec::new(profile.n, profile.kappa);
    let ode = ExpanderOde { n: profile.n };
    let left = if profile.grid.first() == 0.0 {
        LeftEnd::Symmetric
    } else {
        LeftEnd::Dirichlet(profile.values[0])
    };
    let bvp = Bvp::new(&ode, &profile.grid, left, profile.radius * profile.kappa);
    let residual = bvp.residual_norm(&profile.values);
    let upper_from = if profile.n == 1 { 1.0 } else { 0.0 };
    let mut lower_violation: f64 = 0.0;
    let mut upper_violation: f64 = 0.0;
    let mut plateau: f64 = 0.0;
    for (&r, &u) in profile.nodes().iter().zip(&profile.values) {
        lower_violation = lower_violation.max(spec.lower(r) - u);
        if r > 0.0 && r >= upper_from {
            upper_violation = upper_violation.max(u - spec.upper(r));
            if profile.n == 1 {
                plateau = plateau.max(u - spec.kappa * r - (3.0 * spec.kappa + 2.0));
            }
        }
    }
    BarrierReport {
        barrier: spec,
        residual,
        lower_violation: lower_violation.max(0.0),
        upper_violation: upper_violation.max(0.0),
        upper_from,
        monotonicity_defect: profile.monotonicity_defect(),
        plateau_violation: (profile.n == 1).then_some(plateau.max(0.0)),
    }
}

/// Discrete one-dimensional expander on [0, R] with even reflection at 0.
pub fn solve_1d(kappa: f64, radius: f64, grid: &Grid1D) -> Result<RadialProfile> {
    if !(kappa > 0.0) {
        return Err(Error::Precondition("kappa must be positive".into()));
    }
    if radius < 2.0 {
        return Err(Error::Precondition("R must be at least 2".into()));
    }
    check_grid(grid, radius)?;
    let profile = solve_expander(
        1,
        kappa,
        grid,
        kappa * radius,
        None,
        &newton_defaults(grid, kappa * radius),
    )?;
    let report = barrier_report(&profile);
    if report.lower_violation > 1e-9 || report.upper_violation > 1e-9 {
        return Err(Error::Invariant(format!(
            "one-dimensional barrier violated: lower {:.3e}, upper {:.3e}",
            report.lower_violation, report.upper_violation
        )));
    }
    Ok(profile)
}

/// One-dimensional expander solved on the full line [−R, R] with
/// u(±R) = κR, without using the symmetry.
pub fn solve_1d_full_line(kappa: f64, radius: f64, grid: &Grid1D) -> Result<Vec<f64>> {
    if (grid.first() + radius).abs() > 1e-12 * radius || (grid.last() - radius).abs() > 1e-12 * radius {
        return Err(Error::Precondition("grid must span [-R, R]".into()));
    }
    let ode = ExpanderOde { n: 1 };
    let bvp = Bvp::new(&ode, grid, LeftEnd::Dirichlet(kappa * radius), kappa * radius);
    let guess: Vec<f64> = grid.nodes().iter().map(|y| kappa * y.abs()).collect();
    Ok(bvp.solve(&guess, &newton_defaults(grid, kappa * radius))?.0)
}
