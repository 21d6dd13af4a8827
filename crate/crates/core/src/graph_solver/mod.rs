//! Graphic self-expanders over planar disks, the rotational reduction on
//! spherical latitude bands, and the checks built on them.

mod area;
mod checks;
mod data;
pub mod disk;
mod latitude;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::newton::{newton_damped, NewtonOptions, NewtonSystem};
use crate::numerics::sup_norm;
pub use area::{
    weighted_area_field, weighted_area_fn, weighted_area_profile, AreaResolution, WeightedArea,
};
pub use checks::{
    comparison_ordering, e_minimality_check, uniqueness_estimate_check, Bump, ComparisonReport,
    EMinimalityReport, UniquenessReport,
};
pub use data::{check_lipschitz, sampled_lipschitz, BoundaryData, ConeData};
pub use disk::{DiskGeometry, GraphOperator, Linearization, NodeKind};
pub use latitude::{solve_latitude_band, LatitudeField, LatitudeOde};

/// Iteration controls for the disk solver.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiskOptions {
    /// Residual below which frozen-coefficient sweeps hand over to Newton.
    pub picard_switch: f64,
    pub max_picard: usize,
    pub tol: f64,
    pub max_newton: usize,
}

impl Default for DiskOptions {
    fn default() -> Self {
        Self {
            picard_switch: 1e-2,
            max_picard: 80,
            tol: 1e-9,
            max_newton: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolveStats {
    pub picard_iterations: usize,
    pub newton_iterations: usize,
    pub residual: f64,
}

/// A solved graph over B_R on the tensor grid. Values at boundary and
/// exterior nodes hold the homogeneous boundary data.
#[derive(Clone)]
pub struct GraphField {
    pub n: u32,
    pub radius: f64,
    pub geometry: Arc<DiskGeometry>,
    pub values: Vec<f64>,
    pub boundary: Arc<dyn BoundaryData>,
    pub lipschitz: f64,
    pub stats: SolveStats,
}

impl fmt::Debug for GraphField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphField")
            .field("radius", &self.radius)
            .field("per_side", &self.geometry.per_side())
            .field("lipschitz", &self.lipschitz)
            .field("stats", &self.stats)
            .finish()
    }
}

impl GraphField {
    pub fn per_side(&self) -> usize {
        self.geometry.per_side()
    }

    pub fn coords(&self) -> &[f64] {
        self.geometry.coords()
    }

    pub fn spacing(&self) -> f64 {
        self.geometry.spacing()
    }

    pub fn kinds(&self) -> &[NodeKind] {
        self.geometry.kinds()
    }

    /// Value at tensor node (i, j), i along x₁.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.per_side() + i]
    }

    /// (x₁, x₂, u, kind) for every node inside the closed disk.
    pub fn disk_nodes(&self) -> impl Iterator<Item = (f64, f64, f64, NodeKind)> + '_ {
        let m = self.per_side();
        let c = self.coords();
        (0..m * m).filter_map(move |k| {
            let kind = self.kinds()[k];
            (kind != NodeKind::Exterior).then(|| (c[k % m], c[k / m], self.values[k], kind))
        })
    }

    /// Values at the unknowns, in solver order.
    pub fn unknown_values(&self) -> Vec<f64> {
        self.geometry.unknown_nodes().map(|k| self.values[k]).collect()
    }

    /// Sup of the interior residual of the self-expander operator.
    pub fn residual(&self) -> f64 {
        let b = &self.boundary;
        let cut = self.geometry.cut_values(|x, y| b.eval(x, y));
        sup_norm(&self.geometry.residual(GraphOperator::EXPANDER, &self.unknown_values(), &cut))
    }
}

struct DiskSystem<'a> {
    geometry: &'a DiskGeometry,
    op: GraphOperator,
    cut: &'a [f64],
}

impl NewtonSystem for DiskSystem<'_> {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.geometry.residual(self.op, x, self.cut))
    }

    fn linear_solve(&self, x: &[f64], r: &[f64]) -> Result<Vec<f64>> {
        let (_, jac) = self.geometry.linearize(self.op, x, self.cut, Linearization::Newton);
        jac.solve(r)
    }
}

/// Solve g^{ij}u_ij + ½x·Du − ½u = 0 in B_R with u = V on ∂B_R.
pub fn solve_dirichlet_disk(
    boundary: Arc<dyn BoundaryData>,
    lipschitz: f64,
    radius: f64,
    per_side: usize,
) -> Result<GraphField> {
    solve_dirichlet_disk_with(boundary, lipschitz, radius, per_side, &DiskOptions::default())
}

pub fn solve_dirichlet_disk_with(
    boundary: Arc<dyn BoundaryData>,
    lipschitz: f64,
    radius: f64,
    per_side: usize,
    opts: &DiskOptions,
) -> Result<GraphField> {
    check_lipschitz(boundary.as_ref(), lipschitz)?;
    let geometry = Arc::new(DiskGeometry::new(radius, per_side)?);
    if geometry.unknowns() == 0 {
        return Err(Error::Precondition("the disk holds no interior nodes".into()));
    }
    let op = GraphOperator::EXPANDER;
    let cut = geometry.cut_values(|x, y| boundary.eval(x, y));
    let mut u: Vec<f64> = geometry
        .unknown_points()
        .map(|p| boundary.eval(p[0], p[1]))
        .collect();
    let mut picard = 0;
    loop {
        let (res, jac) = geometry.linearize(op, &u, &cut, Linearization::Frozen);
        let norm = sup_norm(&res);
        if norm <= opts.picard_switch || picard >= opts.max_picard {
            break;
        }
        let delta = jac.solve(&res)?;
        for (v, d) in u.iter_mut().zip(&delta) {
            *v -= d;
        }
        picard += 1;
    }
    let system = DiskSystem {
        geometry: &geometry,
        op,
        cut: &cut,
    };
    let newton = NewtonOptions {
        tol: opts.tol,
        max_iter: opts.max_newton,
        max_halvings: 30,
    };
    let report = newton_damped(&system, &u, &newton)?;
    let b = boundary.clone();
    let values = geometry.to_tensor(&report.solution, |x, y| b.eval(x, y));
    Ok(GraphField {
        n: 2,
        radius,
        geometry,
        values,
        boundary,
        lipschitz,
        stats: SolveStats {
            picard_iterations: picard,
            newton_iterations: report.iterations,
            residual: report.residual_norm,
        },
    })
}
