use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_solver::area::{weighted_area_field, weighted_area_fn, AreaResolution, WeightedArea};
use crate::graph_solver::{solve_dirichlet_disk, BoundaryData, GraphField, NodeKind};

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    /// (n + 1)l + 2.
    pub bound: f64,
    pub slack: f64,
    /// max |u − V|·max{1, |y|} over nodes with 2 ≤ |y| ≤ R/2.
    pub max_weighted: f64,
    /// Where the maximum is attained.
    pub argmax: [f64; 2],
    pub window: [f64; 2],
    pub nodes: usize,
    pub certified: bool,
}

/// Decay of u − V against the entire-solution estimate, away from ∂B_R.
pub fn uniqueness_estimate_check(field: &GraphField) -> UniquenessReport {
    let bound = (field.n as f64 + 1.0) * field.lipschitz + 2.0;
    let slack = 1.1;
    let window = [2.0, 0.5 * field.radius];
    let mut max_weighted: f64 = 0.0;
    let mut argmax = [0.0, 0.0];
    let mut nodes = 0;
    for (x, y, u, kind) in field.disk_nodes() {
        let r = x.hypot(y);
        if kind != NodeKind::Interior || r < window[0] || r > window[1] {
            continue;
        }
        nodes += 1;
        let w = (u - field.boundary.eval(x, y)).abs() * r.max(1.0);
        if w > max_weighted {
            max_weighted = w;
            argmax = [x, y];
        }
    }
    UniquenessReport {
        bound,
        slack,
        max_weighted,
        argmax,
        window,
        nodes,
        certified: nodes > 0 && max_weighted <= slack * bound,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    /// min (V₂ − V₁) over sampled points of the unit circle.
    pub boundary_gap: f64,
    /// max (u₁ − u₂) over all disk nodes.
    pub max_excess: f64,
    /// min (u₂ − u₁) over interior nodes.
    pub min_interior_gap: f64,
    /// Nodes where u₁ > u₂ + 1e-9.
    pub violations: usize,
    pub certified: bool,
}

/// Solve with ordered boundary data and compare the solutions node by node.
pub fn comparison_ordering(
    lower: Arc<dyn BoundaryData>,
    upper: Arc<dyn BoundaryData>,
    lipschitz: f64,
    radius: f64,
    per_side: usize,
) -> Result<ComparisonReport> {
    let boundary_gap = (0..4096)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 4096.0;
            upper.on_circle(t) - lower.on_circle(t)
        })
        .fold(f64::INFINITY, f64::min);
    if boundary_gap < -1e-12 {
        return Err(Error::Precondition(format!(
            "boundary data are not ordered: min(V2 - V1) = {boundary_gap:.3e}"
        )));
    }
    let data = [lower, upper];
    let mut solved = crate::par::map(&data, |v| solve_dirichlet_disk(v.clone(), lipschitz, radius, per_side));
    let second = solved.pop().expect("two solves")?;
    let first = solved.pop().expect("two solves")?;
    Ok(compare_fields(&first, &second, boundary_gap))
}

pub(crate) fn compare_fields(first: &GraphField, second: &GraphField, boundary_gap: f64) -> ComparisonReport {
    let mut max_excess = f64::NEG_INFINITY;
    let mut min_interior_gap = f64::INFINITY;
    let mut violations = 0;
    for (k, kind) in first.kinds().iter().enumerate() {
        if *kind == NodeKind::Exterior {
            continue;
        }
        let d = first.values[k] - second.values[k];
        max_excess = max_excess.max(d);
        if *kind == NodeKind::Interior {
            min_interior_gap = min_interior_gap.min(-d);
        }
        if d > 1e-9 {
            violations += 1;
        }
    }
    ComparisonReport {
        boundary_gap,
        max_excess,
        min_interior_gap,
        violations,
        certified: violations == 0,
    }
}

/// A smooth bump A·exp(1 − 1/(1 − s²)), s = |x − c|/ρ, supported in B_ρ(c).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump {
    pub centre: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
}

impl Bump {
    /// Value and gradient.
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let (dx, dy) = (x - self.centre[0], y - self.centre[1]);
        let d = dx.hypot(dy);
        let s = d / self.radius;
        if s >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let q = 1.0 - s * s;
        let v = self.amplitude * (1.0 - 1.0 / q).exp();
        if d == 0.0 {
            return (v, 0.0, 0.0);
        }
        let ds = -2.0 * s / (q * q) * v / self.radius;
        (v, ds * dx / d, ds * dy / d)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EMinimalityRow {
    pub bump: Bump,
    /// E(u + b) − E(u) over the support of b.
    pub increase: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EMinimalityReport {
    pub base: WeightedArea,
    pub rows: Vec<EMinimalityRow>,
    pub min_increase: f64,
    pub tolerance: f64,
    pub violations: usize,
    pub certified: bool,
}

/// Compare the weighted area of the solution with compactly supported
/// perturbations of it.
pub fn e_minimality_check(field: &GraphField, bumps: &[Bump]) -> Result<EMinimalityReport> {
    let reach = field.sampling_radius();
    if reach <= 0.0 {
        return Err(Error::Precondition("field too coarse to sample".into()));
    }
    let base = weighted_area_field(field, reach, AreaResolution::for_spacing(reach, field.spacing()))?;
    if base.log_space {
        return Err(Error::Precondition("weighted area overflows; shrink the disk".into()));
    }
    let res = AreaResolution {
        radial_panels: 24,
        angular: 192,
    };
    let mut rows = Vec::with_capacity(bumps.len());
    for bump in bumps {
        if bump.centre[0].hypot(bump.centre[1]) + bump.radius > reach {
            return Err(Error::Precondition("bump support leaves the sampled disk".into()));
        }
        let plain = weighted_area_fn(|x, y| field.sample(x, y), bump.centre, bump.radius, res)?;
        let moved = weighted_area_fn(
            |x, y| {
                let (u, ux, uy) = field.sample(x, y);
                let (b, bx, by) = bump.eval(x, y);
                (u + b, ux + bx, uy + by)
            },
            bump.centre,
            bump.radius,
            res,
        )?;
        if moved.log_space || plain.log_space {
            return Err(Error::Precondition("perturbed area leaves the exponent guard".into()));
        }
        rows.push(EMinimalityRow {
            bump: *bump,
            increase: moved.value - plain.value,
        });
    }
    let tolerance = 1e-9 * base.value;
    let min_increase = rows.iter().map(|r| r.increase).fold(f64::INFINITY, f64::min);
    let violations = rows.iter().filter(|r| r.increase < -tolerance).count();
    Ok(EMinimalityReport {
        base,
        rows,
        min_increase,
        tolerance,
        violations,
        certified: violations == 0,
    })
}
