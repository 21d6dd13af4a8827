//! Tensor-grid discretization of quasilinear graph operators on a disk
//!
//!   g^{ij}(Du) u_ij + α x·Du + β u,   g^{ij} = δ_ij − u_i u_j/(1 + |Du|²),
//!
//! with Shortley–Weller arms cut at the circle. The mixed derivative is
//! written through the diagonal whose orientation matches the sign of g¹²,
//! which keeps the stencil monotone.

use crate::error::Result;
use crate::numerics::linalg::SparseBuilder;
use crate::numerics::stencil::{first_weights, second_weights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum NodeKind {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Unknown(usize),
    Cut(usize),
}

#[derive(Debug, Clone, Copy)]
struct Arm {
    target: Target,
    length: f64,
}

/// Arms along an axis: (minus, plus).
type Axis = (Arm, Arm);

#[derive(Debug, Clone)]
struct Stencil {
    node: usize,
    x: f64,
    y: f64,
    axes: [Axis; 4],
}

/// Grid, node classification and cut-cell arms for B_R.
#[derive(Debug, Clone)]
pub struct DiskGeometry {
    radius: f64,
    coords: Vec<f64>,
    spacing: f64,
    kinds: Vec<NodeKind>,
    unknown_of: Vec<Option<usize>>,
    stencils: Vec<Stencil>,
    cut_points: Vec<[f64; 2]>,
}

const DIRECTIONS: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0)];

impl DiskGeometry {
    /// `per_side` nodes on [−R, R] in each coordinate, placed symmetrically
    /// about 0.
    pub fn new(radius: f64, per_side: usize) -> Result<Self> {
        use crate::error::Error;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Precondition("disk radius must be positive".into()));
        }
        if per_side < 5 {
            return Err(Error::Precondition("need at least 5 nodes per side".into()));
        }
        let spacing = 2.0 * radius / (per_side - 1) as f64;
        let centre = 0.5 * (per_side - 1) as f64;
        let coords: Vec<f64> = (0..per_side).map(|i| (i as f64 - centre) * spacing).collect();
        let m = per_side;
        let snap = 1e-9 * spacing;
        let mut kinds = vec![NodeKind::Exterior; m * m];
        let mut unknown_of = vec![None; m * m];
        let mut count = 0;
        for j in 0..m {
            for i in 0..m {
                let rho = coords[i].hypot(coords[j]);
                let k = j * m + i;
                if rho < radius - snap {
                    kinds[k] = NodeKind::Interior;
                    unknown_of[k] = Some(count);
                    count += 1;
                } else if rho <= radius + snap {
                    kinds[k] = NodeKind::Boundary;
                }
            }
        }
        let mut geometry = Self {
            radius,
            coords,
            spacing,
            kinds,
            unknown_of,
            stencils: Vec::with_capacity(count),
            cut_points: Vec::new(),
        };
        for j in 0..m {
            for i in 0..m {
                let k = j * m + i;
                if geometry.kinds[k] != NodeKind::Interior {
                    continue;
                }
                let mut axes = [(
                    Arm {
                        target: Target::Cut(0),
                        length: 0.0,
                    },
                    Arm {
                        target: Target::Cut(0),
                        length: 0.0,
                    },
                ); 4];
                for (a, &(dx, dy)) in DIRECTIONS.iter().enumerate() {
                    let minus = geometry.arm(i, j, -dx, -dy);
                    let plus = geometry.arm(i, j, dx, dy);
                    axes[a] = (minus, plus);
                }
                let (x, y) = (geometry.coords[i], geometry.coords[j]);
                geometry.stencils.push(Stencil { node: k, x, y, axes });
            }
        }
        Ok(geometry)
    }

    fn arm(&mut self, i: usize, j: usize, dx: f64, dy: f64) -> Arm {
        let m = self.coords.len() as isize;
        let ni = i as isize + dx as isize;
        let nj = j as isize + dy as isize;
        let h = self.spacing;
        if ni >= 0 && nj >= 0 && ni < m && nj < m {
            let k = (nj * m + ni) as usize;
            if let Some(idx) = self.unknown_of[k] {
                return Arm {
                    target: Target::Unknown(idx),
                    length: h,
                };
            }
        }
        let (x, y) = (self.coords[i], self.coords[j]);
        let dd = dx * dx + dy * dy;
        let pd = x * dx + y * dy;
        let gap = self.radius * self.radius - x * x - y * y;
        let root = (pd * pd + dd * gap).sqrt();
        let t = if pd >= 0.0 {
            gap / (pd + root)
        } else {
            (root - pd) / dd
        };
        let t = t.clamp(0.0, h);
        self.cut_points.push([x + t * dx, y + t * dy]);
        Arm {
            target: Target::Cut(self.cut_points.len() - 1),
            length: t,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn per_side(&self) -> usize {
        self.coords.len()
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn unknowns(&self) -> usize {
        self.stencils.len()
    }

    pub fn cut_points(&self) -> &[[f64; 2]] {
        &self.cut_points
    }

    /// Tensor index of each unknown.
    pub fn unknown_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.stencils.iter().map(|s| s.node)
    }

    /// Positions of the unknowns.
    pub fn unknown_points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.stencils.iter().map(|s| [s.x, s.y])
    }

    /// Boundary values at the cut points.
    pub fn cut_values(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.cut_points.iter().map(|p| f(p[0], p[1])).collect()
    }

    /// Expand unknowns to a tensor field, filling every other node with `fill`.
    pub fn to_tensor(&self, u: &[f64], fill: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let m = self.per_side();
        let mut out = vec![0.0; m * m];
        for j in 0..m {
            for i in 0..m {
                let k = j * m + i;
                out[k] = match self.unknown_of[k] {
                    Some(idx) => u[idx],
                    None => fill(self.coords[i], self.coords[j]),
                };
            }
        }
        out
    }
}

/// Operator coefficients: advection α x·Du and reaction β u.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphOperator {
    pub advection: f64,
    pub reaction: f64,
}

impl GraphOperator {
    /// The self-expander operator g^{ij}u_ij + ½x·Du − ½u.
    pub const EXPANDER: GraphOperator = GraphOperator {
        advection: 0.5,
        reaction: -0.5,
    };
}

struct AxisValues {
    d1: f64,
    d2: f64,
    w1: [f64; 3],
    w2: [f64; 3],
    targets: [Option<usize>; 2],
}

fn axis_values(axis: &Axis, centre: f64, u: &[f64], cut: &[f64]) -> AxisValues {
    let value = |arm: &Arm| match arm.target {
        Target::Unknown(k) => (u[k], Some(k)),
        Target::Cut(k) => (cut[k], None),
    };
    let (um, km) = value(&axis.0);
    let (up, kp) = value(&axis.1);
    let (hm, hp) = (axis.0.length, axis.1.length);
    let dm = centre - um;
    let dp = up - centre;
    let s = hm + hp;
    AxisValues {
        d1: (hm * dp / hp + hp * dm / hm) / s,
        d2: 2.0 * (dp / hp - dm / hm) / s,
        w1: first_weights(hm, hp),
        w2: second_weights(hm, hp),
        targets: [km, kp],
    }
}

/// Metric coefficients and their gradient derivatives at p.
fn metric(p1: f64, p2: f64) -> ([f64; 3], [[f64; 3]; 2]) {
    let d = 1.0 + p1 * p1 + p2 * p2;
    let d2 = d * d;
    let g = [1.0 - p1 * p1 / d, 1.0 - p2 * p2 / d, -p1 * p2 / d];
    let dg1 = [
        -2.0 * p1 * (1.0 + p2 * p2) / d2,
        2.0 * p1 * p2 * p2 / d2,
        p2 * (p1 * p1 - 1.0 - p2 * p2) / d2,
    ];
    let dg2 = [
        2.0 * p2 * p1 * p1 / d2,
        -2.0 * p2 * (1.0 + p1 * p1) / d2,
        p1 * (p2 * p2 - 1.0 - p1 * p1) / d2,
    ];
    (g, [dg1, dg2])
}

/// Which Jacobian to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linearization {
    /// Coefficients g^{ij} frozen at the current gradient.
    Frozen,
    /// Full derivative including the dependence of g^{ij} on Du.
    Newton,
}

impl DiskGeometry {
    /// Operator value at every unknown.
    pub fn residual(&self, op: GraphOperator, u: &[f64], cut: &[f64]) -> Vec<f64> {
        crate::par::map(&self.stencils, |st| self.node_residual(st, op, u, cut).0)
    }

    fn node_residual(
        &self,
        st: &Stencil,
        op: GraphOperator,
        u: &[f64],
        cut: &[f64],
    ) -> (f64, [AxisValues; 4], [f64; 3], [[f64; 3]; 2], f64) {
        let idx = self.unknown_of[st.node].expect("stencil centre is an unknown");
        let c = u[idx];
        let ax = [
            axis_values(&st.axes[0], c, u, cut),
            axis_values(&st.axes[1], c, u, cut),
            axis_values(&st.axes[2], c, u, cut),
            axis_values(&st.axes[3], c, u, cut),
        ];
        let (p1, p2) = (ax[0].d1, ax[1].d1);
        let (g, dg) = metric(p1, p2);
        let sign = if g[2] >= 0.0 { 1.0 } else { -1.0 };
        let diag = if g[2] >= 0.0 { ax[2].d2 } else { ax[3].d2 };
        let (a, b) = (ax[0].d2, ax[1].d2);
        let value = g[0] * a + g[1] * b + g[2].abs() * (diag - a - b)
            + op.advection * (st.x * p1 + st.y * p2)
            + op.reaction * c;
        (value, ax, g, dg, sign)
    }

    /// Operator values and Jacobian with respect to the unknowns.
    pub fn linearize(
        &self,
        op: GraphOperator,
        u: &[f64],
        cut: &[f64],
        mode: Linearization,
    ) -> (Vec<f64>, SparseBuilder) {
        let rows: Vec<(f64, Vec<(usize, f64)>)> = crate::par::map(&self.stencils, |st| {
            let idx = self.unknown_of[st.node].expect("stencil centre is an unknown");
            let (value, ax, g, dg, sign) = self.node_residual(st, op, u, cut);
            let diag_axis = if g[2] >= 0.0 { 2 } else { 3 };
            let (a, b) = (ax[0].d2, ax[1].d2);
            let dc = ax[diag_axis].d2 - a - b;
            let mut grad = [op.advection * st.x, op.advection * st.y];
            if mode == Linearization::Newton {
                for (k, gk) in grad.iter_mut().enumerate() {
                    *gk += dg[k][0] * a + dg[k][1] * b + sign * dg[k][2] * dc;
                }
            }
            let off = g[2].abs();
            let mut entries = Vec::with_capacity(9);
            let mut centre = op.reaction;
            let axis_terms = [
                (0usize, g[0] - off, grad[0]),
                (1, g[1] - off, grad[1]),
                (diag_axis, off, 0.0),
            ];
            for &(k, second, first) in &axis_terms {
                let av = &ax[k];
                centre += second * av.w2[1] + first * av.w1[1];
                for (side, w) in [(0usize, 0usize), (1, 2)] {
                    if let Some(t) = av.targets[side] {
                        entries.push((t, second * av.w2[w] + first * av.w1[w]));
                    }
                }
            }
            entries.push((idx, centre));
            (value, entries)
        });
        let mut jac = SparseBuilder::new(self.unknowns());
        let mut res = Vec::with_capacity(rows.len());
        for (row, (value, entries)) in rows.into_iter().enumerate() {
            res.push(value);
            for (col, v) in entries {
                jac.add(row, col, v);
            }
        }
        (res, jac)
    }
}
