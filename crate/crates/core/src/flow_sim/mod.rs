//! Graphic mean curvature flow and s-mean curvature flow dX/dt = H⃗ − sX.
//!
//! A graph moves vertically with speed √(1 + |Du|²)(H − s⟨X, ν⟩), which
//! gives u_t = g^{ij}u_ij + s x·Du − s u. The horizontal variant applies the
//! s-term to the first n coordinates only and drops −s u.

mod checks;
mod translator;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expander_ode::RadialProfile;
use crate::graph_solver::{GraphField, GraphOperator, Linearization};
use crate::numerics::linalg::{SparseBuilder, Tridiagonal};
use crate::numerics::stencil::{first_weights, second_weights};

pub use checks::{
    expander_drift, h_evolution_residual, normalized_convergence, ordering_check,
    reparametrization_check, reparametrization_pair, refinement, DriftReport, HEvolutionReport,
    NormalizedConfig, NormalizedReport, NormalizedRow, OrderingReport, ReparamConfig, ReparamReport,
    ReparamPairReport, Refinement, Trajectory,
};
pub use translator::{
    arrival_time_closed_form, arrival_time_limit, solve_translator, translator_hs_residual, ArrivalReport,
    TranslatorOde, TranslatorParams, TranslatorSolution,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Coefficients at the extrapolated state, implicit in the new values
    /// (second-order BDF after a backward Euler start).
    SemiImplicit,
    /// Forward Euler, restricted by the usual parabolic step bound.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SMode {
    /// dX/dt = H⃗ − sX.
    FullPosition,
    /// dX/dt = H⃗ − s(x, 0).
    Horizontal,
}

impl SMode {
    fn operator(self, s: f64) -> GraphOperator {
        GraphOperator {
            advection: s,
            reaction: match self {
                SMode::FullPosition => -s,
                SMode::Horizontal => 0.0,
            },
        }
    }
}

pub type RadialTrace = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type GraphTrace = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Dirichlet data on the outer boundary.
#[derive(Clone)]
pub enum FlowBoundary {
    /// Keep the boundary values of the initial graph.
    Fixed,
    /// u(R, t) for radial flows.
    Radial(RadialTrace),
    /// u(x, t) on the circle for disk flows.
    Graph(GraphTrace),
}

#[derive(Debug, Clone)]
pub enum FlowBase {
    Radial(RadialProfile),
    Graph(GraphField),
}

impl FlowBase {
    pub fn values(&self) -> &[f64] {
        match self {
            FlowBase::Radial(p) => &p.values,
            FlowBase::Graph(g) => &g.values,
        }
    }
}

/// Values and gradients beyond this abort the flow.
pub const BLOW_UP: f64 = 1e8;

#[derive(Clone)]
pub struct FlowState {
    pub base: FlowBase,
    pub time: f64,
    pub s: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub s_mode: SMode,
    pub boundary: FlowBoundary,
    /// Values one step back, used by the two-step scheme.
    previous: Option<Vec<f64>>,
}

impl fmt::Debug for FlowState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlowState")
            .field("time", &self.time)
            .field("s", &self.s)
            .field("dt", &self.dt)
            .field("scheme", &self.scheme)
            .field("s_mode", &self.s_mode)
            .finish()
    }
}

impl FlowState {
    pub fn radial(profile: RadialProfile, s: f64, dt: f64, scheme: Scheme, s_mode: SMode) -> Result<Self> {
        Self::new(FlowBase::Radial(profile), s, dt, scheme, s_mode)
    }

    pub fn graph(field: GraphField, s: f64, dt: f64, scheme: Scheme, s_mode: SMode) -> Result<Self> {
        Self::new(FlowBase::Graph(field), s, dt, scheme, s_mode)
    }

    fn new(base: FlowBase, s: f64, dt: f64, scheme: Scheme, s_mode: SMode) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Precondition("time step must be positive".into()));
        }
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::Precondition("s must be nonnegative".into()));
        }
        if base.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("initial graph is not finite".into()));
        }
        let state = Self {
            base,
            time: 0.0,
            s,
            dt,
            scheme,
            s_mode,
            boundary: FlowBoundary::Fixed,
            previous: None,
        };
        if scheme == Scheme::Explicit && dt > state.explicit_limit() {
            return Err(Error::Precondition(format!(
                "explicit step {dt} exceeds the stability bound {}",
                state.explicit_limit()
            )));
        }
        Ok(state)
    }

    pub fn with_boundary(mut self, boundary: FlowBoundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Largest admissible explicit step: h²/4, tightened to h²/(2n) for
    /// the radial origin stencil in dimension n.
    pub fn explicit_limit(&self) -> f64 {
        match &self.base {
            FlowBase::Radial(p) => {
                let h = p.grid.min_spacing();
                h * h / (4f64).max(2.0 * p.n as f64)
            }
            FlowBase::Graph(g) => 0.25 * g.spacing() * g.spacing(),
        }
    }

    pub fn values(&self) -> &[f64] {
        self.base.values()
    }

    pub fn profile(&self) -> Option<&RadialProfile> {
        match &self.base {
            FlowBase::Radial(p) => Some(p),
            FlowBase::Graph(_) => None,
        }
    }

    pub fn field(&self) -> Option<&GraphField> {
        match &self.base {
            FlowBase::Graph(g) => Some(g),
            FlowBase::Radial(_) => None,
        }
    }

    /// Advance by one step in place.
    pub fn advance(&mut self) -> Result<()> {
        let next_time = self.time + self.dt;
        let new_values = match &self.base {
            FlowBase::Radial(p) => self.radial_step(p, next_time)?,
            FlowBase::Graph(g) => self.graph_step(g, next_time)?,
        };
        let old = match &mut self.base {
            FlowBase::Radial(p) => std::mem::replace(&mut p.values, new_values),
            FlowBase::Graph(g) => std::mem::replace(&mut g.values, new_values),
        };
        self.previous = Some(old);
        self.time = next_time;
        self.check_blow_up()
    }

    /// Advance until `time` is reached, within half a step.
    pub fn advance_to(&mut self, time: f64) -> Result<()> {
        while self.time < time - 0.5 * self.dt {
            self.advance()?;
        }
        Ok(())
    }

    fn check_blow_up(&self) -> Result<()> {
        let v = self.values();
        let bad_value = v.iter().any(|x| !x.is_finite() || x.abs() > BLOW_UP);
        let bad_gradient = match &self.base {
            FlowBase::Radial(p) => p.derivative().iter().any(|d| !d.is_finite() || d.abs() > BLOW_UP),
            FlowBase::Graph(g) => {
                let h = g.spacing();
                let m = g.per_side();
                v.windows(2)
                    .enumerate()
                    .any(|(k, w)| (k + 1) % m != 0 && ((w[1] - w[0]) / h).abs() > BLOW_UP)
            }
        };
        if bad_value || bad_gradient {
            return Err(Error::BlowUp { time: self.time });
        }
        Ok(())
    }

    fn radial_boundary(&self, p: &RadialProfile, t: f64) -> f64 {
        match &self.boundary {
            FlowBoundary::Radial(f) => f(t),
            _ => p.values[p.values.len() - 1],
        }
    }

    /// Radial operator g u + s r u' − β u with the gradient factor of
    /// `coeff`; returns its value at every node except the last.
    fn radial_rows(&self, p: &RadialProfile, coeff: &[f64]) -> (Tridiagonal, Vec<f64>) {
        let x = p.nodes();
        let len = x.len();
        let m = p.n as f64 - 1.0;
        let op = self.s_mode.operator(self.s);
        let d = crate::numerics::stencil::derivative(x, coeff);
        let mut tri = Tridiagonal::zeros(len);
        let h0 = x[1] - x[0];
        let c = 2.0 * p.n as f64 / (h0 * h0);
        tri.add(0, 0, -c + op.reaction);
        tri.add(0, 1, c);
        let mut grad_factor = vec![1.0; len];
        for i in 1..len - 1 {
            let a = 1.0 / (1.0 + d[i] * d[i]);
            grad_factor[i] = a;
            let (hm, hp) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            let w1 = first_weights(hm, hp);
            let w2 = second_weights(hm, hp);
            let q = m / x[i] + op.advection * x[i];
            for k in 0..3 {
                tri.add(i, i + k - 1, a * w2[k] + q * w1[k]);
            }
            tri.add(i, i, op.reaction);
        }
        (tri, grad_factor)
    }

    fn radial_step(&self, p: &RadialProfile, next_time: f64) -> Result<Vec<f64>> {
        let len = p.values.len();
        let boundary = self.radial_boundary(p, next_time);
        let u = &p.values;
        match self.scheme {
            Scheme::Explicit => {
                let (tri, _) = self.radial_rows(p, u);
                let lu = tri.matvec(u);
                let mut next: Vec<f64> = (0..len).map(|i| u[i] + self.dt * lu[i]).collect();
                next[len - 1] = boundary;
                Ok(next)
            }
            Scheme::SemiImplicit => {
                let (frozen, c0, hist): (Vec<f64>, f64, Vec<f64>) = match &self.previous {
                    Some(prev) => (
                        u.iter().zip(prev).map(|(a, b)| 2.0 * a - b).collect(),
                        1.5,
                        u.iter().zip(prev).map(|(a, b)| 2.0 * a - 0.5 * b).collect(),
                    ),
                    None => (u.clone(), 1.0, u.clone()),
                };
                let (op, _) = self.radial_rows(p, &frozen);
                let mut sys = Tridiagonal::zeros(len);
                let mut rhs = vec![0.0; len];
                for i in 0..len - 1 {
                    for j in i.saturating_sub(1)..=(i + 1) {
                        let v = op.get(i, j);
                        sys.add(i, j, -v);
                    }
                    sys.add(i, i, c0 / self.dt);
                    rhs[i] = hist[i] / self.dt;
                }
                sys.add(len - 1, len - 1, 1.0);
                rhs[len - 1] = boundary;
                sys.solve(&rhs)
            }
        }
    }

    fn graph_step(&self, g: &GraphField, next_time: f64) -> Result<Vec<f64>> {
        let geom = &g.geometry;
        let op = self.s_mode.operator(self.s);
        let cut = match &self.boundary {
            FlowBoundary::Graph(f) => geom.cut_values(|x, y| f(x, y, next_time)),
            _ => geom.cut_values(|x, y| g.boundary.eval(x, y)),
        };
        let u = g.unknown_values();
        let nodes: Vec<usize> = geom.unknown_nodes().collect();
        let next_unknowns = match self.scheme {
            Scheme::Explicit => {
                let res = geom.residual(op, &u, &cut);
                u.iter().zip(&res).map(|(a, r)| a + self.dt * r).collect::<Vec<f64>>()
            }
            Scheme::SemiImplicit => {
                let (frozen, c0, hist): (Vec<f64>, f64, Vec<f64>) = match &self.previous {
                    Some(prev) => {
                        let pu: Vec<f64> = nodes.iter().map(|&k| prev[k]).collect();
                        (
                            u.iter().zip(&pu).map(|(a, b)| 2.0 * a - b).collect(),
                            1.5,
                            u.iter().zip(&pu).map(|(a, b)| 2.0 * a - 0.5 * b).collect(),
                        )
                    }
                    None => (u.clone(), 1.0, u.clone()),
                };
                let (res, lin) = geom.linearize(op, &frozen, &cut, Linearization::Frozen);
                let lu = lin.matvec(&frozen);
                let mut sys = SparseBuilder::new(lin.dim());
                lin.for_each(|r, c, v| sys.add(r, c, -v));
                let mut rhs = Vec::with_capacity(u.len());
                for i in 0..u.len() {
                    sys.add(i, i, c0 / self.dt);
                    rhs.push(hist[i] / self.dt + res[i] - lu[i]);
                }
                sys.solve(&rhs)?
            }
        };
        let mut values = g.values.clone();
        for (&k, v) in nodes.iter().zip(next_unknowns) {
            values[k] = v;
        }
        if let FlowBoundary::Graph(f) = &self.boundary {
            let c = g.coords();
            let m = g.per_side();
            for (k, kind) in g.kinds().iter().enumerate() {
                if *kind != crate::graph_solver::NodeKind::Interior {
                    values[k] = f(c[k % m], c[k / m], next_time);
                }
            }
        }
        Ok(values)
    }
}

/// One step of the selected scheme.
pub fn step(state: &FlowState) -> Result<FlowState> {
    let mut next = state.clone();
    next.advance()?;
    Ok(next)
}
