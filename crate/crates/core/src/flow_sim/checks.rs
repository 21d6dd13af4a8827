use serde::Serialize;

use crate::error::{Error, Result};
use crate::expander_ode::{entire_profile, solve_rotational, RadialProfile};
use crate::flow_sim::{FlowBoundary, FlowState, SMode, Scheme};
use crate::numerics::interp::CubicHermite;
use crate::numerics::{stencil, Grid1D};

/// The entire radial expander φ_κ: a solved profile on [0, R∞] continued
/// by its expansion κρ + c₁/ρ + c₃/ρ³ beyond R∞.
#[derive(Debug, Clone)]
pub(crate) struct EntireExpander {
    kappa: f64,
    reach: f64,
    c1: f64,
    c3: f64,
    interp: Option<CubicHermite>,
}

impl EntireExpander {
    pub(crate) fn new(n: u32, kappa: f64, spacing: f64) -> Result<Self> {
        let reach = 30.0;
        if kappa == 0.0 {
            return Ok(Self {
                kappa,
                reach,
                c1: 0.0,
                c3: 0.0,
                interp: None,
            });
        }
        let grid = Grid1D::with_spacing(0.0, reach, spacing)?;
        let profile = entire_profile(n, kappa, reach, &grid)?;
        let c1 = (n as f64 - 1.0) * kappa;
        let c3 = c1 * (1.0 / (1.0 + kappa * kappa) - (n as f64 - 1.0) / 2.0);
        Ok(Self {
            kappa,
            reach,
            c1,
            c3,
            interp: Some(profile.interpolant()),
        })
    }

    pub(crate) fn eval(&self, rho: f64) -> f64 {
        match &self.interp {
            None => 0.0,
            Some(i) if rho <= self.reach => i.eval(rho),
            Some(_) => self.kappa * rho + self.c1 / rho + self.c3 / rho.powi(3),
        }
    }

    /// The self-similar trace √τ φ_κ(ρ/√τ).
    pub(crate) fn trace(&self, rho: f64, tau: f64) -> f64 {
        if tau <= 0.0 {
            return self.kappa * rho;
        }
        let s = tau.sqrt();
        s * self.eval(rho / s)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Refinement {
    pub coarse: f64,
    pub fine: f64,
    pub ratio: f64,
    /// ratio ≥ 2.5.
    pub certified: bool,
}

pub fn refinement(coarse: f64, fine: f64) -> Refinement {
    let ratio = if fine > 0.0 { coarse / fine } else if coarse > 0.0 { f64::INFINITY } else { 1.0 };
    Refinement {
        coarse,
        fine,
        ratio,
        certified: ratio >= 2.5,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftReport {
    pub n: u32,
    pub kappa: f64,
    pub spacing: f64,
    pub dt: f64,
    pub steps: usize,
    /// sup |u(T) − φ| over the nodes.
    pub drift: f64,
}

/// Run the s = ½ full-position flow from the expander φ_{κ,R} sampled on
/// a grid of spacing h and measure how far it moves by time T.
pub fn expander_drift(n: u32, kappa: f64, radius: f64, h: f64, dt: f64, t_final: f64, scheme: Scheme) -> Result<DriftReport> {
    let fine = Grid1D::with_spacing(0.0, radius, (h / 8.0).min(2e-3))?;
    let oracle = solve_rotational(n, kappa, radius, &fine)?.interpolant();
    let grid = Grid1D::with_spacing(0.0, radius, h)?;
    let initial: Vec<f64> = grid.nodes().iter().map(|&r| oracle.eval(r)).collect();
    let exact = initial.clone();
    let profile = RadialProfile::new(n, kappa, grid, initial);
    let mut state = FlowState::radial(profile, 0.5, dt, scheme, SMode::FullPosition)?;
    let steps = (t_final / dt).round() as usize;
    for _ in 0..steps {
        state.advance()?;
    }
    let drift = state
        .values()
        .iter()
        .zip(&exact)
        .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
    Ok(DriftReport {
        n,
        kappa,
        spacing: h,
        dt,
        steps,
        drift,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedConfig {
    pub n: u32,
    pub kappa: f64,
    pub radius: f64,
    pub t_final: f64,
    pub spacing: f64,
    pub dt: f64,
    /// Number of report times t_final·2^{−k}.
    pub samples: usize,
    /// Start from √t₀ φ_κ(x/√t₀) at t₀ = 1 instead of κ|x| at t = 0.
    pub from_expander: bool,
}

impl NormalizedConfig {
    pub fn new(kappa: f64, radius: f64, t_final: f64) -> Self {
        Self {
            n: 2,
            kappa,
            radius,
            t_final,
            spacing: 0.05,
            dt: 0.01,
            samples: 6,
            from_expander: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedRow {
    pub time: f64,
    /// sup_{|y| ≤ R/4} |u(y, t)/√t − φ_κ(y/√t)|.
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedReport {
    pub config: NormalizedConfig,
    pub rows: Vec<NormalizedRow>,
    pub decreasing: bool,
    pub final_error: f64,
    pub certified: bool,
}

/// Evolve κ|x| by mean curvature flow on B_R with the boundary pinned to
/// the self-similar trace and compare the rescaled solution with φ_κ.
pub fn normalized_convergence(config: &NormalizedConfig) -> Result<NormalizedReport> {
    let c = config;
    if !(c.t_final > 0.0 && c.radius > 0.0) {
        return Err(Error::Precondition("need T > 0 and R > 0".into()));
    }
    let expander = std::sync::Arc::new(EntireExpander::new(c.n, c.kappa, 2e-3)?);
    let grid = Grid1D::with_spacing(0.0, c.radius, c.spacing)?;
    let t0 = if c.from_expander { 1.0 } else { 0.0 };
    let initial: Vec<f64> = grid.nodes().iter().map(|&r| expander.trace(r, t0)).collect();
    let profile = RadialProfile::new(c.n, c.kappa, grid, initial);
    let radius = c.radius;
    let ex = expander.clone();
    let mut state = FlowState::radial(profile, 0.0, c.dt, Scheme::SemiImplicit, SMode::FullPosition)?
        .with_time(t0)
        .with_boundary(FlowBoundary::Radial(std::sync::Arc::new(move |t| ex.trace(radius, t))));
    let end = t0 + c.t_final;
    let mut times: Vec<f64> = (0..c.samples.max(1))
        .map(|k| t0 + c.t_final / 2f64.powi(k as i32))
        .collect();
    times.reverse();
    let mut rows = Vec::with_capacity(times.len());
    for &t in &times {
        state.advance_to(t)?;
        let p = state.profile().expect("radial flow");
        let now = state.time;
        let s = now.sqrt();
        let error = p
            .nodes()
            .iter()
            .zip(&p.values)
            .filter(|(r, _)| **r <= 0.25 * c.radius + 1e-12)
            .fold(0.0, |m: f64, (&r, &u)| m.max((u / s - expander.eval(r / s)).abs()));
        rows.push(NormalizedRow { time: now, error });
    }
    debug_assert!((state.time - end).abs() <= c.dt);
    let decreasing = rows.windows(2).all(|w| w[1].error <= w[0].error);
    let final_error = rows.last().map_or(f64::INFINITY, |r| r.error);
    Ok(NormalizedReport {
        config: c.clone(),
        rows,
        decreasing,
        final_error,
        certified: decreasing && final_error <= 1e-2,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ReparamConfig {
    pub n: u32,
    pub kappa: f64,
    pub s: f64,
    pub t_final: f64,
    pub radius: f64,
    pub spacing: f64,
    pub dt: f64,
    /// Initial graph σ₀ φ_κ(r/σ₀).
    pub sigma0: f64,
}

impl ReparamConfig {
    pub fn new(kappa: f64, s: f64, t_final: f64) -> Self {
        Self {
            n: 2,
            kappa,
            s,
            t_final,
            radius: 4.0,
            spacing: 0.1,
            dt: 0.02,
            sigma0: 1.0,
        }
    }

    pub fn refined(&self) -> Self {
        Self {
            spacing: 0.5 * self.spacing,
            dt: 0.5 * self.dt,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReparamReport {
    pub scale: f64,
    pub mcf_duration: f64,
    pub steps: usize,
    /// sup |e^{sT} u_s(r, T) − u_MCF(e^{sT} r, t̂(T) − t̂(0))|.
    pub discrepancy: f64,
    /// Distance of the s-flow leg from its self-similar solution.
    pub s_leg_error: f64,
}

/// σ(t) for the self-similar s-flow with σ(0) = σ₀.
fn sigma(sigma0: f64, s: f64, t: f64) -> f64 {
    let e = (-2.0 * s * t).exp();
    (sigma0 * sigma0 * e + (1.0 - e) / (2.0 * s)).sqrt()
}

fn s_leg(c: &ReparamConfig, t_final: f64, expander: &std::sync::Arc<EntireExpander>) -> Result<(RadialProfile, usize)> {
    let grid = Grid1D::with_spacing(0.0, c.radius, c.spacing)?;
    let sig0 = c.sigma0;
    let initial: Vec<f64> = grid.nodes().iter().map(|&r| expander.trace(r, sig0 * sig0)).collect();
    let profile = RadialProfile::new(c.n, c.kappa, grid, initial);
    let (ex, s, radius) = (expander.clone(), c.s, c.radius);
    let steps = (t_final / c.dt).round().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let mut state = FlowState::radial(profile, c.s, dt, Scheme::SemiImplicit, SMode::FullPosition)?
        .with_boundary(FlowBoundary::Radial(std::sync::Arc::new(move |t| {
            let g = sigma(sig0, s, t);
            ex.trace(radius, g * g)
        })));
    for _ in 0..steps {
        state.advance()?;
    }
    Ok((state.profile().expect("radial flow").clone(), steps))
}

fn mcf_leg(
    c: &ReparamConfig,
    scale: f64,
    duration: f64,
    steps: usize,
    expander: &std::sync::Arc<EntireExpander>,
) -> Result<RadialProfile> {
    let grid = Grid1D::with_spacing(0.0, c.radius, c.spacing)?.scaled(scale);
    let tau0 = c.sigma0 * c.sigma0;
    let initial: Vec<f64> = grid.nodes().iter().map(|&r| expander.trace(r, tau0)).collect();
    let profile = RadialProfile::new(c.n, c.kappa, grid, initial);
    let (ex, outer) = (expander.clone(), scale * c.radius);
    let mut state = FlowState::radial(profile, 0.0, duration / steps as f64, Scheme::SemiImplicit, SMode::FullPosition)?
        .with_boundary(FlowBoundary::Radial(std::sync::Arc::new(move |t| ex.trace(outer, tau0 + t))));
    for _ in 0..steps {
        state.advance()?;
    }
    Ok(state.profile().expect("radial flow").clone())
}

/// Evolve the same radial graph by s-flow for time T and by mean curvature
/// flow for t̂(T) − t̂(0) = (e^{2sT} − 1)/(2s) and compare after scaling
/// the first by e^{sT}.
pub fn reparametrization_check(config: &ReparamConfig) -> Result<ReparamReport> {
    let c = config;
    if !(c.s > 0.0) {
        return Err(Error::Precondition("s must be positive".into()));
    }
    let expander = std::sync::Arc::new(EntireExpander::new(c.n, c.kappa, 2e-3)?);
    let scale = (c.s * c.t_final).exp();
    let duration = (scale * scale - 1.0) / (2.0 * c.s);
    let (s_profile, steps) = s_leg(c, c.t_final, &expander)?;
    let mcf = mcf_leg(c, scale, duration, steps, &expander)?;
    let len = s_profile.values.len();
    let mut discrepancy: f64 = 0.0;
    let mut s_leg_error: f64 = 0.0;
    let g = sigma(c.sigma0, c.s, c.t_final);
    for i in 0..len - 1 {
        discrepancy = discrepancy.max((scale * s_profile.values[i] - mcf.values[i]).abs());
        let r = s_profile.nodes()[i];
        s_leg_error = s_leg_error.max((s_profile.values[i] - expander.trace(r, g * g)).abs());
    }
    Ok(ReparamReport {
        scale,
        mcf_duration: duration,
        steps,
        discrepancy,
        s_leg_error,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ReparamPairReport {
    pub s_values: [f64; 2],
    pub times: [f64; 2],
    pub scales: [f64; 2],
    pub mcf_duration: f64,
    /// Discrepancy of each s-flow against the shared mean curvature flow.
    pub discrepancies: [f64; 2],
}

/// Two s-flows run for the times T₁, T₂ with equal t̂(T) − t̂(0) = D and
/// compared with a single mean curvature flow of duration D.
pub fn reparametrization_pair(config: &ReparamConfig, s_values: [f64; 2], duration: f64) -> Result<ReparamPairReport> {
    let c = config;
    if s_values.iter().any(|s| !(*s > 0.0)) || !(duration > 0.0) {
        return Err(Error::Precondition("s values and duration must be positive".into()));
    }
    let expander = std::sync::Arc::new(EntireExpander::new(c.n, c.kappa, 2e-3)?);
    let times = s_values.map(|s| (1.0 + 2.0 * s * duration).ln() / (2.0 * s));
    let scales = [0, 1].map(|k| (s_values[k] * times[k]).exp());
    let big = scales[0].max(scales[1]);
    let steps = (duration / c.dt).round().max(1.0) as usize;
    let mcf = mcf_leg(c, big, duration, steps, &expander)?;
    let mcf_interp = mcf.interpolant();
    let mut discrepancies = [0.0; 2];
    for k in 0..2 {
        let cfg = ReparamConfig {
            s: s_values[k],
            ..c.clone()
        };
        let (p, _) = s_leg(&cfg, times[k], &expander)?;
        let len = p.values.len();
        for i in 0..len - 1 {
            let rho = scales[k] * p.nodes()[i];
            let d = (scales[k] * p.values[i] - mcf_interp.eval(rho)).abs();
            discrepancies[k] = f64::max(discrepancies[k], d);
        }
    }
    Ok(ReparamPairReport {
        s_values,
        times,
        scales,
        mcf_duration: duration,
        discrepancies,
    })
}

/// Snapshots of a radial flow at uniform time spacing.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub s: f64,
    pub s_mode: SMode,
    pub dt: f64,
    pub times: Vec<f64>,
    pub profiles: Vec<RadialProfile>,
}

impl Trajectory {
    /// Record the initial state and then every step for `steps` steps.
    pub fn record(mut state: FlowState, steps: usize) -> Result<Self> {
        let first = state
            .profile()
            .ok_or_else(|| Error::Precondition("trajectories are recorded for radial flows".into()))?
            .clone();
        let mut times = vec![state.time];
        let mut profiles = vec![first];
        for _ in 0..steps {
            state.advance()?;
            times.push(state.time);
            profiles.push(state.profile().expect("radial flow").clone());
        }
        Ok(Self {
            s: state.s,
            s_mode: state.s_mode,
            dt: state.dt,
            times,
            profiles,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HEvolutionReport {
    pub residual: f64,
    pub window_r: [f64; 2],
    pub window_t: [f64; 2],
    pub samples: usize,
    pub with_s_term: bool,
}

struct HData {
    h: Vec<f64>,
    h_r: Vec<f64>,
    lap: Vec<f64>,
    norm_sq: Vec<f64>,
    du: Vec<f64>,
    w: Vec<f64>,
}

fn h_data(p: &RadialProfile) -> HData {
    let x = p.nodes();
    let m = p.n as f64 - 1.0;
    let curv = p.curvatures();
    let du = p.derivative();
    let w: Vec<f64> = du.iter().map(|d| (1.0 + d * d).sqrt()).collect();
    let h_r = stencil::derivative(x, &curv.mean);
    let flux: Vec<f64> = (0..x.len()).map(|i| x[i].powf(m) * h_r[i] / w[i]).collect();
    let dflux = stencil::derivative(x, &flux);
    let lap = (0..x.len())
        .map(|i| if x[i] > 0.0 { dflux[i] / (x[i].powf(m) * w[i]) } else { 0.0 })
        .collect();
    HData {
        h: curv.mean,
        h_r,
        lap,
        norm_sq: curv.norm_sq,
        du,
        w,
    }
}

/// Residual of ∂H/∂t = ΔH + |A|²H + sH on a recorded s-flow, after
/// converting the vertical-graph time derivative to the parametrization
/// dX/dt = H⃗ − sX:
///
///   ∂_t H|_X = ∂_t H|_x − s⟨∇H, X⟩ − u_t⟨∇H, e_{n+1}⟩.
pub fn h_evolution_residual(traj: &Trajectory, with_s_term: bool) -> Result<HEvolutionReport> {
    if traj.s_mode != SMode::FullPosition {
        return Err(Error::Precondition("the identity is stated for the full-position flow".into()));
    }
    let k = traj.profiles.len();
    if k < 5 {
        return Err(Error::Precondition("trajectory window too short".into()));
    }
    let first = &traj.profiles[0];
    let x = first.nodes();
    let h = first.grid.max_spacing();
    let window_r = [0.5f64.max(4.0 * h), 0.75 * first.radius];
    let idx: Vec<usize> = (0..x.len())
        .filter(|&i| x[i] >= window_r[0] && x[i] <= window_r[1] && i >= 3 && i + 3 < x.len())
        .collect();
    if idx.is_empty() {
        return Err(Error::Precondition("spatial window holds no nodes".into()));
    }
    let data: Vec<HData> = crate::par::map(&traj.profiles, h_data);
    let s = traj.s;
    let mut residual: f64 = 0.0;
    let mut samples = 0;
    let (lo, hi) = (k / 4, k - 1 - k / 4);
    for step in lo.max(1)..=hi.min(k - 2) {
        let (prev, cur, next) = (&data[step - 1], &data[step], &data[step + 1]);
        let (up, un) = (&traj.profiles[step - 1].values, &traj.profiles[step + 1].values);
        let u = &traj.profiles[step].values;
        let dt2 = traj.times[step + 1] - traj.times[step - 1];
        for &i in &idx {
            let h_t = (next.h[i] - prev.h[i]) / dt2;
            let u_t = (un[i] - up[i]) / dt2;
            let w2 = cur.w[i] * cur.w[i];
            let transport = s * cur.h_r[i] * (x[i] + u[i] * cur.du[i]) / w2 + u_t * cur.h_r[i] * cur.du[i] / w2;
            let mut rhs = cur.lap[i] + cur.norm_sq[i] * cur.h[i];
            if with_s_term {
                rhs += s * cur.h[i];
            }
            residual = residual.max((h_t - transport - rhs).abs());
            samples += 1;
        }
    }
    Ok(HEvolutionReport {
        residual,
        window_r,
        window_t: [traj.times[lo.max(1)], traj.times[hi.min(k - 2)]],
        samples,
        with_s_term,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingReport {
    pub steps: usize,
    /// max over steps and nodes of u₁ − u₂.
    pub max_excess: f64,
    pub certified: bool,
}

/// Evolve two radial flows side by side and track max(u₁ − u₂).
pub fn ordering_check(mut lower: FlowState, mut upper: FlowState, steps: usize) -> Result<OrderingReport> {
    let excess = |a: &FlowState, b: &FlowState| {
        a.values()
            .iter()
            .zip(b.values())
            .fold(f64::NEG_INFINITY, |m, (x, y)| m.max(x - y))
    };
    if lower.values().len() != upper.values().len() {
        return Err(Error::Precondition("flows live on different grids".into()));
    }
    let mut max_excess = excess(&lower, &upper);
    for _ in 0..steps {
        lower.advance()?;
        upper.advance()?;
        max_excess = max_excess.max(excess(&lower, &upper));
    }
    Ok(OrderingReport {
        steps,
        max_excess,
        certified: max_excess <= 1e-9,
    })
}
