use serde::Serialize;

use crate::error::{Error, Result};
use crate::expander_ode::profile::RadialProfile;
use crate::numerics::interp::CubicHermite;
use crate::numerics::quadrature::gauss_legendre;
use crate::numerics::special::sphere_volume;
use crate::numerics::stencil;

/// Sup over r ∈ [1, 3R/4] of |ΔH + ½⟨X,∇H⟩ + (½ + |A|²)H| on the
/// rotational hypersurface, with H and |A|² from the principal curvatures.
pub fn mean_curvature_identity_residual(profile: &RadialProfile) -> Result<f64> {
    let x = profile.nodes();
    let u = &profile.values;
    let len = x.len();
    let m = profile.n.saturating_sub(1) as f64;
    let d1 = profile.derivative();
    let curv = profile.curvatures();
    let h = &curv.mean;
    let h_r = stencil::derivative(x, h);
    let w: Vec<f64> = d1.iter().map(|p| (1.0 + p * p).sqrt()).collect();
    let flux: Vec<f64> = (0..len)
        .map(|i| x[i].powf(m) * h_r[i] / w[i])
        .collect();
    let (lo, hi) = (1.0, 0.75 * profile.radius);
    let mut worst: Option<f64> = None;
    for i in 3..len.saturating_sub(3) {
        if x[i] < lo || x[i] > hi {
            continue;
        }
        let wts = stencil::first_weights(x[i] - x[i - 1], x[i + 1] - x[i]);
        let dflux = stencil::apply(wts, flux[i - 1], flux[i], flux[i + 1]);
        let lap = dflux / (x[i].powf(m) * w[i]);
        let drift = h_r[i] * (x[i] + u[i] * d1[i]) / (w[i] * w[i]);
        let res = lap + 0.5 * drift + (0.5 + curv.norm_sq[i]) * h[i];
        worst = Some(worst.map_or(res.abs(), |v: f64| v.max(res.abs())));
    }
    worst.ok_or_else(|| Error::Precondition("identity window [1, 3R/4] holds no nodes".into()))
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityRow {
    pub rho: f64,
    pub cut_radius: f64,
    /// d/dρ(ρ^{−n} Area(S ∩ B_ρ)) with step δ.
    pub lhs: f64,
    /// d/dρ ∫|X^N|²/|X|^{n+2} + ½ρ^{−n−1}∫|X^N|² with step δ.
    pub rhs: f64,
    pub mismatch: f64,
    pub lhs_half: f64,
    pub rhs_half: f64,
    pub mismatch_half: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub step: f64,
    pub rows: Vec<MonotonicityRow>,
    pub max_mismatch: f64,
    pub max_mismatch_half: f64,
    /// Smallest ratio mismatch(δ)/mismatch(δ/2) over rows whose ball meets
    /// the surface.
    pub min_reduction: f64,
}

struct BallIntegrals {
    area: f64,
    normal_weighted: f64,
    normal_sq: f64,
    cut: f64,
}

struct Surface<'a> {
    profile: &'a RadialProfile,
    interp: CubicHermite,
    gauss: (Vec<f64>, Vec<f64>),
    orbit: f64,
}

impl<'a> Surface<'a> {
    fn new(profile: &'a RadialProfile) -> Self {
        let n = profile.n.max(1);
        let orbit = if n >= 2 { sphere_volume(n - 1, 1.0) } else { 2.0 };
        Self {
            profile,
            interp: profile.interpolant(),
            gauss: gauss_legendre(6),
            orbit,
        }
    }

    fn cut_radius(&self, rho: f64) -> Result<f64> {
        let g = |r: f64| {
            let u = self.interp.eval(r);
            r * r + u * u - rho * rho
        };
        let (mut a, mut b) = (0.0, self.profile.radius);
        if g(a) >= 0.0 {
            return Ok(0.0);
        }
        if g(b) <= 0.0 {
            return Err(Error::Domain(format!(
                "the ball of radius {rho} is not contained in the computed patch"
            )));
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
            if b - a <= 1e-15 * b.max(1.0) {
                break;
            }
        }
        Ok(0.5 * (a + b))
    }

    fn integrals(&self, rho: f64) -> Result<BallIntegrals> {
        let cut = self.cut_radius(rho)?;
        let n = self.profile.n as i32;
        let x = self.profile.nodes();
        let (gx, gw) = &self.gauss;
        let (mut area, mut nw, mut nsq) = (0.0, 0.0, 0.0);
        for win in x.windows(2) {
            let (a, b) = (win[0], win[1].min(cut));
            if b <= a {
                break;
            }
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            for (t, wt) in gx.iter().zip(gw) {
                let r = c + h * t;
                let (u, du) = self.interp.eval_with_derivative(r);
                let w = (1.0 + du * du).sqrt();
                let jac = r.powi(n - 1) * w;
                let xn_sq = (u - r * du).powi(2) / (w * w);
                let x_sq = r * r + u * u;
                area += wt * h * jac;
                nsq += wt * h * jac * xn_sq;
                if xn_sq > 0.0 {
                    nw += wt * h * jac * xn_sq / x_sq.powf(0.5 * (n + 2) as f64);
                }
            }
        }
        Ok(BallIntegrals {
            area: self.orbit * area,
            normal_weighted: self.orbit * nw,
            normal_sq: self.orbit * nsq,
            cut,
        })
    }

    fn sides(&self, rho: f64, step: f64) -> Result<(f64, f64)> {
        let n = self.profile.n as i32;
        let plus = self.integrals(rho + step)?;
        let minus = self.integrals(rho - step)?;
        let centre = self.integrals(rho)?;
        let density = |r: f64, a: f64| a / r.powi(n);
        let lhs = (density(rho + step, plus.area) - density(rho - step, minus.area)) / (2.0 * step);
        let rhs = (plus.normal_weighted - minus.normal_weighted) / (2.0 * step)
            + 0.5 * rho.powi(-n - 1) * centre.normal_sq;
        Ok((lhs, rhs))
    }
}

/// Compare both sides of the monotonicity identity on the rotational
/// hypersurface at each ρ, with ρ-derivatives by central differences of
/// step δ and δ/2.
pub fn monotonicity_identity_check(
    profile: &RadialProfile,
    rhos: &[f64],
    step: f64,
) -> Result<MonotonicityReport> {
    if !(step > 0.0) {
        return Err(Error::Precondition("difference step must be positive".into()));
    }
    let surface = Surface::new(profile);
    let mut rows = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let cut = surface.integrals(rho)?.cut;
        let (lhs, rhs) = surface.sides(rho, step)?;
        let (lhs_half, rhs_half) = surface.sides(rho, 0.5 * step)?;
        rows.push(MonotonicityRow {
            rho,
            cut_radius: cut,
            lhs,
            rhs,
            mismatch: (lhs - rhs).abs(),
            lhs_half,
            rhs_half,
            mismatch_half: (lhs_half - rhs_half).abs(),
        });
    }
    let max_mismatch = rows.iter().map(|r| r.mismatch).fold(0.0, f64::max);
    let max_mismatch_half = rows.iter().map(|r| r.mismatch_half).fold(0.0, f64::max);
    let min_reduction = rows
        .iter()
        .filter(|r| r.mismatch > 1e-13)
        .map(|r| r.mismatch / r.mismatch_half.max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);
    Ok(MonotonicityReport {
        step,
        rows,
        max_mismatch,
        max_mismatch_half,
        min_reduction,
    })
}
