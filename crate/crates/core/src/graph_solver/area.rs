//! The weighted area ∫ e^{|X|²/4} dμ of graphs, evaluated in log space when
//! the exponent leaves the floating-point range.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expander_ode::RadialProfile;
use crate::graph_solver::GraphField;
use crate::numerics::quadrature::gauss_legendre;
use crate::numerics::special::ln_sphere_volume;

const LOG_GUARD: f64 = 700.0;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeightedArea {
    /// exp(log_value); infinite when the value overflows.
    pub value: f64,
    pub log_value: f64,
    /// True when some exponent |X|²/4 exceeded the guard.
    pub log_space: bool,
}

impl WeightedArea {
    fn from_terms(terms: &[(f64, f64)]) -> Self {
        let peak = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        let log_space = terms.iter().any(|t| t.1 > LOG_GUARD);
        let log_value = if log_space {
            let s: f64 = terms.iter().map(|t| (t.0 - peak).exp()).sum();
            peak + s.ln()
        } else {
            terms.iter().map(|t| t.0.exp()).sum::<f64>().ln()
        };
        Self {
            value: if log_space { log_value.exp() } else { terms.iter().map(|t| t.0.exp()).sum() },
            log_value,
            log_space,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AreaResolution {
    pub radial_panels: usize,
    pub angular: usize,
}

impl AreaResolution {
    /// Panels of width about `h` and an angular step of about h/4 at the rim.
    pub fn for_spacing(radius: f64, h: f64) -> Self {
        Self {
            radial_panels: ((radius / h).ceil() as usize).max(4),
            angular: ((8.0 * PI * radius / h).ceil() as usize).max(64),
        }
    }

    pub fn doubled(self) -> Self {
        Self {
            radial_panels: 2 * self.radial_panels,
            angular: 2 * self.angular,
        }
    }
}

/// Weighted area of the graph of `f` over the disk of radius ρ about
/// `centre`; `f` returns (u, u_x, u_y).
pub fn weighted_area_fn<F>(f: F, centre: [f64; 2], radius: f64, res: AreaResolution) -> Result<WeightedArea>
where
    F: Fn(f64, f64) -> (f64, f64, f64) + Sync + Send,
{
    if !(radius > 0.0) || res.radial_panels == 0 || res.angular < 3 {
        return Err(Error::Precondition("empty integration region".into()));
    }
    let (gx, gw) = gauss_legendre(8);
    let dr = radius / res.radial_panels as f64;
    let dth = 2.0 * PI / res.angular as f64;
    let mut radial = Vec::with_capacity(res.radial_panels * gx.len());
    for p in 0..res.radial_panels {
        for (t, w) in gx.iter().zip(&gw) {
            let r = dr * (p as f64 + 0.5 * (t + 1.0));
            radial.push((r, 0.5 * dr * w));
        }
    }
    let rows: Vec<Vec<(f64, f64)>> = crate::par::map(&radial, |&(r, wr)| {
        (0..res.angular)
            .map(|k| {
                let th = dth * k as f64;
                let x = centre[0] + r * th.cos();
                let y = centre[1] + r * th.sin();
                let (u, ux, uy) = f(x, y);
                let expo = 0.25 * (x * x + y * y + u * u);
                let w = (1.0 + ux * ux + uy * uy).sqrt();
                (expo + w.ln() + (r * wr * dth).ln(), expo)
            })
            .collect()
    });
    let terms: Vec<(f64, f64)> = rows.into_iter().flatten().collect();
    Ok(WeightedArea::from_terms(&terms))
}

/// Catmull–Rom weights and their derivatives at s ∈ [0, 1].
fn catmull_rom(s: f64) -> ([f64; 4], [f64; 4]) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        [
            0.5 * (-s3 + 2.0 * s2 - s),
            0.5 * (3.0 * s3 - 5.0 * s2 + 2.0),
            0.5 * (-3.0 * s3 + 4.0 * s2 + s),
            0.5 * (s3 - s2),
        ],
        [
            0.5 * (-3.0 * s2 + 4.0 * s - 1.0),
            0.5 * (9.0 * s2 - 10.0 * s),
            0.5 * (-9.0 * s2 + 8.0 * s + 1.0),
            0.5 * (3.0 * s2 - 2.0 * s),
        ],
    )
}

impl GraphField {
    /// Bicubic (Catmull–Rom) value and gradient. Reliable for
    /// |x| ≤ R − 3h, where every stencil node is a solved node.
    pub fn sample(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let c = self.coords();
        let m = c.len();
        let h = self.spacing();
        let locate = |t: f64| {
            let q = (t - c[0]) / h;
            let i = (q.floor() as isize).clamp(1, m as isize - 3) as usize;
            (i, q - i as f64)
        };
        let (i, sx) = locate(x);
        let (j, sy) = locate(y);
        let (wx, dx) = catmull_rom(sx);
        let (wy, dy) = catmull_rom(sy);
        let (mut u, mut ux, mut uy) = (0.0, 0.0, 0.0);
        for (b, (&vy, &dvy)) in wy.iter().zip(&dy).enumerate() {
            let row = (j + b - 1) * m;
            for (a, (&vx, &dvx)) in wx.iter().zip(&dx).enumerate() {
                let v = self.values[row + i + a - 1];
                u += vx * vy * v;
                ux += dvx * vy * v;
                uy += vx * dvy * v;
            }
        }
        (u, ux / h, uy / h)
    }

    /// Largest radius on which [`GraphField::sample`] uses solved nodes only.
    pub fn sampling_radius(&self) -> f64 {
        self.radius - 3.0 * self.spacing()
    }
}

/// Weighted area of a solved field over B_ρ, ρ ≤ R − 3h.
pub fn weighted_area_field(field: &GraphField, radius: f64, res: AreaResolution) -> Result<WeightedArea> {
    if radius > field.sampling_radius() + 1e-12 {
        return Err(Error::Precondition(format!(
            "radius {radius} exceeds the sampling radius {:.6}",
            field.sampling_radius()
        )));
    }
    weighted_area_fn(|x, y| field.sample(x, y), [0.0, 0.0], radius, res)
}

/// Weighted area of the rotational hypersurface of a profile inside the
/// cylinder r ≤ ρ.
pub fn weighted_area_profile(profile: &RadialProfile, radius: f64) -> Result<WeightedArea> {
    if !(radius > 0.0) || radius > profile.radius + 1e-12 {
        return Err(Error::Precondition("radius outside the profile domain".into()));
    }
    let n = profile.n.max(1);
    let ln_orbit = if n >= 2 { ln_sphere_volume(n - 1, 1.0) } else { 2f64.ln() };
    let interp = profile.interpolant();
    let (gx, gw) = gauss_legendre(8);
    let mut terms = Vec::new();
    for win in profile.nodes().windows(2) {
        let (a, b) = (win[0], win[1].min(radius));
        if b <= a {
            break;
        }
        let (c, hw) = (0.5 * (a + b), 0.5 * (b - a));
        for (t, w) in gx.iter().zip(&gw) {
            let r = c + hw * t;
            let (u, du) = interp.eval_with_derivative(r);
            let expo = 0.25 * (r * r + u * u);
            let jac = (n as f64 - 1.0) * r.ln() + 0.5 * (1.0 + du * du).ln();
            terms.push((ln_orbit + expo + jac + (hw * w).ln(), expo));
        }
    }
    Ok(WeightedArea::from_terms(&terms))
}
