//! Cone densities, shrinker entropies of round spheres and the Gaussian
//! density identity.

use std::f64::consts::{E, PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate_with, QuadOptions};
use crate::numerics::special::{ln_gamma, ln_sphere_volume};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeSpec {
    /// R^n ⊂ R^{n+1}.
    Hyperplane { n: u32 },
    /// {x_{n+1} = κ|x|, x ∈ R^n}.
    Rotational { n: u32, kappa: f64 },
    /// Cone over S^p(√(p/(p+q))) × S^q(√(q/(p+q))).
    ProductSpheres { p: u32, q: u32 },
}

impl ConeSpec {
    pub fn simons(k: u32) -> Self {
        ConeSpec::ProductSpheres { p: k, q: k }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ConeSpec::Hyperplane { n } => n >= 1,
            ConeSpec::Rotational { n, kappa } => n >= 2 && kappa >= 0.0 && kappa.is_finite(),
            ConeSpec::ProductSpheres { p, q } => p >= 1 && q >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("invalid cone {self:?}")))
        }
    }

    /// Dimension of the cone.
    pub fn dimension(&self) -> u32 {
        match *self {
            ConeSpec::Hyperplane { n } | ConeSpec::Rotational { n, .. } => n,
            ConeSpec::ProductSpheres { p, q } => p + q + 1,
        }
    }

    pub fn ambient_dimension(&self) -> u32 {
        self.dimension() + 1
    }

    /// ln of the (n−1)-volume of the cross-section C ∩ ∂B₁.
    pub fn ln_cross_section_volume(&self) -> f64 {
        match *self {
            ConeSpec::Hyperplane { n } => ln_sphere_volume(n - 1, 1.0),
            ConeSpec::Rotational { n, kappa } => {
                ln_sphere_volume(n - 1, 1.0 / (1.0 + kappa * kappa).sqrt())
            }
            ConeSpec::ProductSpheres { p, q } => {
                let s = (p + q) as f64;
                ln_sphere_volume(p, (p as f64 / s).sqrt()) + ln_sphere_volume(q, (q as f64 / s).sqrt())
            }
        }
    }

    pub fn cross_section_volume(&self) -> f64 {
        self.ln_cross_section_volume().exp()
    }
}

fn ln_unit_ball_volume(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    h * PI.ln() - ln_gamma(h + 1.0).expect("positive")
}

/// Θ(C) = Vol(C ∩ ∂B₁)/(n ω_n).
pub fn cone_density(spec: &ConeSpec) -> Result<f64> {
    spec.validate()?;
    let n = spec.dimension();
    Ok((spec.ln_cross_section_volume() - (n as f64).ln() - ln_unit_ball_volume(n)).exp())
}

/// Entropy of the round shrinking k-sphere,
/// d_k = (k/2e)^{k/2}·2√π/Γ((k+1)/2), evaluated through logarithms.
pub fn entropy_dk(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let kf = k as f64;
    let ln = 0.5 * kf * (kf / (2.0 * E)).ln() + (2.0 * PI.sqrt()).ln() - ln_gamma(0.5 * (kf + 1.0))?;
    Ok(ln.exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussianReport {
    pub spec: ConeSpec,
    pub quadrature: f64,
    pub closed_form: f64,
    pub difference: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Compare the Gaussian integral over the cone, Vol(Σ)·∫₀^∞ (4π)^{−m/2}
/// e^{−s²/4} s^{m−1} ds, with the closed-form density.
pub fn gaussian_density_identity(spec: &ConeSpec, tol: f64) -> Result<GaussianReport> {
    spec.validate()?;
    let m = spec.dimension() as f64;
    let ln_norm = -0.5 * m * (4.0 * PI).ln();
    let radial = |s: f64| {
        if s <= 0.0 {
            if m == 1.0 {
                ln_norm.exp()
            } else {
                0.0
            }
        } else {
            (ln_norm - 0.25 * s * s + (m - 1.0) * s.ln()).exp()
        }
    };
    let opts = QuadOptions {
        abs_tol: 1e-3 * tol,
        rel_tol: 1e-14,
        max_intervals: 10_000,
        breakpoints: vec![1.0, (2.0 * (m - 1.0)).sqrt().max(0.5), 10.0],
    };
    let q = integrate_with(radial, 0.0, f64::INFINITY, &opts)?;
    let quadrature = spec.cross_section_volume() * q.value;
    let closed_form = cone_density(spec)?;
    let difference = (quadrature - closed_form).abs();
    Ok(GaussianReport {
        spec: *spec,
        quadrature,
        closed_form,
        difference,
        tol,
        passed: difference <= tol,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Sqrt2Row {
    pub k: u32,
    pub simons_density: f64,
    pub entropy: f64,
    pub entropy_gap: f64,
    pub density_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sqrt2Table {
    pub rows: Vec<Sqrt2Row>,
    pub densities_above_sqrt2: bool,
    pub entropies_decreasing: bool,
    pub entropies_above_sqrt2: bool,
    pub densities_decreasing: bool,
}

impl Sqrt2Table {
    pub fn certified(&self) -> bool {
        self.densities_above_sqrt2
            && self.entropies_decreasing
            && self.entropies_above_sqrt2
            && self.densities_decreasing
    }
}

/// Simons-cone densities and sphere entropies against √2 for k ≤ k_max.
pub fn sqrt2_table(k_max: u32) -> Result<Sqrt2Table> {
    if k_max < 3 {
        return Err(Error::Precondition("k_max must be at least 3".into()));
    }
    let rows: Vec<Sqrt2Row> = (1..=k_max)
        .map(|k| {
            let theta = cone_density(&ConeSpec::simons(k))?;
            let d = entropy_dk(k)?;
            Ok(Sqrt2Row {
                k,
                simons_density: theta,
                entropy: d,
                entropy_gap: d - SQRT_2,
                density_gap: theta - SQRT_2,
            })
        })
        .collect::<Result<_>>()?;
    let decreasing = |f: fn(&Sqrt2Row) -> f64| rows.windows(2).all(|w| f(&w[1]) < f(&w[0]));
    Ok(Sqrt2Table {
        densities_above_sqrt2: rows.iter().all(|r| r.density_gap > 0.0),
        entropies_above_sqrt2: rows.iter().all(|r| r.entropy_gap > 0.0),
        entropies_decreasing: decreasing(|r| r.entropy),
        densities_decreasing: decreasing(|r| r.simons_density),
        rows,
    })
}
