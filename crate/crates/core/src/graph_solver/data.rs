//! One-homogeneous boundary data V(x) = |x| v(x/|x|) on the plane.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub trait BoundaryData: Send + Sync {
    /// Restriction v(θ) to the unit circle.
    fn on_circle(&self, theta: f64) -> f64;

    /// Homogeneous extension |x| v(θ).
    fn eval(&self, x: f64, y: f64) -> f64 {
        let r = x.hypot(y);
        if r == 0.0 {
            0.0
        } else {
            r * self.on_circle(y.atan2(x))
        }
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> BoundaryData for F {
    fn on_circle(&self, theta: f64) -> f64 {
        self(theta)
    }
}

/// The boundary data families the command line and the tests use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeData {
    /// κ|x|.
    Rotational { kappa: f64 },
    /// a · x.
    Linear { a: [f64; 2] },
    /// |x₁|.
    AbsFirst,
    /// max(x₁, w|x|).
    MaxBlend { weight: f64 },
    /// |x| (c₀ + Σ aₖ cos kθ + bₖ sin kθ).
    Fourier {
        mean: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
}

impl ConeData {
    /// A Lipschitz constant of the homogeneous extension.
    pub fn lipschitz(&self) -> f64 {
        match self {
            ConeData::Rotational { kappa } => kappa.abs(),
            ConeData::Linear { a } => a[0].hypot(a[1]),
            ConeData::AbsFirst => 1.0,
            ConeData::MaxBlend { weight } => weight.abs().max(1.0),
            ConeData::Fourier { mean, cos, sin } => {
                let mut bound = mean.abs();
                for (k, c) in cos.iter().enumerate() {
                    bound += c.abs() * (k + 1) as f64;
                }
                for (k, s) in sin.iter().enumerate() {
                    bound += s.abs() * (k + 1) as f64;
                }
                bound
            }
        }
    }

    pub fn into_arc(self) -> Arc<dyn BoundaryData> {
        Arc::new(self)
    }
}

impl BoundaryData for ConeData {
    fn on_circle(&self, theta: f64) -> f64 {
        match self {
            ConeData::Rotational { kappa } => *kappa,
            ConeData::Linear { a } => a[0] * theta.cos() + a[1] * theta.sin(),
            ConeData::AbsFirst => theta.cos().abs(),
            ConeData::MaxBlend { weight } => theta.cos().max(*weight),
            ConeData::Fourier { mean, cos, sin } => {
                let mut v = *mean;
                for (k, c) in cos.iter().enumerate() {
                    v += c * ((k + 1) as f64 * theta).cos();
                }
                for (k, s) in sin.iter().enumerate() {
                    v += s * ((k + 1) as f64 * theta).sin();
                }
                v
            }
        }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            ConeData::Rotational { kappa } => kappa * x.hypot(y),
            ConeData::Linear { a } => a[0] * x + a[1] * y,
            ConeData::AbsFirst => x.abs(),
            ConeData::MaxBlend { weight } => x.max(weight * x.hypot(y)),
            _ => {
                let r = x.hypot(y);
                if r == 0.0 {
                    0.0
                } else {
                    r * self.on_circle(y.atan2(x))
                }
            }
        }
    }
}

/// Sampled Lipschitz constant sup (v² + v′²)^{1/2} of the extension, with
/// v′ from central differences on the circle.
pub fn sampled_lipschitz(data: &dyn BoundaryData, samples: usize) -> f64 {
    let d = 1e-6;
    (0..samples)
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + 0.5) / samples as f64;
            let v = data.on_circle(t);
            let dv = (data.on_circle(t + d) - data.on_circle(t - d)) / (2.0 * d);
            v.hypot(dv)
        })
        .fold(0.0, f64::max)
}

pub fn check_lipschitz(data: &dyn BoundaryData, lipschitz: f64) -> Result<()> {
    if !(lipschitz.is_finite() && lipschitz > 0.0) {
        return Err(Error::Precondition("Lipschitz constant must be positive".into()));
    }
    let observed = sampled_lipschitz(data, 4096);
    if observed > lipschitz * (1.0 + 1e-6) + 1e-9 {
        return Err(Error::Precondition(format!(
            "boundary data has sampled Lipschitz constant {observed:.6} above the declared {lipschitz}"
        )));
    }
    Ok(())
}
