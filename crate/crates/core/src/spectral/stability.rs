use serde::Serialize;

use crate::error::{Error, Result};

/// First eigenvalue data of Δ_Σ + |A_Σ|² on a cone cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeEigendata {
    pub n: u32,
    pub lambda1: f64,
    pub a_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        })
    }
}

impl ConeEigendata {
    pub fn new(n: u32, lambda1: f64, a_sq: f64) -> Self {
        Self { n, lambda1, a_sq }
    }

    /// Cone over the minimal product S^p(√(p/(p+q))) × S^q(√(q/(p+q))):
    /// |A_Σ|² = n − 1 and the constant eigenfunction gives λ₁ = −(n − 1).
    pub fn product_spheres(p: u32, q: u32) -> Self {
        let n = p + q + 1;
        let a_sq = (n - 1) as f64;
        Self {
            n,
            lambda1: -a_sq,
            a_sq,
        }
    }

    /// Simons cone C_{k,k} in R^{2k+2}.
    pub fn simons(k: u32) -> Self {
        Self::product_spheres(k, k)
    }

    /// Checks the constant-curvature relations λ₁ = −|A_Σ|² ≤ 1 − n.
    pub fn validate_constant_curvature(&self) -> Result<()> {
        if (self.lambda1 + self.a_sq).abs() > 1e-12 * self.a_sq.abs().max(1.0) {
            return Err(Error::Invariant("lambda1 differs from -|A|^2".into()));
        }
        if self.lambda1 > 1.0 - self.n as f64 + 1e-12 {
            return Err(Error::Invariant("lambda1 exceeds 1 - n".into()));
        }
        Ok(())
    }

    pub fn margin(&self) -> f64 {
        let m = self.n as f64 - 2.0;
        self.lambda1 + m * m / 4.0
    }
}

/// Unstable exactly when λ₁ + (n − 2)²/4 ≤ 0.
pub fn stability_classify(data: &ConeEigendata) -> Stability {
    if data.margin() <= 0.0 {
        Stability::Unstable
    } else {
        Stability::Stable
    }
}
