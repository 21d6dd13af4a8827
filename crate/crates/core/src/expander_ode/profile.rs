use serde::Serialize;

use crate::numerics::interp::CubicHermite;
use crate::numerics::stencil::{first_weights, second_weights};
use crate::numerics::Grid1D;

/// A sampled radial graph u(r) over [0, R].
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    /// Hypersurface dimension; 1 selects the one-dimensional equation.
    pub n: u32,
    pub kappa: f64,
    pub radius: f64,
    pub grid: Grid1D,
    pub values: Vec<f64>,
}

/// Principal curvatures of the rotational graph at each node.
#[derive(Debug, Clone, Serialize)]
pub struct Curvatures {
    /// Curvature of the profile curve.
    pub meridian: Vec<f64>,
    /// Curvature of the rotation orbits (multiplicity n − 1).
    pub parallel: Vec<f64>,
    pub mean: Vec<f64>,
    pub norm_sq: Vec<f64>,
}

impl RadialProfile {
    pub fn new(n: u32, kappa: f64, grid: Grid1D, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len());
        let radius = grid.last();
        Self {
            n,
            kappa,
            radius,
            grid,
            values,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    fn symmetric_origin(&self) -> bool {
        self.grid.first() == 0.0
    }

    /// u' at every node; u'(0) = 0 at a symmetric origin.
    pub fn derivative(&self) -> Vec<f64> {
        let mut d = crate::numerics::stencil::derivative(self.nodes(), &self.values);
        if self.symmetric_origin() {
            d[0] = 0.0;
        }
        d
    }

    /// u'' at every node, using the even reflection at the origin and a
    /// one-sided four-point formula at the outer end.
    pub fn second_derivative(&self) -> Vec<f64> {
        let x = self.nodes();
        let u = &self.values;
        let n = x.len();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let w = second_weights(x[i] - x[i - 1], x[i + 1] - x[i]);
            d[i] = w[0] * u[i - 1] + w[1] * u[i] + w[2] * u[i + 1];
        }
        if self.symmetric_origin() {
            let h = x[1] - x[0];
            d[0] = 2.0 * (u[1] - u[0]) / (h * h);
        } else {
            d[0] = 2.0 * d[1] - d[2];
        }
        if n >= 4 {
            d[n - 1] = 2.0 * d[n - 2] - d[n - 3];
        } else {
            d[n - 1] = d[n - 2];
        }
        d
    }

    /// First derivative at interior nodes with the same central stencil the
    /// solvers use.
    pub fn central_derivative(&self, i: usize) -> f64 {
        let x = self.nodes();
        let w = first_weights(x[i] - x[i - 1], x[i + 1] - x[i]);
        w[0] * self.values[i - 1] + w[1] * self.values[i] + w[2] * self.values[i + 1]
    }

    pub fn interpolant(&self) -> CubicHermite {
        CubicHermite::new(self.nodes().to_vec(), self.values.clone(), self.derivative())
    }

    /// Principal curvatures from the rotational formulas
    /// k1 = u''/W³ and k2 = u'/(rW), W = √(1 + u'²).
    pub fn curvatures(&self) -> Curvatures {
        let x = self.nodes();
        let d1 = self.derivative();
        let d2 = self.second_derivative();
        let m = self.n.saturating_sub(1) as f64;
        let len = x.len();
        let mut out = Curvatures {
            meridian: vec![0.0; len],
            parallel: vec![0.0; len],
            mean: vec![0.0; len],
            norm_sq: vec![0.0; len],
        };
        for i in 0..len {
            let w = (1.0 + d1[i] * d1[i]).sqrt();
            let k1 = d2[i] / (w * w * w);
            let k2 = if x[i] == 0.0 { d2[i] } else { d1[i] / (x[i] * w) };
            out.meridian[i] = k1;
            out.parallel[i] = k2;
            out.mean[i] = k1 + m * k2;
            out.norm_sq[i] = k1 * k1 + m * k2 * k2;
        }
        out
    }

    /// Largest drop of u between consecutive nodes.
    pub fn monotonicity_defect(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[0] - w[1]).max(0.0))
            .fold(0.0, f64::max)
    }
}
