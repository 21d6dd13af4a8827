use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate_with, QuadOptions};
use crate::numerics::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralParams {
    pub n: u32,
    pub lambda1: f64,
    pub eps: f64,
    pub delta: f64,
    pub radius: f64,
}

impl SpectralParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::Precondition("the functional is defined for n >= 3".into()));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Precondition("eps must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0 && self.radius > 1.0) {
            return Err(Error::Precondition("need 0 < delta < 1 < R".into()));
        }
        Ok(())
    }
}

/// A radial test function η on (0, ∞).
pub trait TestFunction {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
    /// Closed support interval; the upper end may be +∞.
    fn support(&self) -> (f64, f64);
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// The cut-off power family: a linear ramp on [δ/2, δ), then
/// t^{ε+1−n/2}(e^{−t²/4} − e^{−R²/4}) on [δ, R), zero elsewhere.
#[derive(Debug, Clone, Copy)]
pub struct EtaFamily {
    pub n: u32,
    pub eps: f64,
    pub delta: f64,
    pub radius: f64,
}

impl EtaFamily {
    pub fn new(params: &SpectralParams) -> Self {
        Self {
            n: params.n,
            eps: params.eps,
            delta: params.delta,
            radius: params.radius,
        }
    }

    fn exponent(&self) -> f64 {
        self.eps + 1.0 - self.n as f64 / 2.0
    }

    fn floor(&self) -> f64 {
        (-0.25 * self.radius * self.radius).exp()
    }

    fn ramp_slope(&self) -> f64 {
        let d = self.delta;
        2.0 * d.powf(self.eps - self.n as f64 / 2.0) * ((-0.25 * d * d).exp() - self.floor())
    }
}

impl TestFunction for EtaFamily {
    fn value(&self, t: f64) -> f64 {
        let d = self.delta;
        if t < 0.5 * d || t >= self.radius {
            0.0
        } else if t < d {
            self.ramp_slope() * (t - 0.5 * d)
        } else {
            t.powf(self.exponent()) * ((-0.25 * t * t).exp() - self.floor())
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        let d = self.delta;
        if t < 0.5 * d || t >= self.radius {
            0.0
        } else if t < d {
            self.ramp_slope()
        } else {
            let a = self.exponent();
            let g = (-0.25 * t * t).exp();
            a * t.powf(a - 1.0) * (g - self.floor()) - 0.5 * t.powf(a + 1.0) * g
        }
    }

    fn support(&self) -> (f64, f64) {
        (0.5 * self.delta, self.radius)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let d = self.delta;
        let mut b = vec![d, 2.0 * d, 10.0 * d, 100.0 * d, 1.0, 4.0, 8.0];
        b.retain(|&x| x > 0.5 * d && x < self.radius);
        b
    }
}

/// Test function given by closures.
pub struct ClosureEta<F, G> {
    pub f: F,
    pub df: G,
    pub support: (f64, f64),
}

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> TestFunction for ClosureEta<F, G> {
    fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }
    fn derivative(&self, t: f64) -> f64 {
        (self.df)(t)
    }
    fn support(&self) -> (f64, f64) {
        self.support
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct I0Value {
    pub value: f64,
    pub error_estimate: f64,
    /// Set when e^{t²/4} would overflow somewhere on the support and the
    /// integrand was assembled from logarithms.
    pub log_space: bool,
}

fn weighted_square(log_weight: f64, v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        (log_weight + 2.0 * v.abs().ln()).exp()
    }
}

/// I₀(η) = ∫ (λ₁η² + ½t²η² + t²η'²) t^{n−3} e^{t²/4} dt by adaptive
/// quadrature to relative tolerance `tol`.
pub fn i0_quadrature(n: u32, lambda1: f64, eta: &dyn TestFunction, tol: f64) -> Result<I0Value> {
    if n < 3 {
        return Err(Error::Precondition("the functional is defined for n >= 3".into()));
    }
    let (a, b) = eta.support();
    if !(a >= 0.0 && b > a) {
        return Err(Error::Precondition("empty test-function support".into()));
    }
    let log_space = b.is_infinite() || 0.25 * b * b > 700.0;
    let m = n as f64 - 3.0;
    let integrand = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let lw = 0.25 * t * t + m * t.ln();
        let e0 = weighted_square(lw, eta.value(t));
        let e1 = weighted_square(lw, eta.derivative(t));
        (lambda1 + 0.5 * t * t) * e0 + t * t * e1
    };
    let opts = QuadOptions {
        rel_tol: tol,
        abs_tol: 0.0,
        max_intervals: 50_000,
        breakpoints: eta.breakpoints(),
    };
    let r = integrate_with(integrand, a, b, &opts)?;
    Ok(I0Value {
        value: r.value,
        error_estimate: r.error_estimate,
        log_space,
    })
}

/// I₀ of the cut-off family for the given parameters.
pub fn i0_family_quadrature(params: &SpectralParams, tol: f64) -> Result<I0Value> {
    params.validate()?;
    i0_quadrature(params.n, params.lambda1, &EtaFamily::new(params), tol)
}

/// 2^{2ε−1}((λ₁ + (ε+1−n/2)²)Γ(ε) + 2(n−1−2ε)Γ(1+ε) + 4Γ(2+ε)).
pub fn i0_closed_form(n: u32, lambda1: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let n = n as f64;
    let a = eps + 1.0 - n / 2.0;
    Ok(2f64.powf(2.0 * eps - 1.0)
        * ((lambda1 + a * a) * gamma(eps)?
            + 2.0 * (n - 1.0 - 2.0 * eps) * gamma(1.0 + eps)?
            + 4.0 * gamma(2.0 + eps)?))
}

/// I₀ of the untruncated η(t) = t^{ε+1−n/2} e^{−t²/4} on (0, ∞). The
/// substitution t = s^{1/(2ε)} removes the t^{2ε−1} behaviour at 0.
pub fn i0_untruncated_quadrature(n: u32, lambda1: f64, eps: f64, tol: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let nf = n as f64;
    let a = eps + 1.0 - nf / 2.0;
    // With η = t^a e^{−t²/4}: η² t^{n−3} e^{t²/4} = t^{2ε−1} e^{−t²/4} and
    // η' = (a/t − t/2) η.
    let core = |t: f64| {
        let base = t.powf(2.0 * eps - 1.0) * (-0.25 * t * t).exp();
        let g = a / t - 0.5 * t;
        (lambda1 + 0.5 * t * t + t * t * g * g) * base
    };
    let p = 1.0 / (2.0 * eps);
    let t_max = crate::numerics::quadrature::gaussian_cutoff(0.0, tol * 1e-3);
    let s_max = t_max.powf(2.0 * eps);
    let f = |s: f64| {
        if s <= 0.0 {
            // t^{2ε−1} dt = p ds and the bracket tends to λ₁ + a² at t = 0.
            return p * (lambda1 + a * a);
        }
        let t = s.powf(p);
        let jac = p * s.powf(p - 1.0);
        core(t) * jac
    };
    let opts = QuadOptions {
        rel_tol: tol,
        abs_tol: 0.0,
        max_intervals: 50_000,
        breakpoints: vec![0.5f64.powf(2.0 * eps), 1.0, 2f64.powf(2.0 * eps), 4f64.powf(2.0 * eps)],
    };
    Ok(integrate_with(f, 0.0, s_max, &opts)?.value)
}
