use serde::Serialize;

/// Residual of an L₀ identity evaluated with central stencils of half-width h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L0Residual {
    pub discrete: f64,
    pub closed_form: f64,
    /// |discrete − closed form| over the size of the individual terms.
    pub relative: f64,
}

fn drift(n: u32, r: f64) -> f64 {
    (n as f64 - 1.0) / r + 0.5 * r
}

fn apply_discrete<F: Fn(f64) -> f64>(n: u32, f: F, r: f64, h: f64) -> (f64, f64) {
    let (fm, f0, fp) = (f(r - h), f(r), f(r + h));
    let d2 = (fp - 2.0 * f0 + fm) / (h * h);
    let d1 = (fp - fm) / (2.0 * h);
    let q = drift(n, r);
    let value = d2 + q * d1 - 0.5 * f0;
    let scale = d2.abs() + (q * d1).abs() + 0.5 * f0.abs();
    (value, scale)
}

fn residual(discrete: f64, scale: f64, closed_form: f64) -> L0Residual {
    let diff = (discrete - closed_form).abs();
    L0Residual {
        discrete,
        closed_form,
        relative: if scale > 0.0 { diff / scale } else { diff },
    }
}

fn power_gauss(n: u32, tau: f64, r: f64) -> f64 {
    r.powf(-(n as f64) - 1.0 + tau) * (-0.25 * r * r).exp()
}

/// (−τ/2 + (τ² − (n+4)τ + 3(n+1))/r²)·r^{−n−1+τ}e^{−r²/4}.
pub fn l0_power_rhs(n: u32, tau: f64, r: f64) -> f64 {
    let nf = n as f64;
    let bracket = -0.5 * tau + (tau * tau - (nf + 4.0) * tau + 3.0 * (nf + 1.0)) / (r * r);
    bracket * power_gauss(n, tau, r)
}

/// L₀ applied to r^{−n−1+τ}e^{−r²/4} with exact derivatives.
pub fn l0_power_exact(n: u32, tau: f64, r: f64) -> f64 {
    let f = power_gauss(n, tau, r);
    let p = -(n as f64) - 1.0 + tau;
    let g = p / r - 0.5 * r;
    let dg = -p / (r * r) - 0.5;
    let d1 = g * f;
    let d2 = (dg + g * g) * f;
    d2 + drift(n, r) * d1 - 0.5 * f
}

pub fn l0_identity_residual(n: u32, tau: f64, r: f64, h: f64) -> L0Residual {
    let (v, scale) = apply_discrete(n, |x| power_gauss(n, tau, x), r, h);
    residual(v, scale, l0_power_rhs(n, tau, r))
}

fn affine_gauss(n: u32, t: f64, s: f64, r: f64) -> f64 {
    t * (r + s) * r.powf(-(n as f64) - 2.0) * (-0.25 * r * r).exp()
}

fn l0_affine_rhs(n: u32, t: f64, s: f64, r: f64) -> f64 {
    let nf = n as f64;
    t * r.powf(-nf - 2.0)
        * (-0.25 * r * r).exp()
        * (0.5 * s + (3.0 * nf + 3.0) / r + (4.0 * nf + 8.0) * s / (r * r))
}

/// L₀ applied to t(r+s)r^{−n−2}e^{−r²/4} with exact derivatives.
pub fn l0_affine_exact(n: u32, t: f64, s: f64, r: f64) -> f64 {
    let p = -(n as f64) - 2.0;
    let e = (-0.25 * r * r).exp();
    // f = t (r + s) r^p e, so f = t (r^{p+1} + s r^p) e.
    let term = |k: f64, c: f64| {
        let f = c * r.powf(k) * e;
        let g = k / r - 0.5 * r;
        let dg = -k / (r * r) - 0.5;
        (f, g * f, (dg + g * g) * f)
    };
    let (a0, a1, a2) = term(p + 1.0, t);
    let (b0, b1, b2) = term(p, t * s);
    let (f, d1, d2) = (a0 + b0, a1 + b1, a2 + b2);
    d2 + drift(n, r) * d1 - 0.5 * f
}

pub fn l0_affine_identity_residual(n: u32, t: f64, s: f64, r: f64, h: f64) -> L0Residual {
    let (v, scale) = apply_discrete(n, |x| affine_gauss(n, t, s, x), r, h);
    residual(v, scale, l0_affine_rhs(n, t, s, r))
}
