//! Radial graphs over the disk of radius ρ₀ in R^m solving
//!
//!   div(Dφ/W) + x·Dφ/(2ε²W) + λ/W = 0,   φ(ρ₀) = 0,
//!
//! which in the radial variable reads φ''/(1 + φ'²) + ((m−1)/r + r/(2ε²))φ' + λ = 0,
//! and the limit v = lim φ/λ of the rescaled solutions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expander_ode::RadialProfile;
use crate::numerics::bvp::{Bvp, LeftEnd, QuasilinearOde};
use crate::numerics::{Grid1D, NewtonOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslatorParams {
    /// ε; `f64::INFINITY` drops the x·Dφ term.
    pub epsilon: f64,
    pub lambda: f64,
    /// Dimension m of the base disk.
    pub base_dim: u32,
    pub radius: f64,
}

impl TranslatorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !(self.lambda > 0.0) {
            return Err(Error::Precondition("epsilon and lambda must be positive".into()));
        }
        if self.base_dim == 0 {
            return Err(Error::Precondition("base dimension must be at least 1".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Precondition("domain radius must be positive".into()));
        }
        Ok(())
    }

    /// 1/(2ε²).
    pub fn weight(&self) -> f64 {
        0.5 / (self.epsilon * self.epsilon)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TranslatorOde {
    pub m: u32,
    pub weight: f64,
    pub lambda: f64,
}

impl QuasilinearOde for TranslatorOde {
    fn drift(&self, r: f64) -> f64 {
        (self.m as f64 - 1.0) / r + self.weight * r
    }

    fn source(&self, _r: f64, _u: f64) -> (f64, f64) {
        (self.lambda, 0.0)
    }

    fn origin_factor(&self) -> f64 {
        self.m as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TranslatorSolution {
    pub params: TranslatorParams,
    pub profile: RadialProfile,
    pub residual: f64,
}

impl TranslatorSolution {
    /// φ/λ at the nodes.
    pub fn arrival_time(&self) -> Vec<f64> {
        self.profile.values.iter().map(|v| v / self.params.lambda).collect()
    }
}

/// Closed-form radial solution of the level-set equation
/// div(Dv/|Dv|) + x·Dv/(2ε²|Dv|) + 1/|Dv| = 0 with v(ρ₀) = 0, i.e.
/// |v'| = 1/((m−1)/r + r/(2ε²)).
pub fn arrival_time_closed_form(params: &TranslatorParams, r: f64) -> Result<f64> {
    let m1 = params.base_dim as f64 - 1.0;
    let a = params.weight();
    let rho = params.radius;
    if a == 0.0 {
        if m1 == 0.0 {
            return Err(Error::Domain("no arrival time on a segment without drift".into()));
        }
        return Ok((rho * rho - r * r) / (2.0 * m1));
    }
    if m1 == 0.0 {
        if r <= 0.0 {
            return Err(Error::Domain("arrival time is singular at the centre".into()));
        }
        return Ok((rho / r).ln() / a);
    }
    Ok(((m1 + a * rho * rho) / (m1 + a * r * r)).ln() / (2.0 * a))
}

/// Solve the radial translator problem on `nodes` equally spaced radii.
pub fn solve_translator(params: &TranslatorParams, nodes: usize) -> Result<TranslatorSolution> {
    params.validate()?;
    let grid = Grid1D::uniform(0.0, params.radius, nodes)?;
    let ode = TranslatorOde {
        m: params.base_dim,
        weight: params.weight(),
        lambda: params.lambda,
    };
    let bvp = Bvp::new(&ode, &grid, LeftEnd::Symmetric, 0.0);
    let lam = params.lambda;
    let rho = params.radius;
    let small: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|r| lam * (rho * rho - r * r) / (2.0 * params.base_dim as f64))
        .collect();
    let limit: Option<Vec<f64>> = grid
        .nodes()
        .iter()
        .map(|&r| arrival_time_closed_form(params, r).ok().map(|v| lam * v))
        .collect();
    let magnitude = limit.as_ref().unwrap_or(&small).iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let h = grid.min_spacing();
    let opts = NewtonOptions {
        tol: (16.0 * f64::EPSILON * magnitude / (h * h)).max(1e-11),
        max_iter: 200,
        max_halvings: 40,
    };
    let guesses: Vec<&Vec<f64>> = match &limit {
        Some(l) if lam >= 1.0 => vec![l, &small],
        Some(l) => vec![&small, l],
        None => vec![&small],
    };
    let mut last_err = None;
    for g in guesses {
        match bvp.solve(g, &opts) {
            Ok((values, _)) => {
                let residual = bvp.residual_norm(&values);
                return Ok(TranslatorSolution {
                    params: *params,
                    profile: RadialProfile::new(params.base_dim, 0.0, grid, values),
                    residual,
                });
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one initial guess"))
}

/// sup over nodes with r > 0 of |H + x·Dφ/(2ε²W) + λ/W|, the
/// s-mean curvature relation H − s⟨(x, 0), ν⟩ = −λ⟨e_{n+1}, ν⟩ with s = 1/(2ε²).
pub fn translator_hs_residual(sol: &TranslatorSolution) -> f64 {
    let p = &sol.profile;
    let x = p.nodes();
    let d1 = p.derivative();
    let d2 = p.second_derivative();
    let m1 = p.n as f64 - 1.0;
    let a = sol.params.weight();
    let lam = sol.params.lambda;
    (1..x.len() - 1)
        .map(|i| {
            let w = (1.0 + d1[i] * d1[i]).sqrt();
            let mean = d2[i] / (w * w * w) + m1 * d1[i] / (x[i] * w);
            (mean + a * x[i] * d1[i] / w + lam / w).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct ArrivalReport {
    pub lambdas: Vec<f64>,
    /// Residual of each radial solve.
    pub residuals: Vec<f64>,
    /// sup |v_{λ_{k+1}} − v_{λ_k}|.
    pub differences: Vec<f64>,
    pub differences_decreasing: bool,
    /// sup over r ∈ [ρ₀/10, ρ₀) of |1 − |v'|((m−1)/r + r/(2ε²))| for each v_λ.
    pub level_set_residuals: Vec<f64>,
    pub level_set_decreasing: bool,
    /// sup |v_λ − v| against the closed form, when it exists.
    pub limit_errors: Vec<f64>,
    pub failures: Vec<String>,
    pub certified: bool,
}

/// Rescaled translators φ_λ/λ along an increasing list of λ.
pub fn arrival_time_limit(base: &TranslatorParams, lambdas: &[f64], nodes: usize) -> Result<ArrivalReport> {
    if lambdas.len() < 3 || lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("need at least three increasing values of lambda".into()));
    }
    let solves: Vec<Result<TranslatorSolution>> = crate::par::map(lambdas, |&lambda| {
        solve_translator(
            &TranslatorParams {
                lambda,
                ..*base
            },
            nodes,
        )
    });
    let mut failures = Vec::new();
    let mut done = Vec::new();
    for (lam, s) in lambdas.iter().zip(solves) {
        match s {
            Ok(s) => done.push(s),
            Err(e) => failures.push(format!("lambda = {lam}: {e}")),
        }
    }
    let arrival: Vec<Vec<f64>> = done.iter().map(|s| s.arrival_time()).collect();
    let differences: Vec<f64> = arrival
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs())))
        .collect();
    let m1 = base.base_dim as f64 - 1.0;
    let a = base.weight();
    let level_set_residuals: Vec<f64> = done
        .iter()
        .zip(&arrival)
        .map(|(s, v)| {
            let x = s.profile.nodes();
            let dv = crate::numerics::stencil::derivative(x, v);
            (1..x.len() - 1)
                .filter(|&i| x[i] >= 0.1 * base.radius)
                .map(|i| (1.0 - dv[i].abs() * (m1 / x[i] + a * x[i])).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let limit_errors: Vec<f64> = done
        .iter()
        .zip(&arrival)
        .filter_map(|(s, v)| {
            s.profile
                .nodes()
                .iter()
                .zip(v)
                .map(|(&r, &vi)| arrival_time_closed_form(base, r).map(|c| (c - vi).abs()))
                .collect::<Result<Vec<f64>>>()
                .ok()
                .map(|e| e.into_iter().fold(0.0, f64::max))
        })
        .collect();
    let differences_decreasing = differences.windows(2).all(|w| w[1] < w[0]);
    let level_set_decreasing = level_set_residuals.windows(2).all(|w| w[1] < w[0]);
    Ok(ArrivalReport {
        lambdas: lambdas.to_vec(),
        residuals: done.iter().map(|s| s.residual).collect(),
        certified: failures.is_empty() && differences_decreasing && level_set_decreasing,
        differences,
        differences_decreasing,
        level_set_residuals,
        level_set_decreasing,
        limit_errors,
        failures,
    })
}
