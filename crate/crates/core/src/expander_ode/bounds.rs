use serde::Serialize;

use crate::error::{Error, Result};
use crate::expander_ode::profile::RadialProfile;
use crate::expander_ode::solve::solve_rotational;
use crate::numerics::Grid1D;
use crate::par;

#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub n: u32,
    pub kappa: f64,
    pub radii: Vec<f64>,
    /// sup |u_{R_{k+1}} − u_{R_k}| over the nodes of the smaller solve.
    pub sup_differences: Vec<f64>,
    /// Ratios of consecutive sup differences.
    pub reduction_factors: Vec<f64>,
    /// Largest decrease u_{R_k} − u_{R_{k+1}} on common nodes.
    pub monotone_defect: f64,
    pub differences_decreasing: bool,
    /// Largest excess of u − κr over ((n+1)κ+2)·min(1, 1/r), or of κr over u.
    pub bound_violation: f64,
    pub failures: Vec<String>,
}

impl LimitReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn min_reduction(&self) -> f64 {
        self.reduction_factors
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solve φ_{κ,R} on each radius with a common spacing and certify
/// convergence in R and the entire-solution bound on the largest solve.
pub fn entire_limit_bounds(n: u32, kappa: f64, radii: &[f64], spacing: f64) -> Result<LimitReport> {
    if radii.len() < 3 {
        return Err(Error::Precondition("need at least three radii".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("radii must increase".into()));
    }
    if *radii.last().expect("nonempty") < 20.0 {
        return Err(Error::Precondition("the largest radius must be at least 20".into()));
    }
    let solves: Vec<Result<RadialProfile>> = par::map(radii, |&r| {
        let grid = Grid1D::with_spacing(0.0, r, spacing)?;
        solve_rotational(n, kappa, r, &grid)
    });
    let profiles: Vec<RadialProfile> = solves.into_iter().collect::<Result<_>>()?;

    let mut failures = Vec::new();
    let mut sup_differences = Vec::new();
    let mut monotone_defect: f64 = 0.0;
    for (k, pair) in profiles.windows(2).enumerate() {
        let (small, large) = (&pair[0], &pair[1]);
        let interp = large.interpolant();
        let mut diff: f64 = 0.0;
        for (i, &r) in small.nodes().iter().enumerate() {
            let big = match large.grid.node_index(r) {
                Some(j) => large.values[j],
                None => interp.eval(r),
            };
            let d = big - small.values[i];
            diff = diff.max(d.abs());
            monotone_defect = monotone_defect.max(-d);
        }
        if monotone_defect > 1e-9 {
            failures.push(format!(
                "solution decreased between R = {} and R = {}",
                radii[k],
                radii[k + 1]
            ));
        }
        sup_differences.push(diff);
    }
    let reduction_factors: Vec<f64> = sup_differences.windows(2).map(|w| w[0] / w[1]).collect();
    let differences_decreasing = sup_differences.windows(2).all(|w| w[1] < w[0]);
    if !differences_decreasing {
        failures.push("successive differences do not decrease".into());
    }

    let largest = profiles.last().expect("nonempty");
    let c = (n as f64 + 1.0) * kappa + 2.0;
    let mut bound_violation: f64 = 0.0;
    let mut first_failure = None;
    for (&r, &u) in largest.nodes().iter().zip(&largest.values) {
        let gap = u - kappa * r;
        let cap = c * if r > 1.0 { 1.0 / r } else { 1.0 };
        let excess = (gap - cap).max(-gap);
        bound_violation = bound_violation.max(excess);
        if excess > 1e-9 && first_failure.is_none() {
            first_failure = Some(r);
        }
    }
    if let Some(r) = first_failure {
        failures.push(format!("entire bound fails from r = {r}"));
    }

    Ok(LimitReport {
        n,
        kappa,
        radii: radii.to_vec(),
        sup_differences,
        reduction_factors,
        monotone_defect: monotone_defect.max(0.0),
        differences_decreasing,
        bound_violation: bound_violation.max(0.0),
        failures,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticFit {
    /// Fitted limit of r(u − κr).
    pub constant: f64,
    /// Coefficient of r⁻² in the fit.
    pub tail: f64,
    /// Coefficient of r², which absorbs the finite-R slope shift.
    pub slope_shift: f64,
    pub rms: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Least-squares fit of r(u − κr) ≈ a + b/r² + c r² over r ∈ [R/2, 3R/4].
pub fn asymptotic_fit(profile: &RadialProfile) -> Result<AsymptoticFit> {
    if profile.n < 3 {
        return Err(Error::Precondition("asymptotic fit needs n >= 3".into()));
    }
    if profile.radius < 20.0 {
        return Err(Error::Precondition("asymptotic fit needs R >= 20".into()));
    }
    let (lo, hi) = (0.5 * profile.radius, 0.75 * profile.radius);
    let big_r = profile.radius;
    let mut normal = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    let mut samples = Vec::new();
    for (&r, &u) in profile.nodes().iter().zip(&profile.values) {
        if r < lo || r > hi {
            continue;
        }
        let y = r * (u - profile.kappa * r);
        let basis = [1.0, (big_r / r).powi(2), (r / big_r).powi(2)];
        for a in 0..3 {
            for b in 0..3 {
                normal[a][b] += basis[a] * basis[b];
            }
            rhs[a] += basis[a] * y;
        }
        samples.push((basis, y));
    }
    if samples.len() < 6 {
        return Err(Error::Precondition("fit window holds too few nodes".into()));
    }
    let coef = solve3(normal, rhs)
        .ok_or_else(|| Error::Domain("singular asymptotic fit".into()))?;
    let ss: f64 = samples
        .iter()
        .map(|(b, y)| {
            let f = coef[0] * b[0] + coef[1] * b[1] + coef[2] * b[2];
            (f - y).powi(2)
        })
        .sum();
    let rms = (ss / samples.len() as f64).sqrt();
    if rms > 0.1 * coef[0].abs() + 1e-12 {
        return Err(Error::Domain(format!(
            "asymptotic fit residual {rms:.3e} exceeds 10% of the fitted constant"
        )));
    }
    Ok(AsymptoticFit {
        constant: coef[0],
        tail: coef[1] * big_r * big_r,
        slope_shift: coef[2] / (big_r * big_r),
        rms,
        window: (lo, hi),
        samples: samples.len(),
    })
}

/// Fitted limit of r(u(r) − κr).
pub fn asymptotic_constant(profile: &RadialProfile) -> Result<f64> {
    asymptotic_fit(profile).map(|f| f.constant)
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
