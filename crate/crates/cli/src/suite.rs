//! The numbered certificate suite. Each criterion returns its checks; a
//! criterion passes when every check passes within its time budget.

use std::f64::consts::{E, PI, SQRT_2};
use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use expanderlab::density::{cone_density, entropy_dk, gaussian_density_identity, ConeSpec};
use expanderlab::expander_ode::{
    asymptotic_fit, barrier_report, monotonicity_identity_check, solve_1d, solve_rotational,
};
use expanderlab::flow_sim::{
    arrival_time_limit, expander_drift, h_evolution_residual, normalized_convergence,
    reparametrization_check, solve_translator, translator_hs_residual, FlowState, NormalizedConfig,
    ReparamConfig, SMode, Scheme, Trajectory, TranslatorParams,
};
use expanderlab::graph_solver::{
    comparison_ordering, e_minimality_check, solve_dirichlet_disk, uniqueness_estimate_check, Bump,
    ConeData, NodeKind,
};
use expanderlab::numerics::Grid1D;
use expanderlab::spectral::{
    i0_closed_form, i0_family_quadrature, i0_untruncated_quadrature, l0_affine_identity_residual,
    l0_identity_residual, stability_classify, ConeEigendata, SpectralParams, Stability,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::report::Check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Quick,
}

impl Mode {
    fn pick<T>(self, full: T, quick: T) -> T {
        match self {
            Mode::Full => full,
            Mode::Quick => quick,
        }
    }
}

pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub budget: Duration,
    run: fn(Mode) -> Result<Vec<Check>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub mode: Mode,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub elapsed_seconds: f64,
    pub budget_seconds: f64,
    pub passed: bool,
}

impl CriterionResult {
    /// One-line summary: the failing checks, or the worst margin.
    pub fn summary(&self) -> String {
        if let Some(e) = &self.error {
            return format!("error: {e}");
        }
        let failing: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} = {:.3e} (tol {:.3e})", c.name, c.value, c.tolerance))
            .collect();
        if !failing.is_empty() {
            return format!("failed: {}", failing.join("; "));
        }
        if self.elapsed_seconds > self.budget_seconds {
            return format!("over budget: {:.2}s > {:.0}s", self.elapsed_seconds, self.budget_seconds);
        }
        format!("{} checks", self.checks.len())
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, title: "first sphere entropy", budget: Duration::from_millis(1), run: entropy_first },
        Criterion { id: 2, title: "entropy chain", budget: Duration::from_millis(10), run: entropy_chain },
        Criterion { id: 3, title: "Simons cone densities", budget: secs(1), run: simons_densities },
        Criterion { id: 4, title: "rotational expander barriers", budget: secs(30), run: rotational_barriers },
        Criterion { id: 5, title: "asymptotic constant", budget: secs(30), run: asymptotic_constant },
        Criterion { id: 6, title: "one-dimensional expander barriers", budget: secs(5), run: one_dimensional },
        Criterion { id: 7, title: "Gamma identity for the stability functional", budget: secs(5), run: gamma_identity },
        Criterion { id: 8, title: "instability detection", budget: secs(1), run: instability },
        Criterion { id: 9, title: "operator identities", budget: secs(1), run: operator_identities },
        Criterion { id: 10, title: "Dirichlet disk solver", budget: secs(300), run: disk_solver },
        Criterion { id: 11, title: "flow suite", budget: secs(600), run: flow_suite },
        Criterion { id: 12, title: "translator suite", budget: secs(120), run: translator_suite },
        Criterion { id: 13, title: "monotonicity identity", budget: secs(30), run: monotonicity },
    ]
}

/// Run the selected criteria in order, reporting each as it finishes.
pub fn run_suite(mode: Mode, only: Option<&[u32]>, mut on_result: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let mut results = Vec::new();
    for c in criteria() {
        if only.is_some_and(|ids| !ids.contains(&c.id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = (c.run)(mode);
        let elapsed = start.elapsed();
        let (checks, error) = match outcome {
            Ok(checks) => (checks, None),
            Err(e) => (Vec::new(), Some(format!("{e:#}"))),
        };
        let passed = error.is_none() && !checks.is_empty() && checks.iter().all(|c| c.passed) && elapsed <= c.budget;
        let result = CriterionResult {
            id: c.id,
            title: c.title,
            mode,
            checks,
            error,
            elapsed_seconds: elapsed.as_secs_f64(),
            budget_seconds: c.budget.as_secs_f64(),
            passed,
        };
        on_result(&result);
        results.push(result);
    }
    results
}

fn entropy_first(_: Mode) -> Result<Vec<Check>> {
    let d1 = entropy_dk(1)?;
    Ok(vec![
        Check::at_most("|d1 - 1.5203|", (d1 - 1.5203).abs(), 1e-3),
        Check::at_most("|d1 - sqrt(2pi/e)|", (d1 - (2.0 * PI / E).sqrt()).abs(), 1e-12),
    ])
}

fn entropy_chain(_: Mode) -> Result<Vec<Check>> {
    let d: Vec<f64> = (1..=50).map(entropy_dk).collect::<Result<_, _>>()?;
    let worst_step = d.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![
        Check::flag("d_k strictly decreasing for k <= 50", worst_step < 0.0)
            .detail(format!("largest step {worst_step:.3e}")),
        Check::at_most("|d_200 - sqrt 2|", (entropy_dk(200)? - SQRT_2).abs(), 0.01),
    ])
}

fn simons_densities(_: Mode) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (k, exact) in [(1, PI / 2.0), (2, 1.5), (3, 15.0 * PI / 32.0)] {
        let spec = ConeSpec::simons(k);
        let theta = cone_density(&spec)?;
        checks.push(Check::at_most(format!("|Theta(C_{k},{k}) - closed form|"), (theta - exact).abs(), 1e-9));
        checks.push(Check::at_least(format!("Theta(C_{k},{k}) - sqrt 2"), theta - SQRT_2, f64::MIN_POSITIVE));
        let g = gaussian_density_identity(&spec, 1e-8)?;
        checks.push(Check::at_most(format!("Gaussian identity C_{k},{k}"), g.difference, 1e-8));
    }
    Ok(checks)
}

#[derive(Clone, Copy)]
struct Case {
    n: u32,
    kappa: f64,
}

fn reference_cases() -> Vec<Case> {
    [3, 5, 7]
        .iter()
        .flat_map(|&n| [0.5, 1.0, 2.0].map(move |kappa| Case { n, kappa }))
        .collect()
}

fn reference_profiles(mode: Mode) -> Result<Vec<(Case, expanderlab::expander_ode::RadialProfile)>> {
    let grid = Grid1D::uniform(0.0, 20.0, mode.pick(4000, 1000))?;
    let cases = reference_cases();
    let solved = expanderlab::par::map(&cases, |c| solve_rotational(c.n, c.kappa, 20.0, &grid));
    cases
        .into_iter()
        .zip(solved)
        .map(|(c, p)| Ok((c, p?)))
        .collect()
}

fn worst<T>(items: &[T], f: impl Fn(&T) -> f64) -> (f64, usize) {
    items
        .iter()
        .enumerate()
        .map(|(i, x)| (f(x), i))
        .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
}

fn rotational_barriers(mode: Mode) -> Result<Vec<Check>> {
    let profiles = reference_profiles(mode)?;
    let reports: Vec<_> = profiles.iter().map(|(c, p)| (*c, barrier_report(p))).collect();
    let label = |i: usize| format!("worst case n={} kappa={}", reports[i].0.n, reports[i].0.kappa);
    let (res, ri) = worst(&reports, |r| r.1.residual);
    let (low, li) = worst(&reports, |r| r.1.lower_violation);
    let (up, ui) = worst(&reports, |r| r.1.upper_violation);
    let (mono, mi) = worst(&reports, |r| r.1.monotonicity_defect);
    Ok(vec![
        Check::at_most("residual", res, 1e-8).detail(label(ri)),
        Check::at_most("lower barrier violation", low, 1e-9).detail(label(li)),
        Check::at_most("upper barrier violation", up, 1e-9).detail(label(ui)),
        Check::at_most("monotonicity defect", mono, 1e-9).detail(label(mi)),
    ])
}

fn asymptotic_constant(mode: Mode) -> Result<Vec<Check>> {
    let tol = mode.pick(0.05, 0.1);
    reference_profiles(mode)?
        .iter()
        .map(|(c, p)| {
            let fit = asymptotic_fit(p)?;
            let target = (c.n - 1) as f64 * c.kappa;
            Ok(Check::at_most(
                format!("relative gap n={} kappa={}", c.n, c.kappa),
                (fit.constant - target).abs() / target,
                tol,
            )
            .detail(format!("fit {:.6} vs {target}", fit.constant)))
        })
        .collect()
}

fn one_dimensional(mode: Mode) -> Result<Vec<Check>> {
    let grid = Grid1D::uniform(0.0, 10.0, mode.pick(2001, 501))?;
    let mut checks = Vec::new();
    for kappa in [1.0, 3.0] {
        let report = barrier_report(&solve_1d(kappa, 10.0, &grid)?);
        checks.push(Check::at_most(format!("lower violation kappa={kappa}"), report.lower_violation, 1e-9));
        checks.push(Check::at_most(format!("upper violation kappa={kappa}"), report.upper_violation, 1e-9));
        checks.push(Check::at_most(format!("residual kappa={kappa}"), report.residual, 1e-8));
    }
    Ok(checks)
}

const GAMMA_CASES: [(u32, f64, f64); 3] = [(3, -0.25, 0.05), (5, -2.25, 0.1), (7, -6.0, 0.2)];

fn gamma_identity(mode: Mode) -> Result<Vec<Check>> {
    let (delta, radius) = (1e-3, 30.0);
    let mut checks = Vec::new();
    for (n, lambda1, eps) in GAMMA_CASES {
        let params = SpectralParams { n, lambda1, eps, delta, radius };
        let quad = i0_family_quadrature(&params, 1e-10)?.value;
        let closed = i0_closed_form(n, lambda1, eps)?;
        let label = format!("n={n} lambda1={lambda1} eps={eps}");
        checks.push(match mode {
            Mode::Full => Check::at_most(format!("relative gap {label}"), (quad - closed).abs() / closed.abs(), 1e-3),
            Mode::Quick => {
                let remainder = (lambda1.abs() + 1.5) * 4.0 / n as f64 * delta.powf(2.0 * eps);
                Check::at_most(format!("gap within truncation remainder {label}"), (quad - closed).abs(), remainder)
            }
        }
        .detail(format!("quadrature {quad:.9} closed form {closed:.9}")));
        let whole = i0_untruncated_quadrature(n, lambda1, eps, 1e-12)?;
        checks.push(Check::at_most(
            format!("untruncated relative gap {label}"),
            (whole - closed).abs() / closed.abs(),
            1e-8,
        ));
    }
    Ok(checks)
}

fn instability(_: Mode) -> Result<Vec<Check>> {
    let mut worst_value = f64::NEG_INFINITY;
    let mut misclassified = 0;
    for i in 0..20 {
        let n = 3 + (i % 10) as u32;
        let margin = -0.05 - 0.25 * i as f64;
        let lambda1 = margin - (n as f64 - 2.0).powi(2) / 4.0;
        worst_value = worst_value.max(i0_closed_form(n, lambda1, 1e-3)?);
        if stability_classify(&ConeEigendata::new(n, lambda1, -lambda1)) != Stability::Unstable {
            misclassified += 1;
        }
    }
    let flips: Vec<Stability> = (1..=6).map(|k| stability_classify(&ConeEigendata::simons(k))).collect();
    let flip_at_three = flips[..2].iter().all(|s| *s == Stability::Unstable)
        && flips[2..].iter().all(|s| *s == Stability::Stable);
    Ok(vec![
        Check::at_most("largest I0 at eps=1e-3 over 20 unstable samples", worst_value, -f64::MIN_POSITIVE),
        Check::at_most("unstable samples classified stable", misclassified as f64, 0.0),
        Check::flag("Simons classification flips at k = 3", flip_at_three),
    ])
}

fn operator_identities(_: Mode) -> Result<Vec<Check>> {
    let sample: [(u32, f64, f64, f64); 10] = [
        (3, 0.5, 1.0, 4.0),
        (3, -1.0, 0.0, 2.0),
        (4, 1.5, 0.5, 3.0),
        (5, 2.0, -0.5, 1.5),
        (5, -0.5, 2.0, 5.0),
        (6, 1.0, 1.0, 2.5),
        (7, 3.0, 0.25, 3.5),
        (7, 0.0, -1.0, 1.2),
        (8, -2.0, 1.5, 4.5),
        (9, 2.5, 0.75, 2.0),
    ];
    let h = 1e-3;
    let order = |a: f64, b: f64| (a / b).log2();
    let mut power = f64::INFINITY;
    let mut affine = f64::INFINITY;
    for &(n, tau, s, r) in &sample {
        power = power.min(order(l0_identity_residual(n, tau, r, h).relative, l0_identity_residual(n, tau, r, 0.5 * h).relative));
        affine = affine.min(order(
            l0_affine_identity_residual(n, 1.0, s, r, h).relative,
            l0_affine_identity_residual(n, 1.0, s, r, 0.5 * h).relative,
        ));
    }
    Ok(vec![
        Check::at_least("observed order, power identity", power, 1.9),
        Check::at_least("observed order, affine identity", affine, 1.9),
    ])
}

fn random_fourier(rng: &mut ChaCha8Rng) -> (f64, Vec<f64>, Vec<f64>) {
    let mean = rng.gen_range(0.2..1.5);
    let cos = (0..3).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let sin = (0..3).map(|_| rng.gen_range(-0.3..0.3)).collect();
    (mean, cos, sin)
}

fn disk_solver(mode: Mode) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let radius = 3.0;
    let per_side = mode.pick(361, 121);
    let field = solve_dirichlet_disk(ConeData::Rotational { kappa: 1.0 }.into_arc(), 1.0, radius, per_side)?;
    let profile = solve_rotational(2, 1.0, radius, &Grid1D::uniform(0.0, radius, 6001)?)?.interpolant();
    let cross = field
        .disk_nodes()
        .filter(|n| n.3 == NodeKind::Interior)
        .map(|(x, y, u, _)| (u - profile.eval(x.hypot(y))).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("rotational cross-check", cross, mode.pick(1e-5, 1e-4)));

    let a = [0.7, -1.3];
    let linear = solve_dirichlet_disk(ConeData::Linear { a }.into_arc(), a[0].hypot(a[1]), 2.0, 61)?;
    let exact = linear
        .disk_nodes()
        .filter(|n| n.3 != NodeKind::Exterior)
        .map(|(x, y, u, _)| (u - a[0] * x - a[1] * y).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("linear data exactness", exact, 1e-10));

    let big = mode.pick(201, 121);
    for data in [ConeData::Rotational { kappa: 1.0 }, ConeData::MaxBlend { weight: 0.5 }] {
        let l = data.lipschitz();
        let name = format!("{data:?}");
        let report = uniqueness_estimate_check(&solve_dirichlet_disk(data.into_arc(), l, 20.0, big)?);
        checks.push(
            Check::at_most(format!("decay estimate at R=20, {name}"), report.max_weighted, report.slack * report.bound)
                .detail(format!("bound {} with slack {}", report.bound, report.slack)),
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pairs = mode.pick(50, 10);
    let pair_side = mode.pick(61, 31);
    let mut violations = 0;
    for _ in 0..pairs {
        let (mean, cos, sin) = random_fourier(&mut rng);
        let lift_cos: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.2..0.2)).collect();
        let lift_sin: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.2..0.2)).collect();
        let floor: f64 = lift_cos.iter().chain(&lift_sin).map(|c| c.abs()).sum::<f64>() + rng.gen_range(0.0..0.2);
        let lower = ConeData::Fourier { mean, cos: cos.clone(), sin: sin.clone() };
        let upper = ConeData::Fourier {
            mean: mean + floor,
            cos: cos.iter().zip(lift_cos.iter().chain([0.0].iter())).map(|(a, b)| a + b).collect(),
            sin: sin.iter().zip(lift_sin.iter().chain([0.0].iter())).map(|(a, b)| a + b).collect(),
        };
        let l = lower.lipschitz().max(upper.lipschitz());
        let report = comparison_ordering(lower.into_arc(), upper.into_arc(), l, 3.0, pair_side)?;
        violations += report.violations;
    }
    checks.push(Check::at_most(format!("ordering violations over {pairs} random pairs"), violations as f64, 0.0));

    let base = solve_dirichlet_disk(ConeData::Rotational { kappa: 1.0 }.into_arc(), 1.0, 4.0, mode.pick(121, 61))?;
    let reach = base.sampling_radius();
    let count = mode.pick(100, 20);
    let bumps: Vec<Bump> = (0..count)
        .map(|_| {
            let radius = rng.gen_range(0.3..1.0);
            let r = rng.gen_range(0.0..reach - radius - 1e-6);
            let t = rng.gen_range(0.0..2.0 * PI);
            Bump { centre: [r * t.cos(), r * t.sin()], radius, amplitude: rng.gen_range(-0.05..0.05) }
        })
        .collect();
    let report = e_minimality_check(&base, &bumps)?;
    checks.push(
        Check::at_most(format!("weighted-area decreases over {count} bumps"), report.violations as f64, 0.0)
            .detail(format!("smallest increase {:.3e}, tolerance {:.3e}", report.min_increase, report.tolerance)),
    );
    Ok(checks)
}

fn flow_suite(mode: Mode) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let a = expander_drift(3, 1.0, 5.0, 0.1, 0.02, 1.0, Scheme::SemiImplicit)?;
    let b = expander_drift(3, 1.0, 5.0, 0.05, 0.01, 1.0, Scheme::SemiImplicit)?;
    checks.push(Check::at_least("expander drift reduction", a.drift / b.drift, 2.5)
        .detail(format!("{:.3e} -> {:.3e}", a.drift, b.drift)));

    let config = ReparamConfig::new(1.0, 0.5, 0.5);
    let a = reparametrization_check(&config)?;
    let b = reparametrization_check(&config.refined())?;
    checks.push(Check::at_least("reparametrization discrepancy reduction", a.discrepancy / b.discrepancy, 2.5)
        .detail(format!("{:.3e} -> {:.3e}", a.discrepancy, b.discrepancy)));

    let mut with = Vec::new();
    let mut without = Vec::new();
    for (h, dt) in [(0.05, 0.01), (0.025, 0.005)] {
        let grid = Grid1D::with_spacing(0.0, 5.0, h)?;
        let state = FlowState::radial(solve_rotational(2, 1.0, 5.0, &grid)?, 0.5, dt, Scheme::SemiImplicit, SMode::FullPosition)?;
        let traj = Trajectory::record(state, (0.4 / dt).round() as usize)?;
        with.push(h_evolution_residual(&traj, true)?.residual);
        without.push(h_evolution_residual(&traj, false)?.residual);
    }
    checks.push(Check::at_least("H-evolution residual reduction", with[0] / with[1], 2.5)
        .detail(format!("{:.3e} -> {:.3e}", with[0], with[1])));
    checks.push(Check::at_most("H-evolution without the s-term, reduction", without[0] / without[1], 2.5)
        .detail(format!("negative control {:.3e} -> {:.3e}", without[0], without[1])));

    let mut normalized = NormalizedConfig::new(1.0, 40.0, 25.0);
    if mode == Mode::Quick {
        normalized.spacing = 0.1;
        normalized.dt = 0.02;
    }
    let report = normalized_convergence(&normalized)?;
    checks.push(Check::at_most("normalized convergence e(T)", report.final_error, 1e-2));
    checks.push(Check::flag("normalized error decreasing", report.decreasing));
    Ok(checks)
}

fn translator_suite(_: Mode) -> Result<Vec<Check>> {
    let base = TranslatorParams { epsilon: 1.0, lambda: 1.0, base_dim: 2, radius: 2.0 };
    let lambdas = [10.0, 100.0, 1000.0];
    let nodes = 201;
    let mut hs: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for &lambda in &lambdas {
        let sol = solve_translator(&TranslatorParams { lambda, ..base }, nodes)?;
        hs = hs.max(translator_hs_residual(&sol));
        residual = residual.max(sol.residual);
    }
    let report = arrival_time_limit(&base, &lambdas, nodes)?;
    ensure!(report.failures.is_empty(), "arrival-time solves failed: {:?}", report.failures);
    Ok(vec![
        Check::at_most("radial translator residual", residual, 1e-8),
        Check::at_most("s-mean curvature identity", hs, 1e-7),
        Check::flag("arrival-time differences decreasing", report.differences_decreasing)
            .detail(format!("{:?}", report.differences)),
        Check::flag("level-set residual decreasing", report.level_set_decreasing)
            .detail(format!("{:?}", report.level_set_residuals)),
    ])
}

fn monotonicity(mode: Mode) -> Result<Vec<Check>> {
    let grid = Grid1D::with_spacing(0.0, 12.0, mode.pick(0.002, 0.01))?;
    let profile = solve_rotational(3, 1.0, 12.0, &grid)?;
    let report = monotonicity_identity_check(&profile, &[2.0, 4.0, 8.0], 0.1)?;
    Ok(vec![
        Check::at_most("largest mismatch", report.max_mismatch, 1e-4),
        Check::at_least("refinement reduction", report.min_reduction, 3.0),
    ])
}
