//! One function per subcommand. Each writes its artifacts and returns the
//! certified properties it checked.

use std::f64::consts::SQRT_2;

use anyhow::{anyhow, Result};
use expanderlab::density::sqrt2_table;
use expanderlab::expander_ode::{asymptotic_fit, barrier_report, solve_1d, solve_rotational, BarrierReport, RadialProfile};
use expanderlab::export::{contour_plot, line_plot, Cell, Series, Table};
use expanderlab::flow_sim::{
    arrival_time_closed_form, arrival_time_limit, normalized_convergence, reparametrization_check, solve_translator,
    translator_hs_residual, NormalizedConfig, ReparamConfig, TranslatorParams,
};
use expanderlab::graph_solver::{solve_dirichlet_disk, solve_latitude_band, uniqueness_estimate_check, ConeData};
use expanderlab::numerics::Grid1D;
use expanderlab::spectral::{
    i0_closed_form, i0_family_quadrature, i0_untruncated_quadrature, stability_classify, ConeEigendata, SpectralParams,
};
use serde_json::Value;

use crate::config::*;
use crate::report::{Check, Outcome, Writer};
use crate::suite::{self, Mode};

pub fn run(config: &ExperimentConfig, w: &Writer) -> Result<Outcome> {
    match config.command {
        CommandKind::SolveRotational => rotational(config.params()?, w),
        CommandKind::Solve1d => one_dim(config.params()?, w),
        CommandKind::Dirichlet => dirichlet(config.params()?, w),
        CommandKind::Latitude => latitude(config.params()?, w),
        CommandKind::Flow => flow(config.params()?, w),
        CommandKind::Reparam => reparam(config.params()?, w),
        CommandKind::Translator => translator(config.params()?, w),
        CommandKind::Spectral => spectral(config.params()?, w),
        CommandKind::DensityTable => density_table(config.params()?, w),
        CommandKind::VerifyAll => verify_all(config.params()?, w),
    }
}

fn missing(key: &str) -> anyhow::Error {
    anyhow!(UsageError(format!("missing parameter {key}")))
}

fn barrier_checks(out: &mut Outcome, report: &BarrierReport) {
    out.checks.extend([
        Check::at_most("residual", report.residual, 1e-8),
        Check::at_most("lower barrier violation", report.lower_violation, 1e-9),
        Check::at_most("upper barrier violation", report.upper_violation, 1e-9),
        Check::at_most("monotonicity defect", report.monotonicity_defect, 1e-9),
    ]);
    if let Some(v) = report.plateau_violation {
        out.checks.push(Check::at_most("plateau bound violation", v, 1e-9));
    }
}

fn profile_artifacts(out: &mut Outcome, w: &Writer, name: &str, profile: &RadialProfile, report: &BarrierReport) -> Result<()> {
    let r = profile.nodes();
    let b = report.barrier;
    let lower: Vec<f64> = r.iter().map(|&x| b.lower(x)).collect();
    let upper: Vec<f64> = r.iter().map(|&x| if x >= report.upper_from { b.upper(x) } else { f64::NAN }).collect();
    let offset: Vec<f64> = r.iter().zip(&profile.values).map(|(x, u)| u - profile.kappa * x).collect();
    let table = Table::from_columns(&["r", "u", "u_minus_kappa_r", "lower", "upper"], &[r, &profile.values, &offset, &lower, &upper]);
    w.csv(out, name, &table)?;
    w.json(out, &format!("{name}_certificate"), report)?;
    let (ur, uu): (Vec<f64>, Vec<f64>) = r.iter().zip(&upper).filter(|(_, u)| u.is_finite()).map(|(a, b)| (*a, *b)).unzip();
    w.svg(out, name, || {
        line_plot(
            &format!("expander profile, n = {}, kappa = {}", profile.n, profile.kappa),
            "r",
            "u",
            &[
                Series { label: "u".into(), x: r, y: &profile.values },
                Series { label: "lower barrier".into(), x: r, y: &lower },
                Series { label: "upper barrier".into(), x: &ur, y: &uu },
            ],
        )
    })
}

fn rotational(args: RotationalArgs, w: &Writer) -> Result<Outcome> {
    let n = args.n.ok_or_else(|| missing("n"))?;
    let kappa = args.kappa.ok_or_else(|| missing("kappa"))?;
    let radius = args.radius.unwrap_or(20.0);
    let grid = Grid1D::uniform(0.0, radius, args.resolution.unwrap_or(4001))?;
    let profile = solve_rotational(n, kappa, radius, &grid)?;
    let report = barrier_report(&profile);
    let mut out = Outcome::default();
    barrier_checks(&mut out, &report);
    if n >= 3 {
        let fit = asymptotic_fit(&profile)?;
        let target = (n - 1) as f64 * kappa;
        out.notes.push(format!("asymptotic constant {:.6} against (n-1) kappa = {target}", fit.constant));
        w.json(&mut out, "asymptotic_fit", &fit)?;
    }
    profile_artifacts(&mut out, w, "profile", &profile, &report)?;
    Ok(out)
}

fn one_dim(args: OneDimArgs, w: &Writer) -> Result<Outcome> {
    let kappa = args.kappa.ok_or_else(|| missing("kappa"))?;
    let radius = args.radius.unwrap_or(10.0);
    let grid = Grid1D::uniform(0.0, radius, args.resolution.unwrap_or(2001))?;
    let profile = solve_1d(kappa, radius, &grid)?;
    let report = barrier_report(&profile);
    let mut out = Outcome::default();
    barrier_checks(&mut out, &report);
    profile_artifacts(&mut out, w, "profile_1d", &profile, &report)?;
    Ok(out)
}

fn cone_data(args: &DirichletArgs) -> Result<ConeData> {
    let data = args.data.as_ref().ok_or_else(|| missing("data"))?;
    let parsed = match data {
        Value::String(s) => match s.as_str() {
            "rotational" => ConeData::Rotational { kappa: args.kappa.unwrap_or(1.0) },
            "abs-first" => ConeData::AbsFirst,
            "max-blend" => ConeData::MaxBlend { weight: args.weight.unwrap_or(0.5) },
            other => {
                return Err(anyhow!(UsageError(format!(
                    "unknown data {other:?}; use rotational, abs-first, max-blend or a JSON object"
                ))))
            }
        },
        obj => serde_json::from_value(obj.clone()).map_err(|e| anyhow!(UsageError(format!("data: {e}"))))?,
    };
    Ok(parsed)
}

fn dirichlet(args: DirichletArgs, w: &Writer) -> Result<Outcome> {
    let data = cone_data(&args)?;
    let radius = args.radius.unwrap_or(10.0);
    let per_side = args.resolution.unwrap_or(101);
    let l = data.lipschitz();
    let field = solve_dirichlet_disk(data.clone().into_arc(), l, radius, per_side)?;
    let mut out = Outcome::default();
    out.checks.push(Check::at_most("interior residual", field.residual(), 1e-8));
    let decay = uniqueness_estimate_check(&field);
    if decay.nodes > 0 {
        out.checks.push(
            Check::at_most("decay estimate", decay.max_weighted, decay.slack * decay.bound)
                .detail(format!("bound {} with slack {}", decay.bound, decay.slack)),
        );
    } else {
        out.notes.push("disk too small for the decay window 2 <= |y| <= R/2".into());
    }
    let mut table = Table::new(["x1", "x2", "u", "boundary_data", "kind"]);
    for (x, y, u, kind) in field.disk_nodes() {
        table.push(vec![x.into(), y.into(), u.into(), field.boundary.eval(x, y).into(), format!("{kind:?}").to_lowercase().into()]);
    }
    w.csv(&mut out, "dirichlet_nodes", &table)?;
    w.json(&mut out, "dirichlet_report", &serde_json::json!({ "data": data, "stats": field.stats, "decay": decay }))?;
    w.svg(&mut out, "dirichlet_contours", || {
        let inside: Vec<f64> = field
            .values
            .iter()
            .zip(field.kinds())
            .map(|(v, k)| if *k == expanderlab::graph_solver::NodeKind::Exterior { f64::NAN } else { *v })
            .collect();
        contour_plot("solution contours", field.coords(), field.coords(), &inside, 12)
    })?;
    Ok(out)
}

fn latitude(args: LatitudeArgs, w: &Writer) -> Result<Outcome> {
    let epsilon = args.epsilon.ok_or_else(|| missing("epsilon"))?;
    let band = [args.theta1.unwrap_or(0.0), args.theta2.unwrap_or(1.0)];
    let field = solve_latitude_band(epsilon, band, args.n.unwrap_or(3), args.resolution.unwrap_or(401))?;
    let mut out = Outcome::default();
    out.checks.push(Check::at_most("residual", field.residual, 1e-7));
    out.checks.push(Check::at_most("largest value", field.max_value(), 0.0));
    let theta = field.theta_grid.nodes();
    w.csv(&mut out, "latitude", &Table::from_columns(&["theta", "value"], &[theta, &field.values]))?;
    w.json(&mut out, "latitude", &field)?;
    w.svg(&mut out, "latitude", || {
        line_plot(
            &format!("band solution, epsilon = {epsilon}"),
            "theta",
            "value",
            &[Series { label: "solution".into(), x: theta, y: &field.values }],
        )
    })?;
    Ok(out)
}

fn flow(args: FlowArgs, w: &Writer) -> Result<Outcome> {
    let kappa = args.kappa.ok_or_else(|| missing("kappa"))?;
    let mut config = NormalizedConfig::new(kappa, args.radius.unwrap_or(40.0), args.t_final.unwrap_or(25.0));
    config.spacing = args.spacing.unwrap_or(config.spacing);
    config.dt = args.dt.unwrap_or(config.dt);
    config.from_expander = args.from_expander;
    let report = normalized_convergence(&config)?;
    let mut out = Outcome::default();
    out.checks.push(Check::at_most("normalized error at the final time", report.final_error, 1e-2));
    out.checks.push(Check::flag("normalized error decreasing", report.decreasing));
    let times: Vec<f64> = report.rows.iter().map(|r| r.time).collect();
    let errors: Vec<f64> = report.rows.iter().map(|r| r.error).collect();
    w.csv(&mut out, "normalized_flow", &Table::from_columns(&["time", "error"], &[&times, &errors]))?;
    w.json(&mut out, "normalized_flow", &report)?;
    w.svg(&mut out, "normalized_flow", || {
        line_plot("normalized convergence", "t", "error", &[Series { label: "e(t)".into(), x: &times, y: &errors }])
    })?;
    Ok(out)
}

fn reparam(args: ReparamArgs, w: &Writer) -> Result<Outcome> {
    let kappa = args.kappa.ok_or_else(|| missing("kappa"))?;
    let s = args.s.ok_or_else(|| missing("s"))?;
    let mut config = ReparamConfig::new(kappa, s, args.t_final.unwrap_or(0.5));
    config.spacing = args.spacing.unwrap_or(config.spacing);
    config.dt = args.dt.unwrap_or(config.dt);
    let levels = [config.clone(), config.refined()];
    let reports = levels.iter().map(reparametrization_check).collect::<Result<Vec<_>, _>>()?;
    let mut out = Outcome::default();
    out.checks.push(
        Check::at_least("discrepancy reduction under halving", reports[0].discrepancy / reports[1].discrepancy, 2.5)
            .detail(format!("{:.3e} -> {:.3e}", reports[0].discrepancy, reports[1].discrepancy)),
    );
    let mut table = Table::new(["spacing", "dt", "scale", "mcf_duration", "discrepancy", "s_leg_error"]);
    for (c, r) in levels.iter().zip(&reports) {
        table.push(vec![c.spacing.into(), c.dt.into(), r.scale.into(), r.mcf_duration.into(), r.discrepancy.into(), r.s_leg_error.into()]);
    }
    w.csv(&mut out, "reparametrization", &table)?;
    w.json(&mut out, "reparametrization", &serde_json::json!({ "configs": levels, "reports": reports }))?;
    let dts: Vec<f64> = levels.iter().map(|c| c.dt).collect();
    let gaps: Vec<f64> = reports.iter().map(|r| r.discrepancy).collect();
    w.svg(&mut out, "reparametrization", || {
        line_plot("reparametrization discrepancy", "dt", "discrepancy", &[Series { label: "discrepancy".into(), x: &dts, y: &gaps }])
    })?;
    Ok(out)
}

fn translator(args: TranslatorArgs, w: &Writer) -> Result<Outcome> {
    let params = TranslatorParams {
        epsilon: args.epsilon.ok_or_else(|| missing("epsilon"))?,
        lambda: args.lambda.ok_or_else(|| missing("lambda"))?,
        base_dim: args.m.unwrap_or(2),
        radius: args.rho.unwrap_or(2.0),
    };
    let nodes = args.resolution.unwrap_or(201);
    let sol = solve_translator(&params, nodes)?;
    let mut out = Outcome::default();
    out.checks.push(Check::at_most("radial residual", sol.residual, 1e-8));
    out.checks.push(Check::at_most("s-mean curvature identity", translator_hs_residual(&sol), 1e-7));
    let r = sol.profile.nodes();
    let arrival = sol.arrival_time();
    let limit: Vec<f64> = r.iter().map(|&x| arrival_time_closed_form(&params, x).unwrap_or(f64::NAN)).collect();
    w.csv(
        &mut out,
        "translator",
        &Table::from_columns(&["r", "phi", "arrival_time", "limit_arrival_time"], &[r, &sol.profile.values, &arrival, &limit]),
    )?;
    w.json(&mut out, "translator", &sol)?;
    if let Some(lambdas) = args.lambdas {
        let report = arrival_time_limit(&params, &lambdas, nodes)?;
        if !report.failures.is_empty() {
            return Err(anyhow!("arrival-time solves failed: {:?}", report.failures));
        }
        out.checks.push(Check::flag("arrival-time differences decreasing", report.differences_decreasing));
        out.checks.push(Check::flag("level-set residual decreasing", report.level_set_decreasing));
        w.json(&mut out, "arrival_limit", &report)?;
    }
    w.svg(&mut out, "translator", || {
        line_plot(
            &format!("arrival time, lambda = {}", params.lambda),
            "r",
            "time",
            &[
                Series { label: "phi / lambda".into(), x: r, y: &arrival },
                Series { label: "limit".into(), x: r, y: &limit },
            ],
        )
    })?;
    Ok(out)
}

fn spectral(args: SpectralArgs, w: &Writer) -> Result<Outcome> {
    let params = SpectralParams {
        n: args.n.ok_or_else(|| missing("n"))?,
        lambda1: args.lambda1.ok_or_else(|| missing("lambda1"))?,
        eps: args.epsilon.ok_or_else(|| missing("epsilon"))?,
        delta: args.delta.unwrap_or(1e-3),
        radius: args.radius.unwrap_or(30.0),
    };
    params.validate()?;
    let closed = i0_closed_form(params.n, params.lambda1, params.eps)?;
    let truncated = i0_family_quadrature(&params, 1e-10)?.value;
    let whole = i0_untruncated_quadrature(params.n, params.lambda1, params.eps, 1e-12)?;
    let data = ConeEigendata::new(params.n, params.lambda1, -params.lambda1);
    let class = stability_classify(&data);
    let mut out = Outcome::default();
    out.checks.push(Check::at_most("untruncated quadrature against closed form", (whole - closed).abs() / closed.abs().max(1e-300), 1e-8));
    out.notes.push(format!("truncated family differs from the closed form by {:.3e}", truncated - closed));
    let mut table = Table::new(["n", "lambda1", "epsilon", "delta", "R", "closed_form", "quadrature", "untruncated", "margin", "classification"]);
    table.push(vec![
        params.n.into(),
        params.lambda1.into(),
        params.eps.into(),
        params.delta.into(),
        params.radius.into(),
        closed.into(),
        truncated.into(),
        whole.into(),
        data.margin().into(),
        class.to_string().into(),
    ]);
    w.csv(&mut out, "spectral", &table)?;
    w.json(
        &mut out,
        "spectral",
        &serde_json::json!({ "params": params, "closed_form": closed, "quadrature": truncated, "untruncated": whole, "classification": class }),
    )?;
    let eps: Vec<f64> = (1..=40).map(|k| params.eps * k as f64 / 20.0).collect();
    let values: Vec<f64> = eps.iter().map(|&e| i0_closed_form(params.n, params.lambda1, e).unwrap_or(f64::NAN)).collect();
    w.svg(&mut out, "spectral", || {
        line_plot("closed-form functional", "epsilon", "I0", &[Series { label: "I0".into(), x: &eps, y: &values }])
    })?;
    Ok(out)
}

fn density_table(args: DensityArgs, w: &Writer) -> Result<Outcome> {
    let k_max = args.k_max.ok_or_else(|| missing("k_max"))?;
    let table = sqrt2_table(k_max)?;
    let mut out = Outcome::default();
    out.checks.extend([
        Check::flag("Simons densities above sqrt 2", table.densities_above_sqrt2),
        Check::flag("Simons densities decreasing", table.densities_decreasing),
        Check::flag("sphere entropies above sqrt 2", table.entropies_above_sqrt2),
        Check::flag("sphere entropies decreasing", table.entropies_decreasing),
    ]);
    let mut csv = Table::new(["k", "simons_density", "entropy", "density_gap", "entropy_gap"]);
    for r in &table.rows {
        csv.push(vec![Cell::from(r.k), r.simons_density.into(), r.entropy.into(), r.density_gap.into(), r.entropy_gap.into()]);
    }
    w.csv(&mut out, "density_table", &csv)?;
    w.json(&mut out, "density_table", &table)?;
    let k: Vec<f64> = table.rows.iter().map(|r| r.k as f64).collect();
    let theta: Vec<f64> = table.rows.iter().map(|r| r.simons_density).collect();
    let d: Vec<f64> = table.rows.iter().map(|r| r.entropy).collect();
    let floor = vec![SQRT_2; k.len()];
    w.svg(&mut out, "density_table", || {
        line_plot(
            "densities against sqrt 2",
            "k",
            "value",
            &[
                Series { label: "Simons density".into(), x: &k, y: &theta },
                Series { label: "sphere entropy".into(), x: &k, y: &d },
                Series { label: "sqrt 2".into(), x: &k, y: &floor },
            ],
        )
    })?;
    Ok(out)
}

fn verify_all(args: VerifyArgs, w: &Writer) -> Result<Outcome> {
    let mode = if args.quick { Mode::Quick } else { Mode::Full };
    let results = suite::run_suite(mode, args.only.as_deref(), |r| {
        eprintln!(
            "[{}] criterion {:>2} {:<45} {:>8.2}s  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.title,
            r.elapsed_seconds,
            r.summary()
        );
    });
    let mut out = Outcome::default();
    let mut table = Table::new(["criterion", "title", "check", "value", "tolerance", "passed"]);
    for r in &results {
        if let Some(e) = &r.error {
            out.checks.push(Check::flag(format!("{}: {}", r.id, r.title), false).detail(e.clone()));
            table.push(vec![r.id.into(), r.title.into(), "error".into(), f64::NAN.into(), f64::NAN.into(), "false".into()]);
        }
        for c in &r.checks {
            out.checks.push(Check { name: format!("{}: {}", r.id, c.name), ..c.clone() });
            table.push(vec![r.id.into(), r.title.into(), c.name.as_str().into(), c.value.into(), c.tolerance.into(), c.passed.to_string().into()]);
        }
        out.checks.push(Check::at_most(format!("{}: runtime seconds", r.id), r.elapsed_seconds, r.budget_seconds));
    }
    out.notes.push(format!("mode {mode:?}; {} of {} criteria passed", results.iter().filter(|r| r.passed).count(), results.len()));
    w.csv(&mut out, "verify_summary", &table)?;
    w.json(&mut out, "verify_results", &results)?;
    Ok(out)
}
