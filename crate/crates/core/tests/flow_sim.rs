use std::sync::Arc;

use expanderlab::expander_ode::{solve_rotational, RadialProfile};
use expanderlab::flow_sim::{
    arrival_time_closed_form, arrival_time_limit, expander_drift, h_evolution_residual,
    normalized_convergence, ordering_check, refinement, reparametrization_check,
    reparametrization_pair, solve_translator, step, translator_hs_residual, FlowBoundary,
    FlowState, NormalizedConfig, ReparamConfig, SMode, Scheme, Trajectory, TranslatorParams,
};
use expanderlab::graph_solver::{solve_dirichlet_disk, ConeData, NodeKind};
use expanderlab::numerics::{sup_diff, Grid1D};
use expanderlab::Error;
use proptest::prelude::*;

fn radial(n: u32, radius: f64, h: f64, f: impl Fn(f64) -> f64) -> RadialProfile {
    let grid = Grid1D::with_spacing(0.0, radius, h).unwrap();
    let values = grid.nodes().iter().map(|&r| f(r)).collect();
    RadialProfile::new(n, 1.0, grid, values)
}

#[test]
fn static_plane() {
    let mut state = FlowState::radial(radial(2, 3.0, 0.05, |_| 0.0), 0.0, 0.01, Scheme::SemiImplicit, SMode::FullPosition).unwrap();
    for _ in 0..50 {
        state.advance().unwrap();
    }
    assert!(state.values().iter().all(|&v| v == 0.0));
    assert!((state.time - 0.5).abs() < 1e-12);
}

#[test]
fn linear_graph_is_static_on_disk() {
    let a = [0.4, -0.9];
    let field = solve_dirichlet_disk(ConeData::Linear { a }.into_arc(), 1.0, 2.0, 31).unwrap();
    let initial = field.values.clone();
    let mut state = FlowState::graph(field, 0.0, 0.01, Scheme::SemiImplicit, SMode::FullPosition).unwrap();
    for _ in 0..20 {
        state.advance().unwrap();
    }
    let kinds = state.field().unwrap().kinds().to_vec();
    let drift = state
        .values()
        .iter()
        .zip(&initial)
        .zip(&kinds)
        .filter(|(_, k)| **k != NodeKind::Exterior)
        .map(|((u, v), _)| (u - v).abs())
        .fold(0.0, f64::max);
    assert!(drift < 1e-12, "{drift:.3e}");
}

#[test]
fn disk_expander_is_nearly_stationary_and_matches_radial_flow() {
    let field = solve_dirichlet_disk(ConeData::Rotational { kappa: 1.0 }.into_arc(), 1.0, 3.0, 61).unwrap();
    let initial = field.values.clone();
    let kinds = field.kinds().to_vec();
    let mut state = FlowState::graph(field, 0.5, 0.01, Scheme::SemiImplicit, SMode::FullPosition).unwrap();
    for _ in 0..30 {
        state.advance().unwrap();
    }
    let drift = state
        .values()
        .iter()
        .zip(&initial)
        .zip(&kinds)
        .filter(|(_, k)| **k == NodeKind::Interior)
        .map(|((u, v), _)| (u - v).abs())
        .fold(0.0, f64::max);
    assert!(drift < 5e-3, "{drift:.3e}");
}

#[test]
fn disk_flow_agrees_with_radial_flow() {
    let bump = |r: f64| 0.5 * (-(r * r)).exp();
    let data = ConeData::Rotational { kappa: 1.0 };
    let mut field = solve_dirichlet_disk(data.into_arc(), 1.0, 3.0, 61).unwrap();
    let coords = field.coords().to_vec();
    let m = field.per_side();
    for j in 0..m {
        for i in 0..m {
            field.values[j * m + i] += bump(coords[i].hypot(coords[j]));
        }
    }
    let profile_grid = Grid1D::uniform(0.0, 3.0, 301).unwrap();
    let base = solve_rotational(2, 1.0, 3.0, &profile_grid).unwrap();
    let mut values = base.values.clone();
    for (v, r) in values.iter_mut().zip(profile_grid.nodes()) {
        *v += bump(*r);
    }
    let profile = RadialProfile::new(2, 1.0, profile_grid, values);
    let mut disk = FlowState::graph(field, 0.0, 0.005, Scheme::SemiImplicit, SMode::FullPosition).unwrap();
    let mut line = FlowState::radial(profile, 0.0, 0.005, Scheme::SemiImplicit, SMode::FullPosition)
        .unwrap()
        .with_boundary(FlowBoundary::Radial(Arc::new(move |_| 3.0 + bump(3.0))));
    disk.advance_to(0.2).unwrap();
    line.advance_to(0.2).unwrap();
    let interp = line.profile().unwrap().interpolant();
    let field = disk.field().unwrap();
    let err = field
        .disk_nodes()
        .filter(|n| n.3 == NodeKind::Interior && n.0.hypot(n.1) < 2.5)
        .map(|(x, y, u, _)| (u - interp.eval(x.hypot(y))).abs())
        .fold(0.0, f64::max);
    assert!(err < 5e-3, "{err:.3e}");
}

#[test]
fn expander_drift_refines() {
    let a = expander_drift(3, 1.0, 5.0, 0.1, 0.02, 1.0, Scheme::SemiImplicit).unwrap();
    let b = expander_drift(3, 1.0, 5.0, 0.05, 0.01, 1.0, Scheme::SemiImplicit).unwrap();
    assert!(refinement(a.drift, b.drift).certified, "{} {}", a.drift, b.drift);
}

#[test]
fn explicit_scheme_agrees_and_is_guarded() {
    let h = 0.1;
    let limit = h * h / 6.0;
    let e = expander_drift(3, 1.0, 5.0, h, 0.9 * limit, 0.2, Scheme::Explicit).unwrap();
    let s = expander_drift(3, 1.0, 5.0, h, 0.9 * limit, 0.2, Scheme::SemiImplicit).unwrap();
    assert!((e.drift - s.drift).abs() < 1e-3);
    let too_big = FlowState::radial(radial(3, 5.0, h, |r| r), 0.0, 1.01 * limit, Scheme::Explicit, SMode::FullPosition);
    assert!(matches!(too_big, Err(Error::Precondition(_))));
    let plane = FlowState::radial(radial(1, 5.0, h, |r| r), 0.0, 0.002, Scheme::Explicit, SMode::FullPosition).unwrap();
    assert!((plane.explicit_limit() - 0.25 * h * h).abs() < 1e-15);
}

#[test]
fn invalid_states_rejected() {
    let p = radial(2, 3.0, 0.1, |r| r);
    assert!(FlowState::radial(p.clone(), -1.0, 0.01, Scheme::SemiImplicit, SMode::FullPosition).is_err());
    assert!(FlowState::radial(p.clone(), 0.0, 0.0, Scheme::SemiImplicit, SMode::FullPosition).is_err());
    let nan = radial(2, 3.0, 0.1, |_| f64::NAN);
    assert!(FlowState::radial(nan, 0.0, 0.01, Scheme::SemiImplicit, SMode::FullPosition).is_err());
}

#[test]
fn blow_up_reported() {
    let state = FlowState::radial(radial(2, 3.0, 0.1, |_| 0.0), 0.0, 0.01, Scheme::SemiImplicit, SMode::FullPosition)
        .unwrap()
        .with_boundary(FlowBoundary::Radial(Arc::new(|t| 1e12 * t)));
    assert!(matches!(step(&state), Err(Error::BlowUp { .. })));
}

#[test]
fn reparametrization_identity_refines() {
    let coarse = ReparamConfig::new(1.0, 0.5, 0.5);
    let a = reparametrization_check(&coarse).unwrap();
    let b = reparametrization_check(&coarse.refined()).unwrap();
    assert!(refinement(a.discrepancy, b.discrepancy).certified, "{a:?} {b:?}");
    assert!((a.mcf_duration - (0.5f64.exp() - 1.0)).abs() < 1e-12);
}

#[test]
fn reparametrization_of_flat_plane_is_exact() {
    let r = reparametrization_check(&ReparamConfig::new(0.0, 0.5, 0.5)).unwrap();
    assert_eq!(r.discrepancy, 0.0);
}

#[test]
fn reparametrization_pair_is_consistent() {
    let c = ReparamConfig::new(1.0, 0.5, 0.5);
    let a = reparametrization_pair(&c, [0.5, 1.0], 0.5).unwrap();
    let b = reparametrization_pair(&c.refined(), [0.5, 1.0], 0.5).unwrap();
    for k in 0..2 {
        assert!(refinement(a.discrepancies[k], b.discrepancies[k]).certified);
    }
}

#[test]
fn h_evolution_with_negative_control() {
    let mut with = Vec::new();
    let mut without = Vec::new();
    for &(h, dt) in &[(0.05, 0.01), (0.025, 0.005)] {
        let grid = Grid1D::with_spacing(0.0, 5.0, h).unwrap();
        let p = solve_rotational(2, 1.0, 5.0, &grid).unwrap();
        let st = FlowState::radial(p, 0.5, dt, Scheme::SemiImplicit, SMode::FullPosition).unwrap();
        let tr = Trajectory::record(st, (0.4 / dt) as usize).unwrap();
        with.push(h_evolution_residual(&tr, true).unwrap().residual);
        without.push(h_evolution_residual(&tr, false).unwrap().residual);
    }
    assert!(refinement(with[0], with[1]).certified, "{with:?}");
    assert!(!refinement(without[0], without[1]).certified, "{without:?}");
    assert!(without[1] > 10.0 * with[1]);
}

#[test]
fn h_evolution_of_static_plane_vanishes() {
    let st = FlowState::radial(radial(2, 5.0, 0.05, |_| 0.0), 0.5, 0.01, Scheme::SemiImplicit, SMode::FullPosition).unwrap();
    let tr = Trajectory::record(st, 40).unwrap();
    assert_eq!(h_evolution_residual(&tr, true).unwrap().residual, 0.0);
}

#[test]
fn normalized_flow_converges_to_expander() {
    let report = normalized_convergence(&NormalizedConfig::new(1.0, 40.0, 25.0)).unwrap();
    assert!(report.certified, "{report:?}");
    assert!(report.final_error <= 1e-2);
    let mut fixed = NormalizedConfig::new(1.0, 40.0, 4.0);
    fixed.from_expander = true;
    let report = normalized_convergence(&fixed).unwrap();
    assert!(report.rows.iter().all(|r| r.error < 1e-3), "{report:?}");
    let flat = normalized_convergence(&NormalizedConfig::new(0.0, 20.0, 4.0)).unwrap();
    assert!(flat.final_error < 1e-12);
}

#[test]
fn translator_residuals() {
    let params = TranslatorParams { epsilon: 1.0, lambda: 1000.0, base_dim: 2, radius: 2.0 };
    let sol = solve_translator(&params, 201).unwrap();
    assert!(sol.residual <= 1e-8, "{}", sol.residual);
    assert!(translator_hs_residual(&sol) <= 1e-7);
    assert!(sol.profile.values.iter().all(|&v| v >= 0.0));
}

#[test]
fn translator_vanishes_with_speed() {
    let params = TranslatorParams { epsilon: 1.0, lambda: 1e-6, base_dim: 2, radius: 2.0 };
    let sol = solve_translator(&params, 201).unwrap();
    assert!(sol.profile.values.iter().all(|v| v.abs() < 1e-5));
}

/// RK4 shooting for the unweighted radial translator φ''/(1+φ'²) + (m−1)φ'/r + λ = 0.
fn bowl_oracle(m: u32, lambda: f64, radius: f64) -> f64 {
    let shoot = |a: f64| {
        let steps = 20_000;
        let r0 = 1e-5;
        let c = -lambda / m as f64;
        let (mut r, mut u, mut p) = (r0, a + 0.5 * c * r0 * r0, c * r0);
        let h = (radius - r0) / steps as f64;
        let f = |r: f64, p: f64| -(1.0 + p * p) * ((m - 1) as f64 * p / r + lambda);
        for _ in 0..steps {
            let k1 = (p, f(r, p));
            let k2 = (p + 0.5 * h * k1.1, f(r + 0.5 * h, p + 0.5 * h * k1.1));
            let k3 = (p + 0.5 * h * k2.1, f(r + 0.5 * h, p + 0.5 * h * k2.1));
            let k4 = (p + h * k3.1, f(r + h, p + h * k3.1));
            u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            r += h;
        }
        u
    };
    let (mut lo, mut hi) = (0.0, 100.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if shoot(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn unweighted_translator_matches_bowl_shooting() {
    let params = TranslatorParams { epsilon: f64::INFINITY, lambda: 1.0, base_dim: 3, radius: 1.0 };
    let sol = solve_translator(&params, 801).unwrap();
    let centre = bowl_oracle(3, 1.0, 1.0);
    assert!((sol.profile.values[0] - centre).abs() < 1e-5, "{} {centre}", sol.profile.values[0]);
    let far = solve_translator(&TranslatorParams { epsilon: 1e4, ..params }, 801).unwrap();
    assert!(sup_diff(&far.profile.values, &sol.profile.values) < 1e-6);
}

#[test]
fn arrival_time_sequence_is_cauchy() {
    let base = TranslatorParams { epsilon: 1.0, lambda: 1.0, base_dim: 2, radius: 2.0 };
    let report = arrival_time_limit(&base, &[10.0, 100.0, 1000.0], 201).unwrap();
    assert!(report.certified, "{report:?}");
    assert!(report.differences_decreasing && report.level_set_decreasing);
    let slow = solve_translator(&TranslatorParams { lambda: 0.01, ..base }, 201).unwrap();
    let limit = arrival_time_closed_form(&base, 0.0).unwrap();
    assert!((slow.arrival_time()[0] - limit).abs() > 0.1);
}

#[test]
fn arrival_time_closed_forms() {
    let p = TranslatorParams { epsilon: f64::INFINITY, lambda: 1.0, base_dim: 3, radius: 2.0 };
    assert_eq!(arrival_time_closed_form(&p, 0.0).unwrap(), 1.0);
    let q = TranslatorParams { epsilon: 1.0, base_dim: 1, ..p };
    assert!((arrival_time_closed_form(&q, 1.0).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-14);
    assert!(arrival_time_closed_form(&q, 0.0).is_err());
    assert!(TranslatorParams { lambda: 0.0, ..p }.validate().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ordered_flows_stay_ordered(k1 in 0.2f64..1.5, dk in 0.0f64..1.0, a in 0.0f64..1.0, c in 0.0f64..0.5) {
        let grid = Grid1D::with_spacing(0.0, 4.0, 0.1).unwrap();
        let low = solve_rotational(2, k1, 4.0, &grid).unwrap();
        let high = solve_rotational(2, k1 + dk, 4.0, &grid).unwrap();
        let mut lifted = high.clone();
        for (v, r) in lifted.values.iter_mut().zip(grid.nodes()) {
            *v += a * (-(r * r)).exp() + c;
        }
        let lower = FlowState::radial(low, 0.5, 0.01, Scheme::SemiImplicit, SMode::FullPosition).unwrap();
        let upper = FlowState::radial(lifted, 0.5, 0.01, Scheme::SemiImplicit, SMode::FullPosition).unwrap();
        let report = ordering_check(lower, upper, 40).unwrap();
        prop_assert!(report.certified, "{:?}", report);
    }

    #[test]
    fn time_is_nondecreasing(dt in 0.001f64..0.05) {
        let mut state = FlowState::radial(radial(2, 3.0, 0.1, |r| r), 0.5, dt, Scheme::SemiImplicit, SMode::Horizontal).unwrap();
        let mut last = state.time;
        for _ in 0..10 {
            state = step(&state).unwrap();
            prop_assert!(state.time > last);
            last = state.time;
        }
    }
}
