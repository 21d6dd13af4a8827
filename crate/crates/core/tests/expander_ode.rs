use expanderlab::expander_ode::{
    asymptotic_fit, barrier_report, entire_limit_bounds, mean_curvature_identity_residual,
    monotonicity_identity_check, residual_j_at, solve_1d, solve_1d_full_line, solve_rotational,
    BarrierSpec, RadialProfile,
};
use expanderlab::numerics::Grid1D;
use expanderlab::Error;
use proptest::prelude::*;

fn rhs(n: u32, r: f64, u: f64, p: f64) -> f64 {
    let drift = if n > 1 { (n - 1) as f64 / r + 0.5 * r } else { 0.5 * r };
    (1.0 + p * p) * (0.5 * u - drift * p)
}

/// RK4 shooting from u(0) = a, u'(0) = 0, started off the axis with the
/// Taylor term u''(0) = a/(2n).
fn shoot(n: u32, a: f64, radius: f64, steps: usize) -> Vec<(f64, f64)> {
    let r0 = 1e-4;
    let c = a / (2.0 * n as f64);
    let (mut r, mut u, mut p) = (r0, a + 0.5 * c * r0 * r0, c * r0);
    let h = (radius - r0) / steps as f64;
    let mut out = vec![(0.0, a), (r, u)];
    for _ in 0..steps {
        let f = |r: f64, u: f64, p: f64| (p, rhs(n, r, u, p));
        let k1 = f(r, u, p);
        let k2 = f(r + 0.5 * h, u + 0.5 * h * k1.0, p + 0.5 * h * k1.1);
        let k3 = f(r + 0.5 * h, u + 0.5 * h * k2.0, p + 0.5 * h * k2.1);
        let k4 = f(r + h, u + h * k3.0, p + h * k3.1);
        u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        r += h;
        out.push((r, u));
    }
    out
}

/// Bisect on u(0) so that the shot hits κR at R.
fn shooting_oracle(n: u32, kappa: f64, radius: f64) -> Vec<(f64, f64)> {
    let (mut lo, mut hi) = (0.0, kappa * radius);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let end = shoot(n, mid, radius, 20_000).last().unwrap().1;
        if end > kappa * radius {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    shoot(n, 0.5 * (lo + hi), radius, 20_000)
}

fn solve(n: u32, kappa: f64, radius: f64, nodes: usize) -> RadialProfile {
    let grid = Grid1D::uniform(0.0, radius, nodes).unwrap();
    solve_rotational(n, kappa, radius, &grid).unwrap()
}

#[test]
fn rotational_solve_matches_shooting() {
    for &(n, kappa) in &[(3, 1.0), (5, 0.5), (2, 2.0)] {
        let radius = 6.0;
        let profile = solve(n, kappa, radius, 1201);
        let interp = profile.interpolant();
        let oracle = shooting_oracle(n, kappa, radius);
        let err = oracle
            .iter()
            .step_by(200)
            .map(|&(r, u)| (interp.eval(r) - u).abs())
            .fold(0.0, f64::max);
        assert!(err < 2e-4, "n={n} kappa={kappa}: {err:.3e}");
    }
}

#[test]
fn barrier_certificate_on_reference_cases() {
    for n in [3, 5, 7] {
        for kappa in [0.5, 1.0, 2.0] {
            let profile = solve(n, kappa, 20.0, 4000);
            let report = barrier_report(&profile);
            assert!(report.passes(1e-9, 1e-8), "n={n} kappa={kappa}: {report:?}");
        }
    }
}

#[test]
fn upper_barrier_for_surfaces() {
    let spec = BarrierSpec::new(2, 1.0);
    assert_eq!(spec.k_const, 4.0);
    let profile = solve(2, 1.0, 10.0, 2001);
    assert!(barrier_report(&profile).passes(1e-9, 1e-8));
}

#[test]
fn origin_value_exceeds_cone() {
    let profile = solve(3, 1.0, 20.0, 4001);
    assert!(profile.values[0] > 0.0);
    assert!(profile.values.windows(2).all(|w| w[1] >= w[0]));
    assert!(residual_j_at(3, &profile, 10.0).unwrap().abs() < 1e-8);
}

#[test]
fn asymptotic_constant_close_to_cone_coefficient() {
    for &(n, kappa) in &[(3, 1.0), (5, 0.5), (7, 2.0)] {
        let fit = asymptotic_fit(&solve(n, kappa, 20.0, 4000)).unwrap();
        let target = (n - 1) as f64 * kappa;
        assert!((fit.constant - target).abs() <= 0.05 * target, "n={n}: {fit:?}");
    }
}

#[test]
fn entire_limit_converges_in_radius() {
    let report = entire_limit_bounds(3, 1.0, &[5.0, 10.0, 20.0], 5e-3).unwrap();
    assert!(report.passed(), "{report:?}");
    assert!(report.differences_decreasing);
}

#[test]
fn one_dimensional_barriers() {
    for kappa in [1.0, 3.0] {
        let grid = Grid1D::uniform(0.0, 10.0, 2001).unwrap();
        let profile = solve_1d(kappa, 10.0, &grid).unwrap();
        let report = barrier_report(&profile);
        assert!(report.passes(1e-9, 1e-8), "kappa={kappa}: {report:?}");
        assert_eq!(report.barrier.tau, 2.0 * std::f64::consts::E * kappa.max(2.0));
    }
}

#[test]
fn one_dimensional_full_line_is_even_and_agrees() {
    let kappa = 1.0;
    let full = Grid1D::uniform(-10.0, 10.0, 2001).unwrap();
    let values = solve_1d_full_line(kappa, 10.0, &full).unwrap();
    let half = solve_1d(kappa, 10.0, &Grid1D::uniform(0.0, 10.0, 1001).unwrap()).unwrap();
    for i in 0..1001 {
        let mirrored = (values[1000 + i] - values[1000 - i]).abs();
        assert!(mirrored < 1e-10);
        assert!((values[1000 + i] - half.values[i]).abs() < 1e-9);
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let grid = Grid1D::uniform(0.0, 5.0, 101).unwrap();
    assert!(matches!(solve_rotational(1, 1.0, 5.0, &grid), Err(Error::Precondition(_))));
    assert!(matches!(solve_rotational(3, 0.0, 5.0, &grid), Err(Error::Precondition(_))));
    assert!(matches!(solve_rotational(3, 1.0, 6.0, &grid), Err(Error::Precondition(_))));
    assert!(matches!(solve_1d(1.0, 1.0, &Grid1D::uniform(0.0, 1.0, 11).unwrap()), Err(Error::Precondition(_))));
}

#[test]
fn mean_curvature_identity_refines() {
    let coarse = mean_curvature_identity_residual(&solve(3, 1.0, 12.0, 1201)).unwrap();
    let fine = mean_curvature_identity_residual(&solve(3, 1.0, 12.0, 2401)).unwrap();
    assert!(fine < coarse / 2.5, "{coarse:.3e} -> {fine:.3e}");
}

#[test]
fn monotonicity_identity_holds() {
    let profile = solve(3, 1.0, 12.0, 6001);
    let report = monotonicity_identity_check(&profile, &[2.0, 4.0, 8.0], 0.1).unwrap();
    assert!(report.max_mismatch <= 1e-4, "{report:?}");
    assert!(report.min_reduction >= 3.0, "{report:?}");
    // The ball of radius 2 misses the surface.
    assert_eq!(report.rows[0].cut_radius, 0.0);
    assert_eq!(report.rows[0].lhs, 0.0);
}

#[test]
fn monotonicity_rejects_balls_beyond_patch() {
    let profile = solve(3, 1.0, 6.0, 601);
    assert!(monotonicity_identity_check(&profile, &[12.0], 0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solutions_lie_above_cone_and_below_barrier(n in 2u32..8, kappa in 0.2f64..3.0) {
        let profile = solve(n, kappa, 10.0, 801);
        let report = barrier_report(&profile);
        prop_assert!(report.passes(1e-9, 1e-8), "{:?}", report);
    }

    #[test]
    fn ordered_in_slope(n in 2u32..8, k1 in 0.2f64..2.0, dk in 0.05f64..1.0) {
        let lower = solve(n, k1, 8.0, 401);
        let upper = solve(n, k1 + dk, 8.0, 401);
        for (a, b) in lower.values.iter().zip(&upper.values) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn one_dimensional_barrier_random_slope(kappa in 0.3f64..4.0) {
        let grid = Grid1D::uniform(0.0, 10.0, 801).unwrap();
        let profile = solve_1d(kappa, 10.0, &grid).unwrap();
        prop_assert!(barrier_report(&profile).passes(1e-9, 1e-8));
    }
}
