use std::f64::consts::PI;

use expanderlab::numerics::{
    gamma, integrate, newton_damped, solve_tridiagonal, sphere_volume, unit_ball_volume, FnSystem,
    NewtonOptions, Tridiagonal,
};
use expanderlab::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn gamma_examples() {
    assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-13);
    assert!(rel(gamma(1.0).unwrap(), 1.0) < 1e-13);
    let recursion = 3.5 * 2.5 * 1.5 * 0.5 * PI.sqrt();
    assert!(rel(gamma(4.5).unwrap(), recursion) < 1e-13);
    assert!((gamma(4.5).unwrap() - 11.631_728_396_6).abs() < 1e-9);
}

#[test]
fn gamma_agrees_with_independent_implementation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let x: f64 = rng.gen_range(0.01..60.0);
        let ours = gamma(x).unwrap();
        let theirs = statrs::function::gamma::gamma(x);
        assert!(rel(ours, theirs) < 1e-12, "x = {x}: {ours} vs {theirs}");
    }
}

#[test]
fn gamma_domain_error() {
    assert!(matches!(gamma(0.0), Err(Error::Domain(_))));
    assert!(matches!(gamma(-2.0), Err(Error::Domain(_))));
}

#[test]
fn ball_volume_examples() {
    assert!(rel(unit_ball_volume(2), PI) < 1e-14);
    assert!(rel(unit_ball_volume(3), 4.0 * PI / 3.0) < 1e-14);
    assert!(rel(unit_ball_volume(7), 16.0 * PI.powi(3) / 105.0) < 1e-13);
    assert!((unit_ball_volume(7) - 4.72477).abs() < 1e-5);
}

#[test]
fn sphere_volume_examples() {
    assert!(rel(sphere_volume(1, 1.0), 2.0 * PI) < 1e-14);
    assert!(rel(sphere_volume(2, 1.0), 4.0 * PI) < 1e-14);
    let v = sphere_volume(3, 0.5_f64.sqrt());
    assert!(rel(v, 2.0 * PI * PI * 2.0_f64.powf(-1.5)) < 1e-13);
    assert!((v - 6.97886).abs() < 1e-5);
}

#[test]
fn sphere_and_ball_are_consistent() {
    for n in 1..12 {
        assert!(rel(sphere_volume(n, 1.0), (n + 1) as f64 * unit_ball_volume(n + 1)) < 1e-13);
    }
}

#[test]
fn integrate_examples() {
    let g = integrate(|t: f64| (-t * t / 4.0).exp(), 0.0, f64::INFINITY, 1e-12).unwrap();
    assert!((g.value - PI.sqrt()).abs() < 1e-11);
    let p = integrate(|t| t * t, 0.0, 1.0, 1e-12).unwrap();
    assert!((p.value - 1.0 / 3.0).abs() < 1e-14);
    let m = integrate(|t: f64| t.powi(3) * (-t * t / 4.0).exp(), 0.0, f64::INFINITY, 1e-12).unwrap();
    assert!((m.value - 8.0).abs() < 1e-10);
    assert!(m.error_estimate.is_finite() && m.error_estimate >= 0.0);
}

#[test]
fn tridiagonal_examples() {
    let v = vec![1.0, -2.0, 3.5, 0.25];
    let x = solve_tridiagonal(&[0.0; 3], &[1.0; 4], &[0.0; 3], &v).unwrap();
    assert_eq!(x, v);

    // Discrete Laplacian with the boundary values of a linear function.
    let n = 50;
    let (a, b) = (1.5, -0.75);
    let h = 1.0 / (n + 1) as f64;
    let mut rhs = vec![0.0; n];
    rhs[0] = -(b);
    rhs[n - 1] = -(a + b);
    let x = solve_tridiagonal(&vec![1.0; n - 1], &vec![-2.0; n], &vec![1.0; n - 1], &rhs).unwrap();
    for (i, xi) in x.iter().enumerate() {
        let t = (i + 1) as f64 * h;
        assert!((xi - (a * t + b)).abs() < 1e-12);
    }
}

#[test]
fn tridiagonal_random_dominant_system() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100;
    let mut m = Tridiagonal::zeros(n);
    for i in 0..n {
        if i > 0 {
            m.lower[i - 1] = rng.gen_range(-1.0..1.0);
        }
        if i + 1 < n {
            m.upper[i] = rng.gen_range(-1.0..1.0);
        }
        m.diag[i] = 2.5 + rng.gen_range(0.0..1.0);
    }
    let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    let x = m.solve(&rhs).unwrap();
    let back = m.matvec(&x);
    let norm = rhs.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    for (b, r) in back.iter().zip(&rhs) {
        assert!((b - r).abs() <= 1e-12 * (norm + 1.0));
    }
}

fn scalar_system<'a>(
    f: &'a dyn Fn(f64) -> f64,
    df: &'a dyn Fn(f64) -> f64,
) -> FnSystem<impl Fn(&[f64]) -> Vec<f64> + 'a, impl Fn(&[f64], &[f64]) -> expanderlab::Result<Vec<f64>> + 'a> {
    FnSystem {
        residual: move |x: &[f64]| vec![f(x[0])],
        solve: move |x: &[f64], r: &[f64]| Ok(vec![r[0] / df(x[0])]),
    }
}

#[test]
fn newton_affine_in_one_step() {
    let c = 3.25;
    let f = move |x: f64| x - c;
    let df = |_x: f64| 1.0;
    let sys = scalar_system(&f, &df);
    let rep = newton_damped(&sys, &[0.0], &NewtonOptions::with_tol(1e-14)).unwrap();
    assert_eq!(rep.iterations, 1);
    assert!((rep.solution[0] - c).abs() < 1e-15);
}

#[test]
fn newton_square_root() {
    let f = |x: f64| x * x - 4.0;
    let df = |x: f64| 2.0 * x;
    let sys = scalar_system(&f, &df);
    let rep = newton_damped(&sys, &[3.0], &NewtonOptions::with_tol(1e-13)).unwrap();
    assert!((rep.solution[0] - 2.0).abs() < 1e-13);
    assert!(rep.residual_norm <= 1e-13);
}

#[test]
fn newton_reports_failure() {
    let f = |x: f64| x * x + 1.0;
    let df = |x: f64| 2.0 * x;
    let sys = scalar_system(&f, &df);
    let opts = NewtonOptions {
        max_iter: 5,
        ..NewtonOptions::with_tol(1e-12)
    };
    match newton_damped(&sys, &[0.5], &opts) {
        Err(Error::NoConvergence { residual, last, .. }) => {
            assert!(residual >= 1.0);
            assert_eq!(last.len(), 1);
        }
        other => panic!("expected failure, got {other:?}"),
    }
}

proptest! {
    #[test]
    fn gamma_recursion(x in 0.1f64..20.0) {
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn ball_volume_recursion(n in 3u32..40) {
        let lhs = unit_ball_volume(n);
        let rhs = 2.0 * PI / n as f64 * unit_ball_volume(n - 2);
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn cubic_quadrature_exact(c in proptest::array::uniform4(-5.0f64..5.0), a in -3.0f64..3.0, w in 0.01f64..4.0) {
        let b = a + w;
        let f = |t: f64| c[0] + c[1] * t + c[2] * t * t + c[3] * t * t * t;
        let prim = |t: f64| c[0] * t + c[1] * t * t / 2.0 + c[2] * t.powi(3) / 3.0 + c[3] * t.powi(4) / 4.0;
        let r = integrate(f, a, b, 1e-13).unwrap();
        let exact = prim(b) - prim(a);
        prop_assert!((r.value - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn tridiagonal_roundtrip(seed in 0u64..10_000, n in 2usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Tridiagonal::zeros(n);
        for i in 0..n {
            if i > 0 { m.lower[i - 1] = rng.gen_range(-1.0..1.0); }
            if i + 1 < n { m.upper[i] = rng.gen_range(-1.0..1.0); }
            m.diag[i] = rng.gen_range(2.1..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        }
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let b = m.matvec(&x);
        let y = m.solve(&b).unwrap();
        for (p, q) in x.iter().zip(&y) {
            prop_assert!((p - q).abs() < 1e-12);
        }
    }
}
