use expanderlab::spectral::{
    i0_closed_form, i0_family_quadrature, i0_quadrature, i0_untruncated_quadrature,
    l0_affine_exact, l0_affine_identity_residual, l0_identity_residual, l0_power_exact,
    l0_power_rhs, stability_classify, ClosureEta, ConeEigendata, SpectralParams, Stability,
};
use expanderlab::Error;
use proptest::prelude::*;
use statrs::function::gamma::gamma;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn closed_form_oracle(n: u32, lambda1: f64, eps: f64) -> f64 {
    let a = eps + 1.0 - n as f64 / 2.0;
    2f64.powf(2.0 * eps - 1.0)
        * ((lambda1 + a * a) * gamma(eps)
            + 2.0 * (n as f64 - 1.0 - 2.0 * eps) * gamma(1.0 + eps)
            + 4.0 * gamma(2.0 + eps))
}

/// Composite Simpson rule with many panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

const CASES: [(u32, f64, f64); 3] = [(3, -0.25, 0.05), (5, -2.25, 0.1), (7, -6.0, 0.2)];

#[test]
fn closed_form_matches_gamma_oracle_on_reference_cases() {
    for (n, l, e) in CASES {
        assert!(rel(i0_closed_form(n, l, e).unwrap(), closed_form_oracle(n, l, e)) < 1e-12);
    }
}

#[test]
fn untruncated_quadrature_matches_closed_form() {
    for (n, l, e) in CASES {
        let q = i0_untruncated_quadrature(n, l, e, 1e-12).unwrap();
        assert!(rel(q, i0_closed_form(n, l, e).unwrap()) < 1e-8, "n={n}");
    }
}

#[test]
fn truncation_gap_shrinks_with_cutoff() {
    let (n, l, e) = CASES[2];
    let exact = i0_closed_form(n, l, e).unwrap();
    let gaps: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&delta| {
            let p = SpectralParams { n, lambda1: l, eps: e, delta, radius: 30.0 };
            rel(i0_family_quadrature(&p, 1e-10).unwrap().value, exact)
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn quadrature_of_smooth_bump_matches_simpson() {
    let f = |t: f64| if t > 1.0 && t < 3.0 { ((t - 1.0) * (3.0 - t)).powi(3) } else { 0.0 };
    let df = |t: f64| {
        if t > 1.0 && t < 3.0 {
            let g = (t - 1.0) * (3.0 - t);
            3.0 * g * g * (4.0 - 2.0 * t)
        } else {
            0.0
        }
    };
    let (n, l) = (5, -1.5);
    let eta = ClosureEta { f, df, support: (1.0, 3.0) };
    let ours = i0_quadrature(n, l, &eta, 1e-12).unwrap().value;
    let integrand = |t: f64| {
        (l * f(t).powi(2) + 0.5 * t * t * f(t).powi(2) + t * t * df(t).powi(2))
            * t.powi(n as i32 - 3)
            * (0.25 * t * t).exp()
    };
    let oracle = simpson(integrand, 1.0, 3.0, 20_000);
    assert!(rel(ours, oracle) < 1e-10, "{ours} vs {oracle}");
}

#[test]
fn closed_form_positive_at_stability_threshold() {
    // At λ₁ = −(n−2)²/4 the value is still positive for small ε.
    for n in [3u32, 5, 7] {
        let l = -((n as f64 - 2.0).powi(2)) / 4.0;
        assert!(i0_closed_form(n, l, 1e-3).unwrap() > 0.0);
    }
}

#[test]
fn invalid_parameters() {
    assert!(matches!(i0_closed_form(3, 0.0, 0.0), Err(Error::Precondition(_))));
    let p = SpectralParams { n: 2, lambda1: 0.0, eps: 0.1, delta: 1e-3, radius: 30.0 };
    assert!(i0_family_quadrature(&p, 1e-8).is_err());
    let p = SpectralParams { n: 3, lambda1: 0.0, eps: 0.1, delta: 2.0, radius: 30.0 };
    assert!(i0_family_quadrature(&p, 1e-8).is_err());
}

#[test]
fn simons_classification_flips_at_three() {
    assert_eq!(stability_classify(&ConeEigendata::simons(1)), Stability::Unstable);
    assert_eq!(stability_classify(&ConeEigendata::simons(2)), Stability::Unstable);
    for k in 3..10 {
        assert_eq!(stability_classify(&ConeEigendata::simons(k)), Stability::Stable, "k={k}");
    }
    let c = ConeEigendata::product_spheres(1, 5);
    assert_eq!((c.n, c.lambda1, c.a_sq), (7, -6.0, 6.0));
    assert!(c.validate_constant_curvature().is_ok());
    assert!(ConeEigendata::new(5, -1.0, 4.0).validate_constant_curvature().is_err());
}

#[test]
fn classification_agrees_with_closed_form_sign() {
    for n in 3u32..9 {
        for i in 0..20 {
            let l = -((n as f64 - 2.0).powi(2)) / 4.0 - 0.05 - 0.3 * i as f64;
            let data = ConeEigendata::new(n, l, -l);
            assert_eq!(stability_classify(&data), Stability::Unstable);
            assert!(i0_closed_form(n, l, 1e-3).unwrap() < 0.0, "n={n} l={l}");
        }
    }
}

#[test]
fn l0_power_identity_is_second_order() {
    for &(n, tau, r) in &[(3, 0.5, 2.0), (5, 1.0, 3.0), (7, -1.0, 1.5), (4, 2.5, 4.0)] {
        let a = l0_identity_residual(n, tau, r, 1e-3).relative;
        let b = l0_identity_residual(n, tau, r, 5e-4).relative;
        assert!((a / b).log2() >= 1.9, "n={n}: {a:.3e} {b:.3e}");
        assert!(rel(l0_power_exact(n, tau, r), l0_power_rhs(n, tau, r)) < 1e-10);
    }
}

#[test]
fn l0_affine_identity_example_and_linearity() {
    let r = l0_affine_identity_residual(3, 1.0, 1.0, 4.0, 1e-3);
    assert!(r.relative <= 1e-6, "{r:?}");
    let zero = l0_affine_identity_residual(3, 0.0, 1.0, 4.0, 1e-3);
    assert_eq!((zero.discrete, zero.closed_form), (0.0, 0.0));
    let a = l0_affine_identity_residual(3, 1.0, 1.0, 4.0, 1e-3).relative;
    let b = l0_affine_identity_residual(3, 7.0, 1.0, 4.0, 1e-3).relative;
    assert!((a - b).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_oracle(n in 3u32..12, l in -20.0f64..5.0, e in 0.01f64..0.99) {
        prop_assert!(rel(i0_closed_form(n, l, e).unwrap(), closed_form_oracle(n, l, e)) < 1e-11);
    }

    #[test]
    fn nonnegative_eigenvalue_gives_positive_value(n in 3u32..12, l in 0.0f64..10.0, e in 0.001f64..0.999) {
        prop_assert!(i0_closed_form(n, l, e).unwrap() > 0.0);
    }

    #[test]
    fn unstable_region_diverges_downward(n in 3u32..12, gap in 0.2f64..5.0) {
        let l = -((n as f64 - 2.0).powi(2)) / 4.0 - gap;
        let small = i0_closed_form(n, l, 1e-3).unwrap();
        let larger = i0_closed_form(n, l, 1e-2).unwrap();
        prop_assert!(small < larger && larger < 0.0, "{} {}", small, larger);
    }

    #[test]
    fn unstable_region_near_threshold(n in 3u32..12, gap in 1e-4f64..0.2) {
        let l = -((n as f64 - 2.0).powi(2)) / 4.0 - gap;
        let e = gap / (10.0 * n as f64);
        let small = i0_closed_form(n, l, 0.1 * e).unwrap();
        let larger = i0_closed_form(n, l, e).unwrap();
        prop_assert!(small < larger && larger < 0.0, "{} {}", small, larger);
    }

    #[test]
    fn l0_identities_converge_at_second_order(n in 3u32..9, tau in -2.0f64..3.0, s in -1.0f64..2.0, r in 1.0f64..5.0) {
        let a = l0_identity_residual(n, tau, r, 1e-3).relative;
        let b = l0_identity_residual(n, tau, r, 5e-4).relative;
        prop_assert!((a / b).log2() >= 1.9);
        let c = l0_affine_identity_residual(n, 1.0, s, r, 1e-3);
        let d = l0_affine_identity_residual(n, 1.0, s, r, 5e-4);
        prop_assert!((c.relative / d.relative).log2() >= 1.9 || c.relative < 1e-12);
        prop_assert!((l0_affine_exact(n, 1.0, s, r) - c.closed_form).abs() <= 1e-9 * c.closed_form.abs().max(1e-300) + 1e-30);
    }
}
