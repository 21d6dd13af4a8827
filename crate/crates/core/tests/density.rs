use std::f64::consts::{E, PI, SQRT_2};

use expanderlab::density::{cone_density, entropy_dk, gaussian_density_identity, sqrt2_table, ConeSpec};
use proptest::prelude::*;
use statrs::function::gamma::{gamma, ln_gamma};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Θ(C_{k,k}) from sphere volumes evaluated with an independent gamma.
fn simons_oracle(k: u32) -> f64 {
    let kf = k as f64;
    let ln_sphere = |p: f64, r: f64| p * r.ln() + 2f64.ln() + 0.5 * (p + 1.0) * PI.ln() - ln_gamma(0.5 * (p + 1.0));
    let n = 2.0 * kf + 1.0;
    let ln_ball = 0.5 * n * PI.ln() - ln_gamma(0.5 * n + 1.0);
    (2.0 * ln_sphere(kf, 0.5f64.sqrt()) - n.ln() - ln_ball).exp()
}

fn entropy_oracle(k: u32) -> f64 {
    let kf = k as f64;
    (0.5 * kf * (kf / (2.0 * E)).ln() + (2.0 * PI.sqrt()).ln() - ln_gamma(0.5 * (kf + 1.0))).exp()
}

#[test]
fn first_entropy() {
    let d1 = entropy_dk(1).unwrap();
    assert!((d1 - 1.5203).abs() < 1e-3);
    assert!((d1 - (2.0 * PI / E).sqrt()).abs() < 1e-12);
    assert!((entropy_dk(2).unwrap() - 4.0 / E).abs() < 1e-12);
    let direct = (1.5 / E).powf(1.5) * 2.0 * PI.sqrt() / gamma(2.0);
    assert!(rel(entropy_dk(3).unwrap(), direct) < 1e-12);
}

#[test]
fn entropy_chain_and_limit() {
    let d: Vec<f64> = (1..=50).map(|k| entropy_dk(k).unwrap()).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]));
    assert!((entropy_dk(200).unwrap() - SQRT_2).abs() < 0.01);
    assert!(entropy_dk(5000).unwrap().is_finite());
}

#[test]
fn simons_densities() {
    let cases = [(1, PI / 2.0), (2, 1.5), (3, 15.0 * PI / 32.0)];
    for (k, expected) in cases {
        let theta = cone_density(&ConeSpec::simons(k)).unwrap();
        assert!((theta - expected).abs() < 1e-9, "k={k}");
        assert!(theta > SQRT_2);
        let report = gaussian_density_identity(&ConeSpec::simons(k), 1e-8).unwrap();
        assert!(report.passed, "{report:?}");
    }
}

#[test]
fn hyperplane_density_is_one() {
    for n in 1..12 {
        assert!((cone_density(&ConeSpec::Hyperplane { n }).unwrap() - 1.0).abs() < 1e-12);
        assert!(gaussian_density_identity(&ConeSpec::Hyperplane { n }, 1e-10).unwrap().passed);
    }
}

#[test]
fn rotational_density_flat_limit() {
    let flat = cone_density(&ConeSpec::Rotational { n: 4, kappa: 1e-9 }).unwrap();
    assert!((flat - 1.0).abs() < 1e-8);
    let steep = cone_density(&ConeSpec::Rotational { n: 4, kappa: 2.0 }).unwrap();
    assert!(steep < 1.0);
}

#[test]
fn sqrt2_table_certified() {
    let table = sqrt2_table(50).unwrap();
    assert!(table.certified());
    assert_eq!(table.rows.len(), 50);
    assert!((table.rows[0].simons_density - PI / 2.0).abs() < 1e-12);
    assert!((table.rows[1].entropy - 4.0 / E).abs() < 1e-12);
    assert!(sqrt2_table(2).is_err());
}

#[test]
fn invalid_specs() {
    assert!(cone_density(&ConeSpec::ProductSpheres { p: 0, q: 3 }).is_err());
    assert!(cone_density(&ConeSpec::Rotational { n: 3, kappa: -1.0 }).is_err());
    assert!(entropy_dk(0).is_err());
}

proptest! {
    #[test]
    fn simons_density_matches_oracle(k in 1u32..200) {
        prop_assert!(rel(cone_density(&ConeSpec::simons(k)).unwrap(), simons_oracle(k)) < 1e-11);
    }

    #[test]
    fn entropy_matches_oracle_and_decreases(k in 1u32..2000) {
        let d = entropy_dk(k).unwrap();
        prop_assert!(rel(d, entropy_oracle(k)) < 1e-11);
        prop_assert!(entropy_dk(k + 1).unwrap() < d && d > SQRT_2);
    }

    #[test]
    fn gaussian_identity_for_all_cones(p in 1u32..8, q in 1u32..8, n in 2u32..10, kappa in 0.0f64..5.0) {
        for spec in [ConeSpec::ProductSpheres { p, q }, ConeSpec::Rotational { n, kappa }, ConeSpec::Hyperplane { n }] {
            let report = gaussian_density_identity(&spec, 1e-8).unwrap();
            prop_assert!(report.passed, "{:?}", report);
        }
    }
}
