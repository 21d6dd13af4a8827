use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok(gamma(x + 1.0)? / x);
    }
    if x > 171.7 {
        return Ok(f64::INFINITY);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok(ln_gamma(x + 1.0)? - x.ln());
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

fn gamma_unchecked(x: f64) -> f64 {
    gamma(x).expect("positive argument")
}

/// Volume ω_n of the unit ball in R^n.
pub fn unit_ball_volume(n: u32) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    let h = n as f64 / 2.0;
    PI.powf(h) / gamma_unchecked(h + 1.0)
}

/// p-dimensional volume of the round sphere S^p of the given radius.
pub fn sphere_volume(p: u32, radius: f64) -> f64 {
    assert!(p >= 1, "sphere dimension must be positive");
    assert!(radius > 0.0, "radius must be positive");
    let h = (p as f64 + 1.0) / 2.0;
    radius.powi(p as i32) * 2.0 * PI.powf(h) / gamma_unchecked(h)
}

/// ln of [`sphere_volume`], usable in dimensions where the volume underflows.
pub fn ln_sphere_volume(p: u32, radius: f64) -> f64 {
    let h = (p as f64 + 1.0) / 2.0;
    p as f64 * radius.ln() + (2.0_f64).ln() + h * PI.ln() - ln_gamma(h).expect("positive")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_small_values() {
        assert!((gamma(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma(5.0).unwrap() - 24.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
        assert!(ln_gamma(0.0).is_err());
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.05, 0.3, 1.7, 9.25, 60.5] {
            let g = gamma(x).unwrap().ln();
            assert!((ln_gamma(x).unwrap() - g).abs() < 1e-12 * g.abs().max(1.0));
        }
    }
}
