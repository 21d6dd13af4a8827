//! Three-point finite-difference weights on possibly nonuniform spacing.
//! `hm` is the distance to the left neighbour and `hp` to the right one.

/// Weights (left, centre, right) of the second-order first derivative.
#[inline]
pub fn first_weights(hm: f64, hp: f64) -> [f64; 3] {
    let d = hm * hp * (hm + hp);
    [-hp * hp / d, (hp * hp - hm * hm) / d, hm * hm / d]
}

/// Weights (left, centre, right) of the second derivative.
#[inline]
pub fn second_weights(hm: f64, hp: f64) -> [f64; 3] {
    let d = hm * hp * (hm + hp);
    [2.0 * hp / d, -2.0 * (hm + hp) / d, 2.0 * hm / d]
}

#[inline]
pub fn apply(w: [f64; 3], um: f64, u0: f64, up: f64) -> f64 {
    w[0] * um + w[1] * u0 + w[2] * up
}

/// Derivative at every node: central inside, one-sided second order at the
/// two ends.
pub fn derivative(x: &[f64], u: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 3 && u.len() == n);
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let w = first_weights(x[i] - x[i - 1], x[i + 1] - x[i]);
        d[i] = apply(w, u[i - 1], u[i], u[i + 1]);
    }
    d[0] = one_sided_start(x[1] - x[0], x[2] - x[1], u[0], u[1], u[2]);
    d[n - 1] = -one_sided_start(
        x[n - 1] - x[n - 2],
        x[n - 2] - x[n - 3],
        u[n - 1],
        u[n - 2],
        u[n - 3],
    );
    d
}

fn one_sided_start(h1: f64, h2: f64, u0: f64, u1: f64, u2: f64) -> f64 {
    let s = h1 + h2;
    -(2.0 * h1 + h2) / (h1 * s) * u0 + s / (h1 * h2) * u1 - h1 / (h2 * s) * u2
}

/// Second derivative at interior nodes; the end values copy their
/// neighbours and are only placeholders.
pub fn second_derivative(x: &[f64], u: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 3 && u.len() == n);
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let w = second_weights(x[i] - x[i - 1], x[i + 1] - x[i]);
        d[i] = apply(w, u[i - 1], u[i], u[i + 1]);
    }
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quadratics() {
        let x = [0.0, 0.3, 0.7, 1.6, 2.0];
        let u: Vec<f64> = x.iter().map(|t| 2.0 * t * t - t + 1.0).collect();
        let d = derivative(&x, &u);
        let dd = second_derivative(&x, &u);
        for i in 0..x.len() {
            assert!((d[i] - (4.0 * x[i] - 1.0)).abs() < 1e-12);
        }
        for v in &dd[1..4] {
            assert!((v - 4.0).abs() < 1e-12);
        }
    }
}
