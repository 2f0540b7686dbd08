use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{Probability, check_odd_size};

/// `ln C(n, r)`.
fn ln_choose(n: u64, r: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(r as f64 + 1.0) - libm::lgamma((n - r) as f64 + 1.0)
}

fn xlogy(x: u64, y: f64) -> f64 {
    if x == 0 { 0.0 } else { x as f64 * y.ln() }
}

/// Derivative of the `n`-voter majority reliability with respect to ε,
/// i.e. the (scaled) probability that a single voter is pivotal:
/// `n · C(n-1, m-1) · ε^(m-1) · (1-ε)^(n-m)` with `m = (n+1)/2`.
pub fn pivotal_derivative(n_voters: u64, epsilon: Probability) -> Result<f64> {
    check_odd_size(n_voters)?;
    let half = (n_voters - 1) / 2;
    let eps = epsilon.value();
    let ln = (n_voters as f64).ln()
        + ln_choose(n_voters - 1, half)
        + xlogy(half, eps)
        + xlogy(half, 1.0 - eps);
    Ok(ln.exp())
}

/// Slope at ε = 0.5 of an `n_layers`-level tree of `k`-sized groups. Since
/// 0.5 is a fixed point, the chain rule turns it into a plain power.
pub fn hier_slope_at_half(k: u64, n_layers: u32) -> Result<f64> {
    Ok(pivotal_derivative(k, Probability::HALF)?.powi(n_layers as i32))
}

/// Slope at ε = 0.5 of direct majority voting among `n_voters`.
pub fn direct_slope_at_half(n_voters: u64) -> Result<f64> {
    pivotal_derivative(n_voters, Probability::HALF)
}

/// Large-group approximation `2(k'+3)/√(π k')` of the slope at 0.5 for a
/// group of `2k' + 1` voters.
pub fn asymptotic_slope(k_prime: f64) -> Result<f64> {
    if !(k_prime > 0.0) || !k_prime.is_finite() {
        return Err(Error::NonPositive(k_prime));
    }
    Ok(2.0 * (k_prime + 3.0) / (PI * k_prime).sqrt())
}

/// Slope at 0.5 of `l` groups of `k` voters.
pub fn two_tier_slope_product(k: u64, l: u64) -> Result<f64> {
    Ok(pivotal_derivative(k, Probability::HALF)? * pivotal_derivative(l, Probability::HALF)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reliability::{binomial_tail, two_tier};

    fn p(x: f64) -> Probability {
        Probability::new(x).unwrap()
    }

    fn central_difference(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-6;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn derivative_examples() {
        for eps in [0.0, 0.2, 0.5, 1.0] {
            assert!((pivotal_derivative(1, p(eps)).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((pivotal_derivative(3, p(0.5)).unwrap() - 1.5).abs() < 1e-13);
        assert!((pivotal_derivative(5, p(0.5)).unwrap() - 1.875).abs() < 1e-13);
        assert_eq!(pivotal_derivative(3, p(0.0)).unwrap(), 0.0);
        assert_eq!(pivotal_derivative(6, p(0.5)), Err(Error::EvenGroupSize(6)));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for n in (1..=101u64).step_by(2) {
            for eps in [0.3, 0.5, 0.7] {
                let fd = central_difference(|e| binomial_tail(n, p(e)).unwrap().value(), eps);
                let exact = pivotal_derivative(n, p(eps)).unwrap();
                assert!(
                    (fd - exact).abs() < 1e-5,
                    "n={n} eps={eps}: {fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn slope_examples() {
        assert!((hier_slope_at_half(3, 1).unwrap() - 1.5).abs() < 1e-13);
        assert!((hier_slope_at_half(3, 2).unwrap() - 2.25).abs() < 1e-12);
        assert!((direct_slope_at_half(3).unwrap() - 1.5).abs() < 1e-13);
        assert!(direct_slope_at_half(9).unwrap() > 2.25);
        assert!(direct_slope_at_half(243).unwrap() > hier_slope_at_half(3, 5).unwrap());
        for k in [3u64, 5, 11, 45] {
            assert_eq!(
                hier_slope_at_half(k, 1).unwrap(),
                direct_slope_at_half(k).unwrap()
            );
        }
    }

    #[test]
    fn asymptotic_examples() {
        let v = asymptotic_slope(100.0).unwrap();
        assert!((v - 206.0 / (100.0 * PI).sqrt()).abs() < 1e-12);
        assert!((v - 11.623).abs() < 1e-3);
        let exact = pivotal_derivative(2001, p(0.5)).unwrap();
        let approx = asymptotic_slope(1000.0).unwrap();
        assert!(((approx - exact) / exact).abs() < 0.01);
        assert!((asymptotic_slope(1.0).unwrap() - 8.0 / PI.sqrt()).abs() < 1e-12);
        assert_eq!(asymptotic_slope(0.0), Err(Error::NonPositive(0.0)));
    }

    #[test]
    fn slope_product_examples() {
        assert_eq!(
            two_tier_slope_product(3, 5).unwrap(),
            two_tier_slope_product(5, 3).unwrap()
        );
        assert!((two_tier_slope_product(3, 3).unwrap() - 2.25).abs() < 1e-12);
        assert!(two_tier_slope_product(45, 45).unwrap() < two_tier_slope_product(25, 81).unwrap());
    }

    #[test]
    fn slope_product_matches_finite_difference() {
        for k in (3..=31u64).step_by(2) {
            for l in (3..=31u64).step_by(2) {
                let fd = central_difference(|e| two_tier(k, l, p(e)).unwrap().value(), 0.5);
                let exact = two_tier_slope_product(k, l).unwrap();
                assert!((fd - exact).abs() < 1e-5, "k={k} l={l}");
            }
        }
    }
}
