//! Large-`x` expansion of `∫_0^∞ e^{-xt} t^{n-1} / (a² + log² t) dt`:
//!
//! ```text
//! x^{-n} Σ_k Φ_k(a, n) (log x)^{-k-1},    Σ_k Φ_k(a, n) z^k / k! = sin(a z)/a · Γ(n + z).
//! ```
//!
//! Coefficients are held as the normalised products `c_k = Φ_k / k!` and only
//! multiplied out on request. For `n = 0` the pole of `Γ(z)` is cancelled by
//! writing `sin(a z)/a · Γ(z) = sin(a z)/(a z) · Γ(1 + z)`.
//!
//! The series diverges; [`compare`] refuses truncation orders past the
//! smallest term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::ramanujan::{eval_derivative, EvalRequest};
use crate::special::{gamma_taylor, PowerSeries, MAX_SERIES_ORDER};

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticCoefficients {
    pub a: f64,
    pub n: u32,
    normalized: Vec<f64>,
}

impl AsymptoticCoefficients {
    pub fn order(&self) -> usize {
        self.normalized.len() - 1
    }

    /// `Φ_k / k!`.
    pub fn normalized(&self, k: usize) -> f64 {
        self.normalized[k]
    }

    /// `Φ_k(a, n)`.
    pub fn phi(&self, k: usize) -> f64 {
        let fact: f64 = (2..=k).map(|j| j as f64).product();
        self.normalized[k] * fact
    }

    /// `Φ_0..Φ_K`.
    pub fn coeffs(&self) -> Vec<f64> {
        (0..=self.order()).map(|k| self.phi(k)).collect()
    }

    /// `Σ_{k≤K} Φ_k z^k / k!`, the truncated generating function.
    pub fn generating_sum(&self, z: f64) -> f64 {
        PowerSeries::new(self.normalized.clone()).eval(z)
    }
}

pub fn phi_coefficients(a: f64, n: u32, order: usize) -> Result<AsymptoticCoefficients> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain("phi_coefficients", format!("a = {a} must be positive")));
    }
    if order > MAX_SERIES_ORDER {
        return Err(Error::OrderTooLarge {
            requested: order,
            max: MAX_SERIES_ORDER,
        });
    }
    let product = if n == 0 {
        let g = gamma_taylor(1, order)?.series();
        &PowerSeries::sinc(a, order) * &g
    } else {
        let g = gamma_taylor(u64::from(n), order)?.series();
        &PowerSeries::sin_over(a, order) * &g
    };
    Ok(AsymptoticCoefficients {
        a,
        n,
        normalized: product.coeffs().to_vec(),
    })
}

/// Terms `Φ_k (log x)^{-k-1}` for `k = 0..=K` (without the `x^{-n}` factor).
fn terms(coeffs: &AsymptoticCoefficients, log_x: f64, order: usize) -> Vec<f64> {
    (0..=order)
        .map(|k| coeffs.phi(k) * log_x.powi(-(k as i32) - 1))
        .collect()
}

fn check_x(op: &'static str, x: f64) -> Result<f64> {
    if x > 1.0 && x.is_finite() {
        Ok(x.ln())
    } else {
        Err(Error::domain(op, format!("x = {x} must exceed 1")))
    }
}

/// Partial sum `x^{-n} Σ_{k≤K} Φ_k(a, n) (log x)^{-k-1}`.
pub fn eval_expansion(n: u32, x: f64, order: usize, a: f64) -> Result<f64> {
    let log_x = check_x("eval_expansion", x)?;
    let c = phi_coefficients(a, n, order)?;
    let s: f64 = terms(&c, log_x, order).iter().sum();
    Ok(x.powi(-(n as i32)) * s)
}

/// Index of the smallest nonzero term `|Φ_k| (log x)^{-k-1}`, `k ≤ 30`.
pub fn optimal_truncation(n: u32, x: f64) -> Result<usize> {
    let log_x = check_x("optimal_truncation", x)?;
    let c = phi_coefficients(std::f64::consts::PI, n, MAX_SERIES_ORDER)?;
    let t = terms(&c, log_x, MAX_SERIES_ORDER);
    Ok(t.iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(k, _)| k)
        .unwrap_or(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionComparison {
    pub n: u32,
    pub x: f64,
    pub order: usize,
    pub quadrature: f64,
    pub quadrature_error: f64,
    pub expansion: f64,
    /// `|quadrature - expansion| / |quadrature|`.
    pub rel_dev: f64,
    /// `|Φ_{K+1} term| / |expansion|`, the first omitted term relative to the sum.
    pub next_term_ratio: f64,
}

/// Direct quadrature of `(-1)^n I_R^{(n)}(x)` against the expansion truncated at `K` (a = π).
pub fn compare(n: u32, x: f64, order: usize, cfg: &QuadratureConfig) -> Result<ExpansionComparison> {
    let log_x = check_x("compare", x)?;
    let optimal = optimal_truncation(n, x)?;
    if order > optimal {
        return Err(Error::PastOptimalTruncation {
            requested: order,
            optimal,
            log_x,
        });
    }
    let c = phi_coefficients(std::f64::consts::PI, n, (order + 1).min(MAX_SERIES_ORDER))?;
    let t = terms(&c, log_x, c.order());
    let sum: f64 = t[..=order].iter().sum();
    let scale = x.powi(-(n as i32));
    let expansion = scale * sum;
    let next_term_ratio = if order < c.order() {
        (t[order + 1] / sum).abs()
    } else {
        f64::NAN
    };
    let q = eval_derivative(&EvalRequest::new(n, x, *cfg))?;
    let quadrature = q.magnitude();
    Ok(ExpansionComparison {
        n,
        x,
        order,
        quadrature,
        quadrature_error: q.abs_error,
        expansion,
        rel_dev: ((quadrature - expansion) / quadrature).abs(),
        next_term_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{digamma, gamma, EULER_GAMMA};
    use std::f64::consts::PI;

    #[test]
    fn low_coefficients_for_positive_n() {
        for n in 1..=10u32 {
            let c = phi_coefficients(PI, n, 4).unwrap();
            let g = gamma(f64::from(n)).unwrap();
            let psi = digamma(u64::from(n)).unwrap();
            assert_eq!(c.phi(0), 0.0);
            assert!(((c.phi(1) - g) / g).abs() < 1e-12);
            // second derivative of sin(πz)/π·Γ(n+z) at 0 is 2Γ'(n)
            assert!(((c.phi(2) - 2.0 * g * psi) / (g * psi)).abs() < 1e-12, "n={n}");
        }
        assert_eq!(phi_coefficients(PI, 3, 1).unwrap().phi(1), 2.0);
    }

    /// Series product (1 - (πz)²/6 + ...)(1 - γz + ...) done by hand.
    #[test]
    fn n_zero_pole_cancellation() {
        let c = phi_coefficients(PI, 0, 3).unwrap();
        assert!((c.phi(0) - 1.0).abs() < 1e-15);
        assert!((c.phi(1) + EULER_GAMMA).abs() < 1e-15);
        // c_2 = Γ''(1)/2 - π²/6 = (γ² + π²/6)/2 - π²/6
        let c2 = 0.5 * (EULER_GAMMA * EULER_GAMMA + PI * PI / 6.0) - PI * PI / 6.0;
        assert!((c.normalized(2) - c2).abs() < 1e-14);
    }

    #[test]
    fn generating_function_reconstruction() {
        let z = 0.05;
        for n in 1..=6u32 {
            let c = phi_coefficients(PI, n, 20).unwrap();
            let exact = (PI * z).sin() / PI * gamma(f64::from(n) + z).unwrap();
            assert!((c.generating_sum(z) - exact).abs() < 1e-10 * exact.abs());
        }
    }

    #[test]
    fn expansion_values() {
        let x = 10f64.exp();
        let v = eval_expansion(1, x, 1, PI).unwrap();
        assert!((v - (-10f64).exp() / 100.0).abs() < 1e-20);
        let v = eval_expansion(2, x, 2, PI).unwrap();
        let expect = (-20f64).exp() * (1.0 / 100.0 + 2.0 * (1.0 - EULER_GAMMA) / 1000.0);
        assert!(((v - expect) / expect).abs() < 1e-13);
        let c0 = phi_coefficients(PI, 0, 2).unwrap();
        let v = eval_expansion(0, 20f64.exp(), 2, PI).unwrap();
        let expect = 1.0 / 20.0 - EULER_GAMMA / 400.0 + c0.phi(2) / 8000.0;
        assert!((v - expect).abs() < 1e-15);
        assert!(eval_expansion(0, 1.0, 2, PI).is_err());
        assert!(phi_coefficients(PI, 1, 31).is_err());
        assert!(phi_coefficients(-1.0, 1, 3).is_err());
    }

    #[test]
    fn comparison_zero_order() {
        let r = compare(1, 15f64.exp(), 0, &QuadratureConfig::default()).unwrap();
        assert_eq!(r.expansion, 0.0);
        assert_eq!(r.rel_dev, 1.0);
    }

    #[test]
    fn refuses_past_smallest_term() {
        let x = 3f64.exp();
        let k = optimal_truncation(1, x).unwrap();
        assert!(matches!(
            compare(1, x, k + 1, &QuadratureConfig::default()),
            Err(Error::PastOptimalTruncation { .. })
        ));
    }
}
