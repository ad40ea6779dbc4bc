//! The Ramanujan integral, its derivatives and its antiderivative.
//!
//! For every order `n ≥ 0`
//!
//! ```text
//! (-1)^n I_R^{(n)}(x) = ∫_0^∞ e^{-xt} φ_n(t) dt,   φ_n(t) = t^{n-1} / (π² + log² t).
//! ```
//!
//! All integrals are computed in the logarithmic variable `w = log(x t)`:
//!
//! ```text
//! (-1)^n I_R^{(n)}(x) = x^{-n} ∫ exp(n w - e^w) / (π² + (w - log x)²) dw
//! ```
//!
//! which removes the `t = 0` singularity, decays double-exponentially on the
//! right, and keeps the quadrature in `O(1)` units for every `x`. For `n = 0`
//! the integrand only decays like `w^{-2}` on the left; the part below
//! `w = -U` is added in closed form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_finite, integrate_real_line, integrate_semi_infinite, Integrand, QuadratureConfig,
    QuadratureResult,
};

pub const PI2: f64 = PI * PI;

/// `1/(π² + log² t)`.
#[inline]
pub(crate) fn lorentz_log(t: f64) -> f64 {
    let l = t.ln();
    1.0 / (PI2 + l * l)
}

fn check_t(op: &'static str, t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("t = {t} must be positive")))
    }
}

/// `φ_n(t) = t^{n-1} / (π² + log² t)`.
pub fn density_phi(n: u32, t: f64) -> Result<f64> {
    check_t("density_phi", t)?;
    Ok(t.powi(n as i32 - 1) * lorentz_log(t))
}

/// `φ_n'(t)` by direct differentiation:
/// `t^{n-2} ((n-1)(π² + log² t) - 2 log t) / (π² + log² t)²`.
///
/// For `n = 0` this is evaluated as
/// `-((π² - 1) + (log t + 1)²) / (t² (π² + log² t)²)`, which is visibly negative.
pub fn density_phi_derivative(n: u32, t: f64) -> Result<f64> {
    check_t("density_phi_derivative", t)?;
    let l = t.ln();
    let q = PI2 + l * l;
    if n == 0 {
        let num = (PI2 - 1.0) + (l + 1.0) * (l + 1.0);
        return Ok(-num / (t * t * q * q));
    }
    let bracket = (n as f64 - 1.0) * q - 2.0 * l;
    Ok(t.powi(n as i32 - 2) * bracket / (q * q))
}

/// Derivative order, evaluation point and quadrature policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalRequest {
    pub order: u32,
    pub x: f64,
    pub cfg: QuadratureConfig,
}

impl EvalRequest {
    pub fn new(order: u32, x: f64, cfg: QuadratureConfig) -> Self {
        Self { order, x, cfg }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamanujanEvaluation {
    pub request: EvalRequest,
    /// The signed derivative `I_R^{(n)}(x)`.
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl RamanujanEvaluation {
    /// `(-1)^n I_R^{(n)}(x)`, positive for every order.
    pub fn magnitude(&self) -> f64 {
        sign(self.request.order) * self.value
    }
}

fn sign(n: u32) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_x(op: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("x = {x} must be positive and finite")))
    }
}

/// `I_R^{(n)}(x)` from its own integral representation.
pub fn eval_derivative(req: &EvalRequest) -> Result<RamanujanEvaluation> {
    check_x("eval_derivative", req.x)?;
    req.cfg.validate()?;
    let n = req.order;
    let nf = f64::from(n);
    let log_x = req.x.ln();
    let cut = req.cfg.truncation_bound;
    // Right end: s = e^w with s^{n-1} e^{-s} negligible past it.
    let s_max = 80.0 + 4.0 * nf;
    let (lo, hi) = (-cut, s_max.ln());

    let integrand = Integrand::new(move |w: f64| {
        let d = w - log_x;
        (nf * w - w.exp()).exp() / (PI2 + d * d)
    });
    let mut body = integrate_finite(&integrand, lo, hi, &req.cfg)?;

    let right_tail_bound = 2.0 * s_max.powf(nf - 1.0) * (-s_max).exp() / PI2;
    let (tail, tail_bound) = if n == 0 {
        // ∫_{-∞}^{-U} dw / (π² + (w - log x)²), with 1 - e^{-e^w} ≤ e^w.
        ((PI.atan2(cut + log_x)) / PI, (-cut).exp() / PI2)
    } else {
        (0.0, (-nf * cut).exp() / (nf * PI2))
    };
    body.value += tail;
    body.error_estimate += tail_bound + right_tail_bound;

    let scale = req.x.powi(-(n as i32));
    Ok(RamanujanEvaluation {
        request: *req,
        value: sign(n) * body.value * scale,
        abs_error: body.error_estimate * scale,
        converged: body.converged,
        evaluations: body.evaluations,
    })
}

/// `(-1)^n I_R^{(n)}(x)` for `n = 0..=max_order` at one point.
pub fn derivative_ladder(
    x: f64,
    max_order: u32,
    cfg: &QuadratureConfig,
) -> Result<Vec<RamanujanEvaluation>> {
    (0..=max_order)
        .map(|n| eval_derivative(&EvalRequest::new(n, x, *cfg)))
        .collect()
}

/// The antiderivative `Ĩ_R(x) = ∫_0^x I_R(y) dy`, normalised so `Ĩ_R(0+) = 0`.
///
/// Exchanging the order of integration gives
/// `Ĩ_R(x) = ∫_0^∞ (1 - e^{-xt}) dt / (t² (π² + log² t))`, evaluated here as
/// `x ∫ (1 - e^{-e^w}) e^{-w} / (π² + (w - log x)²) dw` with the slowly
/// decaying left tail in closed form.
pub fn eval_antiderivative(x: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    check_x("eval_antiderivative", x)?;
    cfg.validate()?;
    let log_x = x.ln();
    let cut = cfg.truncation_bound;
    let integrand = Integrand::new(move |w: f64| {
        let d = w - log_x;
        let damp = if w < -20.0 {
            // (1 - e^{-e^w}) e^{-w} = 1 - e^w/2 + e^{2w}/6 - ...
            let e = w.exp();
            1.0 - 0.5 * e + e * e / 6.0
        } else {
            -(-w.exp()).exp_m1() * (-w).exp()
        };
        damp / (PI2 + d * d)
    });
    let mut r = integrate_finite(&integrand, -cut, cut, cfg)?;
    r.value += PI.atan2(cut + log_x) / PI;
    // Left: |damp - 1| ≤ e^w / 2. Right: damp ≤ e^{-w}.
    r.error_estimate += 1.5 * (-cut).exp() / PI2;
    Ok(r.scale(x))
}

/// `∫_0^∞ (1 - e^{-xt}) dt / (t (π² + log² t))`.
///
/// This Bernstein-type transform of `φ_0` differentiates to `-I_R'(x)` and
/// equals `1 - I_R(x)`, since `I_R(0+) = ∫_0^∞ φ_0 = 1`. It is kept as an
/// independent check on the `n = 0` evaluation.
pub fn complement_representation(x: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    check_x("complement_representation", x)?;
    cfg.validate()?;
    let log_x = x.ln();
    let cut = cfg.truncation_bound;
    let hi = 80f64.ln();
    let integrand = Integrand::new(move |w: f64| {
        let d = w - log_x;
        -(-w.exp()).exp_m1() / (PI2 + d * d)
    });
    let mut r = integrate_finite(&integrand, -cut, hi, cfg)?;
    // Right tail: 1 - e^{-e^w} = 1 up to e^{-80}.
    r.value += PI.atan2(hi - log_x) / PI;
    r.error_estimate += (-cut).exp() / PI2;
    Ok(r)
}

/// Integrand of the convergence certificate, `1 / ((1 + e^u)(π² + u²))`.
pub fn certificate_integrand(u: f64) -> f64 {
    1.0 / ((1.0 + u.exp()) * (PI2 + u * u))
}

/// `∫_{-∞}^{∞} du / ((1 + e^u)(π² + u²))`, which equals 1/2.
pub fn bernstein_certificate(cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    integrate_real_line(&Integrand::new(certificate_integrand), cfg)
}

/// The same integral folded onto `(0, ∞)`:
/// `∫_0^∞ [1/(1 + e^{-u}) + 1/(1 + e^u)] / (π² + u²) du`.
pub fn bernstein_certificate_folded(cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let f = Integrand::new(|u: f64| {
        (1.0 / (1.0 + (-u).exp()) + 1.0 / (1.0 + u.exp())) / (PI2 + u * u)
    });
    integrate_semi_infinite(&f, 0.0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::EULER_GAMMA;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn magnitude(n: u32, x: f64) -> RamanujanEvaluation {
        eval_derivative(&EvalRequest::new(n, x, cfg())).unwrap()
    }

    #[test]
    fn density_values() {
        assert!((density_phi(1, 1.0).unwrap() - 1.0 / PI2).abs() < 1e-16);
        let e = std::f64::consts::E;
        assert!((density_phi(0, e).unwrap() - 1.0 / (e * (PI2 + 1.0))).abs() < 1e-16);
        assert!((density_phi(2, 1.0).unwrap() - 1.0 / PI2).abs() < 1e-16);
        assert!(density_phi(1, 0.0).is_err());
        assert!(density_phi_derivative(1, -2.0).is_err());
    }

    #[test]
    fn phi1_derivative_sign() {
        assert_eq!(density_phi_derivative(1, 1.0).unwrap(), 0.0);
        for t in [0.01, 0.1, 0.5, 0.99] {
            assert!(density_phi_derivative(1, t).unwrap() > 0.0, "t={t}");
        }
        for t in [1.01, 2.0, 10.0, 1e4] {
            assert!(density_phi_derivative(1, t).unwrap() < 0.0, "t={t}");
        }
    }

    #[test]
    fn phi0_derivative_negative_and_consistent() {
        for t in [0.1, 1.0, 10.0] {
            let d = density_phi_derivative(0, t).unwrap();
            assert!(d < 0.0);
            // the general-n bracket agrees with the dedicated n = 0 form
            let l: f64 = t.ln();
            let q = PI2 + l * l;
            let general = t.powi(-2) * (-q - 2.0 * l) / (q * q);
            assert!(((d - general) / d).abs() < 1e-14);
        }
    }

    #[test]
    fn signs_alternate() {
        for x in [0.5, 1.0, 5.0] {
            for n in 0..=8 {
                let r = magnitude(n, x);
                assert!(r.converged);
                assert!(r.magnitude() > 10.0 * r.abs_error, "n={n} x={x}: {r:?}");
            }
        }
    }

    #[test]
    fn large_x_leading_behaviour() {
        // I_R(e^20) ≈ 1/20 - γ/400 up to O(1/20³)
        let r = magnitude(0, 20f64.exp());
        let approx = 1.0 / 20.0 - EULER_GAMMA / 400.0;
        assert!((r.value - approx).abs() < 5.0 / 8000.0, "{} vs {approx}", r.value);
    }

    #[test]
    fn small_x_limit_is_one() {
        // I_R(0+) = ∫ φ_0 = 1, approached like 1/log(1/x)
        let r = magnitude(0, 1e-200);
        assert!(r.value < 1.0 && r.value > 0.99);
    }

    #[test]
    fn antiderivative_behaviour() {
        let c = cfg();
        let a1 = eval_antiderivative(1.0, &c).unwrap();
        let a2 = eval_antiderivative(2.0, &c).unwrap();
        assert!(a2.value > a1.value);
        let tiny = eval_antiderivative(1e-12, &c).unwrap().value;
        assert!(tiny > 0.0 && tiny < 1e-12);
        // central-difference oracle against I_R(1)
        let h = 1e-3;
        let fd = (eval_antiderivative(1.0 + h, &c).unwrap().value
            - eval_antiderivative(1.0 - h, &c).unwrap().value)
            / (2.0 * h);
        let ir = magnitude(0, 1.0).value;
        assert!((fd - ir).abs() < 1e-6, "{fd} vs {ir}");
    }

    #[test]
    fn complement_equals_one_minus_ir() {
        for x in [0.01, 1.0, 30.0] {
            let c = complement_representation(x, &cfg()).unwrap();
            let ir = magnitude(0, x).value;
            assert!((c.value - (1.0 - ir)).abs() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn certificate() {
        let r = bernstein_certificate(&cfg()).unwrap();
        assert!(r.converged);
        assert!((r.value - 0.5).abs() < 1e-10);
        let h = bernstein_certificate_folded(&cfg()).unwrap();
        assert!((h.value - 0.5).abs() < 1e-10);
        assert!((certificate_integrand(0.0) - 0.5 / PI2).abs() < 1e-17);
    }
}
