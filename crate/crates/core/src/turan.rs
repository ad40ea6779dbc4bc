//! Turán-type function `H_n(x; α) = (I_R^{(n)})² − α I_R^{(n−1)} I_R^{(n+1)}`
//! and the objects used to study its complete monotonicity.
//!
//! With `F_k = (−1)^k I_R^{(k)} > 0` one has `H_n = F_n² − α F_{n−1} F_{n+1}`
//! and `F_k' = −F_{k+1}`, so every derivative of `H_n` is an exact bilinear
//! combination of values of the ladder `F_k`:
//!
//! ```text
//! (−1)^m H^{(m)} = Σ_j C(m,j) F_{n+j} F_{n+m−j} − α Σ_j C(m,j) F_{n−1+j} F_{n+1+m−j}.
//! ```
//!
//! At `α = (n−2)/(n−1)` the function is the Laplace transform of the density
//! [`h_density`].

use std::cell::Cell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_finite, Integrand, QuadratureConfig, QuadratureResult, SingularEndpoints,
};
use crate::ramanujan::{derivative_ladder, lorentz_log, RamanujanEvaluation, PI2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuranParams {
    pub n: u32,
    pub alpha: f64,
}

impl TuranParams {
    pub fn new(n: u32, alpha: f64) -> Result<Self> {
        check_n("TuranParams", n)?;
        if !alpha.is_finite() {
            return Err(Error::domain("TuranParams", "alpha must be finite"));
        }
        Ok(Self { n, alpha })
    }
}

fn check_n(op: &'static str, n: u32) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("n = {n}, need n >= 2")))
    }
}

fn check_pos(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("{name} = {v} must be positive")))
    }
}

/// Thresholds for `α`: `H_n` is CM for `α ≤ sufficient`, and CM forces `α ≤ necessary`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBounds {
    /// `(n−1)/n`.
    pub necessary: f64,
    /// `(n−2)/(n−1)`.
    pub sufficient: f64,
}

pub fn alpha_bounds(n: u32) -> Result<AlphaBounds> {
    check_n("alpha_bounds", n)?;
    let n = f64::from(n);
    Ok(AlphaBounds {
        necessary: (n - 1.0) / n,
        sufficient: (n - 2.0) / (n - 1.0),
    })
}

/// A value with a propagated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuranValue {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
}

fn binomial(m: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * f64::from(m - i) / f64::from(i + 1))
}

fn bilinear(ladder: &[RamanujanEvaluation], base_a: u32, base_b: u32, m: u32) -> (f64, f64) {
    let mut v = 0.0;
    let mut e = 0.0;
    for j in 0..=m {
        let c = binomial(m, j);
        let a = &ladder[(base_a + j) as usize];
        let b = &ladder[(base_b + m - j) as usize];
        let (fa, fb) = (a.magnitude(), b.magnitude());
        v += c * fa * fb;
        e += c * (fa * b.abs_error + fb * a.abs_error);
    }
    (v, e)
}

fn assemble(p: &TuranParams, ladder: &[RamanujanEvaluation], m: u32) -> TuranValue {
    let (s1, e1) = bilinear(ladder, p.n, p.n, m);
    let (s2, e2) = bilinear(ladder, p.n - 1, p.n + 1, m);
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let top = (p.n + 1 + m) as usize;
    TuranValue {
        value: sign * (s1 - p.alpha * s2),
        abs_error: e1 + p.alpha.abs() * e2 + 4.0 * f64::EPSILON * (s1 + p.alpha.abs() * s2),
        converged: ladder[..=top].iter().all(|r| r.converged),
    }
}

/// `H_n(x; α)`.
#[allow(non_snake_case)]
pub fn turan_H(p: &TuranParams, x: f64, cfg: &QuadratureConfig) -> Result<TuranValue> {
    Ok(turan_derivatives(p, x, 0, cfg)?[0])
}

/// Signed derivatives `H^{(m)}(x)`, `m = 0..=max_order`.
pub fn turan_derivatives(
    p: &TuranParams,
    x: f64,
    max_order: u32,
    cfg: &QuadratureConfig,
) -> Result<Vec<TuranValue>> {
    check_n("turan_derivatives", p.n)?;
    check_pos("turan_derivatives", "x", x)?;
    let ladder = derivative_ladder(x, p.n + 1 + max_order, cfg)?;
    Ok((0..=max_order).map(|m| assemble(p, &ladder, m)).collect())
}

/// `(I_R^{(n)})² / (I_R^{(n−1)} I_R^{(n+1)})`.
pub fn cm_ratio(n: u32, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_n("cm_ratio", n)?;
    check_pos("cm_ratio", "x", x)?;
    let l = derivative_ladder(x, n + 1, cfg)?;
    let (a, b, c) = (
        l[n as usize - 1].value,
        l[n as usize].value,
        l[n as usize + 1].value,
    );
    Ok(b * b / (a * c))
}

/// `h_n(t) = (1/(n−1)) ∫_0^t φ_{n−1}(u) φ_n(t−u) ((2n−3)u − (n−2)t) du`,
/// integrated as `u = ts`:
/// `t^{2n−1}/(n−1) ∫_0^1 s^{n−2}(1−s)^{n−1} w(ts) w(t(1−s)) ((2n−3)s − (n−2)) ds`
/// with `w(t) = 1/(π² + log² t)`.
pub fn h_density(n: u32, t: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    check_n("h_density", n)?;
    check_pos("h_density", "t", t)?;
    let nf = f64::from(n);
    let f = Integrand::new(move |s: f64| {
        let r = 1.0 - s;
        s.powi(n as i32 - 2)
            * r.powi(n as i32 - 1)
            * lorentz_log(t * s)
            * lorentz_log(t * r)
            * ((2.0 * nf - 3.0) * s - (nf - 2.0))
    })
    .singular_at(SingularEndpoints::BOTH);
    let r = integrate_finite(&f, 0.0, 1.0, cfg)?;
    Ok(r.scale(t.powi(2 * n as i32 - 1) / (nf - 1.0)))
}

/// `h_n(t)` through the symmetric substitution `u = (t/2)(1+v)`:
/// `t³/(4(n−1)) (t/2)^{2(n−3)} ∫_0^1 I_1(v;t) I_2(v) dv`.
pub fn h_density_symmetric(n: u32, t: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    check_n("h_density_symmetric", n)?;
    check_pos("h_density_symmetric", "t", t)?;
    let f = Integrand::new(move |v: f64| i1_raw(v, t) * i2_raw(n, v))
        .singular_at(SingularEndpoints { lower: false, upper: true });
    let r = integrate_finite(&f, 0.0, 1.0, cfg)?;
    let half = 0.5 * t;
    let pre = t.powi(3) / (4.0 * (f64::from(n) - 1.0)) * half.powi(2 * (n as i32 - 3));
    Ok(r.scale(pre))
}

fn i1_raw(v: f64, t: f64) -> f64 {
    let a = 0.5 * t * (1.0 + v);
    let b = 0.5 * t * (1.0 - v);
    a * lorentz_log(a) * b * lorentz_log(b)
}

fn i2_raw(n: u32, v: f64) -> f64 {
    let q = 1.0 - v * v;
    q.powi(n as i32 - 3) * (1.0 - (2.0 * f64::from(n) - 3.0) * v * v)
}

fn check_v(op: &'static str, v: f64) -> Result<()> {
    if v.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("v = {v} must satisfy |v| < 1")))
    }
}

/// `I_1(v; t) = a w(a) · b w(b)`, `a = (t/2)(1+v)`, `b = (t/2)(1−v)`.
pub fn i1(v: f64, t: f64) -> Result<f64> {
    check_v("i1", v)?;
    check_pos("i1", "t", t)?;
    Ok(i1_raw(v, t))
}

/// `I_2(v) = (1−v²)^{n−3} (1 − (2n−3)v²)`.
pub fn i2(n: u32, v: f64) -> Result<f64> {
    check_n("i2", n)?;
    check_v("i2", v)?;
    Ok(i2_raw(n, v))
}

/// `∫_0^1 I_2(v) dv`, from the antiderivative `v(1−v²)^{n−2}`.
pub fn integral_i2(n: u32) -> Result<f64> {
    check_n("integral_i2", n)?;
    Ok(if n == 2 { 1.0 } else { 0.0 })
}

/// `g(x) = 1/x − 2 log x / (x (π² + log² x))`.
pub fn g(x: f64) -> Result<f64> {
    check_pos("g", "x", x)?;
    let l = x.ln();
    Ok(1.0 / x - 2.0 * l / (x * (PI2 + l * l)))
}

/// `g'(x) = −1/x² − 2 (q − L q − 2L²) / (x² q²)` with `L = log x`, `q = π² + L²`.
pub fn g_prime(x: f64) -> Result<f64> {
    check_pos("g_prime", "x", x)?;
    let l = x.ln();
    let q = PI2 + l * l;
    let x2 = x * x;
    Ok(-1.0 / x2 - 2.0 * (q - l * q - 2.0 * l * l) / (x2 * q * q))
}

/// `p(x) = L²(2π² − 4) + 2π² + (L − L²)² + (L − π²)²`, so that `g' = −p / (x² (π² + L²)²)`.
pub fn p_poly(x: f64) -> Result<f64> {
    check_pos("p_poly", "x", x)?;
    let l = x.ln();
    Ok(l * l * (2.0 * PI2 - 4.0) + 2.0 * PI2 + (l - l * l).powi(2) + (l - PI2).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceConsistency {
    pub n: u32,
    pub x: f64,
    /// `H_n(x; (n−2)/(n−1))`.
    pub lhs: f64,
    pub lhs_error: f64,
    /// `∫_0^∞ e^{−xt} h_n(t) dt`.
    pub rhs: f64,
    pub rhs_error: f64,
    pub abs_dev: f64,
}

/// Both sides of `H_n(x; (n−2)/(n−1)) = ∫_0^∞ e^{−xt} h_n(t) dt`.
///
/// The outer integral runs over `s = log(xt) ∈ [−40, log(100 + 8n)]`; each
/// integrand evaluation is one inner quadrature, so this is slow.
pub fn laplace_consistency(n: u32, x: f64, cfg: &QuadratureConfig) -> Result<LaplaceConsistency> {
    check_n("laplace_consistency", n)?;
    check_pos("laplace_consistency", "x", x)?;
    let bounds = alpha_bounds(n)?;
    let lhs = turan_H(&TuranParams::new(n, bounds.sufficient)?, x, cfg)?;

    let failure: Cell<Option<Error>> = Cell::new(None);
    let worst_rel = Cell::new(0.0f64);
    let outer = Integrand::new(|s: f64| {
        let w = s.exp();
        match h_density(n, w / x, cfg) {
            Ok(h) => {
                if h.value != 0.0 {
                    worst_rel.set(worst_rel.get().max(h.error_estimate / h.value.abs()));
                }
                (s - w).exp() * h.value / x
            }
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    });
    let hi = (100.0 + 8.0 * f64::from(n)).ln();
    let r = integrate_finite(&outer, -40.0, hi, cfg);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let r = r?;
    let rhs_error = r.error_estimate + worst_rel.get() * r.value.abs();
    Ok(LaplaceConsistency {
        n,
        x,
        lhs: lhs.value,
        lhs_error: lhs.abs_error,
        rhs: r.value,
        rhs_error,
        abs_dev: (lhs.value - r.value).abs(),
    })
}

/// One `(α, x)` cell of an α-scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaScanCell {
    pub alpha: f64,
    pub x: f64,
    /// Signed `H^{(m)}(x)`, `m = 0..=max_order`.
    pub derivatives: Vec<TuranValue>,
    /// `(−1)^m H^{(m)} > 0` for every order.
    pub alternates: bool,
    /// Every sign is resolved: `|H^{(m)}| > 10·error`.
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSummary {
    pub alpha: f64,
    /// `α` lies outside the open interval `((n−2)/(n−1), (n−1)/n)`.
    pub out_of_interval: bool,
    pub all_alternate: bool,
    pub all_resolved: bool,
    /// Smallest x where `H < 0`, if any.
    pub first_positivity_failure: Option<f64>,
}

/// Sign-pattern evidence for `H_n(·; α)`. It is not a proof of anything.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaScanReport {
    pub label: String,
    pub n: u32,
    pub max_order: u32,
    pub bounds: AlphaBounds,
    pub summaries: Vec<AlphaSummary>,
    pub cells: Vec<AlphaScanCell>,
}

pub fn scan_alpha(
    n: u32,
    alphas: &[f64],
    xs: &[f64],
    max_order: u32,
    cfg: &QuadratureConfig,
) -> Result<AlphaScanReport> {
    let bounds = alpha_bounds(n)?;
    if alphas.is_empty() || xs.is_empty() {
        return Err(Error::domain("scan_alpha", "alpha and x grids must be non-empty"));
    }
    for &x in xs {
        check_pos("scan_alpha", "x", x)?;
    }
    // The ladder does not depend on α; evaluate it once per x.
    let ladders: Vec<Vec<RamanujanEvaluation>> = xs
        .par_iter()
        .map(|&x| derivative_ladder(x, n + 1 + max_order, cfg))
        .collect::<Result<_>>()?;

    let mut cells = Vec::with_capacity(alphas.len() * xs.len());
    let mut summaries = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let p = TuranParams::new(n, alpha)?;
        let row: Vec<AlphaScanCell> = xs
            .iter()
            .zip(&ladders)
            .map(|(&x, ladder)| {
                let derivatives: Vec<TuranValue> =
                    (0..=max_order).map(|m| assemble(&p, ladder, m)).collect();
                let signed = |m: usize, d: &TuranValue| {
                    if m % 2 == 0 {
                        d.value
                    } else {
                        -d.value
                    }
                };
                let alternates = derivatives.iter().enumerate().all(|(m, d)| signed(m, d) > 0.0);
                let resolved = derivatives
                    .iter()
                    .all(|d| d.value.abs() > 10.0 * d.abs_error);
                AlphaScanCell {
                    alpha,
                    x,
                    derivatives,
                    alternates,
                    resolved,
                }
            })
            .collect();
        summaries.push(AlphaSummary {
            alpha,
            out_of_interval: !(alpha > bounds.sufficient && alpha < bounds.necessary),
            all_alternate: row.iter().all(|c| c.alternates),
            all_resolved: row.iter().all(|c| c.resolved),
            first_positivity_failure: row
                .iter()
                .filter(|c| c.derivatives[0].value < 0.0)
                .map(|c| c.x)
                .reduce(f64::min),
        });
        cells.extend(row);
    }
    Ok(AlphaScanReport {
        label: "evidence".into(),
        n,
        max_order,
        bounds,
        summaries,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::tanh_sinh;
    use crate::ramanujan::{eval_derivative, EvalRequest};

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn bounds() {
        let b = alpha_bounds(2).unwrap();
        assert_eq!((b.sufficient, b.necessary), (0.0, 0.5));
        let b = alpha_bounds(3).unwrap();
        assert_eq!((b.sufficient, b.necessary), (0.5, 2.0 / 3.0));
        let b = alpha_bounds(10).unwrap();
        assert_eq!((b.sufficient, b.necessary), (8.0 / 9.0, 0.9));
        assert!(alpha_bounds(1).is_err());
        // (n−2)/(n−1) < (n−1)/n  ⇔  n(n−2) < (n−1)²
        for n in 2u64..10_000 {
            assert!(n * (n - 2) < (n - 1) * (n - 1));
        }
    }

    #[test]
    fn h_at_zero_alpha_is_a_square() {
        for x in [0.3, 1.0, 7.0] {
            let h = turan_H(&TuranParams::new(3, 0.0).unwrap(), x, &cfg()).unwrap();
            let f = eval_derivative(&EvalRequest::new(3, x, cfg())).unwrap().value;
            assert!((h.value - f * f).abs() <= 1e-14 * f * f);
        }
    }

    #[test]
    fn h_signs() {
        let p = TuranParams::new(3, 0.5).unwrap();
        for x in [0.05, 0.5, 2.0, 20.0, 300.0] {
            let h = turan_H(&p, x, &cfg()).unwrap();
            assert!(h.value > 10.0 * h.abs_error);
        }
        for alpha in [-1.0, -0.2, 0.0] {
            let p = TuranParams::new(2, alpha).unwrap();
            for x in [0.2, 3.0] {
                let h = turan_H(&p, x, &cfg()).unwrap();
                let f = eval_derivative(&EvalRequest::new(2, x, cfg())).unwrap().value;
                assert!(h.value >= f * f * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = TuranParams::new(3, 0.55).unwrap();
        let x = 1.3;
        let d = turan_derivatives(&p, x, 2, &cfg()).unwrap();
        let step = 1e-4;
        let hp = turan_H(&p, x + step, &cfg()).unwrap().value;
        let hm = turan_H(&p, x - step, &cfg()).unwrap().value;
        let fd1 = (hp - hm) / (2.0 * step);
        let fd2 = (hp - 2.0 * d[0].value + hm) / (step * step);
        assert!(((fd1 - d[1].value) / d[1].value).abs() < 1e-6);
        assert!(((fd2 - d[2].value) / d[2].value).abs() < 1e-4);
    }

    #[test]
    fn ratio_bracketed() {
        for n in 2..=6 {
            let s = alpha_bounds(n).unwrap().sufficient;
            for x in [0.01, 0.7, 5.0, 1e3] {
                let r = cm_ratio(n, x, &cfg()).unwrap();
                assert!(r >= s && r <= 1.0, "n={n} x={x} r={r}");
            }
        }
    }

    /// `(φ_2 ∗ φ_2)(t)` by tanh-sinh directly in `u`.
    #[test]
    fn h2_is_a_self_convolution() {
        for t in [0.01, 0.4, 1.0, 3.0, 25.0] {
            let f = |u: f64| u * lorentz_log(u) * (t - u) * lorentz_log(t - u);
            let oracle = tanh_sinh(&Integrand::new(f), 0.0, t, &cfg().with_tol(1e-13)).unwrap();
            let h = h_density(2, t, &cfg()).unwrap();
            assert!((h.value - oracle.value).abs() < 1e-9 * oracle.value, "t={t}");
        }
    }

    #[test]
    fn symmetric_route_agrees() {
        for n in 2..=6 {
            for t in [0.05, 1.0, 2.0, 12.0] {
                let a = h_density(n, t, &cfg()).unwrap();
                let b = h_density_symmetric(n, t, &cfg()).unwrap();
                let scale = a.value.abs().max(a.error_estimate);
                assert!((a.value - b.value).abs() < 1e-8 * scale, "n={n} t={t}");
                assert!(a.value > 0.0);
            }
        }
    }

    #[test]
    fn h_vanishes_at_origin() {
        let a = h_density(2, 1e-8, &cfg()).unwrap().value;
        let b = h_density(2, 1e-4, &cfg()).unwrap().value;
        assert!(a < 1e-20 && a < b);
    }

    #[test]
    fn i2_values_and_signs() {
        for n in 2..=8 {
            assert_eq!(i2(n, 0.0).unwrap(), 1.0);
        }
        // at n = 2 the root sits at the excluded endpoint v = 1
        for n in 3..=8 {
            let root = (2.0 * f64::from(n) - 3.0).powf(-0.5);
            assert!(i2(n, root).unwrap().abs() < 1e-15);
        }
        for n in 3..=6 {
            let root = (2.0 * f64::from(n) - 3.0).powf(-0.5);
            for k in 1..20 {
                let v = f64::from(k) / 20.0;
                let s = i2(n, v).unwrap();
                if v < root {
                    assert!(s > 0.0);
                } else if v > root {
                    assert!(s < 0.0);
                }
            }
        }
        assert!(i2(2, 1.0).is_err());
        assert!(i1(-1.0, 1.0).is_err());
    }

    #[test]
    fn i1_decreasing_in_v() {
        for t in [0.1, 1.0, 10.0] {
            let vals: Vec<f64> = (0..50).map(|k| i1(f64::from(k) / 50.0, t).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn i2_integral_oracle() {
        for n in 2..=8 {
            let q = tanh_sinh(&Integrand::new(|v| i2_raw(n, v)), 0.0, 1.0, &cfg().with_tol(1e-14)).unwrap();
            assert!((q.value - integral_i2(n).unwrap()).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn g_lemma() {
        assert!((g(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((p_poly(1.0).unwrap() - (2.0 * PI2 + PI2 * PI2)).abs() < 1e-12);
        for x in [0.1, 1.0, 10.0, 100.0] {
            assert!(g_prime(x).unwrap() < 0.0);
        }
        for x in [0.003f64, 0.2, 1.7, 40.0, 9e3] {
            let l = x.ln();
            let q = PI2 + l * l;
            let id = -p_poly(x).unwrap() / (x * x * q * q);
            let gp = g_prime(x).unwrap();
            assert!((gp - id).abs() < 1e-13 * gp.abs());
        }
        assert!(g(0.0).is_err());
    }

    #[test]
    fn laplace_consistency_n2() {
        let r = laplace_consistency(2, 1.0, &cfg()).unwrap();
        assert!(r.abs_dev < 1e-8, "{r:?}");
        assert!(r.lhs > 0.0);
    }

    #[test]
    fn scan_labels_evidence() {
        let r = scan_alpha(3, &[0.5, 0.55, 0.99], &[0.5, 2.0, 50.0], 3, &cfg()).unwrap();
        assert_eq!(r.label, "evidence");
        assert_eq!(r.cells.len(), 9);
        assert!(r.summaries[0].out_of_interval && r.summaries[0].all_alternate);
        assert!(!r.summaries[1].out_of_interval && r.summaries[1].all_alternate);
        assert!(r.summaries[2].out_of_interval);
        assert!(r.summaries[2].first_positivity_failure.is_some());
    }
}
