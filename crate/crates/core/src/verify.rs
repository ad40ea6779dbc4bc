//! Declarative inequality checks over grids.
//!
//! A suite is a list of [`CheckConfig`] entries, read from TOML. Each entry
//! is resolved into a [`CheckSpec`] with explicit points, evaluated into a
//! [`CheckResult`], and the results are gathered into a [`Report`].
//!
//! Every check reduces to comparisons `lhs ≤ rhs` (or `lhs < rhs`):
//!
//! - non-strict: violated when `lhs − rhs > tol·max(|lhs|, |rhs|) + 10·err`;
//! - strict: violated unless `rhs − lhs > 10·err` and `rhs > lhs`.
//!
//! `err` is the propagated quadrature error of the two sides. A check may be
//! declared `expect = "fail"`, in which case the suite treats the presence of
//! violations as the expected outcome.
//!
//! Report exit codes: 0 when every expectation is met, 1 when some
//! expectation is not, 2 when any evaluation failed numerically (a quadrature
//! error or a non-converged integral). Numerical failure wins over 1.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::ramanujan::{derivative_ladder, eval_derivative, EvalRequest, RamanujanEvaluation, PI2};
use crate::special::{PowerSeries, MAX_SERIES_ORDER};
use crate::turan::{
    alpha_bounds, g, g_prime, h_density, laplace_consistency, p_poly, turan_derivatives,
    TuranParams,
};

/// Version of the report layout (JSON keys and CSV columns).
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// CSV header, one row per comparison.
pub const CSV_HEADER: &str = "check,kind,expect,point,order,lhs,rhs,error,margin,violated";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `(−1)^m I_R^{(m)}(x) > 0`.
    CompleteMonotonicity,
    /// `F_n(αx + (1−α)y) ≤ F_n(x)^α F_n(y)^{1−α}` with `F_n = (−1)^n I_R^{(n)}`.
    LogConvexity,
    /// `F_n(x+1)² ≤ F_n(x) F_n(x+2)`.
    TuranShifted,
    /// `x^{m+1} F_{n+m}(x)` positive and strictly decreasing along the grid.
    StrongCm,
    /// Additive and scaling inequalities, direction chosen by the parity of `n`.
    SuperadditiveStarshaped,
    /// `(−1)^k φ_0^{(k)}(t) > 0`.
    DensityCmEvidence,
    /// `F_n² / (F_{n−1} F_{n+1}) ≥ (n−2)/(n−1)`.
    CorollaryRatio,
    /// `h_n(t) ≥ 0`.
    HNonnegative,
    /// `|H_n(x; (n−2)/(n−1)) − ∫ e^{−xt} h_n(t) dt| ≤ max_abs_dev`.
    LaplaceConsistency,
    /// `g' < 0`, `p > 0`, and `g'` against central differences of `g`.
    GLemma,
    /// `(−1)^m H_n^{(m)}(x; α) > 0`.
    TuranCm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    #[default]
    Hold,
    Fail,
}

/// Points on a line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Points(Vec<f64>),
    Log { log: [f64; 2], count: usize },
    Linear { linear: [f64; 2], count: usize },
    Uniform { uniform: [f64; 2], count: usize, seed: u64 },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Points(Vec::new())
    }
}

impl GridSpec {
    pub fn resolve(&self) -> Result<Vec<f64>> {
        let spaced = |a: f64, b: f64, count: usize, log: bool| -> Result<Vec<f64>> {
            if log && !(a > 0.0 && b > 0.0) {
                return Err(Error::InvalidCheck("log grid bounds must be positive".into()));
            }
            let (a, b) = if log { (a.ln(), b.ln()) } else { (a, b) };
            Ok((0..count)
                .map(|i| {
                    let s = if count == 1 {
                        a
                    } else {
                        a + (b - a) * i as f64 / (count - 1) as f64
                    };
                    if log {
                        s.exp()
                    } else {
                        s
                    }
                })
                .collect())
        };
        match self {
            GridSpec::Points(p) => Ok(p.clone()),
            GridSpec::Log { log, count } => spaced(log[0], log[1], *count, true),
            GridSpec::Linear { linear, count } => spaced(linear[0], linear[1], *count, false),
            GridSpec::Uniform {
                uniform,
                count,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..*count)
                    .map(|_| rng.gen_range(uniform[0]..uniform[1]))
                    .collect())
            }
        }
    }
}

/// Pairs of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairSpec {
    Points(Vec<[f64; 2]>),
    /// Log-uniform pairs in `[lo, hi]²`.
    Random {
        random: [f64; 2],
        count: usize,
        seed: u64,
    },
}

impl Default for PairSpec {
    fn default() -> Self {
        PairSpec::Points(Vec::new())
    }
}

impl PairSpec {
    pub fn resolve(&self) -> Result<Vec<[f64; 2]>> {
        match self {
            PairSpec::Points(p) => Ok(p.clone()),
            PairSpec::Random {
                random,
                count,
                seed,
            } => {
                let [lo, hi] = *random;
                if !(lo > 0.0 && hi > lo) {
                    return Err(Error::InvalidCheck("random pair bounds need 0 < lo < hi".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let (a, b) = (lo.ln(), hi.ln());
                Ok((0..*count)
                    .map(|_| [rng.gen_range(a..b).exp(), rng.gen_range(a..b).exp()])
                    .collect())
            }
        }
    }
}

/// One check as written in a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub name: String,
    pub kind: CheckKind,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub pairs: PairSpec,
    #[serde(default)]
    pub betas: GridSpec,
    #[serde(default)]
    pub orders: Vec<u32>,
    pub tolerance: f64,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub expect: Expectation,
    #[serde(default = "enabled")]
    pub enabled: bool,
}

fn enabled() -> bool {
    true
}

/// A check with every point spelled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub name: String,
    pub kind: CheckKind,
    pub grid: Vec<f64>,
    pub pairs: Vec<[f64; 2]>,
    pub betas: Vec<f64>,
    pub orders: Vec<u32>,
    pub tolerance: f64,
    pub parameters: BTreeMap<String, f64>,
    pub expect: Expectation,
}

impl CheckConfig {
    pub fn resolve(&self) -> Result<CheckSpec> {
        let spec = CheckSpec {
            name: self.name.clone(),
            kind: self.kind,
            grid: self.grid.resolve()?,
            pairs: self.pairs.resolve()?,
            betas: self.betas.resolve()?,
            orders: self.orders.clone(),
            tolerance: self.tolerance,
            parameters: self.parameters.clone(),
            expect: self.expect,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl CheckSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidCheck(format!("{}: {msg}", self.name)));
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad("tolerance must be positive");
        }
        let needs_pairs = matches!(
            self.kind,
            CheckKind::LogConvexity | CheckKind::SuperadditiveStarshaped
        );
        if needs_pairs {
            if self.pairs.is_empty() {
                return bad("pair list is empty");
            }
            if self.pairs.iter().flatten().any(|&v| !(v > 0.0 && v.is_finite())) {
                return bad("pair entries must be positive");
            }
        } else {
            if self.grid.is_empty() {
                return bad("grid is empty");
            }
            if self.kind != CheckKind::GLemma && self.grid.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return bad("grid points must be positive");
            }
        }
        let needs_orders = matches!(
            self.kind,
            CheckKind::CompleteMonotonicity
                | CheckKind::StrongCm
                | CheckKind::DensityCmEvidence
                | CheckKind::TuranCm
        );
        if needs_orders && self.orders.is_empty() {
            return bad("order list is empty");
        }
        if self.kind == CheckKind::DensityCmEvidence
            && self.orders.iter().any(|&k| k as usize > MAX_SERIES_ORDER)
        {
            return bad("density orders are limited to the series order");
        }
        if self.kind == CheckKind::SuperadditiveStarshaped {
            if self.betas.len() > self.pairs.len() {
                return bad("need one pair per beta");
            }
            if self.betas.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
                return bad("betas must lie in (0, 1)");
            }
        }
        if self.kind == CheckKind::LogConvexity {
            let a = self.param("alpha")?;
            if !(a > 0.0 && a < 1.0) {
                return bad("alpha must lie in (0, 1)");
            }
        }
        Ok(())
    }

    fn param(&self, key: &str) -> Result<f64> {
        self.parameters
            .get(key)
            .copied()
            .ok_or_else(|| Error::InvalidCheck(format!("{}: missing parameter `{key}`", self.name)))
    }

    fn param_or(&self, key: &str, default: f64) -> f64 {
        self.parameters.get(key).copied().unwrap_or(default)
    }

    fn order_param(&self, key: &str) -> Result<u32> {
        let v = self.param(key)?;
        if v >= 0.0 && v.fract() == 0.0 && v <= 64.0 {
            Ok(v as u32)
        } else {
            Err(Error::InvalidCheck(format!(
                "{}: `{key}` must be a small non-negative integer",
                self.name
            )))
        }
    }

    fn inverted(&self) -> bool {
        self.param_or("invert", 0.0) != 0.0
    }
}

/// One evaluated comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub point: String,
    pub order: Option<u32>,
    pub lhs: f64,
    pub rhs: f64,
    pub error: f64,
    pub strict: bool,
    /// `(rhs − lhs) / max(|lhs|, |rhs|)`; positive when the inequality holds.
    pub margin: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub point: String,
    pub order: Option<u32>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub spec: CheckSpec,
    /// No comparison was violated.
    pub passed: bool,
    /// `passed` agrees with `spec.expect`.
    pub expectation_met: bool,
    pub violations: Vec<Violation>,
    pub worst_margin: f64,
    /// Comparisons whose gap `|rhs − lhs|` is within 10× the error estimate.
    pub unresolved: usize,
    pub numerical_failures: Vec<String>,
    pub records: Vec<PointRecord>,
    pub notes: String,
}

struct Cmp {
    point: String,
    order: Option<u32>,
    lhs: f64,
    rhs: f64,
    error: f64,
    strict: bool,
}

impl Cmp {
    fn le(point: String, order: Option<u32>, lhs: f64, rhs: f64, error: f64) -> Self {
        Self {
            point,
            order,
            lhs,
            rhs,
            error,
            strict: false,
        }
    }

    fn lt(point: String, order: Option<u32>, lhs: f64, rhs: f64, error: f64) -> Self {
        Self {
            strict: true,
            ..Self::le(point, order, lhs, rhs, error)
        }
    }

    fn record(self, tol: f64, invert: bool) -> PointRecord {
        let (lhs, rhs) = if invert {
            (self.rhs, self.lhs)
        } else {
            (self.lhs, self.rhs)
        };
        let scale = lhs.abs().max(rhs.abs());
        let gap = rhs - lhs;
        let violated = if self.strict {
            !(gap > 10.0 * self.error && gap > 0.0)
        } else {
            -gap > tol * scale + 10.0 * self.error || gap.is_nan()
        };
        PointRecord {
            point: self.point,
            order: self.order,
            lhs,
            rhs,
            error: self.error,
            strict: self.strict,
            margin: if scale > 0.0 { gap / scale } else { 0.0 },
            violated,
        }
    }
}

/// Comparisons and numerical failures gathered by one check.
#[derive(Default)]
struct Outcome {
    cmps: Vec<Cmp>,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn merge(&mut self, other: Outcome) {
        self.cmps.extend(other.cmps);
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }

    fn fail(point: String, e: impl std::fmt::Display) -> Self {
        Outcome {
            failures: vec![format!("{point}: {e}")],
            ..Default::default()
        }
    }
}

fn gather(parts: Vec<Outcome>) -> Outcome {
    let mut out = Outcome::default();
    for p in parts {
        out.merge(p);
    }
    out
}

fn fmt_pt(name: &str, v: f64) -> String {
    format!("{name}={v:e}")
}

/// Ladder `F_0..F_top` at `x`, or a failure record when an entry did not converge.
fn ladder(x: f64, top: u32, cfg: &QuadratureConfig) -> std::result::Result<Vec<RamanujanEvaluation>, String> {
    let l = derivative_ladder(x, top, cfg).map_err(|e| e.to_string())?;
    if let Some(bad) = l.iter().find(|r| !r.converged) {
        return Err(format!("order {} did not converge", bad.request.order));
    }
    Ok(l)
}

fn magnitude(n: u32, x: f64, cfg: &QuadratureConfig) -> std::result::Result<(f64, f64), String> {
    let r = eval_derivative(&EvalRequest::new(n, x, *cfg)).map_err(|e| e.to_string())?;
    if !r.converged {
        return Err("did not converge".into());
    }
    Ok((r.magnitude(), r.abs_error))
}

fn signed(n: u32, x: f64, cfg: &QuadratureConfig) -> std::result::Result<(f64, f64), String> {
    let (m, e) = magnitude(n, x, cfg)?;
    Ok((if n % 2 == 0 { m } else { -m }, e))
}

fn check_complete_monotonicity(spec: &CheckSpec, cfg: &QuadratureConfig) -> Outcome {
    let top = *spec.orders.iter().max().unwrap_or(&0);
    gather(
        spec.grid
            .par_iter()
            .map(|&x| match ladder(x, top, cfg) {
                Ok(l) => Outcome {
                    cmps: spec
                        .orders
                        .iter()
                        .map(|&m| {
                            let r = &l[m as usize];
                            Cmp::lt(fmt_pt("x", x), Some(m), 0.0, r.magnitude(), r.abs_error)
                        })
                        .collect(),
                    ..Default::default()
                },
                Err(e) => Outcome::fail(fmt_pt("x", x), e),
            })
            .collect(),
    )
}

fn check_log_convexity(spec: &CheckSpec, cfg: &QuadratureConfig) -> Result<Outcome> {
    let n = spec.order_param("n")?;
    let a = spec.param("alpha")?;
    Ok(gather(
        spec.pairs
            .par_iter()
            .map(|&[x, y]| {
                let label = format!("x={x:e};y={y:e}");
                let z = a * x + (1.0 - a) * y;
                let run = || -> std::result::Result<Cmp, String> {
                    let (fz, ez) = magnitude(n, z, cfg)?;
                    let (fx, ex) = magnitude(n, x, cfg)?;
                    let (fy, ey) = magnitude(n, y, cfg)?;
                    let rhs = fx.powf(a) * fy.powf(1.0 - a);
                    let erhs = rhs * (a * ex / fx + (1.0 - a) * ey / fy);
                    Ok(Cmp::le(label.clone(), Some(n), fz, rhs, ez + erhs))
                };
                match run() {
                    Ok(c) => Outcome {
                        cmps: vec![c],
                        ..Default::default()
                    },
                    Err(e) => Outcome::fail(label.clone(), e),
                }
            })
            .collect(),
    ))
}

fn check_turan_shifted(spec: &CheckSpec, cfg: &QuadratureConfig) -> Result<Outcome> {
    let n = spec.order_param("n")?;
    Ok(gather(
        spec.grid
            .par_iter()
            .map(|&x| {
                let run = || -> std::result::Result<Cmp, String> {
                    let (f0, e0) = magnitude(n, x, cfg)?;
                    let (f1, e1) = magnitude(n, x + 1.0, cfg)?;
                    let (f2, e2) = magnitude(n, x + 2.0, cfg)?;
                    Ok(Cmp::le(
                        fmt_pt("x", x),
                        Some(n),
                        f1 * f1,
                        f0 * f2,
                        2.0 * f1 * e1 + f0 * e2 + f2 * e0,
                    ))
                };
                match run() {
                    Ok(c) => Outcome {
                        cmps: vec![c],
                        ..Default::default()
                    },
                    Err(e) => Outcome::fail(fmt_pt("x", x), e),
                }
            })
            .collect(),
    ))
}

fn check_strong_cm(spec: &CheckSpec, cfg: &QuadratureConfig) -> Result<Outcome> {
    let n = spec.order_param("n")?;
    let top = n + *spec.orders.iter().max().unwrap_or(&0);
    let ladders: Vec<_> = spec.grid.par_iter().map(|&x| ladder(x, top, cfg)).collect();
    let mut out = Outcome::default();
    for &m in &spec.orders {
        let k = (n + m) as usize;
        let mut prev: Option<(f64, f64, f64)> = None;
        for (&x, l) in spec.grid.iter().zip(&ladders) {
            let l = match l {
                Ok(l) => l,
                Err(e) => {
                    out.failures.push(format!("x={x:e}: {e}"));
                    prev = None;
                    continue;
                }
            };
            let w = x.powi(m as i32 + 1);
            let (v, e) = (w * l[k].magnitude(), w * l[k].abs_error);
            out.cmps.push(Cmp::lt(fmt_pt("x", x), Some(m), 0.0, v, e));
            if let Some((px, pv, pe)) = prev {
                out.cmps.push(Cmp::lt(
                    format!("x={px:e}->{x:e}"),
                    Some(m),
                    v,
                    pv,
                    e + pe,
                ));
            }
            prev = Some((x, v, e));
        }
    }
    Ok(out)
}

fn check_superadditive_starshaped(spec: &CheckSpec, cfg: &QuadratureConfig) -> Result<Outcome> {
    let n = spec.order_param("n")?;
    let reversed = spec.param_or("reversed_scaling", 0.0) != 0.0;
    let even = n % 2 == 0;
    let additive: Vec<Outcome> = spec
        .pairs
        .par_iter()
        .map(|&[x, y]| {
            let label = format!("x={x:e};y={y:e}");
            let run = || -> std::result::Result<Cmp, String> {
                let (ix, ex) = signed(n, x, cfg)?;
                let (iy, ey) = signed(n, y, cfg)?;
                let (ixy, exy) = signed(n, x + y, cfg)?;
                let sum = ix + iy;
                let quot = ix * iy / ixy;
                let equot = quot.abs() * (ex / ix.abs() + ey / iy.abs() + exy / ixy.abs());
                let err = ex + ey + equot;
                let tag = format!("additive;{label}");
                // even n: sum ≤ quot; odd n: sum ≥ quot
                Ok(if even {
                    Cmp::le(tag, Some(n), sum, quot, err)
                } else {
                    Cmp::le(tag, Some(n), quot, sum, err)
                })
            };
            match run() {
                Ok(c) => Outcome {
                    cmps: vec![c],
                    ..Default::default()
                },
                Err(e) => Outcome::fail(label.clone(), e),
            }
        })
        .collect();
    let scaling: Vec<Outcome> = spec
        .betas
        .par_iter()
        .zip(spec.pairs.par_iter())
        .map(|(&beta, &[x, _])| {
            let label = format!("scaling;x={x:e};beta={beta:e}");
            let run = || -> std::result::Result<Cmp, String> {
                let (ib, eb) = signed(n, beta * x, cfg)?;
                let (ix, ex) = signed(n, x, cfg)?;
                let scaled = beta * ib;
                let err = beta * eb + ex;
                // Star-shapedness of 1/F_n gives F_n(x) ≤ β F_n(βx), i.e.
                // I(x) ≤ β I(βx) for even n and β I(βx) ≤ I(x) for odd n.
                let small_first = even != reversed;
                Ok(if small_first {
                    Cmp::le(label.clone(), Some(n), ix, scaled, err)
                } else {
                    Cmp::le(label.clone(), Some(n), scaled, ix, err)
                })
            };
            match run() {
                Ok(c) => Outcome {
                    cmps: vec![c],
                    ..Default::default()
                },
                Err(e) => Outcome::fail(label.clone(), e),
            }
        })
        .collect();
    let mut out = gather(additive);
    out.merge(gather(scaling));
    if reversed {
        out.notes.push("scaling inequalities use the reversed direction".into());
    }
    Ok(out)
}

/// Taylor coefficients of `φ_0(t) = 1 / (t (π² + log² t))` about `t0`.
fn phi0_jet(t0: f64, order: usize) -> PowerSeries {
    let t = PowerSeries::variable(t0, order);
    let l = t.ln();
    let q = &(&l * &l) + &PowerSeries::constant(PI2, order);
    (&t * &q).recip()
}

fn check_density_cm_evidence(spec: &CheckSpec) -> Outcome {
    let top = *spec.orders.iter().max().unwrap_or(&0) as usize;
    let h = spec.param_or("h_step", 1e-3);
    let mut fd_gap = 0.0f64;
    let mut out = Outcome::default();
    for &t in &spec.grid {
        let jet = phi0_jet(t, top.max(2));
        for &k in &spec.orders {
            let d = jet.derivative_at_center(k as usize);
            let s = if k % 2 == 0 { d } else { -d };
            out.cmps.push(Cmp::lt(fmt_pt("t", t), Some(k), 0.0, s, 0.0));
        }
        // central differences of φ_0 as a cross-check on the jets
        let step = h * t;
        let f = |u: f64| 1.0 / (u * (PI2 + u.ln() * u.ln()));
        let fd1 = (f(t + step) - f(t - step)) / (2.0 * step);
        let fd2 = (f(t + step) - 2.0 * f(t) + f(t - step)) / (step * step);
        let d1 = jet.derivative_at_center(1);
        let d2 = jet.derivative_at_center(2);
        fd_gap = fd_gap.max(((fd1 - d1) / d1).abs()).max(((fd2 - d2) / d2).abs());
    }
    out.notes.push(format!(
        "evidence only; derivatives from Taylor jets, max relative gap to central differences (orders 1-2, h={h:e}·t) = {fd_gap:.3e}"
    ));
    out
}

fn check_corollary_ratio(spec: &CheckSpec, cfg: &QuadratureConfig) -> Result<Outcome> {
    let n = spec.order_param("n")?;
    let bound = alpha_bounds(n)?.sufficient;
    Ok(gather(
        spec.grid
            .par_iter()
            .map(|&x| match ladder(x, n + 1, cfg) {
                Ok(l) => {
                    let (a, b, c) = (&l[n as usize - 1], &l[n as usize], &l[n as usize + 1]);
                    let (fa, fb, fc) = (a.magnitude(), b.magnitude(), c.magnitude());
                    let r = fb * fb / (fa * fc);
                    let e = r * (2.0 * b.abs_error / fb + a.abs_error / fa + c.abs_error / fc);
                    Outcome {
                        cmps: vec![Cmp::le(fmt_pt("x", x), Some(n), bound, r, e)],
                        ..Default::default()
                    }
                }
                Err(e) => Outcome::fail(fmt_pt("x", x), e),
            })
            .collect(),
    ))
}

fn check_h_nonnegative(spec: &CheckSpec, cfg: &QuadratureConfig) -> Result<Outcome> {
    let n = spec.order_param("n")?;
    Ok(gather(
        spec.grid
            .par_iter()
            .map(|&t| match h_density(n, t, cfg) {
                Ok(h) if h.converged => Outcome {
                    cmps: vec![Cmp::le(fmt_pt("t", t), Some(n), 0.0, h.value, h.error_estimate)],
                    ..Default::default()
                },
                Ok(_) => Outcome::fail(fmt_pt("t", t), "did not converge"),
                Err(e) => Outcome::fail(fmt_pt("t", t), e),
            })
            .collect(),
    ))
}

fn check_laplace_consistency(spec: &CheckSpec, cfg: &QuadratureConfig) -> Result<Outcome> {
    let n = spec.order_param("n")?;
    let max_dev = spec.param_or("max_abs_dev", 1e-6);
    Ok(gather(
        spec.grid
            .par_iter()
            .map(|&x| match laplace_consistency(n, x, cfg) {
                Ok(r) => Outcome {
                    cmps: vec![Cmp::le(fmt_pt("x", x), Some(n), r.abs_dev, max_dev, 0.0)],
                    notes: vec![format!(
                        "x={x:e}: lhs={:.6e}±{:.1e} rhs={:.6e}±{:.1e}",
                        r.lhs, r.lhs_error, r.rhs, r.rhs_error
                    )],
                    ..Default::default()
                },
                Err(e) => Outcome::fail(fmt_pt("x", x), e),
            })
            .collect(),
    ))
}

fn check_g_lemma(spec: &CheckSpec) -> Result<Outcome> {
    let fd_tol = spec.param_or("fd_tolerance", 1e-7);
    let mut out = Outcome::default();
    for &x in &spec.grid {
        let run = || -> Result<Vec<Cmp>> {
            let gp = g_prime(x)?;
            let p = p_poly(x)?;
            let h = 1e-5 * x;
            let fd = (g(x + h)? - g(x - h)?) / (2.0 * h);
            let round = 8.0 * f64::EPSILON;
            Ok(vec![
                Cmp::lt(format!("g_prime;x={x:e}"), None, gp, 0.0, round * gp.abs()),
                Cmp::lt(format!("p;x={x:e}"), None, 0.0, p, round * p),
                Cmp::le(format!("fd;x={x:e}"), None, ((gp - fd) / gp).abs(), fd_tol, 0.0),
            ])
        };
        match run() {
            Ok(c) => out.cmps.extend(c),
            Err(e) => out.failures.push(format!("x={x:e}: {e}")),
        }
    }
    Ok(out)
}

fn check_turan_cm(spec: &CheckSpec, cfg: &QuadratureConfig) -> Result<Outcome> {
    let p = TuranParams::new(spec.order_param("n")?, spec.param("alpha")?)?;
    let top = *spec.orders.iter().max().unwrap_or(&0);
    let mut out = gather(
        spec.grid
            .par_iter()
            .map(|&x| match turan_derivatives(&p, x, top, cfg) {
                Ok(d) if d.iter().all(|v| v.converged) => Outcome {
                    cmps: spec
                        .orders
                        .iter()
                        .map(|&m| {
                            let v = &d[m as usize];
                            let s = if m % 2 == 0 { v.value } else { -v.value };
                            Cmp::lt(fmt_pt("x", x), Some(m), 0.0, s, v.abs_error)
                        })
                        .collect(),
                    ..Default::default()
                },
                Ok(_) => Outcome::fail(fmt_pt("x", x), "did not converge"),
                Err(e) => Outcome::fail(fmt_pt("x", x), e),
            })
            .collect(),
    );
    let b = alpha_bounds(p.n)?;
    if !(p.alpha > b.sufficient && p.alpha < b.necessary) {
        out.notes.push(format!(
            "alpha={} lies outside the open interval ({}, {})",
            p.alpha, b.sufficient, b.necessary
        ));
    }
    Ok(out)
}

/// Evaluate one resolved check.
pub fn run_check(spec: &CheckSpec, cfg: &QuadratureConfig) -> Result<CheckResult> {
    spec.validate()?;
    let out = match spec.kind {
        CheckKind::CompleteMonotonicity => check_complete_monotonicity(spec, cfg),
        CheckKind::LogConvexity => check_log_convexity(spec, cfg)?,
        CheckKind::TuranShifted => check_turan_shifted(spec, cfg)?,
        CheckKind::StrongCm => check_strong_cm(spec, cfg)?,
        CheckKind::SuperadditiveStarshaped => check_superadditive_starshaped(spec, cfg)?,
        CheckKind::DensityCmEvidence => check_density_cm_evidence(spec),
        CheckKind::CorollaryRatio => check_corollary_ratio(spec, cfg)?,
        CheckKind::HNonnegative => check_h_nonnegative(spec, cfg)?,
        CheckKind::LaplaceConsistency => check_laplace_consistency(spec, cfg)?,
        CheckKind::GLemma => check_g_lemma(spec)?,
        CheckKind::TuranCm => check_turan_cm(spec, cfg)?,
    };
    let invert = spec.inverted();
    let records: Vec<PointRecord> = out
        .cmps
        .into_iter()
        .map(|c| c.record(spec.tolerance, invert))
        .collect();
    let violations: Vec<Violation> = records
        .iter()
        .filter(|r| r.violated)
        .map(|r| Violation {
            point: r.point.clone(),
            order: r.order,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
        })
        .collect();
    let worst_margin = records
        .iter()
        .map(|r| r.margin)
        .fold(f64::INFINITY, f64::min);
    let unresolved = records
        .iter()
        .filter(|r| (r.rhs - r.lhs).abs() <= 10.0 * r.error)
        .count();
    let passed = violations.is_empty();
    let mut notes = out.notes;
    if invert {
        notes.push("negative control: comparison sides swapped".into());
    }
    Ok(CheckResult {
        spec: spec.clone(),
        passed,
        expectation_met: match spec.expect {
            Expectation::Hold => passed,
            Expectation::Fail => !passed,
        },
        violations,
        worst_margin,
        unresolved,
        numerical_failures: out.failures,
        records,
        notes: notes.join("; "),
    })
}

/// Quadrature settings as written in a configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    #[serde(default = "QuadratureSection::abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "QuadratureSection::rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "QuadratureSection::max_subdivisions")]
    pub max_subdivisions: usize,
    #[serde(default = "QuadratureSection::truncation_bound")]
    pub truncation_bound: f64,
}

impl QuadratureSection {
    fn abs_tol() -> f64 {
        QuadratureConfig::default().abs_tol
    }
    fn rel_tol() -> f64 {
        QuadratureConfig::default().rel_tol
    }
    fn max_subdivisions() -> usize {
        QuadratureConfig::default().max_subdivisions
    }
    fn truncation_bound() -> f64 {
        QuadratureConfig::default().truncation_bound
    }

    pub fn to_config(self) -> QuadratureConfig {
        QuadratureConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
            truncation_bound: self.truncation_bound,
        }
    }
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let c = QuadratureConfig::default();
        Self {
            abs_tol: c.abs_tol,
            rel_tol: c.rel_tol,
            max_subdivisions: c.max_subdivisions,
            truncation_bound: c.truncation_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default, rename = "check")]
    pub checks: Vec<CheckConfig>,
}

/// The default suite, also shipped as `config/default.toml`.
pub const DEFAULT_SUITE_TOML: &str = include_str!("../config/default.toml");

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn default_suite() -> Self {
        Self::from_toml(DEFAULT_SUITE_TOML).expect("bundled default suite parses")
    }

    /// Keep only the named checks.
    pub fn only(mut self, names: &[String]) -> Result<Self> {
        for n in names {
            if !self.checks.iter().any(|c| &c.name == n) {
                return Err(Error::Config(format!("no check named `{n}`")));
            }
        }
        self.checks.retain(|c| names.contains(&c.name));
        Ok(self)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canon.as_bytes());
        digest.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub violated: usize,
    pub expected_failures: usize,
    pub expectations_unmet: usize,
    pub numerical_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub toolkit_version: String,
    pub config_hash: String,
    pub summary: Summary,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.summary.numerical_failures > 0 {
            2
        } else if self.summary.expectations_unmet > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.results {
            let kind = serde_json::to_value(r.spec.kind).expect("kind serializes");
            let expect = serde_json::to_value(r.spec.expect).expect("expectation serializes");
            for p in &r.records {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                    r.spec.name,
                    kind.as_str().unwrap_or_default(),
                    expect.as_str().unwrap_or_default(),
                    p.point,
                    p.order.map(|o| o.to_string()).unwrap_or_default(),
                    p.lhs,
                    p.rhs,
                    p.error,
                    p.margin,
                    p.violated
                );
            }
        }
        s
    }

    pub fn result(&self, name: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.spec.name == name)
    }
}

/// Run every enabled check. Checks run concurrently; the report keeps
/// configuration order.
pub fn run_suite(config: &SuiteConfig) -> Result<Report> {
    let cfg = config.quadrature.to_config();
    cfg.validate()?;
    let specs: Vec<CheckSpec> = config
        .checks
        .iter()
        .filter(|c| c.enabled)
        .map(CheckConfig::resolve)
        .collect::<Result<_>>()?;
    let results: Vec<CheckResult> = specs
        .par_iter()
        .map(|s| match run_check(s, &cfg) {
            Ok(r) => r,
            Err(e) => CheckResult {
                spec: s.clone(),
                passed: false,
                expectation_met: false,
                violations: Vec::new(),
                worst_margin: f64::NAN,
                unresolved: 0,
                numerical_failures: vec![e.to_string()],
                records: Vec::new(),
                notes: String::new(),
            },
        })
        .collect();
    let mut summary = Summary {
        total: results.len(),
        ..Default::default()
    };
    for r in &results {
        if r.passed {
            summary.passed += 1;
        } else {
            summary.violated += 1;
        }
        if r.spec.expect == Expectation::Fail && !r.passed {
            summary.expected_failures += 1;
        }
        if !r.expectation_met {
            summary.expectations_unmet += 1;
        }
        if !r.numerical_failures.is_empty() {
            summary.numerical_failures += 1;
        }
    }
    Ok(Report {
        schema_version: REPORT_SCHEMA_VERSION,
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config.hash(),
        summary,
        results,
    })
}
