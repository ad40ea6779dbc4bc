//! Adaptive numerical integration.
//!
//! The core rule is a globally adaptive 10-point Gauss / 21-point Kronrod
//! pair with QUADPACK-style error estimates: the interval with the largest
//! error is bisected until the summed error meets
//! `max(abs_tol, rel_tol * |value|)` or the subdivision budget runs out.
//! Infinite ranges are mapped onto `(0, 1]` with `x = a + (1 - s) / s`.
//!
//! [`tanh_sinh`] is a double-exponential rule on finite intervals. It shares
//! no nodes or error model with the Gauss–Kronrod path and serves as an
//! independent second route.
//!
//! Non-convergence is reported through [`QuadratureResult::converged`] and is
//! never an `Err`; a NaN or infinite integrand value is.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kronrod abscissae on `[0, 1)`; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_067_032_386,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for `XGK[1], XGK[3], .., XGK[9]`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const EPS: f64 = f64::EPSILON;

/// Tolerances and budgets for one integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Cut-off `U` used by callers that truncate an infinite range and add
    /// an analytic tail (see [`crate::ramanujan`]).
    pub truncation_bound: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            truncation_bound: 50.0,
        }
    }
}

impl QuadratureConfig {
    /// Same budgets, with both tolerances set to `tol`.
    pub fn with_tol(self, tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(self.abs_tol) || !ok(self.rel_tol) {
            return Err(Error::InvalidConfig(
                "tolerances must be finite and non-negative".into(),
            ));
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return Err(Error::InvalidConfig(
                "at least one of abs_tol, rel_tol must be positive".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidConfig("max_subdivisions must be positive".into()));
        }
        if !(self.truncation_bound.is_finite() && self.truncation_bound > 0.0) {
            return Err(Error::InvalidConfig("truncation_bound must be positive".into()));
        }
        Ok(())
    }

    /// The error target for an integral of magnitude `value`.
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    /// Sum of two independent integrals; errors add, convergence is joint.
    pub fn add(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    pub fn scale(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }
}

/// Which endpoints must never be evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SingularEndpoints {
    pub lower: bool,
    pub upper: bool,
}

impl SingularEndpoints {
    pub const NONE: Self = Self {
        lower: false,
        upper: false,
    };
    pub const BOTH: Self = Self {
        lower: true,
        upper: true,
    };
}

/// A real integrand plus its declared endpoint singularities.
pub struct Integrand<F> {
    evaluator: F,
    singular: SingularEndpoints,
}

impl<F: Fn(f64) -> f64> Integrand<F> {
    pub fn new(evaluator: F) -> Self {
        Self {
            evaluator,
            singular: SingularEndpoints::NONE,
        }
    }

    pub fn singular_at(mut self, singular: SingularEndpoints) -> Self {
        self.singular = singular;
        self
    }

    pub fn singular(&self) -> SingularEndpoints {
        self.singular
    }

    fn eval(&self, x: f64) -> Result<f64> {
        let v = (self.evaluator)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { at: x, value: v })
        }
    }
}

/// `∫_a^b f`.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: &Integrand<F>,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::domain(
            "integrate_finite",
            format!("need finite a < b, got [{a}, {b}]"),
        ));
    }
    let breaks = initial_breaks(a, b, f.singular);
    adaptive(&|x| f.eval(x), &breaks, cfg)
}

/// `∫_a^∞ f`, via `x = a + (1 - s) / s`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: &Integrand<F>,
    a: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !a.is_finite() {
        return Err(Error::domain("integrate_semi_infinite", "lower limit must be finite"));
    }
    let mapped = |s: f64| -> Result<f64> {
        let x = a + (1.0 - s) / s;
        let v = f.eval(x)?;
        Ok(v / (s * s))
    };
    // x = a sits at s = 1.
    let singular = SingularEndpoints {
        lower: false,
        upper: f.singular.lower,
    };
    let breaks = initial_breaks(0.0, 1.0, singular);
    adaptive(&mapped, &breaks, cfg)
}

/// `∫_{-∞}^{∞} f`, folding both half-lines onto `(0, 1]`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(
    f: &Integrand<F>,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    let mapped = |s: f64| -> Result<f64> {
        let x = (1.0 - s) / s;
        let v = f.eval(x)? + f.eval(-x)?;
        Ok(v / (s * s))
    };
    adaptive(&mapped, &[0.0, 1.0], cfg)
}

fn initial_breaks(a: f64, b: f64, singular: SingularEndpoints) -> Vec<f64> {
    // Geometric pre-split towards singular endpoints saves the first few
    // rounds of bisection.
    const FRACTIONS: [f64; 4] = [1.0 / 256.0, 1.0 / 64.0, 1.0 / 16.0, 1.0 / 4.0];
    let w = b - a;
    let mut pts = vec![a, b];
    if singular.lower {
        pts.extend(FRACTIONS.iter().map(|q| a + q * w));
    }
    if singular.upper {
        pts.extend(FRACTIONS.iter().map(|q| b - q * w));
    }
    if singular.lower && singular.upper {
        pts.push(a + 0.5 * w);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod21<G>(g: &G, a: f64, b: f64) -> Result<Segment>
where
    G: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center)?;
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = g(center - dx)?;
        let f2 = g(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (1.0f64).min((200.0 * error / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * EPS) {
        error = error.max(50.0 * EPS * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

fn adaptive<G>(g: &G, breaks: &[f64], cfg: &QuadratureConfig) -> Result<QuadratureResult>
where
    G: Fn(f64) -> Result<f64>,
{
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut evaluations = 0usize;
    for w in breaks.windows(2) {
        heap.push(gauss_kronrod21(g, w[0], w[1])?);
        evaluations += 21;
    }
    let totals = |heap: &BinaryHeap<Segment>, frozen: &[Segment]| {
        heap.iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
    };
    let (mut value, mut error) = totals(&heap, &frozen);
    let mut segments = heap.len();
    loop {
        if error <= cfg.target(value) {
            // Running sums drift; confirm against a fresh summation.
            let (v, e) = totals(&heap, &frozen);
            value = v;
            error = e;
            if error <= cfg.target(value) {
                return Ok(QuadratureResult {
                    value,
                    error_estimate: error,
                    evaluations,
                    converged: true,
                });
            }
        }
        if segments >= cfg.max_subdivisions {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = mid <= worst.a
            || mid >= worst.b
            || (worst.b - worst.a) <= 64.0 * EPS * worst.a.abs().max(worst.b.abs());
        if too_narrow {
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod21(g, worst.a, mid)?;
        let right = gauss_kronrod21(g, mid, worst.b)?;
        evaluations += 42;
        segments += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let (value, error) = totals(&heap, &frozen);
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evaluations,
        converged: error <= cfg.target(value),
    })
}

/// Tanh-sinh (double-exponential) quadrature of `∫_a^b f`.
///
/// The step is halved level by level; the error estimate is the difference
/// between the last two levels, floored at the rounding level of the sum.
pub fn tanh_sinh<F: Fn(f64) -> f64>(
    f: &Integrand<F>,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    const MAX_LEVEL: u32 = 12;
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::domain(
            "tanh_sinh",
            format!("need finite a < b, got [{a}, {b}]"),
        ));
    }
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let mut evaluations = 1usize;
    let mut sum = FRAC_PI_2 * f.eval(c)?;
    let mut sum_abs = sum.abs();

    // Adds the symmetric node pair at `t > 0`; `false` once the nodes have
    // collapsed onto the endpoints.
    let pair = |t: f64, sum: &mut f64, sum_abs: &mut f64, evals: &mut usize| -> Result<bool> {
        let y = FRAC_PI_2 * t.sinh();
        if y > 350.0 {
            return Ok(false);
        }
        let cy = y.cosh();
        let weight = FRAC_PI_2 * t.cosh() / (cy * cy);
        // Distance from each endpoint in units of d: 1 - tanh(y).
        let delta = 2.0 / (1.0 + (2.0 * y).exp());
        let off = d * delta;
        if weight == 0.0 {
            return Ok(false);
        }
        // Each side stops independently: a singular lower endpoint still
        // needs nodes long after the upper ones have rounded onto b.
        let mut any = false;
        for x in [a + off, b - off] {
            if x > a && x < b {
                let fx = f.eval(x)?;
                *evals += 1;
                *sum += weight * fx;
                *sum_abs += weight * fx.abs();
                any = true;
            }
        }
        Ok(any)
    };

    let mut k = 1.0;
    while pair(k, &mut sum, &mut sum_abs, &mut evaluations)? {
        k += 1.0;
    }
    let mut h = 1.0;
    let mut previous = d * h * sum;
    let mut error = f64::INFINITY;
    let mut value = previous;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut j = 1.0;
        while pair(j * h, &mut sum, &mut sum_abs, &mut evaluations)? {
            j += 2.0;
        }
        value = d * h * sum;
        let floor = 50.0 * EPS * d * h * sum_abs;
        error = (value - previous).abs().max(floor);
        if level >= 3 && error <= cfg.target(value) {
            break;
        }
        previous = value;
    }
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evaluations,
        converged: error <= cfg.target(value),
    })
}
