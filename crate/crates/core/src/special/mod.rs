//! Gamma-family special functions on the positive axis.
//!
//! `Γ(x)` uses the Lanczos approximation (g = 7, nine coefficients) with the
//! reflection formula below 1/2, and exact factorials at integers up to 170.
//! Polygamma values are only needed at positive integers and are built from
//! Hurwitz tails `Σ_{j≥n} j^{-s}` summed directly and closed with an
//! Euler–Maclaurin remainder.

pub mod series;

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
pub use series::PowerSeries;

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;

/// Highest Taylor order supported by [`gamma_taylor`].
pub const MAX_SERIES_ORDER: usize = 30;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// B_2, B_4, .., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174_611.0 / 330.0,
];

pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("gamma", format!("x = {x} must be positive")));
    }
    if x.fract() == 0.0 && x <= 171.0 {
        return Ok((2..x as u32).fold(1.0, |acc, j| acc * j as f64));
    }
    Ok(gamma_lanczos(x))
}

fn gamma_lanczos(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_lanczos(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * ((z + 0.5) * t.ln() - t).exp() * acc
}

/// `ψ(n) = -γ + Σ_{j<n} 1/j`.
pub fn digamma(n: u64) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("digamma", "n must be at least 1"));
    }
    if n <= 1_000_000 {
        // Small terms first.
        let h: f64 = (1..n).rev().map(|j| 1.0 / j as f64).sum();
        return Ok(h - EULER_GAMMA);
    }
    let x = n as f64;
    let x2 = x * x;
    let mut s = x.ln() - 0.5 / x;
    let mut p = x2;
    for (i, b) in BERNOULLI_EVEN.iter().take(5).enumerate() {
        let k = 2 * (i + 1);
        s -= b / (k as f64 * p);
        p *= x2;
    }
    Ok(s)
}

/// `Σ_{j≥n} j^{-s}` for `s > 1`, `n ≥ 1`.
pub(crate) fn hurwitz_tail(s: f64, n: u64) -> f64 {
    // Direct summation up to N, then Euler–Maclaurin; N grows with s so the
    // remainder series converges quickly.
    let cut = (n as f64).max(2.0 * s + 20.0).ceil() as u64;
    let direct: f64 = (n..cut).rev().map(|j| (j as f64).powf(-s)).sum();
    let nf = cut as f64;
    let mut em = nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // term_k = B_{2k}/(2k)! · s(s+1)...(s+2k-2) · N^{-s-2k+1}
    let mut rising = s; // s(s+1)..(s+2k-2)
    let mut fact = 2.0; // (2k)!
    let mut power = nf.powf(-s - 1.0);
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * rising * power;
        em += term;
        if term.abs() < 1e-18 * em.abs() {
            break;
        }
        let k = (i + 1) as f64;
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
        power /= nf * nf;
    }
    direct + em
}

fn zeta_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=64)
            .map(|k| if k < 2 { f64::NAN } else { hurwitz_tail(k as f64, 1) })
            .collect()
    })
}

/// Riemann zeta at an integer `k ≥ 2`.
pub fn zeta_int(k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::domain("zeta_int", format!("k = {k} must be at least 2")));
    }
    match k {
        2 => Ok(PI * PI / 6.0),
        4 => Ok(PI.powi(4) / 90.0),
        _ if (k as usize) < zeta_table().len() => Ok(zeta_table()[k as usize]),
        _ => Ok(hurwitz_tail(k as f64, 1)),
    }
}

/// `ψ^{(k)}(n) = (-1)^{k+1} k! (ζ(k+1) - Σ_{j<n} j^{-(k+1)})`.
pub fn polygamma(k: u32, n: u64) -> Result<f64> {
    if k < 1 {
        return Err(Error::domain("polygamma", "order k must be at least 1 (use digamma)"));
    }
    if n < 1 {
        return Err(Error::domain("polygamma", "n must be at least 1"));
    }
    let fact: f64 = (2..=k).map(f64::from).product();
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let tail = if n == 1 {
        zeta_int(k + 1)?
    } else {
        hurwitz_tail(f64::from(k + 1), n)
    };
    Ok(sign * fact * tail)
}

/// Taylor coefficients `c_0..c_K` of `Γ(n + x)` about `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaTaylor {
    pub n: u64,
    pub coeffs: Vec<f64>,
}

impl GammaTaylor {
    pub fn series(&self) -> PowerSeries {
        PowerSeries::new(self.coeffs.clone())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.series().eval(x)
    }
}

/// Builds `Γ(n + x)` from `log Γ(n+x) - log Γ(n) = ψ(n) x + Σ_{k≥2} ψ^{(k-1)}(n) x^k / k!`,
/// exponentiated as a truncated series.
pub fn gamma_taylor(n: u64, order: usize) -> Result<GammaTaylor> {
    if n < 1 {
        return Err(Error::domain("gamma_taylor", "n must be at least 1"));
    }
    if order > MAX_SERIES_ORDER {
        return Err(Error::OrderTooLarge {
            requested: order,
            max: MAX_SERIES_ORDER,
        });
    }
    let mut log_coeffs = vec![0.0; order + 1];
    if order >= 1 {
        log_coeffs[1] = digamma(n)?;
    }
    for (k, c) in log_coeffs.iter_mut().enumerate().skip(2) {
        // ψ^{(k-1)}(n)/k! = (-1)^k tail(k, n) / k
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *c = sign * hurwitz_tail(k as f64, n) / k as f64;
    }
    let series = PowerSeries::new(log_coeffs).exp().scale(gamma(n as f64)?);
    Ok(GammaTaylor {
        n,
        coeffs: series.coeffs().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-13);
        assert!(rel(gamma(1.5).unwrap(), 0.5 * PI.sqrt()) < 1e-13);
        assert!(rel(gamma(0.25).unwrap(), 3.625_609_908_221_908_3) < 1e-13);
        assert!(rel(gamma(10.3).unwrap(), 716_430.689_062_376_4) < 1e-13);
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
    }

    #[test]
    fn digamma_values() {
        assert!((digamma(1).unwrap() + EULER_GAMMA).abs() < 1e-15);
        assert!(rel(digamma(2).unwrap(), 1.0 - EULER_GAMMA) < 1e-13);
        assert!(rel(digamma(4).unwrap(), 11.0 / 6.0 - EULER_GAMMA) < 1e-13);
        assert!(digamma(0).is_err());
        // asymptotic branch agrees with the harmonic sum at the switch-over
        let n = 1_000_001u64;
        let h: f64 = (1..n).rev().map(|j| 1.0 / j as f64).sum::<f64>() - EULER_GAMMA;
        assert!(rel(digamma(n).unwrap(), h) < 1e-13);
    }

    #[test]
    fn digamma_recurrence() {
        for n in 1..=50u64 {
            let d = digamma(n + 1).unwrap() - digamma(n).unwrap();
            assert!((d - 1.0 / n as f64).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn polygamma_values() {
        let z3 = 1.202_056_903_159_594_3;
        assert!(rel(polygamma(1, 1).unwrap(), PI * PI / 6.0) < 1e-14);
        assert!(rel(polygamma(2, 1).unwrap(), -2.0 * z3) < 1e-14);
        assert!(rel(polygamma(1, 2).unwrap(), PI * PI / 6.0 - 1.0) < 1e-14);
        assert!(polygamma(0, 1).is_err());
        assert!(polygamma(1, 0).is_err());
        // ψ'(n) - ψ'(n+1) = 1/n²
        for n in 1..30u64 {
            let d = polygamma(1, n).unwrap() - polygamma(1, n + 1).unwrap();
            assert!(rel(d, 1.0 / (n * n) as f64) < 1e-12);
        }
    }

    #[test]
    fn zeta_values() {
        assert!(rel(zeta_int(2).unwrap(), PI * PI / 6.0) < 1e-15);
        assert!(rel(zeta_int(4).unwrap(), PI.powi(4) / 90.0) < 1e-15);
        assert!(rel(zeta_int(6).unwrap(), PI.powi(6) / 945.0) < 1e-14);
        assert!(rel(zeta_int(8).unwrap(), PI.powi(8) / 9450.0) < 1e-14);
        assert!(zeta_int(1).is_err());
    }

    /// Plain partial sum with the integral tail bound, no acceleration.
    #[test]
    fn zeta3_against_direct_series() {
        let n = 200_000u64;
        let partial: f64 = (1..=n).rev().map(|j| (j as f64).powi(-3)).sum();
        // Σ_{j>N} j^-3 lies between 1/(2(N+1)^2) and 1/(2N^2)
        let lo = partial + 0.5 / ((n + 1) as f64).powi(2);
        let hi = partial + 0.5 / (n as f64).powi(2);
        let z = zeta_int(3).unwrap();
        assert!(z > lo - 1e-15 && z < hi + 1e-15, "{z} not in [{lo}, {hi}]");
        assert!(rel(z, 1.202_056_903_159_594_2) < 1e-14);
    }

    #[test]
    fn gamma_taylor_low_orders() {
        let t = gamma_taylor(1, 1).unwrap();
        assert_eq!(t.coeffs[0], 1.0);
        assert!((t.coeffs[1] + EULER_GAMMA).abs() < 1e-15);
        let t = gamma_taylor(3, 1).unwrap();
        assert_eq!(t.coeffs[0], 2.0);
        assert!(rel(t.coeffs[1], 2.0 * (1.5 - EULER_GAMMA)) < 1e-14);
        assert!(gamma_taylor(2, 31).is_err());
        assert!(gamma_taylor(0, 3).is_err());
    }

    /// Finite-difference Taylor fit of Γ(2+x): central differences
    /// `δ^k f(0) / h^k` on a shrinking stencil, Richardson-extrapolated in h².
    #[test]
    fn gamma_taylor_against_finite_differences() {
        let t = gamma_taylor(2, 4).unwrap();
        let f = |x: f64| gamma(2.0 + x).unwrap();
        let central = |k: usize, h: f64| {
            let mut binom = 1.0;
            let mut acc = 0.0;
            for i in 0..=k {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binom * f((k as f64 / 2.0 - i as f64) * h);
                binom = binom * (k - i) as f64 / (i + 1) as f64;
            }
            acc / h.powi(k as i32)
        };
        let mut factorial = 1.0;
        for k in 1..=4usize {
            factorial *= k as f64;
            let levels = 5;
            let mut table: Vec<Vec<f64>> = Vec::new();
            for j in 0..levels {
                let h = 0.4 / 2f64.powi(j as i32);
                let mut row = vec![central(k, h)];
                for m in 1..=j {
                    let p = 4f64.powi(m as i32);
                    let r = row[m - 1] + (row[m - 1] - table[j - 1][m - 1]) / (p - 1.0);
                    row.push(r);
                }
                table.push(row);
            }
            let fd = table[levels - 1][levels - 1] / factorial;
            assert!((t.coeffs[k] - fd).abs() < 1e-8, "k={k}: {} vs {fd}", t.coeffs[k]);
        }
        assert_eq!(t.coeffs[0], 1.0);
    }

    #[test]
    fn gamma_taylor_reconstructs_gamma() {
        for n in 1..=10u64 {
            let t = gamma_taylor(n, 20).unwrap();
            let g = gamma(n as f64 + 0.1).unwrap();
            assert!(rel(t.eval(0.1), g) < 1e-10, "n={n}");
        }
    }

    proptest! {
        #[test]
        fn gamma_recurrence(x in 0.01f64..20.0) {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            prop_assert!(rel(lhs, rhs) < 1e-12);
        }
    }
}
