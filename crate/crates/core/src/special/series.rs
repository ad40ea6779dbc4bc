//! Truncated power series `Σ_{k=0}^{K} c_k x^k` with a fixed order `K`.
//!
//! Binary operations truncate to the lower of the two orders. The
//! transcendental operations use the usual convolution recurrences and are
//! exact up to rounding in the retained coefficients.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<f64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least one coefficient");
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![0.0; order + 1])
    }

    pub fn constant(c: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c + x`, the local variable at expansion point `c`.
    pub fn variable(c: f64, order: usize) -> Self {
        let mut s = Self::constant(c, order);
        if order >= 1 {
            s.coeffs[1] = 1.0;
        }
        s
    }

    /// Taylor series of `sin(a x) / a` about 0.
    pub fn sin_over(a: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        // c_1 = 1, c_{k+2} = -c_k a² / ((k+1)(k+2))
        let mut c = 1.0;
        let mut k = 1;
        while k <= order {
            s.coeffs[k] = c;
            c *= -a * a / ((k + 1) * (k + 2)) as f64;
            k += 2;
        }
        s
    }

    /// Taylor series of `sin(a x) / (a x)` about 0.
    pub fn sinc(a: f64, order: usize) -> Self {
        let shifted = Self::sin_over(a, order + 1);
        Self::new(shifted.coeffs[1..].to_vec())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(order + 1, 0.0);
        Self::new(c)
    }

    /// Horner evaluation of the partial sum at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `k!·c_k`, the k-th derivative at the expansion point.
    pub fn derivative_at_center(&self, k: usize) -> f64 {
        let mut f = 1.0;
        for j in 2..=k {
            f *= j as f64;
        }
        self.coeff(k) * f
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn exp(&self) -> Self {
        let n = self.order();
        let a = &self.coeffs;
        let mut b = vec![0.0; n + 1];
        b[0] = a[0].exp();
        for k in 1..=n {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            b[k] = s / k as f64;
        }
        Self::new(b)
    }

    /// Natural log; requires a positive constant term.
    pub fn ln(&self) -> Self {
        let n = self.order();
        let a = &self.coeffs;
        assert!(a[0] > 0.0, "log of a series with non-positive constant term");
        let mut b = vec![0.0; n + 1];
        b[0] = a[0].ln();
        for k in 1..=n {
            let s: f64 = (1..k).map(|j| j as f64 * b[j] * a[k - j]).sum();
            b[k] = (a[k] - s / k as f64) / a[0];
        }
        Self::new(b)
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Self {
        let n = self.order();
        let a = &self.coeffs;
        assert!(a[0] != 0.0, "reciprocal of a series with zero constant term");
        let mut b = vec![0.0; n + 1];
        b[0] = 1.0 / a[0];
        for k in 1..=n {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s * b[0];
        }
        Self::new(b)
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: Self) -> PowerSeries {
        let n = self.order().min(rhs.order());
        PowerSeries::new((0..=n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect())
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: Self) -> PowerSeries {
        let n = self.order().min(rhs.order());
        PowerSeries::new((0..=n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect())
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        self.scale(-1.0)
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: Self) -> PowerSeries {
        let n = self.order().min(rhs.order());
        let c = (0..=n)
            .map(|k| (0..=k).map(|j| self.coeffs[j] * rhs.coeffs[k - j]).sum())
            .collect();
        PowerSeries::new(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sin_over_coefficients() {
        let s = PowerSeries::sin_over(2.0, 7);
        let expect = [0.0, 1.0, 0.0, -4.0 / 6.0, 0.0, 16.0 / 120.0, 0.0, -64.0 / 5040.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((s.coeff(k) - e).abs() < 1e-15, "k={k}");
        }
        let sinc = PowerSeries::sinc(2.0, 4);
        assert_eq!(sinc.order(), 4);
        assert!((sinc.coeff(0) - 1.0).abs() < 1e-15);
        assert!((sinc.coeff(2) + 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn exp_of_variable() {
        let e = PowerSeries::variable(0.0, 10).exp();
        let mut f = 1.0;
        for k in 0..=10 {
            if k > 0 {
                f *= k as f64;
            }
            assert!((e.coeff(k) - 1.0 / f).abs() < 1e-16);
        }
    }

    #[test]
    fn ln_of_one_plus_x() {
        let l = PowerSeries::variable(1.0, 8).ln();
        for k in 1..=8 {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            assert!((l.coeff(k) - sign / k as f64).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn exp_ln_round_trip(c in proptest::collection::vec(-1.0f64..1.0, 1..12)) {
            let mut c = c;
            c[0] = c[0].abs() + 0.5;
            let s = PowerSeries::new(c);
            let back = s.ln().exp();
            for k in 0..=s.order() {
                prop_assert!((back.coeff(k) - s.coeff(k)).abs() < 1e-11 * (1.0 + s.coeff(k).abs()));
            }
        }

        #[test]
        fn recip_times_self_is_one(c in proptest::collection::vec(-1.0f64..1.0, 1..12)) {
            let mut c = c;
            c[0] = c[0].signum() * (c[0].abs() + 0.5);
            let s = PowerSeries::new(c);
            let one = &s * &s.recip();
            prop_assert!((one.coeff(0) - 1.0).abs() < 1e-13);
            for k in 1..=s.order() {
                prop_assert!(one.coeff(k).abs() < 1e-9);
            }
        }
    }
}
