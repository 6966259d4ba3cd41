//! Scalar kernels evaluated in a numerically stable way.
//!
//! Click probabilities combine factors such as `e^{-|β|²}`, `|β|^{2n}` and
//! `1/n!` whose individual magnitudes leave the `f64` range long before the
//! product does, so everything multiplicative is carried as a natural
//! logarithm ([`LogWeight`]) and exponentiated once at the end.

use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use errorfunctions::{ComplexErrorFunctions, RealErrorFunctions};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probability amplitude of a click outcome.
pub type ComplexAmplitude = Complex64;

/// A positive weight stored as its natural logarithm.
///
/// Addition of two `LogWeight`s multiplies the underlying weights.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogWeight(pub f64);

impl LogWeight {
    pub const ONE: LogWeight = LogWeight(0.0);
    pub const ZERO: LogWeight = LogWeight(f64::NEG_INFINITY);

    pub fn ln(x: f64) -> Self {
        LogWeight(x.ln())
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn exp(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `x^k` for a non-negative base; `0^0 = 1`.
    pub fn powi(base: f64, k: u64) -> Self {
        if k == 0 {
            LogWeight::ONE
        } else {
            LogWeight(k as f64 * base.ln())
        }
    }

    pub fn sqrt(self) -> Self {
        LogWeight(0.5 * self.0)
    }
}

impl Add for LogWeight {
    type Output = LogWeight;
    fn add(self, rhs: LogWeight) -> LogWeight {
        LogWeight(self.0 + rhs.0)
    }
}

impl Sub for LogWeight {
    type Output = LogWeight;
    fn sub(self, rhs: LogWeight) -> LogWeight {
        LogWeight(self.0 - rhs.0)
    }
}

impl Neg for LogWeight {
    type Output = LogWeight;
    fn neg(self) -> LogWeight {
        LogWeight(-self.0)
    }
}

const FACTORIAL_TABLE_LEN: usize = 171;

fn factorial_table() -> &'static [f64; FACTORIAL_TABLE_LEN] {
    static TABLE: OnceLock<[f64; FACTORIAL_TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0.0; FACTORIAL_TABLE_LEN];
        let mut fact = 1.0_f64;
        for (k, slot) in table.iter_mut().enumerate().skip(1) {
            fact *= k as f64;
            *slot = fact.ln();
        }
        table
    })
}

/// `ln(n!)`.
///
/// Tabulated from the exact product below 171 and from the Stirling series
/// above, where the first omitted term is below `1e-20`.
pub fn log_factorial(n: u64) -> f64 {
    if (n as usize) < FACTORIAL_TABLE_LEN {
        return factorial_table()[n as usize];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn log_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}

/// `ln` of the Poisson pmf `e^{-λ} λ^k / k!`.
pub fn poisson_ln_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    k as f64 * mean.ln() - mean - log_factorial(k)
}

pub fn poisson_pmf(k: u64, mean: f64) -> f64 {
    poisson_ln_pmf(k, mean).exp()
}

/// Upper tail `Σ_{k>n} Poisson(k; λ)`, summed term by term past the mode
/// until the remaining terms cannot change the result.
pub fn poisson_tail(n: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut k = n + 1;
    loop {
        let term = poisson_pmf(k, mean);
        sum += term;
        if (k as f64) > mean && (term == 0.0 || term < 1e-18 * sum) {
            break;
        }
        k += 1;
    }
    sum
}

/// Physicists' Hermite polynomial by upward recurrence.
pub fn hermite_phys(k: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for j in 1..k {
        let next = 2.0 * x * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn erf(x: f64) -> f64 {
    RealErrorFunctions::erf(x)
}

/// Faddeeva function `w(z) = e^{−z²} erfc(−iz)`, bounded in the upper half
/// plane.
pub fn faddeeva(z: Complex64) -> Complex64 {
    ComplexErrorFunctions::w(z)
}

/// Terminating Gauss hypergeometric sum `₂F₁(a, b; c; z)` with `a ≤ 0`.
///
/// The series is summed term by term from the Pochhammer ratios and stops as
/// soon as a numerator factor vanishes (which happens at the latest after
/// `|a| + 1` terms).
pub fn terminating_2f1(a: i64, b: i64, c: i64, z: f64) -> Result<f64> {
    if a > 0 {
        return Err(Error::InvalidParameter(format!(
            "terminating 2F1 needs a <= 0, got a = {a}"
        )));
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    for j in 0..(-a) {
        let num = (a + j) * (b + j);
        if num == 0 {
            break;
        }
        if c + j == 0 {
            return Err(Error::Pole { c, j: j as u64 });
        }
        term *= num as f64 / ((c + j) as f64 * (j + 1) as f64) * z;
        sum += term;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn log_factorial_small_values() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        let exact: u64 = (1..=10).product();
        assert_eq!(exact, 3_628_800);
        assert_relative_eq!(log_factorial(10), (exact as f64).ln(), max_relative = 1e-14);
        assert_relative_eq!(log_factorial(10), 15.104412573, epsilon = 1e-9);
    }

    #[test]
    fn log_factorial_is_continuous_across_table_edge() {
        for n in 160..200u64 {
            let lhs = log_factorial(n + 1) - log_factorial(n);
            assert_relative_eq!(lhs, ((n + 1) as f64).ln(), max_relative = 1e-12);
        }
    }

    #[test]
    fn log_factorial_large_argument() {
        // ln(10^6 !) from a straight Kahan-compensated sum of ln k
        let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
        for k in 2..=1_000_000u64 {
            let y = (k as f64).ln() - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        assert_relative_eq!(log_factorial(1_000_000), sum, max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn log_factorial_step(n in 0u64..100_000) {
            let lhs = log_factorial(n + 1) - log_factorial(n);
            let rhs = ((n + 1) as f64).ln();
            // absolute resolution of a difference of two doubles of size ln((n+1)!)
            let tol = 1e-12 * log_factorial(n + 1).max(1.0);
            prop_assert!((lhs - rhs).abs() <= tol, "n={n}: {lhs} vs {rhs}");
        }

        #[test]
        fn hermite_recurrence_identity(k in 1u32..60, x in -10.0f64..10.0) {
            let lhs = hermite_phys(k + 1, x);
            let rhs = 2.0 * x * hermite_phys(k, x) - 2.0 * k as f64 * hermite_phys(k - 1, x);
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * scale);
        }

        #[test]
        fn terminating_2f1_matches_binomial_form(
            m in 0i64..12, b in -15i64..15, c in 1i64..15, z in -2.0f64..2.0,
        ) {
            // Σ_k C(m,k) (b)_k/(c)_k (-z)^k is the same finite series written with
            // binomials, accumulated in exact rationals per term.
            let (mut oracle, mut magnitude) = (0.0, 0.0f64);
            for k in 0..=m {
                let mut binom = 1.0;
                let mut ratio = 1.0;
                for i in 0..k {
                    binom = binom * (m - i) as f64 / (i + 1) as f64;
                    ratio = ratio * (b + i) as f64 / (c + i) as f64;
                }
                let term = binom * ratio * (-z).powi(k as i32);
                oracle += term;
                magnitude += term.abs();
            }
            let got = terminating_2f1(-m, b, c, z).unwrap();
            // alternating terms cancel, so rounding scales with Σ|term|
            prop_assert!((got - oracle).abs() <= 1e-13 * magnitude.max(1.0));
        }
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_phys(0, 1.7), 1.0);
        assert_eq!(hermite_phys(1, 0.0), 0.0);
        let x = 1.0_f64;
        assert_eq!(hermite_phys(3, x), 8.0 * x.powi(3) - 12.0 * x);
        assert_eq!(hermite_phys(3, 1.0), -4.0);
    }

    #[test]
    fn terminating_2f1_examples() {
        assert_eq!(terminating_2f1(0, 5, 3, -1.0).unwrap(), 1.0);
        assert_eq!(terminating_2f1(0, -4, 7, 0.3).unwrap(), 1.0);
        assert_eq!(terminating_2f1(-1, -1, 1, -1.0).unwrap(), 0.0);
        // 1 + (-2)(-1)/(2·1)·(-1) + (-2)(-1)(-1)(0)/... = 1 - 1 + 0
        assert_eq!(terminating_2f1(-2, -1, 2, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn terminating_2f1_pole() {
        assert_eq!(terminating_2f1(-3, 2, -1, 0.5), Err(Error::Pole { c: -1, j: 1 }));
        // b terminates the series before c reaches zero
        assert!(terminating_2f1(-3, -1, -1, 0.5).is_ok());
        assert!(terminating_2f1(1, 1, 1, 0.5).is_err());
    }

    #[test]
    fn erf_accuracy() {
        assert_eq!(erf(0.0), 0.0);
        assert_relative_eq!(erf(1.0), 0.842_700_792_949_714_9, max_relative = 1e-14);
        assert_relative_eq!(erf(-0.5), -0.520_499_877_813_046_5, max_relative = 1e-14);
        assert_relative_eq!(
            1.0 - erf(5.0 / 2f64.sqrt()),
            5.733_031_437_583_878e-7,
            max_relative = 1e-9
        );
    }

    #[test]
    fn poisson_tail_matches_complement() {
        let mean = 4.0;
        let head: f64 = (0..=10).map(|k| poisson_pmf(k, mean)).sum();
        assert_relative_eq!(poisson_tail(10, mean), 1.0 - head, max_relative = 1e-9);
        assert_eq!(poisson_tail(0, 0.0), 0.0);
        assert_eq!(poisson_ln_pmf(0, 0.0), 0.0);
        assert_eq!(poisson_ln_pmf(3, 0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn log_weight_algebra() {
        let w = LogWeight::ln(2.0) + LogWeight::ln(3.0);
        assert_relative_eq!(w.exp(), 6.0, max_relative = 1e-15);
        assert_eq!(LogWeight::powi(0.0, 0), LogWeight::ONE);
        assert!(LogWeight::powi(0.0, 3).is_zero());
        assert_relative_eq!(LogWeight::ln(9.0).sqrt().exp(), 3.0, max_relative = 1e-15);
    }
}
