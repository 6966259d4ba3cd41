//! Brute-force reference path: Fock-basis beamsplitter matrix elements and
//! amplitudes built from truncated state vectors. Shares no closed forms with
//! [`crate::exactclicks`], so the two can check each other.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numkernel::log_factorial;
use crate::states::TruncatedFockVector;

/// Tail mass above which a missing support index is an error.
pub const SUPPORT_TAIL_TOL: f64 = 1e-10;

/// Largest total photon number `k + l` the integer sum handles exactly.
const EXACT_TOTAL_LIMIT: u64 = 120;

fn binomial_i128(n: u64, k: u64) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// `Σ_{i+j=n} C(k,i) C(l,j) (−1)^{l−j}`, exact for `k + l ≤ 120`.
pub fn bs_integer_sum(n: u64, m: u64, k: u64, l: u64) -> i128 {
    if n + m != k + l {
        return 0;
    }
    let mut sum: i128 = 0;
    for i in n.saturating_sub(l)..=n.min(k) {
        let j = n - i;
        let term = binomial_i128(k, i) * binomial_i128(l, j);
        if (l - j).is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

type Memo = RwLock<HashMap<(u64, u64, u64, u64), f64>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `⟨n, m| U |k, l⟩` for the 50:50 beamsplitter `a → (a+b)/√2`,
/// `b → (a−b)/√2`. The matrix is real and symmetric, so the row/column
/// convention does not matter. Results are memoized process-wide.
pub fn bs_element(n: u64, m: u64, k: u64, l: u64) -> f64 {
    if n + m != k + l {
        return 0.0;
    }
    let key = (n, m, k, l);
    if let Some(v) = memo().read().expect("memo lock").get(&key) {
        return *v;
    }
    let ln_scale = -0.5 * (k + l) as f64 * std::f64::consts::LN_2
        + 0.5 * (log_factorial(n) + log_factorial(m) - log_factorial(k) - log_factorial(l));
    let value = if k + l <= EXACT_TOTAL_LIMIT {
        let sum = bs_integer_sum(n, m, k, l);
        if sum == 0 {
            0.0
        } else {
            (sum as f64) * ln_scale.exp()
        }
    } else {
        let sum = bs_big_sum(n, m, k, l);
        // keep the leading 60 bits so the conversion to f64 cannot overflow
        let excess = sum.bits().saturating_sub(60);
        let mantissa = (&sum >> excess).to_f64().unwrap_or(0.0);
        mantissa * (ln_scale + excess as f64 * std::f64::consts::LN_2).exp()
    };
    memo().write().expect("memo lock").entry(key).or_insert(value);
    value
}

/// The same integer sum in arbitrary precision, for totals beyond `i128`.
pub fn bs_big_sum(n: u64, m: u64, k: u64, l: u64) -> BigInt {
    if n + m != k + l {
        return BigInt::zero();
    }
    let binom = |n: u64, r: u64| -> BigInt {
        let mut acc = BigInt::one();
        for i in 0..r {
            acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        acc
    };
    let mut sum = BigInt::zero();
    for i in n.saturating_sub(l)..=n.min(k) {
        let j = n - i;
        let term = binom(k, i) * binom(l, j);
        if (l - j).is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// Amplitude `Σ_k c_k d_{n+m−k} ⟨n,m|U|k, n+m−k⟩` for signal `c` on the
/// first input port and oscillator `d` on the second.
pub fn amplitude_bruteforce(
    n: u64,
    m: u64,
    signal: &TruncatedFockVector,
    lo: &TruncatedFockVector,
) -> Result<Complex64> {
    let total = (n + m) as usize;
    for v in [signal, lo] {
        if total > v.n_max() && v.tail_bound > SUPPORT_TAIL_TOL {
            return Err(Error::Cutoff {
                required: total,
                available: v.n_max(),
                tail: v.tail_bound,
            });
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=total.min(signal.n_max()) {
        let l = total - k;
        let (c, d) = (signal.get(k), lo.get(l));
        if c == Complex64::new(0.0, 0.0) || d == Complex64::new(0.0, 0.0) {
            continue;
        }
        acc += c * d * bs_element(n, m, k as u64, l as u64);
    }
    Ok(acc)
}
