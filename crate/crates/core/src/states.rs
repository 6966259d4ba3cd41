//! Signal states, local-oscillator specifications and their truncated Fock
//! expansions.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{log_factorial, poisson_ln_pmf, poisson_pmf, poisson_tail};

/// Default tolerance on the photon-number mass discarded by truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Custom signal vectors must be normalized to this tolerance.
const CUSTOM_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalState {
    Vacuum,
    Coherent { alpha: Complex64 },
    Fock { kappa: u32 },
    Custom { coeffs: Vec<Complex64> },
}

/// Photon-number parity of a signal, when it has one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalParity {
    Even,
    Odd,
    Indefinite,
}

impl SignalParity {
    /// Residue of the photon number modulo 2, if definite.
    pub fn residue(self) -> Option<u64> {
        match self {
            SignalParity::Even => Some(0),
            SignalParity::Odd => Some(1),
            SignalParity::Indefinite => None,
        }
    }
}

impl SignalState {
    pub fn coherent(re: f64, im: f64) -> Self {
        SignalState::Coherent {
            alpha: Complex64::new(re, im),
        }
    }

    pub fn fock(kappa: u32) -> Self {
        SignalState::Fock { kappa }
    }

    /// A custom superposition `Σ c_k |k⟩`; the vector must be normalized.
    pub fn custom(coeffs: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > CUSTOM_NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "custom signal has squared norm {norm}, expected 1"
            )));
        }
        Ok(SignalState::Custom { coeffs })
    }

    pub fn mean_photon_number(&self) -> f64 {
        match self {
            SignalState::Vacuum => 0.0,
            SignalState::Coherent { alpha } => alpha.norm_sqr(),
            SignalState::Fock { kappa } => *kappa as f64,
            SignalState::Custom { coeffs } => coeffs.iter().enumerate().map(|(k, c)| k as f64 * c.norm_sqr()).sum(),
        }
    }

    pub fn parity(&self) -> SignalParity {
        match self {
            SignalState::Vacuum => SignalParity::Even,
            SignalState::Coherent { alpha } if *alpha == Complex64::new(0.0, 0.0) => SignalParity::Even,
            SignalState::Coherent { .. } => SignalParity::Indefinite,
            SignalState::Fock { kappa } if kappa % 2 == 0 => SignalParity::Even,
            SignalState::Fock { .. } => SignalParity::Odd,
            SignalState::Custom { coeffs } => {
                let occupied = |r: usize| coeffs.iter().enumerate().any(|(k, c)| k % 2 == r && c.norm_sqr() > 0.0);
                match (occupied(0), occupied(1)) {
                    (true, false) => SignalParity::Even,
                    (false, true) => SignalParity::Odd,
                    _ => SignalParity::Indefinite,
                }
            }
        }
    }

    /// Photon-number distribution on `0..=t_max`.
    pub fn photon_pmf(&self, t_max: usize) -> Vec<f64> {
        let mut pmf = vec![0.0; t_max + 1];
        match self {
            SignalState::Vacuum => pmf[0] = 1.0,
            SignalState::Coherent { alpha } => {
                let mean = alpha.norm_sqr();
                for (k, p) in pmf.iter_mut().enumerate() {
                    *p = poisson_pmf(k as u64, mean);
                }
            }
            SignalState::Fock { kappa } => {
                if let Some(p) = pmf.get_mut(*kappa as usize) {
                    *p = 1.0;
                }
            }
            SignalState::Custom { coeffs } => {
                for (p, c) in pmf.iter_mut().zip(coeffs) {
                    *p = c.norm_sqr();
                }
            }
        }
        pmf
    }

    pub fn to_fock(&self, n_max: usize) -> Result<TruncatedFockVector> {
        self.to_fock_with_tolerance(n_max, DEFAULT_TAIL_TOL)
    }

    pub fn to_fock_with_tolerance(&self, n_max: usize, tol: f64) -> Result<TruncatedFockVector> {
        let zero = Complex64::new(0.0, 0.0);
        let mut coeffs = vec![zero; n_max + 1];
        let tail_bound = match self {
            SignalState::Vacuum => {
                coeffs[0] = Complex64::new(1.0, 0.0);
                0.0
            }
            SignalState::Coherent { alpha } => {
                fill_coherent(&mut coeffs, *alpha);
                poisson_tail(n_max as u64, alpha.norm_sqr())
            }
            SignalState::Fock { kappa } => match coeffs.get_mut(*kappa as usize) {
                Some(c) => {
                    *c = Complex64::new(1.0, 0.0);
                    0.0
                }
                None => 1.0,
            },
            SignalState::Custom { coeffs: src } => {
                for (dst, c) in coeffs.iter_mut().zip(src) {
                    *dst = *c;
                }
                src.iter().skip(n_max + 1).map(|c| c.norm_sqr()).sum()
            }
        };
        TruncatedFockVector::checked(coeffs, tail_bound, tol)
    }
}

impl fmt::Display for SignalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalState::Vacuum => write!(f, "vacuum"),
            SignalState::Coherent { alpha } if alpha.im == 0.0 => write!(f, "coherent:{}", alpha.re),
            SignalState::Coherent { alpha } => write!(f, "coherent:{},{}", alpha.re, alpha.im),
            SignalState::Fock { kappa } => write!(f, "fock:{kappa}"),
            SignalState::Custom { coeffs } => write!(f, "custom[{}]", coeffs.len()),
        }
    }
}

impl FromStr for SignalState {
    type Err = Error;

    /// Parses `vacuum`, `coherent:RE[,IM]` or `fock:K`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(s.to_string());
        let s = s.trim();
        if s == "vacuum" {
            return Ok(SignalState::Vacuum);
        }
        let (head, args) = s.split_once(':').ok_or_else(bad)?;
        match head {
            "coherent" => {
                let (re, im) = parse_pair(args).ok_or_else(bad)?;
                Ok(SignalState::coherent(re, im))
            }
            "fock" => args.trim().parse().map(SignalState::fock).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

/// Sign of a cat superposition `|β⟩ ± |−β⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatParity {
    Plus,
    Minus,
}

impl CatParity {
    pub fn sign(self) -> f64 {
        match self {
            CatParity::Plus => 1.0,
            CatParity::Minus => -1.0,
        }
    }

    /// Photon-number residue mod 2 carried by the cat.
    pub fn residue(self) -> u64 {
        match self {
            CatParity::Plus => 0,
            CatParity::Minus => 1,
        }
    }
}

impl fmt::Display for CatParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CatParity::Plus => "+",
            CatParity::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoKind {
    Coherent,
    Cat(CatParity),
    /// Equal classical mixture of `|β⟩` and `|−β⟩`.
    Mixed,
}

/// Local oscillator with amplitude `β = |β| e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalOscillator {
    kind: LoKind,
    magnitude: f64,
    theta: f64,
}

impl LocalOscillator {
    pub fn new(kind: LoKind, magnitude: f64, theta: f64) -> Result<Self> {
        if !(magnitude >= 0.0) || !magnitude.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "local oscillator needs finite |beta| >= 0 and finite theta, got ({magnitude}, {theta})"
            )));
        }
        if kind == LoKind::Cat(CatParity::Minus) && magnitude == 0.0 {
            return Err(Error::DegenerateCat);
        }
        Ok(LocalOscillator { kind, magnitude, theta })
    }

    pub fn coherent(magnitude: f64, theta: f64) -> Result<Self> {
        Self::new(LoKind::Coherent, magnitude, theta)
    }

    pub fn cat(parity: CatParity, magnitude: f64, theta: f64) -> Result<Self> {
        Self::new(LoKind::Cat(parity), magnitude, theta)
    }

    pub fn mixed(magnitude: f64, theta: f64) -> Result<Self> {
        Self::new(LoKind::Mixed, magnitude, theta)
    }

    pub fn kind(&self) -> LoKind {
        self.kind
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.theta)
    }

    /// Photon-number distribution on `0..=t_max`.
    pub fn photon_pmf(&self, t_max: usize) -> Vec<f64> {
        let mean = self.magnitude * self.magnitude;
        match self.kind {
            LoKind::Coherent | LoKind::Mixed => (0..=t_max).map(|k| poisson_pmf(k as u64, mean)).collect(),
            LoKind::Cat(parity) => (0..=t_max).map(|k| cat_pmf(parity, mean, k as u64)).collect(),
        }
    }

    /// Truncated Fock expansion of a pure oscillator state. The mixed
    /// oscillator has no state vector.
    pub fn to_fock(&self, n_max: usize) -> Result<TruncatedFockVector> {
        self.to_fock_with_tolerance(n_max, DEFAULT_TAIL_TOL)
    }

    pub fn to_fock_with_tolerance(&self, n_max: usize, tol: f64) -> Result<TruncatedFockVector> {
        let beta = self.beta();
        let mean = self.magnitude * self.magnitude;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n_max + 1];
        let tail = match self.kind {
            LoKind::Coherent => {
                fill_coherent(&mut coeffs, beta);
                poisson_tail(n_max as u64, mean)
            }
            LoKind::Cat(parity) => {
                let norm = cat_norm(parity, self.magnitude)?;
                fill_coherent(&mut coeffs, beta);
                for (k, c) in coeffs.iter_mut().enumerate() {
                    *c = if k as u64 % 2 == parity.residue() {
                        *c * (2.0 / norm)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                }
                cat_tail(parity, mean, n_max as u64)
            }
            LoKind::Mixed => {
                return Err(Error::InvalidParameter(
                    "a mixed local oscillator has no Fock state vector".into(),
                ))
            }
        };
        TruncatedFockVector::checked(coeffs, tail, tol)
    }
}

impl fmt::Display for LocalOscillator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.kind {
            LoKind::Coherent => "coherent",
            LoKind::Cat(CatParity::Plus) => "cat+",
            LoKind::Cat(CatParity::Minus) => "cat-",
            LoKind::Mixed => "mixed",
        };
        if self.theta == 0.0 {
            write!(f, "{head}:{}", self.magnitude)
        } else {
            write!(f, "{head}:{},{}", self.magnitude, self.theta)
        }
    }
}

impl FromStr for LocalOscillator {
    type Err = Error;

    /// Parses `coherent:MAG[,THETA]`, `cat+:MAG[,THETA]`, `cat-:MAG[,THETA]`
    /// or `mixed:MAG[,THETA]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(s.to_string());
        let (head, args) = s.trim().split_once(':').ok_or_else(bad)?;
        let kind = match head {
            "coherent" => LoKind::Coherent,
            "cat+" => LoKind::Cat(CatParity::Plus),
            "cat-" => LoKind::Cat(CatParity::Minus),
            "mixed" => LoKind::Mixed,
            _ => return Err(bad()),
        };
        let (magnitude, theta) = parse_pair(args).ok_or_else(bad)?;
        LocalOscillator::new(kind, magnitude, theta)
    }
}

fn parse_pair(args: &str) -> Option<(f64, f64)> {
    let mut parts = args.split(',').map(str::trim);
    let first = parts.next()?.parse().ok()?;
    let second = match parts.next() {
        Some(p) => p.parse().ok()?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return None;
    }
    Some((first, second))
}

/// `𝒩±(β) = √(2(1 ± e^{−2|β|²}))`.
pub fn cat_norm(parity: CatParity, magnitude: f64) -> Result<f64> {
    let overlap = match parity {
        CatParity::Plus => 1.0 + (-2.0 * magnitude * magnitude).exp(),
        CatParity::Minus => {
            if magnitude == 0.0 {
                return Err(Error::DegenerateCat);
            }
            -(-2.0 * magnitude * magnitude).exp_m1()
        }
    };
    Ok((2.0 * overlap).sqrt())
}

/// Photon-number pmf of a cat: twice the Poisson weight on the allowed
/// parity, renormalized by `1 ± e^{−2|β|²}`.
fn cat_pmf(parity: CatParity, mean: f64, k: u64) -> f64 {
    if k % 2 != parity.residue() {
        return 0.0;
    }
    let overlap = match parity {
        CatParity::Plus => 1.0 + (-2.0 * mean).exp(),
        CatParity::Minus => -(-2.0 * mean).exp_m1(),
    };
    (std::f64::consts::LN_2 + poisson_ln_pmf(k, mean) - overlap.ln()).exp()
}

fn cat_tail(parity: CatParity, mean: f64, n_max: u64) -> f64 {
    let mut sum = 0.0;
    let mut k = n_max + 1;
    loop {
        let term = cat_pmf(parity, mean, k);
        sum += term;
        if (k as f64) > mean && k % 2 == parity.residue() && (term == 0.0 || term < 1e-18 * sum) {
            break;
        }
        k += 1;
    }
    sum
}

fn fill_coherent(coeffs: &mut [Complex64], alpha: Complex64) {
    let r = alpha.norm();
    let phase = alpha.arg();
    for (k, c) in coeffs.iter_mut().enumerate() {
        *c = if r == 0.0 {
            if k == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else {
            let ln_mag = -0.5 * r * r + k as f64 * r.ln() - 0.5 * log_factorial(k as u64);
            Complex64::from_polar(ln_mag.exp(), k as f64 * phase)
        };
    }
}

/// Fock coefficients `c_0..c_N` plus the probability mass discarded above `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedFockVector {
    pub coeffs: Vec<Complex64>,
    pub tail_bound: f64,
}

impl TruncatedFockVector {
    fn checked(coeffs: Vec<Complex64>, tail_bound: f64, tol: f64) -> Result<Self> {
        if tail_bound > tol {
            return Err(Error::Truncation { tail: tail_bound, tol });
        }
        Ok(TruncatedFockVector { coeffs, tail_bound })
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩` over the common support.
    pub fn inner(&self, other: &TruncatedFockVector) -> Complex64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }
}

/// Smallest `N` whose combined oscillator + signal photon-number tail above
/// `N` is below `tail_tol`, floored at `|β|² + 10|β| + n̄_signal + 10`.
pub fn choose_cutoff(lo: &LocalOscillator, signal: &SignalState, tail_tol: f64) -> usize {
    let b = lo.magnitude();
    let signal_mean = signal.mean_photon_number();
    let floor = (b * b + 10.0 * b + signal_mean + 10.0).ceil() as usize;

    let total_mean = b * b + signal_mean;
    let extra = match signal {
        SignalState::Fock { kappa } => *kappa as usize,
        SignalState::Custom { coeffs } => coeffs.len(),
        _ => 0,
    };
    let t_max = (total_mean + 40.0 * total_mean.sqrt() + 100.0).ceil() as usize + extra;
    let lo_pmf = lo.photon_pmf(t_max);
    let sig_pmf = signal.photon_pmf(t_max);
    let total: Vec<f64> = (0..=t_max)
        .map(|t| (0..=t).map(|k| sig_pmf[k] * lo_pmf[t - k]).sum())
        .collect();

    // tail[t] = mass strictly above t, accumulated from the far end
    let mut tail = 0.0;
    let mut cutoff = t_max;
    for t in (0..t_max).rev() {
        tail += total[t + 1];
        if tail >= tail_tol {
            break;
        }
        cutoff = t;
    }
    cutoff.max(floor)
}
