//! Exact click amplitudes and joint count distributions behind a 50:50
//! beamsplitter with ideal (or finite-efficiency) number-resolving detectors.
//!
//! With the oscillator `|β⟩` on the second port, the amplitude of `n` clicks
//! at D1 and `m` at D2 is
//!
//! ```text
//! ⟨0| (a+β)^n (a−β)^m |signal⟩ · e^{−|β|²/2} / (2^{(n+m)/2} √(n! m!))
//! ```
//!
//! Cat oscillators take the symmetrized combination `[A(β) ± A(−β)] / 𝒩±(β)`.
//! Every amplitude is assembled as a log-space envelope times a
//! linear-space polynomial factor; only the envelope spans many decades.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{sig17, write_csv};
use crate::numkernel::{log_binomial, log_factorial, terminating_2f1, ComplexAmplitude};
use crate::states::{cat_norm, choose_cutoff, CatParity, LoKind, LocalOscillator, SignalState, DEFAULT_TAIL_TOL};

/// Largest Fock index a custom signal may occupy.
pub const CUSTOM_EXPANSION_DEPTH: usize = 256;

/// Largest truncation tail a joint distribution may carry.
pub const MAX_JOINT_TAIL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClickOutcome {
    /// Counts at D1.
    pub n: u64,
    /// Counts at D2.
    pub m: u64,
}

const LN_SQRT_2: f64 = 0.346_573_590_279_972_65;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Coherent-oscillator amplitude for a Fock signal `|κ⟩`, through the
/// terminating ₂F₁ form of `⟨0|(a+β)^n (a−β)^m|κ⟩`.
fn fock_amplitude(n: u64, m: u64, kappa: u64, beta: Complex64) -> Result<Complex64> {
    if n + m < kappa {
        return Ok(zero());
    }
    let excess = n + m - kappa;
    let b = beta.norm();
    if b == 0.0 && excess > 0 {
        return Ok(zero());
    }
    let (ln_binom, series, sign) = if m <= kappa {
        let f = terminating_2f1(
            -(m as i64),
            kappa as i64 - m as i64 - n as i64,
            1 + kappa as i64 - m as i64,
            -1.0,
        )?;
        (log_binomial(n, excess), f, 1.0)
    } else {
        let f = terminating_2f1(-(n as i64), -(kappa as i64), 1 + m as i64 - kappa as i64, -1.0)?;
        let sign = if (m - kappa).is_multiple_of(2) { 1.0 } else { -1.0 };
        (log_binomial(m, m - kappa), f, sign)
    };
    if series == 0.0 {
        return Ok(zero());
    }
    let ln_power = if excess == 0 { 0.0 } else { excess as f64 * b.ln() };
    let ln_mag = -0.5 * b * b - (n + m) as f64 * LN_SQRT_2 - 0.5 * (log_factorial(n) + log_factorial(m))
        + 0.5 * log_factorial(kappa)
        + ln_binom
        + ln_power
        + series.abs().ln();
    let sign = sign * series.signum();
    Ok(Complex64::from_polar(sign * ln_mag.exp(), excess as f64 * beta.arg()))
}

/// Coherent amplitude `e^{−|γ|²/2} γ^k / √k!`.
fn coherent_coefficient(k: u64, gamma: Complex64) -> Complex64 {
    let r = gamma.norm();
    if r == 0.0 {
        return if k == 0 { Complex64::new(1.0, 0.0) } else { zero() };
    }
    let ln_mag = -0.5 * r * r + k as f64 * r.ln() - 0.5 * log_factorial(k);
    Complex64::from_polar(ln_mag.exp(), k as f64 * gamma.arg())
}

/// Coherent signal `|α⟩`: the two output ports are independent coherent
/// states with amplitudes `(α ± β)/√2`.
fn coherent_signal_amplitude(n: u64, m: u64, alpha: Complex64, beta: Complex64) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    coherent_coefficient(n, (alpha + beta) * s) * coherent_coefficient(m, (alpha - beta) * s)
}

fn custom_coeffs(coeffs: &[Complex64]) -> Result<&[Complex64]> {
    if coeffs.len() > CUSTOM_EXPANSION_DEPTH + 1 {
        let tail = coeffs[CUSTOM_EXPANSION_DEPTH + 1..].iter().map(|c| c.norm_sqr()).sum();
        return Err(Error::Cutoff {
            required: coeffs.len() - 1,
            available: CUSTOM_EXPANSION_DEPTH,
            tail,
        });
    }
    Ok(coeffs)
}

/// Exact amplitude for a coherent oscillator `|β⟩`.
pub fn amp_coherent_lo(n: u64, m: u64, beta: Complex64, signal: &SignalState) -> Result<ComplexAmplitude> {
    match signal {
        SignalState::Vacuum => fock_amplitude(n, m, 0, beta),
        SignalState::Fock { kappa } => fock_amplitude(n, m, *kappa as u64, beta),
        SignalState::Coherent { alpha } => Ok(coherent_signal_amplitude(n, m, *alpha, beta)),
        SignalState::Custom { coeffs } => {
            let mut acc = zero();
            for (kappa, c) in custom_coeffs(coeffs)?.iter().enumerate() {
                if *c != zero() {
                    acc += c * fock_amplitude(n, m, kappa as u64, beta)?;
                }
            }
            Ok(acc)
        }
    }
}

/// Exact amplitude for a cat oscillator `(|β⟩ ± |−β⟩)/𝒩±(β)`.
///
/// For number-state components `A(−β) = (−1)^{n+m−κ} A(β)`, so the
/// interference factor `1 ± (−1)^{n+m−κ}` is applied as an exact 0 or 2.
pub fn amp_cat_lo(
    n: u64,
    m: u64,
    beta: Complex64,
    parity: CatParity,
    signal: &SignalState,
) -> Result<ComplexAmplitude> {
    let norm = cat_norm(parity, beta.norm())?;
    let fock_term = |kappa: u64| -> Result<Complex64> {
        if n + m < kappa || (n + m - kappa) % 2 != parity.residue() {
            return Ok(zero());
        }
        Ok(fock_amplitude(n, m, kappa, beta)? * (2.0 / norm))
    };
    match signal {
        SignalState::Vacuum => fock_term(0),
        SignalState::Fock { kappa } => fock_term(*kappa as u64),
        SignalState::Coherent { alpha } => {
            let plus = coherent_signal_amplitude(n, m, *alpha, beta);
            let minus = coherent_signal_amplitude(n, m, *alpha, -beta);
            Ok((plus + minus * parity.sign()) / norm)
        }
        SignalState::Custom { coeffs } => {
            let mut acc = zero();
            for (kappa, c) in custom_coeffs(coeffs)?.iter().enumerate() {
                if *c != zero() {
                    acc += c * fock_term(kappa as u64)?;
                }
            }
            Ok(acc)
        }
    }
}

/// Ideal click probability for any oscillator kind.
pub fn click_probability(n: u64, m: u64, lo: &LocalOscillator, signal: &SignalState) -> Result<f64> {
    let beta = lo.beta();
    match lo.kind() {
        LoKind::Coherent => Ok(amp_coherent_lo(n, m, beta, signal)?.norm_sqr()),
        LoKind::Cat(parity) => Ok(amp_cat_lo(n, m, beta, parity, signal)?.norm_sqr()),
        LoKind::Mixed => {
            let p = amp_coherent_lo(n, m, beta, signal)?.norm_sqr();
            let q = amp_coherent_lo(n, m, -beta, signal)?.norm_sqr();
            Ok(0.5 * (p + q))
        }
    }
}

/// Photon-number mass of signal ⊗ oscillator above `n_max`. The grid
/// `[0, n_max]²` holds every outcome with `n + m ≤ n_max`, so this bounds
/// the mass missing from it.
pub fn combined_tail(lo: &LocalOscillator, signal: &SignalState, n_max: usize) -> f64 {
    let b = lo.magnitude();
    let total_mean = b * b + signal.mean_photon_number();
    let extra = match signal {
        SignalState::Fock { kappa } => *kappa as usize,
        SignalState::Custom { coeffs } => coeffs.len(),
        _ => 0,
    };
    let t_max = n_max.max((total_mean + 40.0 * total_mean.sqrt() + 100.0).ceil() as usize + extra);
    let lo_pmf = lo.photon_pmf(t_max);
    let sig_pmf = signal.photon_pmf(t_max);
    // sum from the far end so small terms accumulate first
    (n_max + 1..=t_max)
        .rev()
        .map(|t| (0..=t).map(|k| sig_pmf[k] * lo_pmf[t - k]).sum::<f64>())
        .sum()
}

/// Joint probabilities `P(n, m)` on `[0, n_max]²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointClickDistribution {
    probs: Vec<f64>,
    n_max: usize,
    tail_bound: f64,
    lo: LocalOscillator,
    signal: SignalState,
    eta: f64,
}

/// Parameter record emitted alongside a serialized distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub lo: String,
    pub signal: String,
    pub n_max: usize,
    pub tail_bound: f64,
    pub eta: f64,
    pub total_mass: f64,
}

impl JointClickDistribution {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn lo(&self) -> &LocalOscillator {
        &self.lo
    }

    pub fn signal(&self) -> &SignalState {
        &self.signal
    }

    pub fn prob(&self, n: usize, m: usize) -> f64 {
        if n > self.n_max || m > self.n_max {
            return 0.0;
        }
        self.probs[n * (self.n_max + 1) + m]
    }

    /// Row-major cell values, `n` outer.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let width = self.n_max + 1;
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (i / width, i % width, p))
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Distribution of D1 counts.
    pub fn marginal_n(&self) -> Vec<f64> {
        self.probs.chunks(self.n_max + 1).map(|row| row.iter().sum()).collect()
    }

    /// Distribution of D2 counts.
    pub fn marginal_m(&self) -> Vec<f64> {
        let width = self.n_max + 1;
        (0..width)
            .map(|m| (0..width).map(|n| self.probs[n * width + m]).sum())
            .collect()
    }

    pub fn mean_total_count(&self) -> f64 {
        self.cells().map(|(n, m, p)| (n + m) as f64 * p).sum()
    }

    /// Mean and variance of `x = (n − m)/(√2|β|)`.
    pub fn difference_moments(&self) -> Result<(f64, f64)> {
        let scale = std::f64::consts::SQRT_2 * self.lo.magnitude();
        if scale == 0.0 {
            return Err(Error::ZeroScale);
        }
        let x = |n: usize, m: usize| (n as f64 - m as f64) / scale;
        let mass = self.total_mass();
        let mean = self.cells().map(|(n, m, p)| x(n, m) * p).sum::<f64>() / mass;
        let var = self.cells().map(|(n, m, p)| (x(n, m) - mean).powi(2) * p).sum::<f64>() / mass;
        Ok((mean, var))
    }

    /// Finite-efficiency smearing: each detector reports `n'` of `n` photons
    /// with probability `C(n, n') η^{n'} (1−η)^{n−n'}`. `η = 1` returns an
    /// identical copy.
    pub fn smear(&self, eta: f64) -> Result<JointClickDistribution> {
        check_eta(eta)?;
        let combined = self.eta * eta;
        if eta == 1.0 {
            return Ok(self.clone());
        }
        let width = self.n_max + 1;
        let weights = binomial_weights(self.n_max, eta);
        let w = |k: usize, j: usize| weights[k * width + j];

        // thin the D2 counts, then the D1 counts
        let partial: Vec<f64> = (0..width)
            .into_par_iter()
            .flat_map_iter(|n| {
                let row = &self.probs[n * width..(n + 1) * width];
                (0..width).map(move |mp| (mp..width).map(|m| w(m, mp) * row[m]).sum::<f64>())
            })
            .collect();
        let probs: Vec<f64> = (0..width)
            .into_par_iter()
            .flat_map_iter(|np| {
                let partial = &partial;
                (0..width).map(move |mp| (np..width).map(|n| w(n, np) * partial[n * width + mp]).sum::<f64>())
            })
            .collect();

        Ok(JointClickDistribution {
            probs,
            n_max: self.n_max,
            tail_bound: self.tail_bound,
            lo: self.lo,
            signal: self.signal.clone(),
            eta: combined,
        })
    }

    pub fn summary(&self) -> DistributionSummary {
        DistributionSummary {
            lo: self.lo.to_string(),
            signal: self.signal.to_string(),
            n_max: self.n_max,
            tail_bound: self.tail_bound,
            eta: self.eta,
            total_mass: self.total_mass(),
        }
    }

    /// CSV with columns `n,m,prob`, one row per grid cell.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_csv(
            out,
            &["n", "m", "prob"],
            self.cells().map(|(n, m, p)| [n.to_string(), m.to_string(), sig17(p)]),
        )
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "efficiency must lie in (0, 1], got {eta}"
        )))
    }
}

/// `C(k, j) η^j (1−η)^{k−j}` as a row-major `(n_max+1)²` table.
fn binomial_weights(n_max: usize, eta: f64) -> Vec<f64> {
    let width = n_max + 1;
    let (ln_eta, ln_loss) = (eta.ln(), (1.0 - eta).ln());
    let mut table = vec![0.0; width * width];
    for k in 0..width {
        for j in 0..=k {
            let lost = k - j;
            let ln_w = log_binomial(k as u64, j as u64)
                + if j == 0 { 0.0 } else { j as f64 * ln_eta }
                + if lost == 0 { 0.0 } else { lost as f64 * ln_loss };
            table[k * width + j] = ln_w.exp();
        }
    }
    table
}

/// Joint click distribution. `n_max = None` picks the cutoff with
/// [`choose_cutoff`]; `eta < 1` applies detector inefficiency.
pub fn joint_distribution(
    lo: &LocalOscillator,
    signal: &SignalState,
    n_max: Option<usize>,
    eta: f64,
) -> Result<JointClickDistribution> {
    check_eta(eta)?;
    if let SignalState::Custom { coeffs } = signal {
        custom_coeffs(coeffs)?;
    }
    let n_max = n_max.unwrap_or_else(|| choose_cutoff(lo, signal, DEFAULT_TAIL_TOL));
    let tail_bound = combined_tail(lo, signal, n_max);
    if tail_bound > MAX_JOINT_TAIL {
        return Err(Error::Truncation {
            tail: tail_bound,
            tol: MAX_JOINT_TAIL,
        });
    }
    let width = n_max + 1;
    let rows: Vec<Vec<f64>> = (0..width)
        .into_par_iter()
        .map(|n| {
            (0..width)
                .map(|m| click_probability(n as u64, m as u64, lo, signal))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let ideal = JointClickDistribution {
        probs: rows.into_iter().flatten().collect(),
        n_max,
        tail_bound,
        lo: *lo,
        signal: signal.clone(),
        eta: 1.0,
    };
    ideal.smear(eta)
}
