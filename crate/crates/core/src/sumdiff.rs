//! Re-indexing of a joint click distribution onto the difference/sum lattice
//! `d = n − m`, `s = n + m`. Physical coordinates are `x = d/scale` and
//! `w = s/scale` with `scale = √2|β|`.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactclicks::JointClickDistribution;
use crate::format::{sig17, write_csv};
use crate::states::{LoKind, LocalOscillator, SignalParity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumDiffDistribution {
    entries: BTreeMap<(i64, u64), f64>,
    scale: f64,
    n_max: usize,
    marginal_x: Vec<f64>,
    marginal_w: Vec<f64>,
    lo: LocalOscillator,
    eta: f64,
}

/// Moves every nonzero cell of `joint` to `(n − m, n + m)`. Probabilities are
/// copied, never combined, since the map is one-to-one.
pub fn to_sumdiff(joint: &JointClickDistribution) -> Result<SumDiffDistribution> {
    let magnitude = joint.lo().magnitude();
    if magnitude == 0.0 {
        return Err(Error::ZeroScale);
    }
    let n_max = joint.n_max();
    let mut entries = BTreeMap::new();
    let mut marginal_x = vec![0.0; 2 * n_max + 1];
    let mut marginal_w = vec![0.0; 2 * n_max + 1];
    for (n, m, p) in joint.cells() {
        if p == 0.0 {
            continue;
        }
        let d = n as i64 - m as i64;
        let s = (n + m) as u64;
        entries.insert((d, s), p);
        marginal_x[(d + n_max as i64) as usize] += p;
        marginal_w[s as usize] += p;
    }
    Ok(SumDiffDistribution {
        entries,
        scale: std::f64::consts::SQRT_2 * magnitude,
        n_max,
        marginal_x,
        marginal_w,
        lo: *joint.lo(),
        eta: joint.eta(),
    })
}

impl SumDiffDistribution {
    /// `√2|β|`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn lo(&self) -> &LocalOscillator {
        &self.lo
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Nonzero lattice cells keyed by `(d, s)`.
    pub fn entries(&self) -> &BTreeMap<(i64, u64), f64> {
        &self.entries
    }

    pub fn prob(&self, d: i64, s: u64) -> f64 {
        self.entries.get(&(d, s)).copied().unwrap_or(0.0)
    }

    /// Mass per difference index, position `d + n_max`.
    pub fn marginal_x(&self) -> &[f64] {
        &self.marginal_x
    }

    /// Mass per sum index `s`.
    pub fn marginal_w(&self) -> &[f64] {
        &self.marginal_w
    }

    /// Lattice mass at difference index `d`.
    pub fn x_mass(&self, d: i64) -> f64 {
        let i = d + self.n_max as i64;
        if i < 0 {
            return 0.0;
        }
        self.marginal_x.get(i as usize).copied().unwrap_or(0.0)
    }

    pub fn d_range(&self) -> std::ops::RangeInclusive<i64> {
        -(self.n_max as i64)..=self.n_max as i64
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Mean and variance of the physical difference variable `x`.
    pub fn x_moments(&self) -> (f64, f64) {
        let mass: f64 = self.marginal_x.iter().sum();
        let xs = self.d_range().map(|d| d as f64 / self.scale);
        let mean = xs.clone().zip(&self.marginal_x).map(|(x, p)| x * p).sum::<f64>() / mass;
        let var = xs
            .zip(&self.marginal_x)
            .map(|(x, p)| (x - mean).powi(2) * p)
            .sum::<f64>()
            / mass;
        (mean, var)
    }

    /// CSV `d,s,prob` over the nonzero cells, ordered by `(d, s)`.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_csv(
            out,
            &["d", "s", "prob"],
            self.entries
                .iter()
                .map(|(&(d, s), &p)| [d.to_string(), s.to_string(), sig17(p)]),
        )
    }

    /// CSV `d,x,prob`.
    pub fn write_marginal_x<W: Write>(&self, out: W) -> io::Result<()> {
        write_csv(
            out,
            &["d", "x", "prob"],
            self.d_range()
                .zip(&self.marginal_x)
                .map(|(d, &p)| [d.to_string(), sig17(d as f64 / self.scale), sig17(p)]),
        )
    }

    /// CSV `s,w,prob`.
    pub fn write_marginal_w<W: Write>(&self, out: W) -> io::Result<()> {
        write_csv(
            out,
            &["s", "w", "prob"],
            self.marginal_w
                .iter()
                .enumerate()
                .map(|(s, &p)| [s.to_string(), sig17(s as f64 / self.scale), sig17(p)]),
        )
    }
}

/// Mass carried by each parity class of `d` and `s`. Since `d ≡ s (mod 2)`
/// the two splits coincide, but both are reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub d_even: f64,
    pub d_odd: f64,
    pub s_even: f64,
    pub s_odd: f64,
    /// For a cat oscillator with ideal detectors and a definite-parity
    /// signal: the forbidden residue of `s` modulo 2.
    pub suppressed_s_residue: Option<u64>,
    /// Mass found on the forbidden class; exactly 0 when the selection rule
    /// holds.
    pub suppressed_mass: Option<f64>,
}

impl ParityReport {
    pub fn selection_rule_holds(&self) -> bool {
        self.suppressed_mass.is_none_or(|m| m == 0.0)
    }
}

pub fn parity_report(sd: &SumDiffDistribution, signal_parity: SignalParity) -> ParityReport {
    let mut report = ParityReport {
        d_even: 0.0,
        d_odd: 0.0,
        s_even: 0.0,
        s_odd: 0.0,
        suppressed_s_residue: None,
        suppressed_mass: None,
    };
    for (&(d, s), &p) in &sd.entries {
        if d.rem_euclid(2) == 0 {
            report.d_even += p;
        } else {
            report.d_odd += p;
        }
        if s % 2 == 0 {
            report.s_even += p;
        } else {
            report.s_odd += p;
        }
    }
    if let (LoKind::Cat(parity), Some(sig), true) = (sd.lo.kind(), signal_parity.residue(), sd.eta == 1.0) {
        // allowed totals satisfy s ≡ κ + cat residue
        let forbidden = (sig + parity.residue() + 1) % 2;
        report.suppressed_s_residue = Some(forbidden);
        report.suppressed_mass = Some(if forbidden == 0 { report.s_even } else { report.s_odd });
    }
    report
}
