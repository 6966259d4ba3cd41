//! Remote preparation of position-space cat states: one half of a two-mode
//! squeezed vacuum is measured with a cat oscillator in the strong-oscillator
//! limit, leaving the other half in a superposition of two squeezed lobes.

use std::f64::consts::{LN_10, PI};
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{sig17, write_csv};
use crate::states::CatParity;

/// The sign recorded by the sum variable; `Plus` keeps the even
/// combination of lobes.
pub type Parity = CatParity;

/// Lobes must stay this many widths inside the grid.
const GRID_MARGIN_WIDTHS: f64 = 6.0;

/// Two-mode squeezing strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingParam {
    r: f64,
}

impl SqueezingParam {
    pub fn new(r: f64) -> Result<Self> {
        if r >= 0.0 && r.is_finite() {
            Ok(SqueezingParam { r })
        } else {
            Err(Error::InvalidParameter(format!(
                "squeezing must be finite and >= 0, got {r}"
            )))
        }
    }

    /// From decibels, `r = r_dB · ln 10 / 20`.
    pub fn from_db(db: f64) -> Result<Self> {
        if !(db >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "squeezing in dB must be >= 0, got {db}"
            )));
        }
        Self::new(db_to_r(db))
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `10 log₁₀ e^{2r}`.
    pub fn db(&self) -> f64 {
        r_to_db(self.r)
    }
}

pub fn r_to_db(r: f64) -> f64 {
    20.0 * r / LN_10
}

pub fn db_to_r(db: f64) -> f64 {
    db * LN_10 / 20.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemoteOutcome {
    pub q: f64,
    pub parity: Parity,
}

/// Uniform grid `min, min + step, …` up to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridSpec {
    /// `±(|q| tanh 2r + 8σ)` with `σ = 1/√(2 cosh 2r)`, spacing `σ/50`.
    pub fn default_for(outcome: &RemoteOutcome, r: SqueezingParam) -> Self {
        let sigma = lobe_width(r);
        let step = sigma / 50.0;
        // whole number of steps per side keeps the grid mirror-symmetric
        let half = step * ((lobe_center(outcome.q, r) + 8.0 * sigma) / step).ceil();
        GridSpec {
            min: -half,
            max: half,
            step,
        }
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.min + i as f64 * self.step)
    }
}

fn lobe_width(r: SqueezingParam) -> f64 {
    1.0 / (2.0 * (2.0 * r.r).cosh()).sqrt()
}

fn lobe_center(q: f64, r: SqueezingParam) -> f64 {
    q.abs() * (2.0 * r.r).tanh()
}

/// Sampled conditional wavefunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionGrid {
    pub xs: Vec<f64>,
    pub psi: Vec<Complex64>,
    pub dx: f64,
}

impl WavefunctionGrid {
    /// `Σ |ψ|² dx`.
    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * self.dx
    }

    /// CSV `x,re_psi,im_psi,abs2`.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_csv(
            out,
            &["x", "re_psi", "im_psi", "abs2"],
            self.xs
                .iter()
                .zip(&self.psi)
                .map(|(x, p)| [sig17(*x), sig17(p.re), sig17(p.im), sig17(p.norm_sqr())]),
        )
    }
}

/// Normalized post-measurement state of the retained mode,
///
/// ```text
/// ψ(x) = (C/2π)^{1/4} e^{K/2} / √(e^K ± 1) · [e^{−C(x+c)²} ± e^{−C(x−c)²}]
/// ```
///
/// with `C = cosh 2r`, `c = q tanh 2r` and `K = 2q² sinh 2r tanh 2r`. The
/// prefactor is evaluated as `¼ ln(C/2π) − ½ ln(1 ± e^{−K})`, which cannot
/// overflow however large `K` gets.
pub fn remote_wavefunction(outcome: &RemoteOutcome, r: SqueezingParam, grid: &GridSpec) -> Result<WavefunctionGrid> {
    if !outcome.q.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "outcome q must be finite, got {}",
            outcome.q
        )));
    }
    if !(grid.step > 0.0) || !(grid.max > grid.min) {
        return Err(Error::InvalidParameter(format!(
            "grid needs min < max and step > 0, got [{}, {}] step {}",
            grid.min, grid.max, grid.step
        )));
    }
    let two_r = 2.0 * r.r;
    let big_c = two_r.cosh();
    let shift = outcome.q * two_r.tanh();
    let k = 2.0 * outcome.q * outcome.q * two_r.sinh() * two_r.tanh();

    let ln_overlap = match outcome.parity {
        CatParity::Plus => (-k).exp().ln_1p(),
        CatParity::Minus => {
            if k == 0.0 {
                return Err(Error::DegenerateOutcome);
            }
            (-(-k).exp_m1()).ln()
        }
    };
    let required = lobe_center(outcome.q, r) + GRID_MARGIN_WIDTHS * lobe_width(r);
    if grid.min > -required || grid.max < required {
        return Err(Error::Grid {
            min: grid.min,
            max: grid.max,
            required,
        });
    }

    let prefactor = (0.25 * (big_c / (2.0 * PI)).ln() - 0.5 * ln_overlap).exp();
    let sign = outcome.parity.sign();
    let xs: Vec<f64> = grid.points().collect();
    let psi = xs
        .iter()
        .map(|&x| {
            let left = (-big_c * (x + shift).powi(2)).exp();
            let right = (-big_c * (x - shift).powi(2)).exp();
            Complex64::new(prefactor * (left + sign * right), 0.0)
        })
        .collect();
    Ok(WavefunctionGrid { xs, psi, dx: grid.step })
}

/// Density of the outcome `q`: `√(2 sech 2r / π) e^{−2q² sech 2r}`.
pub fn prob_q(q: f64, r: SqueezingParam) -> f64 {
    let sech = 1.0 / (2.0 * r.r).cosh();
    (2.0 * sech / PI).sqrt() * (-2.0 * q * q * sech).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sq(r: f64) -> SqueezingParam {
        SqueezingParam::new(r).unwrap()
    }

    fn plus(q: f64) -> RemoteOutcome {
        RemoteOutcome {
            q,
            parity: CatParity::Plus,
        }
    }

    fn minus(q: f64) -> RemoteOutcome {
        RemoteOutcome {
            q,
            parity: CatParity::Minus,
        }
    }

    #[test]
    fn decibel_conversions() {
        assert_relative_eq!(sq(0.345).db(), 2.996_632, epsilon = 1e-6);
        assert!((sq(0.345).db() - 2.997).abs() < 1e-3);
        assert_eq!(sq(0.0).db(), 0.0);
        assert_relative_eq!(SqueezingParam::from_db(12.0).unwrap().r(), 1.381_551, epsilon = 1e-6);
        assert!(SqueezingParam::from_db(-1.0).is_err());
    }

    #[test]
    fn outcome_density_values() {
        assert_relative_eq!(prob_q(0.0, sq(0.0)), (2.0 / PI).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(prob_q(0.0, sq(0.0)), 0.797_885, epsilon = 1e-6);
        let p = prob_q(2.0, sq(0.345));
        assert!((p - 1.173e-3).abs() < 1e-6, "{p}");
    }

    #[test]
    fn twelve_db_lobes() {
        let r = SqueezingParam::from_db(12.0).unwrap();
        let grid = GridSpec {
            min: -6.0,
            max: 6.0,
            step: 0.005,
        };
        let wf = remote_wavefunction(&plus(2.0), r, &grid).unwrap();
        assert!((wf.norm() - 1.0).abs() < 1e-6);
        let peak = wf
            .xs
            .iter()
            .zip(&wf.psi)
            .filter(|(x, _)| **x > 0.0)
            .max_by(|a, b| a.1.re.total_cmp(&b.1.re))
            .unwrap();
        assert!((peak.0 - 2.0 * (2.0 * r.r()).tanh()).abs() < 0.01, "{}", peak.0);
        assert!((2.0 * (2.0 * r.r()).tanh() - 1.984).abs() < 1e-3);
        // lobes are separated: the midpoint carries almost nothing
        let mid = wf.psi[wf.xs.len() / 2].norm_sqr();
        assert!(mid < 1e-20);
    }

    #[test]
    fn zero_outcome_collapses_to_one_gaussian() {
        let r = sq(0.6);
        let wf = remote_wavefunction(&plus(0.0), r, &GridSpec::default_for(&plus(0.0), r)).unwrap();
        let c = (1.2f64).cosh();
        let ratio = |x: f64, p: Complex64| p.re / (-c * x * x).exp();
        let first = ratio(wf.xs[0], wf.psi[0]);
        for (x, p) in wf.xs.iter().zip(&wf.psi).step_by(97) {
            assert_relative_eq!(ratio(*x, *p), first, max_relative = 1e-9);
        }
    }

    #[test]
    fn degenerate_and_grid_errors() {
        let r = sq(1.0);
        let grid = GridSpec {
            min: -6.0,
            max: 6.0,
            step: 0.01,
        };
        assert_eq!(
            remote_wavefunction(&minus(0.0), r, &grid),
            Err(Error::DegenerateOutcome)
        );
        let narrow = GridSpec {
            min: -1.0,
            max: 1.0,
            step: 0.01,
        };
        assert!(matches!(
            remote_wavefunction(&plus(2.0), r, &narrow),
            Err(Error::Grid { .. })
        ));
    }

    #[test]
    fn large_outcomes_do_not_overflow() {
        let r = SqueezingParam::from_db(12.0).unwrap();
        for o in [plus(3.0), minus(3.0), plus(30.0)] {
            let wf = remote_wavefunction(&o, r, &GridSpec::default_for(&o, r)).unwrap();
            assert!(wf.psi.iter().all(|p| p.re.is_finite()));
            assert!((wf.norm() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn outcome_density_integrates_to_one() {
        for r in [0.0, 0.345, 1.382, 2.5] {
            let r = sq(r);
            let sigma = 0.5 / (1.0 / (2.0 * r.r()).cosh()).sqrt();
            let (a, n) = (-10.0 * sigma, 20_000);
            let h = 20.0 * sigma / n as f64;
            let mut s = prob_q(a, r) + prob_q(-a, r);
            for i in 1..n {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * prob_q(a + i as f64 * h, r);
            }
            assert!((s * h / 3.0 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn strong_squeezing_lobe_geometry() {
        let r = sq(2.0);
        let q = 1.5;
        let o = plus(q);
        let wf = remote_wavefunction(&o, r, &GridSpec::default_for(&o, r)).unwrap();
        let right: Vec<(f64, f64)> = wf
            .xs
            .iter()
            .zip(&wf.psi)
            .filter(|(x, _)| **x > 0.0)
            .map(|(x, p)| (*x, p.norm_sqr()))
            .collect();
        let mass: f64 = right.iter().map(|p| p.1).sum();
        let center = right.iter().map(|(x, p)| x * p).sum::<f64>() / mass;
        let var = right.iter().map(|(x, p)| (x - center).powi(2) * p).sum::<f64>() / mass;
        assert!((center - q).abs() <= q * (1.0 - 4f64.tanh()) + 0.05 * q);
        let want_width2 = 1.0 / (2.0 * 4f64.cosh());
        assert!(((2.0 * var) - want_width2).abs() <= 0.05 * want_width2);
    }

    proptest! {
        #[test]
        fn normalized_with_definite_parity(q in -3.0f64..3.0, r in 0.05f64..2.0, odd in any::<bool>()) {
            let o = RemoteOutcome { q, parity: if odd { CatParity::Minus } else { CatParity::Plus } };
            let r = sq(r);
            prop_assume!(!(odd && q.abs() < 1e-3));
            let wf = remote_wavefunction(&o, r, &GridSpec::default_for(&o, r)).unwrap();
            prop_assert!((wf.norm() - 1.0).abs() <= 1e-6);
            let n = wf.psi.len();
            for i in 0..n / 2 {
                let (a, b) = (wf.psi[i].re, wf.psi[n - 1 - i].re);
                let defect = if odd { a + b } else { a - b };
                prop_assert!(defect.abs() <= 1e-10);
            }
        }

        #[test]
        fn decibels_round_trip(r in 0.0f64..5.0) {
            prop_assert!((db_to_r(r_to_db(r)) - r).abs() <= 1e-12);
            prop_assert!(r_to_db(r + 1e-3) > r_to_db(r));
        }
    }
}
