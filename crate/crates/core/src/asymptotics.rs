//! Strong-oscillator limits: rotated quadrature-eigenstate overlaps, the
//! projector and reflection-symmetric densities, the `G`/`I` envelopes of the
//! cat-oscillator coherence terms, and a distance between finite-β lattice
//! marginals and their limiting density.

use std::f64::consts::{PI, SQRT_2};
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::format::{sig17, write_csv};
use crate::numkernel::{erf, faddeeva};
use crate::states::SignalState;
use crate::sumdiff::SumDiffDistribution;

/// `π^{−1/4}`.
const PI_QUARTER_INV: f64 = 0.751_125_544_464_942_5;

/// Quadrature `Q(θ) = (e^{−iθ}a + e^{iθ}a†)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureAxis {
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    /// `|⟨x_θ|ψ⟩|²`, the coherent-oscillator limit.
    Projector,
    /// `½(|⟨x_θ|ψ⟩|² + |⟨−x_θ|ψ⟩|²)`, the cat-oscillator limit.
    ReflectionSymmetric,
}

/// `⟨x_θ|α⟩ = π^{−1/4} exp(−x²/2 + √2 x e^{−iθ}α − (e^{−iθ}α)²/2 − |α|²/2)`.
pub fn overlap_coherent(x: f64, theta: f64, alpha: Complex64) -> Complex64 {
    let a = Complex64::from_polar(1.0, -theta) * alpha;
    let exponent = -0.5 * x * x + SQRT_2 * x * a - 0.5 * a * a - 0.5 * alpha.norm_sqr();
    exponent.exp() * PI_QUARTER_INV
}

/// Normalized oscillator eigenfunctions `⟨x|0⟩ … ⟨x|k_max⟩` by the stable
/// three-term recurrence.
fn hermite_functions(x: f64, k_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(PI_QUARTER_INV * (-0.5 * x * x).exp());
    if k_max >= 1 {
        out.push(SQRT_2 * x * out[0]);
    }
    for k in 1..k_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// `⟨x|κ⟩ = H_κ(x) e^{−x²/2} / (π^{1/4} √(2^κ κ!))`.
pub fn overlap_fock(x: f64, kappa: u32) -> f64 {
    hermite_functions(x, kappa as usize)[kappa as usize]
}

/// `⟨x_θ|signal⟩`; number states pick up `e^{−iκθ}`.
pub fn overlap_signal(x: f64, theta: f64, signal: &SignalState) -> Complex64 {
    match signal {
        SignalState::Vacuum => Complex64::new(overlap_fock(x, 0), 0.0),
        SignalState::Coherent { alpha } => overlap_coherent(x, theta, *alpha),
        SignalState::Fock { kappa } => Complex64::from_polar(overlap_fock(x, *kappa), -(*kappa as f64) * theta),
        SignalState::Custom { coeffs } => {
            let psi = hermite_functions(x, coeffs.len().saturating_sub(1));
            coeffs
                .iter()
                .zip(psi)
                .enumerate()
                .map(|(k, (c, p))| c * Complex64::from_polar(p, -(k as f64) * theta))
                .sum()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticDensity {
    pub kind: DensityKind,
    pub axis: QuadratureAxis,
    pub signal: SignalState,
}

impl AsymptoticDensity {
    pub fn new(kind: DensityKind, theta: f64, signal: SignalState) -> Self {
        AsymptoticDensity {
            kind,
            axis: QuadratureAxis { theta },
            signal,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        density(self.kind, self.axis.theta, &self.signal, x)
    }

    /// `∫_a^b` by 16-point Gauss–Legendre.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        GL16.iter()
            .map(|&(node, weight)| weight * self.eval(mid + half * node))
            .sum::<f64>()
            * half
    }

    /// CSV `x,density` on `n` evenly spaced points of `[lo, hi]`.
    pub fn write_grid<W: Write>(&self, out: W, lo: f64, hi: f64, n: usize) -> io::Result<()> {
        let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
        write_csv(
            out,
            &["x", "density"],
            (0..n).map(|i| {
                let x = lo + i as f64 * step;
                [sig17(x), sig17(self.eval(x))]
            }),
        )
    }
}

pub fn density(kind: DensityKind, theta: f64, signal: &SignalState, x: f64) -> f64 {
    let at = |x: f64| overlap_signal(x, theta, signal).norm_sqr();
    match kind {
        DensityKind::Projector => at(x),
        DensityKind::ReflectionSymmetric => 0.5 * (at(x) + at(-x)),
    }
}

/// `G(β) = ½[1 + erf(|β|/√2)]`, the weight of the diagonal terms.
pub fn envelope_g(beta_mag: f64) -> f64 {
    0.5 * (1.0 + erf(beta_mag / SQRT_2))
}

/// `I(β) = ∫_0^∞ e^{2√2iπ|β|w} e^{−(w−|β|/√2)²}/√π dw`, the weight of the
/// cross terms between `x` and `−x`. The opposite sign choice is the
/// complex conjugate.
///
/// The closed form `½ e^{iκμ−κ²/4} [1 + erf(μ + iκ/2)]` (with `μ = |β|/√2`,
/// `κ = 2√2π|β|`) overflows inside `erf`, so it is rewritten through the
/// Faddeeva function, which stays bounded in the upper half plane:
/// `I = e^{iκμ−κ²/4} − ½ e^{−μ²} w(iμ − κ/2)`.
pub fn envelope_i(beta_mag: f64) -> Complex64 {
    let mu = beta_mag / SQRT_2;
    let k = 2.0 * SQRT_2 * PI * beta_mag;
    let direct = Complex64::new(-0.25 * k * k, k * mu).exp();
    let tail = faddeeva(Complex64::new(-0.5 * k, mu)) * (0.5 * (-mu * mu).exp());
    direct - tail
}

/// Total-variation distance between the lattice `x` marginal and `dens`
/// integrated over one bin per occupied lattice point.
///
/// When every nonzero difference index shares one parity (cat oscillators
/// with a definite-parity signal) the support spacing is 2 and bins are
/// `2/scale` wide; otherwise they are `1/scale` wide. Density mass outside
/// the bins counts half, as it would if it sat on a lattice point of
/// zero probability.
pub fn convergence_metric(sd: &SumDiffDistribution, dens: &AsymptoticDensity) -> Result<f64> {
    let scale = sd.scale();
    let (even, odd) = sd.d_range().fold((false, false), |(e, o), d| {
        let occupied = sd.x_mass(d) != 0.0;
        (e || (occupied && d % 2 == 0), o || (occupied && d % 2 != 0))
    });
    let (spacing, residue) = match (even, odd) {
        (true, false) => (2, 0),
        (false, true) => (2, 1),
        _ => (1, 0),
    };
    let reach = (sd.n_max() as i64).max((12.0 * scale).ceil() as i64 + 2);
    let mut distance = 0.0;
    let mut covered = 0.0;
    for d in (-reach..=reach).filter(|d| spacing == 1 || d.rem_euclid(2) == residue) {
        let half = 0.5 * spacing as f64;
        let q = dens.integrate((d as f64 - half) / scale, (d as f64 + half) / scale);
        covered += q;
        distance += (sd.x_mass(d) - q).abs();
    }
    Ok(0.5 * distance + 0.5 * (1.0 - covered).max(0.0))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
const GL16: [(f64, f64); 16] = [
    (-0.989_400_934_991_649_9, 0.027_152_459_411_754_09),
    (-0.944_575_023_073_232_6, 0.062_253_523_938_647_89),
    (-0.865_631_202_387_831_7, 0.095_158_511_682_492_78),
    (-0.755_404_408_355_003, 0.124_628_971_255_533_9),
    (-0.617_876_244_402_643_7, 0.149_595_988_816_576_7),
    (-0.458_016_777_657_227_4, 0.169_156_519_395_002_5),
    (-0.281_603_550_779_258_9, 0.182_603_415_044_923_6),
    (-0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
    (0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
    (0.281_603_550_779_258_9, 0.182_603_415_044_923_6),
    (0.458_016_777_657_227_4, 0.169_156_519_395_002_5),
    (0.617_876_244_402_643_7, 0.149_595_988_816_576_7),
    (0.755_404_408_355_003, 0.124_628_971_255_533_9),
    (0.865_631_202_387_831_7, 0.095_158_511_682_492_78),
    (0.944_575_023_073_232_6, 0.062_253_523_938_647_89),
    (0.989_400_934_991_649_9, 0.027_152_459_411_754_09),
];
