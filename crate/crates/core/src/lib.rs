//! Numerical toolkit for homodyne detection with coherent and Schrödinger-cat
//! local oscillators.
//!
//! The crate evaluates exact photon-counting statistics behind a 50:50
//! beamsplitter with number-resolving detectors, re-indexes them onto the
//! sum/difference lattice, compares them with the strong-oscillator limiting
//! densities, and produces the conditional wavefunctions of remote cat-state
//! preparation from a two-mode squeezed vacuum. The [`oracle`] module is a
//! brute-force Fock-space cross-check that shares no closed forms with
//! [`exactclicks`].

pub mod asymptotics;
pub mod error;
pub mod exactclicks;
pub mod format;
pub mod numkernel;
pub mod oracle;
pub mod remoteprep;
pub mod states;
pub mod sumdiff;

pub use num_complex::Complex64;

pub use asymptotics::{AsymptoticDensity, DensityKind, QuadratureAxis};
pub use error::{Error, Result};
pub use exactclicks::{ClickOutcome, JointClickDistribution};
pub use numkernel::{ComplexAmplitude, LogWeight};
pub use remoteprep::{GridSpec, Parity, RemoteOutcome, SqueezingParam, WavefunctionGrid};
pub use states::{CatParity, LoKind, LocalOscillator, SignalParity, SignalState, TruncatedFockVector};
pub use sumdiff::{ParityReport, SumDiffDistribution};
