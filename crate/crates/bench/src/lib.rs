//! Shared workloads for the criterion benches.

use catodyne_core::{CatParity, LocalOscillator, SignalState};

/// Oscillator strengths spanning the weak-to-strong regimes.
pub const BETAS: [f64; 3] = [1.0, 3.0, 5.0];

/// Signals exercised by every bench group, with a short label.
pub fn signals() -> Vec<(&'static str, SignalState)> {
    vec![
        ("vacuum", SignalState::Vacuum),
        ("coherent", SignalState::coherent(1.6, 0.0)),
        ("fock3", SignalState::fock(3)),
    ]
}

pub fn plus_cat(beta: f64) -> LocalOscillator {
    LocalOscillator::cat(CatParity::Plus, beta, 0.0).expect("positive amplitude")
}

pub fn coherent(beta: f64) -> LocalOscillator {
    LocalOscillator::coherent(beta, 0.0).expect("positive amplitude")
}
