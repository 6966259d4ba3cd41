use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A denominator Pochhammer factor vanished before the series terminated.
    #[error("hypergeometric pole: (c)_j vanishes at j = {j} for c = {c}")]
    Pole { c: i64, j: u64 },

    /// The odd cat |β⟩ − |−β⟩ is the zero vector at β = 0.
    #[error("degenerate cat state: minus superposition with |beta| = 0")]
    DegenerateCat,

    #[error("truncation tail {tail:e} exceeds tolerance {tol:e}")]
    Truncation { tail: f64, tol: f64 },

    #[error("Fock cutoff {available} cannot cover required support {required} (tail {tail:e})")]
    Cutoff {
        required: usize,
        available: usize,
        tail: f64,
    },

    #[error("sum/difference scale is zero (|beta| = 0)")]
    ZeroScale,

    #[error("degenerate outcome: the minus-parity branch vanishes at q = 0")]
    DegenerateOutcome,

    #[error("grid [{min}, {max}] does not contain ±{required}")]
    Grid { min: f64, max: f64, required: f64 },

    #[error("invalid state specification `{0}`")]
    InvalidSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
