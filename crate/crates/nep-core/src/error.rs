use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Every component of the spectrum carries a single value, so the
    /// per-letter information is a constant and all tilted variances vanish.
    #[error("degenerate spectrum: every component carries a single value, so sigma^2 = 0")]
    DegenerateSpectrum,

    /// The requested shift is at or beyond the supremum of reachable shifts.
    #[error("delta {delta} out of range: reachable shifts are [0, {delta_star})")]
    DeltaOutOfRange { delta: f64, delta_star: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A conditional required p(y) > 0 but the marginal vanished.
    #[error("zero marginal at index {0}")]
    ZeroMarginal(usize),

    /// The type distribution must put positive mass on every channel input.
    #[error("type distribution must have full support over the channel input alphabet")]
    NotFullSupport,

    #[error("operation requires a finite channel matrix")]
    FiniteChannelRequired,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("epsilon must lie in (0, 1), got {0}")]
    EpsilonOutOfRange(f64),

    /// Exact enumeration would exceed the configured size guard.
    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
