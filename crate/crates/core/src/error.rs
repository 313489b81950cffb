//! Error type shared across the crate.

/// Errors surfaced by sequence evaluation, matrix access, and the certifiers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Arithmetic on the exact-integer path left the `i64` range.
    #[error("integer overflow on the exact-value path")]
    ValueOverflow,

    /// A requested window would materialize more cells than the configured cap.
    #[error("window of {cells} cells exceeds the cap of {cap}")]
    WindowTooLarge { cells: u64, cap: u64 },

    /// `catalog` was asked for a name it does not know.
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    /// `witness` was asked for an inclusion id that is not registered.
    #[error("unknown inclusion `{0}`")]
    UnknownInclusion(String),

    /// An L_q exponent outside `1 <= q < inf`.
    #[error("exponent q must satisfy 1 <= q < inf, got {0}")]
    InvalidExponent(f64),

    /// An index outside the domain of the operation (e.g. `phi` at 0).
    #[error("index out of domain: {0}")]
    IndexOutOfDomain(String),

    /// A window schedule that is too short or not strictly increasing.
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    /// A configuration value that fails validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A sequence, matrix, or space description that does not parse.
    #[error("invalid input: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
