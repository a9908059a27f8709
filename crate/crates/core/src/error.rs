//! Error taxonomy shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its admissible domain.
    #[error("parameter `{name}` = {value} outside {bound}")]
    ParamDomain {
        name: &'static str,
        value: f64,
        bound: &'static str,
    },

    /// Input series or sample set is too short for the requested operation.
    #[error("input too short: {len} samples, need at least {min}")]
    TooShort { len: usize, min: usize },

    /// A size is not supported by the transform-length policy.
    #[error("unsupported size {n}: {reason}")]
    Size { n: usize, reason: &'static str },

    /// Quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Accuracy { achieved: f64, requested: f64 },

    /// A grid function has not decayed at the domain edges; a periodic
    /// (spectral) operation would alias the wrapped tails.
    #[error("density not decayed at grid edges: edge/peak = {edge_fraction:.3e} exceeds {limit:.3e}")]
    Aliasing { edge_fraction: f64, limit: f64 },

    /// Grids are too coarse or mismatched for interpolation.
    #[error("insufficient grid resolution: {0}")]
    Resolution(String),

    /// Not enough data for a statistical estimate.
    #[error("insufficient statistics: {0}")]
    Statistics(String),

    /// A power-law fit could not be performed on the given range.
    #[error("power-law fit failed: {0}")]
    Fit(String),

    /// Malformed configuration input.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
