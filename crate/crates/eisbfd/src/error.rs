//! Error type shared by the whole crate.

use thiserror::Error;

/// Unified error type for grid construction, operator application, time
/// integration, filtering, and the convergence harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid or operator was asked for fewer cells than the interior stencil
    /// can support.
    #[error("invalid size: {0}")]
    InvalidSize(String),

    /// Non-positive domain length or otherwise unusable geometry.
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    /// A field's length does not match the grid it is claimed to live on.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A Dirichlet operation was requested without boundary data.
    #[error("missing boundary data: {0}")]
    MissingBoundaryData(String),

    /// The requested combination (e.g. 3D Dirichlet) is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Requested time step violates the explicit stability bound.
    #[error("time step {dt:e} exceeds the stability bound; largest stable dt is {suggested:e} (pass an override to proceed anyway)")]
    UnstableDt { dt: f64, suggested: f64 },

    /// A non-finite value appeared during time integration.
    #[error("divergence: non-finite values at step {step} (t = {t:e}, dt = {dt:e}, {n} unknowns)")]
    Divergence { step: usize, t: f64, dt: f64, n: usize },

    /// Dense assembly was requested beyond the configured size cap.
    #[error("size cap exceeded: {rows} rows requested, cap is {cap}")]
    SizeCap { rows: usize, cap: usize },

    /// A stability certification found a violation.
    #[error("certification failure: {0}")]
    Certification(String),

    /// Bad flag/config combination at the command-line level.
    #[error("usage: {0}")]
    Usage(String),

    /// Underlying I/O failure (CSV output, config file reading).
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
