use thiserror::Error;

/// Side of a point at which one-sided quantities are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => f.write_str("left"),
            Side::Right => f.write_str("right"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The requested zero was not reached before the radial ceiling.
    #[error("zero {n} beyond range: searched up to r = {searched}")]
    ZeroBeyondRange { n: usize, searched: f64 },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("insufficient samples on the {side} side: need {needed}, have {available}")]
    InsufficientSamples {
        side: Side,
        needed: usize,
        available: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("seam mismatch at q = {q}: low branch {low}, high branch {high}")]
    SeamMismatch { q: f64, low: f64, high: f64 },

    #[error("partial-wave truncation: |delta(L_max)| = {last} exceeds tolerance {tol}; increase L_max")]
    Truncation { last: f64, tol: f64 },

    #[error("line ends at r = {line_end} but the last jump is at r = {last_jump}: support not covered")]
    SupportNotCovered { line_end: f64, last_jump: f64 },

    #[error("breakpoint near r = {r} lies within the junction exclusion window (half-width {window})")]
    Unresolvable { r: f64, window: f64 },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
