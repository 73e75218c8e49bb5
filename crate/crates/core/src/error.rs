use thiserror::Error;

use crate::constants::Regime;

/// Everything that can go wrong in the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("accuracy check failed: {0}")]
    Accuracy(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "quadrature did not converge: estimate {value}, error estimate {error:e} after {subdivisions} subdivisions"
    )]
    Quadrature { value: f64, error: f64, subdivisions: usize },

    #[error("no sign change found: {0}")]
    NoBracket(String),

    #[error("N has no zeros in the strip for mu = {mu} (mu0 = {mu0})")]
    NoZeros { mu: f64, mu0: f64 },

    #[error("regime mismatch: expected {expected:?}, found {found:?}")]
    RegimeMismatch { expected: Regime, found: Regime },

    #[error("w = 0 is not a point of the cut plane")]
    Origin,

    #[error("point {0} lies on the cut [0, inf) without a coast tag")]
    OnCut(f64),

    #[error("evaluation at a pole: {0}")]
    Pole(String),

    #[error("a(x) vanishes at x = {x:e}")]
    ZeroSymbol { x: f64 },

    #[error("principal branch of Ln a(x) violated: max |arg a| = {max_arg} at ln x = {at_log_x}")]
    PrincipalBranch { max_arg: f64, at_log_x: f64 },

    #[error("phase step {step} >= pi at ln x = {at_log_x}: grid too coarse")]
    PhaseStep { step: f64, at_log_x: f64 },

    #[error("point outside the support of the sampled data: {0}")]
    OutOfSupport(String),

    #[error("residue reconciliation failed at {pole}: limit {limit}, contour {contour}, relative gap {gap:e}")]
    ResidueMismatch { pole: &'static str, limit: String, contour: String, gap: f64 },

    #[error("spectrum detection disagrees with the ladder: {0}")]
    SpectrumMismatch(String),

    #[error("input does not decay: {0}")]
    NonDecaying(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
