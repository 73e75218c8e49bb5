//! Spectral analysis of the `l = 1` Ter-Martirosyan–Skornyakov operator for a
//! system of two fermions and a third particle.
//!
//! The crate computes the critical mass constants, the zeros of the symbol
//! `N(z)`, explicit eigenfunctions of the adjoint operator, the geometric ladder
//! of negative eigenvalues of every self-adjoint extension, the perturbation
//! brackets and the induced Efimov energy sequence.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cauchy;
pub mod cli;
pub mod cmath;
pub mod config;
pub mod constants;
pub mod eigen;
pub mod error;
pub mod kernels;
pub mod mellin;
pub mod quad;
pub mod spectrum;
pub mod verify;
pub mod zeros;

pub use config::{LambdaMethod, QuadratureConfig};
pub use constants::{classify, CriticalConstants, Regime};
pub use error::{Error, Result};
pub use kernels::{MassParams, StripPoint};
pub use mellin::{Coast, CutPlanePoint, SampledFunction};
pub use zeros::ZeroData;
