//! Critical values `μ₀`, `μ₁` and the regime classification of `μ`.

use serde::{Deserialize, Serialize};

use crate::config::{LambdaMethod, QuadratureConfig};
use crate::error::{Error, Result};
use crate::kernels::{self, sqrt_term};
use crate::quad;

const SCAN_POINTS: usize = 2000;

/// Width in `μ` of the band classified as a double zero.
pub const DOUBLE_ZERO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstants {
    pub mu0: f64,
    pub mu1: f64,
    pub m0: f64,
    pub m1: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    SelfAdjoint,
    ImaginaryPairZeros,
    DoubleZero,
    RealLineZeros,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::SelfAdjoint => "SelfAdjoint",
            Regime::ImaginaryPairZeros => "ImaginaryPairZeros",
            Regime::DoubleZero => "DoubleZero",
            Regime::RealLineZeros => "RealLineZeros",
        }
    }
}

/// Scan `(0, 2)` for the unique sign change of `g` and refine it by bisection.
fn unique_root<G: Fn(f64) -> Result<f64>>(g: G, xtol: f64, what: &str) -> Result<f64> {
    let h = 2.0 / SCAN_POINTS as f64;
    let mut prev_mu = 0.5 * h;
    let mut prev = g(prev_mu)?;
    let mut bracket = None;
    let mut changes = 0;
    for k in 1..SCAN_POINTS {
        let mu = (k as f64 + 0.5) * h;
        let cur = g(mu)?;
        if cur.signum() != prev.signum() {
            changes += 1;
            bracket.get_or_insert((prev_mu, mu));
        }
        prev_mu = mu;
        prev = cur;
    }
    let (a, b) = bracket.ok_or_else(|| Error::NoBracket(format!("{what}: no sign change on (0, 2)")))?;
    if changes != 1 {
        return Err(Error::NoBracket(format!("{what}: {changes} sign changes, expected exactly one")));
    }
    // Errors inside the closure cannot escape bisect; evaluate to NaN and re-check.
    let root = quad::bisect(|mu| g(mu).unwrap_or(f64::NAN), a, b, xtol)?;
    g(root)?;
    Ok(root)
}

fn root_tol(cfg: &QuadratureConfig) -> f64 {
    (cfg.abs_tol * 1e-4).max(1e-15)
}

/// `μ₀`: the root of `√(1 − (μ/2)²) = q₀(μ)`.
pub fn find_mu0(cfg: &QuadratureConfig) -> Result<f64> {
    unique_root(|mu| Ok(sqrt_term(mu) - kernels::q0(mu, cfg)?), root_tol(cfg), "mu0")
}

/// `μ₁`: the root of `√(1 − (μ/2)²) = q₁(μ)`, solved with the closed form of
/// `q₁` and cross-checked against the quadrature route.
pub fn find_mu1(cfg: &QuadratureConfig) -> Result<f64> {
    let mu1 = unique_root(|mu| Ok(sqrt_term(mu) - kernels::q1_closed(mu)?), root_tol(cfg), "mu1")?;
    let check = QuadratureConfig { lambda_method: LambdaMethod::Quadrature, ..*cfg };
    let gap = (kernels::q1(mu1, &check)? - kernels::q1_closed(mu1)?).abs();
    if gap > 10.0 * cfg.abs_tol.max(cfg.rel_tol) {
        return Err(Error::Accuracy(format!("q1 closed form and quadrature differ by {gap:e}")));
    }
    Ok(mu1)
}

impl CriticalConstants {
    pub fn compute(cfg: &QuadratureConfig) -> Result<Self> {
        let mu0 = find_mu0(cfg)?;
        let mu1 = find_mu1(cfg)?;
        if !(0.0 < mu0 && mu0 < mu1 && mu1 < 2.0) {
            return Err(Error::Domain(format!("expected 0 < mu0 < mu1 < 2, got {mu0}, {mu1}")));
        }
        Ok(CriticalConstants { mu0, mu1, m0: 2.0 / mu0 - 1.0, m1: 2.0 / mu1 - 1.0, tol: DOUBLE_ZERO_TOL })
    }

    /// Constants at the default configuration, computed once per process.
    pub fn standard() -> &'static CriticalConstants {
        use std::sync::OnceLock;
        static CONSTS: OnceLock<CriticalConstants> = OnceLock::new();
        CONSTS.get_or_init(|| {
            CriticalConstants::compute(&QuadratureConfig::default())
                .expect("critical constants at the default configuration")
        })
    }
}

pub fn classify(mu: f64, c: &CriticalConstants) -> Regime {
    if (mu - c.mu1).abs() <= c.tol {
        Regime::DoubleZero
    } else if mu > c.mu1 {
        Regime::RealLineZeros
    } else if mu > c.mu0 {
        Regime::ImaginaryPairZeros
    } else {
        Regime::SelfAdjoint
    }
}
