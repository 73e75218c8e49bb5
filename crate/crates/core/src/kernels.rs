//! Analytic symbols: `v(x)`, `Λ(z)`, `N(z)`, the normalised `N̂*(w)`, the
//! boundary curves `q₀`, `q₁` and the symbol of the bounded part `M₁`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmath::{expm1, I, TWO_PI};
use crate::config::{LambdaMethod, QuadratureConfig};
use crate::error::{Error, Result};
use crate::mellin::CutPlanePoint;
use crate::quad;

pub const TWO_PI_SQ: f64 = 2.0 * PI * PI;

/// Mass of the third particle together with the reduced parameter `μ = 2/(m+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassParams {
    pub m: f64,
    pub mu: f64,
}

impl MassParams {
    pub fn from_mu(mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(MassParams { m: 2.0 / mu - 1.0, mu })
    }

    pub fn from_m(m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Domain(format!("mass m must be finite and > 0, got {m}")));
        }
        Ok(MassParams { m, mu: 2.0 / (m + 1.0) })
    }

    /// `√(1 − (μ/2)²)`.
    pub fn sqrt_term(&self) -> f64 {
        sqrt_term(self.mu)
    }
}

pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 && mu < 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("mu must lie in (0, 2), got {mu}")))
    }
}

/// `√(1 − (μ/2)²)`, factored to stay accurate as `μ → 2`.
pub fn sqrt_term(mu: f64) -> f64 {
    ((1.0 - 0.5 * mu) * (1.0 + 0.5 * mu)).sqrt()
}

/// A point of the closed strip `0 ≤ Im z ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripPoint {
    pub z: Complex64,
}

impl StripPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && (0.0..=1.0).contains(&z.im) {
            Ok(StripPoint { z })
        } else {
            Err(Error::Domain(format!("z = {z} is outside the strip 0 <= Im z <= 1")))
        }
    }

    /// Point on the middle line `Im z = 1/2`.
    pub fn on_line(s: f64) -> Self {
        StripPoint { z: Complex64::new(s, 0.5) }
    }
}

/// `arcsin(μx/2)`.
pub fn v(x: f64, mu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1], got {x}")));
    }
    check_mu(mu)?;
    Ok((0.5 * mu * x).asin())
}

/// `sh(uζ)/sh(πζ/2)` for `Re ζ ≥ 0`, written with decaying exponentials only.
fn sh_ratio(u: f64, zeta: Complex64) -> Complex64 {
    if zeta.norm() < 1e-150 {
        return Complex64::new(u / FRAC_PI_2, 0.0);
    }
    (zeta * (u - FRAC_PI_2)).exp() * expm1(-2.0 * u * zeta) / expm1(-PI * zeta)
}

/// `Λ` as a function of `ζ = z − i/2`, from the exact antiderivative.
///
/// `Λ` is even in `ζ`, so the evaluation is folded onto `Re ζ ≥ 0`. Close to
/// `ζ = 0`, where the antiderivative cancels, the `u`-integral is summed with a
/// fixed Gauss-Legendre rule instead.
pub(crate) fn lambda_zeta(zeta: Complex64, mu: f64) -> Complex64 {
    let zeta = if zeta.re < 0.0 { -zeta } else { zeta };
    let big_v = (0.5 * mu).asin();
    let sv = 0.5 * mu;
    let cv = sqrt_term(mu);
    let scale = 4.0 / (mu * mu);
    if zeta.norm() * big_v <= 1.0 {
        let (nodes, weights) = quad::gauss_legendre_24();
        let half = 0.5 * big_v;
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in nodes.iter().zip(weights) {
            let u = half * (1.0 + x);
            acc += sh_ratio(u, zeta) * (w * u.sin());
        }
        return acc * (half * scale);
    }
    let e = (-2.0 * big_v * zeta).exp();
    let num = 0.5 * (zeta * sv * (1.0 + e) + cv * expm1(-2.0 * big_v * zeta));
    let den = (zeta * zeta + 1.0) * (-0.5 * expm1(-PI * zeta));
    num / den * (zeta * (big_v - FRAC_PI_2)).exp() * scale
}

/// `Λ(z)` by tanh-sinh quadrature of the defining integral over `x ∈ [0, 1]`.
pub fn lambda_quadrature(z: StripPoint, mu: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    check_mu(mu)?;
    let zeta = z.z - 0.5 * I;
    let zeta = if zeta.re < 0.0 { -zeta } else { zeta };
    let half_mu = 0.5 * mu;
    let patched = zeta.norm() < 1e-6;
    let integrand = |x: f64, _da: f64, db: f64| -> Complex64 {
        // cos v(x) = √((1 − μx/2)(1 + μx/2)) with 1 − μx/2 formed from the distance to x = 1.
        let one_minus = (1.0 - half_mu) + half_mu * db;
        let cos_v = (one_minus * (1.0 + half_mu * x)).sqrt();
        let vx = (half_mu * x).asin();
        let ratio = if patched { Complex64::new(vx / FRAC_PI_2, 0.0) } else { sh_ratio(vx, zeta) };
        ratio * (x / cos_v)
    };
    Ok(quad::tanh_sinh(integrand, 0.0, 1.0, cfg)?.value)
}

/// `Λ(z)` on the closed strip, by the method selected in `cfg`.
pub fn lambda_fn(z: StripPoint, mu: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    check_mu(mu)?;
    match cfg.lambda_method {
        LambdaMethod::ClosedForm => Ok(lambda_zeta(z.z - 0.5 * I, mu)),
        LambdaMethod::Quadrature => lambda_quadrature(z, mu, cfg),
    }
}

/// `N(z) = 2π²(√(1 − (μ/2)²) − Λ(z))`.
pub fn n_fn(z: StripPoint, mu: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let lam = lambda_fn(z, mu, cfg)?;
    Ok(TWO_PI_SQ * (sqrt_term(mu) - lam))
}

fn real_part_checked(value: Complex64, what: &str, cfg: &QuadratureConfig) -> Result<f64> {
    let tol = cfg.abs_tol.max(cfg.rel_tol * value.norm());
    if value.im.abs() > tol {
        return Err(Error::Accuracy(format!("{what} should be real but has imaginary part {:e}", value.im)));
    }
    Ok(value.re)
}

/// `N(i/2 + s)`, which is real on the middle line.
pub fn n_on_line(s: f64, mu: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let n = n_fn(StripPoint::on_line(s), mu, cfg)?;
    real_part_checked(n, "N on the middle line", cfg)
}

/// `N(it)` for `t ∈ [0, 1]`, which is real on the imaginary segment.
pub fn n_on_axis(t: f64, mu: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let n = n_fn(StripPoint::new(Complex64::new(0.0, t))?, mu, cfg)?;
    real_part_checked(n, "N on the imaginary segment", cfg)
}

/// Normalised symbol `N̂*(w) = 1 − Λ(ln w / 2π)/√(1 − (μ/2)²)`.
pub fn n_star_w(w: CutPlanePoint, mu: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let z = w.ln()? / TWO_PI;
    // The cut-plane branch keeps Im z in (0, 1]; the upper coast gives exactly 0.
    let lam = lambda_fn(StripPoint { z }, mu, cfg)?;
    Ok(1.0 - lam / sqrt_term(mu))
}

/// `N̂*` on the lower coast at `x = e^y`, i.e. at `z = y/2π + i`.
pub(crate) fn n_star_lower(y: f64, mu: f64) -> Complex64 {
    1.0 - lambda_zeta(Complex64::new(y / TWO_PI, 0.5), mu) / sqrt_term(mu)
}

/// `N̂*` on the negative axis `w = −e^{2πσ}`, i.e. at `z = σ + i/2`; real there.
pub(crate) fn n_star_line(sigma: f64, mu: f64) -> f64 {
    1.0 - lambda_zeta(Complex64::new(sigma, 0.0), mu).re / sqrt_term(mu)
}

/// `q₀(μ) = Λ(0)`.
pub fn q0(mu: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let lam = lambda_fn(StripPoint { z: Complex64::new(0.0, 0.0) }, mu, cfg)?;
    real_part_checked(lam, "q0", cfg)
}

/// `q₁(μ) = Λ(i/2)`.
pub fn q1(mu: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let lam = lambda_fn(StripPoint::on_line(0.0), mu, cfg)?;
    real_part_checked(lam, "q1", cfg)
}

/// Closed form `q₁(μ) = (8/(πμ²))(μ/2 − arcsin(μ/2)√(1 − μ²/4))`.
pub fn q1_closed(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let big_v = (0.5 * mu).asin();
    Ok(8.0 / (PI * mu * mu) * (0.5 * mu - big_v * sqrt_term(mu)))
}

/// Symbol of `M₁`: `2π²(√((1 − (μ/2)²)r² + 1) − √(1 − (μ/2)²) r)`.
pub fn m1_symbol(r: f64, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("r must be >= 0, got {r}")));
    }
    let a = sqrt_term(mu) * r;
    // Rationalised difference of square roots, exact for large r.
    Ok(TWO_PI_SQ / ((a * a + 1.0).sqrt() + a))
}

/// Supremum of the `M₁` symbol, attained at `r = 0`.
pub fn m1_symbol_sup(mu: f64) -> Result<f64> {
    m1_symbol(0.0, mu)
}
