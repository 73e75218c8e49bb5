//! The zero pair `z±` of `N(z)` in the strip and its image `w± = e^{2πz±}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmath::{wrap_angle, I, TWO_PI};
use crate::config::QuadratureConfig;
use crate::constants::{classify, CriticalConstants, Regime};
use crate::error::{Error, Result};
use crate::kernels::{self, sqrt_term, StripPoint};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroData {
    pub mu: f64,
    pub regime: Regime,
    pub z_plus: Complex64,
    pub z_minus: Complex64,
    pub t0: Option<f64>,
    pub s0: Option<f64>,
    /// Complex in general: on the unit circle for an imaginary pair, negative real otherwise.
    pub w_plus: Complex64,
    pub w_minus: Complex64,
}

const ROOT_XTOL: f64 = 1e-15;

fn from_offset(mu: f64, regime: Regime, dz: Complex64, t0: Option<f64>, s0: Option<f64>) -> ZeroData {
    let centre = 0.5 * I;
    let z_plus = centre + dz;
    // Built as i − z₊ so that z₊ + z₋ = i holds exactly in floating point.
    let z_minus = I - z_plus;
    let (w_plus, w_minus) = match (t0, s0) {
        (_, Some(s)) => (Complex64::new(-(TWO_PI * s).exp(), 0.0), Complex64::new(-(-TWO_PI * s).exp(), 0.0)),
        (Some(t), _) => (-Complex64::from_polar(1.0, TWO_PI * t), -Complex64::from_polar(1.0, -TWO_PI * t)),
        _ => (Complex64::new(-1.0, 0.0), Complex64::new(-1.0, 0.0)),
    };
    ZeroData { mu, regime, z_plus, z_minus, t0, s0, w_plus, w_minus }
}

/// Positive root `s₀` of `N(i/2 + s) = 0`, found after geometric bracket growth.
fn solve_line(mu: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let f = |s: f64| kernels::n_on_line(s, mu, cfg);
    if f(0.0)? >= 0.0 {
        return Err(Error::NoBracket(format!("N(i/2) >= 0 at mu = {mu}")));
    }
    let mut hi = 1.0;
    while f(hi)? <= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoBracket(format!("no sign change of N on the line at mu = {mu}")));
        }
    }
    quad::brent(|s| f(s).unwrap_or(f64::NAN), 0.0, hi, ROOT_XTOL)
}

/// Root `t₀ ∈ (0, 1/2]` of `N(i/2 + it) = 0`.
fn solve_axis(mu: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let f = |t: f64| kernels::n_on_axis(0.5 + t, mu, cfg);
    let (fa, fb) = (f(0.0)?, f(0.5)?);
    if fb == 0.0 {
        return Ok(0.5);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket(format!("N(i/2 + it) keeps its sign on [0, 1/2] at mu = {mu}")));
    }
    quad::brent(|t| f(t).unwrap_or(f64::NAN), 0.0, 0.5, ROOT_XTOL)
}

pub fn find_zeros(mu: f64, consts: &CriticalConstants, cfg: &QuadratureConfig) -> Result<ZeroData> {
    kernels::check_mu(mu)?;
    let regime = classify(mu, consts);
    match regime {
        Regime::SelfAdjoint => Err(Error::NoZeros { mu, mu0: consts.mu0 }),
        Regime::DoubleZero => Ok(from_offset(mu, regime, Complex64::new(0.0, 0.0), Some(0.0), Some(0.0))),
        Regime::ImaginaryPairZeros => {
            let t0 = solve_axis(mu, cfg)?;
            Ok(from_offset(mu, regime, Complex64::new(0.0, t0), Some(t0), None))
        }
        Regime::RealLineZeros => {
            let s0 = solve_line(mu, cfg)?;
            Ok(from_offset(mu, regime, Complex64::new(s0, 0.0), None, Some(s0)))
        }
    }
}

pub fn s0_of_mu(mu: f64, consts: &CriticalConstants, cfg: &QuadratureConfig) -> Result<f64> {
    let regime = classify(mu, consts);
    if regime != Regime::RealLineZeros {
        return Err(Error::RegimeMismatch { expected: Regime::RealLineZeros, found: regime });
    }
    solve_line(mu, cfg)
}

/// Half-width of a rectangle `[−R, R] × [0, 1]` outside of which `|Λ| < √(1 − (μ/2)²)/4`,
/// so that every zero of `N` in the strip lies inside it.
fn enclosing_half_width(mu: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let bound = 0.25 * sqrt_term(mu);
    let mut r = 8.0;
    'grow: loop {
        for k in 0..=40 {
            let t = k as f64 / 40.0;
            for side in [-r, r] {
                let lam = kernels::lambda_fn(StripPoint::new(Complex64::new(side, t))?, mu, cfg)?;
                if lam.norm() >= bound {
                    r *= 2.0;
                    if r > 1e5 {
                        return Err(Error::Accuracy(format!("Lambda does not decay along the strip at mu = {mu}")));
                    }
                    continue 'grow;
                }
            }
        }
        return Ok(r);
    }
}

/// Continuous argument increment of `f` along the straight segment `a → b`,
/// refining wherever a step turns by more than `max_turn`.
pub(crate) fn arg_increment<F>(f: &F, a: Complex64, b: Complex64, steps: usize, max_turn: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    fn rec<F>(f: &F, a: Complex64, fa: Complex64, b: Complex64, fb: Complex64, turn: f64, depth: u32) -> Result<f64>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        let d = wrap_angle(fb.arg() - fa.arg());
        if d.abs() <= turn {
            return Ok(d);
        }
        if depth > 50 {
            return Err(Error::Accuracy(format!("argument not resolved between {a} and {b}")));
        }
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm.norm() == 0.0 {
            return Err(Error::Accuracy(format!("zero of the function on the contour at {m}")));
        }
        Ok(rec(f, a, fa, m, fm, turn, depth + 1)? + rec(f, m, fm, b, fb, turn, depth + 1)?)
    }
    let mut total = 0.0;
    let mut p = a;
    let mut fp = f(p)?;
    for k in 1..=steps {
        let q = a + (b - a) * (k as f64 / steps as f64);
        let fq = f(q)?;
        total += rec(f, p, fp, q, fq, max_turn, 0)?;
        p = q;
        fp = fq;
    }
    Ok(total)
}

/// Number of zeros of `N` inside the strip, from the winding of `N` around the
/// boundary of a large rectangle (counter-clockwise).
pub fn winding_number(mu: f64, cfg: &QuadratureConfig) -> Result<i32> {
    let r = enclosing_half_width(mu, cfg)?;
    let n = |z: Complex64| kernels::n_fn(StripPoint { z }, mu, cfg);
    let corners = [Complex64::new(-r, 0.0), Complex64::new(r, 0.0), Complex64::new(r, 1.0), Complex64::new(-r, 1.0)];
    let mut total = 0.0;
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        let steps = ((b - a).norm() * 20.0).ceil() as usize;
        total += arg_increment(&n, a, b, steps, 0.25)?;
    }
    let turns = total / TWO_PI;
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 {
        return Err(Error::Accuracy(format!("non-integer winding {turns}")));
    }
    Ok(rounded as i32)
}

/// Continuous argument increment of `N̂*` along the lower coast, from `x → 0` to `x → ∞`.
/// The symbol tends to 1 exponentially in `ln x` at both ends, so a finite window suffices.
pub fn lower_coast_winding(mu: f64) -> Result<f64> {
    kernels::check_mu(mu)?;
    let decay = 0.5 * PI - (0.5 * mu).asin();
    // |Λ| ~ exp(−decay·|y|/2π); go far enough for that to drop below 1e-15.
    let y_max = (TWO_PI * 36.0 / decay).max(200.0);
    let f = |w: Complex64| Ok(kernels::n_star_lower(w.re, mu));
    let steps = (2.0 * y_max * 10.0).ceil() as usize;
    arg_increment(&f, Complex64::new(-y_max, 0.0), Complex64::new(y_max, 0.0), steps, 0.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (&'static CriticalConstants, QuadratureConfig) {
        (CriticalConstants::standard(), QuadratureConfig::default())
    }

    #[test]
    fn real_line_pair() {
        let (c, cfg) = setup();
        let z = find_zeros(1.9, c, &cfg).unwrap();
        let s0 = z.s0.unwrap();
        assert!((s0 - 0.9996).abs() < 1e-3, "{s0}");
        assert_eq!(z.z_plus + z.z_minus, I);
        assert!((z.w_plus * z.w_minus - 1.0).norm() < 1e-12);
        let n = kernels::n_fn(StripPoint { z: z.z_plus }, 1.9, &cfg).unwrap();
        assert!(n.norm() < 1e-9);
    }

    #[test]
    fn imaginary_pair() {
        let (c, cfg) = setup();
        let mu = 0.5 * (c.mu0 + c.mu1);
        let z = find_zeros(mu, c, &cfg).unwrap();
        let t0 = z.t0.unwrap();
        assert!(t0 > 0.0 && t0 <= 0.5);
        assert!((z.w_plus * z.w_minus - 1.0).norm() < 1e-12);
        let n = kernels::n_fn(StripPoint { z: z.z_minus }, mu, &cfg).unwrap();
        assert!(n.norm() < 1e-9);
    }

    #[test]
    fn below_mu0_has_no_zeros() {
        let (c, cfg) = setup();
        assert!(matches!(find_zeros(1.5, c, &cfg), Err(Error::NoZeros { .. })));
        assert_eq!(winding_number(1.5, &cfg).unwrap(), 0);
        assert_eq!(winding_number(1.9, &cfg).unwrap(), 2);
    }

    #[test]
    fn s0_vanishes_at_mu1_and_increases() {
        let (c, cfg) = setup();
        assert!(s0_of_mu(c.mu1 + 1e-6, c, &cfg).unwrap() < 0.01);
        let mut prev = 0.0;
        for k in 1..20 {
            let mu = c.mu1 + (1.99 - c.mu1) * k as f64 / 20.0;
            let s = s0_of_mu(mu, c, &cfg).unwrap();
            assert!(s > prev);
            prev = s;
        }
        assert!(matches!(s0_of_mu(1.8, c, &cfg), Err(Error::RegimeMismatch { .. })));
    }

    #[test]
    fn lower_coast_turns_once_clockwise() {
        for &mu in &[1.87, 1.9, 1.95] {
            let inc = lower_coast_winding(mu).unwrap();
            assert!((inc + TWO_PI).abs() < 1e-3, "mu={mu}: {inc}");
        }
    }
}
