//! Singular-integral machinery on the cut plane: `h(w)`, the symbol `a(x)`,
//! its principal logarithm, the regularised Cauchy integral `K(w)` and its
//! boundary values on the two coasts.
//!
//! Everything is parametrised by `y = ln x`. Along the cut
//! `Ln a = log(1 + d) + T` with `d = −Λ/√(1 − (μ/2)²)` on the lower coast and
//! `T(y) = −2i·atan(1/(2u))`, `u = y/2π − s₀`, the logarithm of the coast ratio
//! `h₊/h₋`. `T` carries the slow `−2πi/ln x` tail, which is integrated in
//! closed form; the remainder `log(1 + d)` decays exponentially in `y`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::cmath::{log1p, wrap_angle, I, TWO_PI};
use crate::config::QuadratureConfig;
use crate::constants::Regime;
use crate::error::{Error, Result};
use crate::kernels::{self, sqrt_term};
use crate::mellin::{Coast, CutPlanePoint, Interpretation, SampledFunction};
use crate::quad;
use crate::zeros::ZeroData;

/// Core sampling window in `x`, as in the usual presentation of `a(x)`.
pub const CORE_LOG10_MIN: f64 = -8.0;
pub const CORE_LOG10_MAX: f64 = 12.0;
/// The extended window reaches `|ln x| = 10⁵`, where `|arg a| ≈ 2π/|ln x|` is below `10⁻³`.
pub const EXTENDED_LOG_MAX: f64 = 1e5;
const EXTENDED_GROWTH: f64 = 1.02;
/// Lower truncation of the `y` integrals, relative to `min(ln|w|, ln 1e-8)`.
const LOWER_MARGIN: f64 = 40.0;
const UPPER_MARGIN: f64 = 45.0;

/// `h(w) = ln w/2π − s₀ − i/2` on the `(0, 2π]` branch.
pub fn h_fn(w: CutPlanePoint, s0: f64) -> Result<Complex64> {
    Ok(w.ln()? / TWO_PI - s0 - 0.5 * I)
}

/// `A(u) = u·atan(1/(2u)) + ¼ ln(4u² + 1)`, an antiderivative of `atan(1/(2u))`.
fn big_a(u: f64) -> f64 {
    u * (0.5 / u).atan() + 0.25 * (4.0 * u * u).ln_1p()
}

/// Argument diagnostics of `a(x)` along a sampled window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArgumentSummary {
    /// Continuous argument increment from the first to the last sample.
    pub increment: f64,
    pub start_arg: f64,
    pub end_arg: f64,
    pub max_abs_arg: f64,
    pub max_abs_arg_at_log_x: f64,
    pub max_step: f64,
    /// Least-squares `c` in `arg a ≈ c/ln x` over the last decade of `ln x` (extended window)
    /// or of `x` (core window).
    pub tail_coeff: f64,
}

#[derive(Debug, Clone)]
pub struct CauchyMachinery {
    pub mu: f64,
    pub s0: f64,
    pub cfg: QuadratureConfig,
    /// `ln x` of the core samples, log-spaced in `x` on `[1e-8, 1e12]`.
    pub log_x_grid: Vec<f64>,
    /// Principal `Ln a` at the core samples.
    pub ln_a: Vec<Complex64>,
    /// Fitted coefficient of the `c/ln x` tail on the extended window (close to `−2π`).
    pub tail_coeff: f64,
    pub core: ArgumentSummary,
    pub extended: ArgumentSummary,
    cv: f64,
    /// Split point `Y` in `y = ln x` beyond which `T` is integrated analytically.
    y_split: f64,
    /// `∫_Y^∞ (Ln a − T) dy`.
    tail_rest: Complex64,
}

impl CauchyMachinery {
    pub fn new(zeros: &ZeroData, cfg: &QuadratureConfig) -> Result<Self> {
        if zeros.regime != Regime::RealLineZeros {
            return Err(Error::RegimeMismatch { expected: Regime::RealLineZeros, found: zeros.regime });
        }
        let s0 = zeros.s0.ok_or_else(|| Error::InvalidInput("zero data carries no s0".into()))?;
        CauchyMachinery::with_s0(zeros.mu, s0, cfg)
    }

    /// Builds the machinery for an explicit `s₀` (which must be the zero of `N` on the line).
    pub fn with_s0(mu: f64, s0: f64, cfg: &QuadratureConfig) -> Result<Self> {
        kernels::check_mu(mu)?;
        cfg.validate()?;
        if !(s0 > 0.0 && s0.is_finite()) {
            return Err(Error::InvalidInput(format!("s0 must be positive, got {s0}")));
        }
        let mut m = CauchyMachinery {
            mu,
            s0,
            cfg: *cfg,
            log_x_grid: Vec::new(),
            ln_a: Vec::new(),
            tail_coeff: f64::NAN,
            core: ArgumentSummary::empty(),
            extended: ArgumentSummary::empty(),
            cv: sqrt_term(mu),
            y_split: cfg.tail_cutoff_x.ln().max(TWO_PI * (s0 + 1.0)),
            tail_rest: Complex64::new(0.0, 0.0),
        };

        let step = std::f64::consts::LN_10 / cfg.grid_points_per_decade as f64;
        let n_core = ((CORE_LOG10_MAX - CORE_LOG10_MIN) * cfg.grid_points_per_decade as f64).round() as usize;
        let y0 = CORE_LOG10_MIN * std::f64::consts::LN_10;
        m.log_x_grid = (0..=n_core).map(|k| y0 + step * k as f64).collect();
        m.ln_a = m.log_x_grid.iter().map(|&y| m.ln_a_at_log(y)).collect();
        for (&y, la) in m.log_x_grid.iter().zip(&m.ln_a) {
            if !(la.re.is_finite() && la.im.is_finite()) {
                return Err(Error::ZeroSymbol { x: y.exp() });
            }
        }
        let last_decade = |y: f64| y >= (CORE_LOG10_MAX - 1.0) * std::f64::consts::LN_10;
        m.core = summarize(&m.log_x_grid, &m.ln_a, last_decade)?;

        let ext_grid = extended_grid(&m.log_x_grid);
        let ext_vals: Vec<Complex64> = ext_grid.iter().map(|&y| m.ln_a_at_log(y)).collect();
        m.extended = summarize(&ext_grid, &ext_vals, |y| y >= 0.1 * EXTENDED_LOG_MAX)?;

        for s in [&m.core, &m.extended] {
            if s.max_step >= PI {
                return Err(Error::PhaseStep { step: s.max_step, at_log_x: s.max_abs_arg_at_log_x });
            }
        }
        if m.extended.max_abs_arg >= PI - 1e-9 {
            return Err(Error::PrincipalBranch {
                max_arg: m.extended.max_abs_arg,
                at_log_x: m.extended.max_abs_arg_at_log_x,
            });
        }
        if m.extended.start_arg.abs() > 1e-3 || m.extended.end_arg.abs() > 1e-3 {
            return Err(Error::Accuracy(format!(
                "arg a does not vanish at the ends of the window: {} and {}",
                m.extended.start_arg, m.extended.end_arg
            )));
        }
        m.tail_coeff = m.extended.tail_coeff;
        if (m.tail_coeff + TWO_PI).abs() > 0.05 * TWO_PI {
            return Err(Error::Accuracy(format!("tail coefficient {} is not close to -2*pi", m.tail_coeff)));
        }
        m.tail_rest = m.rest_integral(m.y_split)?;
        Ok(m)
    }

    pub fn sqrt_term(&self) -> f64 {
        self.cv
    }

    pub fn w_plus(&self) -> Complex64 {
        Complex64::new(-(TWO_PI * self.s0).exp(), 0.0)
    }

    pub fn w_minus(&self) -> Complex64 {
        Complex64::new(-(-TWO_PI * self.s0).exp(), 0.0)
    }

    fn u(&self, y: f64) -> f64 {
        y / TWO_PI - self.s0
    }

    /// `d(y) = −Λ/√(1 − (μ/2)²)` on the lower coast, so that `N̂*₋ = 1 + d`.
    fn d(&self, y: f64) -> Complex64 {
        -kernels::lambda_zeta(Complex64::new(y / TWO_PI, 0.5), self.mu) / self.cv
    }

    /// `T(y) = Ln(h₊/h₋)`, the principal log of `(u − i/2)/(u + i/2)`.
    fn t_part(&self, y: f64) -> Complex64 {
        let u = self.u(y);
        if u == 0.0 {
            Complex64::new(0.0, PI)
        } else {
            Complex64::new(0.0, -2.0 * (0.5 / u).atan())
        }
    }

    /// Principal `Ln a(x)` at `x = e^y`.
    pub fn ln_a_at_log(&self, y: f64) -> Complex64 {
        let raw = log1p(self.d(y)) + self.t_part(y);
        Complex64::new(raw.re, wrap_angle(raw.im))
    }

    /// `a(x) = N̂*₋(x) h₊(x)/h₋(x)`.
    pub fn a_fn(&self, x: f64) -> Result<Complex64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Domain(format!("a(x) needs x > 0, got {x}")));
        }
        let y = x.ln();
        let u = self.u(y);
        let a = (1.0 + self.d(y)) * (Complex64::new(u, -0.5) / Complex64::new(u, 0.5));
        if a.norm() == 0.0 {
            return Err(Error::ZeroSymbol { x });
        }
        Ok(a)
    }

    /// Branch-tracked `Ln a` on the core grid, as samples against `x`.
    pub fn ln_a_unwrapped(&self) -> SampledFunction {
        let grid = self.log_x_grid.iter().map(|y| y.exp()).collect();
        let mut values = Vec::with_capacity(self.ln_a.len());
        let mut prev = 0.0;
        let mut offset = 0.0;
        for (k, v) in self.ln_a.iter().enumerate() {
            if k > 0 {
                offset += wrap_angle(v.im - prev) - (v.im - prev);
            }
            prev = v.im;
            values.push(Complex64::new(v.re, v.im + offset));
        }
        SampledFunction { grid, values, interpretation: Interpretation::Coast }
    }

    /// `∫_Y^∞ (Ln a − T) dy`; the integrand decays exponentially in `y`.
    fn rest_integral(&self, from: f64) -> Result<Complex64> {
        let mut end = from + 10.0;
        while self.d(end).norm() > 1e-18 {
            end += 10.0;
            if end > EXTENDED_LOG_MAX {
                return Err(Error::Accuracy("remainder of Ln a does not decay".into()));
            }
        }
        let f = |y: f64| self.ln_a_at_log(y) - self.t_part(y);
        Ok(quad::integrate(f, from, end, &self.cfg)?.value)
    }

    fn rest_between(&self, a: f64, b: f64) -> Result<Complex64> {
        if b <= a {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let f = |y: f64| self.ln_a_at_log(y) - self.t_part(y);
        Ok(quad::integrate(f, a, b, &self.cfg)?.value)
    }

    fn counterterm(&self, split: f64) -> Complex64 {
        Complex64::new(2.0 * big_a(self.u(split)) + PI.ln() - 1.0, 0.0)
    }

    fn breakpoints(&self, w: Complex64) -> Vec<f64> {
        let yc = TWO_PI * self.s0;
        let mut pts = vec![yc - PI, yc, yc + PI];
        let lw = w.norm().ln();
        pts.push(lw);
        // Near the cut the kernel peaks over a width ~ |Im w|/|w| around ln Re w.
        if w.re > 0.0 {
            let delta = (w.im / w.norm()).abs();
            let lr = w.re.ln();
            for k in [1.0, 4.0, 16.0, 64.0] {
                if k * delta < 1.0 {
                    pts.push(lr - k * delta);
                    pts.push(lr + k * delta);
                }
            }
            pts.push(lr);
        }
        pts
    }

    /// Regularised Cauchy integral `K(w)` for `w` off the cut.
    pub fn k_reg(&self, w: Complex64) -> Result<Complex64> {
        self.k_reg_split(w, self.y_split)
    }

    /// `K(w)` with the analytic tail starting at `y = split` (must exceed `2πs₀`).
    pub fn k_reg_split(&self, w: Complex64, split: f64) -> Result<Complex64> {
        CutPlanePoint::off_cut(w)?;
        if split <= TWO_PI * self.s0 {
            return Err(Error::InvalidInput(format!("tail split {split} must exceed 2*pi*s0")));
        }
        let rest = if split == self.y_split {
            self.tail_rest
        } else if split > self.y_split {
            self.tail_rest - self.rest_between(self.y_split, split)?
        } else {
            self.tail_rest + self.rest_between(split, self.y_split)?
        };
        let lw = w.norm().ln();
        let lo = lw.min(CORE_LOG10_MIN * std::f64::consts::LN_10) - LOWER_MARGIN;
        let hi = lw.max(split) + UPPER_MARGIN;
        let pts = self.breakpoints(w);
        let near = |y: f64| {
            let e = Complex64::new(y.exp(), 0.0);
            self.ln_a_at_log(y) * e / (e - w)
        };
        let far = |y: f64| self.ln_a_at_log(y) * w / (Complex64::new(y.exp(), 0.0) - w);
        let i1 = quad::integrate_with_breaks(near, lo, split, &pts, &self.cfg)?.value;
        let i2 = quad::integrate_with_breaks(far, split, hi, &pts, &self.cfg)?.value;
        Ok((i1 + i2 + rest) / (TWO_PI * I) + self.counterterm(split))
    }

    /// Principal value of the regularised integral at `x = e^{yt}` on the cut.
    pub fn pv_at_log(&self, yt: f64) -> Result<Complex64> {
        if !yt.is_finite() || yt.abs() > EXTENDED_LOG_MAX {
            return Err(Error::OutOfSupport(format!("ln t = {yt}")));
        }
        let d = self.cfg.pv_epsilon;
        let t = Complex64::new(yt.exp(), 0.0);
        let split = self.y_split.max(yt + d + 1.0);
        let rest = self.tail_rest - self.rest_between(self.y_split, split)?;
        let lo = yt.min(CORE_LOG10_MIN * std::f64::consts::LN_10) - LOWER_MARGIN;
        let hi = split + UPPER_MARGIN;
        let pts = self.breakpoints(Complex64::new(t.re, 0.0));
        // e^y/(e^y − t) = 1/(1 − e^{−τ}) with τ = y − yt.
        let kernel = |y: f64| {
            let tau = y - yt;
            self.ln_a_at_log(y) / (-(-tau).exp_m1())
        };
        let phi = |tau: f64| {
            let w = if tau == 0.0 { 1.0 } else { tau / (-(-tau).exp_m1()) };
            self.ln_a_at_log(yt + tau) * w
        };
        let ia = quad::integrate_with_breaks(kernel, lo, yt - d, &pts, &self.cfg)?.value;
        let ib = quad::integrate(|tau: f64| (phi(tau) - phi(-tau)) / tau, 0.0, d, &self.cfg)?.value;
        let ic = quad::integrate_with_breaks(kernel, yt + d, split, &pts, &self.cfg)?.value;
        let far = |y: f64| self.ln_a_at_log(y) * t / (Complex64::new(y.exp(), 0.0) - t);
        let i2 = quad::integrate_with_breaks(far, split, hi, &pts, &self.cfg)?.value;
        Ok((ia + ib + ic + i2 + rest) / (TWO_PI * I) + self.counterterm(split))
    }

    /// Boundary values `(K₊(t), K₋(t))` from the principal value and `±½ Ln a(t)`.
    pub fn k_boundary_pair_log(&self, yt: f64) -> Result<(Complex64, Complex64)> {
        let p = self.pv_at_log(yt)?;
        let half = 0.5 * self.ln_a_at_log(yt);
        Ok((p + half, p - half))
    }

    pub fn k_boundary(&self, t: f64, side: Coast) -> Result<Complex64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::OutOfSupport(format!("t = {t}")));
        }
        let (kp, km) = self.k_boundary_pair_log(t.ln())?;
        Ok(match side {
            Coast::Upper => kp,
            Coast::Lower => km,
        })
    }

    /// Boundary value of `K` at `t` obtained from interior values `K(t ± iε)` by
    /// Richardson extrapolation in `ε`. Returns the value and the last correction.
    pub fn k_boundary_limit(&self, t: f64, side: Coast) -> Result<(Complex64, f64)> {
        const LEVELS: usize = 6;
        let sign = match side {
            Coast::Upper => 1.0,
            Coast::Lower => -1.0,
        };
        let mut table: Vec<Vec<Complex64>> = Vec::with_capacity(LEVELS);
        let mut err = f64::INFINITY;
        for k in 0..LEVELS {
            let eps = t * 0.04 / f64::powi(2.0, k as i32);
            let mut row = vec![self.k_reg(Complex64::new(t, sign * eps))?];
            for j in 1..=k {
                let f = f64::powi(2.0, j as i32);
                let prev = &table[k - 1];
                row.push((row[j - 1] * f - prev[j - 1]) / (f - 1.0));
            }
            if k > 0 {
                err = (row[k] - table[k - 1][k - 1]).norm();
            }
            table.push(row);
        }
        Ok((table[LEVELS - 1][LEVELS - 1], err))
    }
}

impl ArgumentSummary {
    fn empty() -> Self {
        ArgumentSummary {
            increment: f64::NAN,
            start_arg: f64::NAN,
            end_arg: f64::NAN,
            max_abs_arg: f64::NAN,
            max_abs_arg_at_log_x: f64::NAN,
            max_step: f64::NAN,
            tail_coeff: f64::NAN,
        }
    }
}

/// Uniform core grid continued geometrically in `|y|` out to `EXTENDED_LOG_MAX`.
fn extended_grid(core: &[f64]) -> Vec<f64> {
    let step = core[1] - core[0];
    let mut right = Vec::new();
    let mut y = *core.last().expect("core grid is non-empty");
    while y < EXTENDED_LOG_MAX {
        let h = (y.abs() * (EXTENDED_GROWTH - 1.0)).max(step);
        y = (y + h).min(EXTENDED_LOG_MAX);
        right.push(y);
    }
    let mut left = Vec::new();
    let mut y = core[0];
    while y > -EXTENDED_LOG_MAX {
        let h = (y.abs() * (EXTENDED_GROWTH - 1.0)).max(step);
        y = (y - h).max(-EXTENDED_LOG_MAX);
        left.push(y);
    }
    left.reverse();
    left.into_iter().chain(core.iter().copied()).chain(right).collect()
}

fn summarize<F: Fn(f64) -> bool>(grid: &[f64], vals: &[Complex64], in_tail: F) -> Result<ArgumentSummary> {
    let mut cont = Vec::with_capacity(vals.len());
    let mut max_step: f64 = 0.0;
    let mut acc = vals[0].im;
    cont.push(acc);
    for k in 1..vals.len() {
        let raw = vals[k].im - vals[k - 1].im;
        let step = wrap_angle(raw);
        max_step = max_step.max(step.abs());
        acc += step;
        cont.push(acc);
    }
    let (mut max_abs, mut at) = (0.0, grid[0]);
    for (&y, &a) in grid.iter().zip(&cont) {
        if a.abs() > max_abs {
            max_abs = a.abs();
            at = y;
        }
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&y, &a) in grid.iter().zip(&cont) {
        if in_tail(y) {
            num += a / y;
            den += 1.0 / (y * y);
        }
    }
    Ok(ArgumentSummary {
        increment: cont[cont.len() - 1] - cont[0],
        start_arg: cont[0],
        end_arg: cont[cont.len() - 1],
        max_abs_arg: max_abs,
        max_abs_arg_at_log_x: at,
        max_step,
        tail_coeff: if den > 0.0 { num / den } else { f64::NAN },
    })
}

/// Lower-coast decay rate of `Λ` per unit of `ln x`; used for sizing windows.
pub fn decay_rate(mu: f64) -> f64 {
    (FRAC_PI_2 - (0.5 * mu).asin()) / TWO_PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::CriticalConstants;
    use crate::zeros::find_zeros;

    fn machinery(mu: f64) -> CauchyMachinery {
        let cfg = QuadratureConfig::default();
        let z = find_zeros(mu, CriticalConstants::standard(), &cfg).unwrap();
        CauchyMachinery::new(&z, &cfg).unwrap()
    }

    #[test]
    fn h_vanishes_at_w_plus() {
        let m = machinery(1.9);
        let w = CutPlanePoint::off_cut(m.w_plus()).unwrap();
        assert!(h_fn(w, m.s0).unwrap().norm() < 1e-14);
        for &x in &[1e-3, 0.5, 2.0, 1e5] {
            let hp = h_fn(CutPlanePoint::upper(x).unwrap(), m.s0).unwrap();
            let hm = h_fn(CutPlanePoint::lower(x).unwrap(), m.s0).unwrap();
            assert!(((hp / hm).norm() - 1.0).abs() < 1e-14);
            let u = x.ln() / TWO_PI - m.s0;
            let expect = Complex64::new(u, -0.5) / Complex64::new(u, 0.5);
            assert!((hp / hm - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn log_of_a_matches_direct_log() {
        let m = machinery(1.9);
        for &x in &[1e-6, 0.1, 1.0, 30.0, 1e9] {
            let direct = m.a_fn(x).unwrap().ln();
            assert!((m.ln_a_at_log(x.ln()) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn argument_returns_to_zero() {
        let m = machinery(1.9);
        assert!(m.extended.increment.abs() < 1e-3, "{:?}", m.extended);
        assert!(m.extended.max_abs_arg < PI);
        assert!((m.tail_coeff + TWO_PI).abs() < 0.01 * TWO_PI);
    }

    #[test]
    fn principal_branch_violation_is_an_error() {
        let cfg = QuadratureConfig::default();
        let z = find_zeros(1.99, CriticalConstants::standard(), &cfg).unwrap();
        assert!(matches!(CauchyMachinery::new(&z, &cfg), Err(Error::PrincipalBranch { .. })));
    }

    #[test]
    fn split_independence() {
        let m = machinery(1.9);
        let w = Complex64::new(-0.5, 0.7);
        let a = m.k_reg(w).unwrap();
        let b = m.k_reg_split(w, m.y_split + 2.0_f64.ln()).unwrap();
        let c = m.k_reg_split(w, m.y_split + 5.0).unwrap();
        assert!((a - b).norm() < 1e-9 && (a - c).norm() < 1e-9);
    }

    #[test]
    fn jump_and_interior_limit() {
        let m = machinery(1.9);
        for &t in &[0.01, 0.3, 1.0, 5.0, 100.0] {
            let (kp, km) = m.k_boundary_pair_log(f64::ln(t)).unwrap();
            assert!((kp - km - m.ln_a_at_log(f64::ln(t))).norm() < 1e-14);
            let (lim, err) = m.k_boundary_limit(t, Coast::Upper).unwrap();
            assert!((lim - kp).norm() < 1e-7, "t={t}: {lim} vs {kp} (err {err:e})");
            let (lim, _) = m.k_boundary_limit(t, Coast::Lower).unwrap();
            assert!((lim - km).norm() < 1e-7, "t={t}: {lim} vs {km}");
        }
    }
}
