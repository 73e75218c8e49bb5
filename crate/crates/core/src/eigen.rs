//! Eigenfunctions `G^λ` of the adjoint on the cut plane, their closed-form
//! moduli, coast traces, the deficiency norms and the residues at `w±`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::cauchy::{h_fn, CauchyMachinery};
use crate::cmath::{ln_cut, I, TWO_PI};
use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::kernels::{self, TWO_PI_SQ};
use crate::mellin::{CutPlanePoint, Interpretation, SampledFunction};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenParams {
    pub lambda: Complex64,
    /// `arg λ` in `(0, 2π)`.
    pub theta: f64,
    /// `λ* = λ / (2π²√(1 − (μ/2)²))`.
    pub lambda_star: Complex64,
    pub mu: f64,
    pub s0: f64,
    pub w_plus: Complex64,
    pub w_minus: Complex64,
}

impl EigenParams {
    pub fn new(lambda: Complex64, m: &CauchyMachinery) -> Result<Self> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) || lambda.norm() == 0.0 {
            return Err(Error::InvalidInput(format!("lambda must be finite and nonzero, got {lambda}")));
        }
        if lambda.im == 0.0 && lambda.re > 0.0 {
            return Err(Error::InvalidInput(format!("lambda = {lambda} lies on the positive semiaxis")));
        }
        let theta = ln_cut(lambda).im;
        Ok(EigenParams {
            lambda,
            theta,
            lambda_star: lambda / (TWO_PI_SQ * m.sqrt_term()),
            mu: m.mu,
            s0: m.s0,
            w_plus: m.w_plus(),
            w_minus: m.w_minus(),
        })
    }

    /// Exponent `σ = (θ − i ln|λ*|)/2π` of the power factor `w^σ`.
    pub fn sigma(&self) -> Complex64 {
        Complex64::new(self.theta, -self.lambda_star.norm().ln()) / TWO_PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleResidues {
    pub res_plus: Complex64,
    pub res_minus: Complex64,
}

fn k_at(w: CutPlanePoint, m: &CauchyMachinery) -> Result<Complex64> {
    match w.coast {
        Some(side) => m.k_boundary(w.w.re, side),
        None => m.k_reg(w.w),
    }
}

fn check_not_pole(w: Complex64, p: &EigenParams) -> Result<()> {
    for (name, pole) in [("w+", p.w_plus), ("w-", p.w_minus)] {
        if (w - pole).norm() <= 1e-14 * pole.norm() {
            return Err(Error::Pole(format!("{name} = {pole}")));
        }
    }
    Ok(())
}

/// `G^λ(w) = w^σ exp K(w) / (h(w)(w − w₋))`.
pub fn g_lambda(w: CutPlanePoint, p: &EigenParams, m: &CauchyMachinery) -> Result<Complex64> {
    check_not_pole(w.w, p)?;
    let lw = w.ln()?;
    let h = h_fn(w, p.s0)?;
    let k = k_at(w, m)?;
    Ok((p.sigma() * lw + k).exp() / (h * (w.w - p.w_minus)))
}

/// `B^λ(w) = (w − w₋) G^λ(w)`, regular at `w₋`.
pub fn b_lambda(w: CutPlanePoint, p: &EigenParams, m: &CauchyMachinery) -> Result<Complex64> {
    if (w.w - p.w_plus).norm() <= 1e-14 * p.w_plus.norm() {
        return Err(Error::Pole(format!("w+ = {}", p.w_plus)));
    }
    let lw = w.ln()?;
    let h = h_fn(w, p.s0)?;
    let k = k_at(w, m)?;
    Ok((p.sigma() * lw + k).exp() / h)
}

/// `∫_{−∞}^0 ln|N̂*(s)| / |s − w|² ds`, evaluated with `s = −e^{2πσ}`.
pub fn poisson_log_integral(w: Complex64, mu: f64, s0: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let lr = w.norm().ln() / TWO_PI;
    let lo = lr.min(-s0) - 7.0;
    let hi = lr.max(s0) + 7.0;
    let f = |sig: f64| {
        let e = (TWO_PI * sig).exp();
        let n = kernels::n_star_line(sig, mu).abs();
        n.ln() * TWO_PI * e / (Complex64::new(e, 0.0) + w).norm_sqr()
    };
    let cfg = QuadratureConfig { max_subdivisions: cfg.max_subdivisions.max(2000), ..*cfg };
    Ok(quad::integrate_with_breaks(f, lo, hi, &[-s0, s0, 0.0, lr], &cfg)?.value)
}

/// Closed form of `|G^λ(w)|²` on the cut plane.
///
/// The Poisson exponent is `−(Im w/π)∫ ln|N̂*(s)|/|s − w|² ds`; on the negative
/// axis the form with `|λ*|/|N̂*(w)|` applies.
pub fn abs2_closed(w: CutPlanePoint, p: &EigenParams, m: &CauchyMachinery) -> Result<f64> {
    if w.coast.is_some() {
        return Err(Error::InvalidInput("use trace_abs2 for points on the coasts".into()));
    }
    check_not_pole(w.w, p)?;
    let r = w.w.norm();
    let psi = w.ln()?.im;
    let base = 4.0 * PI * PI * r.powf(p.theta / PI) / ((w.w - p.w_minus).norm() * (w.w - p.w_plus).norm());
    let ls = p.lambda_star.norm();
    let n_at = |v: Complex64| kernels::n_star_w(CutPlanePoint::off_cut(v)?, p.mu, &m.cfg);
    if w.w.im == 0.0 || (psi - PI).abs() < 1e-12 {
        return Ok(base * ls / n_at(Complex64::new(w.w.re, 0.0))?.norm());
    }
    let poisson = poisson_log_integral(w.w, p.mu, p.s0, &m.cfg)?;
    let mut val = base * ls.powf(psi / PI) * (-(w.w.im / PI) * poisson).exp();
    if psi > PI {
        val /= n_at(w.w)?.norm() * n_at(w.w.conj())?.norm();
    }
    Ok(val)
}

/// Closed forms of `|G₊(t)|²` and `|G₋(t)|²` on the two coasts.
pub fn trace_abs2(t: f64, p: &EigenParams) -> (f64, f64) {
    let tc = Complex64::new(t, 0.0);
    let upper = 4.0 * PI * PI * t.powf(p.theta / PI) / ((tc - p.w_plus).norm() * (tc - p.w_minus).norm());
    let n = kernels::n_star_lower(t.ln(), p.mu).norm();
    (upper, upper * p.lambda_star.norm_sqr() / (n * n))
}

/// Coast traces `G₊(t)`, `G₋(t)` including phases, from the boundary values of `K`.
pub fn boundary_traces(
    t_grid: &[f64],
    p: &EigenParams,
    m: &CauchyMachinery,
) -> Result<(SampledFunction, SampledFunction)> {
    let mut up = Vec::with_capacity(t_grid.len());
    let mut lo = Vec::with_capacity(t_grid.len());
    let sigma = p.sigma();
    for &t in t_grid {
        if !(t > 0.0) {
            return Err(Error::OutOfSupport(format!("t = {t}")));
        }
        let y = t.ln();
        let (kp, km) = m.k_boundary_pair_log(y)?;
        let u = y / TWO_PI - p.s0;
        let tc = Complex64::new(t, 0.0);
        up.push((sigma * y + kp).exp() / (Complex64::new(u, -0.5) * (tc - p.w_minus)));
        lo.push((sigma * Complex64::new(y, TWO_PI) + km).exp() / (Complex64::new(u, 0.5) * (tc - p.w_minus)));
    }
    Ok((
        SampledFunction::new(t_grid.to_vec(), up, Interpretation::Coast)?,
        SampledFunction::new(t_grid.to_vec(), lo, Interpretation::Coast)?,
    ))
}

/// Relative residual of `N̂*₋(t) G₋(t) = λ* G₊(t)` at each grid point.
pub fn functional_equation_residuals(t_grid: &[f64], p: &EigenParams, m: &CauchyMachinery) -> Result<Vec<f64>> {
    let (up, lo) = boundary_traces(t_grid, p, m)?;
    Ok(t_grid
        .iter()
        .zip(up.values.iter().zip(&lo.values))
        .map(|(&t, (gp, gm))| {
            let n = kernels::n_star_lower(t.ln(), p.mu);
            let rhs = p.lambda_star * gp;
            (n * gm - rhs).norm() / rhs.norm()
        })
        .collect())
}

/// Squared norms of `g^{λ=i}` and `g^{λ=−i}` in `L₂(dt/t)` from the coast trace formula.
pub fn deficiency_norms(m: &CauchyMachinery) -> Result<(f64, f64)> {
    let (wp, wm) = (m.w_plus(), m.w_minus());
    let yc = TWO_PI * m.s0;
    let span = yc + 90.0;
    let weight = |y: f64| {
        let t = Complex64::new(y.exp(), 0.0);
        4.0 * PI * PI / ((t - wp).norm() * (t - wm).norm())
    };
    let cfg = m.cfg.scaled(1e-3);
    let a = quad::integrate_with_breaks(|y: f64| weight(y) * (0.5 * y).exp(), -span, span, &[-yc, 0.0, yc], &cfg)?;
    let b = quad::integrate_with_breaks(|y: f64| weight(y) * (1.5 * y).exp(), -span, span, &[-yc, 0.0, yc], &cfg)?;
    Ok((a.value, b.value))
}

/// Number of trapezoid nodes on the residue circles.
pub const CIRCLE_NODES: usize = 48;
const LIMIT_LEVELS: usize = 8;

/// λ-independent data around one pole: `E(w) = exp K(w) / (h(w)(w − w₋))` on a circle
/// and along a ray shrinking onto the pole.
#[derive(Debug, Clone)]
struct PoleData {
    centre: Complex64,
    radius: f64,
    circle: Vec<(Complex64, Complex64, Complex64)>,
    ray: Vec<(Complex64, Complex64, Complex64)>,
}

/// Cached pole neighbourhoods for fast residues of `G^λ` for any `λ`.
#[derive(Debug, Clone)]
pub struct PoleCache {
    plus: PoleData,
    minus: PoleData,
    pub s0: f64,
    lambda_scale: f64,
}

impl PoleCache {
    pub fn new(m: &CauchyMachinery) -> Result<Self> {
        let (wp, wm) = (m.w_plus(), m.w_minus());
        let radius = 0.25 * (wp - wm).norm().min(wm.norm());
        let e = |w: Complex64| -> Result<(Complex64, Complex64, Complex64)> {
            let pt = CutPlanePoint::off_cut(w)?;
            let lw = pt.ln()?;
            let val = m.k_reg(w)?.exp() / (h_fn(pt, m.s0)? * (w - wm));
            Ok((w, lw, val))
        };
        let build = |c: Complex64| -> Result<PoleData> {
            let circle = (0..CIRCLE_NODES)
                .map(|k| e(c + Complex64::from_polar(radius, TWO_PI * (k as f64 + 0.5) / CIRCLE_NODES as f64)))
                .collect::<Result<Vec<_>>>()?;
            let ray = (0..LIMIT_LEVELS)
                .map(|j| e(c + I * (radius / f64::powi(2.0, j as i32))))
                .collect::<Result<Vec<_>>>()?;
            Ok(PoleData { centre: c, radius, circle, ray })
        };
        Ok(PoleCache { plus: build(wp)?, minus: build(wm)?, s0: m.s0, lambda_scale: TWO_PI_SQ * m.sqrt_term() })
    }

    pub fn params(&self, lambda: Complex64, mu: f64) -> Result<EigenParams> {
        if lambda.norm() == 0.0 || (lambda.im == 0.0 && lambda.re > 0.0) {
            return Err(Error::InvalidInput(format!("lambda = {lambda} is not admissible")));
        }
        Ok(EigenParams {
            lambda,
            theta: ln_cut(lambda).im,
            lambda_star: lambda / self.lambda_scale,
            mu,
            s0: self.s0,
            w_plus: self.plus.centre,
            w_minus: self.minus.centre,
        })
    }

    fn contour(d: &PoleData, sigma: Complex64) -> Complex64 {
        let sum: Complex64 = d.circle.iter().map(|(w, lw, e)| (sigma * lw).exp() * e * (w - d.centre)).sum();
        sum / CIRCLE_NODES as f64
    }

    fn limit(d: &PoleData, sigma: Complex64) -> Complex64 {
        let vals: Vec<Complex64> = d.ray.iter().map(|(w, lw, e)| (sigma * lw).exp() * e * (w - d.centre)).collect();
        // Richardson on δ_j = r/2^j, removing δ, δ², ... in turn.
        let mut table = vals;
        for level in 1..LIMIT_LEVELS {
            let f = f64::powi(2.0, level as i32);
            for j in (level..LIMIT_LEVELS).rev() {
                table[j] = (table[j] * f - table[j - 1]) / (f - 1.0);
            }
        }
        table[LIMIT_LEVELS - 1]
    }

    /// Residues of `G^λ` by contour quadrature.
    pub fn residues_contour(&self, p: &EigenParams) -> PoleResidues {
        let sigma = p.sigma();
        PoleResidues { res_plus: Self::contour(&self.plus, sigma), res_minus: Self::contour(&self.minus, sigma) }
    }

    /// Residues of `G^λ` as extrapolated limits of `(w − w±)G^λ(w)`.
    pub fn residues_limit(&self, p: &EigenParams) -> PoleResidues {
        let sigma = p.sigma();
        PoleResidues { res_plus: Self::limit(&self.plus, sigma), res_minus: Self::limit(&self.minus, sigma) }
    }

    pub fn radius(&self) -> f64 {
        self.plus.radius
    }

    /// Contour residue at the selected pole of `G^λ(w)·extra(w)`, for `extra` analytic near the pole.
    pub fn contour_residue_with<F: Fn(Complex64) -> Complex64>(
        &self,
        plus: bool,
        p: &EigenParams,
        extra: F,
    ) -> Complex64 {
        let d = if plus { &self.plus } else { &self.minus };
        let sigma = p.sigma();
        let sum: Complex64 =
            d.circle.iter().map(|(w, lw, e)| (sigma * lw).exp() * e * (w - d.centre) * extra(*w)).sum();
        sum / CIRCLE_NODES as f64
    }
}

/// Tolerance for reconciling the two residue routes.
pub const RESIDUE_TOL: f64 = 1e-6;

/// Residues of `G^λ` at `w±`, computed by contour quadrature and checked against
/// the shrinking-limit route.
pub fn residues(p: &EigenParams, cache: &PoleCache) -> Result<PoleResidues> {
    let c = cache.residues_contour(p);
    let l = cache.residues_limit(p);
    for (pole, a, b) in [("w+", c.res_plus, l.res_plus), ("w-", c.res_minus, l.res_minus)] {
        let gap = (a - b).norm() / a.norm();
        if !(gap <= RESIDUE_TOL) {
            return Err(Error::ResidueMismatch { pole, limit: b.to_string(), contour: a.to_string(), gap });
        }
    }
    Ok(c)
}

/// Residues from the explicit pole structure: `h` vanishes linearly at `w₊`
/// and `(w − w₋)` at `w₋`.
pub fn residues_explicit(p: &EigenParams, m: &CauchyMachinery) -> Result<PoleResidues> {
    let sigma = p.sigma();
    let (wp, wm) = (p.w_plus, p.w_minus);
    let lp = ln_cut(wp);
    let lm = ln_cut(wm);
    let res_plus = (sigma * lp + m.k_reg(wp)?).exp() * TWO_PI * wp / (wp - wm);
    let hm = h_fn(CutPlanePoint::off_cut(wm)?, p.s0)?;
    let res_minus = (sigma * lm + m.k_reg(wm)?).exp() / hm;
    Ok(PoleResidues { res_plus, res_minus })
}

/// `sup_ψ` of the coast-wise weighted integrals `∫ χ |G^λ(re^{iψ})|² dr/r` over `r` outside
/// discs of radius `excl` around `w±`, for each `ψ` of the grid, using the closed form.
pub fn membership_integrals(
    p: &EigenParams,
    m: &CauchyMachinery,
    psi_grid: &[f64],
    excl: f64,
    points_per_unit: usize,
) -> Result<Vec<f64>> {
    let span = TWO_PI * p.s0 + 40.0;
    let n = (2.0 * span * points_per_unit as f64) as usize;
    let h = 2.0 * span / n as f64;
    psi_grid
        .iter()
        .map(|&psi| {
            let mut acc = 0.0;
            for k in 0..=n {
                let y = -span + h * k as f64;
                let w = Complex64::from_polar(y.exp(), psi);
                if (w - p.w_plus).norm() < excl * p.w_plus.norm() || (w - p.w_minus).norm() < excl * p.w_minus.norm() {
                    continue;
                }
                let wgt = if k == 0 || k == n { 0.5 * h } else { h };
                let v =
                    if psi == 0.0 { trace_abs2(y.exp(), p).0 } else { abs2_closed(CutPlanePoint::off_cut(w)?, p, m)? };
                acc += wgt * v;
            }
            Ok(acc)
        })
        .collect()
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
    fn theta_range_and_rejection() {
        let m = machinery(1.9);
        let p = EigenParams::new(Complex64::new(0.0, -1.0), &m).unwrap();
        assert!((p.theta - 1.5 * PI).abs() < 1e-15);
        assert!(EigenParams::new(Complex64::new(2.0, 0.0), &m).is_err());
    }

    #[test]
    fn functional_equation_holds() {
        let m = machinery(1.9);
        let grid: Vec<f64> = (0..20).map(|k| 10f64.powf(-4.0 + 0.4 * k as f64)).collect();
        for lam in [Complex64::new(0.0, 1.0), Complex64::new(-10.0, 0.0)] {
            let p = EigenParams::new(lam, &m).unwrap();
            let r = functional_equation_residuals(&grid, &p, &m).unwrap();
            assert!(r.iter().all(|&x| x < 1e-7), "{r:?}");
        }
    }

    #[test]
    fn closed_modulus_matches_direct() {
        let m = machinery(1.9);
        let p = EigenParams::new(Complex64::new(-1.0, 0.0), &m).unwrap();
        for w in [
            Complex64::new(-0.5, 0.7),
            Complex64::new(2.0, 1.0),
            Complex64::new(3.0, -0.2),
            Complex64::new(-0.3, -2.0),
            Complex64::new(-30.0, 0.0),
        ] {
            let pt = CutPlanePoint::off_cut(w).unwrap();
            let direct = g_lambda(pt, &p, &m).unwrap().norm_sqr();
            let closed = abs2_closed(pt, &p, &m).unwrap();
            assert!((direct / closed - 1.0).abs() < 1e-6, "w={w}: {direct} vs {closed}");
        }
    }

    #[test]
    fn residue_routes_agree() {
        let m = machinery(1.9);
        let cache = PoleCache::new(&m).unwrap();
        for lam in [Complex64::new(0.0, 1.0), Complex64::new(-3.0, 0.0)] {
            let p = EigenParams::new(lam, &m).unwrap();
            let r = residues(&p, &cache).unwrap();
            let e = residues_explicit(&p, &m).unwrap();
            assert!((r.res_plus - e.res_plus).norm() < 1e-8 * e.res_plus.norm());
            assert!((r.res_minus - e.res_minus).norm() < 1e-8 * e.res_minus.norm());
        }
    }

    #[test]
    fn deficiency_norms_are_equal() {
        let m = machinery(1.9);
        let (a, b) = deficiency_norms(&m).unwrap();
        assert!(a > 0.0 && ((a - b) / a).abs() < 1e-9, "{a} {b}");
    }

    #[test]
    fn b_is_regular_at_w_minus() {
        let m = machinery(1.9);
        let p = EigenParams::new(Complex64::new(-1.0, 0.0), &m).unwrap();
        let wm = p.w_minus;
        let vals: Vec<f64> = (0..8)
            .map(|k| {
                let w = wm + Complex64::from_polar(1e-4 * wm.norm(), k as f64);
                b_lambda(CutPlanePoint::off_cut(w).unwrap(), &p, &m).unwrap().norm()
            })
            .collect();
        let max = vals.iter().cloned().fold(0.0, f64::max);
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 1.01);
    }
}
