//! Unitary Mellin transform, the strip ↔ cut-plane change of variables and the
//! quadratic form of `M₀` on the middle line.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmath::{ln_cut, I, TWO_PI};
use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::kernels::{self, StripPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coast {
    /// Limit from `Im w > 0`, where `Im ln w → 0`.
    Upper,
    /// Limit from `Im w < 0`, where `Im ln w → 2π`.
    Lower,
}

/// A point of the plane cut along `[0, ∞)`. Points on the cut carry the coast they belong to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutPlanePoint {
    pub w: Complex64,
    pub coast: Option<Coast>,
}

impl CutPlanePoint {
    pub fn new(w: Complex64, coast: Option<Coast>) -> Result<Self> {
        if w.re == 0.0 && w.im == 0.0 {
            return Err(Error::Origin);
        }
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::Domain(format!("w = {w} is not finite")));
        }
        if is_on_cut(w) {
            if coast.is_none() {
                return Err(Error::OnCut(w.re));
            }
            Ok(CutPlanePoint { w: Complex64::new(w.re, 0.0), coast })
        } else {
            Ok(CutPlanePoint { w, coast: None })
        }
    }

    pub fn off_cut(w: Complex64) -> Result<Self> {
        CutPlanePoint::new(w, None)
    }

    pub fn upper(x: f64) -> Result<Self> {
        CutPlanePoint::new(Complex64::new(x, 0.0), Some(Coast::Upper))
    }

    pub fn lower(x: f64) -> Result<Self> {
        CutPlanePoint::new(Complex64::new(x, 0.0), Some(Coast::Lower))
    }

    /// `ln w` on the branch with imaginary part in `(0, 2π]`; the upper coast is the limit `0⁺`.
    pub fn ln(&self) -> Result<Complex64> {
        if self.w.re == 0.0 && self.w.im == 0.0 {
            return Err(Error::Origin);
        }
        match self.coast {
            Some(Coast::Upper) => Ok(Complex64::new(self.w.re.ln(), 0.0)),
            Some(Coast::Lower) => Ok(Complex64::new(self.w.re.ln(), TWO_PI)),
            None if is_on_cut(self.w) => Err(Error::OnCut(self.w.re)),
            None => Ok(ln_cut(self.w)),
        }
    }
}

fn is_on_cut(w: Complex64) -> bool {
    w.im == 0.0 && w.re > 0.0
}

/// `w = e^{2πz}`; the edges `Im z = 0` and `Im z = 1` land on the upper and lower coasts.
pub fn strip_to_plane(z: StripPoint) -> CutPlanePoint {
    let z = z.z;
    if z.im == 0.0 || z.im == 1.0 {
        let x = (TWO_PI * z.re).exp();
        let coast = if z.im == 0.0 { Coast::Upper } else { Coast::Lower };
        return CutPlanePoint { w: Complex64::new(x, 0.0), coast: Some(coast) };
    }
    CutPlanePoint { w: (TWO_PI * z).exp(), coast: None }
}

/// `z = ln w / 2π`.
pub fn plane_to_strip(w: CutPlanePoint) -> Result<StripPoint> {
    let z = w.ln()? / TWO_PI;
    Ok(StripPoint { z: Complex64::new(z.re, z.im.clamp(0.0, 1.0)) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpretation {
    /// Samples `φ(r)` on `r > 0`.
    Radial,
    /// Samples `f(s)` on the real line.
    Line,
    /// Samples on a coast of the cut, abscissa `t > 0`.
    Coast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub interpretation: Interpretation,
}

impl SampledFunction {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>, interpretation: Interpretation) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidInput(format!("grid has {} points but {} values", grid.len(), values.len())));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("grid must be finite and strictly increasing".into()));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidInput("sample values must be finite".into()));
        }
        if interpretation != Interpretation::Line && grid.first().is_some_and(|&x| x <= 0.0) {
            return Err(Error::InvalidInput("radial and coast grids must be positive".into()));
        }
        Ok(SampledFunction { grid, values, interpretation })
    }

    /// Trapezoid weights of the grid.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        trapezoid_weights(&self.grid)
    }

    /// `∫ |f|² dx` over the grid by the trapezoid rule.
    pub fn l2_norm_sq(&self) -> f64 {
        self.trapezoid_weights().iter().zip(&self.values).map(|(w, v)| w * v.norm_sqr()).sum()
    }
}

fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let h = 0.5 * (grid[k + 1] - grid[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    w
}

/// Default line grid: `[−40, 40]` at 16 points per unit.
pub fn default_s_grid() -> Vec<f64> {
    (0..=1280).map(|k| -40.0 + k as f64 / 16.0).collect()
}

/// Step in `u = ln r` for the forward transform.
const U_STEP: f64 = 1.0 / 64.0;
const U_LIMIT: f64 = 200.0;
const TAIL_RATIO: f64 = 1e-18;

/// `f(s) = (2π)^{-1/2} ∫₀^∞ r^{−is+1/2} φ(r) dr`.
///
/// With `r = e^u` this is the Fourier transform of `g(u) = e^{3u/2} φ(e^u)`,
/// which decays at both ends for admissible `φ`; the trapezoid rule on a
/// uniform `u` grid is then spectrally accurate.
pub fn mellin_forward<P>(phi: P, s_grid: &[f64], _cfg: &QuadratureConfig) -> Result<SampledFunction>
where
    P: Fn(f64) -> Complex64 + Sync,
{
    let g = |u: f64| phi(u.exp()) * (1.5 * u).exp();
    let coarse: Vec<(f64, f64)> = (0..=(2.0 * U_LIMIT / 0.5) as usize)
        .map(|k| {
            let u = -U_LIMIT + 0.5 * k as f64;
            (u, g(u).norm())
        })
        .collect();
    if coarse.iter().any(|(_, v)| !v.is_finite()) {
        return Err(Error::NonDecaying("phi(e^u) e^{3u/2} is not finite on the sampling window".into()));
    }
    let peak = coarse.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    if peak == 0.0 {
        return SampledFunction::new(
            s_grid.to_vec(),
            vec![Complex64::new(0.0, 0.0); s_grid.len()],
            Interpretation::Line,
        );
    }
    let cutoff = TAIL_RATIO * peak;
    let first = coarse.iter().position(|(_, v)| *v > cutoff).unwrap_or(0);
    let last = coarse.iter().rposition(|(_, v)| *v > cutoff).unwrap_or(coarse.len() - 1);
    if first == 0 || last == coarse.len() - 1 {
        return Err(Error::NonDecaying(format!(
            "r^(3/2) phi(r) has not decayed by a factor {TAIL_RATIO:e} within |ln r| <= {U_LIMIT}"
        )));
    }
    let u_lo = coarse[first].0 - 2.0;
    let u_hi = coarse[last].0 + 2.0;
    let count = ((u_hi - u_lo) / U_STEP).ceil() as usize;
    let samples: Vec<(f64, Complex64)> = (0..=count)
        .map(|k| {
            let u = u_lo + U_STEP * k as f64;
            (u, g(u))
        })
        .collect();
    let norm = U_STEP / TWO_PI.sqrt();
    let values: Vec<Complex64> = s_grid
        .par_iter()
        .map(|&s| samples.iter().map(|&(u, gu)| gu * Complex64::from_polar(1.0, -s * u)).sum::<Complex64>() * norm)
        .collect();
    SampledFunction::new(s_grid.to_vec(), values, Interpretation::Line)
}

/// `φ(r) = (2π)^{-1/2} ∫ r^{is−3/2} f(s) ds`, by the trapezoid rule on the grid of `f`.
pub fn mellin_inverse(f: &SampledFunction, r_grid: &[f64], _cfg: &QuadratureConfig) -> Result<SampledFunction> {
    if f.interpretation != Interpretation::Line {
        return Err(Error::InvalidInput("inverse Mellin transform expects samples on the line".into()));
    }
    if r_grid.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidInput("radial grid must be positive".into()));
    }
    let peak = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if let (Some(a), Some(b)) = (f.values.first(), f.values.last()) {
        if peak > 0.0 && a.norm().max(b.norm()) > 1e-6 * peak {
            return Err(Error::NonDecaying("f does not decay at the ends of its grid".into()));
        }
    }
    let weights = f.trapezoid_weights();
    let values: Vec<Complex64> = r_grid
        .par_iter()
        .map(|&r| {
            let lr = r.ln();
            let acc: Complex64 = f
                .grid
                .iter()
                .zip(&f.values)
                .zip(&weights)
                .map(|((&s, &v), &w)| v * Complex64::from_polar(w, s * lr))
                .sum();
            acc * (r.powf(-1.5) / TWO_PI.sqrt())
        })
        .collect();
    SampledFunction::new(r_grid.to_vec(), values, Interpretation::Radial)
}

/// `∫ |F(i/2 + s)|² N(i/2 + s) ds` for samples of `F` on the middle line.
pub fn quadratic_form_m0(f: &SampledFunction, mu: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if f.interpretation != Interpretation::Line {
        return Err(Error::InvalidInput("quadratic form expects samples on the line".into()));
    }
    let weights = f.trapezoid_weights();
    let mut acc = 0.0;
    for ((&s, v), w) in f.grid.iter().zip(&f.values).zip(weights) {
        if w != 0.0 && v.norm_sqr() != 0.0 {
            acc += w * v.norm_sqr() * kernels::n_on_line(s, mu, cfg)?;
        }
    }
    Ok(acc)
}

/// `N(z)` at `z = ln w / 2π` for a point of the cut plane (the unnormalised symbol).
pub fn n_at_plane(w: CutPlanePoint, mu: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let z = plane_to_strip(w)?;
    kernels::n_fn(z, mu, cfg)
}

/// Middle-line point `i/2 + s` as a point of the strip.
pub fn line_point(s: f64) -> StripPoint {
    StripPoint { z: 0.5 * I + s }
}
