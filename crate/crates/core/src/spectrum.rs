//! Self-adjoint extensions, the negative-eigenvalue ladder, an independent
//! determinant-based detector, perturbation brackets and the energy map.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cauchy::CauchyMachinery;
use crate::cmath::{ln_cut, wrap_angle, I, TWO_PI};
use crate::config::QuadratureConfig;
use crate::constants::{classify, CriticalConstants, Regime};
use crate::eigen::{b_lambda, EigenParams, PoleCache};
use crate::error::{Error, Result};
use crate::kernels::{self, m1_symbol_sup};
use crate::mellin::CutPlanePoint;
use crate::zeros;

/// Unit-modulus extension parameter `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionBeta {
    pub beta: Complex64,
}

impl ExtensionBeta {
    /// Normalises `β` onto the unit circle.
    pub fn new(beta: Complex64) -> Result<Self> {
        let n = beta.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidInput(format!("beta must be finite and nonzero, got {beta}")));
        }
        Ok(ExtensionBeta { beta: beta / n })
    }

    pub fn from_angle(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::InvalidInput(format!("beta angle must be finite, got {angle}")));
        }
        Ok(ExtensionBeta { beta: Complex64::from_polar(1.0, angle) })
    }
}

/// `γ = (1 + iβe^{πs₀})/(e^{πs₀} + iβ)` and `η = arg γ ∈ (0, 2π]`.
pub fn gamma_eta(beta: ExtensionBeta, s0: f64) -> Result<(Complex64, f64)> {
    if !(s0 > 0.0 && s0.is_finite()) {
        return Err(Error::InvalidInput(format!("s0 must be positive, got {s0}")));
    }
    let e = (PI * s0).exp();
    let gamma = (1.0 + I * beta.beta * e) / (e + I * beta.beta);
    if (gamma.norm() - 1.0).abs() > 1e-14 {
        return Err(Error::Accuracy(format!("|gamma| = {} differs from 1", gamma.norm())));
    }
    let eta = ln_cut(gamma).im;
    Ok((gamma, eta))
}

/// `γ` written with the branch powers of `w±` directly.
pub fn gamma_from_poles(beta: ExtensionBeta, s0: f64) -> Complex64 {
    let lp = ln_cut(Complex64::new(-(TWO_PI * s0).exp(), 0.0));
    let lm = ln_cut(Complex64::new(-(-TWO_PI * s0).exp(), 0.0));
    let q = |l: Complex64| (-0.25 * l).exp() + beta.beta * (0.25 * l).exp();
    q(lp) / q(lm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub n: i64,
    pub lambda_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderResult {
    pub beta: ExtensionBeta,
    pub s0: f64,
    pub eta: f64,
    pub lambda0: f64,
    pub ratio: f64,
    pub entries: Vec<LadderEntry>,
}

/// `λₙ = −exp((2πn − η)/(2s₀))`: the solutions of the residue condition
/// `e^{−2is₀ ln|λ|} = e^{iη}`, indexed so that `λₙ₊₁/λₙ = e^{π/s₀}`.
pub fn ladder_lambda(n: i64, eta: f64, s0: f64) -> f64 {
    -((TWO_PI * n as f64 - eta) / (2.0 * s0)).exp()
}

pub fn ladder(beta: ExtensionBeta, s0: f64, n_min: i64, n_max: i64) -> Result<LadderResult> {
    if n_min > n_max {
        return Err(Error::InvalidInput(format!("n_min = {n_min} exceeds n_max = {n_max}")));
    }
    let (_, eta) = gamma_eta(beta, s0)?;
    let entries = (n_min..=n_max).map(|n| LadderEntry { n, lambda_n: ladder_lambda(n, eta, s0) }).collect();
    Ok(LadderResult { beta, s0, eta, lambda0: ladder_lambda(0, eta, s0), ratio: (PI / s0).exp(), entries })
}

/// Ladder for a mass parameter, which must lie in the real-line regime.
pub fn ladder_for_mu(
    mu: f64,
    consts: &CriticalConstants,
    beta: ExtensionBeta,
    n_min: i64,
    n_max: i64,
    cfg: &QuadratureConfig,
) -> Result<LadderResult> {
    let regime = classify(mu, consts);
    if regime != Regime::RealLineZeros {
        return Err(Error::RegimeMismatch { expected: Regime::RealLineZeros, found: regime });
    }
    ladder(beta, zeros::s0_of_mu(mu, consts, cfg)?, n_min, n_max)
}

/// The closed form `−e^{−η}/(2s₀)` that is sometimes quoted for the base eigenvalue.
/// It does not satisfy the residue condition and is kept only for comparison.
pub fn lambda0_printed(eta: f64, s0: f64) -> f64 {
    -(-eta).exp() / (2.0 * s0)
}

/// Distance of `(w₊/w₋)^{−i ln|λ|/2π}` from `γ`, i.e. how far `λ` is from satisfying the residue condition.
pub fn residue_condition_gap(lambda: f64, beta: ExtensionBeta, s0: f64) -> f64 {
    let lhs = Complex64::from_polar(1.0, -2.0 * s0 * lambda.abs().ln());
    (lhs - gamma_from_poles(beta, s0)).norm()
}

/// The 2×2 homogeneous matrix of the resolvent system at a negative `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolventSystem {
    pub lambda: f64,
    /// Rows `[res G^λ, −(res G^{i} + β res G^{−i})]` at `w₊` and `w₋`.
    pub matrix: [[Complex64; 2]; 2],
    pub det: Complex64,
}

impl ResolventSystem {
    /// `|det| / (|m₀₀m₁₁| + |m₀₁m₁₀|)`, in `[0, 1]` and free of the scale of each row.
    pub fn relative_det(&self) -> f64 {
        let [[a, b], [c, d]] = self.matrix;
        self.det.norm() / ((a * d).norm() + (b * c).norm())
    }

    /// Solves for `(C₁, C₀)` by Cramer's rule.
    pub fn solve(&self, rhs: [Complex64; 2]) -> Result<(Complex64, Complex64)> {
        if !(self.relative_det() > 1e-12) {
            return Err(Error::SpectrumMismatch(format!("singular resolvent system at lambda = {}", self.lambda)));
        }
        let [[a, b], [c, d]] = self.matrix;
        Ok(((rhs[0] * d - b * rhs[1]) / self.det, (a * rhs[1] - c * rhs[0]) / self.det))
    }
}

/// Residue-based spectrum detector for one extension.
#[derive(Debug, Clone)]
pub struct SpectrumDetector {
    pub cache: PoleCache,
    pub beta: ExtensionBeta,
    pub mu: f64,
    r_plus: Complex64,
    r_minus: Complex64,
}

impl SpectrumDetector {
    pub fn new(m: &CauchyMachinery, beta: ExtensionBeta) -> Result<Self> {
        Self::with_cache(PoleCache::new(m)?, m.mu, beta)
    }

    pub fn with_cache(cache: PoleCache, mu: f64, beta: ExtensionBeta) -> Result<Self> {
        let gp = cache.params(I, mu)?;
        let gm = cache.params(-I, mu)?;
        let rp = cache.residues_contour(&gp);
        let rm = cache.residues_contour(&gm);
        Ok(SpectrumDetector {
            r_plus: rp.res_plus + beta.beta * rm.res_plus,
            r_minus: rp.res_minus + beta.beta * rm.res_minus,
            cache,
            beta,
            mu,
        })
    }

    pub fn s0(&self) -> f64 {
        self.cache.s0
    }

    fn params(&self, lambda: f64) -> Result<EigenParams> {
        if !(lambda < 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("detector needs a finite negative lambda, got {lambda}")));
        }
        self.cache.params(Complex64::new(lambda, 0.0), self.mu)
    }

    pub fn system(&self, lambda: f64) -> Result<ResolventSystem> {
        let r = self.cache.residues_contour(&self.params(lambda)?);
        let matrix = [[r.res_plus, -self.r_plus], [r.res_minus, -self.r_minus]];
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        Ok(ResolventSystem { lambda, matrix, det })
    }

    /// `ρ = (res₊G^λ/res₋G^λ)/(R₊/R₋)`; the determinant vanishes exactly when `ρ = 1`.
    pub fn rho(&self, lambda: f64) -> Result<Complex64> {
        let r = self.cache.residues_contour(&self.params(lambda)?);
        Ok((r.res_plus / r.res_minus) / (self.r_plus / self.r_minus))
    }

    /// Real zero indicator `2 sin(arg ρ / 2)`: the imaginary part of the determinant after
    /// dividing out its phase-carrying factor. It changes sign through zero at eigenvalues
    /// and jumps between `±2` where `arg ρ` wraps.
    pub fn indicator(&self, lambda: f64) -> Result<f64> {
        Ok(2.0 * (0.5 * self.rho(lambda)?.arg()).sin())
    }

    /// Right-hand side `(−res₊ L^λ, −res₋ L^λ)` for a source `f` given by samples of
    /// `f(e^y)` on a uniform `y = ln x` grid.
    pub fn rhs_from_source(
        &self,
        lambda: f64,
        y_grid: &[f64],
        f_values: &[f64],
        m: &CauchyMachinery,
    ) -> Result<[Complex64; 2]> {
        if y_grid.len() != f_values.len() || y_grid.len() < 2 {
            return Err(Error::InvalidInput("source samples and grid differ in length".into()));
        }
        let p = self.params(lambda)?;
        let h = y_grid[1] - y_grid[0];
        // b = f/B₊ on the grid, with B₊ the upper boundary value of B^λ.
        let mut b = Vec::with_capacity(y_grid.len());
        for (&y, &f) in y_grid.iter().zip(f_values) {
            b.push(f / b_lambda(CutPlanePoint::upper(y.exp())?, &p, m)?);
        }
        let cauchy = |w: Complex64| -> Complex64 {
            let s: Complex64 = y_grid
                .iter()
                .zip(&b)
                .map(|(&y, bv)| {
                    let x = y.exp();
                    bv * x / (Complex64::new(x, 0.0) - w)
                })
                .sum();
            s * h
        };
        let wm = p.w_minus;
        let pref = 1.0 / (TWO_PI * I * p.lambda_star);
        let res_plus = self.cache.contour_residue_with(true, &p, |w| (w - wm) * cauchy(w) * pref);
        let res_minus = self.cache.contour_residue_with(false, &p, |w| (w - wm) * cauchy(w) * pref);
        Ok([-res_plus, -res_minus])
    }
}

pub fn resolvent_system(lambda: f64, detector: &SpectrumDetector) -> Result<ResolventSystem> {
    detector.system(lambda)
}

/// Negative `λ` in `[lo, hi]` (both negative) where the resolvent determinant vanishes.
pub fn detect_spectrum(detector: &SpectrumDetector, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo < hi && hi < 0.0) {
        return Err(Error::InvalidInput(format!("need lo < hi < 0, got [{lo}, {hi}]")));
    }
    let s0 = detector.s0();
    let (a, b) = (hi.abs().ln(), lo.abs().ln());
    let step = PI / (32.0 * s0);
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let f = |l: f64| detector.indicator(-l.exp());
    let mut found = Vec::new();
    let mut prev_l = a;
    let mut prev = f(a)?;
    for k in 1..=n {
        let l = a + (b - a) * k as f64 / n as f64;
        let cur = f(l)?;
        if prev == 0.0 {
            found.push(-prev_l.exp());
        } else if prev.signum() != cur.signum() && cur != 0.0 && prev.abs() < 1.0 && cur.abs() < 1.0 {
            let root = crate::quad::brent(|x| f(x).unwrap_or(f64::NAN), prev_l, l, 1e-14)?;
            found.push(-root.exp());
        }
        prev_l = l;
        prev = cur;
    }
    if prev == 0.0 {
        found.push(-prev_l.exp());
    }
    found.sort_by(f64::total_cmp);
    found.dedup_by(|x, y| ((*x - *y) / *y).abs() < 1e-12);
    Ok(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub n: i64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketSet {
    /// Norm bound of the bounded part, the supremum of its symbol.
    pub c: f64,
    /// `Δₙ = (λₙ − 2c, λₙ + 2c)`.
    pub brackets: Vec<Interval>,
    /// `κₙ = (λₙ₊₁ + 2c, λₙ − 2c)`, the gap between `Δₙ₊₁` and `Δₙ`; empty when they overlap.
    pub gaps: Vec<Interval>,
    /// Least `n` from which consecutive brackets are disjoint.
    pub n0: i64,
    /// Upper end of the gap below `Δ_{n0}`: beneath it only the brackets can hold spectrum.
    pub kappa: f64,
}

pub fn brackets(l: &LadderResult, mu: f64) -> Result<BracketSet> {
    let c = m1_symbol_sup(mu)?;
    // |λₙ₊₁| − |λₙ| = |λₙ|(ratio − 1) > 4c  ⇔  (2πn − η)/(2s₀) > ln(4c/(ratio − 1)).
    let threshold = (4.0 * c / (l.ratio - 1.0)).ln();
    let n0 = ((2.0 * l.s0 * threshold + l.eta) / TWO_PI).floor() as i64 + 1;
    let brackets: Vec<Interval> =
        l.entries.iter().map(|e| Interval { n: e.n, lo: e.lambda_n - 2.0 * c, hi: e.lambda_n + 2.0 * c }).collect();
    let mut gaps = Vec::new();
    for pair in l.entries.windows(2) {
        let (cur, next) = (pair[0], pair[1]);
        let (lo, hi) = (next.lambda_n + 2.0 * c, cur.lambda_n - 2.0 * c);
        if lo < hi {
            gaps.push(Interval { n: cur.n, lo, hi });
        }
    }
    let kappa = ladder_lambda(n0, l.eta, l.s0) - 2.0 * c;
    Ok(BracketSet { c, brackets, gaps, n0, kappa })
}

/// Whether `Δₙ` and `Δₙ₊₁` are disjoint for every listed `n ≥ n0`.
pub fn disjoint_from(set: &BracketSet, n0: i64) -> bool {
    set.brackets.windows(2).filter(|w| w[0].n >= n0).all(|w| w[1].hi < w[0].lo)
}

/// Energy `−(λ/ε)^{−2}` of the three-body level attached to `λ`.
pub fn h_level(lambda: f64, eps: f64) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!("lambda must be finite and nonzero, got {lambda}")));
    }
    if eps == 0.0 || !eps.is_finite() {
        return Err(Error::InvalidInput(format!("eps must be finite and nonzero, got {eps}")));
    }
    Ok(-(eps * eps) / (lambda * lambda))
}

/// `η` sampled along the circle `β = e^{iα}`, `α ∈ [0, 2π)`, unwrapped.
pub fn eta_curve(s0: f64, samples: usize) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(samples);
    let mut prev: Option<f64> = None;
    let mut offset = 0.0;
    for k in 0..samples {
        let alpha = TWO_PI * k as f64 / samples as f64;
        let (_, eta) = gamma_eta(ExtensionBeta::from_angle(alpha)?, s0)?;
        if let Some(p) = prev {
            offset += wrap_angle(eta - p) - (eta - p);
        }
        prev = Some(eta);
        out.push((alpha, eta + offset));
    }
    Ok(out)
}

/// Whether the unwrapped `η(arg β)` is strictly monotone on a grid of `samples` points.
pub fn eta_is_monotone(s0: f64, samples: usize) -> Result<bool> {
    let c = eta_curve(s0, samples)?;
    let inc = c.windows(2).all(|w| w[1].1 > w[0].1);
    let dec = c.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(inc || dec)
}

/// Regime string used in output metadata.
pub fn regime_of(mu: f64, consts: &CriticalConstants) -> Result<Regime> {
    kernels::check_mu(mu)?;
    Ok(classify(mu, consts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::find_zeros;

    fn machinery(mu: f64) -> CauchyMachinery {
        let cfg = QuadratureConfig::default();
        let z = find_zeros(mu, CriticalConstants::standard(), &cfg).unwrap();
        CauchyMachinery::new(&z, &cfg).unwrap()
    }

    #[test]
    fn beta_i_gives_eta_pi() {
        let (g, eta) = gamma_eta(ExtensionBeta::new(I).unwrap(), 0.8).unwrap();
        assert!((g + 1.0).norm() < 1e-14);
        assert!((eta - PI).abs() < 1e-14);
    }

    #[test]
    fn literal_and_simplified_gamma_agree() {
        for k in 0..16 {
            let b = ExtensionBeta::from_angle(0.4 * k as f64).unwrap();
            let (g, _) = gamma_eta(b, 1.3).unwrap();
            assert!((g - gamma_from_poles(b, 1.3)).norm() < 1e-13);
        }
    }

    #[test]
    fn ladder_ratio_and_condition() {
        let b = ExtensionBeta::from_angle(0.7).unwrap();
        let l = ladder(b, 0.9996, -3, 5).unwrap();
        for w in l.entries.windows(2) {
            assert!((w[1].lambda_n / w[0].lambda_n / l.ratio - 1.0).abs() < 1e-12);
        }
        for e in &l.entries {
            assert!(e.lambda_n < 0.0);
            assert!(residue_condition_gap(e.lambda_n, b, l.s0) < 1e-10);
        }
    }

    #[test]
    fn detector_reproduces_ladder() {
        let m = machinery(1.9);
        let b = ExtensionBeta::from_angle(1.1).unwrap();
        let det = SpectrumDetector::new(&m, b).unwrap();
        let l = ladder(b, m.s0, -3, 3).unwrap();
        let lo = l.entries.last().unwrap().lambda_n * l.ratio.sqrt();
        let hi = l.entries[0].lambda_n / l.ratio.sqrt();
        let found = detect_spectrum(&det, lo, hi).unwrap();
        assert_eq!(found.len(), 7, "{found:?}");
        let mut expect: Vec<f64> = l.entries.iter().map(|e| e.lambda_n).collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in found.iter().zip(&expect) {
            assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn brackets_become_disjoint() {
        let b = ExtensionBeta::new(I).unwrap();
        let l = ladder(b, 0.9996, -3, 12).unwrap();
        let set = brackets(&l, 1.9).unwrap();
        assert!(disjoint_from(&set, set.n0));
        assert!(!disjoint_from(&set, set.n0 - 1) || set.n0 - 1 < -3);
    }

    #[test]
    fn h_level_examples() {
        assert_eq!(h_level(2.0, 2.0).unwrap(), -1.0);
        assert_eq!(h_level(4.0, 2.0).unwrap(), -0.25);
        assert!(h_level(0.0, 1.0).is_err());
    }

    #[test]
    fn detector_midpoints_and_periods() {
        let m = machinery(1.95);
        let b = ExtensionBeta::new(I).unwrap();
        let det = SpectrumDetector::new(&m, b).unwrap();
        let l = ladder(b, m.s0, 0, 2).unwrap();
        let q = l.ratio.sqrt();
        for e in &l.entries {
            let mid = e.lambda_n * q;
            assert!(det.system(mid).unwrap().relative_det() > 0.5);
            assert!(det.system(e.lambda_n).unwrap().relative_det() < 1e-8);
            // one zero per ratio period
            assert_eq!(detect_spectrum(&det, e.lambda_n * l.ratio / q, e.lambda_n / q).unwrap().len(), 1);
        }
        // a sub-interval strictly between two rungs holds nothing
        let e = l.entries[1].lambda_n;
        assert!(detect_spectrum(&det, e * 1.2, e * 1.05).unwrap().is_empty());
    }

    #[test]
    fn rhs_has_no_lower_residue() {
        let m = machinery(1.9);
        let b = ExtensionBeta::from_angle(0.3).unwrap();
        let det = SpectrumDetector::new(&m, b).unwrap();
        let y: Vec<f64> = (0..161).map(|k| -8.0 + 0.1 * k as f64).collect();
        let f: Vec<f64> = y.iter().map(|&t| (-t * t / 4.0).exp()).collect();
        let lambda = ladder(b, m.s0, 0, 0).unwrap().entries[0].lambda_n * 1.7;
        let rhs = det.rhs_from_source(lambda, &y, &f, &m).unwrap();
        assert!(rhs[0].norm().is_finite() && rhs[0].norm() > 0.0);
        assert!(rhs[1].norm() < 1e-9 * rhs[0].norm().max(1.0), "{rhs:?}");
        let (c1, c0) = det.system(lambda).unwrap().solve(rhs).unwrap();
        assert!(c1.norm().is_finite() && c0.norm().is_finite());
    }

    #[test]
    fn reindexing_preserves_ladder_set() {
        let s0 = 1.2;
        let eta = 2.0;
        for n in -4..4 {
            let a = ladder_lambda(n, eta, s0);
            let b = ladder_lambda(n + 1, eta + TWO_PI, s0);
            assert!(((a - b) / a).abs() < 1e-13);
        }
    }

    #[test]
    fn eta_monotone_on_circle() {
        for s0 in [0.3, 1.0, 2.5] {
            assert!(eta_is_monotone(s0, 720).unwrap());
        }
    }
}
