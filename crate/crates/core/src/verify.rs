//! Numerical property suite: every identity the analysis rests on, checked at
//! fixed tolerances and collected into a report.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cauchy::CauchyMachinery;
use crate::cmath::{expm1, I, TWO_PI};
use crate::config::QuadratureConfig;
use crate::constants::{classify, CriticalConstants, Regime};
use crate::eigen::{self, EigenParams, PoleCache};
use crate::error::{Error, Result};
use crate::kernels::{self, sqrt_term, StripPoint};
use crate::mellin::{self, Coast, CutPlanePoint, Interpretation, SampledFunction};
use crate::quad;
use crate::spectrum::{self, ExtensionBeta, SpectrumDetector};
use crate::zeros::{self, find_zeros};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// What the check establishes, in words.
    pub anchor: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn at_most(name: &str, anchor: &str, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail: None,
        }
    }

    fn flag(name: &str, anchor: &str, passed: bool, measured: f64) -> Self {
        Check { name: name.into(), anchor: anchor.into(), passed, measured, tolerance: 0.0, detail: None }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// Observations that are recorded but do not enter `overall`.
    pub diagnostics: Vec<Check>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn diagnostic(&self, name: &str) -> Option<&Check> {
        self.diagnostics.iter().find(|c| c.name == name)
    }
}

/// Mass parameters used when none are given: three per regime.
pub fn default_mu_list(c: &CriticalConstants) -> Vec<f64> {
    let gap = c.mu1 - c.mu0;
    vec![1.0, 1.5, 1.8, c.mu0 + 0.25 * gap, c.mu0 + 0.5 * gap, c.mu0 + 0.75 * gap, 1.89, 1.9, 1.95]
}

struct Ctx<'a> {
    mus: &'a [f64],
    cfg: &'a QuadratureConfig,
    consts: &'a CriticalConstants,
}

impl Ctx<'_> {
    fn in_regime(&self, r: Regime) -> Vec<f64> {
        self.mus.iter().copied().filter(|&m| classify(m, self.consts) == r).collect()
    }

    fn below_mu1(&self) -> Vec<f64> {
        self.mus.iter().copied().filter(|&m| m < self.consts.mu1 - self.consts.tol).collect()
    }

    fn line(&self) -> Vec<f64> {
        self.in_regime(Regime::RealLineZeros)
    }

    fn machinery(&self, mu: f64) -> Result<CauchyMachinery> {
        let z = find_zeros(mu, self.consts, self.cfg)?;
        CauchyMachinery::new(&z, self.cfg)
    }
}

type Section = fn(&Ctx) -> Result<(Vec<Check>, Vec<Check>)>;

const SECTIONS: &[(&str, Section)] = &[
    ("constants", constants_checks),
    ("zeros", zero_checks),
    ("ln_a", ln_a_checks),
    ("sokhotski", sokhotski_checks),
    ("eigen", eigen_checks),
    ("spectrum", spectrum_checks),
    ("identity", identity_checks),
    ("mellin", mellin_checks),
    ("positivity", positivity_checks),
    ("brackets", bracket_checks),
    ("sensitivity", sensitivity_checks),
];

/// Names of the check groups that `verify_all` can select.
pub fn section_names() -> Vec<&'static str> {
    SECTIONS.iter().map(|(k, _)| *k).collect()
}

/// Runs the suite over `mu_list`. `filter` keeps only checks whose name starts with it.
/// Numerical failures inside a group become failing checks rather than errors.
pub fn verify_all(mu_list: &[f64], cfg: &QuadratureConfig, filter: Option<&str>) -> Result<VerificationReport> {
    cfg.validate()?;
    for &mu in mu_list {
        kernels::check_mu(mu)?;
    }
    let consts = CriticalConstants::compute(cfg)?;
    let ctx = Ctx { mus: mu_list, cfg, consts: &consts };
    let selected: Vec<&(&str, Section)> =
        SECTIONS.iter().filter(|(key, _)| filter.is_none_or(|f| key.starts_with(f) || f.starts_with(key))).collect();
    if selected.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no check matches {:?}; groups are {:?}",
            filter.unwrap_or(""),
            section_names()
        )));
    }
    let results: Vec<(Vec<Check>, Vec<Check>)> = selected
        .par_iter()
        .map(|(key, run)| match run(&ctx) {
            Ok(r) => r,
            Err(e) => (
                vec![Check::flag(&format!("{key}.error"), "group ran to completion", false, f64::NAN)
                    .with_detail(e.to_string())],
                Vec::new(),
            ),
        })
        .collect();
    let keep = |c: &Check| filter.is_none_or(|f| c.name.starts_with(f) || c.name.ends_with(".error"));
    let mut checks = Vec::new();
    let mut diagnostics = Vec::new();
    for (c, d) in results {
        checks.extend(c.into_iter().filter(keep));
        diagnostics.extend(d.into_iter().filter(keep));
    }
    let overall = !checks.is_empty() && checks.iter().all(|c| c.passed);
    Ok(VerificationReport { checks, diagnostics, overall })
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

fn constants_checks(ctx: &Ctx) -> Result<(Vec<Check>, Vec<Check>)> {
    let c = ctx.consts;
    let halved = CriticalConstants::compute(&ctx.cfg.scaled(0.5))?;
    let ordered = 0.0 < c.mu0 && c.mu0 < c.mu1 && c.mu1 < 2.0 && 0.0 < c.m1 && c.m1 < c.m0;
    let shift = (c.mu0 - halved.mu0).abs().max((c.mu1 - halved.mu1).abs());
    Ok((
        vec![
            Check::flag(
                "constants.ordering",
                "0 < m1 < m0: the two critical masses exist and are ordered",
                ordered,
                c.mu1 - c.mu0,
            )
            .with_detail(format!("mu0 = {:.15}, mu1 = {:.15}", c.mu0, c.mu1)),
            Check::at_most(
                "constants.tolerance_stability",
                "critical masses are insensitive to halving tolerances",
                shift,
                1e-8,
            ),
        ],
        Vec::new(),
    ))
}

fn zero_checks(ctx: &Ctx) -> Result<(Vec<Check>, Vec<Check>)> {
    let mut residual = 0.0f64;
    let mut sum_gap = 0.0f64;
    let mut prod_gap = 0.0f64;
    let mut winding_ok = true;
    let mut detail = Vec::new();
    for &mu in ctx.mus {
        let regime = classify(mu, ctx.consts);
        let w = zeros::winding_number(mu, ctx.cfg)?;
        let expected = if regime == Regime::SelfAdjoint { 0 } else { 2 };
        winding_ok &= w == expected;
        detail.push(format!("mu={mu}: winding {w}"));
        if regime == Regime::SelfAdjoint {
            continue;
        }
        let z = find_zeros(mu, ctx.consts, ctx.cfg)?;
        for zz in [z.z_plus, z.z_minus] {
            residual = residual.max(kernels::n_fn(StripPoint::new(zz)?, mu, ctx.cfg)?.norm());
        }
        sum_gap = sum_gap.max((z.z_plus + z.z_minus - I).norm());
        prod_gap = prod_gap.max((z.w_plus * z.w_minus - 1.0).norm());
    }
    Ok((
        vec![
            Check::at_most("zeros.residual", "N vanishes at the computed zero pair", residual, 1e-9),
            Check::at_most("zeros.pair_sum", "the zero pair is symmetric about the middle line", sum_gap, 1e-12),
            Check::at_most(
                "zeros.pair_product",
                "the images of the zeros in the cut plane are reciprocal",
                prod_gap,
                1e-12,
            ),
            Check::flag(
                "zeros.winding",
                "argument principle: two zeros in the strip past the first threshold, none before",
                winding_ok,
                0.0,
            )
            .with_detail(detail.join("; ")),
        ],
        Vec::new(),
    ))
}

fn ln_a_checks(ctx: &Ctx) -> Result<(Vec<Check>, Vec<Check>)> {
    let mut incr = 0.0f64;
    let mut tail = 0.0f64;
    let mut coast = 0.0f64;
    let mut diags = Vec::new();
    for mu in ctx.line() {
        let m = ctx.machinery(mu)?;
        incr = incr.max(m.extended.increment.abs());
        tail = tail.max((m.tail_coeff / -TWO_PI - 1.0).abs());
        coast = coast.max((zeros::lower_coast_winding(mu)? + TWO_PI).abs());
        diags.push(Check::at_most(
            &format!("ln_a.increment_to_1e12[mu={mu}]"),
            "arg a increment over the grid ending at x = 1e12, where the -2 pi/ln x tail is still present",
            m.core.increment.abs(),
            1e-3,
        ));
        let core = (m.core.tail_coeff / -TWO_PI - 1.0).abs();
        diags.push(
            Check::at_most(
                &format!("ln_a.tail_fit_to_1e12[mu={mu}]"),
                "c/ln x fit of arg a over the last decade of the grid ending at x = 1e12",
                core,
                0.05,
            )
            .with_detail(format!("coefficient {:.6}", m.core.tail_coeff)),
        );
    }
    Ok((
        vec![
            Check::at_most(
                "ln_a.total_increment",
                "arg a returns to zero across the half-line (|ln x| up to 1e5)",
                incr,
                1e-3,
            ),
            Check::at_most(
                "ln_a.tail_coefficient",
                "arg a decays like -2 pi / ln x (fit on |ln x| in [1e4, 1e5])",
                tail,
                0.05,
            ),
            Check::at_most(
                "ln_a.lower_coast_winding",
                "the symbol winds once clockwise along the lower coast",
                coast,
                1e-3,
            ),
        ],
        diags,
    ))
}

fn sokhotski_checks(ctx: &Ctx) -> Result<(Vec<Check>, Vec<Check>)> {
    let mut jump = 0.0f64;
    let mut limit = 0.0f64;
    for mu in ctx.line().into_iter().take(2) {
        let m = ctx.machinery(mu)?;
        let grid = log_grid(1e-4, 1e6, 200);
        let per_point: Vec<(f64, f64)> = grid
            .par_iter()
            .map(|&t| -> Result<(f64, f64)> {
                let (up, _) = m.k_boundary_limit(t, Coast::Upper)?;
                let (lo, _) = m.k_boundary_limit(t, Coast::Lower)?;
                let la = m.ln_a_at_log(t.ln());
                let kp = m.k_boundary(t, Coast::Upper)?;
                let km = m.k_boundary(t, Coast::Lower)?;
                Ok(((up - lo - la).norm(), (up - kp).norm().max((lo - km).norm())))
            })
            .collect::<Result<_>>()?;
        jump = jump.max(max_of(per_point.iter().map(|p| p.0)));
        limit = limit.max(max_of(per_point.iter().map(|p| p.1)));
    }
    Ok((
        vec![
            Check::at_most("sokhotski.jump", "boundary values of K differ by Ln a across the cut", jump, 1e-7),
            Check::at_most(
                "sokhotski.interior_limit",
                "K(t + i eps) tends to the principal-value boundary value",
                limit,
                1e-6,
            ),
        ],
        Vec::new(),
    ))
}

fn functional_equation_max(m: &CauchyMachinery, lambdas: &[Complex64]) -> Result<f64> {
    let grid = log_grid(1e-6, 1e6, 200);
    let mut worst = 0.0f64;
    for &lam in lambdas {
        let p = EigenParams::new(lam, m)?;
        worst = worst.max(max_of(eigen::functional_equation_residuals(&grid, &p, m)?));
    }
    Ok(worst)
}

const EIGEN_LAMBDAS: [Complex64; 5] = [
    Complex64::new(0.0, 1.0),
    Complex64::new(0.0, -1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(-10.0, 0.0),
    Complex64::new(-0.1, 0.0),
];

fn closed_modulus_max(m: &CauchyMachinery, rng: &mut ChaCha8Rng, count: usize) -> Result<f64> {
    let (wp, wm) = (m.w_plus(), m.w_minus());
    let mut worst = 0.0f64;
    let mut k = 0;
    while k < count {
        // ψ buckets: upper half plane, negative axis, lower half plane.
        let psi = match k % 5 {
            0 | 1 => rng.gen_range(0.05..PI - 0.05),
            2 => PI,
            _ => rng.gen_range(PI + 0.05..TWO_PI - 0.05),
        };
        let w = Complex64::from_polar(rng.gen_range(-8.0f64..8.0).exp(), psi);
        if (w - wp).norm() < 0.05 * wp.norm() || (w - wm).norm() < 0.05 * wm.norm() {
            continue;
        }
        let lam = EIGEN_LAMBDAS[k % EIGEN_LAMBDAS.len()];
        let p = EigenParams::new(lam, m)?;
        let pt = CutPlanePoint::off_cut(w)?;
        let direct = eigen::g_lambda(pt, &p, m)?.norm_sqr();
        let closed = eigen::abs2_closed(pt, &p, m)?;
        worst = worst.max((direct / closed - 1.0).abs());
        k += 1;
    }
    Ok(worst)
}

fn eigen_checks(ctx: &Ctx) -> Result<(Vec<Check>, Vec<Check>)> {
    let mut fe = 0.0f64;
    let mut closed = 0.0f64;
    let mut traces = 0.0f64;
    let mut norms = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for mu in ctx.line().into_iter().take(2) {
        let m = ctx.machinery(mu)?;
        fe = fe.max(functional_equation_max(&m, &EIGEN_LAMBDAS)?);
        closed = closed.max(closed_modulus_max(&m, &mut rng, 100)?);
        let grid = log_grid(1e-5, 1e5, 120);
        for lam in EIGEN_LAMBDAS {
            let p = EigenParams::new(lam, &m)?;
            let (up, lo) = eigen::boundary_traces(&grid, &p, &m)?;
            for ((&t, gu), gl) in grid.iter().zip(&up.values).zip(&lo.values) {
                let (cu, cl) = eigen::trace_abs2(t, &p);
                traces = traces.max((gu.norm_sqr() / cu - 1.0).abs()).max((gl.norm_sqr() / cl - 1.0).abs());
            }
        }
        let (a, b) = eigen::deficiency_norms(&m)?;
        norms = norms.max((a / b - 1.0).abs());
    }
    Ok((
        vec![
            Check::at_most(
                "eigen.functional_equation",
                "the explicit eigenfunction satisfies its boundary relation on the cut",
                fe,
                1e-7,
            ),
            Check::at_most(
                "eigen.closed_modulus",
                "|G|^2 from K agrees with its Poisson-integral closed form",
                closed,
                1e-6,
            ),
            Check::at_most(
                "eigen.coast_traces",
                "moduli of the boundary traces match their closed forms",
                traces,
                1e-7,
            ),
            Check::at_most(
                "eigen.deficiency_norms",
                "the deficiency eigenfunctions at +i and -i have equal norms",
                norms,
                1e-9,
            ),
        ],
        Vec::new(),
    ))
}

fn test_betas() -> Result<Vec<ExtensionBeta>> {
    Ok(vec![
        ExtensionBeta::new(I)?,
        ExtensionBeta::from_angle(0.0)?,
        ExtensionBeta::from_angle(2.3)?,
        ExtensionBeta::from_angle(-0.9)?,
    ])
}

fn spectrum_checks(ctx: &Ctx) -> Result<(Vec<Check>, Vec<Check>)> {
    let mut match_gap = 0.0f64;
    let mut count_ok = true;
    let mut ratio_gap = 0.0f64;
    let mut eta_gap = 0.0f64;
    let mut cond_gap = 0.0f64;
    let mut base_gap = 0.0f64;
    let mut printed_gap = f64::INFINITY;
    let mut detail = Vec::new();
    for mu in ctx.line().into_iter().take(2) {
        let m = ctx.machinery(mu)?;
        let cache = PoleCache::new(&m)?;
        for beta in test_betas()? {
            let det = SpectrumDetector::with_cache(cache.clone(), mu, beta)?;
            let l = spectrum::ladder(beta, m.s0, -3, 3)?;
            if beta.beta == I {
                eta_gap = eta_gap.max((l.eta - PI).abs());
            }
            for e in &l.entries {
                cond_gap = cond_gap.max(spectrum::residue_condition_gap(e.lambda_n, beta, l.s0));
            }
            let q = l.ratio.sqrt();
            let lo = l.entries.last().map(|e| e.lambda_n * q).unwrap_or(-1.0);
            let hi = l.entries[0].lambda_n / q;
            let found = spectrum::detect_spectrum(&det, lo, hi)?;
            let mut expect: Vec<f64> = l.entries.iter().map(|e| e.lambda_n).collect();
            expect.sort_by(f64::total_cmp);
            if found.len() != expect.len() {
                count_ok = false;
                match_gap = f64::INFINITY;
            } else {
                for (a, b) in found.iter().zip(&expect) {
                    match_gap = match_gap.max(((a - b) / b).abs());
                }
                for w in found.windows(2) {
                    ratio_gap = ratio_gap.max((w[0] / w[1] / l.ratio - 1.0).abs());
                }
            }
            for e in &l.entries {
                let n = spectrum::detect_spectrum(&det, e.lambda_n * q, e.lambda_n / q)?.len();
                count_ok &= n == 1;
            }
            // Base eigenvalue: the residue-condition value against the printed closed form.
            let l0 = l.lambda0;
            let printed = spectrum::lambda0_printed(l.eta, l.s0);
            let near = |x: f64| -> Result<f64> {
                let z = spectrum::detect_spectrum(&det, x * l.ratio, x / l.ratio)?;
                Ok(z.iter().map(|r| ((r - x) / x).abs()).fold(f64::INFINITY, f64::min))
            };
            base_gap = base_gap.max(near(l0)?);
            let pg = near(printed)?;
            printed_gap = printed_gap.min(pg);
            detail.push(format!(
                "mu={mu}, beta={:.3}{:+.3}i: lambda0 = {l0:.12e}, printed candidate {printed:.12e} (gap {pg:.3e})",
                beta.beta.re, beta.beta.im
            ));
        }
    }
    let checks = vec![
        Check::at_most(
            "spectrum.detector_matches_ladder",
            "determinant zeros of the resolvent system reproduce the ladder",
            match_gap,
            1e-6,
        ),
        Check::flag("spectrum.one_per_period", "exactly one eigenvalue per ratio period", count_ok, 0.0),
        Check::at_most(
            "spectrum.ladder_ratio",
            "consecutive detected eigenvalues have ratio exp(pi/s0)",
            ratio_gap,
            1e-10,
        ),
        Check::at_most("spectrum.eta_at_beta_i", "beta = i gives eta = pi", eta_gap, 1e-14),
        Check::at_most(
            "spectrum.residue_condition",
            "every ladder entry solves the residue condition",
            cond_gap,
            1e-10,
        ),
        Check::at_most(
            "spectrum.base_eigenvalue",
            "base eigenvalue from the residue condition is a detector zero; the printed closed form is not",
            base_gap,
            1e-6,
        )
        .with_detail(format!("printed candidate best relative gap {printed_gap:.3e}; {}", detail.join("; "))),
    ];
    let diags = vec![Check::at_most(
        "spectrum.base_eigenvalue_printed",
        "printed closed form -exp(-eta)/(2 s0) as a detector zero",
        printed_gap,
        1e-6,
    )];
    Ok((checks, diags))
}

/// Left side of the line-kernel identity, integrated in `u = ln ξ`.
pub fn kernel_identity_lhs(s: f64, psi: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if !(psi > 0.0 && psi < TWO_PI) {
        return Err(Error::Domain(format!("psi must lie in (0, 2 pi), got {psi}")));
    }
    let shift = Complex64::new(0.0, 2.0 * (PI - psi));
    let f = |u: f64| {
        // ξe^{iψ} − e^{−iψ} = e^{−iψ}·expm1(u + 2iψ), stable where the two terms cancel.
        let den = Complex64::from_polar(1.0, -psi) * expm1(Complex64::new(u, 2.0 * psi));
        (u - shift) * Complex64::new(0.5 * u, -s * u).exp() / den
    };
    let cfg = QuadratureConfig { max_subdivisions: cfg.max_subdivisions.max(2000), ..*cfg };
    let est = quad::integrate_with_breaks(f, -120.0, 120.0, &[-20.0, -5.0, 0.0, 5.0, 20.0], &cfg)?;
    Ok(-est.value / TWO_PI)
}

/// Right side: `2π / ((e^{−2πs} + 1)² e^{2ψs})`.
pub fn kernel_identity_rhs(s: f64, psi: f64) -> f64 {
    let d = (-TWO_PI * s).exp() + 1.0;
    TWO_PI / (d * d * (2.0 * psi * s).exp())
}

/// Same with the first power of `(e^{−2πs} + 1)`, as the identity is sometimes quoted.
pub fn kernel_identity_rhs_printed(s: f64, psi: f64) -> f64 {
    TWO_PI / (((-TWO_PI * s).exp() + 1.0) * (2.0 * psi * s).exp())
}

/// Max relative gap between both sides over the `(s, ψ)` grid, and the same for the quoted form.
pub fn verify_5_38(s_grid: &[f64], psi_grid: &[f64], cfg: &QuadratureConfig) -> Result<(Check, Check)> {
    let mut worst = 0.0f64;
    let mut printed = 0.0f64;
    for &s in s_grid {
        for &psi in psi_grid {
            let lhs = kernel_identity_lhs(s, psi, cfg)?;
            let rhs = kernel_identity_rhs(s, psi);
            worst = worst.max((lhs - rhs).norm() / rhs.abs());
            let rp = kernel_identity_rhs_printed(s, psi);
            printed = printed.max((lhs - rp).norm() / rp.abs());
        }
    }
    Ok((
        Check::at_most(
            "identity.line_kernel",
            "Mellin-type kernel integral equals its closed form for every b",
            worst,
            1e-6,
        ),
        Check::at_most(
            "identity.line_kernel_printed",
            "same integral against the closed form with a single power of (exp(-2 pi s) + 1)",
            printed,
            1e-6,
        ),
    ))
}

fn identity_checks(ctx: &Ctx) -> Result<(Vec<Check>, Vec<Check>)> {
    let s_grid = [-0.8, -0.3, 0.0, 0.4, 0.9];
    let psi_grid = [0.5, 1.5, PI, 4.0, 5.5];
    let (main, printed) = verify_5_38(&s_grid, &psi_grid, ctx.cfg)?;
    Ok((vec![main], vec![printed]))
}

/// `ln Γ(z)` for `Re z > 0` by the Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z.re < 0.5 {
        // Reflection: Γ(z)Γ(1 − z) = π / sin(πz).
        return Complex64::new(PI.ln(), 0.0) - (PI * z).sin().ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(COEF[0], 0.0);
    for (k, &c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let t = z + G + 0.5;
    0.5 * TWO_PI.ln() + (z + 0.5) * t.ln() - t + x.ln()
}

type Corpus = Vec<(&'static str, fn(f64) -> Complex64)>;

/// Test functions of `r` for the Mellin checks.
pub fn mellin_corpus() -> Corpus {
    vec![
        ("exp(-r)", |r| Complex64::new((-r).exp(), 0.0)),
        ("r exp(-r^2)", |r| Complex64::new(r * (-r * r).exp(), 0.0)),
        ("(1 + i r) exp(-r)", |r| Complex64::new(1.0, r) * (-r).exp()),
        ("(1 + r^2)^-3", |r| Complex64::new((1.0 + r * r).powi(-3), 0.0)),
        ("exp(-ln^2 r)", |r| Complex64::new((-r.ln().powi(2)).exp(), 0.0)),
    ]
}

fn mellin_checks(ctx: &Ctx) -> Result<(Vec<Check>, Vec<Check>)> {
    let s_grid = mellin::default_s_grid();
    let r_grid = log_grid(0.05, 20.0, 60);
    let mut parseval = 0.0f64;
    let mut round = 0.0f64;
    let fine = QuadratureConfig { abs_tol: 1e-14, rel_tol: 1e-12, max_subdivisions: 2000, ..*ctx.cfg };
    for (_, phi) in mellin_corpus() {
        let f = mellin::mellin_forward(phi, &s_grid, ctx.cfg)?;
        let radial = quad::integrate(|u: f64| phi(u.exp()).norm_sqr() * (3.0 * u).exp(), -80.0, 40.0, &fine)?.value;
        parseval = parseval.max((f.l2_norm_sq() / radial - 1.0).abs());
        let back = mellin::mellin_inverse(&f, &r_grid, ctx.cfg)?;
        let peak = max_of(r_grid.iter().map(|&r| phi(r).norm()));
        round = round.max(max_of(r_grid.iter().zip(&back.values).map(|(&r, v)| (v - phi(r)).norm() / peak)));
    }
    let pts: Vec<f64> = (0..20).map(|k| -6.0 + 12.0 * k as f64 / 19.0).collect();
    let f = mellin::mellin_forward(|r| Complex64::new((-r).exp(), 0.0), &pts, ctx.cfg)?;
    let gamma = max_of(pts.iter().zip(&f.values).map(|(&s, v)| {
        let exact = ln_gamma(Complex64::new(1.5, -s)).exp() / TWO_PI.sqrt();
        (v - exact).norm() / exact.norm()
    }));
    Ok((
        vec![
            Check::at_most("mellin.parseval", "the Mellin map is unitary from L2(r^2 dr) to L2(ds)", parseval, 1e-7),
            Check::at_most("mellin.round_trip", "inverse after forward transform is the identity", round, 1e-7),
            Check::at_most("mellin.gamma_pair", "exp(-r) maps to Gamma(3/2 - is)/sqrt(2 pi)", gamma, 1e-7),
        ],
        Vec::new(),
    ))
}

fn positivity_checks(ctx: &Ctx) -> Result<(Vec<Check>, Vec<Check>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let grid: Vec<f64> = (0..=960).map(|k| -30.0 + k as f64 / 16.0).collect();
    let mut worst = f64::INFINITY;
    for mu in ctx.below_mu1() {
        for _ in 0..8 {
            let bumps: Vec<(f64, f64, Complex64)> = (0..4)
                .map(|_| {
                    (
                        rng.gen_range(-5.0..5.0),
                        rng.gen_range(0.3..2.0),
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    )
                })
                .collect();
            let values = grid
                .iter()
                .map(|&s| bumps.iter().map(|&(a, b, c)| c * (-(s - a).powi(2) / (2.0 * b * b)).exp()).sum())
                .collect();
            let f = SampledFunction::new(grid.clone(), values, Interpretation::Line)?;
            worst = worst.min(mellin::quadratic_form_m0(&f, mu, ctx.cfg)?);
        }
    }
    let mut centre = f64::NEG_INFINITY;
    for mu in ctx.line() {
        centre = centre.max(kernels::n_on_line(0.0, mu, ctx.cfg)?);
    }
    let mut saddle = 0.0f64;
    for &mu in ctx.mus {
        let q1 = kernels::q1(mu, ctx.cfg)?;
        let on_axis: Vec<f64> = (1..1000)
            .map(|k| Ok(kernels::lambda_fn(StripPoint::new(Complex64::new(0.0, k as f64 / 1000.0))?, mu, ctx.cfg)?.re))
            .collect::<Result<_>>()?;
        let on_line: Vec<f64> = (-500..=500)
            .map(|k| Ok(kernels::lambda_fn(mellin::line_point(k as f64 / 50.0), mu, ctx.cfg)?.re))
            .collect::<Result<_>>()?;
        let min_axis = on_axis.iter().copied().fold(f64::INFINITY, f64::min);
        let max_line = on_line.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        saddle = saddle.max((min_axis - q1).abs()).max((max_line - q1).abs());
    }
    Ok((
        vec![
            Check::flag(
                "positivity.quadratic_form",
                "the quadratic form of M0 is non-negative up to the second threshold",
                worst >= -1e-9,
                worst,
            ),
            Check::flag("positivity.centre_negative", "N(i/2) < 0 past the second threshold", centre < 0.0, centre),
            Check::at_most(
                "positivity.saddle",
                "Lambda(i/2) is the minimum along the imaginary axis and the maximum along the middle line",
                saddle,
                1e-8,
            ),
        ],
        Vec::new(),
    ))
}

fn bracket_checks(ctx: &Ctx) -> Result<(Vec<Check>, Vec<Check>)> {
    let mut disjoint = true;
    let mut n0s = Vec::new();
    let mut ratio = 0.0f64;
    let mut accumulate = true;
    for mu in ctx.line() {
        let s0 = zeros::s0_of_mu(mu, ctx.consts, ctx.cfg)?;
        for beta in test_betas()? {
            let probe = spectrum::ladder(beta, s0, 0, 1)?;
            let n0 = spectrum::brackets(&probe, mu)?.n0;
            let l = spectrum::ladder(beta, s0, n0 - 2, n0 + 12)?;
            let set = spectrum::brackets(&l, mu)?;
            disjoint &= set.n0 == n0 && spectrum::disjoint_from(&set, n0);
            n0s.push(n0);
            let target = (-TWO_PI / s0).exp();
            let h: Vec<f64> = l.entries.iter().map(|e| spectrum::h_level(e.lambda_n, 1.0)).collect::<Result<_>>()?;
            accumulate &= h.iter().all(|&e| e < 0.0) && h.windows(2).all(|w| w[1] > w[0]);
            for w in h.windows(2) {
                ratio = ratio.max((w[1] / w[0] / target - 1.0).abs());
            }
        }
    }
    Ok((
        vec![
            Check::flag("brackets.disjoint", "perturbation brackets separate from a finite index on", disjoint, 0.0)
                .with_detail(format!("n0 values {n0s:?}")),
            Check::at_most("brackets.efimov_ratio", "energy levels have ratio exp(-2 pi/s0)", ratio, 1e-12),
            Check::flag(
                "brackets.efimov_accumulation",
                "energy levels are negative and increase to 0",
                accumulate,
                0.0,
            ),
        ],
        Vec::new(),
    ))
}

fn sensitivity_checks(ctx: &Ctx) -> Result<(Vec<Check>, Vec<Check>)> {
    let Some(mu) = ctx.line().first().copied() else {
        return Ok((Vec::new(), Vec::new()));
    };
    let s0 = zeros::s0_of_mu(mu, ctx.consts, ctx.cfg)? * 1.01;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let (fe, closed) = match CauchyMachinery::with_s0(mu, s0, ctx.cfg) {
        Ok(m) => (functional_equation_max(&m, &EIGEN_LAMBDAS)?, closed_modulus_max(&m, &mut rng, 40)?),
        Err(_) => (f64::INFINITY, f64::INFINITY),
    };
    let detected = !(closed <= 1e-6);
    Ok((
        vec![Check::flag(
            "sensitivity.perturbed_s0",
            "the suite rejects eigenfunctions built on s0 * 1.01",
            detected,
            closed,
        )
        .with_detail(format!("functional equation residual {fe:.3e}, closed-modulus gap {closed:.3e}"))],
        vec![Check::at_most(
            "sensitivity.functional_equation_perturbed",
            "boundary relation with s0 * 1.01 (holds for any s0 in this construction)",
            fe,
            1e-7,
        )],
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureRow {
    pub mu: f64,
    pub sqrt_term: f64,
    pub q0: f64,
    pub q1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureSidecar {
    pub mu0: f64,
    pub mu1: f64,
    pub columns: Vec<String>,
}

fn crossing(
    mu_grid: &[f64],
    rows: &[FigureRow],
    g: impl Fn(f64) -> Result<f64>,
    pick: impl Fn(&FigureRow) -> f64,
) -> Result<f64> {
    for (k, w) in rows.windows(2).enumerate() {
        let (a, b) = (w[0].sqrt_term - pick(&w[0]), w[1].sqrt_term - pick(&w[1]));
        if a.signum() != b.signum() {
            return quad::bisect(|mu| g(mu).unwrap_or(f64::NAN), mu_grid[k], mu_grid[k + 1], 1e-14);
        }
    }
    Err(Error::NoBracket("curve does not cross sqrt(1 - mu^2/4) on the grid".into()))
}

/// Rows `(μ, √(1 − μ²/4), q₀, q₁)` and the two crossing abscissae.
pub fn figure1_data(mu_grid: &[f64], cfg: &QuadratureConfig) -> Result<(Vec<FigureRow>, FigureSidecar)> {
    if mu_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("mu grid must be strictly increasing".into()));
    }
    let rows = mu_grid
        .iter()
        .map(|&mu| Ok(FigureRow { mu, sqrt_term: sqrt_term(mu), q0: kernels::q0(mu, cfg)?, q1: kernels::q1(mu, cfg)? }))
        .collect::<Result<Vec<_>>>()?;
    let mu0 = crossing(mu_grid, &rows, |m| Ok(sqrt_term(m) - kernels::q0(m, cfg)?), |r| r.q0)?;
    let mu1 = crossing(mu_grid, &rows, |m| Ok(sqrt_term(m) - kernels::q1_closed(m)?), |r| r.q1)?;
    let columns = ["mu", "sqrt_term", "q0", "q1"].iter().map(|s| s.to_string()).collect();
    Ok((rows, FigureSidecar { mu0, mu1, columns }))
}

/// Writes the curve table to `path` as CSV (or JSON) and the crossings to `<path>.json`
/// (`<path>.crossings.json` for JSON output).
pub fn emit_figure1(mu_grid: &[f64], path: &Path, csv: bool, cfg: &QuadratureConfig) -> Result<FigureSidecar> {
    let (rows, side) = figure1_data(mu_grid, cfg)?;
    let io = |e: std::io::Error| Error::Io(e.to_string());
    if csv {
        let mut s = String::from("mu,sqrt_term,q0,q1\n");
        for r in &rows {
            s.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", r.mu, r.sqrt_term, r.q0, r.q1));
        }
        std::fs::write(path, s).map_err(io)?;
    } else {
        std::fs::write(path, serde_json::to_string_pretty(&rows).map_err(|e| Error::Io(e.to_string()))?).map_err(io)?;
    }
    let mut side_path = path.as_os_str().to_owned();
    side_path.push(if csv { ".json" } else { ".crossings.json" });
    std::fs::write(&side_path, serde_json::to_string_pretty(&side).map_err(|e| Error::Io(e.to_string()))?)
        .map_err(io)?;
    Ok(side)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanczos_reference_values() {
        assert!((ln_gamma(Complex64::new(0.5, 0.0)).exp().re - PI.sqrt()).abs() < 1e-14);
        assert!((ln_gamma(Complex64::new(5.0, 0.0)).exp().re - 24.0).abs() < 1e-12);
        // |Γ(1 + i)|² = π / sinh π
        let g = ln_gamma(Complex64::new(1.0, 1.0)).exp().norm_sqr();
        assert!((g / (PI / PI.sinh()) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn kernel_identity_negative_axis_origin() {
        let cfg = QuadratureConfig::default();
        let lhs = kernel_identity_lhs(0.0, PI, &cfg).unwrap();
        assert!((lhs - PI / 2.0).norm() < 1e-8, "{lhs}");
        assert!((kernel_identity_rhs(0.0, PI) - PI / 2.0).abs() < 1e-15);
        assert!((kernel_identity_rhs_printed(0.0, PI) - PI).abs() < 1e-15);
    }

    #[test]
    fn filter_selects_group() {
        let c = CriticalConstants::standard();
        let r = verify_all(&[1.9], &QuadratureConfig::default(), Some("brackets")).unwrap();
        assert!(r.checks.iter().all(|c| c.name.starts_with("brackets")));
        assert!(r.overall, "{:#?}", r.checks);
        assert!(c.mu0 > 0.0);
    }

    #[test]
    fn unknown_filter_is_rejected() {
        assert!(verify_all(&[1.9], &QuadratureConfig::default(), Some("nonsense")).is_err());
    }
}
