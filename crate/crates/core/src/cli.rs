//! Command-line front end of the `tms` binary: run configuration, dispatch and
//! JSON/CSV emission.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cauchy::CauchyMachinery;
use crate::config::QuadratureConfig;
use crate::constants::{classify, CriticalConstants, Regime};
use crate::eigen::{self, EigenParams};
use crate::error::{Error, Result};
use crate::kernels::MassParams;
use crate::spectrum::{self, ExtensionBeta, SpectrumDetector};
use crate::verify;
use crate::zeros;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Corrections applied relative to the published formulas, echoed in every output.
pub const VERSION_NOTES: &[&str] = &[
    "base eigenvalue solves exp(-2 i s0 ln|lambda|) = gamma; the printed -exp(-eta)/(2 s0) is reported but not used",
    "line-kernel identity uses (exp(-2 pi s) + 1)^2 in the denominator",
    "closed-form modulus of G uses s = -exp(2 pi sigma) in the Poisson integral and |N*| on the negative axis",
    "lower-coast trace modulus is |G+|^2 |lambda*|^2 / |N*-|^2",
    "tail of arg a is fitted on |ln x| in [1e4, 1e5]; the grid ending at 1e12 is too short for most mu",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "tms",
    version,
    about = "Spectral analysis of the l = 1 TMS operator for two fermions and a third particle"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical mass parameters mu0, mu1 and masses m0, m1.
    Constants,
    /// Zero pair of N in the strip for the selected mass.
    Zeros,
    /// Threshold curves sqrt(1 - mu^2/4), q0 and q1 on a mu grid.
    Curve {
        #[arg(long, default_value_t = 0.01)]
        mu_min: f64,
        #[arg(long, default_value_t = 1.99)]
        mu_max: f64,
        #[arg(long, default_value_t = 199)]
        points: usize,
    },
    /// Negative-eigenvalue ladder with brackets and energy levels.
    Ladder,
    /// Determinant zeros of the resolvent system over the ladder window.
    Detect,
    /// Three-body energy levels of the ladder.
    Hlevels,
    /// Boundary traces of the explicit eigenfunction on a log grid.
    Eigenfunction {
        /// Spectral parameter as "re,im".
        #[arg(long, allow_hyphen_values = true, default_value = "0,1")]
        lambda: String,
        #[arg(long, default_value_t = 1e-4)]
        t_min: f64,
        #[arg(long, default_value_t = 1e4)]
        t_max: f64,
        #[arg(long, default_value_t = 81)]
        points: usize,
    },
    /// Full property suite; exits 1 if any check fails.
    Verify {
        /// Keep only checks whose name starts with this prefix.
        #[arg(long)]
        check: Option<String>,
    },
}

/// Flags shared by all subcommands. Each overrides the same key of `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON file with any of the keys below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Mass parameter mu = 2/(m + 1), in (0, 2).
    #[arg(long, global = true, conflicts_with = "m")]
    pub mu: Option<f64>,
    /// Mass ratio m > 0.
    #[arg(long, global = true)]
    pub m: Option<f64>,
    /// Extension parameter as "re,im", normalised onto the unit circle [default: 0,1].
    #[arg(long, global = true, allow_hyphen_values = true, conflicts_with = "beta_angle")]
    pub beta: Option<String>,
    /// Extension parameter as an angle in radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta_angle: Option<f64>,
    /// Scale in the energy map -(lambda/eps)^-2 [default: 1].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    /// First ladder index [default: -3].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub n_min: Option<i64>,
    /// Last ladder index [default: 3].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub n_max: Option<i64>,
    /// Output format [default: json].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Absolute quadrature tolerance [default: 1e-10].
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    /// Relative quadrature tolerance [default: 1e-10].
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    /// Bisection budget of one adaptive integral [default: 200].
    #[arg(long, global = true)]
    pub tol_max_subdivisions: Option<usize>,
    /// Abscissa where the Cauchy integral switches to its asymptotic tail [default: 1e6].
    #[arg(long, global = true)]
    pub tol_tail_cutoff: Option<f64>,
    /// Half-width in ln x of the principal-value window [default: 0.5].
    #[arg(long, global = true)]
    pub tol_pv_epsilon: Option<f64>,
    /// Sampling density of log grids [default: 64].
    #[arg(long, global = true)]
    pub tol_grid_points_per_decade: Option<usize>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub mu: Option<f64>,
    pub m: Option<f64>,
    pub beta: Option<[f64; 2]>,
    pub beta_angle: Option<f64>,
    pub eps: Option<f64>,
    pub n_min: Option<i64>,
    pub n_max: Option<i64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub quadrature: Option<QuadratureConfig>,
}

/// Resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mass: Option<MassParams>,
    pub beta: ExtensionBeta,
    pub eps: f64,
    pub n_min: i64,
    pub n_max: i64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub quadrature: QuadratureConfig,
}

fn parse_pair(s: &str, what: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::InvalidInput(format!("{what} must be \"re,im\", got {s:?}")));
    }
    let p = |t: &str| t.parse::<f64>().map_err(|e| Error::InvalidInput(format!("{what}: {t:?}: {e}")));
    Ok(Complex64::new(p(parts[0])?, p(parts[1])?))
}

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        // A flag for one of two exclusive keys displaces the file's value for the other.
        let (mu, m) = match (args.mu, args.m) {
            (Some(mu), _) => (Some(mu), None),
            (_, Some(m)) => (None, Some(m)),
            _ => (file.mu, file.m),
        };
        let mass = match (mu, m) {
            (Some(_), Some(_)) => return Err(Error::InvalidInput("give either mu or m, not both".into())),
            (Some(mu), None) => Some(MassParams::from_mu(mu)?),
            (None, Some(m)) => Some(MassParams::from_m(m)?),
            (None, None) => None,
        };
        let beta = match (&args.beta, args.beta_angle) {
            (Some(b), _) => ExtensionBeta::new(parse_pair(b, "beta")?)?,
            (_, Some(a)) => ExtensionBeta::from_angle(a)?,
            _ => match (file.beta, file.beta_angle) {
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidInput("give either beta or beta_angle, not both".into()))
                }
                (Some([re, im]), None) => ExtensionBeta::new(Complex64::new(re, im))?,
                (None, Some(a)) => ExtensionBeta::from_angle(a)?,
                (None, None) => ExtensionBeta::new(Complex64::new(0.0, 1.0))?,
            },
        };
        let eps = args.eps.or(file.eps).unwrap_or(1.0);
        if eps == 0.0 || !eps.is_finite() {
            return Err(Error::InvalidInput(format!("eps must be finite and nonzero, got {eps}")));
        }
        let n_min = args.n_min.or(file.n_min).unwrap_or(-3);
        let n_max = args.n_max.or(file.n_max).unwrap_or(3);
        if n_min > n_max {
            return Err(Error::InvalidInput(format!("n_min = {n_min} exceeds n_max = {n_max}")));
        }
        let mut q = file.quadrature.unwrap_or_default();
        if let Some(v) = args.tol_abs {
            q.abs_tol = v;
        }
        if let Some(v) = args.tol_rel {
            q.rel_tol = v;
        }
        if let Some(v) = args.tol_max_subdivisions {
            q.max_subdivisions = v;
        }
        if let Some(v) = args.tol_tail_cutoff {
            q.tail_cutoff_x = v;
        }
        if let Some(v) = args.tol_pv_epsilon {
            q.pv_epsilon = v;
        }
        if let Some(v) = args.tol_grid_points_per_decade {
            q.grid_points_per_decade = v;
        }
        q.validate()?;
        Ok(RunConfig {
            mass,
            beta,
            eps,
            n_min,
            n_max,
            format: args.format.or(file.format).unwrap_or_default(),
            out: args.out.clone().or(file.out),
            quadrature: q,
        })
    }

    fn require_mass(&self) -> Result<MassParams> {
        self.mass.ok_or_else(|| Error::InvalidInput("this subcommand needs --mu or --m".into()))
    }
}

/// Tabular form of a result for CSV output.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    F(f64),
    I(i64),
    S(String),
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

impl Table {
    fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::F(x) => fmt_f64(*x),
                    Cell::I(n) => n.to_string(),
                    Cell::S(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
                    Cell::S(t) => t.clone(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

struct Output {
    data: Value,
    table: Table,
    extra_meta: Option<Value>,
    regime: Option<Regime>,
    success: bool,
}

fn envelope(run: &RunConfig, out: &Output) -> Value {
    let mut meta = json!({
        "mu": run.mass.map(|m| m.mu),
        "m": run.mass.map(|m| m.m),
        "regime": out.regime.map(|r| r.as_str()),
        "tolerances": run.quadrature,
        "paper_version_notes": VERSION_NOTES,
    });
    if let Some(extra) = &out.extra_meta {
        meta["derived"] = extra.clone();
    }
    json!({ "meta": meta, "data": out.data })
}

fn regime_for(run: &RunConfig, consts: &CriticalConstants) -> Option<Regime> {
    run.mass.map(|m| classify(m.mu, consts))
}

fn cmd_constants(run: &RunConfig) -> Result<Output> {
    let c = CriticalConstants::compute(&run.quadrature)?;
    Ok(Output {
        data: serde_json::to_value(c).map_err(|e| Error::Io(e.to_string()))?,
        table: Table {
            header: vec!["mu0", "mu1", "m0", "m1", "tol"],
            rows: vec![vec![Cell::F(c.mu0), Cell::F(c.mu1), Cell::F(c.m0), Cell::F(c.m1), Cell::F(c.tol)]],
        },
        extra_meta: None,
        regime: regime_for(run, &c),
        success: true,
    })
}

fn cmd_zeros(run: &RunConfig) -> Result<Output> {
    let mass = run.require_mass()?;
    let c = CriticalConstants::compute(&run.quadrature)?;
    let z = zeros::find_zeros(mass.mu, &c, &run.quadrature)?;
    let winding = zeros::winding_number(mass.mu, &run.quadrature)?;
    let opt = |x: Option<f64>| Cell::F(x.unwrap_or(f64::NAN));
    let mut data = serde_json::to_value(z).map_err(|e| Error::Io(e.to_string()))?;
    data["winding"] = json!(winding);
    Ok(Output {
        data,
        table: Table {
            header: vec![
                "z_plus_re",
                "z_plus_im",
                "z_minus_re",
                "z_minus_im",
                "t0",
                "s0",
                "w_plus_re",
                "w_plus_im",
                "w_minus_re",
                "w_minus_im",
                "winding",
            ],
            rows: vec![vec![
                Cell::F(z.z_plus.re),
                Cell::F(z.z_plus.im),
                Cell::F(z.z_minus.re),
                Cell::F(z.z_minus.im),
                opt(z.t0),
                opt(z.s0),
                Cell::F(z.w_plus.re),
                Cell::F(z.w_plus.im),
                Cell::F(z.w_minus.re),
                Cell::F(z.w_minus.im),
                Cell::I(winding as i64),
            ]],
        },
        extra_meta: None,
        regime: Some(z.regime),
        success: true,
    })
}

fn cmd_curve(run: &RunConfig, mu_min: f64, mu_max: f64, points: usize) -> Result<Output> {
    if !(0.0 < mu_min && mu_min < mu_max && mu_max < 2.0) || points < 2 {
        return Err(Error::InvalidInput("curve needs 0 < mu_min < mu_max < 2 and at least 2 points".into()));
    }
    let grid: Vec<f64> = (0..points).map(|k| mu_min + (mu_max - mu_min) * k as f64 / (points - 1) as f64).collect();
    let (rows, side) = verify::figure1_data(&grid, &run.quadrature)?;
    let c = CriticalConstants::compute(&run.quadrature)?;
    Ok(Output {
        data: json!({ "rows": rows, "crossings": { "mu0": side.mu0, "mu1": side.mu1 } }),
        table: Table {
            header: vec!["mu", "sqrt_term", "q0", "q1"],
            rows: rows
                .iter()
                .map(|r| vec![Cell::F(r.mu), Cell::F(r.sqrt_term), Cell::F(r.q0), Cell::F(r.q1)])
                .collect(),
        },
        extra_meta: Some(json!({ "mu0": side.mu0, "mu1": side.mu1 })),
        regime: regime_for(run, &c),
        success: true,
    })
}

struct LadderRun {
    mass: MassParams,
    regime: Regime,
    ladder: spectrum::LadderResult,
    brackets: spectrum::BracketSet,
    consts: CriticalConstants,
}

fn ladder_run(run: &RunConfig) -> Result<LadderRun> {
    let mass = run.require_mass()?;
    let consts = CriticalConstants::compute(&run.quadrature)?;
    let ladder = spectrum::ladder_for_mu(mass.mu, &consts, run.beta, run.n_min, run.n_max, &run.quadrature)?;
    let brackets = spectrum::brackets(&ladder, mass.mu)?;
    Ok(LadderRun { mass, regime: classify(mass.mu, &consts), ladder, brackets, consts })
}

fn ladder_meta(l: &LadderRun) -> Value {
    json!({
        "beta": [l.ladder.beta.beta.re, l.ladder.beta.beta.im],
        "s0": l.ladder.s0,
        "eta": l.ladder.eta,
        "ratio": l.ladder.ratio,
        "lambda0": l.ladder.lambda0,
        "lambda0_printed_candidate": spectrum::lambda0_printed(l.ladder.eta, l.ladder.s0),
        "c": l.brackets.c,
        "n0": l.brackets.n0,
        "kappa": l.brackets.kappa,
    })
}

fn cmd_ladder(run: &RunConfig) -> Result<Output> {
    let l = ladder_run(run)?;
    let mut data = Vec::new();
    let mut rows = Vec::new();
    for (e, b) in l.ladder.entries.iter().zip(&l.brackets.brackets) {
        let h = spectrum::h_level(e.lambda_n, run.eps)?;
        data.push(json!({ "n": e.n, "lambda_n": e.lambda_n, "bracket": [b.lo, b.hi], "h_level": h }));
        rows.push(vec![Cell::I(e.n), Cell::F(e.lambda_n), Cell::F(b.lo), Cell::F(b.hi), Cell::F(h)]);
    }
    Ok(Output {
        data: Value::Array(data),
        table: Table { header: vec!["n", "lambda_n", "bracket_lo", "bracket_hi", "h_level"], rows },
        extra_meta: Some(ladder_meta(&l)),
        regime: Some(l.regime),
        success: true,
    })
}

fn cmd_hlevels(run: &RunConfig) -> Result<Output> {
    let l = ladder_run(run)?;
    let mut data = Vec::new();
    let mut rows = Vec::new();
    for e in &l.ladder.entries {
        let h = spectrum::h_level(e.lambda_n, run.eps)?;
        data.push(json!({ "n": e.n, "lambda_n": e.lambda_n, "h_level": h }));
        rows.push(vec![Cell::I(e.n), Cell::F(e.lambda_n), Cell::F(h)]);
    }
    let mut meta = ladder_meta(&l);
    meta["eps"] = json!(run.eps);
    meta["energy_ratio"] = json!((-2.0 * std::f64::consts::PI / l.ladder.s0).exp());
    Ok(Output {
        data: Value::Array(data),
        table: Table { header: vec!["n", "lambda_n", "h_level"], rows },
        extra_meta: Some(meta),
        regime: Some(l.regime),
        success: true,
    })
}

fn cmd_detect(run: &RunConfig) -> Result<Output> {
    let l = ladder_run(run)?;
    let z = zeros::find_zeros(l.mass.mu, &l.consts, &run.quadrature)?;
    let m = CauchyMachinery::new(&z, &run.quadrature)?;
    let det = SpectrumDetector::new(&m, run.beta)?;
    let q = l.ladder.ratio.sqrt();
    let lo = l.ladder.entries.last().map(|e| e.lambda_n * q).unwrap_or(-1.0);
    let hi = l.ladder.entries[0].lambda_n / q;
    let found = spectrum::detect_spectrum(&det, lo, hi)?;
    let mut data = Vec::new();
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &lam in &found {
        let (n, gap) = l
            .ladder
            .entries
            .iter()
            .map(|e| (e.n, ((lam - e.lambda_n) / e.lambda_n).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, f64::INFINITY));
        worst = worst.max(gap);
        data.push(json!({ "lambda": lam, "nearest_n": n, "relative_gap": gap }));
        rows.push(vec![Cell::F(lam), Cell::I(n), Cell::F(gap)]);
    }
    let success = found.len() == l.ladder.entries.len() && worst <= 1e-6;
    let mut meta = ladder_meta(&l);
    meta["window"] = json!([lo, hi]);
    meta["matches_ladder"] = json!(success);
    Ok(Output {
        data: Value::Array(data),
        table: Table { header: vec!["lambda", "nearest_n", "relative_gap"], rows },
        extra_meta: Some(meta),
        regime: Some(l.regime),
        success,
    })
}

fn cmd_eigenfunction(run: &RunConfig, lambda: &str, t_min: f64, t_max: f64, points: usize) -> Result<Output> {
    let mass = run.require_mass()?;
    let lam = parse_pair(lambda, "lambda")?;
    if !(0.0 < t_min && t_min < t_max && t_max.is_finite()) || points < 2 {
        return Err(Error::InvalidInput("eigenfunction needs 0 < t_min < t_max and at least 2 points".into()));
    }
    let consts = CriticalConstants::compute(&run.quadrature)?;
    let z = zeros::find_zeros(mass.mu, &consts, &run.quadrature)?;
    let m = CauchyMachinery::new(&z, &run.quadrature)?;
    let p = EigenParams::new(lam, &m)?;
    let (a, b) = (t_min.ln(), t_max.ln());
    let grid: Vec<f64> = (0..points).map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp()).collect();
    let (up, lo) = eigen::boundary_traces(&grid, &p, &m)?;
    let res = eigen::functional_equation_residuals(&grid, &p, &m)?;
    let mut data = Vec::new();
    let mut rows = Vec::new();
    for k in 0..grid.len() {
        let (gu, gl) = (up.values[k], lo.values[k]);
        data.push(json!({ "t": grid[k], "g_upper": [gu.re, gu.im], "g_lower": [gl.re, gl.im], "residual": res[k] }));
        rows.push(vec![
            Cell::F(grid[k]),
            Cell::F(gu.re),
            Cell::F(gu.im),
            Cell::F(gl.re),
            Cell::F(gl.im),
            Cell::F(res[k]),
        ]);
    }
    let worst = res.iter().copied().fold(0.0, f64::max);
    Ok(Output {
        data: Value::Array(data),
        table: Table { header: vec!["t", "g_upper_re", "g_upper_im", "g_lower_re", "g_lower_im", "residual"], rows },
        extra_meta: Some(json!({
            "lambda": [lam.re, lam.im],
            "lambda_star": [p.lambda_star.re, p.lambda_star.im],
            "s0": m.s0,
            "max_residual": worst,
        })),
        regime: Some(z.regime),
        success: worst <= 1e-7,
    })
}

fn cmd_verify(run: &RunConfig, check: Option<&str>) -> Result<Output> {
    let consts = CriticalConstants::compute(&run.quadrature)?;
    let mus = match run.mass {
        Some(m) => vec![m.mu],
        None => verify::default_mu_list(&consts),
    };
    let report = verify::verify_all(&mus, &run.quadrature, check)?;
    let rows = report
        .checks
        .iter()
        .map(|c| (c, "check"))
        .chain(report.diagnostics.iter().map(|c| (c, "diagnostic")))
        .map(|(c, kind)| {
            vec![
                Cell::S(c.name.clone()),
                Cell::S(kind.into()),
                Cell::S(if c.passed { "pass" } else { "fail" }.into()),
                Cell::F(c.measured),
                Cell::F(c.tolerance),
                Cell::S(c.anchor.clone()),
            ]
        })
        .collect();
    Ok(Output {
        data: serde_json::to_value(&report).map_err(|e| Error::Io(e.to_string()))?,
        table: Table { header: vec!["name", "kind", "status", "measured", "tolerance", "anchor"], rows },
        extra_meta: Some(json!({ "mu_list": mus })),
        regime: regime_for(run, &consts),
        success: report.overall,
    })
}

fn render(run: &RunConfig, out: &Output) -> Result<String> {
    Ok(match run.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&envelope(run, out)).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => out.table.to_csv(),
    })
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Domain(_) | Error::RegimeMismatch { .. } | Error::NoZeros { .. } => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

/// Runs one parsed invocation, writing the result to `--out` or `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> std::result::Result<i32, (i32, String)> {
    let fail = |e: Error| (exit_code_for(&e), e.to_string());
    let run = RunConfig::resolve(&cli.run).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let out = match &cli.command {
        Command::Constants => cmd_constants(&run),
        Command::Zeros => cmd_zeros(&run),
        Command::Curve { mu_min, mu_max, points } => cmd_curve(&run, *mu_min, *mu_max, *points),
        Command::Ladder => cmd_ladder(&run),
        Command::Detect => cmd_detect(&run),
        Command::Hlevels => cmd_hlevels(&run),
        Command::Eigenfunction { lambda, t_min, t_max, points } => {
            cmd_eigenfunction(&run, lambda, *t_min, *t_max, *points)
        }
        Command::Verify { check } => cmd_verify(&run, check.as_deref()),
    }
    .map_err(fail)?;
    let text = render(&run, &out).map_err(fail)?;
    match &run.out {
        Some(path) => std::fs::write(path, text).map_err(|e| (EXIT_NUMERIC, format!("{}: {e}", path.display())))?,
        None => stdout.write_all(text.as_bytes()).map_err(|e| (EXIT_NUMERIC, e.to_string()))?,
    }
    Ok(if out.success { EXIT_OK } else { EXIT_NUMERIC })
}

/// Parses `argv` and runs it; returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(stderr, "tms: {msg}");
            code
        }
    }
}
