//! Command-line front end: curves, critical points, representations,
//! tightness reports and parameter sweeps as CSV or JSON.

use std::fmt::Write as _;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::hamming::{Extreme, HammingParams};
use crate::oracle::{tightness_check, SearchConfig, TightnessReport};
use crate::phi::{
    critical_rate, envelope_gap, eta, phi_slope, uniform_rate_grid, CriticalPoints, IbCurve,
};
use crate::representation::{optimal_representation, validate_representation};

/// Significant digits of every printed number.
pub const SIG_DIGITS: usize = 12;

/// Smallest gap that `verify` accepts as a witness that `n` symbols fall
/// short of the envelope. Search noise is around 1e-12.
pub const VERIFY_GAP_THRESHOLD: f64 = 1e-8;

/// Allowed distance of the `n + 1` symbol construction from the envelope.
pub const VERIFY_ACHIEVEMENT_TOL: f64 = 1e-9;

/// Rate grid used by `sweep` for the maximal relative difference.
pub const SWEEP_GRID_POINTS: usize = 2000;

/// Regular crossovers used by `sweep` when `--alphas` is not given.
pub const DEFAULT_SWEEP_ALPHAS: usize = 20;

pub mod exit {
    pub const OK: i32 = 0;
    pub const BAD_ARGS: i32 = 2;
    pub const INAPPLICABLE: i32 = 3;
    pub const VERIFICATION: i32 = 4;
    pub const NUMERICAL: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(
    name = "hamming-ib",
    version,
    about = "Information bottleneck curves of n-ary Hamming channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate R, beta, gamma, phi, phi_bar and the slope on a uniform rate grid.
    Curve {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1001)]
        points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Inflection rate, critical tangent rate and envelope slope.
    Critical {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimal representation at a rate, with its validation report.
    Repr {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        rate: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search for n-symbol representations below R_c and compare them with the envelope.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        rate: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long)]
        grid_resolution: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// R_c / ln n and the largest relative gap between phi and phi_bar over a parameter grid.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,7,8")]
        n_list: Vec<usize>,
        /// Comma-separated crossovers; defaults to 20 regular values per n.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum, default_value_t = Unit::Nats)]
    pub unit: Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Unit {
    Nats,
    Bits,
}

impl Unit {
    fn scale(self, v: f64) -> f64 {
        match self {
            Unit::Nats => v,
            Unit::Bits => v / std::f64::consts::LN_2,
        }
    }
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidDistribution(_)
            | Error::InvalidChannel(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_)
            | Error::OutOfRange(_) => exit::BAD_ARGS,
            Error::Inapplicable(_) | Error::DegenerateSlope => exit::INAPPLICABLE,
            Error::OutsideTightnessRegime { .. } => exit::VERIFICATION,
            Error::Numerical(_) => exit::NUMERICAL,
        };
        let message = match e {
            Error::OutsideTightnessRegime { rate, critical } => {
                format!("outside tightness regime: R = {rate} is not in (0, R_c = {critical})")
            }
            other => other.to_string(),
        };
        Self::new(code, message)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(exit::NUMERICAL, format!("write failed: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIG_DIGITS - 1, v).parse().unwrap_or(v)
}

/// Plain decimal rendering with [`SIG_DIGITS`] significant digits.
pub fn format_number(v: f64) -> String {
    let r = round_sig(v);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(num) => {
            if num.is_f64() {
                if let Some(x) = num.as_f64() {
                    *v = json!(round_sig(x));
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn scale_keys(map: &mut Map<String, Value>, keys: &[&str], unit: Unit) {
    for key in keys {
        if let Some(x) = map.get(*key).and_then(Value::as_f64) {
            map.insert((*key).to_string(), json!(unit.scale(x)));
        }
    }
}

fn emit_json(out: &mut dyn Write, mut value: Value) -> CliResult<()> {
    round_json(&mut value);
    let text = serde_json::to_string_pretty(&value)
        .map_err(|e| CliError::new(exit::NUMERICAL, format!("serialization failed: {e}")))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn params(args: &ParamArgs) -> CliResult<HammingParams> {
    Ok(HammingParams::new(args.n, args.alpha)?)
}

fn extreme_message(p: &HammingParams, e: Extreme) -> String {
    match e {
        Extreme::Noiseless => "alpha = 0: noiseless channel, IB(R) = R has no critical rate".into(),
        Extreme::Independent => format!(
            "alpha = 1/{}: X and Y are independent, IB(R) = 0 has no critical rate",
            p.n()
        ),
        Extreme::MaximalCrossover => format!(
            "alpha = 1/{}: IB(R) is linear on [0, ln n] and has no critical rate",
            p.n() - 1
        ),
    }
}

/// `R_c` and friends, or the exit-3 explanation of why they do not exist.
fn critical_points(p: &HammingParams) -> CliResult<CriticalPoints> {
    if let Some(e) = p.extreme() {
        return Err(CliError::new(exit::INAPPLICABLE, extreme_message(p, e)));
    }
    if p.n() == 2 {
        return Err(CliError::new(
            exit::INAPPLICABLE,
            "no critical rate: curve is concave",
        ));
    }
    Ok(critical_rate(p)?)
}

/// Parses arguments, runs the command, and returns the process exit code.
/// Output goes to `out`; diagnostics go to `err`.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::BAD_ARGS
            } else {
                exit::OK
            };
            let text = e.render().to_string();
            if code == exit::OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match run(&cli, out, err) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Curve {
            params: pa,
            points,
            output,
        } => cmd_curve(&params(pa)?, *points, *output, out),
        Command::Critical { params: pa, output } => cmd_critical(&params(pa)?, *output, out),
        Command::Repr {
            params: pa,
            rate,
            output,
        } => cmd_repr(&params(pa)?, *rate, *output, out),
        Command::Verify {
            params: pa,
            rate,
            seed,
            restarts,
            grid_resolution,
            output,
        } => {
            let p = params(pa)?;
            let mut cfg = SearchConfig::for_alphabet(p.n());
            cfg.seed = *seed;
            cfg.restarts = *restarts;
            if let Some(g) = grid_resolution {
                cfg.grid_resolution = *g;
            }
            cmd_verify(&p, *rate, &cfg, *output, out)
        }
        Command::Sweep {
            n_list,
            alphas,
            output,
        } => cmd_sweep(n_list, alphas.as_deref(), *output, out, err),
    }
}

pub fn cmd_curve(
    p: &HammingParams,
    points: usize,
    output: OutputArgs,
    out: &mut dyn Write,
) -> CliResult<()> {
    if points < 2 {
        return Err(CliError::new(exit::BAD_ARGS, "--points must be at least 2"));
    }
    let curve = IbCurve::new(p)?;
    let rows = curve.sample(&uniform_rate_grid(p, points))?;
    let u = output.unit;
    match output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut text = String::from("R,beta,gamma,phi,phi_bar,slope\n");
            for pt in &rows {
                let slope = pt.slope.map(format_number).unwrap_or_default();
                let _ = writeln!(
                    text,
                    "{},{},{},{},{},{}",
                    format_number(u.scale(pt.r)),
                    format_number(pt.beta),
                    format_number(pt.gamma),
                    format_number(u.scale(pt.phi)),
                    format_number(u.scale(pt.phi_bar)),
                    slope
                );
            }
            out.write_all(text.as_bytes())?;
            Ok(())
        }
        Format::Json => {
            let items = rows
                .iter()
                .map(|pt| {
                    json!({
                        "r": u.scale(pt.r),
                        "beta": pt.beta,
                        "gamma": pt.gamma,
                        "phi": u.scale(pt.phi),
                        "phi_bar": u.scale(pt.phi_bar),
                        "slope": pt.slope,
                    })
                })
                .collect();
            emit_json(out, Value::Array(items))
        }
    }
}

pub fn cmd_critical(p: &HammingParams, output: OutputArgs, out: &mut dyn Write) -> CliResult<()> {
    let c = critical_points(p)?;
    let tangency = (phi_slope(p, c.r_c)? - c.envelope_slope).abs();
    let inflection = eta(p, c.beta_s)?.abs();
    let u = output.unit;
    match output.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(
            out,
            json!({
                "r_s": u.scale(c.r_s),
                "beta_s": c.beta_s,
                "r_c": u.scale(c.r_c),
                "beta_c": c.beta_c,
                "envelope_slope": c.envelope_slope,
                "residuals": { "tangency": tangency, "inflection": inflection },
            }),
        ),
        Format::Csv => {
            writeln!(
                out,
                "R_s,beta_s,R_c,beta_c,envelope_slope,tangency_residual,inflection_residual"
            )?;
            let cols = [
                u.scale(c.r_s),
                c.beta_s,
                u.scale(c.r_c),
                c.beta_c,
                c.envelope_slope,
                tangency,
                inflection,
            ];
            let line: Vec<String> = cols.iter().map(|&v| format_number(v)).collect();
            writeln!(out, "{}", line.join(","))?;
            Ok(())
        }
    }
}

fn require_json(output: OutputArgs, command: &str) -> CliResult<()> {
    match output.format {
        Some(Format::Csv) => Err(CliError::new(
            exit::BAD_ARGS,
            format!("{command} only supports --format json"),
        )),
        _ => Ok(()),
    }
}

pub fn cmd_repr(
    p: &HammingParams,
    rate: f64,
    output: OutputArgs,
    out: &mut dyn Write,
) -> CliResult<()> {
    require_json(output, "repr")?;
    let rep = optimal_representation(p, rate)?;
    let report = validate_representation(p, &rep)?;
    let u = output.unit;
    let mut value =
        serde_json::to_value(&rep).map_err(|e| CliError::new(exit::NUMERICAL, e.to_string()))?;
    let mut validation =
        serde_json::to_value(&report).map_err(|e| CliError::new(exit::NUMERICAL, e.to_string()))?;
    if let Value::Object(m) = &mut validation {
        scale_keys(
            m,
            &[
                "i_xt",
                "i_yt",
                "ib_target",
                "rate_deviation",
                "ib_deviation",
            ],
            u,
        );
        if let Some(Value::Array(rates)) = m.get_mut("symbol_rates") {
            for r in rates.iter_mut() {
                if let Some(x) = r.as_f64() {
                    *r = json!(u.scale(x));
                }
            }
        }
        m.insert("passed".into(), json!(report.passed()));
    }
    if let Value::Object(m) = &mut value {
        scale_keys(m, &["r_target"], u);
        m.insert("validation".into(), validation);
    }
    emit_json(out, value)
}

pub fn cmd_verify(
    p: &HammingParams,
    rate: f64,
    cfg: &SearchConfig,
    output: OutputArgs,
    out: &mut dyn Write,
) -> CliResult<()> {
    require_json(output, "verify")?;
    if p.n() >= 3 {
        if let Some(e) = p.extreme() {
            return Err(CliError::new(exit::INAPPLICABLE, extreme_message(p, e)));
        }
    }
    let report: TightnessReport = tightness_check(p, rate, cfg)?;
    let gap_ok = report.gap > VERIFY_GAP_THRESHOLD;
    let achieved = report.card_n1_deviation() <= VERIFY_ACHIEVEMENT_TOL;
    let u = output.unit;
    let mut value =
        serde_json::to_value(&report).map_err(|e| CliError::new(exit::NUMERICAL, e.to_string()))?;
    if let Value::Object(m) = &mut value {
        scale_keys(
            m,
            &[
                "r",
                "r_c",
                "envelope_value",
                "best_at_card_n",
                "best_at_card_n1",
                "gap",
            ],
            u,
        );
        if let Some(Value::Object(cert)) = m.get_mut("search_certificate") {
            scale_keys(cert, &["best_i_xt"], u);
        }
        m.insert("gap_threshold".into(), json!(u.scale(VERIFY_GAP_THRESHOLD)));
        m.insert(
            "achievement_tolerance".into(),
            json!(u.scale(VERIFY_ACHIEVEMENT_TOL)),
        );
        m.insert("passed".into(), json!(gap_ok && achieved));
    }
    emit_json(out, value)?;
    if !gap_ok {
        return Err(CliError::new(
            exit::VERIFICATION,
            format!(
                "gap {} does not exceed the threshold {VERIFY_GAP_THRESHOLD}",
                report.gap
            ),
        ));
    }
    if !achieved {
        return Err(CliError::new(
            exit::VERIFICATION,
            format!(
                "the n + 1 symbol construction misses the envelope by {}",
                report.card_n1_deviation()
            ),
        ));
    }
    Ok(())
}

/// `DEFAULT_SWEEP_ALPHAS` crossovers spread over `(0, 1/(n-1))`, offset so
/// none lands on `1/n`.
pub fn default_sweep_alphas(n: usize) -> Vec<f64> {
    let top = 1.0 / (n as f64 - 1.0);
    let k = DEFAULT_SWEEP_ALPHAS as f64;
    (1..=DEFAULT_SWEEP_ALPHAS)
        .map(|i| (i as f64 - 0.3) / k * top)
        .collect()
}

/// One row of the sweep table; `None` marks a skipped cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub alpha: f64,
    pub cell: Option<(f64, f64)>,
    pub warning: Option<String>,
}

/// Evaluates every `(n, α)` cell in parallel; rows keep parameter order.
pub fn sweep(n_list: &[usize], alphas: Option<&[f64]>) -> CliResult<Vec<SweepRow>> {
    let mut cells = Vec::new();
    for &n in n_list {
        if n < 3 {
            return Err(CliError::new(
                exit::BAD_ARGS,
                format!("sweep needs n ≥ 3, got {n}"),
            ));
        }
        let grid = alphas
            .map(<[f64]>::to_vec)
            .unwrap_or_else(|| default_sweep_alphas(n));
        cells.extend(grid.into_iter().map(|a| (n, a)));
    }
    cells
        .into_par_iter()
        .map(|(n, alpha)| {
            let p = HammingParams::new(n, alpha)?;
            let skip = |warning: String| SweepRow {
                n,
                alpha,
                cell: None,
                warning: Some(warning),
            };
            if let Some(e) = p.extreme() {
                return Ok(skip(extreme_message(&p, e)));
            }
            match envelope_gap(&p, SWEEP_GRID_POINTS) {
                Ok(g) => Ok(SweepRow {
                    n,
                    alpha,
                    cell: Some((g.rc_over_logn, g.max_rel_diff)),
                    warning: None,
                }),
                Err(e @ (Error::Inapplicable(_) | Error::Numerical(_))) => {
                    Ok(skip(format!("skipped: {e}")))
                }
                Err(e) => Err(e.into()),
            }
        })
        .collect()
}

pub fn cmd_sweep(
    n_list: &[usize],
    alphas: Option<&[f64]>,
    output: OutputArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    let rows = sweep(n_list, alphas)?;
    for row in &rows {
        if let Some(w) = &row.warning {
            writeln!(err, "warning: n = {}, alpha = {}: {w}", row.n, row.alpha)?;
        }
    }
    match output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut text = String::from("n,alpha,Rc_over_logn,max_rel_diff\n");
            for row in &rows {
                let (a, b) = match row.cell {
                    Some((a, b)) => (format_number(a), format_number(b)),
                    None => (String::new(), String::new()),
                };
                let _ = writeln!(text, "{},{},{a},{b}", row.n, format_number(row.alpha));
            }
            out.write_all(text.as_bytes())?;
            Ok(())
        }
        Format::Json => {
            let items = rows
                .iter()
                .map(|row| {
                    json!({
                        "n": row.n,
                        "alpha": row.alpha,
                        "rc_over_logn": row.cell.map(|c| c.0),
                        "max_rel_diff": row.cell.map(|c| c.1),
                    })
                })
                .collect();
            emit_json(out, Value::Array(items))
        }
    }
}
