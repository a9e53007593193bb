//! The `hankel` command line.
//!
//! Exit codes: 0 success, 1 a checked inequality or comparison failed,
//! 2 usage or input error, 3 a numerical method did not converge.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{fmt_float, full_report, rigidity, st_venant_check, BoundReport, CSV_HEADER, FLAG_TOL};
use crate::dirichlet::{solve_polygon, torsional_rigidity_fd, Polygon};
use crate::domains::{norm_sq_of_one, ConformalDomain, Symbol, DEFAULT_SAMPLES};
use crate::error::Error;
use crate::spaces::WeightParam;
use crate::verify::{self, Check, Summary, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGENT: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Inequality chain for each alpha.
    Bound,
    /// Weighted torsional rigidity and its lower bound.
    Rigidity,
    /// The cardioid example: perimeter, area and both lower bounds.
    Example1,
    /// One CSV row per alpha in a grid.
    Sweep,
    /// Finite-difference torsion problem.
    Dirichlet,
    /// The full property battery, summarized as JSON.
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

/// A single weight or an inclusive grid `start:stop:step`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSpec(Vec<f64>);

impl AlphaSpec {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl FromStr for AlphaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("not a number: {t:?}"))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.as_slice() {
            [a] => vec![num(a)?],
            [a, b, c] => {
                let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
                if step <= 0.0 {
                    return Err(format!("grid step must be positive, got {step}"));
                }
                if start > stop {
                    Vec::new()
                } else {
                    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                    (0..count).map(|i| start + i as f64 * step).collect()
                }
            }
            _ => return Err(format!("expected `a` or `start:stop:step`, got {s:?}")),
        };
        if let Some(bad) = values.iter().find(|&&v| v < -1.0) {
            return Err(format!("alpha must be >= -1, got {bad}"));
        }
        Ok(Self(values))
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn samples_arg(s: &str) -> Result<usize, String> {
    let n = positive_usize(s)?;
    if n < 16 {
        return Err("need at least 16 boundary samples".into());
    }
    Ok(n)
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("must be a positive number, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

/// Hankel operator norms, sharp bounds and torsional rigidity.
#[derive(Debug, Parser)]
#[command(name = "hankel", version, about)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// Domain: `disk`, `example1`, or a file of `re im` map coefficients.
    #[arg(long, default_value = "disk")]
    pub domain: String,

    /// Weight `a`, or an inclusive grid `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<AlphaSpec>,

    /// Number of monomials in the compression.
    #[arg(long, default_value_t = 64, value_parser = positive_usize)]
    pub dim: usize,

    /// Boundary samples for perimeter and point-in-domain tests.
    #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = samples_arg)]
    pub samples: usize,

    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format; defaults to table for example1, json for verify and
    /// csv otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Include the finite-difference checks in `verify`.
    #[arg(long)]
    pub fd: bool,

    /// Flag tolerance (bound, sweep) or solver residual (dirichlet).
    #[arg(long, value_parser = positive_f64)]
    pub tol: Option<f64>,

    /// Polygon file (`re im` per vertex) for `dirichlet`, instead of a domain.
    #[arg(long)]
    pub polygon: Option<PathBuf>,

    /// Grid spacing for `dirichlet`; defaults to diameter/400.
    #[arg(long, value_parser = positive_f64)]
    pub spacing: Option<f64>,

    /// Seed for the random symbols and maps of `verify`.
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    pub seed: u64,
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main_entry() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> i32 {
    let mut buf = String::new();
    let code = match dispatch(cli, &mut buf) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hankel: {e}");
            return exit_code_for(&e);
        }
    };
    if let Err(e) = emit(cli, &buf) {
        eprintln!("hankel: cannot write output: {e}");
        return EXIT_USAGE;
    }
    code
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NonConvergent { .. } => EXIT_NONCONVERGENT,
        _ => EXIT_USAGE,
    }
}

fn emit(cli: &Cli, text: &str) -> io::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut String) -> Result<i32, Error> {
    match cli.command {
        Command::Bound => cmd_bound(cli, out),
        Command::Sweep => cmd_sweep(cli, out),
        Command::Rigidity => cmd_rigidity(cli, out),
        Command::Example1 => Ok(cmd_example1(cli, out)),
        Command::Dirichlet => cmd_dirichlet(cli, out),
        Command::Verify => Ok(cmd_verify(cli, out)),
    }
}

fn alphas(cli: &Cli, default: &[f64]) -> Vec<f64> {
    cli.alpha
        .as_ref()
        .map_or_else(|| default.to_vec(), |a| a.values().to_vec())
}

fn domain(cli: &Cli) -> Result<ConformalDomain, Error> {
    ConformalDomain::from_spec(&cli.domain, cli.samples)
}

/// Reports for each alpha, computed in parallel and returned in grid order.
fn reports(cli: &Cli, alphas: &[f64]) -> Result<Vec<BoundReport>, Error> {
    let d = domain(cli)?;
    alphas
        .par_iter()
        .map(|&a| full_report(&d, &Symbol::Coordinate, WeightParam::new(a)?, cli.dim))
        .collect::<Result<Vec<_>, _>>()
        .map(|mut rs| {
            // Re-evaluate the flags at a caller-chosen tolerance.
            if let Some(tol) = cli.tol {
                for r in &mut rs {
                    retolerance(r, tol);
                }
            }
            rs
        })
}

fn retolerance(r: &mut BoundReport, tol: f64) {
    for f in &mut r.flags {
        f.holds = match f.name {
            "lower_rigidity <= commutator" => r.lower_rigidity <= r.commutator_norm + tol,
            "commutator <= upper_sharp" => r.commutator_norm <= r.upper_sharp + tol,
            "upper_sharp <= putnam" => r.upper_putnam.is_some_and(|p| r.upper_sharp <= p + tol),
            "khavinson <= lower_rigidity" => r.khavinson_lower.is_some_and(|k| k <= r.lower_rigidity + tol),
            _ => f.holds,
        };
    }
}

fn write_reports(format: Format, rs: &[BoundReport], out: &mut String) -> Result<(), Error> {
    match format {
        Format::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in rs {
                out.push_str(&r.csv_row());
                out.push('\n');
            }
        }
        Format::Json => {
            out.push_str(&to_json(rs)?);
            out.push('\n');
        }
        Format::Table => {
            let _ = writeln!(
                out,
                "{:<12} {:>6} {:>5} {:>20} {:>20} {:>20} {:>20} {:>20} {:>8}",
                "domain",
                "alpha",
                "dim",
                "lower_rigidity",
                "commutator",
                "upper_sharp",
                "putnam",
                "khavinson",
                "chain_ok"
            );
            let opt = |v: Option<f64>| v.map(|x| format!("{x:.14}")).unwrap_or_else(|| "-".into());
            for r in rs {
                let _ = writeln!(
                    out,
                    "{:<12} {:>6} {:>5} {:>20.14} {:>20.14} {:>20.14} {:>20} {:>20} {:>8}",
                    r.domain_id,
                    r.alpha,
                    r.dim,
                    r.lower_rigidity,
                    r.commutator_norm,
                    r.upper_sharp,
                    opt(r.upper_putnam),
                    opt(r.khavinson_lower),
                    r.chain_ok()
                );
            }
        }
    }
    Ok(())
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn cmd_bound(cli: &Cli, out: &mut String) -> Result<i32, Error> {
    let rs = reports(cli, &alphas(cli, &[0.0]))?;
    write_reports(cli.format.unwrap_or(Format::Csv), &rs, out)?;
    let failed: Vec<String> = rs
        .iter()
        .flat_map(|r| r.failures().into_iter().map(move |f| format!("alpha={}: {f}", r.alpha)))
        .collect();
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("hankel: chain inequality failed: {}", failed.join("; "));
        Ok(EXIT_FAILED)
    }
}

fn cmd_sweep(cli: &Cli, out: &mut String) -> Result<i32, Error> {
    let rs = reports(cli, &alphas(cli, &[-1.0, -0.5, 0.0, 0.5, 1.0, 2.0]))?;
    write_reports(cli.format.unwrap_or(Format::Csv), &rs, out)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct RigidityRow {
    domain: String,
    alpha: f64,
    rigidity: f64,
    norm_sq_of_one: f64,
    lower_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_physical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    st_venant_bound: Option<f64>,
}

fn cmd_rigidity(cli: &Cli, out: &mut String) -> Result<i32, Error> {
    let d = domain(cli)?;
    let rows = alphas(cli, &[0.0])
        .par_iter()
        .map(|&a| {
            let alpha = WeightParam::new(a)?;
            let rho = rigidity(d.map(), alpha)?;
            let norm = norm_sq_of_one(d.map(), alpha)?;
            let sv = if alpha == WeightParam::BERGMAN {
                Some(st_venant_check(d.map())?)
            } else {
                None
            };
            Ok(RigidityRow {
                domain: d.id().to_string(),
                alpha: a,
                rigidity: rho,
                norm_sq_of_one: norm,
                lower_bound: rho / norm,
                rho_physical: sv.map(|s| s.0),
                st_venant_bound: sv.map(|s| s.1),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            out.push_str("domain,alpha,rigidity,norm_sq_of_one,lower_bound,rho_physical,st_venant_bound\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.domain,
                    fmt_float(r.alpha),
                    fmt_float(r.rigidity),
                    fmt_float(r.norm_sq_of_one),
                    fmt_float(r.lower_bound),
                    opt(r.rho_physical),
                    opt(r.st_venant_bound)
                );
            }
        }
        Format::Json => {
            out.push_str(&to_json(&rows)?);
            out.push('\n');
        }
        Format::Table => {
            for r in &rows {
                let _ = writeln!(out, "domain           {}", r.domain);
                let _ = writeln!(out, "alpha            {}", r.alpha);
                let _ = writeln!(out, "rigidity         {:.15}", r.rigidity);
                let _ = writeln!(out, "norm_sq_of_one   {:.15}", r.norm_sq_of_one);
                let _ = writeln!(out, "lower_bound      {:.15}", r.lower_bound);
                if let (Some(rho), Some(b)) = (r.rho_physical, r.st_venant_bound) {
                    let _ = writeln!(out, "rho_physical     {rho:.15}");
                    let _ = writeln!(out, "st_venant_bound  {b:.15}");
                }
                out.push('\n');
            }
        }
    }
    let bad = rows
        .iter()
        .any(|r| matches!((r.rho_physical, r.st_venant_bound), (Some(rho), Some(b)) if rho > b * (1.0 + FLAG_TOL)));
    if bad {
        eprintln!("hankel: de St. Venant inequality failed");
        return Ok(EXIT_FAILED);
    }
    Ok(EXIT_OK)
}

fn write_checks(format: Format, checks: &[Check], out: &mut String) -> Result<(), Error> {
    match format {
        Format::Json => {
            out.push_str(&to_json(checks)?);
            out.push('\n');
        }
        Format::Csv => {
            out.push_str("name,value,expected,error,tolerance,passed\n");
            let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
            for c in checks {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    c.name,
                    opt(c.value),
                    opt(c.expected),
                    opt(c.error),
                    opt(c.tolerance),
                    c.passed
                );
            }
        }
        Format::Table => {
            for c in checks {
                let value = c.value.map(|v| format!("{v:.12}")).unwrap_or_default();
                let expected = c.expected.map(|v| format!("expected {v:.12}")).unwrap_or_default();
                let status = if c.passed { "ok" } else { "FAIL" };
                let _ = writeln!(out, "{:<24} {:>20}  {:<30} {}", c.name, value, expected, status);
            }
        }
    }
    Ok(())
}

/// Prints the cardioid numbers; exit 0 iff all comparisons hold.
pub fn cmd_example1(cli: &Cli, out: &mut String) -> i32 {
    let checks = match verify::example1_checks(cli.samples) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("hankel: {e}");
            return exit_code_for(&e);
        }
    };
    if let Err(e) = write_checks(cli.format.unwrap_or(Format::Table), &checks, out) {
        eprintln!("hankel: {e}");
        return EXIT_USAGE;
    }
    match checks.iter().find(|c| !c.passed) {
        Some(c) => {
            eprintln!("hankel: example1 comparison failed: {}", c.name);
            EXIT_FAILED
        }
        None => EXIT_OK,
    }
}

#[derive(Debug, Serialize)]
struct DirichletReport {
    shape: String,
    spacing: f64,
    interior_nodes: usize,
    iterations: usize,
    residual: f64,
    rho_fd: f64,
    energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_series: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_difference: Option<f64>,
}

fn cmd_dirichlet(cli: &Cli, out: &mut String) -> Result<i32, Error> {
    let (shape, polygon, series) = match &cli.polygon {
        Some(path) => (path.display().to_string(), Polygon::from_file(path)?, None),
        None => {
            let d = domain(cli)?;
            let rho = PI * rigidity(d.map(), WeightParam::BERGMAN)?;
            (d.id().to_string(), Polygon::from(&d), Some(rho))
        }
    };
    let h = cli.spacing.unwrap_or_else(|| polygon.diameter() / 400.0);
    let grid = solve_polygon(&polygon, h, cli.tol.unwrap_or(1e-8))?;
    let rho = torsional_rigidity_fd(&grid);
    let rel = series.map(|s| (rho - s).abs() / s);
    let report = DirichletReport {
        shape,
        spacing: h,
        interior_nodes: grid.interior_count(),
        iterations: grid.iterations(),
        residual: grid.residual(),
        rho_fd: rho,
        energy: grid.energy(),
        rho_series: series,
        relative_difference: rel,
    };
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            out.push_str(
                "shape,spacing,interior_nodes,iterations,residual,rho_fd,energy,rho_series,relative_difference\n",
            );
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                report.shape,
                fmt_float(report.spacing),
                report.interior_nodes,
                report.iterations,
                fmt_float(report.residual),
                fmt_float(report.rho_fd),
                fmt_float(report.energy),
                opt(report.rho_series),
                opt(report.relative_difference)
            );
        }
        Format::Json => {
            out.push_str(&to_json(&report)?);
            out.push('\n');
        }
        Format::Table => {
            let _ = writeln!(out, "shape            {}", report.shape);
            let _ = writeln!(out, "spacing          {:.6e}", report.spacing);
            let _ = writeln!(out, "interior nodes   {}", report.interior_nodes);
            let _ = writeln!(out, "iterations       {}", report.iterations);
            let _ = writeln!(out, "rho (fd)         {:.10}", report.rho_fd);
            let _ = writeln!(out, "energy           {:.10}", report.energy);
            if let (Some(s), Some(r)) = (report.rho_series, report.relative_difference) {
                let _ = writeln!(out, "rho (series)     {s:.10}");
                let _ = writeln!(out, "relative diff    {r:.3e}");
            }
        }
    }
    if rel.is_some_and(|r| r >= 0.03) {
        eprintln!("hankel: finite-difference rigidity differs from the series value by more than 3%");
        return Ok(EXIT_FAILED);
    }
    Ok(EXIT_OK)
}

fn cmd_verify(cli: &Cli, out: &mut String) -> i32 {
    let opts = VerifyOptions {
        alphas: alphas(cli, &verify::DEFAULT_ALPHAS),
        dim: cli.dim,
        samples: cli.samples,
        seed: cli.seed,
        fd: cli.fd,
        ..VerifyOptions::default()
    };
    let summary: Summary = verify::run(&opts);
    let written = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&summary).map(|s| {
            out.push_str(&s);
            out.push('\n');
        }),
        f => write_checks(f, &summary.checks, out),
    };
    if let Err(e) = written {
        eprintln!("hankel: {e}");
        return EXIT_USAGE;
    }
    if summary.passed {
        EXIT_OK
    } else {
        eprintln!("hankel: verify failed: {}", summary.failed.join("; "));
        if summary.nonconvergent {
            EXIT_NONCONVERGENT
        } else {
            EXIT_FAILED
        }
    }
}
