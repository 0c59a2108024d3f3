//! The `starq` command line, callable in-process for tests.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use starq_core::star::coeffs::{coefficient_rows, write_csv};
use starq_core::{
    quantize, run_suite, star_explicit, star_quant, CoeffTable, Error, GeometryKind, Scalar, Suite,
    SymbolPoly, VerifyConfig,
};

pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILED: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "starq", version, about = "Exact projectively equivariant quantization and star-products")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantize a symbol and print its total symbol.
    Quantize {
        expr: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1/2")]
        lambda: String,
    },
    /// Star-product of two symbols.
    Star {
        f: String,
        g: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Route::Explicit)]
        route: Route,
    },
    /// Table of bidifferential coefficients as CSV or JSON.
    Coeffs {
        #[command(flatten)]
        common: Common,
        /// ξ-degree of the left factor; all of 0..=r-max when omitted.
        #[arg(short = 'k')]
        k: Option<u32>,
        /// ξ-degree of the right factor; all of 0..=r-max when omitted.
        #[arg(short = 'l')]
        l: Option<u32>,
        #[arg(long, default_value_t = 3)]
        r_max: u32,
    },
    /// Run a verification suite and print its report.
    Verify {
        /// algebra, operators, quantization, star, hochschild, bivectors or all.
        suite: String,
        #[command(flatten)]
        common: Common,
        /// projective or conformal:p,q
        #[arg(long, default_value = "projective")]
        geometry: String,
        #[arg(long, default_value = "1/2")]
        lambda: String,
        #[arg(long, default_value_t = 3)]
        max_deg: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random cases per sampled check.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Dimension of the base; for `verify` it defaults to the geometry's.
    #[arg(short = 'n')]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Explicit,
    Quant,
    Both,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Explicit => "explicit",
            Route::Quant => "quant",
            Route::Both => "both",
        })
    }
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(msg: impl Into<String>) -> Self {
        Failure {
            code: exit::CONFIG,
            message: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Syntax { .. } | Error::IndexOutOfRange { .. } => exit::PARSE,
            _ => exit::CONFIG,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: exit::IO,
            message: e.to_string(),
        }
    }
}

pub fn parse_geometry(s: &str, n: Option<usize>) -> Result<GeometryKind, Failure> {
    let bad = || Failure::config(format!("unknown geometry `{s}`; expected projective or conformal:p,q"));
    let kind = if s == "projective" {
        GeometryKind::Projective { n: n.unwrap_or(1) }
    } else {
        let rest = s.strip_prefix("conformal:").ok_or_else(bad)?;
        let (p, q) = rest.split_once(',').ok_or_else(bad)?;
        let p: usize = p.trim().parse().map_err(|_| bad())?;
        let q: usize = q.trim().parse().map_err(|_| bad())?;
        GeometryKind::Conformal { p, q }
    };
    if let Some(n) = n {
        if kind.dim() != n {
            return Err(Failure::config(format!("geometry {kind} has dimension {}, but n = {n}", kind.dim())));
        }
    }
    if kind.dim() == 0 {
        return Err(Failure::config("dimension must be at least 1"));
    }
    Ok(kind)
}

fn parse_lambda(s: &str) -> Result<Scalar, Failure> {
    s.parse().map_err(|e: starq_core::scalar::ParseScalarError| Failure::config(e.to_string()))
}

fn dimension(n: Option<usize>) -> Result<usize, Failure> {
    match n.unwrap_or(1) {
        0 => Err(Failure::config("dimension must be at least 1")),
        n => Ok(n),
    }
}

fn format_or(f: Option<Format>, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = f.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::config(format!("format {f:?} is not available for this command").to_lowercase()))
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes")
}

/// Output produced by a command, and whether verification succeeded.
struct Output {
    body: Vec<u8>,
    ok: bool,
}

impl Output {
    fn text(s: String, ok: bool) -> Self {
        let mut body = s.into_bytes();
        body.push(b'\n');
        Output { body, ok }
    }
}

fn execute(cmd: &Command) -> Result<Output, Failure> {
    match cmd {
        Command::Quantize { expr, common, lambda } => {
            let n = dimension(common.n)?;
            let lambda = parse_lambda(lambda)?;
            let format = format_or(common.format, Format::Text, &[Format::Text, Format::Json])?;
            let f = SymbolPoly::parse(expr, n)?;
            let q = quantize(&f, &lambda);
            Ok(match format {
                Format::Json => Output::text(
                    pretty(&json!({
                        "n": n,
                        "lambda": lambda,
                        "symbol": q.to_string(),
                        "operator": q.operator_string(),
                    })),
                    true,
                ),
                _ => Output::text(format!("{q}\noperator: {}", q.operator_string()), true),
            })
        }
        Command::Star { f, g, common, route } => {
            let n = dimension(common.n)?;
            let format = format_or(common.format, Format::Text, &[Format::Text, Format::Json])?;
            let f = SymbolPoly::parse(f, n)?;
            let g = SymbolPoly::parse(g, n)?;
            let half = Scalar::new(1, 2);
            let explicit = matches!(route, Route::Explicit | Route::Both)
                .then(|| star_explicit(&f, &g))
                .transpose()?;
            let quant = matches!(route, Route::Quant | Route::Both)
                .then(|| star_quant(&f, &g, &half))
                .transpose()?;
            let equal = match (&explicit, &quant) {
                (Some(a), Some(b)) => Some(a == b),
                _ => None,
            };
            let ok = equal.unwrap_or(true);
            Ok(match format {
                Format::Json => {
                    let mut v = json!({ "n": n, "route": route.to_string() });
                    if let Some(e) = &explicit {
                        v["explicit"] = e.to_string().into();
                    }
                    if let Some(q) = &quant {
                        v["quant"] = q.to_string().into();
                    }
                    if let Some(eq) = equal {
                        v["equal"] = eq.into();
                    }
                    Output::text(pretty(&v), ok)
                }
                _ => {
                    let text = match (explicit, quant) {
                        (Some(e), Some(q)) => format!("explicit: {e}\nquant: {q}\nequal: {}", ok),
                        (Some(p), None) | (None, Some(p)) => p.to_string(),
                        (None, None) => unreachable!("a route is always selected"),
                    };
                    Output::text(text, ok)
                }
            })
        }
        Command::Coeffs { common, k, l, r_max } => {
            let n = dimension(common.n)? as u32;
            let format = format_or(common.format, Format::Csv, &[Format::Csv, Format::Json])?;
            let ks: Vec<u32> = k.map_or_else(|| (0..=*r_max).collect(), |k| vec![k]);
            let ls: Vec<u32> = l.map_or_else(|| (0..=*r_max).collect(), |l| vec![l]);
            let table = CoeffTable::global();
            let mut rows = Vec::new();
            for &k in &ks {
                for &l in &ls {
                    rows.extend(coefficient_rows(n, k, l, *r_max, table));
                }
            }
            let mut body = Vec::new();
            match format {
                Format::Json => {
                    serde_json::to_writer_pretty(&mut body, &rows).expect("rows serialize");
                    body.push(b'\n');
                }
                _ => write_csv(&rows, &mut body)?,
            }
            Ok(Output { body, ok: true })
        }
        Command::Verify {
            suite,
            common,
            geometry,
            lambda,
            max_deg,
            seed,
            samples,
        } => {
            let suite: Suite = suite.parse()?;
            let geometry = parse_geometry(geometry, common.n)?;
            let format = format_or(common.format, Format::Json, &[Format::Json, Format::Text])?;
            let mut cfg = VerifyConfig::new(geometry.dim());
            cfg.geometry = geometry;
            cfg.lambda = parse_lambda(lambda)?;
            cfg.max_deg = *max_deg;
            cfg.seed = *seed;
            cfg.samples = *samples;
            let report = run_suite(suite, &cfg)?;
            let ok = report.passed();
            Ok(match format {
                Format::Text => {
                    let mut lines: Vec<String> = report
                        .checks
                        .iter()
                        .map(|c| {
                            let status = if c.passed() { "pass" } else { "fail" };
                            match &c.witness {
                                Some(w) => format!("{}: {status} {w}", c.name),
                                None => format!("{}: {status}", c.name),
                            }
                        })
                        .collect();
                    let passed = report.checks.iter().filter(|c| c.passed()).count();
                    lines.push(format!("{passed}/{} passed (seed {})", report.checks.len(), report.seed));
                    Output::text(lines.join("\n"), ok)
                }
                _ => Output::text(report.to_json(), ok),
            })
        }
    }
}

fn out_path(cmd: &Command) -> Option<&PathBuf> {
    match cmd {
        Command::Quantize { common, .. }
        | Command::Star { common, .. }
        | Command::Coeffs { common, .. }
        | Command::Verify { common, .. } => common.out.as_ref(),
    }
}

/// Runs a parsed command, writing its output to `--out` or `stdout` and
/// diagnostics to `stderr`; returns the exit code.
pub fn run_cli(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = execute(&cli.command).and_then(|out| {
        match out_path(&cli.command) {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                w.write_all(&out.body)?;
                w.flush()?;
            }
            None => stdout.write_all(&out.body)?,
        }
        Ok(out.ok)
    });
    match result {
        Ok(true) => exit::OK,
        Ok(false) => exit::FAILED,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_cli(&cli, stdout, stderr),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                exit::PARSE
            } else {
                let _ = write!(stdout, "{}", e.render());
                exit::OK
            }
        }
    }
}
