//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a self-test property failed, 2 parse or
//! validation error, 3 solver failure, 4 `--verify` disagreement. Every
//! nonzero exit writes one line `E<code>: <message>` to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::basis::{BasisSet, EvaluationPoint};
use crate::fit::{fit, FitError, FitResult, ProblemInstance};
use crate::report::{FitReport, ReportOptions};
use crate::selftest::run_selftest;

#[derive(Debug, Parser)]
#[command(
    name = "minimax",
    version,
    about = "Best uniform approximation of finite data sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a basis to CSV data and print a report.
    Fit(FitArgs),
    /// Run the random-instance property battery.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with a header row: x (or x1..xp), y and an optional weight column.
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated basis functions, e.g. "1, x, x^2".
    #[arg(long)]
    pub basis: String,
    /// Name of the weight column.
    #[arg(long)]
    pub weights: Option<String>,
    /// Dimension of the points.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Compare with the brute-force solver (n ≤ 15, m ≤ 4).
    #[arg(long)]
    pub verify: bool,
    /// Extract the dual certificate and run the structural checks.
    #[arg(long)]
    pub certify: bool,
    /// Write "x,fitted" samples of the fitted function here (1-D only).
    #[arg(long, value_name = "PATH")]
    pub emit_curve: Option<PathBuf>,
    /// Number of intervals for --emit-curve.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub instances: usize,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<FitError> for Failure {
    fn from(e: FitError) -> Self {
        let code = match e {
            FitError::Solver(_) | FitError::NotOptimal { .. } => 3,
            FitError::Invalid(_) | FitError::Basis(_) => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Reads the CSV described on [`FitArgs::data`].
pub fn read_instance(
    path: &Path,
    basis: BasisSet,
    weight_column: Option<&str>,
) -> Result<ProblemInstance, String> {
    let p = basis.dimension();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let coordinate_columns: Vec<usize> = (1..=p)
        .map(|k| {
            let named = format!("x{k}");
            find(&named)
                .or_else(|| if p == 1 { find("x") } else { None })
                .ok_or_else(|| format!("missing column {named}"))
        })
        .collect::<Result<_, _>>()?;
    let y_column = find("y").ok_or("missing column y")?;
    let w_column = weight_column
        .map(|w| find(w).ok_or_else(|| format!("missing weight column {w}")))
        .transpose()?;

    let mut points = Vec::new();
    let mut values = Vec::new();
    let mut weights = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let line = row + 2;
        let field = |col: usize| -> Result<f64, String> {
            let raw = record
                .get(col)
                .ok_or_else(|| format!("line {line}: missing field"))?;
            let v: f64 = raw
                .parse()
                .map_err(|_| format!("line {line}: '{raw}' is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("line {line}: '{raw}' is not finite"))
            }
        };
        let coords = coordinate_columns
            .iter()
            .map(|&c| field(c))
            .collect::<Result<Vec<_>, _>>()?;
        points.push(EvaluationPoint::new(coords));
        values.push(field(y_column)?);
        if let Some(c) = w_column {
            weights.push(field(c)?);
        }
    }
    let instance = ProblemInstance::new(points, values, basis).map_err(|e| e.to_string())?;
    if w_column.is_some() {
        instance.with_weights(weights).map_err(|e| e.to_string())
    } else {
        Ok(instance)
    }
}

/// `k + 1` evenly spaced samples of the fit over `[min x, max x]`.
pub fn curve_samples(
    instance: &ProblemInstance,
    fit: &FitResult,
    grid: usize,
) -> Result<Vec<(f64, f64)>, String> {
    if instance.dimension() != 1 {
        return Err("--emit-curve needs one-dimensional points".into());
    }
    if grid == 0 {
        return Err("--grid must be at least 1".into());
    }
    let xs = instance.points().iter().map(EvaluationPoint::x);
    let lo = xs.clone().fold(f64::INFINITY, f64::min);
    let hi = xs.fold(f64::NEG_INFINITY, f64::max);
    (0..=grid)
        .map(|k| {
            let x = if k == grid {
                hi
            } else {
                lo + (hi - lo) * k as f64 / grid as f64
            };
            let y = instance
                .basis()
                .combine(&fit.coefficients, &x.into())
                .map_err(|e| e.to_string())?;
            Ok((x, y))
        })
        .collect()
}

fn write_curve(path: &Path, samples: &[(f64, f64)]) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    w.write_record(["x", "fitted"]).map_err(|e| e.to_string())?;
    for (x, y) in samples {
        w.write_record([x.to_string(), y.to_string()])
            .map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

fn cmd_fit(args: &FitArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let started = Instant::now();
    let basis =
        BasisSet::parse(&args.basis, args.dim).map_err(|e| Failure::validation(e.to_string()))?;
    let instance =
        read_instance(&args.data, basis, args.weights.as_deref()).map_err(Failure::validation)?;
    if args.emit_curve.is_some() && instance.dimension() != 1 {
        return Err(Failure::validation(
            "--emit-curve needs one-dimensional points",
        ));
    }
    let result = fit(&instance)?;
    let options = ReportOptions {
        certify: args.certify,
        verify: args.verify,
    };
    let mut report = FitReport::build(&instance, &result, options);
    if let Some(path) = &args.emit_curve {
        let samples = curve_samples(&instance, &result, args.grid).map_err(Failure::validation)?;
        write_curve(path, &samples).map_err(Failure::validation)?;
    }
    if args.timing {
        report.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    let body = match args.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &args.out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?,
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| Failure::validation(e.to_string()))?,
    }
    if report.oracle_agrees() == Some(false) {
        return Err(Failure {
            code: 4,
            message: "LP fit disagrees with the brute-force solver".into(),
        });
    }
    Ok(())
}

fn cmd_selftest(args: &SelftestArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let summary =
        run_selftest(args.seed, args.instances).map_err(|e| Failure::validation(e.to_string()))?;
    let mut buf = Vec::new();
    summary.render(&mut buf).expect("writing to memory");
    stdout
        .write_all(&buf)
        .map_err(|e| Failure::validation(e.to_string()))?;
    if summary.all_pass() {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: format!("{} property checks failed", summary.failures.len()),
        })
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let _ = writeln!(
                stderr,
                "E2: {}",
                one_line(first.trim_start_matches("error: "))
            );
            return 2;
        }
    };
    let outcome = match &cli.command {
        Command::Fit(a) => cmd_fit(a, stdout),
        Command::Selftest(a) => cmd_selftest(a, stdout),
    };
    match outcome {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "E{}: {}", f.code, one_line(&f.message));
            f.code
        }
    }
}

pub fn run() -> i32 {
    run_with(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}
