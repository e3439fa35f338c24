//! `volprod`: polar bodies, Santaló points, volume products, flag reports
//! and seeded sweeps from the command line.
//!
//! Exit codes: 0 success, 2 I/O or parse error, 3 geometric precondition failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use volprod::experiments::{
    fit_records, read_csv, run_lemma_suite, run_santalo_stability, run_theorem_sweep, write_csv,
    Family, SweepConfig,
};
use volprod::io::{body_to_json, builtin, read_body, BodyError};
use volprod::polarity::{polar, santalo_point, volume_product_with, SantaloOptions, DEFAULT_TOL};
use volprod::simplexflags::{lemma_report, RegularSimplex};
use volprod::{GeomError, Polytope, Vector};

#[derive(Parser)]
#[command(
    name = "volprod",
    version,
    about = "Volume products of convex polytopes near the simplex"
)]
struct Cli {
    /// Santaló solver and membership tolerance.
    #[arg(long, global = true, env = "VOLPROD_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// JSON body file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Builtin body: `simplex:n` or `cube:n`.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Single-body quantities.
    Body {
        #[command(flatten)]
        input: Input,
        #[arg(value_enum)]
        action: BodyAction,
        /// Polarity centre for `polar`: `0` or comma-separated coordinates.
        #[arg(long, default_value = "0")]
        center: String,
        /// Query point for `contains`, comma-separated.
        #[arg(long)]
        point: Option<String>,
    },
    /// Santaló point by damped Newton.
    Santalo {
        #[command(flatten)]
        input: Input,
    },
    /// Volume product at the Santaló point.
    Vp {
        #[command(flatten)]
        input: Input,
    },
    /// Flag-polytope report of a body inside the regular simplex.
    Flags {
        #[command(flatten)]
        input: Input,
        /// Expected dimension.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Seeded sweep writing a CSV and a JSON summary.
    Sweep {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Strictly decreasing, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV path; the summary goes next to it with a `.summary.json` suffix.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = SweepMode::Theorem)]
        kind: SweepMode,
        #[arg(long)]
        jobs: Option<usize>,
        /// Fill `runtime_ms` (makes output depend on the machine).
        #[arg(long)]
        record_timing: bool,
    },
    /// Slopes and exponents of a sweep CSV.
    Fit { csv: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum BodyAction {
    Volume,
    Centroid,
    Polar,
    Contains,
    Hull,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepMode {
    Theorem,
    Stability,
    Lemma,
}

enum CliError {
    Io(String),
    Parse(String),
    Geom(GeomError),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Geom(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Geom(e) => write!(f, "geometric error: {e}"),
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::InvalidInput(m) => CliError::Parse(m),
            e => CliError::Geom(e),
        }
    }
}

impl From<BodyError> for CliError {
    fn from(e: BodyError) -> Self {
        match e {
            BodyError::Io { .. } => CliError::Io(e.to_string()),
            BodyError::Parse(m) => CliError::Parse(m),
            BodyError::Geom(g) => CliError::Geom(g),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn load(input: &Input) -> CliResult<Polytope> {
    match (&input.input, &input.builtin) {
        (Some(path), None) => Ok(read_body(path)?),
        (None, Some(name)) => Ok(builtin(name)?),
        _ => Err(CliError::Parse(
            "give exactly one of --input or --builtin".into(),
        )),
    }
}

fn parse_point(text: &str, n: usize) -> CliResult<Vector> {
    if text.trim() == "0" {
        return Ok(Vector::zeros(n));
    }
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Parse(format!("bad point {text:?}")))?;
    if coords.len() != n {
        return Err(CliError::Geom(GeomError::DimensionMismatch {
            expected: n,
            got: coords.len(),
        }));
    }
    Ok(Vector::from_vec(coords))
}

fn body_value(p: &Polytope) -> Value {
    serde_json::from_str(&body_to_json(p)).expect("body json is valid")
}

fn cmd_body(
    k: &Polytope,
    action: BodyAction,
    center: &str,
    point: Option<&str>,
    tol: f64,
) -> CliResult<Value> {
    Ok(match action {
        BodyAction::Volume => json!({ "volume": k.volume()? }),
        BodyAction::Centroid => json!({ "centroid": k.moments()?.centroid().as_slice() }),
        BodyAction::Polar => {
            let z = parse_point(center, k.dim())?;
            let p = polar(k, &z)?;
            let mut v = body_value(&p);
            v["center"] = json!(z.as_slice());
            v["volume"] = json!(p.volume()?);
            v
        }
        BodyAction::Contains => {
            let text = point.ok_or_else(|| CliError::Parse("contains needs --point".into()))?;
            let x = parse_point(text, k.dim())?;
            json!({ "contains": k.contains(&x, tol) })
        }
        BodyAction::Hull => body_value(k),
    })
}

fn options(tol: f64) -> SantaloOptions {
    SantaloOptions {
        tol,
        ..Default::default()
    }
}

fn cmd_vp(k: &Polytope, tol: f64) -> CliResult<Value> {
    let r = volume_product_with(k, options(tol))?;
    Ok(json!({
        "vp": r.vp,
        "santalo": r.santalo.point.as_slice(),
        "volumes": { "body": r.body_volume, "polar": r.polar_volume },
        "iterations": r.santalo.iterations,
        "centroid_norm": r.santalo.centroid_norm,
    }))
}

fn cmd_flags(k: &Polytope, n: Option<usize>) -> CliResult<Value> {
    if let Some(n) = n {
        if n != k.dim() {
            return Err(CliError::Geom(GeomError::DimensionMismatch {
                expected: n,
                got: k.dim(),
            }));
        }
    }
    let s = RegularSimplex::new(k.dim())?;
    Ok(serde_json::to_value(lemma_report(k, &s)?).expect("report serializes"))
}

fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".summary.json");
    out.with_file_name(name)
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    family: Family,
    n: usize,
    deltas: &[f64],
    samples: usize,
    seed: u64,
    out: &Path,
    kind: SweepMode,
    jobs: Option<usize>,
    record_timing: bool,
) -> CliResult<Value> {
    let mut cfg = SweepConfig::new(family, n, deltas, samples, seed);
    cfg.jobs = jobs;
    cfg.record_timing = record_timing;
    cfg.validate()?;
    // open both outputs before the sweep so an unwritable path fails fast
    let csv_out = create(out)?;
    let json_path = summary_path(out);
    let mut json_out = create(&json_path)?;
    let (records, summary) = match kind {
        SweepMode::Theorem => run_theorem_sweep(&cfg)?,
        SweepMode::Stability => run_santalo_stability(&cfg)?,
        SweepMode::Lemma => run_lemma_suite(&cfg)?,
    };
    write_csv(&records, n, csv_out).map_err(|e| CliError::Io(e.to_string()))?;
    serde_json::to_writer_pretty(&mut json_out, &summary)
        .map_err(|e| CliError::Io(e.to_string()))?;
    json_out.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(json!({
        "records": records.len(),
        "failures": summary.failures.len(),
        "passed": summary.passed(),
        "csv": out.display().to_string(),
        "summary": json_path.display().to_string(),
    }))
}

fn cmd_fit(path: &Path) -> CliResult<Value> {
    let file = File::open(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let records = read_csv(file).map_err(|e| CliError::Parse(e.to_string()))?;
    let summary = fit_records(&records)?;
    let mut v = serde_json::to_value(&summary).expect("summary serializes");
    if summary.affine_trivial {
        v["note"] = json!("affine-trivial family");
    }
    Ok(v)
}

fn run(cli: Cli) -> CliResult<Value> {
    if !(cli.tol > 0.0) {
        return Err(CliError::Parse("tolerance must be positive".into()));
    }
    match cli.command {
        Command::Body {
            input,
            action,
            center,
            point,
        } => cmd_body(&load(&input)?, action, &center, point.as_deref(), cli.tol),
        Command::Santalo { input } => {
            let r = santalo_point(&load(&input)?, cli.tol)?;
            Ok(serde_json::to_value(&r).expect("santalo result serializes"))
        }
        Command::Vp { input } => cmd_vp(&load(&input)?, cli.tol),
        Command::Flags { input, n } => cmd_flags(&load(&input)?, n),
        Command::Sweep {
            family,
            n,
            deltas,
            samples,
            seed,
            out,
            kind,
            jobs,
            record_timing,
        } => cmd_sweep(
            family,
            n,
            &deltas,
            samples,
            seed,
            &out,
            kind,
            jobs,
            record_timing,
        ),
        Command::Fit { csv } => cmd_fit(&csv),
    }
}

/// Round every number to 15 significant digits.
fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(x) if x.is_f64() => {
            let f = x.as_f64().unwrap_or_default();
            let r: f64 = format!("{f:.14e}").parse().unwrap_or(f);
            *v = json!(if r == 0.0 { 0.0 } else { r });
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(mut v) => {
            round_numbers(&mut v);
            let text = serde_json::to_string_pretty(&v).expect("output serializes");
            // a closed pipe is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("volprod: {e}");
            ExitCode::from(e.code())
        }
    }
}
