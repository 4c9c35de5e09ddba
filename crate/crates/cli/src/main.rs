mod config;
mod record;
mod suites;
mod trace;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{FileConfig, Overrides, Suite, SuiteConfig};
use record::Status;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use trace::{Grid, TraceKind};

/// Verification runner and trace emitter for tau-function numerics.
#[derive(Debug, Parser)]
#[command(name = "tau-lab", version)]
struct Cli {
    /// TOML file with defaults for `verify`; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run identity checks and emit a JSON report.
    Verify(VerifyArgs),
    /// Sample a function on a grid and write CSV.
    Trace(TraceArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Multiply every tolerance by this factor.
    #[arg(long)]
    tol_scale: Option<f64>,
    /// Quadrature nodes for checks that take a node count.
    #[arg(long)]
    quad_nodes: Option<usize>,
    /// Product truncation order for theta and Lamé checks.
    #[arg(long)]
    trunc: Option<usize>,
    /// Symbol terms L for the linear-system truncation check (compared with 2L).
    #[arg(long)]
    terms: Option<usize>,
    /// Report runtime_ms as 0 so output is byte-stable.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[arg(value_enum)]
    kind: TraceKind,
    /// Comma-separated key=value pairs.
    #[arg(long)]
    params: Option<String>,
    /// lo:hi:n
    #[arg(long, allow_hyphen_values = true)]
    grid: Grid,
    #[arg(long)]
    csv: PathBuf,
}

/// Failures caused by bad input rather than by numerics.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| Usage(e).into())
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn verify(file: FileConfig, args: VerifyArgs) -> Result<bool> {
    let flags = Overrides {
        suite: args.suite,
        json: args.json,
        tol_scale: args.tol_scale,
        quad_nodes: args.quad_nodes,
        trunc: args.trunc,
        terms: args.terms,
        no_timings: args.no_timings,
    };
    let cfg = usage(SuiteConfig::merge(file, flags))?;
    log::info!("running {:?} with tolerance scale {}", cfg.suite, cfg.tol_scale);
    let records = suites::run_suite(&cfg);
    let json = record::to_json(&records);
    match &cfg.json {
        Some(path) => write_atomic(path, &json)?,
        None => std::io::stdout().write_all(json.as_bytes())?,
    }
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    let failed = count(Status::Fail);
    for r in records.iter().filter(|r| r.status == Status::Fail) {
        eprintln!("FAIL {}: abs {:.3e} rel {:.3e} tol {:.1e}", r.id, r.abs_err, r.rel_err, r.tol);
    }
    eprintln!(
        "{} checks: {} pass, {failed} fail, {} report-only",
        records.len(),
        count(Status::Pass),
        count(Status::ReportOnly)
    );
    Ok(failed == 0)
}

fn trace(args: TraceArgs) -> Result<()> {
    let params = usage(trace::parse_params(args.kind, args.params.as_deref()))?;
    let csv = usage(trace::render(args.kind, &params, &args.grid))?;
    write_atomic(&args.csv, &csv)
}

fn run(cli: Cli) -> Result<bool> {
    let file = match &cli.config {
        Some(path) => usage(FileConfig::load(path))?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Verify(args) => verify(file, args),
        Command::Trace(args) => trace(args).map(|()| true),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TAULAB_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
