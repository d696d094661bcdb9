//! `ibclab` command line: run verification suites, list spectra and sweep
//! boundary parameters from a JSON config.

mod config;
mod run;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{ConfigError, OperatorName, RunConfig, SuiteName, TOL_ENV};
use ibclab::report::VerificationReport;
use run::{SpectrumError, Table};

#[derive(Parser, Debug)]
#[command(name = "ibclab", version, about = "Verification suites for interior-boundary-condition operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Identity tolerance overriding the config and the environment.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the configured suite and write its JSON report.
    Run {
        #[command(flatten)]
        common: Common,
        /// CSV output for tabular suites.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write the eigenvalues of an operator of the configured model as CSV.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        operator: Option<OperatorName>,
    },
    /// Run the configured parameter sweep and write it as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// JSON report of the sweep.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn load(common: &Common) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::load(&common.config)?;
    cfg.resolve(common.seed, common.tol, std::env::var(TOL_ENV).ok())?;
    Ok(cfg)
}

fn write_to(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> std::io::Result<()> {
    match path {
        Some(p) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(p)?);
            body(&mut f)?;
            f.flush()
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)
        }
    }
}

fn write_report(path: Option<&Path>, rep: &VerificationReport) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(rep).map_err(std::io::Error::other)?;
    write_to(path, |w| writeln!(w, "{text}"))
}

fn write_table(path: Option<&Path>, t: &Table) -> std::io::Result<()> {
    write_to(path, |w| t.write(w).map_err(std::io::Error::other))
}

fn error_report(suite: &str, cfg: Option<&RunConfig>, e: &dyn std::fmt::Display) -> VerificationReport {
    let mut rep = VerificationReport::new(suite);
    rep.error = Some(e.to_string());
    if let Some(c) = cfg {
        rep.config = serde_json::to_value(c).unwrap_or_default();
    }
    rep
}

fn summary(rep: &VerificationReport) {
    let failed = rep.failures().count();
    eprintln!("{}: {} ({} checks, {failed} failed)", rep.suite, if rep.pass() { "pass" } else { "fail" }, rep.checks.len());
    for c in rep.failures().take(10) {
        eprintln!("  {} [{}]: residual {:e}, tolerance {:e}{}", c.name, c.anchor, c.residual, c.tolerance, c.detail.as_ref().map(|d| format!(" ({d})")).unwrap_or_default());
    }
    if let Some(e) = &rep.error {
        eprintln!("  error: {e}");
    }
}

fn io_fail(e: std::io::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn cmd_run(common: &Common, csv: Option<&Path>, forced: Option<SuiteName>) -> ExitCode {
    let cfg = match load(common) {
        Ok(mut c) => {
            if let Some(s) = forced {
                c.suite = s;
            }
            c
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let out = common.out.clone().or_else(|| if forced.is_none() { cfg.out.clone() } else { None });
    let t0 = Instant::now();
    match run::run_suite(&cfg) {
        Ok((mut rep, table)) => {
            rep.set_elapsed(t0.elapsed());
            summary(&rep);
            let csv_path = csv.map(Path::to_path_buf).or_else(|| cfg.csv.clone());
            let written = if forced == Some(SuiteName::Sweep) {
                let table = table.expect("sweep produces a table");
                write_table(out.as_deref(), &table).and_then(|_| match csv_path {
                    Some(p) => write_report(Some(&p), &rep),
                    None => Ok(()),
                })
            } else {
                write_report(out.as_deref(), &rep).and_then(|_| match (table, csv_path) {
                    (Some(t), Some(p)) => write_table(Some(&p), &t),
                    _ => Ok(()),
                })
            };
            if let Err(e) = written {
                return io_fail(e);
            }
            if rep.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let rep = error_report(&format!("{:?}", cfg.suite).to_lowercase(), Some(&cfg), &e);
            if forced.is_none() {
                if let Err(e) = write_report(out.as_deref(), &rep) {
                    return io_fail(e);
                }
            }
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn cmd_spectrum(common: &Common, operator: Option<OperatorName>) -> ExitCode {
    let cfg = match load(common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let op = operator.or(cfg.operator).unwrap_or_default();
    match run::spectrum(&cfg, op) {
        Ok(t) => match write_table(common.out.as_deref(), &t) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => io_fail(e),
        },
        Err(SpectrumError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Run { common, csv } => cmd_run(common, csv.as_deref(), None),
        Command::Spectrum { common, operator } => cmd_spectrum(common, *operator),
        Command::Sweep { common, report } => cmd_run(common, report.as_deref(), Some(SuiteName::Sweep)),
    }
}
