//! Command-line driver: parse flags, run the requested suite, emit the
//! report. Exit code 0 when every check passes, 1 when any check fails, 2 on
//! configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use carcheck::config::{Format, SuiteConfig};
use carcheck::suites::{self, run_suite};

#[derive(Parser)]
#[command(
    name = "carcheck",
    version,
    about = "Numerical checks for the chiral fermion mode-relabeling isomorphism"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// CAR and vacuum preservation of the mode-relabeling isomorphism
    VerifyIso(CommonArgs),
    /// Current algebra, Virasoro central terms, transport, gauge rotation
    Symmetries(CommonArgs),
    /// Interval mixing kernels, the flow matrix O(X), diagonal combinations
    Modular(CommonArgs),
    /// Twisted sector: current vev, two-point kernel, zero-point energy
    Ramond(CommonArgs),
    /// All four suites in order, one combined report
    ReportAll(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Family size n (suite-specific default when omitted)
    #[arg(long)]
    n: Option<u32>,
    /// Mode cutoff as a half-integer, e.g. "15/2" or "7.5" or "10"
    #[arg(long)]
    cutoff: Option<String>,
    /// Tolerance override applied to every check
    #[arg(long)]
    tol: Option<f64>,
    /// Interval endpoint angles u1,v1,u2,v2,... in (−π, π] (modular suite)
    #[arg(long, value_delimiter = ',')]
    intervals: Option<Vec<f64>>,
    /// Sample count for randomized checks
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for every pseudo-random draw
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json (report) or csv (modular flow trajectory)
    #[arg(long, default_value = "json")]
    format: String,
}

fn build_config(suite: &str, a: &CommonArgs) -> Result<SuiteConfig, String> {
    let mut cfg = SuiteConfig::new(suite);
    cfg.n = a.n;
    cfg.cutoff = match &a.cutoff {
        Some(s) => Some(
            s.parse()
                .map_err(|e| format!("--cutoff {s:?}: {e}"))?,
        ),
        None => None,
    };
    cfg.tol = a.tol;
    cfg.intervals = a.intervals.clone();
    cfg.samples = a.samples;
    cfg.seed = a.seed;
    cfg.format = Format::parse(&a.format)?;
    cfg.validate()?;
    Ok(cfg)
}

fn write_out(out: &Option<PathBuf>, doc: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, doc).map_err(|e| format!("writing {path:?}: {e}")),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (suite, args) = match &cli.cmd {
        Cmd::VerifyIso(a) => ("verify-iso", a),
        Cmd::Symmetries(a) => ("symmetries", a),
        Cmd::Modular(a) => ("modular", a),
        Cmd::Ramond(a) => ("ramond", a),
        Cmd::ReportAll(a) => ("report-all", a),
    };
    let cfg = match build_config(suite, args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    if cfg.format == Format::Csv {
        return match suites::modular::trajectory_csv(&cfg) {
            Ok(doc) => match write_out(&args.out, &doc) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("configuration error: {e}");
                    ExitCode::from(2)
                }
            },
            Err(e) => {
                eprintln!("configuration error: {e}");
                ExitCode::from(2)
            }
        };
    }
    let report = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    for line in report.terminal_lines() {
        eprintln!("{line}");
    }
    if let Err(e) = write_out(&args.out, &report.to_json()) {
        eprintln!("configuration error: {e}");
        return ExitCode::from(2);
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
