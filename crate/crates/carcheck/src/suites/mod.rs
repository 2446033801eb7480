//! The four check suites and the dispatcher.
//!
//! Each suite appends `CheckRecord`s and notes; numerical failures live
//! inside the records, while a `Err` from a suite means the configuration
//! could not be run at all (bad intervals, unrepresentable cutoff) and maps
//! to exit code 2. Suites run serially in a fixed order so that reports are
//! reproducible byte for byte.

pub mod iso;
pub mod modular;
pub mod ramond;
pub mod symmetries;

use crate::config::SuiteConfig;
use crate::report::{CheckRecord, Report};

/// Runs the configured suite (or all four for `report-all`) and assembles the
/// report.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report, String> {
    cfg.validate()?;
    let mut checks: Vec<CheckRecord> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    match cfg.suite.as_str() {
        "verify-iso" => iso::run(cfg, &mut checks, &mut notes)?,
        "symmetries" => symmetries::run(cfg, &mut checks, &mut notes)?,
        "modular" => modular::run(cfg, &mut checks, &mut notes)?,
        "ramond" => ramond::run(cfg, &mut checks, &mut notes)?,
        "report-all" => {
            iso::run(cfg, &mut checks, &mut notes)?;
            symmetries::run(cfg, &mut checks, &mut notes)?;
            modular::run(cfg, &mut checks, &mut notes)?;
            ramond::run(cfg, &mut checks, &mut notes)?;
        }
        other => return Err(format!("unknown suite {other:?}")),
    }
    Ok(Report {
        config: cfg.clone(),
        checks,
        notes,
    })
}
