//! Suite configuration: which checks run, at what scale, and how the report
//! is emitted.
//!
//! Every field mirrors a CLI flag. `None` means "use the per-check default
//! frozen in the suite"; a set value overrides it everywhere it makes sense
//! (`tol` overrides every check's tolerance, `cutoff` every space cutoff, and
//! so on). Validation errors are configuration errors, reported before any
//! check runs.

use chiral_car::halfint::HalfInt;

/// Output format for the assembled report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// Deterministic JSON document (sorted keys, fixed float formatting).
    Json,
    /// Flow-matrix trajectory table `X, O_11, O_12, ...` (modular suite only).
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?}, expected json or csv")),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// One run's worth of configuration, echoed verbatim into the report.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Suite name: `verify-iso`, `symmetries`, `modular`, `ramond`, or
    /// `report-all`.
    pub suite: String,
    /// Family size n (checks with a family loop run only this n).
    pub n: Option<u32>,
    /// Mode cutoff override for Fock-space checks.
    pub cutoff: Option<HalfInt>,
    /// Tolerance override applied to every check in the run.
    pub tol: Option<f64>,
    /// Interval endpoint angles `u1, v1, u2, v2, ...` in (−π, π].
    pub intervals: Option<Vec<f64>>,
    /// Sample count for randomized checks.
    pub samples: Option<usize>,
    /// Seed for every pseudo-random draw in the run.
    pub seed: u64,
    /// Report format.
    pub format: Format,
}

pub const SUITES: [&str; 5] = ["verify-iso", "symmetries", "modular", "ramond", "report-all"];

impl SuiteConfig {
    /// A configuration with every override unset: per-check defaults, seed 7,
    /// JSON output.
    pub fn new(suite: &str) -> Self {
        SuiteConfig {
            suite: suite.to_string(),
            n: None,
            cutoff: None,
            tol: None,
            intervals: None,
            samples: None,
            seed: 7,
            format: Format::Json,
        }
    }

    /// Range and coherence checks. `Err` here means exit code 2: nothing ran.
    pub fn validate(&self) -> Result<(), String> {
        if !SUITES.contains(&self.suite.as_str()) {
            return Err(format!("unknown suite {:?}", self.suite));
        }
        if let Some(n) = self.n {
            if !(1..=8).contains(&n) {
                return Err(format!("--n must be in 1..=8, got {n}"));
            }
        }
        if let Some(c) = self.cutoff {
            if !c.is_positive() || c > HalfInt::from_int(64) {
                return Err(format!("--cutoff must be in (0, 64], got {c}"));
            }
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(format!("--tol must be finite and positive, got {t}"));
            }
        }
        if let Some(vals) = &self.intervals {
            if vals.is_empty() || vals.len() % 2 != 0 || vals.len() > 16 {
                return Err(format!(
                    "--intervals takes an even number of endpoint angles (2..=16), got {}",
                    vals.len()
                ));
            }
            if vals.iter().any(|v| !v.is_finite()) {
                return Err("--intervals entries must be finite".to_string());
            }
        }
        if let Some(s) = self.samples {
            if s == 0 || s > 100_000 {
                return Err(format!("--samples must be in 1..=100000, got {s}"));
            }
        }
        if self.format == Format::Csv && self.suite != "modular" {
            return Err(format!(
                "--format csv exports the modular flow trajectory and is only \
                 valid for the modular suite, not {:?}",
                self.suite
            ));
        }
        Ok(())
    }
}
