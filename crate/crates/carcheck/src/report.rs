//! Check records and deterministic report assembly.
//!
//! A check computes one number and compares it against one expected value at
//! one tolerance; everything else (what the number measures, how it failed)
//! is carried as strings. The JSON writer is deliberately hand-rolled: keys
//! are emitted in a fixed (alphabetical) order at every level and floats are
//! printed at 17 significant digits, so two runs with the same configuration
//! and seed produce byte-identical documents. Wall-clock timings are shown on
//! the terminal but never serialized, for the same reason.

use std::fmt::Write as _;
use std::time::Instant;

use crate::config::SuiteConfig;

/// Outcome of a single identity check.
#[derive(Clone, Debug)]
pub struct CheckRecord {
    /// Stable dotted identifier, e.g. `iso.car.anticommutators.n2`.
    pub id: String,
    /// The identity being checked, written as mathematics.
    pub identity: String,
    /// The measured number (a residual, a vacuum expectation, a count).
    pub computed: f64,
    /// The value the identity predicts.
    pub expected: f64,
    /// Tolerance on |computed − expected|.
    pub tol: f64,
    /// Whether the check passed.
    pub pass: bool,
    /// Failure to even produce a number (domain error, no convergence).
    pub error: Option<String>,
    /// Wall-clock cost, for the terminal only — not serialized.
    pub runtime_ms: f64,
}

/// Runs `f`, times it, and folds the outcome into a record. An `Err` from the
/// closure is surfaced in `error` and fails the check without aborting the
/// suite.
pub fn run_check(
    id: &str,
    identity: &str,
    expected: f64,
    tol: f64,
    f: impl FnOnce() -> Result<f64, String>,
) -> CheckRecord {
    let start = Instant::now();
    let outcome = f();
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let (computed, error) = match outcome {
        Ok(v) => (v, None),
        Err(e) => (f64::NAN, Some(e)),
    };
    let pass = error.is_none() && computed.is_finite() && (computed - expected).abs() <= tol;
    CheckRecord {
        id: id.to_string(),
        identity: identity.to_string(),
        computed,
        expected,
        tol,
        pass,
        error,
        runtime_ms,
    }
}

/// A full suite run: configuration echo, per-check outcomes, and free-form
/// notes (convention choices, observed convergence ladders).
#[derive(Clone, Debug)]
pub struct Report {
    pub config: SuiteConfig,
    pub checks: Vec<CheckRecord>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0
    }

    /// The deterministic JSON document. Keys alphabetical at every level;
    /// floats at 17 significant digits; non-finite floats become `null`.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        s.push_str("{\n  \"checks\": [");
        for (i, c) in self.checks.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str("\n    {\n");
            let _ = writeln!(s, "      \"computed\": {},", json_f64(c.computed));
            let _ = writeln!(s, "      \"error\": {},", json_opt_str(&c.error));
            let _ = writeln!(s, "      \"expected\": {},", json_f64(c.expected));
            let _ = writeln!(s, "      \"id\": {},", json_str(&c.id));
            let _ = writeln!(s, "      \"identity\": {},", json_str(&c.identity));
            let _ = writeln!(s, "      \"pass\": {},", c.pass);
            let _ = writeln!(s, "      \"tol\": {}", json_f64(c.tol));
            s.push_str("    }");
        }
        if self.checks.is_empty() {
            s.push_str("],\n");
        } else {
            s.push_str("\n  ],\n");
        }
        s.push_str("  \"config\": {\n");
        let cutoff = match self.config.cutoff {
            Some(c) => json_str(&c.to_string()),
            None => "null".to_string(),
        };
        let _ = writeln!(s, "    \"cutoff\": {cutoff},");
        let _ = writeln!(s, "    \"format\": {},", json_str(self.config.format.as_str()));
        match &self.config.intervals {
            Some(vals) => {
                let items: Vec<String> = vals.iter().map(|&v| json_f64(v)).collect();
                let _ = writeln!(s, "    \"intervals\": [{}],", items.join(", "));
            }
            None => {
                let _ = writeln!(s, "    \"intervals\": null,");
            }
        }
        match self.config.n {
            Some(n) => {
                let _ = writeln!(s, "    \"n\": {n},");
            }
            None => {
                let _ = writeln!(s, "    \"n\": null,");
            }
        }
        match self.config.samples {
            Some(k) => {
                let _ = writeln!(s, "    \"samples\": {k},");
            }
            None => {
                let _ = writeln!(s, "    \"samples\": null,");
            }
        }
        let _ = writeln!(s, "    \"seed\": {},", self.config.seed);
        let _ = writeln!(s, "    \"suite\": {},", json_str(&self.config.suite));
        match self.config.tol {
            Some(t) => {
                let _ = writeln!(s, "    \"tol\": {}", json_f64(t));
            }
            None => {
                let _ = writeln!(s, "    \"tol\": null");
            }
        }
        s.push_str("  },\n");
        s.push_str("  \"environment\": {\n");
        let _ = writeln!(s, "    \"package\": {},", json_str("carcheck"));
        let _ = writeln!(s, "    \"version\": {}", json_str(env!("CARGO_PKG_VERSION")));
        s.push_str("  },\n");
        if self.notes.is_empty() {
            s.push_str("  \"notes\": [],\n");
        } else {
            s.push_str("  \"notes\": [");
            for (i, n) in self.notes.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str("\n    ");
                s.push_str(&json_str(n));
            }
            s.push_str("\n  ],\n");
        }
        s.push_str("  \"summary\": {\n");
        let _ = writeln!(s, "    \"failed\": {},", self.failed());
        let _ = writeln!(s, "    \"passed\": {},", self.passed());
        let _ = writeln!(s, "    \"total\": {}", self.checks.len());
        s.push_str("  }\n}\n");
        s
    }

    /// One human line per check, for the terminal.
    pub fn terminal_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let status = if c.pass { "PASS" } else { "FAIL" };
                let tail = match &c.error {
                    Some(e) => format!("error: {e}"),
                    None => format!(
                        "computed {:+.6e}, expected {:+.6e}, tol {:.1e}",
                        c.computed, c.expected, c.tol
                    ),
                };
                format!("[{status}] {:<34} {tail}  ({:.0} ms)", c.id, c.runtime_ms)
            })
            .collect();
        lines.push(format!(
            "{}: {} checks, {} passed, {} failed",
            self.config.suite,
            self.checks.len(),
            self.passed(),
            self.failed()
        ));
        lines
    }
}

/// Floats at 17 significant digits in scientific notation; JSON has no
/// non-finite numbers, so those become `null`.
pub fn json_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn json_opt_str(s: &Option<String>) -> String {
    match s {
        Some(v) => json_str(v),
        None => "null".to_string(),
    }
}
