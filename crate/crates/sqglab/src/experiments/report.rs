//! Machine-readable experiment reports.

use crate::error::Result;
use crate::fit::FitResult;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    /// The experiment reports measurements without a pass/fail contract.
    Informational,
}

/// One thresholded measurement.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    /// Human-readable requirement, e.g. "<= 0.1" or "in [0.6, 1.4]*2*sigma".
    pub requirement: String,
    pub pass: bool,
}

impl CheckResult {
    pub fn le(name: &str, value: f64, limit: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            value,
            requirement: format!("<= {limit}"),
            pass: value <= limit,
        }
    }

    pub fn ge(name: &str, value: f64, limit: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            value,
            requirement: format!(">= {limit}"),
            pass: value >= limit,
        }
    }

    pub fn in_range(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            value,
            requirement: format!("in [{lo}, {hi}]"),
            pass: (lo..=hi).contains(&value),
        }
    }
}

/// Named columns of equal length.
#[derive(Debug, Clone, Serialize, Default)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(columns: &[&str]) -> Self {
        Series {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub preset: String,
    pub params: serde_json::Value,
    pub verdict: Verdict,
    pub checks: Vec<CheckResult>,
    pub fits: Vec<FitResult>,
    pub series: Series,
    pub notes: Vec<String>,
    /// Time window the verdict is based on.
    pub window: (f64, f64),
    pub filtered: bool,
    pub riesz_sign: f64,
    /// Wall-clock runtime; informational only, excluded from determinism.
    pub runtime_s: f64,
}

impl ExperimentReport {
    pub fn new(name: &str, preset: &str) -> Self {
        ExperimentReport {
            name: name.to_string(),
            preset: preset.to_string(),
            params: serde_json::Value::Null,
            verdict: Verdict::Informational,
            checks: Vec::new(),
            fits: Vec::new(),
            series: Series::default(),
            notes: Vec::new(),
            window: (0.0, 0.0),
            filtered: false,
            riesz_sign: crate::spectral::riesz_sign(),
            runtime_s: 0.0,
        }
    }

    /// Pass iff every check passed; callers downgrade to inconclusive
    /// separately (bad fits, lost saddles, short windows).
    pub fn settle_verdict(&mut self, inconclusive: bool) {
        self.verdict = if inconclusive {
            Verdict::Inconclusive
        } else if self.checks.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
    }

    /// Write `report.json`, `series.csv` and `fits.dat` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(
            dir.join("report.json"),
            serde_json::to_string_pretty(self)?,
        )?;

        let mut csv = String::new();
        writeln!(csv, "# sqglab experiment series v1").ok();
        writeln!(
            csv,
            "# experiment={} preset={} riesz_sign={:+} filtered={}",
            self.name, self.preset, self.riesz_sign, self.filtered
        )
        .ok();
        writeln!(csv, "# times in simulation units; norms in field units").ok();
        writeln!(csv, "{}", self.series.columns.join(",")).ok();
        for row in &self.series.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(csv, "{}", cells.join(",")).ok();
        }
        std::fs::write(dir.join("series.csv"), csv)?;

        let mut dat = String::new();
        writeln!(dat, "# name slope intercept r2 window_lo window_hi samples").ok();
        for fit in &self.fits {
            writeln!(
                dat,
                "{} {:.10e} {:.10e} {:.6} {:.6e} {:.6e} {}",
                fit.name, fit.slope, fit.intercept, fit.r2, fit.window.0, fit.window.1,
                fit.samples
            )
            .ok();
        }
        std::fs::write(dir.join("fits.dat"), dat)?;
        Ok(())
    }

    /// One-line console summary.
    pub fn summary(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Informational => "INFO",
        };
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        if failed.is_empty() {
            format!("{}: {} ({} checks)", self.name, verdict, self.checks.len())
        } else {
            format!(
                "{}: {} (failed: {})",
                self.name,
                verdict,
                failed.join(", ")
            )
        }
    }
}
