//! Observed-versus-predicted comparison rows and their JSON/CSV forms.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a row's observed value is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// |observed − predicted| ≤ tolerance·|predicted|
    Relative,
    /// |observed − predicted| ≤ tolerance
    Absolute,
    /// Angular distance modulo 2π ≤ tolerance
    Angle,
    /// observed ≤ tolerance
    AtMost,
    /// observed ≥ tolerance
    AtLeast,
    /// observed < predicted
    Below,
    /// observed > predicted
    Above,
    /// Reported only.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub observed: f64,
    pub predicted: Option<f64>,
    pub abs_dev: Option<f64>,
    pub rel_dev: Option<f64>,
    pub tolerance: Option<f64>,
    pub check: Check,
    pub pass: bool,
    pub note: String,
}

/// Wraps an angle difference into (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

impl ComparisonRow {
    fn build(name: &str, observed: f64, predicted: Option<f64>, tolerance: Option<f64>, check: Check) -> Self {
        let abs_dev = predicted.map(|p| match check {
            Check::Angle => wrap_angle(observed - p).abs(),
            _ => (observed - p).abs(),
        });
        let rel_dev = match (abs_dev, predicted) {
            (Some(d), Some(p)) if p != 0.0 => Some(d / p.abs()),
            _ => None,
        };
        let mut row = ComparisonRow {
            name: name.to_string(),
            observed,
            predicted,
            abs_dev,
            rel_dev,
            tolerance,
            check,
            pass: false,
            note: String::new(),
        };
        row.pass = row.verdict();
        row
    }

    pub fn relative(name: &str, observed: f64, predicted: f64, tol: f64) -> Self {
        Self::build(name, observed, Some(predicted), Some(tol), Check::Relative)
    }

    pub fn absolute(name: &str, observed: f64, predicted: f64, tol: f64) -> Self {
        Self::build(name, observed, Some(predicted), Some(tol), Check::Absolute)
    }

    pub fn angle(name: &str, observed: f64, predicted: f64, tol: f64) -> Self {
        Self::build(name, observed, Some(predicted), Some(tol), Check::Angle)
    }

    pub fn at_most(name: &str, observed: f64, limit: f64) -> Self {
        Self::build(name, observed, None, Some(limit), Check::AtMost)
    }

    pub fn at_least(name: &str, observed: f64, limit: f64) -> Self {
        Self::build(name, observed, None, Some(limit), Check::AtLeast)
    }

    pub fn below(name: &str, observed: f64, reference: f64) -> Self {
        Self::build(name, observed, Some(reference), None, Check::Below)
    }

    pub fn above(name: &str, observed: f64, reference: f64) -> Self {
        Self::build(name, observed, Some(reference), None, Check::Above)
    }

    pub fn info(name: &str, observed: f64, predicted: Option<f64>) -> Self {
        Self::build(name, observed, predicted, None, Check::Info)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Recomputes pass/fail from the stored numbers.
    pub fn verdict(&self) -> bool {
        if self.check == Check::Info {
            return true;
        }
        if !self.observed.is_finite() {
            return false;
        }
        let tol = self.tolerance.unwrap_or(f64::NAN);
        let p = self.predicted.unwrap_or(f64::NAN);
        match self.check {
            Check::Relative => (self.observed - p).abs() <= tol * p.abs(),
            Check::Absolute => (self.observed - p).abs() <= tol,
            Check::Angle => wrap_angle(self.observed - p).abs() <= tol,
            Check::AtMost => self.observed <= tol,
            Check::AtLeast => self.observed >= tol,
            Check::Below => self.observed < p,
            Check::Above => self.observed > p,
            Check::Info => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub scenario: String,
    pub kind: String,
    pub config_hash: String,
    pub rows: Vec<ComparisonRow>,
    pub pass: bool,
}

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

impl ComparisonReport {
    pub fn new(scenario: &str, kind: &str, config_hash: &str, rows: Vec<ComparisonRow>) -> Self {
        let pass = rows.iter().all(|r| r.pass);
        ComparisonReport {
            scenario: scenario.to_string(),
            kind: kind.to_string(),
            config_hash: config_hash.to_string(),
            rows,
            pass,
        }
    }

    pub fn row(&self, name: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Re-derives every row verdict and the overall verdict from the numbers.
    pub fn recheck(&mut self) -> bool {
        for r in &mut self.rows {
            r.pass = r.verdict();
        }
        self.pass = self.rows.iter().all(|r| r.pass);
        self.pass
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join(REPORT_JSON), json + "\n")?;
        let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join(REPORT_CSV))?);
        writeln!(w, "# scenario = {}", self.scenario)?;
        writeln!(w, "# kind = {}", self.kind)?;
        writeln!(w, "# config_hash = {}", self.config_hash)?;
        writeln!(w, "name,observed,predicted,abs_dev,rel_dev,tolerance,check,pass,note")?;
        for r in &self.rows {
            let check = serde_json::to_value(r.check)?;
            writeln!(
                w,
                "{},{:e},{},{},{},{},{},{},{}",
                r.name,
                r.observed,
                opt(r.predicted),
                opt(r.abs_dev),
                opt(r.rel_dev),
                opt(r.tolerance),
                check.as_str().unwrap_or_default(),
                r.pass,
                r.note.replace(',', ";")
            )?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(REPORT_JSON);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("malformed {}: {e}", path.display())))
    }

    /// Human-readable summary, one line per row.
    pub fn summary(&self) -> String {
        let mut s = format!("{} ({}): {}\n", self.scenario, self.kind, if self.pass { "PASS" } else { "FAIL" });
        for r in &self.rows {
            let verdict = match (r.check, r.pass) {
                (Check::Info, _) => "info",
                (_, true) => "ok",
                (_, false) => "FAIL",
            };
            s.push_str(&format!("  [{verdict:>4}] {:<40} observed {:>13.6e}", r.name, r.observed));
            if let Some(p) = r.predicted {
                s.push_str(&format!("  predicted {p:>13.6e}"));
            }
            if let Some(t) = r.tolerance {
                s.push_str(&format!("  tol {t:.3e}"));
            }
            if !r.note.is_empty() {
                s.push_str(&format!("  ({})", r.note));
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_verdicts() {
        assert!(ComparisonRow::relative("a", 1.01, 1.0, 0.02).pass);
        assert!(!ComparisonRow::relative("a", 1.03, 1.0, 0.02).pass);
        assert!(ComparisonRow::angle("p", 0.005, 2.0 * PI, 0.01).pass);
        assert!(!ComparisonRow::angle("p", 0.5, 0.0, 0.01).pass);
        assert!(ComparisonRow::at_most("b", 0.05, 0.1).pass);
        assert!(!ComparisonRow::at_least("m", 0.98, 0.99).pass);
        assert!(ComparisonRow::below("tv", 1.0, 2.0).pass);
        assert!(!ComparisonRow::below("tv", 2.0, 2.0).pass);
        assert!(ComparisonRow::info("i", f64::NAN, None).pass);
        assert!(!ComparisonRow::relative("n", f64::NAN, 1.0, 1.0).pass);
    }

    #[test]
    fn report_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![ComparisonRow::relative("h", 1.0, 1.0, 0.02), ComparisonRow::info("x", 3.0, None).with_note("a, b")];
        let rep = ComparisonReport::new("t", "transmission", "abc", rows);
        rep.write(dir.path()).unwrap();
        let mut back = ComparisonReport::read(dir.path()).unwrap();
        assert_eq!(back, rep);
        assert!(back.recheck());
        back.rows[0].observed = 2.0;
        assert!(!back.recheck());
        let csv = std::fs::read_to_string(dir.path().join(REPORT_CSV)).unwrap();
        assert!(csv.contains("a; b"));
    }

    #[test]
    fn angle_wrapping() {
        assert!((wrap_angle(2.0 * PI + 0.1) - 0.1).abs() < 1e-15);
        assert!((wrap_angle(-0.1) + 0.1).abs() < 1e-15);
        assert_eq!(wrap_angle(PI), PI);
    }
}
