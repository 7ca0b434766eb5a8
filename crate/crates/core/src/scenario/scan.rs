//! One-parameter scans over a scenario configuration.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde_json::Value;

use super::config::{json_pointer, merged_value, ScenarioConfig};
use super::report::ComparisonReport;
use super::runner::run_scenario;
use crate::error::{Error, Result};

/// Outcome of one scanned value.
#[derive(Clone, Debug)]
pub enum ScanPoint {
    Done(ComparisonReport),
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct ScanOutcome {
    pub param: String,
    pub values: Vec<f64>,
    pub points: Vec<ScanPoint>,
}

impl ScanOutcome {
    pub fn all_pass(&self) -> bool {
        self.points.iter().all(|p| matches!(p, ScanPoint::Done(r) if r.pass))
    }

    pub fn reports(&self) -> impl Iterator<Item = (f64, &ComparisonReport)> {
        self.values.iter().zip(&self.points).filter_map(|(v, p)| match p {
            ScanPoint::Done(r) => Some((*v, r)),
            ScanPoint::Failed(_) => None,
        })
    }

    /// Observed value of a named row for every successful run.
    pub fn series(&self, row: &str) -> Vec<(f64, f64)> {
        self.reports().filter_map(|(v, r)| r.row(row).map(|x| (v, x.observed))).collect()
    }

    /// One line per value: status followed by the observed value of every row.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut names: Vec<String> = Vec::new();
        for (_, r) in self.reports() {
            for row in &r.rows {
                if !names.contains(&row.name) {
                    names.push(row.name.clone());
                }
            }
        }
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "# param = {}", self.param)?;
        let cols: Vec<String> = names.iter().map(|n| format!("\"{n}\"")).collect();
        writeln!(w, "index,value,status,error,{}", cols.join(","))?;
        for (i, (v, p)) in self.values.iter().zip(&self.points).enumerate() {
            match p {
                ScanPoint::Done(r) => {
                    let cells: Vec<String> = names
                        .iter()
                        .map(|n| r.row(n).map(|x| format!("{:e}", x.observed)).unwrap_or_default())
                        .collect();
                    let status = if r.pass { "pass" } else { "fail" };
                    writeln!(w, "{i},{v:e},{status},,{}", cells.join(","))?;
                }
                ScanPoint::Failed(e) => {
                    let blanks = vec![""; names.len()].join(",");
                    writeln!(w, "{i},{v:e},error,\"{}\",{blanks}", e.replace('"', "'"))?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Parses a number or a multiple of π such as `pi`, `-pi/2`, `7pi/6`, `0.5*pi`.
pub fn parse_value(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let bad = || Error::Usage(format!("cannot parse scan value '{s}'"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().map_err(|_| bad())?),
        None => (t.clone(), 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?.trim_end_matches('*');
    let k = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(k * PI / den)
}

/// Comma-separated list of values.
pub fn parse_values(list: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = list.split(',').filter(|s| !s.trim().is_empty()).map(parse_value).collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(Error::Usage("scan needs at least one value".into()));
    }
    Ok(v)
}

fn set_number(slot: &mut Value, v: f64) -> Result<()> {
    *slot = if slot.is_u64() || slot.is_i64() {
        if v.fract() != 0.0 {
            return Err(Error::Config(format!("integer parameter cannot take {v}")));
        }
        Value::from(v as i64)
    } else {
        Value::from(v)
    };
    Ok(())
}

/// Runs the scenario once per value of the parameter at `param` (JSON pointer
/// or dotted path). Runs are independent and concurrent; a failed run is
/// recorded and the others continue.
pub fn scan(base: &Value, param: &str, values: &[f64], out: Option<&Path>) -> Result<ScanOutcome> {
    if values.is_empty() {
        return Err(Error::Usage("scan needs at least one value".into()));
    }
    let merged = merged_value(base)?;
    let pointer = json_pointer(param);
    match merged.pointer(&pointer) {
        Some(v) if v.is_number() || v.is_null() => {}
        Some(_) => return Err(Error::Usage(format!("scan parameter '{param}' is not a scalar"))),
        None => return Err(Error::Usage(format!("scan parameter '{param}' does not exist in the configuration"))),
    }
    let points: Vec<ScanPoint> = values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let run = || -> Result<ComparisonReport> {
                let mut doc = merged.clone();
                set_number(doc.pointer_mut(&pointer).expect("pointer checked above"), v)?;
                let mut cfg = ScenarioConfig::from_value(&doc)?;
                cfg.scenario.name = format!("{}[{param}={v:e}]", cfg.scenario.name);
                let dir = out.map(|d| d.join(format!("run_{i:03}")));
                run_scenario(&cfg, dir.as_deref())
            };
            match run() {
                Ok(r) => ScanPoint::Done(r),
                Err(e) => ScanPoint::Failed(e.to_string()),
            }
        })
        .collect();
    let outcome = ScanOutcome { param: param.to_string(), values: values.to_vec(), points };
    if let Some(d) = out {
        std::fs::create_dir_all(d)?;
        outcome.write_csv(&d.join("scan.csv"))?;
    }
    Ok(outcome)
}
