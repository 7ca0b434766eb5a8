//! Command-line front end.
//!
//! Exit codes: 0 when every comparison passes, 1 when a comparison fails or a
//! run breaks down, 2 for configuration and usage errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::scenario::{
    parse_values, predict_scenario, run_scenario, scan, susceptibility_scenario, ComparisonReport, ScanPoint,
    ScenarioConfig, ScenarioKind,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dlambda", version, about = "Double-Λ pulse propagation, light storage and susceptibilities")]
struct Cli {
    /// Print only the verdict line.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the propagation solver and compare against the adiabatic predictions.
    Simulate {
        config: PathBuf,
        /// Output directory (overrides the config and the environment).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the analytic predictions without solving the propagation equations.
    Predict {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute susceptibility spectra and the transparency window.
    Susceptibility {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat a scenario over the values of one scalar parameter.
    Scan {
        config: PathBuf,
        /// JSON pointer or dotted path, e.g. controls.1.phase
        #[arg(long)]
        param: String,
        /// Comma-separated values; multiples of pi such as 7pi/6 are accepted.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a written report and print its verdict.
    Report { dir: PathBuf },
    /// Print the complete default configuration of a scenario kind.
    Preset { kind: String },
}

fn load_value(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid JSON in {}: {e}", path.display())))
}

fn out_dir(cfg: &ScenarioConfig, out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| cfg.output_dir())
}

fn verdict(report: &ComparisonReport, quiet: bool) -> i32 {
    if quiet {
        println!("{}: {}", report.scenario, if report.pass { "PASS" } else { "FAIL" });
    } else {
        print!("{}", report.summary());
    }
    if report.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            let dir = out_dir(&cfg, out);
            let report = run_scenario(&cfg, Some(&dir))?;
            Ok(verdict(&report, quiet))
        }
        Command::Predict { config, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            let dir = out_dir(&cfg, out);
            let report = predict_scenario(&cfg, Some(&dir))?;
            Ok(verdict(&report, quiet))
        }
        Command::Susceptibility { config, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            let dir = out_dir(&cfg, out);
            let report = susceptibility_scenario(&cfg, Some(&dir))?;
            report.write(&dir)?;
            Ok(verdict(&report, quiet))
        }
        Command::Scan { config, param, values, out } => {
            let base = load_value(&config)?;
            let values = parse_values(&values)?;
            let cfg = ScenarioConfig::from_value(&base)?;
            let dir = out_dir(&cfg, out);
            let outcome = scan(&base, &param, &values, Some(&dir))?;
            for (v, p) in outcome.values.iter().zip(&outcome.points) {
                match p {
                    ScanPoint::Done(r) if quiet => println!("{param} = {v:e}: {}", if r.pass { "PASS" } else { "FAIL" }),
                    ScanPoint::Done(r) => print!("{param} = {v:e}\n{}", r.summary()),
                    ScanPoint::Failed(e) => println!("{param} = {v:e}: ERROR {e}"),
                }
            }
            println!("scan: {}", if outcome.all_pass() { "PASS" } else { "FAIL" });
            Ok(if outcome.all_pass() { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Report { dir } => {
            let mut report = ComparisonReport::read(&dir)?;
            let stored = report.pass;
            report.recheck();
            if stored != report.pass {
                eprintln!("warning: stored verdict differs from the recomputed one");
            }
            Ok(verdict(&report, quiet))
        }
        Command::Preset { kind } => {
            let kind: ScenarioKind = kind.parse()?;
            println!("{}", serde_json::to_string_pretty(&ScenarioConfig::preset(kind).to_value())?);
            Ok(EXIT_PASS)
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_FAIL
            }
        }
    }
}
