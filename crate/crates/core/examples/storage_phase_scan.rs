//! Light storage with both controls switched off: the phase of the stored
//! coherence follows π + φ₃/2 as the phase of signal 3 is scanned.

use dlambda::scenario::{run_scenario, ScenarioConfig, ScenarioKind};

fn main() -> dlambda::Result<()> {
    let cfg = ScenarioConfig::preset(ScenarioKind::StoragePhaseScan);
    let report = run_scenario(&cfg, None)?;
    for row in report.rows.iter().filter(|r| r.name.starts_with("arg")) {
        println!("{:<40} {:+.5}  line {:+.5}", row.name, row.observed, row.predicted.unwrap_or(f64::NAN));
    }
    println!("verdict: {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(())
}
