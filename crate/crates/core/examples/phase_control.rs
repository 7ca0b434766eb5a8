//! Relative phases of signals and controls decide how much of the input is
//! dark: two settings of the second control phase give very different
//! transmitted heights.

use dlambda::scenario::{run_scenario, ScenarioConfig, ScenarioKind};

fn main() -> dlambda::Result<()> {
    let cfg = ScenarioConfig::preset(ScenarioKind::PhaseControl);
    let report = run_scenario(&cfg, None)?;
    for row in report.rows.iter().filter(|r| r.name.contains("peak height") || r.name.contains("a/b")) {
        let pred = row.predicted.map(|p| format!("{p:.4e}")).unwrap_or_default();
        println!("{:<40} {:.4e}  predicted {pred}", row.name, row.observed);
    }
    println!("verdict: {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(())
}
