//! A rectangular pulse in a single Λ system: total variation and bright
//! polariton content at several depths, with and without relaxation.

use dlambda::scenario::{run_scenario, ScenarioConfig, ScenarioKind};
use dlambda::solver::Mode;

fn main() -> dlambda::Result<()> {
    for mode in [Mode::Full, Mode::Reduced] {
        let mut cfg = ScenarioConfig::preset(ScenarioKind::Smoothing);
        cfg.scenario.mode = mode;
        let report = run_scenario(&cfg, None)?;
        println!("mode {mode:?}");
        for row in &report.rows {
            println!("  {:<50} {:.4e}", row.name, row.observed);
        }
    }
    Ok(())
}
