//! Slow-light transmission of two pulses under constant controls, compared
//! with the adiabatic prediction. Artifacts go to `out/transmission` unless
//! DLAMBDA_OUTPUT_DIR is set.

use dlambda::scenario::{run_scenario, ScenarioConfig, ScenarioKind};

fn main() -> dlambda::Result<()> {
    let cfg = ScenarioConfig::preset(ScenarioKind::Transmission);
    let dir = cfg.output_dir();
    let report = run_scenario(&cfg, Some(&dir))?;
    print!("{}", report.summary());
    println!("artifacts in {}", dir.display());
    Ok(())
}
