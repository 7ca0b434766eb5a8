//! Spatial profile of the stored coherence in a long sample against the
//! compressed input shape, with no fitted parameters.

use dlambda::polariton::compression_factor;
use dlambda::scenario::{run_scenario, Context, ScenarioConfig, ScenarioKind};

fn main() -> dlambda::Result<()> {
    let cfg = ScenarioConfig::preset(ScenarioKind::StorageProfile);
    let ctx = Context::new(&cfg)?;
    let a0 = ctx.predictor().angles_at(cfg.signals[0].peak_time());
    println!("compression factor {:.4e}", compression_factor(&a0)?);
    let report = run_scenario(&cfg, None)?;
    print!("{}", report.summary());
    Ok(())
}
