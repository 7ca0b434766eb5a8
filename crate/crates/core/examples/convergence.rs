//! Observed order of accuracy of the propagation solver on nested grids,
//! with a Richardson estimate of the transmitted energy.

use dlambda::scenario::{convergence_study, ScenarioConfig, ScenarioKind};

fn main() -> dlambda::Result<()> {
    let mut cfg = ScenarioConfig::preset(ScenarioKind::Transmission);
    cfg.grid.nz = 101;
    cfg.grid.nt = 2001;
    let r = convergence_study(&cfg, &[1, 2, 4, 8])?;
    for (g, e) in r.grids.iter().zip(&r.transmitted_norms) {
        println!("{:>5} x {:<6} transmitted {e:.10e}", g.nz, g.nt);
    }
    println!("differences {:?}", r.differences);
    println!("orders {:.3?}, observed {:.3}", r.orders, r.observed_order);
    println!("extrapolated {:.10e}", r.extrapolated_norm);
    Ok(())
}
