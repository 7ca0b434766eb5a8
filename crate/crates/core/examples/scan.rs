//! One-parameter scan: stronger control, faster light.

use dlambda::scenario::{scan, ScanPoint};
use serde_json::json;

fn main() -> dlambda::Result<()> {
    let base = json!({"scenario": {"kind": "transmission", "mode": "reduced"}});
    let values = [0.6e-9, 1.2e-9, 2.4e-9, 4.8e-9];
    let outcome = scan(&base, "controls.0.base_amplitude", &values, None)?;
    for (v, delay) in outcome.series("group delay") {
        println!("control 2 = {v:.2e} a.u.: group delay {delay:.4e} a.u.");
    }
    for (v, p) in outcome.values.iter().zip(&outcome.points) {
        if let ScanPoint::Failed(e) = p {
            // recorded, the other values still ran
            println!("control 2 = {v:.2e} a.u.: {e}");
        }
    }
    println!("all pass: {}", outcome.all_pass());
    Ok(())
}
