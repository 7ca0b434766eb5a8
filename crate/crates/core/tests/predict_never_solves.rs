//! `predict` works from the analytic formulas alone. Kept in its own test
//! binary so that no other test touches the process-wide run counter.

use dlambda::scenario::{predict_scenario, run_scenario, ScenarioConfig, ScenarioKind};
use dlambda::solver::solver_invocations;

#[test]
fn predict_does_not_start_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    let before = solver_invocations();
    for kind in ScenarioKind::ALL {
        let cfg = ScenarioConfig::preset(kind);
        let report = predict_scenario(&cfg, Some(&dir.path().join(kind.name()))).unwrap();
        assert!(!report.rows.is_empty(), "{kind:?}");
    }
    assert_eq!(solver_invocations(), before);

    // the counter does see real runs
    let mut cfg = ScenarioConfig::preset(ScenarioKind::Custom);
    cfg.grid.nz = 21;
    cfg.grid.nt = 1601;
    cfg.scenario.record_depths.clear();
    run_scenario(&cfg, None).unwrap();
    assert_eq!(solver_invocations(), before + 1);
}
