//! Configuration-driven scenarios, comparison reports and parameter scans.

pub mod config;
pub mod report;
pub mod runner;
pub mod scan;

pub use config::{
    ControlConfig, GridConfig, MediumConfig, OutputConfig, ScenarioBlock, ScenarioConfig, ScenarioKind, SchemeConfig,
    SusceptibilityConfig, Tolerances, OUTPUT_DIR_ENV,
};
pub use report::{Check, ComparisonReport, ComparisonRow};
pub use runner::{
    convergence_study, predict_scenario, run_scenario, stored_phase_line, susceptibility_scenario, Context,
};
pub use scan::{parse_values, scan, ScanOutcome, ScanPoint};
