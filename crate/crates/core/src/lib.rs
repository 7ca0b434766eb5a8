//! Propagation of two weak signal pulses through a double-Λ atomic medium
//! under control fields: Maxwell–Bloch solver, dark-state polariton analysis,
//! linear susceptibilities and a scenario runner for the standard studies.
//!
//! All quantities are in Hartree atomic units unless stated otherwise.

pub mod cli;
pub mod error;
pub mod model;
pub mod polariton;
pub mod pulse;
pub mod scenario;
pub mod solver;
pub mod susceptibility;

pub use error::{Error, Result};
