//! Maxwell–Bloch propagation of the two signal fields through the medium.

pub mod convergence;
pub mod grid;
pub mod history;
pub mod march;
pub mod model;

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

pub use convergence::{convergence_report, ConvergenceReport};
pub use grid::Grid;
pub use history::{FieldHistory, FinalProfile, Mode, Recording, SliceRecord};
pub use march::{sweep, Marcher, SliceState};
pub use model::{AtomicModel, ControlPair, FullModel, ReducedModel};

use crate::error::Result;
use crate::model::{Detunings, DoubleLambda, Signal};
use crate::pulse::{ControlSchedule, PulseSpec};

static RUNS: AtomicUsize = AtomicUsize::new(0);

/// Number of propagation runs started in this process.
pub fn solver_invocations() -> usize {
    RUNS.load(Ordering::SeqCst)
}

/// Normalised input fields R₁(0, t'), R₃(0, t') on the grid's local-time axis.
pub fn injected_fields(system: &DoubleLambda, signals: &[PulseSpec; 2], grid: &Grid) -> Vec<[Complex64; 2]> {
    let f1 = system.signal_factor(Signal::One);
    let f3 = system.signal_factor(Signal::Three);
    (0..grid.nt)
        .map(|i| {
            let t = grid.t(i);
            [f1 * signals[0].value(t), f3 * signals[1].value(t)]
        })
        .collect()
}

/// Runs a model through the whole medium.
pub fn propagate<M: AtomicModel + ?Sized>(
    model: &M,
    mode: Mode,
    c: f64,
    input: Vec<[Complex64; 2]>,
    grid: &Grid,
    recording: &Recording,
) -> Result<FieldHistory> {
    grid.validate()?;
    grid.check_resolution(model.rabi_max())?;
    RUNS.fetch_add(1, Ordering::SeqCst);
    let keep = recording.selected(grid);
    let mut marcher = Marcher::new(model, *grid, c, input)?;
    let mut slices = Vec::new();
    let mut final_profile = FinalProfile::default();
    loop {
        let s = marcher.state();
        final_profile.push(model, s);
        if keep[s.iz] {
            slices.push(SliceRecord::capture(model, s));
        }
        if marcher.is_done() {
            break;
        }
        marcher.step()?;
    }
    Ok(FieldHistory { grid: *grid, mode, t_prime: grid.t_axis(), slices, final_profile })
}

fn validate_inputs(controls: &[ControlSchedule; 2], signals: &[PulseSpec; 2]) -> Result<()> {
    for c in controls {
        c.validate()?;
    }
    for s in signals {
        s.validate()?;
    }
    Ok(())
}

/// Resonant, relaxation-free propagation in the variables R, S, σ_bc.
pub fn simulate_reduced(
    system: &DoubleLambda,
    controls: &[ControlSchedule; 2],
    signals: &[PulseSpec; 2],
    grid: &Grid,
    recording: &Recording,
) -> Result<FieldHistory> {
    validate_inputs(controls, signals)?;
    let model = ReducedModel::new(system, controls);
    let input = injected_fields(system, signals, grid);
    propagate(&model, Mode::Reduced, system.constants.c, input, grid, recording)
}

/// Propagation with detunings and relaxation, integrating the coherences
/// σ_ba, σ_bd, σ_bc directly.
pub fn simulate_full(
    system: &DoubleLambda,
    detunings: &Detunings,
    controls: &[ControlSchedule; 2],
    signals: &[PulseSpec; 2],
    grid: &Grid,
    recording: &Recording,
) -> Result<FieldHistory> {
    validate_inputs(controls, signals)?;
    let model = FullModel::new(system, *detunings, controls);
    let input = injected_fields(system, signals, grid);
    propagate(&model, Mode::Full, system.constants.c, input, grid, recording)
}
