//! Runs a configured scenario: solver, matching analytics, CSV output and report.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ScenarioConfig, ScenarioKind};
use super::report::{wrap_angle, ComparisonReport, ComparisonRow};
use crate::error::{Error, Result};
use crate::model::{Detunings, DoubleLambda, Signal};
use crate::polariton::{to_polaritons, PredictionTable, Predictor};
use crate::pulse::ControlSchedule;
use crate::solver::{
    convergence_report, simulate_full, simulate_reduced, ConvergenceReport, FieldHistory, Grid, Mode, Recording,
    SliceRecord,
};
use crate::susceptibility::{
    absorption_ratio, adiabatic_field_ratio, chi_adiabatic, chi_bare, chi_matrix, default_omega_grid,
    transparency_window,
};

type C64 = Complex64;

/// A validated configuration with its derived system and grid.
#[derive(Clone, Debug)]
pub struct Context {
    pub cfg: ScenarioConfig,
    pub system: DoubleLambda,
    pub grid: Grid,
    pub schedules: [ControlSchedule; 2],
    pub hash: String,
}

impl Context {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let system = cfg.system()?;
        let grid = cfg.grid(&system)?;
        Ok(Context { cfg: cfg.clone(), system, grid, schedules: cfg.schedules(), hash: cfg.hash() })
    }

    /// Metadata lines written at the top of every CSV.
    pub fn header(&self) -> Vec<String> {
        let mode = match self.cfg.scenario.mode {
            Mode::Reduced => "reduced",
            Mode::Full => "full",
        };
        vec![
            format!("scenario = {}", self.cfg.scenario.name),
            format!("kind = {}", self.cfg.scenario.kind.name()),
            format!("config_hash = {}", self.hash),
            format!(
                "grid = nz {} nt {} length {:e} t_max {:e}",
                self.grid.nz, self.grid.nt, self.grid.length, self.grid.t_max
            ),
            format!("mode = {mode}"),
        ]
    }

    pub fn predictor(&self) -> Predictor {
        Predictor::new(&self.system, &self.schedules, &self.cfg.signals)
    }

    pub fn recording(&self) -> Recording {
        Recording::Depths(self.cfg.depths())
    }

    /// Runs the solver in the configured mode on an explicit grid.
    pub fn simulate_on(&self, grid: &Grid) -> Result<FieldHistory> {
        let (c, s) = (&self.schedules, &self.cfg.signals);
        match self.cfg.scenario.mode {
            Mode::Reduced => simulate_reduced(&self.system, c, s, grid, &self.recording()),
            Mode::Full => simulate_full(&self.system, &self.cfg.detunings(&self.system), c, s, grid, &self.recording()),
        }
    }

    pub fn simulate(&self) -> Result<FieldHistory> {
        self.simulate_on(&self.grid)
    }
}

/// Where a run writes its files; `None` keeps everything in memory.
#[derive(Clone, Debug)]
pub struct Sink {
    dir: Option<PathBuf>,
    header: Vec<String>,
}

impl Sink {
    pub fn new(dir: Option<&Path>, header: Vec<String>) -> Result<Self> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(Sink { dir: dir.map(Path::to_path_buf), header })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn sub(&self, name: &str, header: Vec<String>) -> Result<Sink> {
        Sink::new(self.dir.as_ref().map(|d| d.join(name)).as_deref(), header)
    }

    /// Writes a numeric table; does nothing without a directory.
    pub fn table<I>(&self, name: &str, columns: &str, rows: I) -> Result<()>
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        let Some(dir) = &self.dir else { return Ok(()) };
        let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join(name))?);
        for line in &self.header {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{columns}")?;
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    fn history(&self, ctx: &Context, h: &FieldHistory) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        if ctx.cfg.output.history {
            for s in &h.slices {
                s.write_csv(&dir.join(format!("history_{:05}.csv", s.iz)), &h.t_prime, &self.header)?;
            }
        }
        let f = &h.final_profile;
        self.table(
            "final_profile.csv",
            "z,re_r1,im_r1,re_r3,im_r3,re_sigma_bc,im_sigma_bc",
            (0..f.z.len()).map(|i| {
                vec![f.z[i], f.r1[i].re, f.r1[i].im, f.r3[i].re, f.r3[i].im, f.sigma_bc[i].re, f.sigma_bc[i].im]
            }),
        )
    }

    fn prediction(&self, table: &PredictionTable, name: &str) -> Result<()> {
        match &self.dir {
            Some(dir) => table.write_csv(&dir.join(name), &self.header),
            None => Ok(()),
        }
    }
}

/// Position and height of the maximum of samples on a uniform axis, refined
/// by a parabola through the three highest points.
pub fn refine_peak(values: &[f64], x0: f64, dx: f64) -> (f64, f64) {
    let (i, &m) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty samples");
    if i == 0 || i + 1 == values.len() {
        return (x0 + i as f64 * dx, m);
    }
    let (a, b, c) = (values[i - 1], m, values[i + 1]);
    let den = a - 2.0 * b + c;
    if den >= 0.0 {
        return (x0 + i as f64 * dx, m);
    }
    let s = 0.5 * (a - c) / den;
    (x0 + (i as f64 + s) * dx, b - 0.25 * (a - c) * s)
}

/// Full width at half maximum by linear interpolation of the outermost crossings.
pub fn fwhm(values: &[f64], dx: f64) -> f64 {
    let m = values.iter().cloned().fold(0.0, f64::max);
    let half = 0.5 * m;
    let (Some(lo), Some(hi)) = (values.iter().position(|&v| v >= half), values.iter().rposition(|&v| v >= half)) else {
        return 0.0;
    };
    let left = if lo == 0 { 0.0 } else { (lo - 1) as f64 + (half - values[lo - 1]) / (values[lo] - values[lo - 1]) };
    let right = if hi + 1 == values.len() {
        hi as f64
    } else {
        hi as f64 + (values[hi] - half) / (values[hi] - values[hi + 1])
    };
    (right - left) * dx
}

pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// 10–90 % rise time of the first edge.
pub fn rise_time(values: &[f64], dt: f64) -> f64 {
    let m = values.iter().cloned().fold(0.0, f64::max);
    let cross = |level: f64| {
        values.iter().position(|&v| v >= level).map(|i| {
            if i == 0 {
                0.0
            } else {
                (i - 1) as f64 + (level - values[i - 1]) / (values[i] - values[i - 1])
            }
        })
    };
    match (cross(0.1 * m), cross(0.9 * m)) {
        (Some(a), Some(b)) => (b - a) * dt,
        _ => f64::NAN,
    }
}

fn norms(v: &[C64]) -> Vec<f64> {
    v.iter().map(|x| x.norm()).collect()
}

fn fmt_angle(x: f64) -> String {
    format!("{x:.4}")
}

const RELAXATION_NOTE: &str = "relaxation losses lie outside the adiabatic theory";

fn relaxation_free(d: &Detunings) -> bool {
    d.delta1.im == 0.0 && d.delta3.im == 0.0 && d.delta.im == 0.0
}

/// Comparison of the transmitted signals at the exit with the adiabatic prediction.
fn transmission_rows(ctx: &Context, h: &FieldHistory, prefix: &str) -> Result<(Vec<ComparisonRow>, PredictionTable)> {
    let tol = &ctx.cfg.scenario.tolerances;
    let p = ctx.predictor();
    let exit = h.exit();
    let table = p.table(exit.z, &h.t_prime)?;
    let (dt, t0) = (h.grid.dt(), h.t_prime[0]);
    let mut rows = Vec::new();
    let inputs = &ctx.cfg.signals;
    for (j, (label, obs, pred)) in [
        ("R1", &exit.r1, table.points.iter().map(|q| q.r1).collect::<Vec<_>>()),
        ("R3", &exit.r3, table.points.iter().map(|q| q.r3).collect::<Vec<_>>()),
    ]
    .into_iter()
    .enumerate()
    {
        let pm = norms(&pred);
        let (tp, hp) = refine_peak(&pm, t0, dt);
        if hp == 0.0 {
            continue;
        }
        let om = norms(obs);
        let (to, ho) = refine_peak(&om, t0, dt);
        let io = ((to - t0) / dt).round().clamp(0.0, (om.len() - 1) as f64) as usize;
        let ip = ((tp - t0) / dt).round().clamp(0.0, (pm.len() - 1) as f64) as usize;
        rows.push(ComparisonRow::relative(&format!("{prefix}{label} peak height"), ho, hp, tol.peak_height_rel));
        rows.push(ComparisonRow::angle(&format!("{prefix}{label} phase at peak"), obs[io].arg(), pred[ip].arg(), tol.phase_rad));
        let src = if inputs[j].amplitude > 0.0 { j } else { 1 - j };
        let t_in = inputs[src].peak_time();
        rows.push(ComparisonRow::info(&format!("{prefix}{label} peak shift"), to - t_in, Some(tp - t_in)));
    }
    let e_in = h.entrance().energy(dt);
    let centroid = |r1: &[C64], r3: &[C64]| {
        let w: Vec<f64> = r1.iter().zip(r3).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
        let m: f64 = w.iter().sum();
        w.iter().zip(&h.t_prime).map(|(w, t)| w * t).sum::<f64>() / m
    };
    let lossy = h.mode == Mode::Full && !relaxation_free(&ctx.cfg.detunings(&ctx.system));
    if e_in > 0.0 {
        let c_in = centroid(&h.entrance().r1, &h.entrance().r3);
        let c_out = centroid(&exit.r1, &exit.r3);
        let (p1, p3): (Vec<C64>, Vec<C64>) = table.points.iter().map(|q| (q.r1, q.r3)).unzip();
        let c_pred = centroid(&p1, &p3);
        let e_pred: Vec<f64> = table.points.iter().map(|q| q.r1.norm_sqr() + q.r3.norm_sqr()).collect();
        let e_pred = crate::solver::history::trapezoid(&e_pred, dt);
        let name = format!("{prefix}group delay");
        rows.push(if lossy {
            ComparisonRow::info(&name, c_out - c_in, Some(c_pred - c_in)).with_note(RELAXATION_NOTE)
        } else if e_pred >= 0.5 * e_in {
            ComparisonRow::relative(&name, c_out - c_in, c_pred - c_in, tol.delay_rel)
                .with_note("shift of the energy centroid of both signals")
        } else {
            ComparisonRow::info(&name, c_out - c_in, Some(c_pred - c_in)).with_note("mostly bright input: centroid not set by the dark polariton")
        });
        let e_out = exit.energy(dt);
        let deficit_pred = 1.0 - e_pred / e_in;
        if lossy {
            rows.push(
                ComparisonRow::info(&format!("{prefix}energy deficit"), 1.0 - e_out / e_in, Some(deficit_pred))
                    .with_note(RELAXATION_NOTE),
            );
        } else if deficit_pred < 1e-3 {
            rows.push(
                ComparisonRow::at_least(&format!("{prefix}transmitted energy fraction"), e_out / e_in, tol.matched_fraction)
                    .with_note("inputs in the dark-state proportion"),
            );
        } else {
            rows.push(
                ComparisonRow::relative(&format!("{prefix}energy deficit"), 1.0 - e_out / e_in, deficit_pred, tol.deficit_rel)
                    .with_note("predicted deficit is the bright X projection"),
            );
        }
    }
    Ok((rows, table))
}

fn run_transmission(ctx: &Context, sink: &Sink, prefix: &str) -> Result<(Vec<ComparisonRow>, FieldHistory)> {
    let h = ctx.simulate()?;
    sink.history(ctx, &h)?;
    let (rows, table) = transmission_rows(ctx, &h, prefix)?;
    sink.prediction(&table, "prediction.csv")?;
    Ok((rows, h))
}

fn run_phase_control(ctx: &Context, sink: &Sink) -> Result<Vec<ComparisonRow>> {
    let phases = &ctx.cfg.scenario.control4_phases;
    let cases: Vec<Result<(Vec<ComparisonRow>, FieldHistory, Vec<f64>)>> = phases
        .par_iter()
        .enumerate()
        .map(|(i, &phi4)| {
            let mut cfg = ctx.cfg.clone();
            cfg.controls[1].phase = phi4;
            let case = Context::new(&cfg)?;
            let letter = (b'a' + (i as u8 % 26)) as char;
            let sub = sink.sub(&format!("case_{letter}"), case.header())?;
            let (rows, h) = run_transmission(&case, &sub, &format!("case {letter} (phi4 = {}) ", fmt_angle(phi4)))?;
            let table = case.predictor().table(h.exit().z, &h.t_prime)?;
            let pred = vec![
                table.points.iter().map(|q| q.r1.norm()).fold(0.0, f64::max),
                table.points.iter().map(|q| q.r3.norm()).fold(0.0, f64::max),
            ];
            Ok((rows, h, pred))
        })
        .collect();
    let mut rows = Vec::new();
    let mut heights = Vec::new();
    for c in cases {
        let (r, h, pred) = c?;
        let exit = h.exit();
        let obs = [norms(&exit.r1), norms(&exit.r3)].map(|v| v.iter().cloned().fold(0.0, f64::max));
        heights.push((obs, pred));
        rows.extend(r);
    }
    if heights.len() >= 2 {
        let tol = ctx.cfg.scenario.tolerances.peak_height_rel;
        for (j, label) in ["R1", "R3"].iter().enumerate() {
            let (a, b) = (&heights[0], &heights[1]);
            if b.0[j] > 0.0 && b.1[j] > 0.0 {
                let (ro, rp) = (a.0[j] / b.0[j], a.1[j] / b.1[j]);
                rows.push(ComparisonRow::relative(&format!("{label} height ratio a/b"), ro, rp, 2.0 * tol));
                let dir = if rp > 1.0 { ComparisonRow::above(&format!("{label} a/b ordering"), ro, 1.0) } else { ComparisonRow::below(&format!("{label} a/b ordering"), ro, 1.0) };
                rows.push(dir.with_note("direction of the height swap between the cases"));
            }
        }
    }
    Ok(rows)
}

/// Principal-branch form of π + φ₃/2, the stored phase for equal inputs with relative phase φ₃.
pub fn stored_phase_line(phi3: f64) -> f64 {
    PI + wrap_angle(phi3) / 2.0
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhasePoint {
    pub phi3: f64,
    pub observed: C64,
    pub predicted: C64,
}

fn run_phase_scan(ctx: &Context, sink: &Sink) -> Result<Vec<ComparisonRow>> {
    let tol = ctx.cfg.scenario.tolerances;
    let points: Vec<Result<PhasePoint>> = ctx
        .cfg
        .scenario
        .phase_scan
        .par_iter()
        .enumerate()
        .map(|(i, &phi3)| {
            let mut cfg = ctx.cfg.clone();
            cfg.signals[1].phase = phi3;
            let run = Context::new(&cfg)?;
            let h = run.simulate()?;
            if cfg.output.history {
                sink.sub(&format!("phase_{i:02}"), run.header())?.history(&run, &h)?;
            }
            let f = &h.final_profile;
            let last = f.z.len() - 1;
            let predicted = run.predictor().predict(f.z[last], h.grid.t_max)?.sigma_bc;
            Ok(PhasePoint { phi3, observed: f.sigma_bc[last], predicted })
        })
        .collect();
    let points = points.into_iter().collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let scale = points.iter().map(|p| p.predicted.norm()).fold(0.0, f64::max);
    for p in &points {
        let name = format!("arg sigma_bc at exit, phi3 = {}", fmt_angle(p.phi3));
        if p.predicted.norm() <= 1e-6 * scale {
            rows.push(ComparisonRow::info(&name, p.observed.arg(), None).with_note("inputs cancel: nothing stored"));
            continue;
        }
        rows.push(
            ComparisonRow::angle(&name, p.observed.arg(), wrap_angle(stored_phase_line(p.phi3)), tol.storage_phase_rad)
                .with_note("line pi + phi3/2 on the principal branch"),
        );
        rows.push(ComparisonRow::info(&format!("|sigma_bc| at exit, phi3 = {}", fmt_angle(p.phi3)), p.observed.norm(), Some(p.predicted.norm())));
    }
    sink.table(
        "phase_scan.csv",
        "phi3,arg_observed,arg_line,arg_predicted,abs_observed,abs_predicted",
        points.iter().map(|p| {
            vec![p.phi3, p.observed.arg(), wrap_angle(stored_phase_line(p.phi3)), p.predicted.arg(), p.observed.norm(), p.predicted.norm()]
        }),
    )?;
    Ok(rows)
}

/// Stored-coherence profile after switch-off against the adiabatic prediction.
fn storage_rows(ctx: &Context, h: &FieldHistory, sink: &Sink) -> Result<Vec<ComparisonRow>> {
    let tol = ctx.cfg.scenario.tolerances;
    let p = ctx.predictor();
    let f = &h.final_profile;
    let dz = h.grid.dz();
    let t_end = h.grid.t_max;
    let which = if ctx.cfg.signals[0].amplitude > 0.0 { Signal::One } else { Signal::Three };
    let entry = ctx.cfg.signals[which.index()].peak_time();
    let z_pred = p.peak_position(which, t_end);
    let at_peak = p.predict(z_pred, t_end - z_pred / p.c)?;
    let a0 = p.angles_at(entry);
    let width_pred = 0.5 * p.c * ctx.cfg.signals[which.index()].duration * a0.cos2_theta();
    let profile = p.coherence_profile(&f.z, t_end)?;
    let mags = norms(&f.sigma_bc);
    let (z_obs, amp_obs) = refine_peak(&mags, 0.0, dz);
    let i_obs = (z_obs / dz).round().clamp(0.0, (mags.len() - 1) as f64) as usize;
    let width_obs = fwhm(&mags, dz);
    let pm = norms(&profile);
    let shape_err = {
        let num: f64 = mags.iter().zip(&pm).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = pm.iter().map(|b| b * b).sum();
        (num / den.max(f64::MIN_POSITIVE)).sqrt()
    };
    let rows = vec![
        ComparisonRow::absolute("stored peak position", z_obs, z_pred, tol.profile_position_cells * dz)
            .with_note(format!("tolerance {} cells of {dz:.4e}", tol.profile_position_cells)),
        ComparisonRow::relative("stored peak |sigma_bc|", amp_obs, at_peak.sigma_bc.norm(), tol.profile_amplitude_rel),
        ComparisonRow::relative("stored profile FWHM", width_obs, width_pred, tol.profile_width_rel)
            .with_note("sine-square of width c T cos^2(theta0), no fitted parameters"),
        ComparisonRow::angle("stored phase at peak", f.sigma_bc[i_obs].arg(), at_peak.sigma_bc.arg(), tol.phase_rad),
        ComparisonRow::info("stored profile relative L2 deviation", shape_err, None),
        ComparisonRow::info("compression factor cos^2(theta0)", a0.cos2_theta(), None),
    ];
    sink.table(
        "stored_profile.csv",
        "z,abs_observed,arg_observed,abs_predicted,arg_predicted",
        (0..f.z.len()).map(|i| vec![f.z[i], mags[i], f.sigma_bc[i].arg(), pm[i], profile[i].arg()]),
    )?;
    Ok(rows)
}

/// ‖Φ‖₂ over local time at one recorded depth.
fn bright_norm(ctx: &Context, s: &SliceRecord, t_prime: &[f64]) -> f64 {
    let p = ctx.predictor();
    let f: Vec<f64> = (0..t_prime.len())
        .map(|i| {
            let a = p.angles_at(t_prime[i] + s.z / p.c);
            to_polaritons(s.r1[i], s.r3[i], s.sigma_bc[i], &a).phi.norm_sqr()
        })
        .collect();
    let dt = if t_prime.len() > 1 { t_prime[1] - t_prime[0] } else { 0.0 };
    crate::solver::history::trapezoid(&f, dt).sqrt()
}

fn run_smoothing(ctx: &Context, sink: &Sink) -> Result<Vec<ComparisonRow>> {
    let h = ctx.simulate()?;
    sink.history(ctx, &h)?;
    let dt = h.grid.dt();
    let mut depths = ctx.cfg.depths();
    depths.sort_by(f64::total_cmp);
    depths.dedup();
    let stats: Vec<(f64, f64, f64, f64)> = depths
        .iter()
        .map(|&z| {
            let s = h.slice_near(z);
            let m = norms(&s.r1);
            (s.z, total_variation(&m), rise_time(&m, dt), bright_norm(ctx, s, &h.t_prime))
        })
        .collect();
    let mut rows = Vec::new();
    for &(z, tv, rise, _) in &stats {
        rows.push(ComparisonRow::info(&format!("TV |R1| at z = {z:.3e}"), tv, None));
        rows.push(ComparisonRow::info(&format!("rise time at z = {z:.3e}"), rise, None));
    }
    for w in stats.windows(2) {
        rows.push(
            ComparisonRow::below(&format!("TV decreases z = {:.3e} -> {:.3e}", w[0].0, w[1].0), w[1].1, w[0].1)
                .with_note("smoothing of the pulse edges"),
        );
    }
    if let (Some(first), Some(last)) = (stats.first(), stats.last()) {
        let frac = if first.3 > 0.0 { last.3 / first.3 } else { f64::NAN };
        rows.push(
            ComparisonRow::at_most("bright polariton L2 fraction at deepest record", frac, ctx.cfg.scenario.tolerances.bright_fraction)
                .with_note(format!("entry {:.4e}, deepest {:.4e}", first.3, last.3)),
        );
    }
    sink.table(
        "smoothing.csv",
        "z,total_variation,rise_time,bright_l2",
        stats.iter().map(|&(z, tv, rise, b)| vec![z, tv, rise, b]),
    )?;
    Ok(rows)
}

fn switched(ctx: &Context) -> bool {
    ctx.schedules.iter().any(|s| !s.is_constant())
}

/// Runs the configured scenario, writing artifacts into `out` when given.
pub fn run_scenario(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<ComparisonReport> {
    let wrap = |e: Error| Error::Scenario { scenario: cfg.scenario.name.clone(), source: Box::new(e) };
    let ctx = Context::new(cfg).map_err(wrap)?;
    let sink = Sink::new(out, ctx.header()).map_err(wrap)?;
    let rows = run_kind(&ctx, &sink).map_err(wrap)?;
    let report = ComparisonReport::new(&cfg.scenario.name, cfg.scenario.kind.name(), &ctx.hash, rows);
    if let Some(dir) = out {
        report.write(dir).map_err(wrap)?;
    }
    Ok(report)
}

fn run_kind(ctx: &Context, sink: &Sink) -> Result<Vec<ComparisonRow>> {
    match ctx.cfg.scenario.kind {
        ScenarioKind::Smoothing => run_smoothing(ctx, sink),
        ScenarioKind::Transmission => Ok(run_transmission(ctx, sink, "")?.0),
        ScenarioKind::PhaseControl => run_phase_control(ctx, sink),
        ScenarioKind::StoragePhaseScan => run_phase_scan(ctx, sink),
        ScenarioKind::StorageProfile => {
            let h = ctx.simulate()?;
            sink.history(ctx, &h)?;
            storage_rows(ctx, &h, sink)
        }
        ScenarioKind::Custom => {
            let h = ctx.simulate()?;
            sink.history(ctx, &h)?;
            if switched(ctx) {
                storage_rows(ctx, &h, sink)
            } else {
                let (rows, table) = transmission_rows(ctx, &h, "")?;
                sink.prediction(&table, "prediction.csv")?;
                Ok(rows)
            }
        }
    }
}

/// Analytic predictions only; never starts the propagation solver.
pub fn predict_scenario(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<ComparisonReport> {
    let wrap = |e: Error| Error::Scenario { scenario: cfg.scenario.name.clone(), source: Box::new(e) };
    let inner = || -> Result<Vec<ComparisonRow>> {
        let ctx = Context::new(cfg)?;
        let sink = Sink::new(out, ctx.header())?;
        let p = ctx.predictor();
        let grid = ctx.grid;
        let t_axis = grid.t_axis();
        let mut rows = Vec::new();
        let a0 = p.angles_at(cfg.signals[0].peak_time());
        rows.push(ComparisonRow::info("cos^2(theta) at signal-1 peak", a0.cos2_theta(), None));
        rows.push(ComparisonRow::info("group velocity at signal-1 peak", a0.group_velocity(p.c), None));
        if !switched(&ctx) && a0.cos2_theta() > 0.0 {
            rows.push(ComparisonRow::info("delay L/v - L/c", grid.length / a0.group_velocity(p.c) - grid.length / p.c, None));
        }
        let mut depths = cfg.depths();
        depths.push(grid.length);
        depths.sort_by(f64::total_cmp);
        depths.dedup();
        for &z in &depths {
            let iz = grid.nearest_z(z);
            let table = p.table(grid.z(iz), &t_axis)?;
            let name = if iz + 1 == grid.nz { "prediction.csv".to_string() } else { format!("prediction_{iz:05}.csv") };
            sink.prediction(&table, &name)?;
            if iz + 1 == grid.nz {
                let m1 = table.points.iter().map(|q| q.r1.norm()).fold(0.0, f64::max);
                let m3 = table.points.iter().map(|q| q.r3.norm()).fold(0.0, f64::max);
                rows.push(ComparisonRow::info("predicted R1 peak height at exit", m1, None));
                rows.push(ComparisonRow::info("predicted R3 peak height at exit", m3, None));
            }
        }
        if switched(&ctx) {
            let z = grid.z_axis();
            let prof = p.coherence_profile(&z, grid.t_max)?;
            sink.table(
                "stored_profile_prediction.csv",
                "z,abs_sigma_bc,arg_sigma_bc",
                z.iter().zip(&prof).map(|(z, s)| vec![*z, s.norm(), s.arg()]),
            )?;
            let zp = p.peak_position(Signal::One, grid.t_max);
            rows.push(ComparisonRow::info("predicted stored peak position", zp, None));
            rows.push(ComparisonRow::info("predicted stored FWHM", 0.5 * p.c * cfg.signals[0].duration * a0.cos2_theta(), None));
        }
        if cfg.scenario.kind == ScenarioKind::StoragePhaseScan {
            let rows_line: Vec<Vec<f64>> = cfg
                .scenario
                .phase_scan
                .iter()
                .map(|&phi3| {
                    let mut c = cfg.clone();
                    c.signals[1].phase = phi3;
                    let s = Predictor::new(&ctx.system, &ctx.schedules, &c.signals).predict(grid.length, grid.t_max)?.sigma_bc;
                    Ok(vec![phi3, wrap_angle(stored_phase_line(phi3)), s.arg(), s.norm()])
                })
                .collect::<Result<_>>()?;
            sink.table("phase_line.csv", "phi3,arg_line,arg_predicted,abs_predicted", rows_line)?;
        }
        Ok(rows)
    };
    let rows = inner().map_err(wrap)?;
    Ok(ComparisonReport::new(&cfg.scenario.name, cfg.scenario.kind.name(), &cfg.hash(), rows))
}

/// Susceptibility spectra for the configured controls (peak amplitudes) and detunings.
pub fn susceptibility_scenario(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<ComparisonReport> {
    let wrap = |e: Error| Error::Scenario { scenario: cfg.scenario.name.clone(), source: Box::new(e) };
    let inner = || -> Result<Vec<ComparisonRow>> {
        cfg.validate()?;
        let system = cfg.system()?;
        let sink = Sink::new(out, vec![format!("config_hash = {}", cfg.hash()), "quantity = linear susceptibility".into()])?;
        let sch = cfg.schedules();
        let o2 = system.rabi_factor(Signal::One) * C64::from_polar(sch[0].base_amplitude, sch[0].phase);
        let o4 = system.rabi_factor(Signal::Three) * C64::from_polar(sch[1].base_amplitude, sch[1].phase);
        let o_eff = (o2.norm_sqr() + o4.norm_sqr()).sqrt();
        let grid = cfg.susceptibility.omega_grid.clone().unwrap_or_else(|| default_omega_grid(o_eff));
        let det = cfg.detunings(&system);
        let m = chi_matrix(&grid, &det, o2, o4, &system, cfg.susceptibility.strict)?;
        if let Some(dir) = sink.dir() {
            m.write_csv(&dir.join("susceptibility.csv"), &sink.header)?;
        }
        let mut rows = vec![ComparisonRow::info("effective Rabi frequency", o_eff, None)];
        rows.push(ComparisonRow::info("flagged pole points", m.flagged.iter().filter(|f| **f).count() as f64, None));
        let bare = chi_bare(&grid, det.delta1, &system);
        if o2.norm() > 0.0 {
            let ratio = adiabatic_field_ratio(&system, o2, o4)?;
            let comb = m.combined(ratio);
            let adia = chi_adiabatic(&grid, o2, o4, &system)?;
            let absorb = absorption_ratio(&grid, &comb, det.delta1, &system);
            let win = transparency_window(&grid, &absorb, cfg.susceptibility.threshold)?;
            rows.push(
                ComparisonRow::info("transparency window half-width", win.half_width, None)
                    .with_note(if win.exceeds_grid { "wider than the grid" } else { "" }),
            );
            if det.is_zero() {
                // combination against the closed form, error relative to the size of the two terms
                let err = (0..grid.len())
                    .filter(|&i| !m.flagged[i] && adia[i].is_finite())
                    .map(|i| (comb[i] - adia[i]).norm() / (m.chi11[i].norm() + (m.chi13[i] * ratio).norm()))
                    .fold(0.0, f64::max);
                rows.push(ComparisonRow::at_most("adiabatic combination vs closed form", err, 1e-12).with_note("relative to |chi11| + |chi13 ratio|"));
                let at0 = chi_adiabatic(&[0.0], o2, o4, &system)?[0];
                rows.push(ComparisonRow::absolute("chi_adiabatic(0)", at0.norm(), 0.0, 0.0));
            }
            sink.table(
                "adiabatic.csv",
                "omega,re_combined,im_combined,re_adiabatic,im_adiabatic,re_bare,im_bare,absorption_ratio",
                (0..grid.len()).map(|i| {
                    vec![grid[i], comb[i].re, comb[i].im, adia[i].re, adia[i].im, bare[i].re, bare[i].im, absorb[i]]
                }),
            )?;
        }
        Ok(rows)
    };
    let rows = inner().map_err(wrap)?;
    let report = ComparisonReport::new(&cfg.scenario.name, "susceptibility", &cfg.hash(), rows);
    Ok(report)
}

/// Grid-refinement study of a scenario: the configured grid refined by each factor.
pub fn convergence_study(cfg: &ScenarioConfig, factors: &[usize]) -> Result<ConvergenceReport> {
    let ctx = Context::new(cfg)?;
    let grids: Vec<Grid> = factors.iter().map(|&r| ctx.grid.refined(r, r)).collect();
    convergence_report(&grids, |g| ctx.simulate_on(g))
}
