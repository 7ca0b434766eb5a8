//! JSON scenario configuration, presets and the derived physical system.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{Detunings, DoubleLambda, LevelScheme, PhysicalConstants, Signal, WidthSplit, RESONANCE_TOLERANCE};
use crate::pulse::{ControlSchedule, PulseShape, PulseSpec};
use crate::solver::{ControlPair, Grid, Mode};

/// Environment variable that overrides `output.dir`.
pub const OUTPUT_DIR_ENV: &str = "DLAMBDA_OUTPUT_DIR";

pub const DEFAULT_NZ: usize = 400;
pub const DEFAULT_NT: usize = 4000;
pub const PULSE_DURATION: f64 = 1e11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Rectangular pulse in a single Λ system; edge smoothing with depth.
    Smoothing,
    /// Two smooth pulses under constant controls; transmitted heights and phases.
    Transmission,
    /// Transmission repeated for several phases of control 4.
    PhaseControl,
    /// Storage by switch-off, scanned over the phase of signal 3.
    StoragePhaseScan,
    /// Spatial profile of the stored coherence in a long sample.
    StorageProfile,
    /// Any configuration; compares against the adiabatic predictions that apply.
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::Smoothing,
        ScenarioKind::Transmission,
        ScenarioKind::PhaseControl,
        ScenarioKind::StoragePhaseScan,
        ScenarioKind::StorageProfile,
        ScenarioKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Smoothing => "smoothing",
            ScenarioKind::Transmission => "transmission",
            ScenarioKind::PhaseControl => "phase-control",
            ScenarioKind::StoragePhaseScan => "storage-phase-scan",
            ScenarioKind::StorageProfile => "storage-profile",
            ScenarioKind::Custom => "custom",
        }
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown scenario kind '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    /// Level energies [E_a, E_b, E_c, E_d].
    pub energies: [f64; 4],
    /// Spontaneous width of each upper level.
    pub upper_width: f64,
    pub width_split: WidthSplit,
    pub gamma_bc: f64,
    /// Phases of the dipoles ab, ac, db, dc.
    pub dipole_phases: [f64; 4],
    /// Carrier frequencies of fields 1..4; `null` tunes every carrier to its transition.
    pub carriers: Option<[f64; 4]>,
    pub resonance_tolerance: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            energies: [-0.10, -0.20, -0.18, -0.05],
            upper_width: 2.4e-9,
            width_split: WidthSplit::Equal,
            gamma_bc: 0.0,
            dipole_phases: [0.0; 4],
            carriers: None,
            resonance_tolerance: RESONANCE_TOLERANCE,
        }
    }
}

impl SchemeConfig {
    pub fn build(&self, k: &PhysicalConstants) -> Result<LevelScheme> {
        let mut s = LevelScheme::from_widths(
            self.energies,
            self.upper_width,
            self.width_split,
            self.gamma_bc,
            self.dipole_phases,
            k,
        )?;
        if let Some(c) = self.carriers {
            s.carriers = c;
            s.validate(self.resonance_tolerance)?;
        }
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub density: f64,
    pub length: f64,
}

impl Default for MediumConfig {
    fn default() -> Self {
        MediumConfig { density: 3e-13, length: 1e7 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlConfig {
    pub base_amplitude: f64,
    pub phase: f64,
    pub off_time: Option<f64>,
    pub on_time: Option<f64>,
    /// `null` → signal-1 duration / 20.
    pub ramp_width: Option<f64>,
}

impl ControlConfig {
    pub fn constant(base_amplitude: f64) -> Self {
        ControlConfig { base_amplitude, phase: 0.0, off_time: None, on_time: None, ramp_width: None }
    }

    pub fn switched_off(base_amplitude: f64, off_time: f64) -> Self {
        ControlConfig { off_time: Some(off_time), ..Self::constant(base_amplitude) }
    }

    pub fn schedule(&self, default_ramp: f64) -> ControlSchedule {
        ControlSchedule {
            base_amplitude: self.base_amplitude,
            phase: self.phase,
            off_time: self.off_time,
            on_time: self.on_time,
            ramp_width: self.ramp_width.unwrap_or(default_ramp),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nz: usize,
    pub nt: usize,
    /// `null` → 3 × signal duration + transit time of the medium.
    pub t_max: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { nz: DEFAULT_NZ, nt: DEFAULT_NT, t_max: None }
    }
}

/// Acceptance tolerances applied to the comparison rows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub peak_height_rel: f64,
    pub phase_rad: f64,
    pub delay_rel: f64,
    pub storage_phase_rad: f64,
    pub profile_amplitude_rel: f64,
    pub profile_width_rel: f64,
    pub profile_position_cells: f64,
    pub bright_fraction: f64,
    /// Minimum transmitted energy fraction when no loss is predicted.
    pub matched_fraction: f64,
    /// Relative tolerance on the energy deficit when a loss is predicted.
    pub deficit_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            peak_height_rel: 0.02,
            phase_rad: 1e-2,
            delay_rel: 0.02,
            storage_phase_rad: 1e-2,
            profile_amplitude_rel: 0.03,
            profile_width_rel: 0.05,
            profile_position_cells: 2.0,
            bright_fraction: 0.10,
            matched_fraction: 0.99,
            deficit_rel: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioBlock {
    pub kind: ScenarioKind,
    /// Label used in reports and error messages.
    pub name: String,
    pub mode: Mode,
    /// Overrides the detunings derived from the scheme (full mode only).
    pub detunings: Option<Detunings>,
    /// Depths whose full local-time record is written out.
    pub record_depths: Vec<f64>,
    /// Phases of signal 3 for the storage phase scan.
    pub phase_scan: Vec<f64>,
    /// Phases of control 4 for the phase-control cases.
    pub control4_phases: Vec<f64>,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SusceptibilityConfig {
    /// Explicit ω grid; `null` → the default 2001-point grid.
    pub omega_grid: Option<Vec<f64>>,
    /// Absorption ratio defining the transparency window.
    pub threshold: f64,
    pub strict: bool,
}

impl Default for SusceptibilityConfig {
    fn default() -> Self {
        SusceptibilityConfig { omega_grid: None, threshold: 0.5, strict: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    /// Write one CSV per recorded depth.
    pub history: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub constants: PhysicalConstants,
    pub scheme: SchemeConfig,
    pub medium: MediumConfig,
    pub signals: [PulseSpec; 2],
    pub controls: [ControlConfig; 2],
    pub grid: GridConfig,
    pub scenario: ScenarioBlock,
    pub susceptibility: SusceptibilityConfig,
    pub output: OutputConfig,
}

/// Phases of signal 3 used by the storage scan: 0, π/6, …, 2π without π
/// (equal inputs in antiphase store nothing).
pub fn default_phase_scan() -> Vec<f64> {
    (0..=12).filter(|&k| k != 6).map(|k| k as f64 * PI / 6.0).collect()
}

impl ScenarioConfig {
    /// Complete configuration for a scenario kind.
    pub fn preset(kind: ScenarioKind) -> Self {
        let t = PULSE_DURATION;
        let k = PhysicalConstants::atomic();
        let mut cfg = ScenarioConfig {
            constants: k,
            scheme: SchemeConfig::default(),
            medium: MediumConfig::default(),
            signals: [PulseSpec::sine_square(1e-10, t), PulseSpec::sine_square(0.6e-10, t)],
            controls: [ControlConfig::constant(1.2e-9), ControlConfig::constant(1.8e-9)],
            grid: GridConfig::default(),
            scenario: ScenarioBlock {
                kind,
                name: kind.name().to_string(),
                mode: Mode::Full,
                detunings: None,
                record_depths: Vec::new(),
                phase_scan: Vec::new(),
                control4_phases: Vec::new(),
                tolerances: Tolerances::default(),
            },
            susceptibility: SusceptibilityConfig::default(),
            output: OutputConfig { dir: format!("out/{}", kind.name()), history: true },
        };
        match kind {
            ScenarioKind::Smoothing => {
                cfg.medium.length = 3e7;
                cfg.signals = [PulseSpec::rectangular(1e-10, t).with_start(0.05 * t), PulseSpec::sine_square(0.0, t)];
                cfg.controls[1] = ControlConfig::constant(0.0);
                cfg.scenario.record_depths = vec![0.0, 3e6, 1.5e7, 3e7];
            }
            ScenarioKind::Transmission | ScenarioKind::Custom => {}
            ScenarioKind::PhaseControl => {
                cfg.controls[0].phase = PI / 2.0;
                cfg.signals[1].phase = 2.0 * PI / 3.0;
                cfg.scenario.control4_phases = vec![7.0 * PI / 6.0, PI / 6.0];
            }
            ScenarioKind::StoragePhaseScan => {
                // equal normalised controls and inputs
                let sys = reference_system(&k, &cfg.scheme, &cfg.medium);
                let e4 = 1.2e-9 * sys.control_factor(Signal::One).norm() / sys.control_factor(Signal::Three).norm();
                let e3 = 1e-10 * sys.signal_factor(Signal::One).norm() / sys.signal_factor(Signal::Three).norm();
                cfg.signals[1].amplitude = e3;
                cfg.controls = [ControlConfig::switched_off(1.2e-9, 0.5 * t), ControlConfig::switched_off(e4, 0.5 * t)];
                cfg.scenario.phase_scan = default_phase_scan();
                cfg.scenario.mode = Mode::Reduced;
            }
            ScenarioKind::StorageProfile => {
                cfg.medium.length = 3.5e8;
                cfg.controls = [ControlConfig::switched_off(1.2e-9, 1.3 * t), ControlConfig::switched_off(1.8e-9, 1.3 * t)];
                cfg.scenario.mode = Mode::Reduced;
            }
        }
        cfg
    }

    /// Recorded depths; an empty list means [0, L/2, L].
    pub fn depths(&self) -> Vec<f64> {
        if self.scenario.record_depths.is_empty() {
            let l = self.medium.length;
            vec![0.0, 0.5 * l, l]
        } else {
            self.scenario.record_depths.clone()
        }
    }

    /// Preset for `value["scenario"]["kind"]` with `value` merged over it.
    pub fn from_value(value: &Value) -> Result<Self> {
        let merged = merged_value(value)?;
        let cfg: ScenarioConfig = serde_json::from_value(merged).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        Self::from_value(&v)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config is always serialisable")
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config is always serialisable");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn system(&self) -> Result<DoubleLambda> {
        let scheme = self.scheme.build(&self.constants)?;
        DoubleLambda::new(self.constants, scheme, self.medium.density, self.medium.length)
    }

    pub fn default_ramp(&self) -> f64 {
        self.signals[0].duration / 20.0
    }

    pub fn schedules(&self) -> [ControlSchedule; 2] {
        let r = self.default_ramp();
        [self.controls[0].schedule(r), self.controls[1].schedule(r)]
    }

    pub fn detunings(&self, system: &DoubleLambda) -> Detunings {
        self.scenario.detunings.unwrap_or_else(|| system.detunings())
    }

    /// Time for the dark polariton to cross the medium at peak control
    /// strength; zero when the controls switch off for good (light is stored).
    pub fn transit_time(&self, system: &DoubleLambda) -> f64 {
        if self.controls.iter().any(|c| c.off_time.is_some() && c.on_time.is_none()) {
            return 0.0;
        }
        let pair = ControlPair::normalized(system, &self.schedules());
        let s: f64 = pair.peak().iter().map(|u| u * u).sum();
        let v = self.constants.c * s / (1.0 + s);
        if v > 0.0 {
            self.medium.length / v
        } else {
            self.medium.length / self.constants.c
        }
    }

    pub fn grid(&self, system: &DoubleLambda) -> Result<Grid> {
        let longest = self.signals.iter().map(|s| s.end_time()).fold(0.0, f64::max);
        let t_max = self.grid.t_max.unwrap_or(3.0 * longest + self.transit_time(system));
        Grid::new(self.grid.nz, self.grid.nt, self.medium.length, t_max)
    }

    /// Output directory, honouring the environment override.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var(OUTPUT_DIR_ENV) {
            Ok(d) if !d.is_empty() => PathBuf::from(d),
            _ => PathBuf::from(&self.output.dir),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        let system = self.system()?;
        for s in &self.signals {
            s.validate()?;
        }
        for c in &self.schedules() {
            c.validate()?;
        }
        if let Some(d) = self.scenario.detunings {
            Detunings::new(d.delta1, d.delta3, d.delta)?;
        }
        let grid = self.grid(&system)?;
        for z in self.depths() {
            if !(0.0..=self.medium.length).contains(&z) {
                return Err(Error::Config(format!("record depth {z:e} outside the medium [0, {:e}]", self.medium.length)));
            }
        }
        if self.scenario.kind == ScenarioKind::StoragePhaseScan && self.scenario.phase_scan.is_empty() {
            return Err(Error::Config("storage-phase-scan needs at least one phase in scenario.phase_scan".into()));
        }
        if self.scenario.kind == ScenarioKind::PhaseControl && self.scenario.control4_phases.is_empty() {
            return Err(Error::Config("phase-control needs scenario.control4_phases".into()));
        }
        if let Some(g) = &self.susceptibility.omega_grid {
            if g.is_empty() || g.iter().any(|w| !w.is_finite()) {
                return Err(Error::Config("susceptibility.omega_grid must hold finite values".into()));
            }
        }
        let pair = ControlPair::rabi(&system, &self.schedules());
        let [o2, o4] = pair.peak();
        grid.check_resolution((o2 * o2 + o4 * o4).sqrt())?;
        Ok(())
    }
}

fn reference_system(k: &PhysicalConstants, scheme: &SchemeConfig, medium: &MediumConfig) -> DoubleLambda {
    let s = scheme.build(k).expect("default scheme is valid");
    DoubleLambda::new(*k, s, medium.density, medium.length).expect("default medium is valid")
}

/// Deep merge: objects merge key by key, arrays of objects merge by index,
/// everything else is replaced.
pub fn merge(base: &mut Value, over: &Value) {
    match (base, over) {
        (Value::Array(b), Value::Array(o)) if o.iter().all(Value::is_object) && b.iter().all(Value::is_object) && !o.is_empty() => {
            for (i, v) in o.iter().enumerate() {
                match b.get_mut(i) {
                    Some(slot) => merge(slot, v),
                    None => b.push(v.clone()),
                }
            }
        }
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}

/// The preset named by `scenario.kind` (default `custom`) with `value` merged over it.
pub fn merged_value(value: &Value) -> Result<Value> {
    if !value.is_object() {
        return Err(Error::Config("configuration must be a JSON object".into()));
    }
    let kind = match value.pointer("/scenario/kind") {
        None => ScenarioKind::Custom,
        Some(Value::String(s)) => s.parse().map_err(|_| Error::Config(format!("unknown scenario kind '{s}'")))?,
        Some(other) => return Err(Error::Config(format!("scenario.kind must be a string, got {other}"))),
    };
    let mut base = ScenarioConfig::preset(kind).to_value();
    merge(&mut base, value);
    Ok(base)
}

/// Converts `a.b.0.c` or `/a/b/0/c` into a JSON pointer.
pub fn json_pointer(path: &str) -> String {
    if path.starts_with('/') {
        path.to_string()
    } else {
        format!("/{}", path.replace('.', "/"))
    }
}

pub fn shape_name(s: PulseShape) -> &'static str {
    match s {
        PulseShape::SineSquare => "sine_square",
        PulseShape::Rectangular => "rectangular",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn presets_validate() {
        for kind in ScenarioKind::ALL {
            let cfg = ScenarioConfig::preset(kind);
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", kind.name()));
            let back = ScenarioConfig::from_value(&cfg.to_value()).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn partial_config_merges_over_preset() {
        let cfg = ScenarioConfig::from_value(&json!({
            "scenario": {"kind": "transmission"},
            "controls": [{"base_amplitude": 2e-9}],
            "grid": {"nz": 101}
        }))
        .unwrap();
        assert_eq!(cfg.controls[0].base_amplitude, 2e-9);
        assert_eq!(cfg.controls[1].base_amplitude, 1.8e-9);
        assert_eq!(cfg.grid.nz, 101);
        assert_eq!(cfg.grid.nt, DEFAULT_NT);
    }

    #[test]
    fn bad_configs_are_config_errors() {
        for v in [
            json!({"scenario": {"kind": "nope"}}),
            json!({"medium": {"length": -1.0}}),
            json!({"typo": 1}),
            json!({"grid": {"nt": 10}}),
            json!({"controls": [{"off_time": 2.0, "on_time": 1.0}]}),
            json!({"scenario": {"record_depths": [1e9]}}),
            json!([1, 2]),
        ] {
            let e = ScenarioConfig::from_value(&v).unwrap_err();
            assert!(e.is_config(), "{v}: {e}");
        }
    }

    #[test]
    fn default_time_window() {
        let cfg = ScenarioConfig::preset(ScenarioKind::Transmission);
        let sys = cfg.system().unwrap();
        let g = cfg.grid(&sys).unwrap();
        let transit = cfg.transit_time(&sys);
        assert!((transit - 4.5e9).abs() < 0.1e9);
        assert_eq!(g.t_max, 3e11 + transit);
    }

    #[test]
    fn storage_scan_preset_is_balanced() {
        let cfg = ScenarioConfig::preset(ScenarioKind::StoragePhaseScan);
        let sys = cfg.system().unwrap();
        let pair = ControlPair::normalized(&sys, &cfg.schedules());
        let [u2, u4] = pair.peak();
        assert!((u2 / u4 - 1.0).abs() < 1e-14);
        let r1 = sys.signal_factor(Signal::One).norm() * cfg.signals[0].amplitude;
        let r3 = sys.signal_factor(Signal::Three).norm() * cfg.signals[1].amplitude;
        assert!((r1 / r3 - 1.0).abs() < 1e-14);
        assert_eq!(cfg.scenario.phase_scan.len(), 12);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ScenarioConfig::preset(ScenarioKind::Transmission);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.grid.nz += 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn pointer_syntax() {
        assert_eq!(json_pointer("controls.1.phase"), "/controls/1/phase");
        assert_eq!(json_pointer("/grid/nz"), "/grid/nz");
    }
}
