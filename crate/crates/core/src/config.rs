//! Experiment configuration: a JSON object with dotted keys, presets and
//! validation.
//!
//! Keys may be given flat (`"solver.tol": 1e-10`) or nested
//! (`"solver": {"tol": 1e-10}`); both forms flatten to the same dotted paths.
//! Unknown keys are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::angle::parse_angle;
use crate::error::{Error, Result};
use crate::lattice::{Dimension, LatticeSpec};
use crate::oracle::DENSE_LIMIT;
use crate::params::{check_g, WalkParams};
use crate::spectral::SolverOptions;

/// Eigenvalue quoted for the 1D preset at `L_x = 801`, `g = 0`.
pub const LINE_TARGET: Complex64 = Complex64::new(0.9378050525983931, 0.3471623299278579);
/// Eigenvalue quoted for the 2D preset at `71 x 71`, `g = 0`.
pub const SQUARE_TARGET: Complex64 = Complex64::new(0.9336010518344118, 0.3583142140826795);

/// Preset names accepted by [`preset`].
pub const PRESETS: &[&str] = &[
    "fig3", "fig4", "fig5", "fig6", "fig7", "fig9", "fig10", "fig11", "fig12",
];

/// Most density files written by one 2D run.
pub const SQUARE_SNAPSHOT_CAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Evolve,
    Spectrum,
    SurvivalSweep,
}

impl ExperimentKind {
    fn name(self) -> &'static str {
        match self {
            ExperimentKind::Evolve => "evolve",
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::SurvivalSweep => "survival_sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub kind: ExperimentKind,
    pub dimension: Dimension,
    pub params: WalkParams,
    pub lx: usize,
    pub ly: usize,
    pub target: Complex64,
    pub delta: (i64, i64),
    pub k: (f64, f64),
    pub steps: usize,
    /// Snapshot cadence; 0 disables periodic snapshots.
    pub snapshot_every: usize,
    pub snapshot_steps: Vec<usize>,
    pub survival: Option<(i64, i64)>,
    pub output_dir: PathBuf,
    pub solver: SolverOptions,
    /// Evolve once per value; `None` means a single run at `params.g`.
    pub run_g_values: Option<Vec<f64>>,
    pub spectrum_g_values: Vec<f64>,
    pub sweep_g_values: Vec<f64>,
    pub sweep_delta_x_values: Vec<i64>,
}

impl ExperimentConfig {
    /// Single 1D evolution at `L_x = 801` starting from the quoted eigenstate.
    pub fn line_default() -> Self {
        ExperimentConfig {
            preset: None,
            kind: ExperimentKind::Evolve,
            dimension: Dimension::One,
            params: WalkParams::line_preset(),
            lx: 801,
            ly: 1,
            target: LINE_TARGET,
            delta: (19, 0),
            k: (0.0, 0.0),
            steps: 400,
            snapshot_every: 1,
            snapshot_steps: Vec::new(),
            survival: Some((-80, 0)),
            output_dir: PathBuf::from("out"),
            solver: SolverOptions::default(),
            run_g_values: None,
            spectrum_g_values: vec![0.0, 1.0],
            sweep_g_values: Vec::new(),
            sweep_delta_x_values: Vec::new(),
        }
    }

    /// Single 2D evolution at `71 x 71` starting from the quoted eigenstate.
    pub fn square_default() -> Self {
        ExperimentConfig {
            dimension: Dimension::Two,
            params: WalkParams::square_preset(),
            lx: 71,
            ly: 71,
            target: SQUARE_TARGET,
            delta: (9, 0),
            k: (0.0, PI),
            steps: 100,
            snapshot_every: 5,
            survival: None,
            ..ExperimentConfig::line_default()
        }
    }

    pub fn lattice(&self) -> Result<LatticeSpec> {
        match self.dimension {
            Dimension::One => LatticeSpec::line(self.lx),
            Dimension::Two => LatticeSpec::square(self.lx, self.ly),
        }
        .map_err(|e| Error::config("lattice.lx", e.to_string()))
    }

    /// g values evolved by an `evolve` run.
    pub fn evolve_g_values(&self) -> Vec<f64> {
        self.run_g_values.clone().unwrap_or_else(|| vec![self.params.g])
    }

    /// Steps at which densities are written, thinned to the 2D cap.
    pub fn snapshot_plan(&self) -> (Vec<usize>, Option<String>) {
        let mut steps: Vec<usize> = self.snapshot_steps.iter().copied().filter(|&s| s <= self.steps).collect();
        if self.snapshot_every > 0 {
            steps.extend((0..=self.steps).step_by(self.snapshot_every));
        }
        steps.sort_unstable();
        steps.dedup();
        if self.dimension == Dimension::Two && steps.len() > SQUARE_SNAPSHOT_CAP {
            let n = steps.len();
            let thinned: Vec<usize> = (0..SQUARE_SNAPSHOT_CAP)
                .map(|i| steps[i * (n - 1) / (SQUARE_SNAPSHOT_CAP - 1)])
                .collect();
            let warning = format!("{n} density snapshots requested; thinned uniformly to {SQUARE_SNAPSHOT_CAP}");
            return (thinned, Some(warning));
        }
        (steps, None)
    }

    /// Check every invariant before any computation.
    pub fn validate(&self) -> Result<()> {
        self.params
            .validate()
            .map_err(|e| Error::config(param_path(&e), e.to_string()))?;
        if self.dimension == Dimension::One && self.ly != 1 {
            return Err(Error::config("lattice.ly", "must be 1 or absent for a 1D lattice"));
        }
        for (path, extent) in [("lattice.lx", self.lx), ("lattice.ly", self.ly)] {
            if (path == "lattice.lx" || self.dimension == Dimension::Two) && (extent < 3 || extent % 2 == 0) {
                return Err(Error::config(path, format!("extent must be odd and at least 3, got {extent}")));
            }
        }
        let lattice = self.lattice()?;
        if !self.target.re.is_finite() || !self.target.im.is_finite() || (self.target.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::config(
                "initial.target_re",
                format!("target {} is not on the unit circle", self.target),
            ));
        }
        if self.delta.0.unsigned_abs() as usize >= self.lx {
            return Err(Error::config("initial.delta_x", "shift must be smaller than the extent"));
        }
        if self.delta.1.unsigned_abs() as usize >= self.ly.max(1) && self.delta.1 != 0 {
            return Err(Error::config("initial.delta_y", "shift must be smaller than the extent"));
        }
        if self.dimension == Dimension::One {
            if self.delta.1 != 0 {
                return Err(Error::config("initial.delta_y", "must be 0 for a 1D lattice"));
            }
            if self.k != (0.0, 0.0) {
                return Err(Error::config("initial.kx", "plane-wave phases need a 2D lattice"));
            }
        }
        if !self.k.0.is_finite() || !self.k.1.is_finite() {
            return Err(Error::config("initial.kx", "must be finite"));
        }
        if let Some((lo, hi)) = self.survival {
            if self.dimension == Dimension::Two {
                return Err(Error::config("survival.lo", "survival regions are defined for 1D runs only"));
            }
            if lo > hi {
                return Err(Error::config("survival.lo", format!("empty region [{lo}, {hi}]")));
            }
            let h = lattice.half_x();
            if lo < -h || hi > h {
                return Err(Error::config("survival.hi", format!("region [{lo}, {hi}] outside [-{h}, {h}]")));
            }
        }
        if let Some(&s) = self.snapshot_steps.iter().find(|&&s| s > self.steps) {
            return Err(Error::config("run.snapshot_steps", format!("step {s} exceeds run.steps = {}", self.steps)));
        }
        if !(self.solver.tol > 0.0) || !self.solver.tol.is_finite() {
            return Err(Error::config("solver.tol", "must be positive"));
        }
        if self.solver.max_restarts == 0 {
            return Err(Error::config("solver.max_restarts", "must be at least 1"));
        }
        if self.solver.subspace_dim == 0 {
            return Err(Error::config("solver.subspace_dim", "must be at least 1"));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(Error::config("output.dir", "must not be empty"));
        }
        let check_gs = |path: &str, values: &[f64], required: bool| -> Result<()> {
            if required && values.is_empty() {
                return Err(Error::config(path, "must not be empty"));
            }
            for &g in values {
                check_g(g).map_err(|e| Error::config(path, e.to_string()))?;
            }
            Ok(())
        };
        if let Some(values) = &self.run_g_values {
            check_gs("run.g_values", values, true)?;
        }
        match self.kind {
            ExperimentKind::Evolve => {}
            ExperimentKind::Spectrum => {
                check_gs("spectrum.g_values", &self.spectrum_g_values, true)?;
                if lattice.state_len() > DENSE_LIMIT {
                    return Err(Error::config(
                        "lattice.lx",
                        format!("dense spectra need at most {DENSE_LIMIT} amplitudes, got {}", lattice.state_len()),
                    ));
                }
            }
            ExperimentKind::SurvivalSweep => {
                if self.dimension != Dimension::One {
                    return Err(Error::config("kind", "survival sweeps are defined for 1D runs only"));
                }
                if self.survival.is_none() {
                    return Err(Error::config("survival.lo", "a survival sweep needs a region"));
                }
                check_gs("sweep.g_values", &self.sweep_g_values, true)?;
                if self.sweep_delta_x_values.is_empty() {
                    return Err(Error::config("sweep.delta_x_values", "must not be empty"));
                }
                if let Some(d) = self.sweep_delta_x_values.iter().find(|d| d.unsigned_abs() as usize >= self.lx) {
                    return Err(Error::config("sweep.delta_x_values", format!("shift {d} not smaller than the extent")));
                }
            }
        }
        Ok(())
    }

    /// Flat dotted-key JSON object that reloads to an identical config.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        let mut put = |k: &str, v: Value| {
            m.insert(k.to_string(), v);
        };
        if let Some(p) = &self.preset {
            put("preset", p.clone().into());
        }
        put("kind", self.kind.name().into());
        put("dimension", self.dimension.as_number().into());
        let p = &self.params;
        for (k, v) in [
            ("params.theta0", p.theta0),
            ("params.epsilon", p.epsilon),
            ("params.w", p.w),
            ("params.alpha", p.alpha),
            ("params.beta", p.beta),
            ("params.g", p.g),
        ] {
            put(k, v.into());
        }
        put("lattice.lx", self.lx.into());
        if self.dimension == Dimension::Two {
            put("lattice.ly", self.ly.into());
        }
        put("initial.target_re", self.target.re.into());
        put("initial.target_im", self.target.im.into());
        put("initial.delta_x", self.delta.0.into());
        put("initial.delta_y", self.delta.1.into());
        put("initial.kx", self.k.0.into());
        put("initial.ky", self.k.1.into());
        put("run.steps", self.steps.into());
        put("run.snapshot_every", self.snapshot_every.into());
        put("run.snapshot_steps", self.snapshot_steps.clone().into());
        if let Some(g) = &self.run_g_values {
            put("run.g_values", g.clone().into());
        }
        if let Some((lo, hi)) = self.survival {
            put("survival.lo", lo.into());
            put("survival.hi", hi.into());
        }
        put("output.dir", self.output_dir.to_string_lossy().into_owned().into());
        put("solver.tol", self.solver.tol.into());
        put("solver.max_restarts", self.solver.max_restarts.into());
        put("solver.subspace_dim", self.solver.subspace_dim.into());
        put("solver.seed", self.solver.seed.into());
        put("spectrum.g_values", self.spectrum_g_values.clone().into());
        put("sweep.g_values", self.sweep_g_values.clone().into());
        put("sweep.delta_x_values", self.sweep_delta_x_values.clone().into());
        Value::Object(m)
    }
}

fn param_path(e: &Error) -> String {
    match e {
        Error::InvalidParameter { field, .. } => format!("params.{field}"),
        _ => "params".into(),
    }
}

/// Named reproduction preset.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let both = Some(vec![0.0, 1.0]);
    let named = |mut c: ExperimentConfig| {
        c.preset = Some(name.to_string());
        c
    };
    Ok(match name {
        "fig3" => named(ExperimentConfig {
            kind: ExperimentKind::Spectrum,
            lx: 21,
            steps: 0,
            snapshot_every: 0,
            delta: (0, 0),
            survival: None,
            spectrum_g_values: vec![0.0, 1.0],
            ..ExperimentConfig::line_default()
        }),
        "fig4" => named(ExperimentConfig {
            steps: 0,
            run_g_values: Some(vec![0.0]),
            ..ExperimentConfig::line_default()
        }),
        "fig5" => named(ExperimentConfig {
            kind: ExperimentKind::SurvivalSweep,
            lx: 401,
            snapshot_every: 0,
            sweep_g_values: (0..=20).map(|i| i as f64 * 0.5).collect(),
            sweep_delta_x_values: vec![9, 14, 19, 24, 29],
            ..ExperimentConfig::line_default()
        }),
        "fig6" | "fig7" => named(ExperimentConfig {
            run_g_values: both,
            ..ExperimentConfig::line_default()
        }),
        "fig9" | "fig10" | "fig11" | "fig12" => named(ExperimentConfig {
            run_g_values: both,
            ..ExperimentConfig::square_default()
        }),
        other => {
            return Err(Error::config(
                "preset",
                format!("unknown preset `{other}`; expected one of {}", PRESETS.join(", ")),
            ))
        }
    })
}

/// Flatten nested objects into dotted keys. Arrays are leaves.
pub fn flatten(value: &Value) -> Result<BTreeMap<String, Value>> {
    let Value::Object(obj) = value else {
        return Err(Error::config("", "config must be a JSON object"));
    };
    let mut out = BTreeMap::new();
    fn walk(prefix: &str, obj: &Map<String, Value>, out: &mut BTreeMap<String, Value>) -> Result<()> {
        for (k, v) in obj {
            let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            match v {
                Value::Object(inner) => walk(&path, inner, out)?,
                leaf => {
                    if out.insert(path.clone(), leaf.clone()).is_some() {
                        return Err(Error::config(path, "key given more than once"));
                    }
                }
            }
        }
        Ok(())
    }
    walk("", obj, &mut out)?;
    Ok(out)
}

fn as_f64(path: &str, v: &Value) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::config(path, format!("expected a finite number, got {v}")))
}

fn as_angle(path: &str, v: &Value) -> Result<f64> {
    match v {
        Value::String(s) => parse_angle(s).map_err(|e| Error::config(path, e.to_string())),
        other => as_f64(path, other),
    }
}

fn as_usize(path: &str, v: &Value) -> Result<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| Error::config(path, format!("expected a non-negative integer, got {v}")))
}

fn as_i64(path: &str, v: &Value) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| Error::config(path, format!("expected an integer, got {v}")))
}

fn as_array<'a>(path: &str, v: &'a Value) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::config(path, format!("expected an array, got {v}")))
}

fn as_str<'a>(path: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::config(path, format!("expected a string, got {v}")))
}

/// Build and validate a config from dotted keys.
pub fn from_flat(keys: &BTreeMap<String, Value>) -> Result<ExperimentConfig> {
    let dimension = match keys.get("dimension") {
        None => None,
        Some(v) => Some(match v.as_u64() {
            Some(1) => Dimension::One,
            Some(2) => Dimension::Two,
            _ => return Err(Error::config("dimension", format!("expected 1 or 2, got {v}"))),
        }),
    };
    let mut cfg = match keys.get("preset") {
        Some(v) => preset(as_str("preset", v)?)?,
        None => match dimension {
            Some(Dimension::Two) => ExperimentConfig::square_default(),
            _ => ExperimentConfig::line_default(),
        },
    };
    if let Some(d) = dimension {
        if d != cfg.dimension {
            cfg.dimension = d;
            if d == Dimension::One {
                cfg.ly = 1;
            }
        }
    }
    let (mut lo, mut hi) = (None, None);
    for (path, v) in keys {
        let p = path.as_str();
        match p {
            "preset" | "dimension" => {}
            "kind" => {
                cfg.kind = match as_str(p, v)? {
                    "evolve" => ExperimentKind::Evolve,
                    "spectrum" => ExperimentKind::Spectrum,
                    "survival_sweep" => ExperimentKind::SurvivalSweep,
                    other => {
                        return Err(Error::config(
                            p,
                            format!("unknown kind `{other}`; expected evolve, spectrum or survival_sweep"),
                        ))
                    }
                }
            }
            "params.theta0" => cfg.params.theta0 = as_angle(p, v)?,
            "params.epsilon" => cfg.params.epsilon = as_f64(p, v)?,
            "params.w" => cfg.params.w = as_f64(p, v)?,
            "params.alpha" => cfg.params.alpha = as_f64(p, v)?,
            "params.beta" => cfg.params.beta = as_f64(p, v)?,
            "params.g" => cfg.params.g = as_f64(p, v)?,
            "lattice.lx" => cfg.lx = as_usize(p, v)?,
            "lattice.ly" => cfg.ly = as_usize(p, v)?,
            "initial.target_re" => cfg.target.re = as_f64(p, v)?,
            "initial.target_im" => cfg.target.im = as_f64(p, v)?,
            "initial.delta_x" => cfg.delta.0 = as_i64(p, v)?,
            "initial.delta_y" => cfg.delta.1 = as_i64(p, v)?,
            "initial.kx" => cfg.k.0 = as_angle(p, v)?,
            "initial.ky" => cfg.k.1 = as_angle(p, v)?,
            "run.steps" => cfg.steps = as_usize(p, v)?,
            "run.snapshot_every" => cfg.snapshot_every = as_usize(p, v)?,
            "run.snapshot_steps" => {
                cfg.snapshot_steps = as_array(p, v)?
                    .iter()
                    .map(|x| as_usize(p, x))
                    .collect::<Result<_>>()?
            }
            "run.g_values" => {
                cfg.run_g_values = Some(as_array(p, v)?.iter().map(|x| as_f64(p, x)).collect::<Result<_>>()?)
            }
            "survival.lo" => lo = Some(as_i64(p, v)?),
            "survival.hi" => hi = Some(as_i64(p, v)?),
            "output.dir" => cfg.output_dir = PathBuf::from(as_str(p, v)?),
            "solver.tol" => cfg.solver.tol = as_f64(p, v)?,
            "solver.max_restarts" => cfg.solver.max_restarts = as_usize(p, v)?,
            "solver.subspace_dim" => cfg.solver.subspace_dim = as_usize(p, v)?,
            "solver.seed" => {
                cfg.solver.seed = v
                    .as_u64()
                    .ok_or_else(|| Error::config(p, format!("expected a non-negative integer, got {v}")))?
            }
            "spectrum.g_values" => {
                cfg.spectrum_g_values = as_array(p, v)?.iter().map(|x| as_f64(p, x)).collect::<Result<_>>()?
            }
            "sweep.g_values" => {
                cfg.sweep_g_values = as_array(p, v)?.iter().map(|x| as_f64(p, x)).collect::<Result<_>>()?
            }
            "sweep.delta_x_values" => {
                cfg.sweep_delta_x_values = as_array(p, v)?.iter().map(|x| as_i64(p, x)).collect::<Result<_>>()?
            }
            unknown => return Err(Error::config(unknown, "unknown key")),
        }
    }
    match (lo, hi, cfg.survival) {
        (None, None, _) => {}
        (Some(l), Some(h), _) => cfg.survival = Some((l, h)),
        (Some(l), None, Some((_, h))) | (None, Some(h), Some((l, _))) => cfg.survival = Some((l, h)),
        (Some(_), None, None) => return Err(Error::config("survival.hi", "missing")),
        (None, Some(_), None) => return Err(Error::config("survival.lo", "missing")),
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parse config text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::config("", format!("invalid JSON: {e}")))?;
    from_flat(&flatten(&value)?)
}

/// Read and parse a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Split `key=value`; the value is read as JSON when it parses, else as a string.
pub fn parse_override(text: &str) -> Result<(String, Value)> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| Error::config(text, "override must look like key=value"))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::config(text, "empty key"));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    Ok((key.to_string(), value))
}

/// Merge an optional config text, an optional preset name and overrides
/// (later sources win) into a validated config.
pub fn resolve(text: Option<&str>, preset_name: Option<&str>, overrides: &[(String, Value)]) -> Result<ExperimentConfig> {
    let mut keys = match text {
        Some(t) => {
            let mut value: Value =
                serde_json::from_str(t).map_err(|e| Error::config("", format!("invalid JSON: {e}")))?;
            // A run manifest carries its resolved config under `config`.
            if value.get("code_version").is_some() {
                if let Some(inner) = value.get_mut("config").map(Value::take) {
                    value = inner;
                }
            }
            flatten(&value)?
        }
        None => BTreeMap::new(),
    };
    if let Some(name) = preset_name {
        keys.insert("preset".into(), Value::String(name.into()));
    }
    for (k, v) in overrides {
        keys.insert(k.clone(), v.clone());
    }
    from_flat(&keys)
}
