//! Orchestration of configured runs and serialization of their outputs.
//!
//! Floats are written with `{:.16e}` (17 significant digits); the renderers
//! return strings so that determinism can be checked without touching disk.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{Error, Result};
use crate::lattice::{Dimension, LatticeSpec, WaveFunction};
use crate::observables::{evolve_with, DensitySnapshot, ObservableRecord, RecordOptions};
use crate::operator::WalkOperator;
use crate::pump::{integrate_rate_equations, RateModel};
use crate::spectral::{dense_evolution_matrix, dense_spectrum, find_eigenpair, EigenPair};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Label used in file names, e.g. `0`, `1`, `0.5`.
pub fn g_label(g: f64) -> String {
    format!("{g}")
}

/// `re,im,abs` rows.
pub fn render_spectrum(values: &[Complex64]) -> String {
    let mut s = String::from("re,im,abs\n");
    for z in values {
        let _ = writeln!(s, "{},{},{}", num(z.re), num(z.im), num(z.norm()));
    }
    s
}

/// One row per record.
pub fn render_records(records: &[ObservableRecord]) -> String {
    let Some(first) = records.first() else {
        return String::new();
    };
    let two_d = first.y.is_some();
    let survival = first.survival.is_some();
    let sectors = first.ground.is_some();
    let mut header = vec!["T", "total_probability", "mean_x", "sd_x"];
    if two_d {
        header.extend(["mean_y", "sd_y"]);
    }
    if survival {
        header.extend(["survival", "survival_unnormalized"]);
    }
    if sectors {
        header.extend(["weight_G", "mean_G", "sd_G", "weight_E", "mean_E", "sd_E"]);
    }
    let mut s = header.join(",");
    s.push('\n');
    for r in records {
        let mut row = vec![r.step.to_string(), num(r.total_probability), num(r.x.mean), num(r.x.std_dev)];
        if let Some(y) = r.y {
            row.extend([num(y.mean), num(y.std_dev)]);
        }
        if survival {
            row.extend([opt(r.survival), opt(r.survival_unnormalized)]);
        }
        for sector in [r.ground, r.excited].into_iter().flatten() {
            row.extend([
                num(sector.weight),
                opt(sector.moments.map(|m| m.mean)),
                opt(sector.moments.map(|m| m.std_dev)),
            ]);
        }
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// 1D: `x,P_G,P_E,P`. 2D: a header `y\x,<x coordinates>` followed by one row
/// per y (ascending) holding the total probability at each x.
pub fn render_density(snapshot: &DensitySnapshot) -> String {
    let d = &snapshot.density;
    let lat = &d.lattice;
    let mut s = String::new();
    match lat.dimension() {
        Dimension::One => {
            s.push_str("x,P_G,P_E,P\n");
            for (ix, x) in lat.x_coords().enumerate() {
                let (g, e) = (d.ground[ix], d.excited[ix]);
                let _ = writeln!(s, "{x},{},{},{}", num(g), num(e), num(g + e));
            }
        }
        Dimension::Two => {
            s.push_str("y\\x");
            for x in lat.x_coords() {
                let _ = write!(s, ",{x}");
            }
            s.push('\n');
            let total = d.total();
            for (iy, y) in lat.y_coords().enumerate() {
                s.push_str(&y.to_string());
                for ix in 0..lat.extent_x() {
                    s.push(',');
                    s.push_str(&num(total[lat.site(ix, iy)]));
                }
                s.push('\n');
            }
        }
    }
    s
}

pub fn eigenpair_json(pair: &EigenPair, lattice: &LatticeSpec, tol: f64) -> Value {
    json!({
        "eigenvalue_re": pair.eigenvalue.re,
        "eigenvalue_im": pair.eigenvalue.im,
        "residual": pair.residual,
        "tolerance": tol,
        "target_re": pair.target.re,
        "target_im": pair.target.im,
        "distance_to_target": (pair.eigenvalue - pair.target).norm(),
        "iterations": pair.iterations,
        "operator_applications": pair.applications,
        "g": 0.0,
        "lattice": {
            "dimension": lattice.dimension().as_number(),
            "lx": lattice.extent_x(),
            "ly": lattice.extent_y(),
        },
    })
}

/// What a run produced.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub eigenvalue: Option<Complex64>,
}

struct Writer<'a> {
    root: &'a Path,
    summary: RunSummary,
}

impl Writer<'_> {
    fn write(&mut self, relative: impl AsRef<Path>, contents: &str) -> Result<()> {
        let path = self.root.join(relative.as_ref());
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        self.summary.outputs.push(relative.as_ref().to_path_buf());
        Ok(())
    }
}

fn prepare_initial(cfg: &ExperimentConfig, pair: &EigenPair, delta_x: i64) -> Result<WaveFunction> {
    match cfg.dimension {
        Dimension::One => crate::observables::prepare_initial_1d(pair, delta_x),
        Dimension::Two => crate::observables::prepare_initial_2d(pair, (delta_x, cfg.delta.1), cfg.k),
    }
}

/// Eigenpair at `g = 0` nearest the configured target.
pub fn solve_initial_eigenpair(cfg: &ExperimentConfig) -> Result<EigenPair> {
    let lattice = cfg.lattice()?;
    find_eigenpair(&cfg.params.with_g(0.0), &lattice, cfg.target, &cfg.solver)
}

/// Run a validated configuration, writing every artifact under
/// `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let start = Instant::now();
    let lattice = cfg.lattice()?;
    fs::create_dir_all(&cfg.output_dir)?;
    let mut w = Writer {
        root: &cfg.output_dir,
        summary: RunSummary::default(),
    };
    let mut eigen_json = Value::Null;
    match cfg.kind {
        ExperimentKind::Spectrum => {
            for &g in &cfg.spectrum_g_values {
                let m = dense_evolution_matrix(&cfg.params.with_g(g), &lattice)?;
                let spec = dense_spectrum(&m)?;
                w.write(format!("spectrum_g{}.csv", g_label(g)), &render_spectrum(&spec.eigenvalues))?;
            }
        }
        ExperimentKind::Evolve => {
            let pair = solve_initial_eigenpair(cfg)?;
            eigen_json = eigenpair_json(&pair, &lattice, cfg.solver.tol);
            w.write("eigenpair.json", &format!("{}\n", serde_json::to_string_pretty(&eigen_json).unwrap()))?;
            w.summary.eigenvalue = Some(pair.eigenvalue);
            let initial = prepare_initial(cfg, &pair, cfg.delta.0)?;
            let (snapshots, thin_warning) = cfg.snapshot_plan();
            w.summary.warnings.extend(thin_warning);
            let opts = RecordOptions {
                steps: cfg.steps,
                snapshot_steps: snapshots.into_iter().collect(),
                survival_region: cfg.survival,
            };
            let gs = cfg.evolve_g_values();
            for &g in &gs {
                let dir = if gs.len() > 1 {
                    PathBuf::from(format!("g_{}", g_label(g)))
                } else {
                    PathBuf::new()
                };
                let op = WalkOperator::new(&cfg.params.with_g(g), lattice)?;
                let evolution = evolve_with(&op, &initial, &opts)?;
                w.summary
                    .warnings
                    .extend(evolution.warnings.iter().map(|m| format!("g = {g}: {m}")));
                w.write(dir.join("records.csv"), &render_records(&evolution.records))?;
                for snap in &evolution.snapshots {
                    w.write(dir.join(format!("density_{}.csv", snap.step)), &render_density(snap))?;
                }
            }
        }
        ExperimentKind::SurvivalSweep => {
            let pair = solve_initial_eigenpair(cfg)?;
            eigen_json = eigenpair_json(&pair, &lattice, cfg.solver.tol);
            w.write("eigenpair.json", &format!("{}\n", serde_json::to_string_pretty(&eigen_json).unwrap()))?;
            w.summary.eigenvalue = Some(pair.eigenvalue);
            let opts = RecordOptions {
                steps: cfg.steps,
                snapshot_steps: Default::default(),
                survival_region: cfg.survival,
            };
            let mut sweep = String::from("delta_x,g,survival\n");
            let mut series = String::from("delta_x,g,T,survival,survival_unnormalized\n");
            for &dx in &cfg.sweep_delta_x_values {
                let initial = prepare_initial(cfg, &pair, dx)?;
                for &g in &cfg.sweep_g_values {
                    let op = WalkOperator::new(&cfg.params.with_g(g), lattice)?;
                    let ev = evolve_with(&op, &initial, &opts)?;
                    let last = ev.records.last().expect("at least one record");
                    let _ = writeln!(sweep, "{dx},{},{}", num(g), opt(last.survival));
                    for r in &ev.records {
                        let _ = writeln!(
                            series,
                            "{dx},{},{},{},{}",
                            num(g),
                            r.step,
                            opt(r.survival),
                            opt(r.survival_unnormalized)
                        );
                    }
                    w.summary
                        .warnings
                        .extend(ev.warnings.iter().map(|m| format!("delta_x = {dx}, g = {g}: {m}")));
                }
            }
            w.write("survival_sweep.csv", &sweep)?;
            w.write("survival_series.csv", &series)?;
        }
    }
    let manifest = json!({
        "config": cfg.to_json(),
        "code_version": env!("CARGO_PKG_VERSION"),
        "wall_time_seconds": start.elapsed().as_secs_f64(),
        "eigenpair": eigen_json,
        "warnings": w.summary.warnings,
        "outputs": w.summary.outputs.iter().map(|p| p.to_string_lossy().into_owned()).collect::<Vec<_>>(),
    });
    let text = format!("{}\n", serde_json::to_string_pretty(&manifest).unwrap());
    fs::write(cfg.output_dir.join("manifest.json"), text)?;
    w.summary.outputs.push(PathBuf::from("manifest.json"));
    Ok(w.summary)
}

/// `g,t,N1,N2,ratio,N1_closed_form` rows for each g, starting from the ground state.
pub fn render_pump(w: f64, g_values: &[f64], t_max: f64, dt: f64) -> Result<String> {
    let mut s = String::from("g,t,N1,N2,ratio,N1_closed_form\n");
    for &g in g_values {
        let model = RateModel::ground(w, g)?;
        for p in integrate_rate_equations(&model, t_max, dt)? {
            let ratio = if p.n1 > 0.0 { p.n2 / p.n1 } else { f64::INFINITY };
            let exact = model.closed_form(p.t);
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                num(g),
                num(p.t),
                num(p.n1),
                num(p.n2),
                num(ratio),
                num(exact.n1)
            );
        }
    }
    Ok(s)
}

/// Write `pump.csv` into `out`.
pub fn run_pump(w: f64, g_values: &[f64], t_max: f64, dt: f64, out: &Path) -> Result<PathBuf> {
    if g_values.is_empty() {
        return Err(Error::param("g", "at least one value required"));
    }
    let text = render_pump(w, g_values, t_max, dt)?;
    fs::create_dir_all(out)?;
    let path = out.join("pump.csv");
    fs::write(&path, text)?;
    Ok(path)
}
