//! Built-in acceptance checks, runnable from the CLI.

use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::biortho::{expectation_time_series, left_right_gram, peak_to_peak, right_left_eigensystem, right_right_gram, TwoLevelHamiltonian};
use crate::config::{preset, ExperimentConfig, LINE_TARGET, SQUARE_TARGET};
use crate::error::Result;
use crate::experiment::{render_records, render_spectrum, solve_initial_eigenpair};
use crate::gauge::GaugeMap;
use crate::lattice::{LatticeSpec, WaveFunction};
use crate::observables::{evolve_with, prepare_initial_1d, RecordOptions};
use crate::operator::{StepOperator, WalkOperator};
use crate::oracle::assemble;
use crate::params::WalkParams;
use crate::pump::{integrate_rate_equations, stationary_ratio, RateModel};
use crate::spectral::{
    dense_evolution_matrix, dense_spectrum, find_eigenpair, max_matched_distance, EigenPair,
    SolverOptions,
};
use crate::walk1d::{theta_profile_1d, Walk1d};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// Human-readable bound, e.g. `<= 1e-12`.
    pub bound: String,
    pub pass: bool,
    pub seconds: f64,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<48} measured {:>12.4e}  bound {:<14} ({:.2} s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.bound,
            self.seconds
        )
    }
}

struct Suite {
    checks: Vec<Check>,
    on_check: Box<dyn FnMut(&Check)>,
}

impl Suite {
    fn push(&mut self, name: &str, measured: f64, bound: &str, pass: bool, started: Instant) {
        let check = Check {
            name: name.to_string(),
            measured,
            bound: bound.to_string(),
            pass,
            seconds: started.elapsed().as_secs_f64(),
        };
        (self.on_check)(&check);
        self.checks.push(check);
    }

    fn upper(&mut self, name: &str, measured: f64, bound: f64, started: Instant) {
        self.push(name, measured, &format!("<= {bound:e}"), measured <= bound, started);
    }

    fn lower(&mut self, name: &str, measured: f64, bound: f64, started: Instant) {
        self.push(name, measured, &format!("> {bound:e}"), measured > bound, started);
    }

    fn error(&mut self, name: &str, err: impl fmt::Display, started: Instant) {
        self.push(&format!("{name} [{err}]"), f64::NAN, "no error", false, started);
    }
}

fn random_state(lattice: LatticeSpec, rng: &mut ChaCha8Rng) -> WaveFunction {
    let amps = (0..lattice.state_len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    WaveFunction::from_amplitudes(lattice, amps).expect("length matches")
}

fn oracle_error(op: &dyn StepOperator, params: &WalkParams, trials: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let lattice = *op.lattice();
    let dense = assemble(params, &lattice)?;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let psi = random_state(lattice, rng);
        let got = op.step(&psi)?;
        let want = dense.mul_vec(psi.amplitudes());
        for (a, b) in got.amplitudes().iter().zip(&want) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

fn unit_circle(s: &mut Suite) -> Result<()> {
    let t = Instant::now();
    let lattice = LatticeSpec::line(21)?;
    let params = WalkParams::line_preset();
    let s0 = dense_spectrum(&dense_evolution_matrix(&params, &lattice)?)?.eigenvalues;
    let s1 = dense_spectrum(&dense_evolution_matrix(&params.with_g(1.0), &lattice)?)?.eigenvalues;
    let modulus = s0.iter().chain(&s1).map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    s.upper("unit-circle spectrum, L=21, g in {0,1}", modulus, 1e-9, t);
    s.upper("spectrum g=1 matches g=0, L=21", max_matched_distance(&s0, &s1), 1e-8, t);
    Ok(())
}

fn gauge_similarity(s: &mut Suite) -> Result<()> {
    let t = Instant::now();
    for (name, lattice, params) in [
        ("gauge similarity A(-g)U(g)A(g) = U(0), L=11", LatticeSpec::line(11)?, WalkParams::line_preset()),
        ("gauge similarity A(-g)U(g)A(g) = U(0), 3x3", LatticeSpec::square(3, 3)?, WalkParams::square_preset()),
    ] {
        let u0 = assemble(&params, &lattice)?;
        let u1 = assemble(&params.with_g(1.0), &lattice)?;
        let d = lattice.internal_dim();
        let diag: Vec<f64> = (0..lattice.num_sites()).flat_map(|_| GaugeMap::new(1.0).unwrap().diagonal(d)).collect();
        let inv: Vec<f64> = diag.iter().map(|v| 1.0 / v).collect();
        let conj = u1.scale_rows(&inv).scale_cols(&diag);
        s.upper(name, conj.max_abs_diff(&u0), 1e-12, t);
    }
    Ok(())
}

fn dense_oracle(s: &mut Suite) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce55);
    for (name, lattice, params) in [
        ("matrix-free step = dense product, L=5", LatticeSpec::line(5)?, WalkParams::line_preset().with_g(0.7)),
        ("matrix-free step = dense product, 3x3", LatticeSpec::square(3, 3)?, WalkParams::square_preset().with_g(0.7)),
    ] {
        let t = Instant::now();
        let op = WalkOperator::new(&params, lattice)?;
        let err = oracle_error(&op, &params, 50, &mut rng)?;
        s.upper(name, err, 1e-12, t);
    }
    // A coin with its angles negated must be caught by the same comparison.
    let t = Instant::now();
    let params = WalkParams::line_preset().with_g(0.7);
    let lattice = LatticeSpec::line(5)?;
    let mut profile = theta_profile_1d(&params, &lattice)?;
    for v in profile.theta_ground.iter_mut().chain(profile.theta_excited.iter_mut()) {
        *v = -*v;
    }
    let broken = Walk1d::with_profile(&params, lattice, &profile)?;
    let err = oracle_error(&broken, &params, 50, &mut rng)?;
    s.lower("mutation: flipped coin sign detected", err, 1e-6, t);
    Ok(())
}

fn pump(s: &mut Suite) -> Result<()> {
    let t = Instant::now();
    let mut ratio_err = 0.0f64;
    let mut traj_err = 0.0f64;
    for g in [0.0, 0.5, 1.0] {
        let model = RateModel::ground(0.25, g)?;
        let (w21, w12) = model.rates();
        let k = w21 + w12;
        let traj = integrate_rate_equations(&model, 40.0 / k, 0.01 / k)?;
        for p in &traj {
            traj_err = traj_err.max((p.n1 - model.closed_form(p.t).n1).abs());
        }
        let last = traj.last().unwrap();
        ratio_err = ratio_err.max((last.n2 / last.n1 / stationary_ratio(g) - 1.0).abs());
    }
    s.upper("rate model N2/N1 -> e^{4g} (relative)", ratio_err, 1e-6, t);
    s.upper("RK4 trajectory vs closed form", traj_err, 1e-8, t);
    Ok(())
}

fn appendix(s: &mut Suite) -> Result<()> {
    let t = Instant::now();
    let h = TwoLevelHamiltonian::new(0.25, 0.25, 1.0)?;
    let pairs = right_left_eigensystem(&h)?;
    let lr = left_right_gram(&pairs);
    let mut gram_err = 0.0f64;
    for (n, row) in lr.iter().enumerate() {
        for (m, v) in row.iter().enumerate() {
            let id = if n == m { 1.0 } else { 0.0 };
            gram_err = gram_err.max((v - id).norm());
        }
    }
    s.upper("2x2 left-right Gram = I", gram_err, 1e-12, t);
    s.lower("2x2 right-right Gram off-diagonal, g=1", right_right_gram(&pairs)[0][1].norm(), 1e-3, t);
    let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let series = expectation_time_series(&h, [c, c], 100)?;
    let e0 = series[0].left_right_energy;
    let drift = series.iter().map(|p| (p.left_right_energy - e0).norm()).fold(0.0, f64::max);
    let rr: Vec<Complex64> = series.iter().map(|p| p.right_right_energy).collect();
    s.upper("<L|H|R> drift over 100 steps", drift, 1e-12, t);
    s.lower("<R|H|R> peak-to-peak over 100 steps", peak_to_peak(&rr), 1e-3, t);
    Ok(())
}

fn small_solver(s: &mut Suite) -> Result<()> {
    let t = Instant::now();
    let lattice = LatticeSpec::line(11)?;
    let params = WalkParams::line_preset();
    let target = LINE_TARGET;
    let dense = dense_spectrum(&dense_evolution_matrix(&params, &lattice)?)?.eigenvalues;
    let nearest = dense
        .iter()
        .min_by(|a, b| (*a - target).norm().total_cmp(&(*b - target).norm()))
        .copied()
        .unwrap();
    let pair = find_eigenpair(&params, &lattice, target, &SolverOptions::default())?;
    s.upper("iterative solver = dense nearest, L=11", (pair.eigenvalue - nearest).norm(), 1e-9, t);
    Ok(())
}

fn determinism_quick(s: &mut Suite) -> Result<()> {
    let t = Instant::now();
    let lattice = LatticeSpec::line(21)?;
    let params = WalkParams::line_preset().with_g(1.0);
    let a = render_spectrum(&dense_spectrum(&dense_evolution_matrix(&params, &lattice)?)?.eigenvalues);
    let b = render_spectrum(&dense_spectrum(&dense_evolution_matrix(&params, &lattice)?)?.eigenvalues);
    s.push("determinism: repeated spectrum CSV identical", 0.0, "identical", a == b, t);
    Ok(())
}

fn eigen_reproduction(s: &mut Suite, cfg: &ExperimentConfig, target: Complex64, bound: f64, name: &str) -> Result<EigenPair> {
    let t = Instant::now();
    let pair = find_eigenpair(&cfg.params.with_g(0.0), &cfg.lattice()?, target, &cfg.solver)?;
    s.upper(&format!("{name}: distance to quoted eigenvalue"), (pair.eigenvalue - target).norm(), 1e-6, t);
    s.upper(&format!("{name}: residual"), pair.residual, bound, t);
    Ok(pair)
}

fn conservation_and_activity(
    s: &mut Suite,
    cfg: &ExperimentConfig,
    pair: &EigenPair,
    bound: f64,
    window: (usize, usize),
    name: &str,
) -> Result<()> {
    let t = Instant::now();
    let initial = match cfg.dimension {
        crate::lattice::Dimension::One => prepare_initial_1d(&pair, cfg.delta.0)?,
        crate::lattice::Dimension::Two => crate::observables::prepare_initial_2d(&pair, cfg.delta, cfg.k)?,
    };
    let opts = RecordOptions {
        steps: cfg.steps,
        snapshot_steps: Default::default(),
        survival_region: None,
    };
    let lattice = cfg.lattice()?;
    let mut spread = Vec::new();
    for g in [0.0, 1.0] {
        let ev = evolve_with(&WalkOperator::new(&cfg.params.with_g(g), lattice)?, &initial, &opts)?;
        if g == 0.0 {
            let worst = ev.records.iter().map(|r| (r.total_probability - 1.0).abs()).fold(0.0, f64::max);
            s.upper(&format!("{name}: probability conservation, g=0"), worst, bound, t);
        }
        let in_window: Vec<_> = ev.records.iter().filter(|r| (window.0..=window.1).contains(&r.step)).collect();
        let n = in_window.len() as f64;
        let sx = in_window.iter().map(|r| r.x.std_dev).sum::<f64>() / n;
        let sy = in_window.iter().filter_map(|r| r.y.map(|m| m.std_dev)).sum::<f64>() / n;
        spread.push((sx, sy));
    }
    s.lower(&format!("{name}: sd_x(g=1) - sd_x(g=0)"), spread[1].0 - spread[0].0, 0.0, t);
    if cfg.dimension == crate::lattice::Dimension::Two {
        s.lower(&format!("{name}: sd_y(g=1) - sd_y(g=0)"), spread[1].1 - spread[0].1, 0.0, t);
    }
    Ok(())
}

fn survival_trend(s: &mut Suite) -> Result<()> {
    let t = Instant::now();
    let cfg = preset("fig5")?;
    let lattice = cfg.lattice()?;
    let pair = solve_initial_eigenpair(&cfg)?;
    let initial = prepare_initial_1d(&pair, 19)?;
    let opts = RecordOptions {
        steps: cfg.steps,
        snapshot_steps: Default::default(),
        survival_region: cfg.survival,
    };
    let survival = |g: f64| -> Result<f64> {
        let ev = evolve_with(&WalkOperator::new(&cfg.params.with_g(g), lattice)?, &initial, &opts)?;
        Ok(ev.records.last().and_then(|r| r.survival).unwrap_or(f64::NAN))
    };
    let (p0, p1, p8, p10) = (survival(0.0)?, survival(1.0)?, survival(8.0)?, survival(10.0)?);
    s.lower("survival(g=0) - survival(g=1), dx=19", p0 - p1, 0.0, t);
    s.upper("survival plateau |P(10)-P(8)|/P(10)", ((p10 - p8) / p10).abs(), 0.1, t);
    Ok(())
}

fn determinism_full(s: &mut Suite) -> Result<()> {
    let t = Instant::now();
    let mut cfg = preset("fig7")?;
    cfg.steps = 50;
    let pair = solve_initial_eigenpair(&cfg)?;
    let initial = prepare_initial_1d(&pair, cfg.delta.0)?;
    let opts = RecordOptions {
        steps: cfg.steps,
        snapshot_steps: Default::default(),
        survival_region: cfg.survival,
    };
    let op = WalkOperator::new(&cfg.params.with_g(1.0), cfg.lattice()?)?;
    let a = render_records(&evolve_with(&op, &initial, &opts)?.records);
    let pair_b = solve_initial_eigenpair(&cfg)?;
    let initial_b = prepare_initial_1d(&pair_b, cfg.delta.0)?;
    let b = render_records(&evolve_with(&op, &initial_b, &opts)?.records);
    s.push("determinism: repeated solve + evolution CSV identical", 0.0, "identical", a == b, t);
    Ok(())
}

/// Run every check of `level`, calling `on_check` as each finishes.
pub fn verify_suite(level: Level, on_check: impl FnMut(&Check) + 'static) -> Vec<Check> {
    let mut s = Suite {
        checks: Vec::new(),
        on_check: Box::new(on_check),
    };
    type Step = fn(&mut Suite) -> Result<()>;
    let quick: [(&str, Step); 6] = [
        ("unit-circle spectrum", unit_circle),
        ("gauge similarity", gauge_similarity),
        ("dense oracle", dense_oracle),
        ("rate model", pump),
        ("two-level appendix checks", appendix),
        ("small iterative solve", small_solver),
    ];
    let run = |s: &mut Suite, name: &str, f: &dyn Fn(&mut Suite) -> Result<()>| {
        let t = Instant::now();
        if let Err(e) = f(s) {
            s.error(name, e, t);
        }
    };
    for (name, f) in quick {
        run(&mut s, name, &f);
    }
    run(&mut s, "determinism", &determinism_quick);
    if level == Level::Full {
        run(&mut s, "1D eigenpair and evolution", &|s| {
            let cfg = preset("fig7")?;
            let pair = eigen_reproduction(s, &cfg, LINE_TARGET, 1e-10, "1D eigenpair L=801")?;
            conservation_and_activity(s, &cfg, &pair, 1e-10, (400, 400), "1D fig7")
        });
        run(&mut s, "2D eigenpair and evolution", &|s| {
            let cfg = preset("fig10")?;
            let pair = eigen_reproduction(s, &cfg, SQUARE_TARGET, 1e-9, "2D eigenpair 71x71")?;
            conservation_and_activity(s, &cfg, &pair, 1e-9, (70, 100), "2D fig10")
        });
        run(&mut s, "survival trend", &survival_trend);
        run(&mut s, "determinism", &determinism_full);
    }
    s.checks
}
