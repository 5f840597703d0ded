//! Acceptance criteria 1-11. Runs as a plain binary so that every criterion
//! prints its own PASS/FAIL line; exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use active_walk::biortho::{expectation_time_series, left_right_gram, right_left_eigensystem, right_right_gram, TwoLevelHamiltonian};
use active_walk::config::{preset, ExperimentConfig, LINE_TARGET, SQUARE_TARGET};
use active_walk::experiment::{render_records, run_experiment};
use active_walk::lattice::{Dimension, LatticeSpec, WaveFunction};
use active_walk::observables::{evolve_with, prepare_initial_1d, prepare_initial_2d, Evolution, RecordOptions};
use active_walk::operator::{StepOperator, WalkOperator};
use active_walk::oracle::assemble;
use active_walk::params::WalkParams;
use active_walk::pump::{integrate_rate_equations, RateModel};
use active_walk::spectral::{dense_evolution_matrix, dense_spectrum, find_eigenpair, EigenPair};

struct Outcome {
    criterion: u8,
    name: &'static str,
    details: Vec<String>,
    pass: bool,
    elapsed: Duration,
}

impl Outcome {
    fn new(criterion: u8, name: &'static str) -> Self {
        Outcome {
            criterion,
            name,
            details: Vec::new(),
            pass: true,
            elapsed: Duration::ZERO,
        }
    }

    fn at_most(&mut self, what: &str, measured: f64, bound: f64) {
        self.record(what, measured, &format!("<= {bound:e}"), measured <= bound);
    }

    fn above(&mut self, what: &str, measured: f64, bound: f64) {
        self.record(what, measured, &format!("> {bound:e}"), measured > bound);
    }

    fn below(&mut self, what: &str, measured: f64, bound: f64) {
        self.record(what, measured, &format!("< {bound:e}"), measured < bound);
    }

    fn holds(&mut self, what: &str, ok: bool) {
        self.details.push(format!("{what}: {}", if ok { "yes" } else { "no" }));
        self.pass &= ok;
    }

    fn record(&mut self, what: &str, measured: f64, bound: &str, ok: bool) {
        self.details.push(format!("{what} = {measured:.6e} ({bound})"));
        self.pass &= ok;
    }

    fn runtime(&mut self, started: Instant, limit_s: f64) {
        self.elapsed = started.elapsed();
        let secs = self.elapsed.as_secs_f64();
        self.record("runtime [s]", secs, &format!("< {limit_s}"), secs < limit_s);
    }

    fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<32} {}  [{}]",
            self.criterion,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.details.join("; ")
        )
    }
}

fn random_state(lattice: LatticeSpec, rng: &mut ChaCha8Rng) -> WaveFunction {
    let amps = (0..lattice.state_len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    WaveFunction::from_amplitudes(lattice, amps).unwrap()
}

fn sorted_by_arg(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    v
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new(1, "unit-circle spectrum");
    let t = Instant::now();
    let lattice = LatticeSpec::line(21).unwrap();
    let params = WalkParams::line_preset();
    let spec = |g: f64| dense_spectrum(&dense_evolution_matrix(&params.with_g(g), &lattice).unwrap()).unwrap().eigenvalues;
    let (s0, s1) = (spec(0.0), spec(1.0));
    let modulus = s0.iter().chain(&s1).map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    o.at_most("max ||lambda|-1|", modulus, 1e-9);
    // Sort both multisets by argument, rotated so the list starts right after
    // the widest gap of the g = 0 spectrum; that keeps pairs near the +-pi cut together.
    let a = sorted_by_arg(s0);
    let b = sorted_by_arg(s1);
    let n = a.len();
    let gap = (0..n)
        .max_by(|&i, &j| {
            let d = |k: usize| (a[(k + 1) % n].arg() - a[k].arg()).rem_euclid(std::f64::consts::TAU);
            d(i).total_cmp(&d(j))
        })
        .unwrap();
    let cut = (a[gap].arg() + a[(gap + 1) % n].arg()) / 2.0 + if gap == n - 1 { std::f64::consts::PI } else { 0.0 };
    let rotate = |v: &[Complex64]| {
        let mut w = v.to_vec();
        w.sort_by(|x, y| {
            let k = |z: &Complex64| (z.arg() - cut).rem_euclid(std::f64::consts::TAU);
            k(x).total_cmp(&k(y))
        });
        w
    };
    let (a, b) = (rotate(&a), rotate(&b));
    let pairwise = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    o.at_most("pairwise |lambda_g1 - lambda_g0|", pairwise, 1e-8);
    o.runtime(t, 5.0);
    o
}

fn criterion_2(pair: &EigenPair, started: Instant) -> Outcome {
    let mut o = Outcome::new(2, "1D eigenvalue L=801");
    o.at_most("|lambda - target|", (pair.eigenvalue - LINE_TARGET).norm(), 1e-6);
    o.at_most("residual", pair.residual, 1e-10);
    o.runtime(started, 120.0);
    o
}

fn criterion_3(pair: &EigenPair, started: Instant) -> Outcome {
    let mut o = Outcome::new(3, "2D eigenvalue 71x71");
    o.at_most("|lambda - target|", (pair.eigenvalue - SQUARE_TARGET).norm(), 1e-6);
    o.at_most("residual", pair.residual, 1e-9);
    o.runtime(started, 600.0);
    o
}

fn gauge_error(lattice: LatticeSpec, params: WalkParams, g: f64) -> f64 {
    let u0 = assemble(&params.with_g(0.0), &lattice).unwrap();
    let ug = assemble(&params.with_g(g), &lattice).unwrap();
    let per_site: Vec<f64> = match lattice.dimension() {
        Dimension::One => vec![(-g / 2.0).exp(), (-g / 2.0).exp(), (g / 2.0).exp(), (g / 2.0).exp()],
        Dimension::Two => [(-g / 2.0).exp(); 4].into_iter().chain([(g / 2.0).exp(); 4]).collect(),
    };
    let a: Vec<f64> = (0..lattice.num_sites()).flat_map(|_| per_site.clone()).collect();
    let mut worst = 0.0f64;
    for i in 0..a.len() {
        for j in 0..a.len() {
            // A(-g) U(g) A(g)
            let v = ug[(i, j)] / a[i] * a[j];
            worst = worst.max((v - u0[(i, j)]).norm());
        }
    }
    worst
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new(4, "gauge similarity");
    let t = Instant::now();
    o.at_most("1D L=11 g=1", gauge_error(LatticeSpec::line(11).unwrap(), WalkParams::line_preset(), 1.0), 1e-12);
    o.at_most("2D 3x3 g=1", gauge_error(LatticeSpec::square(3, 3).unwrap(), WalkParams::square_preset(), 1.0), 1e-12);
    o.runtime(t, 5.0);
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new(5, "dense-oracle equivalence");
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (label, lattice, params) in [
        ("1D L=5", LatticeSpec::line(5).unwrap(), WalkParams::line_preset().with_g(0.8)),
        ("2D 3x3", LatticeSpec::square(3, 3).unwrap(), WalkParams::square_preset().with_g(0.8)),
    ] {
        let dense = assemble(&params, &lattice).unwrap();
        let op = WalkOperator::new(&params, lattice).unwrap();
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let psi = random_state(lattice, &mut rng);
            let got = op.step(&psi).unwrap();
            let want = dense.mul_vec(psi.amplitudes());
            for (a, b) in got.amplitudes().iter().zip(&want) {
                worst = worst.max((a - b).norm());
            }
        }
        o.at_most(label, worst, 1e-12);
    }
    o.runtime(t, 5.0);
    o
}

fn evolve(cfg: &ExperimentConfig, pair: &EigenPair, g: f64) -> Evolution {
    let initial = match cfg.dimension {
        Dimension::One => prepare_initial_1d(pair, cfg.delta.0).unwrap(),
        Dimension::Two => prepare_initial_2d(pair, cfg.delta, cfg.k).unwrap(),
    };
    let op = WalkOperator::new(&cfg.params.with_g(g), cfg.lattice().unwrap()).unwrap();
    let opts = RecordOptions {
        steps: cfg.steps,
        snapshot_steps: Default::default(),
        survival_region: cfg.survival,
    };
    evolve_with(&op, &initial, &opts).unwrap()
}

fn max_norm_drift(ev: &Evolution) -> f64 {
    ev.records.iter().map(|r| (r.total_probability - 1.0).abs()).fold(0.0, f64::max)
}

fn window_mean(ev: &Evolution, lo: usize, hi: usize, f: impl Fn(&active_walk::observables::ObservableRecord) -> f64) -> f64 {
    let v: Vec<f64> = ev.records.iter().filter(|r| (lo..=hi).contains(&r.step)).map(f).collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new(8, "survival trend");
    let cfg = preset("fig5").unwrap();
    let pair = find_eigenpair(&cfg.params, &cfg.lattice().unwrap(), cfg.target, &cfg.solver).unwrap();
    let mut cfg19 = cfg.clone();
    cfg19.delta.0 = 19;
    let survival = |g: f64| evolve(&cfg19, &pair, g).records.last().unwrap().survival.unwrap();
    let (p0, p1, p8, p10) = (survival(0.0), survival(1.0), survival(8.0), survival(10.0));
    o.above("P(g=0) - P(g=1)", p0 - p1, 0.0);
    o.below("|P(10) - P(8)| / P(10)", ((p10 - p8) / p10).abs(), 0.1);
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new(9, "pump model");
    let t = Instant::now();
    let (mut ratio, mut traj) = (0.0f64, 0.0f64);
    for g in [0.0, 0.5, 1.0] {
        let m = RateModel::ground(0.25, g).unwrap();
        let w21 = 0.0625 * (2.0 * g).exp();
        let w12 = 0.0625 * (-2.0 * g).exp();
        let k = w21 + w12;
        let points = integrate_rate_equations(&m, 40.0 / k, 0.01 / k).unwrap();
        for p in &points {
            // N1(t) for N1(0) = 1, N2(0) = 0
            let exact = w12 / k + (1.0 - w12 / k) * (-k * p.t).exp();
            traj = traj.max((p.n1 - exact).abs());
        }
        let last = points.last().unwrap();
        ratio = ratio.max((last.n2 / last.n1 / (4.0 * g).exp() - 1.0).abs());
    }
    o.at_most("relative |N2/N1 - e^{4g}|", ratio, 1e-6);
    o.at_most("max |N1_rk4 - N1_exact|", traj, 1e-8);
    o.runtime(t, 1.0);
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new(10, "two-level appendix suite");
    let t = Instant::now();
    let h = TwoLevelHamiltonian::new(0.25, 0.25, 1.0).unwrap();
    let pairs = right_left_eigensystem(&h).unwrap();
    let lr = left_right_gram(&pairs);
    let id_err = (0..2)
        .flat_map(|n| (0..2).map(move |m| (n, m)))
        .map(|(n, m)| (lr[n][m] - if n == m { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);
    o.at_most("|<L|R> - I|", id_err, 1e-12);
    o.above("|<R_0|R_1>|", right_right_gram(&pairs)[0][1].norm(), 1e-3);
    let c = Complex64::new(0.6, 0.0);
    let d = Complex64::new(0.0, 0.8);
    let series = expectation_time_series(&h, [c, d], 100).unwrap();
    let lr0 = series[0].left_right_energy;
    let drift = series.iter().map(|p| (p.left_right_energy - lr0).norm()).fold(0.0, f64::max);
    o.at_most("<L|H|R> drift", drift, 1e-12);
    let mut p2p = 0.0f64;
    for a in &series {
        for b in &series {
            p2p = p2p.max((a.right_right_energy - b.right_right_energy).norm());
        }
    }
    o.above("<R|H|R> peak-to-peak", p2p, 1e-3);
    o.runtime(t, 1.0);
    o
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "csv") {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn criterion_11(square: Option<(&ExperimentConfig, &EigenPair)>) -> Outcome {
    let mut o = Outcome::new(11, "determinism");
    let root = tempfile::tempdir().unwrap();
    for name in ["fig3", "fig5", "fig7"] {
        let mut runs = Vec::new();
        for rep in 0..2 {
            let mut cfg = preset(name).unwrap();
            cfg.output_dir = root.path().join(format!("{name}_{rep}"));
            run_experiment(&cfg).unwrap();
            runs.push(csv_files(&cfg.output_dir));
        }
        o.holds(&format!("{name}: {} CSVs byte-identical", runs[0].len()), !runs[0].is_empty() && runs[0] == runs[1]);
    }
    if let Some((cfg, pair)) = square {
        let a = render_records(&evolve(cfg, pair, 1.0).records);
        let b = render_records(&evolve(cfg, pair, 1.0).records);
        o.holds("fig10 records byte-identical", a == b);
    }
    o
}

fn main() -> ExitCode {
    let square = thread::spawn(|| {
        let t = Instant::now();
        let cfg = preset("fig10").unwrap();
        let pair = find_eigenpair(&cfg.params, &cfg.lattice().unwrap(), SQUARE_TARGET, &cfg.solver).unwrap();
        let c3 = criterion_3(&pair, t);
        println!("{}", c3.line());
        (cfg, pair, c3)
    });

    let mut outcomes = Vec::new();
    let report = |outcomes: &mut Vec<Outcome>, o: Outcome| {
        println!("{}", o.line());
        outcomes.push(o);
    };
    report(&mut outcomes, criterion_1());
    let t = Instant::now();
    let line = preset("fig7").unwrap();
    let line_pair = find_eigenpair(&line.params, &line.lattice().unwrap(), LINE_TARGET, &line.solver).unwrap();
    report(&mut outcomes, criterion_2(&line_pair, t));
    report(&mut outcomes, criterion_4());
    report(&mut outcomes, criterion_5());
    report(&mut outcomes, criterion_8());
    report(&mut outcomes, criterion_9());
    report(&mut outcomes, criterion_10());

    let (square_cfg, square_pair, c3) = square.join().expect("2D solve thread");
    let t = Instant::now();
    let line_g0 = evolve(&line, &line_pair, 0.0);
    let line_g1 = evolve(&line, &line_pair, 1.0);
    let square_g0 = evolve(&square_cfg, &square_pair, 0.0);
    let square_g1 = evolve(&square_cfg, &square_pair, 1.0);

    let mut c6 = Outcome::new(6, "unitary conservation");
    c6.at_most("1D fig7 max |sum P - 1|", max_norm_drift(&line_g0), 1e-10);
    c6.at_most("2D fig10 max |sum P - 1|", max_norm_drift(&square_g0), 1e-9);
    c6.runtime(t, 60.0);

    let mut c7 = Outcome::new(7, "activity ordering");
    let sd = |ev: &Evolution| ev.records.last().unwrap().x.std_dev;
    c7.above("1D sd_x(400,g=1) - sd_x(400,g=0)", sd(&line_g1) - sd(&line_g0), 0.0);
    let sdx = |ev: &Evolution| window_mean(ev, 70, 100, |r| r.x.std_dev);
    let sdy = |ev: &Evolution| window_mean(ev, 70, 100, |r| r.y.unwrap().std_dev);
    c7.above("2D <sd_x>(g=1) - <sd_x>(g=0)", sdx(&square_g1) - sdx(&square_g0), 0.0);
    c7.above("2D <sd_y>(g=1) - <sd_y>(g=0)", sdy(&square_g1) - sdy(&square_g0), 0.0);

    outcomes.push(c3);
    report(&mut outcomes, c6);
    report(&mut outcomes, c7);
    report(&mut outcomes, criterion_11(Some((&square_cfg, &square_pair))));

    outcomes.sort_by_key(|o| o.criterion);
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.pass).map(|o| o.criterion).collect();
    println!("\nacceptance summary:");
    for o in &outcomes {
        println!("  {} criterion {:>2} {}", if o.pass { "PASS" } else { "FAIL" }, o.criterion, o.name);
    }
    if failed.is_empty() {
        println!("all {} criteria passed", outcomes.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
