use num_complex::Complex64;

use active_walk::config::LINE_TARGET;
use active_walk::gauge::GaugeMap;
use active_walk::lattice::{LatticeSpec, WaveFunction};
use active_walk::observables::{evolve_with, normalized_density, RecordOptions};
use active_walk::operator::{StepOperator, WalkOperator};
use active_walk::oracle::{factors_2d, DENSE_LIMIT};
use active_walk::params::WalkParams;
use active_walk::spectral::{
    dense_evolution_matrix, dense_spectrum, find_eigenpair, left_vector_for, EigenPair, SolverOptions,
};
use active_walk::Error;

fn residual(op: &WalkOperator, v: &WaveFunction, lambda: Complex64) -> f64 {
    let uv = op.step(v).unwrap();
    let r: f64 = uv
        .amplitudes()
        .iter()
        .zip(v.amplitudes())
        .map(|(a, b)| (a - lambda * b).norm_sqr())
        .sum();
    r.sqrt() / v.total_norm_sq().sqrt()
}

/// Eigenvalues of the 11-site walk that are at least `gap` away from all others.
fn isolated_eigenvalues(lattice: &LatticeSpec, gap: f64) -> Vec<Complex64> {
    let spec = dense_spectrum(&dense_evolution_matrix(&WalkParams::line_preset(), lattice).unwrap())
        .unwrap()
        .eigenvalues;
    spec.iter()
        .filter(|z| spec.iter().filter(|w| (*w - *z).norm() < gap).count() == 1)
        .copied()
        .collect()
}

#[test]
fn factors_are_unitary_at_g0() {
    let lat = LatticeSpec::square(3, 3).unwrap();
    let f = factors_2d(&WalkParams::square_preset(), &lat).unwrap();
    assert_eq!(f.names, ["N", "C_x", "S_x", "C_y", "S_y"]);
    for (name, m) in f.names.iter().zip(&f.factors) {
        assert!(m.unitarity_defect() <= 1e-12, "{name}");
    }
}

#[test]
fn square_spectra_lie_on_unit_circle() {
    for n in [3, 5] {
        let lat = LatticeSpec::square(n, n).unwrap();
        for g in [0.0, 0.5, 1.0] {
            let m = dense_evolution_matrix(&WalkParams::square_preset().with_g(g), &lat).unwrap();
            for z in dense_spectrum(&m).unwrap().eigenvalues {
                assert!((z.norm() - 1.0).abs() <= 1e-9, "{n}x{n} g={g}: |{z}|");
            }
        }
    }
}

#[test]
fn dense_guard_rejects_large_lattices() {
    let lat = LatticeSpec::line(DENSE_LIMIT / 4 + 1).unwrap();
    assert!(matches!(
        dense_evolution_matrix(&WalkParams::line_preset(), &lat),
        Err(Error::DenseTooLarge { .. })
    ));
}

#[test]
fn eigenpairs_at_nonzero_g_are_verified_and_gauge_related() {
    let lat = LatticeSpec::line(11).unwrap();
    let opts = SolverOptions::default();
    let targets = isolated_eigenvalues(&lat, 1e-4);
    assert!(targets.len() >= 6);
    let g = 1.0;
    let params = WalkParams::line_preset().with_g(g);
    let op_g = WalkOperator::new(&params, lat).unwrap();
    let op_0 = WalkOperator::new(&params.with_g(0.0), lat).unwrap();
    let pairs: Vec<EigenPair> = targets
        .iter()
        .take(6)
        .map(|&t| find_eigenpair(&params, &lat, t, &opts).unwrap())
        .collect();
    for p in &pairs {
        assert!(residual(&op_g, &p.right_vector, p.eigenvalue) <= opts.tol);
        assert!((p.eigenvalue.norm() - 1.0).abs() <= 1e-8);
        let back = GaugeMap::new(-g).unwrap().apply(&p.right_vector);
        assert!(residual(&op_0, &back, p.eigenvalue) <= 10.0 * opts.tol);
    }
    let lefts: Vec<WaveFunction> = pairs.iter().map(|p| left_vector_for(p, g).unwrap()).collect();
    let mut off_diag_rr = 0.0f64;
    for (n, l) in lefts.iter().enumerate() {
        for (m, p) in pairs.iter().enumerate() {
            let want = if n == m { 1.0 } else { 0.0 };
            assert!((l.inner(&p.right_vector).unwrap() - want).norm() <= 1e-10, "<L{n}|R{m}>");
            if n != m {
                off_diag_rr = off_diag_rr.max(pairs[n].right_vector.inner(&p.right_vector).unwrap().norm());
            }
        }
    }
    assert!(off_diag_rr > 1e-4, "right vectors should not be orthogonal at g = 1");
}

#[test]
fn unshifted_eigenstate_density_is_stationary() {
    let lat = LatticeSpec::line(201).unwrap();
    let params = WalkParams::line_preset();
    let pair = find_eigenpair(&params, &lat, LINE_TARGET, &SolverOptions::default()).unwrap();
    let p0 = normalized_density(&pair.right_vector).unwrap();
    let op = WalkOperator::new(&params, lat).unwrap();
    let ev = evolve_with(
        &op,
        &pair.right_vector,
        &RecordOptions {
            steps: 100,
            snapshot_steps: (0..=100).collect(),
            survival_region: None,
        },
    )
    .unwrap();
    for snap in &ev.snapshots {
        let total = snap.density.sum();
        for (a, b) in snap.density.total().iter().zip(&p0) {
            assert!((a / total - b).abs() <= 1e-8, "T = {}", snap.step);
        }
    }
}

#[test]
fn solver_is_deterministic() {
    let lat = LatticeSpec::line(101).unwrap();
    let params = WalkParams::line_preset();
    let a = find_eigenpair(&params, &lat, LINE_TARGET, &SolverOptions::default()).unwrap();
    let b = find_eigenpair(&params, &lat, LINE_TARGET, &SolverOptions::default()).unwrap();
    assert_eq!(a.eigenvalue, b.eigenvalue);
    assert_eq!(a.right_vector, b.right_vector);
}
