//! Dense spectra and a matrix-free targeted eigensolver.
//!
//! The targeted solver works on `U(0)`, which is unitary. For a target
//! `e^{i phi}` it filters with Chebyshev polynomials of the Hermitian operator
//! `B = (e^{-i phi} U + e^{i phi} U^H) / 2`, whose largest eigenvalues belong to
//! the eigenvalues of `U` closest to the target, and extracts Ritz pairs from
//! `V^H U V`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gauge::GaugeMap;
use crate::lattice::{LatticeSpec, WaveFunction};
use crate::linalg::{eigen, schur, Matrix};
use crate::operator::{StepOperator, WalkOperator};
use crate::oracle::check_dense;
use crate::params::{check_g, WalkParams};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One step as an explicit matrix, column `j` being `U e_j`.
pub fn dense_evolution_matrix(params: &WalkParams, lattice: &LatticeSpec) -> Result<Matrix> {
    check_dense(lattice)?;
    let op = WalkOperator::new(params, *lattice)?;
    let n = lattice.state_len();
    let mut m = Matrix::zeros(n, n);
    let mut e = vec![ZERO; n];
    let mut col = vec![ZERO; n];
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        op.apply_into(&e, &mut col);
        m.set_column(j, &col);
        e[j] = ZERO;
    }
    Ok(m)
}

/// Eigenvalues of a dense matrix with the backward error `max |A Q - Q T|`
/// of the Schur form they came from.
#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    pub eigenvalues: Vec<Complex64>,
    pub backward_error: f64,
}

pub fn dense_spectrum(matrix: &Matrix) -> Result<DenseSpectrum> {
    if !matrix.is_square() {
        return Err(Error::param("matrix", "must be square"));
    }
    if matrix.rows() > crate::oracle::DENSE_LIMIT {
        return Err(Error::DenseTooLarge {
            dim: matrix.rows(),
            limit: crate::oracle::DENSE_LIMIT,
        });
    }
    let s = schur(matrix)?;
    let backward_error = (matrix * &s.q).max_abs_diff(&(&s.q * &s.t));
    Ok(DenseSpectrum {
        eigenvalues: s.eigenvalues(),
        backward_error,
    })
}

/// Sort by argument, starting just after the widest angular gap of `reference`
/// so that clusters straddling the branch cut at `-pi` stay together, then
/// return the largest pairwise distance. Infinite when lengths differ.
pub fn max_matched_distance(reference: &[Complex64], other: &[Complex64]) -> f64 {
    if reference.len() != other.len() {
        return f64::INFINITY;
    }
    if reference.is_empty() {
        return 0.0;
    }
    let mut args: Vec<f64> = reference.iter().map(|z| z.arg()).collect();
    args.sort_by(f64::total_cmp);
    let last = args[args.len() - 1];
    let mut widest = args[0] + 2.0 * PI - last;
    let mut cut = last + widest / 2.0;
    for w in args.windows(2) {
        if w[1] - w[0] > widest {
            widest = w[1] - w[0];
            cut = w[0] + widest / 2.0;
        }
    }
    let key = |z: &Complex64| (z.arg() - cut).rem_euclid(2.0 * PI);
    let sorted = |v: &[Complex64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| key(a).total_cmp(&key(b)));
        v
    };
    sorted(reference)
        .iter()
        .zip(sorted(other).iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Tuning of [`find_eigenpair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_restarts: usize,
    pub subspace_dim: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_restarts: 200,
            subspace_dim: 60,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub eigenvalue: Complex64,
    /// Unit Euclidean norm.
    pub right_vector: WaveFunction,
    /// `|U v - lambda v| / |v|`, recomputed after the solve.
    pub residual: f64,
    pub left_vector: Option<WaveFunction>,
    pub target: Complex64,
    pub iterations: usize,
    /// Number of one-step operator applications spent.
    pub applications: usize,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Classical Gram-Schmidt applied twice. Columns that collapse are replaced
/// by fresh random vectors.
fn orthonormalize(block: &mut [Vec<Complex64>], rng: &mut ChaCha8Rng) {
    let n = block.first().map_or(0, Vec::len);
    for j in 0..block.len() {
        let (done, rest) = block.split_at_mut(j);
        let v = &mut rest[0];
        for _attempt in 0..3 {
            let before = norm(v);
            for _pass in 0..2 {
                let coeffs: Vec<Complex64> = done.iter().map(|q| dot(q, v)).collect();
                for (q, c) in done.iter().zip(coeffs) {
                    for (x, y) in v.iter_mut().zip(q) {
                        *x -= c * y;
                    }
                }
            }
            let after = norm(v);
            if after > 1e-10 * before && after > 0.0 {
                v.iter_mut().for_each(|x| *x /= after);
                break;
            }
            *v = random_vector(rng, n);
        }
    }
}

struct Filter<'a, O: StepOperator> {
    op: &'a O,
    phase: Complex64,
    fwd: Vec<Complex64>,
    adj: Vec<Complex64>,
    applications: usize,
}

impl<O: StepOperator> Filter<'_, O> {
    /// `out = (B - center) x / half`.
    fn shifted(&mut self, x: &[Complex64], center: f64, half: f64, out: &mut [Complex64]) {
        self.op.apply_into(x, &mut self.fwd);
        self.op.apply_adjoint_into(x, &mut self.adj);
        self.applications += 2;
        let (p, pc) = (self.phase.conj() * 0.5, self.phase * 0.5);
        for (((o, f), a), xi) in out.iter_mut().zip(&self.fwd).zip(&self.adj).zip(x) {
            *o = (p * f + pc * a - xi * center) / half;
        }
    }

    /// Replace `v` by `T_k((B - c) / e) v`, damping the B-spectrum in `[-1, cut]`.
    fn chebyshev(&mut self, v: &mut Vec<Complex64>, degree: usize, cut: f64) {
        let half = (cut + 1.0) / 2.0;
        let center = (cut - 1.0) / 2.0;
        let n = v.len();
        let mut prev = v.clone();
        let mut cur = vec![ZERO; n];
        self.shifted(&prev, center, half, &mut cur);
        let mut next = vec![ZERO; n];
        for _ in 1..degree {
            self.shifted(&cur, center, half, &mut next);
            for (x, p) in next.iter_mut().zip(&prev) {
                *x = 2.0 * *x - p;
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
        let s = norm(&cur);
        if s > 0.0 && s.is_finite() {
            cur.iter_mut().for_each(|x| *x /= s);
        }
        *v = cur;
    }
}

/// Polynomial degree giving a damping factor of about `e^8` between the
/// target and the cut.
fn filter_degree(cut: f64) -> usize {
    let x = (3.0 - cut) / (1.0 + cut);
    let rate = x.acosh();
    if !rate.is_finite() || rate <= 0.0 {
        return 20_000;
    }
    ((8.0 / rate).ceil() as usize).clamp(4, 20_000)
}

struct Ritz {
    value: Complex64,
    vector: Vec<Complex64>,
    residual: f64,
}

/// Eigenpair of a unitary operator nearest to `target`.
fn solve_unitary<O: StepOperator>(
    op: &O,
    target: Complex64,
    tol: f64,
    opts: &SolverOptions,
) -> Result<(Ritz, usize, usize)> {
    let n = op.lattice().state_len();
    let m = opts.subspace_dim.clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut block: Vec<Vec<Complex64>> = (0..m).map(|_| random_vector(&mut rng, n)).collect();
    orthonormalize(&mut block, &mut rng);

    let phase = target / target.norm();
    let mut filter = Filter {
        op,
        phase,
        fwd: vec![ZERO; n],
        adj: vec![ZERO; n],
        applications: 0,
    };
    // Uniform-density guess: about 3m/4 eigenvalues within the cut angle.
    let mut cut = (0.75 * m as f64 * PI / n as f64).min(PI).cos();
    let mut w = vec![ZERO; n];

    for iteration in 1..=opts.max_restarts.max(1) {
        if m < n {
            let degree = filter_degree(cut);
            for v in block.iter_mut() {
                filter.chebyshev(v, degree, cut);
            }
            orthonormalize(&mut block, &mut rng);
        }

        // Rayleigh-Ritz with U itself.
        let images: Vec<Vec<Complex64>> = block
            .iter()
            .map(|v| {
                op.apply_into(v, &mut w);
                w.clone()
            })
            .collect();
        filter.applications += m;
        let h = Matrix::from_fn(m, m, |i, j| dot(&block[i], &images[j]));
        let (values, ys) = eigen(&h)?;
        let mut ritz: Vec<Ritz> = values
            .iter()
            .zip(&ys)
            .map(|(&value, y)| {
                let mut x = vec![ZERO; n];
                let mut ux = vec![ZERO; n];
                for ((v, u), c) in block.iter().zip(&images).zip(y) {
                    for ((xi, uxi), (vi, ui)) in x.iter_mut().zip(ux.iter_mut()).zip(v.iter().zip(u)) {
                        *xi += c * vi;
                        *uxi += c * ui;
                    }
                }
                let nx = norm(&x);
                let r: f64 = x
                    .iter()
                    .zip(&ux)
                    .map(|(xi, ui)| (ui - value * xi).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                Ritz {
                    value,
                    vector: x,
                    residual: r / nx,
                }
            })
            .collect();
        ritz.sort_by(|a, b| (a.value - target).norm().total_cmp(&(b.value - target).norm()));

        let lead = &ritz[0];
        let converged = lead.residual <= tol;
        if m >= n || converged || iteration == opts.max_restarts.max(1) {
            return Ok((ritz.swap_remove(0), iteration, filter.applications));
        }

        // Next cut: the B-value of the Ritz value at position 3m/4.
        let k = (3 * m / 4).clamp(1, m - 1);
        let bval = (phase.conj() * ritz[k].value).re.clamp(-1.0, 1.0);
        cut = bval.min(1.0 - 1e-14);
        block = ritz.into_iter().map(|r| r.vector).collect();
        orthonormalize(&mut block, &mut rng);
    }
    unreachable!("loop returns on its last iteration")
}

/// Eigenpair of the one-step operator whose eigenvalue is nearest `target`.
///
/// The solve runs on `U(0)`; for `g != 0` the vector is mapped through `A(g)`
/// and the residual is recomputed against `U(g)`.
pub fn find_eigenpair(
    params: &WalkParams,
    lattice: &LatticeSpec,
    target: Complex64,
    opts: &SolverOptions,
) -> Result<EigenPair> {
    params.validate()?;
    check_g(params.g)?;
    if !target.re.is_finite() || !target.im.is_finite() || (target.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::param("target", format!("must lie on the unit circle, got {target}")));
    }
    if !(opts.tol > 0.0) || opts.subspace_dim == 0 {
        return Err(Error::param("solver", "tol must be positive and subspace_dim non-zero"));
    }
    let unitary = WalkOperator::new(&params.with_g(0.0), *lattice)?;
    let inner_tol = (opts.tol * (-params.g.abs()).exp()).max(1e-14);
    let (ritz, iterations, applications) = solve_unitary(&unitary, target, inner_tol, opts)?;

    let mut right = WaveFunction::from_amplitudes(*lattice, ritz.vector)?;
    if params.g != 0.0 {
        GaugeMap::new(params.g)?.apply_in_place(&mut right);
    }
    right.normalize()?;
    let op = if params.g != 0.0 {
        WalkOperator::new(params, *lattice)?
    } else {
        unitary
    };
    let image = op.step(&right)?;
    let eigenvalue = right.inner(&image)?;
    let residual = image
        .amplitudes()
        .iter()
        .zip(right.amplitudes())
        .map(|(u, v)| (u - eigenvalue * v).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let distance = (eigenvalue - target).norm();
    if distance > 0.1 || !(residual <= opts.tol) {
        return Err(Error::EigenSolver {
            best: eigenvalue,
            distance,
            residual,
            iterations,
        });
    }
    Ok(EigenPair {
        eigenvalue,
        right_vector: right,
        residual,
        left_vector: None,
        target,
        iterations,
        applications: applications + 1,
    })
}

/// Left partner `A(g)^{-2} R`, scaled so that `<L|R> = 1`.
pub fn left_vector_for(pair: &EigenPair, g: f64) -> Result<WaveFunction> {
    left_from_right(&pair.right_vector, g)
}

pub(crate) fn left_from_right(right: &WaveFunction, g: f64) -> Result<WaveFunction> {
    let mut left = GaugeMap::new(-2.0 * g)?.apply(right);
    let overlap = left.inner(right)?;
    if !(overlap.norm() > 1e-300) || !overlap.norm().is_finite() {
        return Err(Error::VanishingOverlap(overlap.norm()));
    }
    left.scale((1.0 / overlap).conj());
    Ok(left)
}
