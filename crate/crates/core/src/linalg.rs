//! Small dense complex linear algebra.
//!
//! Row-major matrices, Householder reduction to upper Hessenberg form and a
//! single-shift complex QR iteration (Wilkinson shifts, Givens rotations)
//! producing a Schur decomposition `A = Q T Q^H`. Used for the dense spectra of
//! small walk operators and for Rayleigh-Ritz projections inside the iterative
//! eigensolver.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        Matrix::from_fn(n, m, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.len());
        Matrix::from_fn(rows, cols, |i, j| columns[j][i])
    }

    /// Block-diagonal matrix with `count` copies of `block`.
    pub fn block_diagonal(blocks: &[Matrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Matrix::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, b.cols);
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(off + i, off + j)] = b[(i, j)];
                }
            }
            off += b.rows;
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[Complex64]) {
        for (i, v) in values.iter().enumerate() {
            self[(i, j)] = *v;
        }
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Left-multiply by `diag(d)`.
    pub fn scale_rows(&self, d: &[f64]) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[i])
    }

    /// Right-multiply by `diag(d)`.
    pub fn scale_cols(&self, d: &[f64]) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[j])
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |(A^H A - I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Matrix::identity(self.cols))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// Schur decomposition `A = Q T Q^H` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur {
    pub q: Matrix,
    pub t: Matrix,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.rows).map(|i| self.t[(i, i)]).collect()
    }

    /// Unit-norm eigenvectors, one per diagonal entry of `T`.
    pub fn eigenvectors(&self) -> Vec<Vec<Complex64>> {
        let n = self.t.rows;
        let tnorm = self.t.frobenius_norm().max(f64::MIN_POSITIVE);
        let small = f64::EPSILON * tnorm;
        (0..n)
            .map(|k| {
                let lambda = self.t[(k, k)];
                let mut z = vec![ZERO; n];
                z[k] = ONE;
                for j in (0..k).rev() {
                    let s: Complex64 = (j + 1..=k).map(|i| self.t[(j, i)] * z[i]).sum();
                    let mut den = self.t[(j, j)] - lambda;
                    if den.norm() < small {
                        den = Complex64::new(small, 0.0);
                    }
                    z[j] = -s / den;
                }
                let mut v = self.q.mul_vec(&z);
                let nrm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                v.iter_mut().for_each(|a| *a /= nrm);
                v
            })
            .collect()
    }
}

/// Householder reduction to upper Hessenberg form, returning `(Q, H)` with
/// `A = Q H Q^H`.
pub fn hessenberg(a: &Matrix) -> (Matrix, Matrix) {
    assert!(a.is_square());
    let n = a.rows;
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let alpha_norm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            ONE
        } else {
            x0 / x0.norm()
        };
        // v = x + phase * |x| e1, reflector I - 2 v v^H / (v^H v)
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm_sq: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;
        // H <- P H
        for j in 0..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)])
                .sum();
            let s = s * beta;
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * s;
            }
        }
        // H <- H P, Q <- Q P
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(r, vr)| m[(i, k + 1 + r)] * vr)
                    .sum();
                let s = s * beta;
                for (r, vr) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= s * vr.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (q, h)
}

/// Givens rotation `[c, s; -conj(s), c]` with real `c` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Complex Schur decomposition by shifted QR on the Hessenberg form.
pub fn schur(a: &Matrix) -> Result<Schur> {
    let n = a.rows;
    let (mut q, mut h) = hessenberg(a);
    if n <= 1 {
        return Ok(Schur { q, t: h });
    }
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let max_iter = 60 * n;
    let mut total_iter = 0;
    let mut hi = n - 1;
    let mut since_deflation = 0usize;
    while hi > 0 {
        // find the active window [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let thresh = f64::EPSILON * if diag == 0.0 { scale } else { diag };
            if sub <= thresh {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total_iter += 1;
        since_deflation += 1;
        if total_iter > max_iter {
            return Err(Error::QrNoConvergence {
                iterations: total_iter,
                converged: n - 1 - hi,
                dim: n,
            });
        }
        let mu = if since_deflation % 11 == 10 {
            // exceptional shift
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_sweep(&mut h, &mut q, lo, hi, mu);
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { q, t: h })
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit-shift QR step on the window `[lo, hi]`, updating the full
/// matrix so that it stays a similarity of the original.
fn qr_sweep(h: &mut Matrix, q: &mut Matrix, lo: usize, hi: usize, mu: Complex64) {
    let n = h.rows;
    for i in lo..=hi {
        h[(i, i)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        // rows k, k+1 of columns k..n
        for j in k..n {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        let top = (k + 2).min(hi);
        for i in 0..=top {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
        for i in 0..n {
            let x = q[(i, k)];
            let y = q[(i, k + 1)];
            q[(i, k)] = x * c + y * s.conj();
            q[(i, k + 1)] = -x * s + y * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += mu;
    }
}

/// All eigenvalues of a square matrix.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    Ok(schur(a)?.eigenvalues())
}

/// Eigenvalues and unit-norm eigenvectors.
pub fn eigen(a: &Matrix) -> Result<(Vec<Complex64>, Vec<Vec<Complex64>>)> {
    let s = schur(a)?;
    Ok((s.eigenvalues(), s.eigenvectors()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn hessenberg_is_similarity() {
        let a = random_matrix(9, 1);
        let (q, h) = hessenberg(&a);
        assert!(q.unitarity_defect() < 1e-13);
        for i in 2..9 {
            for j in 0..i - 1 {
                assert_eq!(h[(i, j)], ZERO);
            }
        }
        let back = &(&q * &h) * &q.adjoint();
        assert!(back.max_abs_diff(&a) < 1e-13);
    }

    #[test]
    fn schur_reconstructs_random_matrices() {
        for (n, seed) in [(1, 0), (2, 3), (7, 4), (30, 5), (64, 6)] {
            let a = random_matrix(n, seed);
            let s = schur(&a).unwrap();
            assert!(s.q.unitarity_defect() < 1e-12, "n={n}");
            let back = &(&s.q * &s.t) * &s.q.adjoint();
            assert!(back.max_abs_diff(&a) < 1e-12 * n as f64, "n={n}");
            // trace is the eigenvalue sum
            let tr: Complex64 = (0..n).map(|i| a[(i, i)]).sum();
            let sum: Complex64 = s.eigenvalues().iter().sum();
            assert!((tr - sum).norm() < 1e-11 * n as f64);
        }
    }

    #[test]
    fn eigenvectors_have_small_residuals() {
        let a = random_matrix(25, 11);
        let (vals, vecs) = eigen(&a).unwrap();
        for (l, v) in vals.iter().zip(&vecs) {
            let av = a.mul_vec(v);
            let r: f64 = av
                .iter()
                .zip(v)
                .map(|(x, y)| (x - l * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(r < 1e-11, "residual {r}");
        }
    }

    #[test]
    fn known_spectra() {
        // rotation by 0.3: eigenvalues e^{+-0.3i}
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rot = Matrix::from_real_rows(&[&[c, -s], &[s, c]]);
        let mut ev = eigenvalues(&rot).unwrap();
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((ev[0] - Complex64::from_polar(1.0, -0.3)).norm() < 1e-15);
        assert!((ev[1] - Complex64::from_polar(1.0, 0.3)).norm() < 1e-15);
        // triangular input
        let t = Matrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[0.0, 4.0, 5.0], &[0.0, 0.0, 6.0]]);
        let mut ev: Vec<f64> = eigenvalues(&t).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert_eq!(ev, vec![1.0, 4.0, 6.0]);
        // cyclic permutation: n-th roots of unity
        let n = 12;
        let p = Matrix::from_fn(n, n, |i, j| if (j + 1) % n == i { ONE } else { ZERO });
        for z in eigenvalues(&p).unwrap() {
            assert!((z.powu(n as u32) - ONE).norm() < 1e-12);
            assert!((z.norm() - 1.0).abs() < 1e-13);
        }
    }
}
