//! Explicit dense assembly of the walk operators from per-site blocks.
//!
//! This is deliberately independent of the matrix-free kernels: every factor
//! is built as a full matrix and multiplied, and `S_y` is assembled from the
//! half-sum forms of `P_y` and `Q_y` rather than from resolved shifts.

use crate::error::{Error, Result};
use crate::lattice::{Dimension, LatticeSpec};
use crate::linalg::Matrix;
use crate::params::{pump_step_matrix, WalkParams};
use crate::walk1d::{coin_matrix, theta_profile_1d};
use crate::walk2d::{coin_x_matrix, coin_y_matrix, theta_profiles_2d};

/// Largest state dimension accepted by dense routines.
pub const DENSE_LIMIT: usize = 10_000;

pub(crate) fn check_dense(lattice: &LatticeSpec) -> Result<()> {
    if lattice.state_len() > DENSE_LIMIT {
        return Err(Error::DenseTooLarge {
            dim: lattice.state_len(),
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

/// The factors of one step, rightmost first.
#[derive(Debug, Clone)]
pub struct DenseFactors {
    pub names: Vec<&'static str>,
    pub factors: Vec<Matrix>,
}

impl DenseFactors {
    /// Product of all factors, leftmost last in `factors`.
    pub fn product(&self) -> Matrix {
        let mut it = self.factors.iter();
        let mut acc = it.next().expect("at least one factor").clone();
        for f in it {
            acc = f * &acc;
        }
        acc
    }
}

fn site_blocks(n_sites: usize, block: impl Fn(usize) -> Matrix) -> Matrix {
    Matrix::block_diagonal(&(0..n_sites).map(block).collect::<Vec<_>>())
}

/// Permutation moving internal index `m` from site `s` to `target(s, m)`.
fn permutation(lattice: &LatticeSpec, target: impl Fn(usize, usize) -> usize) -> Matrix {
    let d = lattice.internal_dim();
    let n = lattice.state_len();
    let mut m = Matrix::zeros(n, n);
    for s in 0..lattice.num_sites() {
        for k in 0..d {
            m[(target(s, k) * d + k, s * d + k)] = 1.0.into();
        }
    }
    m
}

fn wrap(i: usize, delta: i64, n: usize) -> usize {
    (i as i64 + delta).rem_euclid(n as i64) as usize
}

/// Factors `[N, C, S]` of the 1D walk.
pub fn factors_1d(params: &WalkParams, lattice: &LatticeSpec) -> Result<DenseFactors> {
    lattice.ensure_dimension(Dimension::One)?;
    check_dense(lattice)?;
    let n_sites = lattice.num_sites();
    let pump = pump_step_matrix(params, 4)?.to_matrix();
    let prof = theta_profile_1d(params, lattice)?;
    let n = site_blocks(n_sites, |_| pump.clone());
    let c = site_blocks(n_sites, |s| coin_matrix(prof.theta_ground[s], prof.theta_excited[s]));
    let s = permutation(lattice, |s, k| wrap(s, if k % 2 == 0 { -1 } else { 1 }, n_sites));
    Ok(DenseFactors {
        names: vec!["N", "C", "S"],
        factors: vec![n, c, s],
    })
}

/// Factors `[N, C_x, S_x, C_y, S_y]` of the 2D walk.
pub fn factors_2d(params: &WalkParams, lattice: &LatticeSpec) -> Result<DenseFactors> {
    lattice.ensure_dimension(Dimension::Two)?;
    check_dense(lattice)?;
    let (lx, ly) = (lattice.extent_x(), lattice.extent_y());
    let n_sites = lattice.num_sites();
    let pump = pump_step_matrix(params, 8)?.to_matrix();
    let prof = theta_profiles_2d(params, lattice)?;
    let n = site_blocks(n_sites, |_| pump.clone());
    let cx = site_blocks(n_sites, |s| coin_x_matrix(prof.theta_xg[s % lx], prof.theta_xe[s % lx]));
    let cy = site_blocks(n_sites, |s| coin_y_matrix(prof.theta_yg[s / lx], prof.theta_ye[s / lx]));
    let sx = permutation(lattice, |s, k| {
        let (ix, iy) = (s % lx, s / lx);
        lattice.site(wrap(ix, if k % 2 == 0 { -1 } else { 1 }, lx), iy)
    });

    // Site-space T- = |y-1><y| and T+ = |y+1><y|.
    let mut t_minus = Matrix::zeros(n_sites, n_sites);
    let mut t_plus = Matrix::zeros(n_sites, n_sites);
    for s in 0..n_sites {
        let (ix, iy) = (s % lx, s / lx);
        t_minus[(lattice.site(ix, wrap(iy, -1, ly)), s)] = 1.0.into();
        t_plus[(lattice.site(ix, wrap(iy, 1, ly)), s)] = 1.0.into();
    }
    let p = Matrix::from_fn(n_sites, n_sites, |i, j| 0.5 * (t_minus[(i, j)] + t_plus[(i, j)]));
    let q = Matrix::from_fn(n_sites, n_sites, |i, j| 0.5 * (t_minus[(i, j)] - t_plus[(i, j)]));
    // Per level, order LD, RD, LU, RU: [[P, Q], [Q, P]] on D and
    // [[P, -Q], [-Q, P]] on U. Entries are (kind, sign) with kind 0 = P, 1 = Q.
    let pattern = |row: usize, col: usize| -> Option<(u8, f64)> {
        if row / 4 != col / 4 {
            return None;
        }
        let (r, c) = (row % 4, col % 4);
        if r / 2 != c / 2 {
            return None;
        }
        let sign = if r / 2 == 0 { 1.0 } else { -1.0 };
        if r == c {
            Some((0, 1.0))
        } else {
            Some((1, sign))
        }
    };
    let dim = lattice.state_len();
    let mut sy = Matrix::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            let (s1, k1) = (row / 8, row % 8);
            let (s0, k0) = (col / 8, col % 8);
            if let Some((kind, sign)) = pattern(k1, k0) {
                let site_op = if kind == 0 { &p } else { &q };
                sy[(row, col)] = site_op[(s1, s0)] * sign;
            }
        }
    }
    Ok(DenseFactors {
        names: vec!["N", "C_x", "S_x", "C_y", "S_y"],
        factors: vec![n, cx, sx, cy, sy],
    })
}

/// Explicitly assembled one-step operator.
pub fn assemble(params: &WalkParams, lattice: &LatticeSpec) -> Result<Matrix> {
    Ok(match lattice.dimension() {
        Dimension::One => factors_1d(params, lattice)?.product(),
        Dimension::Two => factors_2d(params, lattice)?.product(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_unitary_at_zero_g() {
        let lat = LatticeSpec::square(3, 3).unwrap();
        let f = factors_2d(&WalkParams::square_preset(), &lat).unwrap();
        for (name, m) in f.names.iter().zip(&f.factors) {
            assert!(m.unitarity_defect() < 1e-12, "{name}");
        }
        let lat = LatticeSpec::line(5).unwrap();
        let f = factors_1d(&WalkParams::line_preset(), &lat).unwrap();
        for (name, m) in f.names.iter().zip(&f.factors) {
            assert!(m.unitarity_defect() < 1e-12, "{name}");
        }
    }

    #[test]
    fn guard_rejects_large_lattices() {
        let lat = LatticeSpec::line(2501).unwrap();
        assert!(matches!(
            factors_1d(&WalkParams::line_preset(), &lat),
            Err(Error::DenseTooLarge { .. })
        ));
    }
}
