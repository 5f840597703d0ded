//! Two-dimensional walk `U = S_y C_y S_x C_x N(g)`.
//!
//! Internal index `4 * level + 2 * vertical + horizontal`, i.e. the order
//! `LDG, RDG, LUG, RUG, LDE, RDE, LUE, RUE`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Dimension, LatticeSpec, WaveFunction};
use crate::linalg::Matrix;
use crate::operator::StepOperator;
use crate::params::{check_g, WalkParams};
use crate::walk1d::{adjoint_block, axis_profile, mix};

const LD: usize = 0;
const RD: usize = 1;
const LU: usize = 2;
const RU: usize = 3;
const EXCITED: usize = 4;

/// Coin angles along each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaProfile2D {
    pub theta_xg: Vec<f64>,
    pub theta_xe: Vec<f64>,
    pub theta_yg: Vec<f64>,
    pub theta_ye: Vec<f64>,
}

/// Per-axis piecewise profiles. The y profile is the x formula evaluated at y.
pub fn theta_profiles_2d(params: &WalkParams, lattice: &LatticeSpec) -> Result<ThetaProfile2D> {
    lattice.ensure_dimension(Dimension::Two)?;
    let x = axis_profile(params, lattice.x_coords())?;
    let y = axis_profile(params, lattice.y_coords())?;
    Ok(ThetaProfile2D {
        theta_xg: x.theta_ground,
        theta_xe: x.theta_excited,
        theta_yg: y.theta_ground,
        theta_ye: y.theta_excited,
    })
}

/// `C_x` on one site: a rotation within each `(L, R)` pair.
pub fn coin_x_matrix(theta_g: f64, theta_e: f64) -> Matrix {
    let mut m = Matrix::zeros(8, 8);
    for (base, theta) in [(0, theta_g), (EXCITED, theta_e)] {
        let (c, s) = (theta.cos(), theta.sin());
        for pair in [base + LD, base + LU] {
            m[(pair, pair)] = c.into();
            m[(pair, pair + 1)] = (-s).into();
            m[(pair + 1, pair)] = s.into();
            m[(pair + 1, pair + 1)] = c.into();
        }
    }
    m
}

/// `C_y` on one site. Within a level, in the order `LD, RD, LU, RU`:
///
/// ```text
/// [ c  0  0 -s ]
/// [ 0  c -s  0 ]
/// [ 0  s  c  0 ]
/// [ s  0  0  c ]
/// ```
pub fn coin_y_matrix(theta_g: f64, theta_e: f64) -> Matrix {
    let mut m = Matrix::zeros(8, 8);
    for (b, theta) in [(0, theta_g), (EXCITED, theta_e)] {
        let (c, s) = (theta.cos(), theta.sin());
        for k in 0..4 {
            m[(b + k, b + k)] = c.into();
        }
        m[(b + LD, b + RU)] = (-s).into();
        m[(b + RD, b + LU)] = (-s).into();
        m[(b + LU, b + RD)] = s.into();
        m[(b + RU, b + LD)] = s.into();
    }
    m
}

#[derive(Debug, Clone, Copy)]
struct CosSin {
    c: f64,
    s: f64,
}

impl CosSin {
    fn new(theta: f64) -> Self {
        CosSin {
            c: theta.cos(),
            s: theta.sin(),
        }
    }
}

#[inline]
fn rotate_x(a: &mut [Complex64], cs: CosSin, transpose: bool) {
    let s = if transpose { -cs.s } else { cs.s };
    for p in [LD, LU] {
        let (l, r) = (a[p], a[p + 1]);
        a[p] = l * cs.c - r * s;
        a[p + 1] = l * s + r * cs.c;
    }
}

#[inline]
fn rotate_y(a: &mut [Complex64], cs: CosSin, transpose: bool) {
    let s = if transpose { -cs.s } else { cs.s };
    let (ld, rd, lu, ru) = (a[LD], a[RD], a[LU], a[RU]);
    a[LD] = ld * cs.c - ru * s;
    a[RD] = rd * cs.c - lu * s;
    a[LU] = rd * s + lu * cs.c;
    a[RU] = ld * s + ru * cs.c;
}

#[inline]
fn pump_site(block: &[[Complex64; 2]; 2], a: &mut [Complex64]) {
    for k in 0..4 {
        let (g, e) = mix(block, a[k], a[k + EXCITED]);
        a[k] = g;
        a[k + EXCITED] = e;
    }
}

/// Scatter `L` to `x - 1` and `R` to `x + 1` along each row.
fn shift_x(lat: &LatticeSpec, input: &[Complex64], output: &mut [Complex64]) {
    let lx = lat.extent_x();
    for iy in 0..lat.extent_y() {
        for ix in 0..lx {
            let here = lat.site(ix, iy) * 8;
            let left = lat.site(if ix == 0 { lx - 1 } else { ix - 1 }, iy) * 8;
            let right = lat.site(if ix + 1 == lx { 0 } else { ix + 1 }, iy) * 8;
            for lr_pair in [LD, LU, LD + EXCITED, LU + EXCITED] {
                output[left + lr_pair] = input[here + lr_pair];
                output[right + lr_pair + 1] = input[here + lr_pair + 1];
            }
        }
    }
}

/// Adjoint of [`shift_x`]: `L` from `x - 1`, `R` from `x + 1`.
fn shift_x_adjoint(lat: &LatticeSpec, input: &[Complex64], output: &mut [Complex64]) {
    let lx = lat.extent_x();
    for iy in 0..lat.extent_y() {
        for ix in 0..lx {
            let here = lat.site(ix, iy) * 8;
            let left = lat.site(if ix == 0 { lx - 1 } else { ix - 1 }, iy) * 8;
            let right = lat.site(if ix + 1 == lx { 0 } else { ix + 1 }, iy) * 8;
            for lr_pair in [LD, LU, LD + EXCITED, LU + EXCITED] {
                output[here + lr_pair] = input[left + lr_pair];
                output[here + lr_pair + 1] = input[right + lr_pair + 1];
            }
        }
    }
}

/// `S_y` in gather form. On the `D` pair the block is `[[P, Q], [Q, P]]` and on
/// the `U` pair `[[P, -Q], [-Q, P]]`, with `P = (T- + T+)/2`, `Q = (T- - T+)/2`.
/// Hence for a pair `(l, r)` with sign `sigma`:
///
/// ```text
/// out_l(y) = (l + sigma r)(y + 1) / 2 + (l - sigma r)(y - 1) / 2
/// out_r(y) = (r + sigma l)(y + 1) / 2 + (r - sigma l)(y - 1) / 2
/// ```
///
/// The adjoint swaps `Q -> -Q`, which flips `sigma`.
fn shift_y(lat: &LatticeSpec, input: &[Complex64], output: &mut [Complex64], adjoint: bool) {
    let (lx, ly) = (lat.extent_x(), lat.extent_y());
    let base_sign = if adjoint { -1.0 } else { 1.0 };
    for iy in 0..ly {
        let up = if iy + 1 == ly { 0 } else { iy + 1 };
        let down = if iy == 0 { ly - 1 } else { iy - 1 };
        for ix in 0..lx {
            let here = lat.site(ix, iy) * 8;
            let from_up = lat.site(ix, up) * 8;
            let from_down = lat.site(ix, down) * 8;
            for level in [0, EXCITED] {
                for (pair, sign) in [(LD, base_sign), (LU, -base_sign)] {
                    let l = level + pair;
                    let r = l + 1;
                    let (lu, ru) = (input[from_up + l], input[from_up + r]);
                    let (ld, rd) = (input[from_down + l], input[from_down + r]);
                    output[here + l] = 0.5 * ((lu + ru * sign) + (ld - rd * sign));
                    output[here + r] = 0.5 * ((ru + lu * sign) + (rd - ld * sign));
                }
            }
        }
    }
}

/// `S_x` applied to a 2D state.
pub fn apply_shift_x(state: &WaveFunction) -> Result<WaveFunction> {
    state.lattice().ensure_dimension(Dimension::Two)?;
    let mut out = WaveFunction::zeros(*state.lattice());
    shift_x(state.lattice(), state.amplitudes(), out.amplitudes_mut());
    Ok(out)
}

/// `S_y` applied to a 2D state.
pub fn apply_shift_y(state: &WaveFunction) -> Result<WaveFunction> {
    state.lattice().ensure_dimension(Dimension::Two)?;
    let mut out = WaveFunction::zeros(*state.lattice());
    shift_y(state.lattice(), state.amplitudes(), out.amplitudes_mut(), false);
    Ok(out)
}

/// Precomputed one-step operator of the 2D walk.
#[derive(Debug, Clone)]
pub struct Walk2d {
    lattice: LatticeSpec,
    params: WalkParams,
    pump: [[Complex64; 2]; 2],
    pump_adjoint: [[Complex64; 2]; 2],
    coin_x: Vec<(CosSin, CosSin)>,
    coin_y: Vec<(CosSin, CosSin)>,
}

impl Walk2d {
    pub fn new(params: &WalkParams, lattice: LatticeSpec) -> Result<Self> {
        let profiles = theta_profiles_2d(params, &lattice)?;
        Walk2d::with_profiles(params, lattice, &profiles)
    }

    pub fn with_profiles(params: &WalkParams, lattice: LatticeSpec, profiles: &ThetaProfile2D) -> Result<Self> {
        lattice.ensure_dimension(Dimension::Two)?;
        check_g(params.g)?;
        let (lx, ly) = (lattice.extent_x(), lattice.extent_y());
        if profiles.theta_xg.len() != lx
            || profiles.theta_xe.len() != lx
            || profiles.theta_yg.len() != ly
            || profiles.theta_ye.len() != ly
        {
            return Err(Error::LatticeMismatch(format!(
                "profiles sized {}x{}, lattice is {lx}x{ly}",
                profiles.theta_xg.len(),
                profiles.theta_yg.len()
            )));
        }
        let pairs = |g: &[f64], e: &[f64]| -> Vec<(CosSin, CosSin)> {
            g.iter()
                .zip(e)
                .map(|(&g, &e)| (CosSin::new(g), CosSin::new(e)))
                .collect()
        };
        let pump = params.pump_block();
        Ok(Walk2d {
            lattice,
            params: *params,
            pump,
            pump_adjoint: adjoint_block(&pump),
            coin_x: pairs(&profiles.theta_xg, &profiles.theta_xe),
            coin_y: pairs(&profiles.theta_yg, &profiles.theta_ye),
        })
    }

    pub fn params(&self) -> &WalkParams {
        &self.params
    }
}

impl StepOperator for Walk2d {
    fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        let lat = &self.lattice;
        let n = lat.state_len();
        assert_eq!(input.len(), n);
        assert_eq!(output.len(), n);
        let lx = lat.extent_x();
        // output <- C_x N input
        output.copy_from_slice(input);
        for (site, a) in output.chunks_exact_mut(8).enumerate() {
            let (cg, ce) = self.coin_x[site % lx];
            pump_site(&self.pump, a);
            rotate_x(&mut a[..EXCITED], cg, false);
            rotate_x(&mut a[EXCITED..], ce, false);
        }
        let mut tmp = vec![Complex64::new(0.0, 0.0); n];
        shift_x(lat, output, &mut tmp);
        for (site, a) in tmp.chunks_exact_mut(8).enumerate() {
            let (cg, ce) = self.coin_y[site / lx];
            rotate_y(&mut a[..EXCITED], cg, false);
            rotate_y(&mut a[EXCITED..], ce, false);
        }
        shift_y(lat, &tmp, output, false);
    }

    fn apply_adjoint_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        let lat = &self.lattice;
        let n = lat.state_len();
        assert_eq!(input.len(), n);
        assert_eq!(output.len(), n);
        let lx = lat.extent_x();
        let mut tmp = vec![Complex64::new(0.0, 0.0); n];
        shift_y(lat, input, &mut tmp, true);
        for (site, a) in tmp.chunks_exact_mut(8).enumerate() {
            let (cg, ce) = self.coin_y[site / lx];
            rotate_y(&mut a[..EXCITED], cg, true);
            rotate_y(&mut a[EXCITED..], ce, true);
        }
        shift_x_adjoint(lat, &tmp, output);
        for (site, a) in output.chunks_exact_mut(8).enumerate() {
            let (cg, ce) = self.coin_x[site % lx];
            rotate_x(&mut a[..EXCITED], cg, true);
            rotate_x(&mut a[EXCITED..], ce, true);
            pump_site(&self.pump_adjoint, a);
        }
    }
}

/// `S_y C_y S_x C_x N(g) |psi>` with precomputed profiles.
pub fn apply_step_2d(state: &WaveFunction, params: &WalkParams, profiles: &ThetaProfile2D) -> Result<WaveFunction> {
    Walk2d::with_profiles(params, *state.lattice(), profiles)?.step(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Horizontal, InternalState, Level, Vertical};
    use crate::walk1d::coin_matrix;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn profile_examples() {
        let lat = LatticeSpec::square(71, 71).unwrap();
        let p = WalkParams::square_preset();
        assert_eq!(p.region(), (-30.0, 10.0));
        let prof = theta_profiles_2d(&p, &lat).unwrap();
        let ix = |x: i64| lat.index_x(x).unwrap();
        assert!(prof.theta_xg[ix(-10)].abs() < 1e-15);
        assert_eq!(prof.theta_xg[ix(-35)], PI / 8.0 + 0.25);
        assert_eq!(prof.theta_xg, prof.theta_yg);
        assert_eq!(prof.theta_xe, prof.theta_ye);
        assert!(theta_profiles_2d(&p, &LatticeSpec::line(71).unwrap()).is_err());
    }

    #[test]
    fn coins_identity_and_orthogonal() {
        assert_eq!(coin_x_matrix(0.0, 0.0), Matrix::identity(8));
        assert_eq!(coin_y_matrix(0.0, 0.0), Matrix::identity(8));
        for (a, b) in [(0.4, -0.9), (2.2, 1.3), (-3.0, 0.05)] {
            for m in [coin_x_matrix(a, b), coin_y_matrix(a, b)] {
                assert!((&m.transpose() * &m).max_abs_diff(&Matrix::identity(8)) < 1e-14);
            }
        }
    }

    #[test]
    fn coin_x_restricts_to_line_coin() {
        let (a, b) = (0.7, -0.2);
        let cx = coin_x_matrix(a, b);
        let line = coin_matrix(a, b);
        for sector in [[LD, RD, LD + 4, RD + 4], [LU, RU, LU + 4, RU + 4]] {
            let sub = Matrix::from_fn(4, 4, |i, j| cx[(sector[i], sector[j])]);
            assert_eq!(sub, line);
        }
    }

    #[test]
    fn shift_x_moves_right_component() {
        let lat = LatticeSpec::square(5, 5).unwrap();
        let rdg = InternalState::square(Horizontal::Right, Vertical::Down, Level::Ground);
        let psi = WaveFunction::localized(lat, 1, -1, rdg).unwrap();
        let out = apply_shift_x(&psi).unwrap();
        assert_eq!(out, WaveFunction::localized(lat, 2, -1, rdg).unwrap());
    }

    #[test]
    fn shift_y_interference_example() {
        let lat = LatticeSpec::square(5, 5).unwrap();
        let amp = Complex64::new(0.3, -0.4);
        let mut psi = WaveFunction::zeros(lat);
        let s = lat.site_at(0, 0).unwrap();
        psi.amplitudes_mut()[s * 8 + LD] = amp;
        psi.amplitudes_mut()[s * 8 + RD] = amp;
        let out = apply_shift_y(&psi).unwrap();
        let below = lat.site_at(0, -1).unwrap();
        let above = lat.site_at(0, 1).unwrap();
        assert!((out.amplitude(below, LD) - amp).norm() < 1e-16);
        assert!((out.amplitude(below, RD) - amp).norm() < 1e-16);
        assert_eq!(out.amplitude(above, LD), c(0.0));
        assert_eq!(out.amplitude(above, RD), c(0.0));
        assert!((out.total_norm_sq() - psi.total_norm_sq()).abs() < 1e-15);
    }

    #[test]
    fn shifts_reject_line_state() {
        let psi = WaveFunction::zeros(LatticeSpec::line(5).unwrap());
        assert!(apply_shift_x(&psi).is_err());
        assert!(apply_shift_y(&psi).is_err());
    }

    #[test]
    fn norm_preserved_at_zero_g() {
        let lat = LatticeSpec::square(9, 7).unwrap();
        let walk = Walk2d::new(&WalkParams::square_preset(), lat).unwrap();
        let s = InternalState::square(Horizontal::Left, Vertical::Up, Level::Excited);
        let mut psi = WaveFunction::localized(lat, 2, -3, s).unwrap();
        for _ in 0..100 {
            psi = walk.step(&psi).unwrap();
        }
        assert!((psi.total_norm_sq() - 1.0).abs() < 1e-12);
    }
}
