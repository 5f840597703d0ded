//! One-dimensional walk `U = S C N(g)`.
//!
//! Per site the internal order is `LG, RG, LE, RE`. `N(g)` mixes ground and
//! excited amplitudes within each direction, the coin rotates `(L, R)` within
//! each level, and the shift moves `L` one site left and `R` one site right.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Dimension, LatticeSpec, WaveFunction};
use crate::linalg::Matrix;
use crate::operator::StepOperator;
use crate::params::{check_g, WalkParams};

/// Per-site coin angles for the ground and excited levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaProfile {
    pub theta_ground: Vec<f64>,
    pub theta_excited: Vec<f64>,
}

impl ThetaProfile {
    pub fn len(&self) -> usize {
        self.theta_ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_ground.is_empty()
    }
}

/// Piecewise-linear coin-angle profile along the x axis.
pub fn theta_profile_1d(params: &WalkParams, lattice: &LatticeSpec) -> Result<ThetaProfile> {
    lattice.ensure_dimension(Dimension::One)?;
    axis_profile(params, lattice.x_coords())
}

pub(crate) fn axis_profile(
    params: &WalkParams,
    coords: impl Iterator<Item = i64>,
) -> Result<ThetaProfile> {
    if params.beta == 0.0 || !params.beta.is_finite() {
        return Err(Error::param("beta", "must be finite and non-zero"));
    }
    let (tg, te) = (params.theta_ground(), params.theta_excited());
    let (theta_ground, theta_excited) = coords
        .map(|x| {
            let x = x as f64;
            (params.profile_angle(tg, x), params.profile_angle(te, x))
        })
        .unzip();
    Ok(ThetaProfile {
        theta_ground,
        theta_excited,
    })
}

/// `exp(-i H_C)` for one site: a real rotation on `(LG, RG)` by `theta_ground`
/// and on `(LE, RE)` by `theta_excited`.
pub fn coin_matrix(theta_ground: f64, theta_excited: f64) -> Matrix {
    let (cg, sg) = (theta_ground.cos(), theta_ground.sin());
    let (ce, se) = (theta_excited.cos(), theta_excited.sin());
    Matrix::from_real_rows(&[
        &[cg, -sg, 0.0, 0.0],
        &[sg, cg, 0.0, 0.0],
        &[0.0, 0.0, ce, -se],
        &[0.0, 0.0, se, ce],
    ])
}

#[derive(Debug, Clone, Copy)]
struct Rotation {
    cos: f64,
    sin: f64,
}

impl Rotation {
    fn new(theta: f64) -> Self {
        Rotation {
            cos: theta.cos(),
            sin: theta.sin(),
        }
    }

    #[inline]
    fn apply(&self, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        (a * self.cos - b * self.sin, a * self.sin + b * self.cos)
    }

    #[inline]
    fn apply_transpose(&self, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        (a * self.cos + b * self.sin, b * self.cos - a * self.sin)
    }
}

type Block2 = [[Complex64; 2]; 2];

#[inline]
pub(crate) fn mix(block: &Block2, g: Complex64, e: Complex64) -> (Complex64, Complex64) {
    (
        block[0][0] * g + block[0][1] * e,
        block[1][0] * g + block[1][1] * e,
    )
}

pub(crate) fn adjoint_block(b: &Block2) -> Block2 {
    [
        [b[0][0].conj(), b[1][0].conj()],
        [b[0][1].conj(), b[1][1].conj()],
    ]
}

/// Precomputed one-step operator of the 1D walk.
#[derive(Debug, Clone)]
pub struct Walk1d {
    lattice: LatticeSpec,
    params: WalkParams,
    pump: Block2,
    pump_adjoint: Block2,
    coins: Vec<(Rotation, Rotation)>,
}

impl Walk1d {
    pub fn new(params: &WalkParams, lattice: LatticeSpec) -> Result<Self> {
        let profile = theta_profile_1d(params, &lattice)?;
        Walk1d::with_profile(params, lattice, &profile)
    }

    pub fn with_profile(params: &WalkParams, lattice: LatticeSpec, profile: &ThetaProfile) -> Result<Self> {
        lattice.ensure_dimension(Dimension::One)?;
        check_g(params.g)?;
        if profile.theta_ground.len() != lattice.extent_x()
            || profile.theta_excited.len() != lattice.extent_x()
        {
            return Err(Error::LatticeMismatch(format!(
                "profile has {} sites, lattice has {}",
                profile.len(),
                lattice.extent_x()
            )));
        }
        let pump = params.pump_block();
        Ok(Walk1d {
            lattice,
            params: *params,
            pump,
            pump_adjoint: adjoint_block(&pump),
            coins: profile
                .theta_ground
                .iter()
                .zip(&profile.theta_excited)
                .map(|(&g, &e)| (Rotation::new(g), Rotation::new(e)))
                .collect(),
        })
    }

    pub fn params(&self) -> &WalkParams {
        &self.params
    }
}

impl StepOperator for Walk1d {
    fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        let n = self.lattice.extent_x();
        assert_eq!(input.len(), 4 * n);
        assert_eq!(output.len(), 4 * n);
        for (i, (rg, re)) in self.coins.iter().enumerate() {
            let a = &input[4 * i..4 * i + 4];
            let (lg, le) = mix(&self.pump, a[0], a[2]);
            let (rgv, rev) = mix(&self.pump, a[1], a[3]);
            let (lg, rgv) = rg.apply(lg, rgv);
            let (le, rev) = re.apply(le, rev);
            let left = if i == 0 { n - 1 } else { i - 1 };
            let right = if i + 1 == n { 0 } else { i + 1 };
            output[4 * left] = lg;
            output[4 * left + 2] = le;
            output[4 * right + 1] = rgv;
            output[4 * right + 3] = rev;
        }
    }

    fn apply_adjoint_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        let n = self.lattice.extent_x();
        assert_eq!(input.len(), 4 * n);
        assert_eq!(output.len(), 4 * n);
        for (i, (rg, re)) in self.coins.iter().enumerate() {
            // S^H pulls L from the left neighbour and R from the right one.
            let right = if i + 1 == n { 0 } else { i + 1 };
            let left = if i == 0 { n - 1 } else { i - 1 };
            let (lg, rgv) = rg.apply_transpose(input[4 * left], input[4 * right + 1]);
            let (le, rev) = re.apply_transpose(input[4 * left + 2], input[4 * right + 3]);
            let (lg, le) = mix(&self.pump_adjoint, lg, le);
            let (rgv, rev) = mix(&self.pump_adjoint, rgv, rev);
            output[4 * i] = lg;
            output[4 * i + 1] = rgv;
            output[4 * i + 2] = le;
            output[4 * i + 3] = rev;
        }
    }
}

/// `S C N(g) |psi>` with a precomputed profile.
pub fn apply_step_1d(state: &WaveFunction, params: &WalkParams, profile: &ThetaProfile) -> Result<WaveFunction> {
    Walk1d::with_profile(params, *state.lattice(), profile)?.step(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Horizontal, InternalState, Level};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn profile_values_on_preset() {
        let lat = LatticeSpec::line(801).unwrap();
        let p = WalkParams::line_preset();
        let prof = theta_profile_1d(&p, &lat).unwrap();
        let at = |x: i64| lat.index_x(x).unwrap();
        let tg = PI / 8.0 + 0.25;
        assert!((prof.theta_ground[at(0)] - tg).abs() < 1e-15);
        assert_eq!(prof.theta_ground[at(-100)], tg);
        assert_eq!(prof.theta_ground[at(50)], -tg);
        assert_eq!(prof.theta_excited[at(-40)], 0.0);
        for (g, e) in prof.theta_ground.iter().zip(&prof.theta_excited) {
            assert!(g.abs() <= tg + 1e-15);
            assert!(e.abs() <= p.theta_excited().abs() + 1e-15);
        }
    }

    #[test]
    fn zero_beta_rejected() {
        let lat = LatticeSpec::line(11).unwrap();
        let p = WalkParams {
            beta: 0.0,
            ..WalkParams::line_preset()
        };
        assert!(theta_profile_1d(&p, &lat).is_err());
        assert!(theta_profile_1d(&WalkParams::line_preset(), &LatticeSpec::square(3, 3).unwrap()).is_err());
    }

    #[test]
    fn coin_examples() {
        assert_eq!(coin_matrix(0.0, 0.0), Matrix::identity(4));
        let c = coin_matrix(FRAC_PI_2, 0.0);
        let expect = Matrix::from_real_rows(&[
            &[0.0, -1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        assert!(c.max_abs_diff(&expect) < 1e-16);
        for (a, b) in [(0.3, -1.2), (2.0, 0.7), (-0.4, 3.1)] {
            let c = coin_matrix(a, b);
            assert!((&c.transpose() * &c).max_abs_diff(&Matrix::identity(4)) < 1e-14);
            assert!((0..4).all(|i| (0..4).all(|j| c[(i, j)].im == 0.0)));
        }
    }

    #[test]
    fn delta_spreads_to_neighbours_only() {
        let lat = LatticeSpec::line(11).unwrap();
        let walk = Walk1d::new(&WalkParams::line_preset().with_g(0.8), lat).unwrap();
        for state in 0..4 {
            let s = InternalState::from_index(Dimension::One, state).unwrap();
            let psi = WaveFunction::localized(lat, 3, 0, s).unwrap();
            let out = walk.step(&psi).unwrap();
            let support: Vec<i64> = (0..lat.num_sites())
                .filter(|&i| out.site(i).iter().any(|a| a.norm() > 0.0))
                .map(|i| lat.site_coords(i).0)
                .collect();
            assert_eq!(support, vec![2, 4]);
        }
        // wrap at the edge
        let psi = WaveFunction::localized(lat, 5, 0, InternalState::line(Horizontal::Right, Level::Ground)).unwrap();
        let out = walk.step(&psi).unwrap();
        let support: Vec<i64> = (0..lat.num_sites())
            .filter(|&i| out.site(i).iter().any(|a| a.norm() > 0.0))
            .map(|i| lat.site_coords(i).0)
            .collect();
        assert_eq!(support, vec![-5, 4]);
    }

    #[test]
    fn profile_length_mismatch_rejected() {
        let lat = LatticeSpec::line(11).unwrap();
        let prof = theta_profile_1d(&WalkParams::line_preset(), &LatticeSpec::line(13).unwrap()).unwrap();
        let psi = WaveFunction::zeros(lat);
        assert!(apply_step_1d(&psi, &WalkParams::line_preset(), &prof).is_err());
    }
}
