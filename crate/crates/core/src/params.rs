//! Walk parameters, the coin-angle potential profile and the pump step block.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Largest accepted `|g|`. `e^20` is about `4.85e8`.
pub const G_CAP: f64 = 20.0;

pub(crate) fn check_g(g: f64) -> Result<()> {
    if !g.is_finite() || g.abs() > G_CAP {
        return Err(Error::param("g", format!("|g| must be at most {G_CAP}, got {g}")));
    }
    Ok(())
}

/// Scalar parameters of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub theta0: f64,
    pub epsilon: f64,
    pub w: f64,
    pub alpha: f64,
    pub beta: f64,
    pub g: f64,
}

impl WalkParams {
    /// `theta0 = pi/8, epsilon = w = 0.25, alpha = 1, beta = 0.025`.
    pub fn line_preset() -> Self {
        WalkParams {
            theta0: PI / 8.0,
            epsilon: 0.25,
            w: 0.25,
            alpha: 1.0,
            beta: 0.025,
            g: 0.0,
        }
    }

    /// `theta0 = pi/8, epsilon = w = 0.25, alpha = 0.5, beta = 0.05`.
    pub fn square_preset() -> Self {
        WalkParams {
            alpha: 0.5,
            beta: 0.05,
            ..WalkParams::line_preset()
        }
    }

    pub fn with_g(self, g: f64) -> Self {
        WalkParams { g, ..self }
    }

    /// `theta0 + epsilon`.
    pub fn theta_ground(&self) -> f64 {
        self.theta0 + self.epsilon
    }

    /// `theta0 - epsilon`.
    pub fn theta_excited(&self) -> f64 {
        self.theta0 - self.epsilon
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("theta0", self.theta0),
            ("epsilon", self.epsilon),
            ("w", self.w),
            ("alpha", self.alpha),
            ("beta", self.beta),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, format!("must be finite, got {v}")));
            }
        }
        if self.beta == 0.0 {
            return Err(Error::param("beta", "must be non-zero"));
        }
        check_g(self.g)
    }

    /// Edges `((-alpha-1)/beta, (-alpha+1)/beta)` of the affine region.
    pub fn region(&self) -> (f64, f64) {
        ((-self.alpha - 1.0) / self.beta, (-self.alpha + 1.0) / self.beta)
    }

    /// Piecewise coin angle at coordinate `x` for level amplitude `theta`:
    /// `theta` left of the region, `theta (alpha + beta x)` inside it and
    /// `-theta` to the right.
    pub fn profile_angle(&self, theta: f64, x: f64) -> f64 {
        let (lo, hi) = self.region();
        if x < lo {
            theta
        } else if x > hi {
            -theta
        } else {
            theta * (self.alpha + self.beta * x)
        }
    }

    /// The 2x2 ground/excited block of `H_NH(g)`.
    pub fn hamiltonian_block(&self) -> [[Complex64; 2]; 2] {
        let (e, w, g) = (self.epsilon, self.w, self.g);
        [
            [Complex64::new(-e, 0.0), Complex64::new(-w * (-g).exp(), 0.0)],
            [Complex64::new(-w * g.exp(), 0.0), Complex64::new(e, 0.0)],
        ]
    }

    /// `exp(-i M)` for the ground/excited block `M`.
    ///
    /// `M` is traceless with `M^2 = (epsilon^2 + w^2) I`, so
    /// `exp(-i M) = cos(l) I - i sin(l)/l M` with `l = sqrt(epsilon^2 + w^2)`.
    pub fn pump_block(&self) -> [[Complex64; 2]; 2] {
        let m = self.hamiltonian_block();
        let l = self.epsilon.hypot(self.w);
        let sinc = if l == 0.0 { 1.0 } else { l.sin() / l };
        let cos = Complex64::new(l.cos(), 0.0);
        let k = Complex64::new(0.0, -sinc);
        [
            [cos + k * m[0][0], k * m[0][1]],
            [k * m[1][0], cos + k * m[1][1]],
        ]
    }
}

/// `exp(-i H_NH(g))` over the full internal space: the same 2x2 ground/excited
/// block acting within every direction sector.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpStepMatrix {
    pub block: [[Complex64; 2]; 2],
    pub internal_dim: usize,
}

impl PumpStepMatrix {
    pub fn to_matrix(&self) -> Matrix {
        let half = self.internal_dim / 2;
        let mut m = Matrix::zeros(self.internal_dim, self.internal_dim);
        for d in 0..half {
            for a in 0..2 {
                for b in 0..2 {
                    m[(a * half + d, b * half + d)] = self.block[a][b];
                }
            }
        }
        m
    }
}

/// Pump step for a 1D walk (4x4) or 2D walk (8x8).
pub fn pump_step_matrix(params: &WalkParams, internal_dim: usize) -> Result<PumpStepMatrix> {
    check_g(params.g)?;
    Ok(PumpStepMatrix {
        block: params.pump_block(),
        internal_dim,
    })
}

/// Diagonal of the imaginary gauge map over one site: `e^{-g/2}` on ground
/// indices, `e^{+g/2}` on excited indices.
pub fn gauge_diagonal(g: f64, internal_dim: usize) -> Vec<f64> {
    let half = internal_dim / 2;
    (0..internal_dim)
        .map(|m| if m < half { (-g / 2.0).exp() } else { (g / 2.0).exp() })
        .collect()
}
