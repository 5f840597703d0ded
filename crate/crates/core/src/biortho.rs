//! Right/left eigensystems of the 2x2 ground/excited block and the
//! expectation values they produce under non-unitary evolution.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::check_g;

pub type Vec2 = [Complex64; 2];
pub type Mat2 = [[Complex64; 2]; 2];

/// `M(g) = [[-epsilon, -w e^{-g}], [-w e^{g}, epsilon]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelHamiltonian {
    pub epsilon: f64,
    pub w: f64,
    pub g: f64,
}

impl TwoLevelHamiltonian {
    pub fn new(epsilon: f64, w: f64, g: f64) -> Result<Self> {
        check_g(g)?;
        if !epsilon.is_finite() || !w.is_finite() {
            return Err(Error::param("epsilon/w", "must be finite"));
        }
        Ok(TwoLevelHamiltonian { epsilon, w, g })
    }

    pub fn matrix(&self) -> Mat2 {
        let c = |v: f64| Complex64::new(v, 0.0);
        [
            [c(-self.epsilon), c(-self.w * (-self.g).exp())],
            [c(-self.w * self.g.exp()), c(self.epsilon)],
        ]
    }

    /// `sqrt(epsilon^2 + w^2)`.
    pub fn level(&self) -> f64 {
        self.epsilon.hypot(self.w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiorthoPair {
    pub energy: f64,
    pub right: Vec2,
    pub left: Vec2,
}

/// `[+lambda, -lambda]` pairs. Right vectors are `A psi_n` and left vectors
/// `A^{-1} psi_n`, where `psi_n` are the orthonormal eigenvectors of `M(0)` and
/// `A = diag(e^{-g/2}, e^{g/2})`.
pub fn right_left_eigensystem(h: &TwoLevelHamiltonian) -> Result<[BiorthoPair; 2]> {
    let lambda = h.level();
    if lambda == 0.0 {
        return Err(Error::param("epsilon/w", "degenerate spectrum: epsilon = w = 0"));
    }
    // M(0) = lambda [[cos 2t, sin 2t], [sin 2t, -cos 2t]]
    let t = (-h.w).atan2(-h.epsilon) / 2.0;
    let (c, s) = (t.cos(), t.sin());
    let (a0, a1) = ((-h.g / 2.0).exp(), (h.g / 2.0).exp());
    let pair = |energy: f64, p0: f64, p1: f64| BiorthoPair {
        energy,
        right: [Complex64::new(a0 * p0, 0.0), Complex64::new(a1 * p1, 0.0)],
        left: [Complex64::new(p0 / a0, 0.0), Complex64::new(p1 / a1, 0.0)],
    };
    Ok([pair(lambda, c, s), pair(-lambda, -s, c)])
}

pub fn inner(a: &Vec2, b: &Vec2) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn mat_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// `<L_n|R_m>`.
pub fn left_right_gram(pairs: &[BiorthoPair; 2]) -> Mat2 {
    let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
    for n in 0..2 {
        for m in 0..2 {
            g[n][m] = inner(&pairs[n].left, &pairs[m].right);
        }
    }
    g
}

/// `<R_n|R_m>`.
pub fn right_right_gram(pairs: &[BiorthoPair; 2]) -> Mat2 {
    let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
    for n in 0..2 {
        for m in 0..2 {
            g[n][m] = inner(&pairs[n].right, &pairs[m].right);
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationPoint {
    pub step: usize,
    /// `<L(T)|M|R(T)>`.
    pub left_right_energy: Complex64,
    /// `<R(T)|M|R(T)>`.
    pub right_right_energy: Complex64,
    /// `<R(T)|R(T)>`.
    pub right_norm: f64,
    /// `<L(T)|R(T)>`.
    pub left_right_norm: Complex64,
}

/// Evolve `R(T) = sum c_n e^{-i E_n T} R_n` and its left partner at integer
/// `T = 0..=t_max`, evaluating the expectation values with the matrix `M`.
pub fn expectation_time_series(
    h: &TwoLevelHamiltonian,
    coeffs: [Complex64; 2],
    t_max: usize,
) -> Result<Vec<ExpectationPoint>> {
    let pairs = right_left_eigensystem(h)?;
    let m = h.matrix();
    Ok((0..=t_max)
        .map(|step| {
            let t = step as f64;
            let mut r = [Complex64::new(0.0, 0.0); 2];
            let mut l = r;
            for (c, p) in coeffs.iter().zip(&pairs) {
                let phase = c * Complex64::from_polar(1.0, -p.energy * t);
                for k in 0..2 {
                    r[k] += phase * p.right[k];
                    l[k] += phase * p.left[k];
                }
            }
            let mr = mat_vec(&m, &r);
            ExpectationPoint {
                step,
                left_right_energy: inner(&l, &mr),
                right_right_energy: inner(&r, &mr),
                right_norm: inner(&r, &r).re,
                left_right_norm: inner(&l, &r),
            }
        })
        .collect())
}

/// Largest distance between any two values of a complex series.
pub fn peak_to_peak(values: &[Complex64]) -> f64 {
    let mut d = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}
