//! The imaginary gauge map `A(g)`.

use crate::error::Result;
use crate::lattice::WaveFunction;
use crate::params::{check_g, gauge_diagonal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeDirection {
    /// Multiply by `A(g)`.
    Forward,
    /// Multiply by `A(g)^{-1} = A(-g)`.
    Inverse,
}

/// `A(g)`: ground amplitudes scaled by `e^{-g/2}`, excited by `e^{+g/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeMap {
    g: f64,
}

impl GaugeMap {
    pub fn new(g: f64) -> Result<Self> {
        check_g(g)?;
        Ok(GaugeMap { g })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn inverse(&self) -> GaugeMap {
        GaugeMap { g: -self.g }
    }

    /// Per-site diagonal of the map.
    pub fn diagonal(&self, internal_dim: usize) -> Vec<f64> {
        gauge_diagonal(self.g, internal_dim)
    }

    pub fn apply_in_place(&self, state: &mut WaveFunction) {
        let d = state.lattice().internal_dim();
        let diag = self.diagonal(d);
        for site in state.amplitudes_mut().chunks_exact_mut(d) {
            for (a, s) in site.iter_mut().zip(&diag) {
                *a *= *s;
            }
        }
    }

    pub fn apply(&self, state: &WaveFunction) -> WaveFunction {
        let mut out = state.clone();
        self.apply_in_place(&mut out);
        out
    }
}

/// `A(g) psi` or `A(g)^{-1} psi`.
pub fn apply_gauge(state: &WaveFunction, g: f64, direction: GaugeDirection) -> Result<WaveFunction> {
    let map = GaugeMap::new(g)?;
    Ok(match direction {
        GaugeDirection::Forward => map.apply(state),
        GaugeDirection::Inverse => map.inverse().apply(state),
    })
}
