use num_complex::Complex64;

use crate::error::Result;
use crate::lattice::{Dimension, LatticeSpec, WaveFunction};
use crate::params::WalkParams;
use crate::walk1d::Walk1d;
use crate::walk2d::Walk2d;

/// A one-step evolution operator applied matrix-free.
pub trait StepOperator {
    fn lattice(&self) -> &LatticeSpec;

    /// `output = U input`. Both slices have length `lattice().state_len()`.
    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]);

    /// `output = U^H input`.
    fn apply_adjoint_into(&self, input: &[Complex64], output: &mut [Complex64]);

    fn step(&self, state: &WaveFunction) -> Result<WaveFunction> {
        self.lattice().ensure_same(state.lattice())?;
        let mut out = WaveFunction::zeros(*self.lattice());
        self.apply_into(state.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }
}

/// Either walk, chosen by lattice dimension.
#[derive(Debug, Clone)]
pub enum WalkOperator {
    Line(Walk1d),
    Square(Walk2d),
}

impl WalkOperator {
    pub fn new(params: &WalkParams, lattice: LatticeSpec) -> Result<Self> {
        Ok(match lattice.dimension() {
            Dimension::One => WalkOperator::Line(Walk1d::new(params, lattice)?),
            Dimension::Two => WalkOperator::Square(Walk2d::new(params, lattice)?),
        })
    }

    pub fn params(&self) -> &WalkParams {
        match self {
            WalkOperator::Line(w) => w.params(),
            WalkOperator::Square(w) => w.params(),
        }
    }
}

impl StepOperator for WalkOperator {
    fn lattice(&self) -> &LatticeSpec {
        match self {
            WalkOperator::Line(w) => w.lattice(),
            WalkOperator::Square(w) => w.lattice(),
        }
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        match self {
            WalkOperator::Line(w) => w.apply_into(input, output),
            WalkOperator::Square(w) => w.apply_into(input, output),
        }
    }

    fn apply_adjoint_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        match self {
            WalkOperator::Line(w) => w.apply_adjoint_into(input, output),
            WalkOperator::Square(w) => w.apply_adjoint_into(input, output),
        }
    }
}
