//! Two-level rate equations for pumping and spontaneous emission.
//!
//! `dN1/dt = w12 N2 - w21 N1` and `dN2/dt = -dN1/dt`, with the golden-rule
//! rates `w21 = w^2 e^{2g}` and `w12 = w^2 e^{-2g}`.

use crate::error::{Error, Result};
use crate::params::check_g;

/// `(w21, w12)`.
pub fn golden_rule_rates(w: f64, g: f64) -> Result<(f64, f64)> {
    check_g(g)?;
    if !w.is_finite() {
        return Err(Error::param("w", "must be finite"));
    }
    let w2 = w * w;
    Ok((w2 * (2.0 * g).exp(), w2 * (-2.0 * g).exp()))
}

/// `N2 / N1` in the stationary state, `e^{4g}`.
pub fn stationary_ratio(g: f64) -> f64 {
    (4.0 * g).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateModel {
    pub w: f64,
    pub g: f64,
    pub n1: f64,
    pub n2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub t: f64,
    pub n1: f64,
    pub n2: f64,
}

impl RateModel {
    pub fn new(w: f64, g: f64, n1: f64, n2: f64) -> Result<Self> {
        golden_rule_rates(w, g)?;
        if !(n1 >= 0.0 && n2 >= 0.0 && (n1 + n2).is_finite()) {
            return Err(Error::param("occupation", "N1 and N2 must be finite and non-negative"));
        }
        Ok(RateModel { w, g, n1, n2 })
    }

    /// All atoms in the ground state, `N = 1`.
    pub fn ground(w: f64, g: f64) -> Result<Self> {
        RateModel::new(w, g, 1.0, 0.0)
    }

    pub fn total(&self) -> f64 {
        self.n1 + self.n2
    }

    pub fn rates(&self) -> (f64, f64) {
        golden_rule_rates(self.w, self.g).expect("validated on construction")
    }

    /// `(N1, N2)` at the fixed point.
    pub fn stationary(&self) -> (f64, f64) {
        let (w21, w12) = self.rates();
        let k = w21 + w12;
        if k == 0.0 {
            return (self.n1, self.n2);
        }
        let n1 = self.total() * w12 / k;
        (n1, self.total() - n1)
    }

    /// Exact solution: relaxation to the fixed point at rate `w12 + w21`.
    pub fn closed_form(&self, t: f64) -> RatePoint {
        let (w21, w12) = self.rates();
        let k = w21 + w12;
        let (s1, _) = self.stationary();
        let n1 = s1 + (self.n1 - s1) * (-k * t).exp();
        RatePoint {
            t,
            n1,
            n2: self.total() - n1,
        }
    }

    fn derivative(&self, n1: f64, n2: f64) -> (f64, f64) {
        let (w21, w12) = self.rates();
        let d1 = w12 * n2 - w21 * n1;
        (d1, -d1)
    }
}

/// Classical RK4 with `ceil(t_max / dt)` equal steps ending exactly at `t_max`.
pub fn integrate_rate_equations(model: &RateModel, t_max: f64, dt: f64) -> Result<Vec<RatePoint>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", "must be positive"));
    }
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::param("t_max", "must be non-negative"));
    }
    let (w21, w12) = model.rates();
    let limit = 2.0 / (w21 + w12);
    if dt >= limit {
        return Err(Error::param("dt", format!("must be below 2/(w12+w21) = {limit}")));
    }
    let steps = (t_max / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t_max / steps as f64 };
    let mut out = Vec::with_capacity(steps + 1);
    let (mut n1, mut n2) = (model.n1, model.n2);
    out.push(RatePoint { t: 0.0, n1, n2 });
    for i in 1..=steps {
        let (a1, a2) = model.derivative(n1, n2);
        let (b1, b2) = model.derivative(n1 + 0.5 * h * a1, n2 + 0.5 * h * a2);
        let (c1, c2) = model.derivative(n1 + 0.5 * h * b1, n2 + 0.5 * h * b2);
        let (d1, d2) = model.derivative(n1 + h * c1, n2 + h * c2);
        n1 += h / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + d1);
        n2 += h / 6.0 * (a2 + 2.0 * b2 + 2.0 * c2 + d2);
        out.push(RatePoint {
            t: i as f64 * h,
            n1,
            n2,
        });
    }
    Ok(out)
}
