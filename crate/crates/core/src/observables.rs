//! Densities, moments, survival probability and the time-stepping recorder.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lattice::{Dimension, LatticeSpec, WaveFunction};
use crate::operator::{StepOperator, WalkOperator};
use crate::params::WalkParams;
use crate::spectral::EigenPair;

/// Per-site probabilities. `ground[s] + excited[s]` is the total at site `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    pub lattice: LatticeSpec,
    pub ground: Vec<f64>,
    pub excited: Vec<f64>,
}

impl Density {
    pub fn total(&self) -> Vec<f64> {
        self.ground.iter().zip(&self.excited).map(|(g, e)| g + e).collect()
    }

    pub fn sum(&self) -> f64 {
        self.ground.iter().sum::<f64>() + self.excited.iter().sum::<f64>()
    }
}

/// `P(x) = sum_m |psi_m(x)|^2`, split into the ground and excited halves.
pub fn probability_density(state: &WaveFunction) -> Density {
    let lattice = *state.lattice();
    let d = lattice.internal_dim();
    let half = d / 2;
    let (ground, excited) = state
        .amplitudes()
        .chunks_exact(d)
        .map(|site| {
            let g: f64 = site[..half].iter().map(|a| a.norm_sqr()).sum();
            let e: f64 = site[half..].iter().map(|a| a.norm_sqr()).sum();
            (g, e)
        })
        .unzip();
    Density {
        lattice,
        ground,
        excited,
    }
}

/// `P(x) / sum_x P(x)`.
pub fn normalized_density(state: &WaveFunction) -> Result<Vec<f64>> {
    normalize(probability_density(state).total())
}

fn normalize(mut p: Vec<f64>) -> Result<Vec<f64>> {
    let total: f64 = p.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::ZeroProbability);
    }
    p.iter_mut().for_each(|v| *v /= total);
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub std_dev: f64,
}

/// First moment and root of the second central moment of a normalized
/// weight sequence over plain integer coordinates.
pub fn mean_and_stddev(coords: &[i64], density: &[f64]) -> Moments {
    let mean: f64 = coords.iter().zip(density).map(|(&x, p)| x as f64 * p).sum();
    let var: f64 = coords
        .iter()
        .zip(density)
        .map(|(&x, p)| (x as f64 - mean).powi(2) * p)
        .sum();
    Moments {
        mean,
        std_dev: var.max(0.0).sqrt(),
    }
}

/// Marginals of a per-site density along x and y.
pub fn marginals(lattice: &LatticeSpec, per_site: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (lx, ly) = (lattice.extent_x(), lattice.extent_y());
    let mut mx = vec![0.0; lx];
    let mut my = vec![0.0; ly];
    for (s, p) in per_site.iter().enumerate() {
        mx[s % lx] += p;
        my[s / lx] += p;
    }
    (mx, my)
}

/// Moments along x, and along y for a square lattice.
pub fn axis_moments(lattice: &LatticeSpec, normalized: &[f64]) -> (Moments, Option<Moments>) {
    let (mx, my) = marginals(lattice, normalized);
    let xs: Vec<i64> = lattice.x_coords().collect();
    let x = mean_and_stddev(&xs, &mx);
    let y = (lattice.dimension() == Dimension::Two).then(|| {
        let ys: Vec<i64> = lattice.y_coords().collect();
        mean_and_stddev(&ys, &my)
    });
    (x, y)
}

/// Weight of `density` on sites with `lo <= x <= hi`.
pub fn survival_probability(lattice: &LatticeSpec, density: &[f64], region: (i64, i64)) -> Result<f64> {
    let (lo, hi) = region;
    if lo > hi {
        return Err(Error::param("survival", format!("empty region [{lo}, {hi}]")));
    }
    if lo < -lattice.half_x() || hi > lattice.half_x() {
        return Err(Error::param(
            "survival",
            format!("region [{lo}, {hi}] outside lattice [-{h}, {h}]", h = lattice.half_x()),
        ));
    }
    let lx = lattice.extent_x();
    Ok(density
        .iter()
        .enumerate()
        .filter(|(s, _)| {
            let x = lattice.coord_x(s % lx);
            lo <= x && x <= hi
        })
        .map(|(_, p)| p)
        .sum())
}

/// Statistics of one level within a 1D record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorStats {
    /// Share of the total probability held by the sector.
    pub weight: f64,
    /// Moments of the sector marginal renormalized within the sector; `None`
    /// when the sector is empty.
    pub moments: Option<Moments>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableRecord {
    pub step: usize,
    pub total_probability: f64,
    pub x: Moments,
    pub y: Option<Moments>,
    pub survival: Option<f64>,
    pub survival_unnormalized: Option<f64>,
    pub ground: Option<SectorStats>,
    pub excited: Option<SectorStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensitySnapshot {
    pub step: usize,
    pub density: Density,
}

fn sector(lattice: &LatticeSpec, part: &[f64], total: f64) -> SectorStats {
    let sum: f64 = part.iter().sum();
    let moments = (sum > 0.0).then(|| {
        let xs: Vec<i64> = lattice.x_coords().collect();
        let p: Vec<f64> = part.iter().map(|v| v / sum).collect();
        mean_and_stddev(&xs, &p)
    });
    SectorStats {
        weight: sum / total,
        moments,
    }
}

/// Observables of one state.
pub fn record_state(state: &WaveFunction, step: usize, region: Option<(i64, i64)>) -> Result<ObservableRecord> {
    let lattice = *state.lattice();
    let density = probability_density(state);
    let total_per_site = density.total();
    let total_probability: f64 = total_per_site.iter().sum();
    let normalized = normalize(total_per_site.clone())?;
    let (x, y) = axis_moments(&lattice, &normalized);
    let survival = region
        .map(|r| survival_probability(&lattice, &normalized, r))
        .transpose()?;
    let survival_unnormalized = region
        .map(|r| survival_probability(&lattice, &total_per_site, r))
        .transpose()?;
    let line = lattice.dimension() == Dimension::One;
    Ok(ObservableRecord {
        step,
        total_probability,
        x,
        y,
        survival,
        survival_unnormalized,
        ground: line.then(|| sector(&lattice, &density.ground, total_probability)),
        excited: line.then(|| sector(&lattice, &density.excited, total_probability)),
    })
}

/// Share of the normalized density within `margin` sites of a lattice edge.
pub fn edge_weight(lattice: &LatticeSpec, normalized: &[f64], margin: i64) -> f64 {
    let lx = lattice.extent_x();
    let near = |c: i64, half: i64| c.abs() > half - margin;
    normalized
        .iter()
        .enumerate()
        .filter(|(s, _)| {
            let (ix, iy) = (s % lx, s / lx);
            near(lattice.coord_x(ix), lattice.half_x())
                || (lattice.dimension() == Dimension::Two && near(lattice.coord_y(iy), lattice.half_y()))
        })
        .map(|(_, p)| p)
        .sum()
}

#[derive(Debug, Clone, Default)]
pub struct RecordOptions {
    pub steps: usize,
    pub snapshot_steps: BTreeSet<usize>,
    pub survival_region: Option<(i64, i64)>,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub records: Vec<ObservableRecord>,
    pub snapshots: Vec<DensitySnapshot>,
    pub final_state: WaveFunction,
    pub warnings: Vec<String>,
}

/// Apply `U(g)` `opts.steps` times, recording every step from `T = 0`.
pub fn evolve_and_record(initial: &WaveFunction, params: &WalkParams, opts: &RecordOptions) -> Result<Evolution> {
    let op = WalkOperator::new(params, *initial.lattice())?;
    evolve_with(&op, initial, opts)
}

pub fn evolve_with(op: &WalkOperator, initial: &WaveFunction, opts: &RecordOptions) -> Result<Evolution> {
    op.lattice().ensure_same(initial.lattice())?;
    let lattice = *initial.lattice();
    let mut state = initial.clone();
    let mut next = WaveFunction::zeros(lattice);
    let mut records = Vec::with_capacity(opts.steps + 1);
    let mut snapshots = Vec::new();
    let mut warnings = Vec::new();
    let mut wrap_warned = false;
    for step in 0..=opts.steps {
        if step > 0 {
            op.apply_into(state.amplitudes(), next.amplitudes_mut());
            std::mem::swap(&mut state, &mut next);
            if !state.is_finite() {
                return Err(Error::NonFinite { step });
            }
        }
        let record = record_state(&state, step, opts.survival_region).map_err(|e| match e {
            Error::ZeroProbability => Error::NonFinite { step },
            other => other,
        })?;
        records.push(record);
        if opts.snapshot_steps.contains(&step) {
            snapshots.push(DensitySnapshot {
                step,
                density: probability_density(&state),
            });
        }
        if !wrap_warned {
            let p = normalized_density(&state)?;
            let w = edge_weight(&lattice, &p, 2);
            if w > 0.01 {
                warnings.push(format!(
                    "step {step}: {:.2}% of the probability lies within 2 sites of the boundary; moments ignore wrap-around",
                    100.0 * w
                ));
                wrap_warned = true;
            }
        }
    }
    Ok(Evolution {
        records,
        snapshots,
        final_state: state,
        warnings,
    })
}

/// Right eigenvector shifted by `delta_x` sites and normalized.
pub fn prepare_initial_1d(pair: &EigenPair, delta_x: i64) -> Result<WaveFunction> {
    pair.right_vector.lattice().ensure_dimension(Dimension::One)?;
    pair.right_vector.translate(delta_x, 0)?.normalized()
}

/// Right eigenvector shifted by `delta`, given the phase `e^{i k.r}` and
/// normalized.
pub fn prepare_initial_2d(pair: &EigenPair, delta: (i64, i64), k: (f64, f64)) -> Result<WaveFunction> {
    pair.right_vector.lattice().ensure_dimension(Dimension::Two)?;
    pair.right_vector
        .translate(delta.0, delta.1)?
        .apply_plane_wave(k.0, k.1)?
        .normalized()
}
