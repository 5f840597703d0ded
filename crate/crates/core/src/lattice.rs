//! Lattice geometry, internal-state indexing and wavefunction storage.
//!
//! Sites carry signed integer coordinates centred on zero: an extent `L`
//! (odd, at least 3) covers `-(L-1)/2 ..= (L-1)/2`. Both axes are periodic.
//! Amplitudes are stored site-major, `x` fastest, then `y`, with the internal
//! index innermost.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Horizontal direction state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Horizontal {
    Left,
    Right,
}

/// Vertical direction state (two-dimensional walks only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertical {
    Down,
    Up,
}

/// Internal energy level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Ground,
    Excited,
}

/// One internal basis state. `vertical` is `None` in one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InternalState {
    pub horizontal: Horizontal,
    pub vertical: Option<Vertical>,
    pub level: Level,
}

impl InternalState {
    pub fn line(horizontal: Horizontal, level: Level) -> Self {
        InternalState {
            horizontal,
            vertical: None,
            level,
        }
    }

    pub fn square(horizontal: Horizontal, vertical: Vertical, level: Level) -> Self {
        InternalState {
            horizontal,
            vertical: Some(vertical),
            level,
        }
    }

    /// Index into the internal basis.
    ///
    /// 1D order is `LG, RG, LE, RE`; 2D order is
    /// `LDG, RDG, LUG, RUG, LDE, RDE, LUE, RUE`.
    pub fn index(&self) -> usize {
        let lr = (self.horizontal == Horizontal::Right) as usize;
        let ge = (self.level == Level::Excited) as usize;
        match self.vertical {
            None => 2 * ge + lr,
            Some(v) => 4 * ge + 2 * (v == Vertical::Up) as usize + lr,
        }
    }

    pub fn from_index(dimension: Dimension, index: usize) -> Option<Self> {
        if index >= dimension.internal_dim() {
            return None;
        }
        let horizontal = if index & 1 == 0 {
            Horizontal::Left
        } else {
            Horizontal::Right
        };
        let half = dimension.internal_dim() / 2;
        let level = if index < half {
            Level::Ground
        } else {
            Level::Excited
        };
        let vertical = match dimension {
            Dimension::One => None,
            Dimension::Two => Some(if index & 2 == 0 {
                Vertical::Down
            } else {
                Vertical::Up
            }),
        };
        Some(InternalState {
            horizontal,
            vertical,
            level,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimension {
    One,
    Two,
}

impl Dimension {
    pub fn internal_dim(self) -> usize {
        match self {
            Dimension::One => 4,
            Dimension::Two => 8,
        }
    }

    pub fn as_number(self) -> u8 {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
        }
    }
}

/// Periodic lattice with unit spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpec {
    dimension: Dimension,
    extent_x: usize,
    extent_y: usize,
}

fn check_extent(name: &str, extent: usize) -> Result<()> {
    if extent < 3 || extent % 2 == 0 {
        return Err(Error::InvalidLattice(format!(
            "{name} must be odd and at least 3, got {extent}"
        )));
    }
    Ok(())
}

impl LatticeSpec {
    pub fn line(extent_x: usize) -> Result<Self> {
        check_extent("extent_x", extent_x)?;
        Ok(LatticeSpec {
            dimension: Dimension::One,
            extent_x,
            extent_y: 1,
        })
    }

    pub fn square(extent_x: usize, extent_y: usize) -> Result<Self> {
        check_extent("extent_x", extent_x)?;
        check_extent("extent_y", extent_y)?;
        Ok(LatticeSpec {
            dimension: Dimension::Two,
            extent_x,
            extent_y,
        })
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn extent_x(&self) -> usize {
        self.extent_x
    }

    /// 1 for a one-dimensional lattice.
    pub fn extent_y(&self) -> usize {
        self.extent_y
    }

    pub fn internal_dim(&self) -> usize {
        self.dimension.internal_dim()
    }

    pub fn num_sites(&self) -> usize {
        self.extent_x * self.extent_y
    }

    /// Total number of complex amplitudes.
    pub fn state_len(&self) -> usize {
        self.num_sites() * self.internal_dim()
    }

    /// Largest coordinate along x; the axis covers `-half ..= half`.
    pub fn half_x(&self) -> i64 {
        (self.extent_x as i64 - 1) / 2
    }

    pub fn half_y(&self) -> i64 {
        (self.extent_y as i64 - 1) / 2
    }

    pub fn coord_x(&self, ix: usize) -> i64 {
        ix as i64 - self.half_x()
    }

    pub fn coord_y(&self, iy: usize) -> i64 {
        iy as i64 - self.half_y()
    }

    pub fn index_x(&self, x: i64) -> Option<usize> {
        let ix = x + self.half_x();
        (0..self.extent_x as i64).contains(&ix).then_some(ix as usize)
    }

    pub fn index_y(&self, y: i64) -> Option<usize> {
        let iy = y + self.half_y();
        (0..self.extent_y as i64).contains(&iy).then_some(iy as usize)
    }

    pub fn site(&self, ix: usize, iy: usize) -> usize {
        iy * self.extent_x + ix
    }

    /// Site index of coordinates `(x, y)`; `y` is ignored in 1D.
    pub fn site_at(&self, x: i64, y: i64) -> Option<usize> {
        let ix = self.index_x(x)?;
        let iy = match self.dimension {
            Dimension::One => 0,
            Dimension::Two => self.index_y(y)?,
        };
        Some(self.site(ix, iy))
    }

    pub fn site_coords(&self, site: usize) -> (i64, i64) {
        let ix = site % self.extent_x;
        let iy = site / self.extent_x;
        (self.coord_x(ix), self.coord_y(iy))
    }

    pub fn x_coords(&self) -> impl Iterator<Item = i64> {
        let h = self.half_x();
        -h..=h
    }

    pub fn y_coords(&self) -> impl Iterator<Item = i64> {
        let h = self.half_y();
        -h..=h
    }

    pub(crate) fn ensure_same(&self, other: &LatticeSpec) -> Result<()> {
        if self != other {
            return Err(Error::LatticeMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }

    pub(crate) fn ensure_dimension(&self, dimension: Dimension) -> Result<()> {
        if self.dimension != dimension {
            return Err(Error::LatticeMismatch(format!(
                "expected a {}D lattice, got {}D",
                dimension.as_number(),
                self.dimension.as_number()
            )));
        }
        Ok(())
    }
}

/// Walker state: a dense complex amplitude array over (site, internal state).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    lattice: LatticeSpec,
    amplitudes: Vec<Complex64>,
}

impl WaveFunction {
    pub fn zeros(lattice: LatticeSpec) -> Self {
        WaveFunction {
            amplitudes: vec![Complex64::new(0.0, 0.0); lattice.state_len()],
            lattice,
        }
    }

    pub fn from_amplitudes(lattice: LatticeSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != lattice.state_len() {
            return Err(Error::LatticeMismatch(format!(
                "expected {} amplitudes, got {}",
                lattice.state_len(),
                amplitudes.len()
            )));
        }
        Ok(WaveFunction {
            lattice,
            amplitudes,
        })
    }

    /// Unit amplitude on a single (site, internal state).
    pub fn localized(lattice: LatticeSpec, x: i64, y: i64, state: InternalState) -> Result<Self> {
        if state.vertical.is_some() != (lattice.dimension() == Dimension::Two) {
            return Err(Error::LatticeMismatch(
                "internal state does not match lattice dimension".into(),
            ));
        }
        let site = lattice
            .site_at(x, y)
            .ok_or_else(|| Error::InvalidLattice(format!("site ({x}, {y}) is outside the lattice")))?;
        let mut psi = WaveFunction::zeros(lattice);
        psi.amplitudes[site * lattice.internal_dim() + state.index()] = Complex64::new(1.0, 0.0);
        Ok(psi)
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, site: usize, internal: usize) -> Complex64 {
        self.amplitudes[site * self.lattice.internal_dim() + internal]
    }

    /// Amplitudes of one site.
    pub fn site(&self, site: usize) -> &[Complex64] {
        let d = self.lattice.internal_dim();
        &self.amplitudes[site * d..(site + 1) * d]
    }

    /// `sum |psi|^2` over all sites and internal states.
    pub fn total_norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        self.lattice.ensure_same(&other.lattice)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amplitudes.iter_mut().for_each(|a| *a *= factor);
    }

    /// Rescale to unit norm.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.total_norm_sq().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroProbability);
        }
        self.scale(Complex64::new(1.0 / n, 0.0));
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Move the amplitudes by `(dx, dy)` sites with periodic wrap.
    ///
    /// `dy` must be zero in one dimension. Offsets must be smaller than the
    /// extent on each axis.
    pub fn translate(&self, dx: i64, dy: i64) -> Result<WaveFunction> {
        let lat = self.lattice;
        if dx.unsigned_abs() >= lat.extent_x() as u64 {
            return Err(Error::OffsetOutOfRange {
                offset: dx,
                extent: lat.extent_x(),
            });
        }
        if dy.unsigned_abs() >= lat.extent_y().max(2) as u64
            || (lat.dimension() == Dimension::One && dy != 0)
        {
            return Err(Error::OffsetOutOfRange {
                offset: dy,
                extent: lat.extent_y(),
            });
        }
        let (lx, ly) = (lat.extent_x() as i64, lat.extent_y() as i64);
        let d = lat.internal_dim();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for iy in 0..ly {
            let ty = (iy + dy).rem_euclid(ly);
            for ix in 0..lx {
                let tx = (ix + dx).rem_euclid(lx);
                let src = (iy * lx + ix) as usize * d;
                let dst = (ty * lx + tx) as usize * d;
                out[dst..dst + d].copy_from_slice(&self.amplitudes[src..src + d]);
            }
        }
        Ok(WaveFunction {
            lattice: lat,
            amplitudes: out,
        })
    }

    /// Multiply the amplitude at `(x, y)` by `exp(i (kx x + ky y))`.
    pub fn apply_plane_wave(&self, kx: f64, ky: f64) -> Result<WaveFunction> {
        self.lattice.ensure_dimension(Dimension::Two)?;
        let lat = self.lattice;
        let d = lat.internal_dim();
        let mut out = self.clone();
        for site in 0..lat.num_sites() {
            let (x, y) = lat.site_coords(site);
            let phase = Complex64::from_polar(1.0, kx * x as f64 + ky * y as f64);
            out.amplitudes[site * d..(site + 1) * d]
                .iter_mut()
                .for_each(|a| *a *= phase);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn extents_must_be_odd_and_at_least_three() {
        assert!(LatticeSpec::line(400).is_err());
        assert!(LatticeSpec::line(1).is_err());
        assert!(LatticeSpec::square(5, 4).is_err());
        let lat = LatticeSpec::line(401).unwrap();
        assert_eq!(lat.half_x(), 200);
        assert_eq!(lat.index_x(-200), Some(0));
        assert_eq!(lat.index_x(201), None);
    }

    #[test]
    fn internal_index_layout() {
        use Horizontal::*;
        use Level::*;
        use Vertical::*;
        assert_eq!(InternalState::line(Left, Ground).index(), 0);
        assert_eq!(InternalState::line(Right, Excited).index(), 3);
        assert_eq!(InternalState::square(Right, Down, Ground).index(), 1);
        assert_eq!(InternalState::square(Left, Up, Ground).index(), 2);
        assert_eq!(InternalState::square(Left, Down, Excited).index(), 4);
        assert_eq!(InternalState::square(Right, Up, Excited).index(), 7);
        for dim in [Dimension::One, Dimension::Two] {
            for i in 0..dim.internal_dim() {
                let s = InternalState::from_index(dim, i).unwrap();
                assert_eq!(s.index(), i);
                assert_eq!(s.level == Level::Ground, i < dim.internal_dim() / 2);
            }
            assert!(InternalState::from_index(dim, dim.internal_dim()).is_none());
        }
    }

    #[test]
    fn norm_examples() {
        let lat = LatticeSpec::line(3).unwrap();
        let mut psi = WaveFunction::zeros(lat);
        assert_eq!(psi.total_norm_sq(), 0.0);
        psi.amplitudes_mut()[5] = c(1.0, 0.0);
        assert_eq!(psi.total_norm_sq(), 1.0);
        psi.amplitudes_mut()[5] = c(0.6, 0.0);
        psi.amplitudes_mut()[9] = c(0.0, 0.8);
        assert!((psi.total_norm_sq() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn translate_moves_support() {
        let lat = LatticeSpec::line(401).unwrap();
        let mut amps = vec![c(0.0, 0.0); lat.state_len()];
        for x in -80..=0 {
            let s = lat.site_at(x, 0).unwrap();
            amps[s * 4 + 2] = c(1.0, 0.5);
        }
        let psi = WaveFunction::from_amplitudes(lat, amps).unwrap();
        let moved = psi.translate(19, 0).unwrap();
        let support: Vec<i64> = (0..lat.num_sites())
            .filter(|&s| moved.site(s).iter().any(|a| a.norm() > 0.0))
            .map(|s| lat.site_coords(s).0)
            .collect();
        assert_eq!(support.first(), Some(&-61));
        assert_eq!(support.last(), Some(&19));
        assert_eq!(psi.translate(0, 0).unwrap(), psi);
        assert_eq!(psi.translate(5, 0).unwrap().translate(-5, 0).unwrap(), psi);
    }

    #[test]
    fn translate_rejects_large_offsets() {
        let lat = LatticeSpec::square(5, 7).unwrap();
        let psi = WaveFunction::zeros(lat);
        assert!(matches!(
            psi.translate(5, 0),
            Err(Error::OffsetOutOfRange { offset: 5, extent: 5 })
        ));
        assert!(psi.translate(-4, 6).is_ok());
        assert!(psi.translate(0, -7).is_err());
        let line = WaveFunction::zeros(LatticeSpec::line(5).unwrap());
        assert!(line.translate(0, 1).is_err());
    }

    #[test]
    fn plane_wave_checkerboard() {
        let lat = LatticeSpec::square(5, 5).unwrap();
        let amps = (0..lat.state_len())
            .map(|i| c(1.0 + i as f64 * 0.01, -0.5))
            .collect();
        let psi = WaveFunction::from_amplitudes(lat, amps).unwrap();
        assert_eq!(psi.apply_plane_wave(0.0, 0.0).unwrap(), psi);
        let out = psi.apply_plane_wave(0.0, std::f64::consts::PI).unwrap();
        for site in 0..lat.num_sites() {
            let (_, y) = lat.site_coords(site);
            let sign = if y.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            for m in 0..8 {
                let want = psi.amplitude(site, m) * sign;
                assert!((out.amplitude(site, m) - want).norm() < 1e-14);
            }
        }
        assert!(WaveFunction::zeros(LatticeSpec::line(5).unwrap())
            .apply_plane_wave(0.0, 1.0)
            .is_err());
    }
}
