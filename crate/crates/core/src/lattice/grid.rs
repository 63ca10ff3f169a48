use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic tensor grid: `points` sites per axis on `[-L, L)`, one
/// axis per particle.
///
/// Sites are stored row-major with the first particle (the electron `x`) as
/// the slow index. The momentum lattice uses standard FFT ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    particles: usize,
    points: usize,
    half_extent: f64,
}

impl GridSpec {
    pub const DIMS_PER_PARTICLE: usize = 1;

    pub fn new(particles: usize, points: usize, half_extent: f64) -> Result<Self> {
        if !(1..=2).contains(&particles) {
            return Err(Error::InvalidGrid(format!(
                "particles must be 1 or 2, got {particles}"
            )));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {points}"
            )));
        }
        if !(half_extent > 0.0 && half_extent.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "half extent must be positive, got {half_extent}"
            )));
        }
        Ok(Self {
            particles,
            points,
            half_extent,
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dims_per_particle(&self) -> usize {
        Self::DIMS_PER_PARTICLE
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    /// Total number of sites.
    pub fn len(&self) -> usize {
        self.points.pow(self.particles as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.points as f64
    }

    pub fn momentum_spacing(&self) -> f64 {
        PI / self.half_extent
    }

    /// Largest representable momentum magnitude, `pi / dx`.
    pub fn momentum_cutoff(&self) -> f64 {
        PI / self.spacing()
    }

    /// Measure of one lattice cell, `dx^particles`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.particles as i32)
    }

    pub fn position(&self, j: usize) -> f64 {
        -self.half_extent + j as f64 * self.spacing()
    }

    pub fn momentum(&self, j: usize) -> f64 {
        let n = self.points as isize;
        let j = j as isize;
        let m = if j < n / 2 { j } else { j - n };
        m as f64 * self.momentum_spacing()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.position(j)).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.momentum(j)).collect()
    }

    /// Per-axis indices of the flat site index.
    pub fn unravel(&self, index: usize) -> [usize; 2] {
        if self.particles == 1 {
            [index, 0]
        } else {
            [index / self.points, index % self.points]
        }
    }

    /// Position coordinates of a site; the second entry is unused on 1-particle grids.
    pub fn site(&self, index: usize) -> [f64; 2] {
        let [i, j] = self.unravel(index);
        [self.position(i), self.position(j)]
    }

    pub fn site_momentum(&self, index: usize) -> [f64; 2] {
        let [i, j] = self.unravel(index);
        [self.momentum(i), self.momentum(j)]
    }

    /// Wrap a coordinate difference into `[-L, L)` (minimal image).
    pub fn wrap(&self, u: f64) -> f64 {
        let period = 2.0 * self.half_extent;
        let w = (u + self.half_extent).rem_euclid(period) - self.half_extent;
        if w >= self.half_extent {
            w - period
        } else {
            w
        }
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    pub fn ensure_particles(&self, particles: usize) -> Result<()> {
        if self.particles == particles {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "expected a {particles}-particle grid, got {}",
                self.particles
            )))
        }
    }
}

/// Shorthand for [`GridSpec::new`].
pub fn make_grid(particles: usize, points: usize, half_extent: f64) -> Result<GridSpec> {
    GridSpec::new(particles, points, half_extent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_lattice_of_small_grid() {
        let g = make_grid(1, 8, 4.0).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert!((g.momentum_spacing() - PI / 4.0).abs() < 1e-15);
        assert_eq!(g.positions()[0], -4.0);
        assert_eq!(g.positions()[7], 3.0);
        let k = g.momenta();
        assert_eq!(k[1], PI / 4.0);
        assert_eq!(k[4], -PI);
        assert_eq!(k[7], -PI / 4.0);
    }

    #[test]
    fn two_particle_site_count() {
        let g = make_grid(2, 64, 16.0).unwrap();
        assert_eq!(g.len(), 4096);
        assert_eq!(g.unravel(65), [1, 1]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(make_grid(1, 7, 4.0).is_err());
        assert!(make_grid(1, 4, 4.0).is_err());
        assert!(make_grid(1, 8, 0.0).is_err());
        assert!(make_grid(1, 8, -1.0).is_err());
        assert!(make_grid(3, 8, 1.0).is_err());
    }

    #[test]
    fn minimal_image() {
        let g = make_grid(1, 16, 8.0).unwrap();
        assert_eq!(g.wrap(3.0), 3.0);
        assert_eq!(g.wrap(9.0), -7.0);
        assert_eq!(g.wrap(-9.0), 7.0);
        assert_eq!(g.wrap(8.0), -8.0);
        assert_eq!(g.wrap(15.5), -0.5);
    }
}
