use num_complex::Complex64;

use super::{fft, GridSpec};
use crate::error::{Error, Result};

/// Complex amplitudes on the position lattice of a [`GridSpec`].
///
/// Inner products and norms carry the lattice measure `dx^particles`, so a
/// normalized state keeps unit norm under refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: GridSpec,
    amps: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: GridSpec, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} amplitudes for a grid of {} sites",
                amps.len(),
                grid.len()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self { grid, amps })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            amps: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Sample `f(x, y)` at every site (`y` is zero on 1-particle grids).
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Sync + Send,
    {
        let mut amps = vec![Complex64::new(0.0, 0.0); grid.len()];
        let one = grid.particles() == 1;
        crate::par::fill_indexed(&mut amps, |i| {
            let [x, y] = grid.site(i);
            f(x, if one { 0.0 } else { y })
        });
        Self { grid, amps }
    }

    /// Tensor product `fx(x) fy(y)` of two 1-particle states on matching axes.
    pub fn product(fx: &WaveFunction, fy: &WaveFunction) -> Result<Self> {
        let g = fx.grid;
        g.ensure_particles(1)?;
        g.ensure_same(&fy.grid)?;
        let grid = GridSpec::new(2, g.points(), g.half_extent())?;
        let n = g.points();
        let amps = (0..n * n)
            .map(|i| fx.amps[i / n] * fy.amps[i % n])
            .collect();
        Ok(Self { grid, amps })
    }

    /// Build a state from its momentum-space coefficients (FFT ordering).
    pub fn from_momentum(grid: GridSpec, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch("momentum coefficient count".into()));
        }
        fft::inverse(&grid, &mut coeffs);
        Ok(Self { grid, amps: coeffs })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// Unnormalized discrete Fourier coefficients.
    pub fn to_momentum(&self) -> Vec<Complex64> {
        let mut c = self.amps.clone();
        fft::forward(&self.grid, &mut c);
        c
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        debug_assert_eq!(self.grid, other.grid);
        let s: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.grid.cell_volume()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        self.amps.iter_mut().for_each(|z| *z *= c);
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.amps.iter_mut().for_each(|z| *z *= c);
        self
    }

    /// Unit-norm copy; the zero state is returned unchanged.
    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|z| *z /= n);
        }
        self
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &WaveFunction) {
        debug_assert_eq!(self.grid, other.grid);
        self.amps
            .iter_mut()
            .zip(&other.amps)
            .for_each(|(a, b)| *a += c * b);
    }

    pub fn sub(&self, other: &WaveFunction) -> WaveFunction {
        let mut d = self.clone();
        d.add_scaled(Complex64::new(-1.0, 0.0), other);
        d
    }

    /// Pointwise multiplication by a real field on the position lattice.
    pub fn multiply_field(&mut self, field: &[f64]) {
        debug_assert_eq!(field.len(), self.amps.len());
        self.amps.iter_mut().zip(field).for_each(|(z, &f)| *z *= f);
    }

    /// Project out the span of `basis` (assumed orthonormal).
    pub fn project_out(&mut self, basis: &[WaveFunction]) {
        for b in basis {
            let c = b.inner(self);
            self.add_scaled(-c, b);
        }
    }

    /// Fraction of `|psi|^2` at sites where some coordinate satisfies `|x| > frac * L`.
    pub fn mass_outside(&self, frac: f64) -> f64 {
        let total: f64 = self.amps.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let cut = frac * self.grid.half_extent();
        let one = self.grid.particles() == 1;
        let outside: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let [x, y] = self.grid.site(*i);
                x.abs() > cut || (!one && y.abs() > cut)
            })
            .map(|(_, z)| z.norm_sqr())
            .sum();
        outside / total
    }

    /// Expectation of the position along one axis, normalized by the norm.
    pub fn mean_position(&self, axis: usize) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, z) in self.amps.iter().enumerate() {
            let r = self.grid.site(i)[axis];
            num += r * z.norm_sqr();
            den += z.norm_sqr();
        }
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: GridSpec) -> WaveFunction {
        WaveFunction::from_fn(grid, |x, y| {
            Complex64::from_polar((-(x * x + y * y) / 2.0).exp(), 0.3 * x - 0.2 * y)
        })
    }

    #[test]
    fn norm_uses_lattice_measure() {
        // pi^{-1/4} e^{-x^2/2} has unit L2 norm on the line
        for n in [64, 128, 256] {
            let g = GridSpec::new(1, n, 10.0).unwrap();
            let psi = WaveFunction::from_fn(g, |x, _| {
                Complex64::new(std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp(), 0.0)
            });
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn momentum_round_trip() {
        let g = GridSpec::new(2, 32, 6.0).unwrap();
        let psi = gaussian(g);
        let back = WaveFunction::from_momentum(g, psi.to_momentum()).unwrap();
        assert!(back.sub(&psi).norm() <= 1e-12 * psi.norm());
    }

    #[test]
    fn mass_outside_counts_either_axis() {
        let g = GridSpec::new(2, 16, 8.0).unwrap();
        let psi = WaveFunction::from_fn(g, |x, _| {
            if x > 6.5 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert!((psi.mass_outside(0.8) - 1.0).abs() < 1e-15);
        let c = gaussian(g);
        assert!(c.mass_outside(0.8) < 1e-12);
    }

    #[test]
    fn rejects_wrong_length() {
        let g = GridSpec::new(1, 8, 1.0).unwrap();
        assert!(WaveFunction::new(g, vec![Complex64::new(0.0, 0.0); 7]).is_err());
    }
}
