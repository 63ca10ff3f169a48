use num_complex::Complex64;

use super::{DispersionSymbol, GridSpec, PotentialSpec, WaveFunction};
use crate::error::{Error, Result};
use crate::par;

/// Which coordinate a pair potential is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoordTag {
    X,
    Y,
    /// `x - y`, minimal-image wrapped.
    XMinusY,
    /// The single coordinate of a 1-particle (fibered) grid.
    Internal,
}

impl CoordTag {
    pub fn name(self) -> &'static str {
        match self {
            CoordTag::X => "x",
            CoordTag::Y => "y",
            CoordTag::XMinusY => "x-y",
            CoordTag::Internal => "internal",
        }
    }

    pub fn check(self, grid: &GridSpec) -> Result<()> {
        let ok = match self {
            CoordTag::X => true,
            CoordTag::Y | CoordTag::XMinusY => grid.particles() == 2,
            CoordTag::Internal => grid.particles() == 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::IncompatibleTag {
                tag: self.name(),
                particles: grid.particles(),
            })
        }
    }

    /// Coordinate value at a site.
    pub fn coordinate(self, grid: &GridSpec, site: [f64; 2]) -> f64 {
        match self {
            CoordTag::X | CoordTag::Internal => site[0],
            CoordTag::Y => site[1],
            CoordTag::XMinusY => grid.wrap(site[0] - site[1]),
        }
    }
}

/// Kinetic symbol plus tagged pair potentials.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub symbol: DispersionSymbol,
    pub potentials: Vec<(PotentialSpec, CoordTag)>,
}

impl HamiltonianSpec {
    pub fn new(symbol: DispersionSymbol) -> Self {
        Self {
            symbol,
            potentials: Vec::new(),
        }
    }

    pub fn with_potential(mut self, v: PotentialSpec, tag: CoordTag) -> Self {
        if !v.is_zero() {
            self.potentials.push((v, tag));
        }
        self
    }

    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        self.symbol.check_grid(grid)?;
        for (v, tag) in &self.potentials {
            tag.check(grid)?;
            v.check_decay(grid.half_extent())?;
        }
        Ok(())
    }

    /// Pointwise sum of `f(V, coordinate)` over the tagged potentials.
    pub fn sample_potentials<F>(&self, grid: &GridSpec, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&PotentialSpec, f64) -> f64 + Sync + Send,
    {
        for (_, tag) in &self.potentials {
            tag.check(grid)?;
        }
        let mut out = vec![0.0; grid.len()];
        par::fill_indexed(&mut out, |i| {
            let site = grid.site(i);
            self.potentials
                .iter()
                .map(|(v, tag)| f(v, tag.coordinate(grid, site)))
                .sum()
        });
        Ok(out)
    }

    pub fn potential_field(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        self.sample_potentials(grid, |v, u| v.value(u))
    }

    /// Sampled operator on a grid.
    pub fn discretize(&self, grid: &GridSpec) -> Result<DiscreteHamiltonian> {
        self.check_grid(grid)?;
        Ok(DiscreteHamiltonian {
            grid: *grid,
            kinetic: self.symbol.sample(grid)?,
            potential: self.potential_field(grid)?,
        })
    }
}

/// A Hamiltonian with its kinetic multiplier and potential sampled on a grid.
#[derive(Debug, Clone)]
pub struct DiscreteHamiltonian {
    pub grid: GridSpec,
    pub kinetic: Vec<f64>,
    pub potential: Vec<f64>,
}

impl DiscreteHamiltonian {
    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        self.grid.ensure_same(psi.grid())?;
        let mut out = super::apply_multiplier_field(psi, &self.kinetic);
        let amps = psi.amplitudes();
        for ((o, a), v) in out
            .amplitudes_mut()
            .iter_mut()
            .zip(amps)
            .zip(&self.potential)
        {
            *o += a * v;
        }
        Ok(out)
    }

    /// Rayleigh quotient `<psi, H psi> / <psi, psi>`.
    pub fn energy(&self, psi: &WaveFunction) -> Result<f64> {
        let h = self.apply(psi)?;
        Ok(psi.inner(&h).re / psi.norm_sqr())
    }

    /// Lower and upper bounds on the spectrum of the sampled operator.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let (kmin, kmax) = min_max(&self.kinetic);
        let (vmin, vmax) = min_max(&self.potential);
        (kmin + vmin, kmax + vmax)
    }

    /// `||H psi - lambda psi||`.
    pub fn residual(&self, psi: &WaveFunction, lambda: f64) -> Result<f64> {
        let mut h = self.apply(psi)?;
        h.add_scaled(Complex64::new(-lambda, 0.0), psi);
        Ok(h.norm())
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

/// `H psi` for a spec, sampling the operator on `psi`'s grid.
pub fn apply_hamiltonian(psi: &WaveFunction, h: &HamiltonianSpec) -> Result<WaveFunction> {
    h.discretize(psi.grid())?.apply(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{apply_multiplier, make_grid};

    #[test]
    fn zero_potential_is_the_multiplier() {
        let g = make_grid(2, 16, 8.0).unwrap();
        let psi = WaveFunction::from_fn(g, |x, y| {
            Complex64::new((-(x * x + y * y) / 4.0).exp(), 0.1 * x)
        });
        let h = HamiltonianSpec::new(DispersionSymbol::free_two_particle());
        let a = apply_hamiltonian(&psi, &h).unwrap();
        let b = apply_multiplier(&psi, &h.symbol).unwrap();
        assert!(a.sub(&b).norm() < 1e-14);
    }

    #[test]
    fn mode_times_symbol_plus_potential() {
        let g = make_grid(1, 64, 16.0).unwrap();
        let k0 = 3.0 * g.momentum_spacing();
        let mode = WaveFunction::from_fn(g, |x, _| Complex64::from_polar(1.0, k0 * x));
        let v = PotentialSpec::poschl_teller(2.0, 1.0);
        let h = HamiltonianSpec::new(DispersionSymbol::quadratic(1.0, 0))
            .with_potential(v.clone(), CoordTag::Internal);
        let out = apply_hamiltonian(&mode, &h).unwrap();
        for (i, (o, m)) in out.amplitudes().iter().zip(mode.amplitudes()).enumerate() {
            let x = g.position(i);
            assert!((o - m * (k0 * k0 + v.value(x))).norm() < 1e-10);
        }
    }

    #[test]
    fn tags_are_checked_against_particle_count() {
        let g1 = make_grid(1, 64, 32.0).unwrap();
        let h = HamiltonianSpec::new(DispersionSymbol::quadratic(1.0, 0))
            .with_potential(PotentialSpec::poschl_teller(2.0, 1.0), CoordTag::XMinusY);
        assert!(matches!(
            h.discretize(&g1),
            Err(Error::IncompatibleTag { tag: "x-y", .. })
        ));
        let g2 = make_grid(2, 16, 32.0).unwrap();
        let h = HamiltonianSpec::new(DispersionSymbol::quadratic(1.0, 0))
            .with_potential(PotentialSpec::poschl_teller(2.0, 1.0), CoordTag::Internal);
        assert!(h.discretize(&g2).is_err());
    }
}
