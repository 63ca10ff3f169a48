use num_complex::Complex64;

use super::{fft, GridSpec, WaveFunction};
use crate::error::{Error, Result};

/// Real Fourier multiplier `m(P)` built from the model's kinetic terms.
///
/// `axis` selects the particle momentum the term acts on (0 for `p`, 1 for
/// `k`). The shifted forms carry a momentum `scale` so that a fiber grid can
/// represent a chart momentum that is a multiple of its lattice momentum.
#[derive(Debug, Clone, PartialEq)]
pub enum DispersionSymbol {
    /// `coef * P[axis]^2`
    Quadratic {
        coef: f64,
        axis: usize,
    },
    /// `coef * |P[axis]|`
    Absolute {
        coef: f64,
        axis: usize,
    },
    /// `coef * (scale * P[axis] + shift)^2`
    ShiftedQuadratic {
        coef: f64,
        scale: f64,
        shift: f64,
        axis: usize,
    },
    /// `coef * |scale * P[axis] - shift|`
    ShiftedAbsolute {
        coef: f64,
        scale: f64,
        shift: f64,
        axis: usize,
    },
    Constant(f64),
    Sum(Vec<DispersionSymbol>),
}

impl DispersionSymbol {
    pub fn quadratic(coef: f64, axis: usize) -> Self {
        Self::Quadratic { coef, axis }
    }

    pub fn absolute(coef: f64, axis: usize) -> Self {
        Self::Absolute { coef, axis }
    }

    /// The free kinetic energy `p^2 + |k|` on a 2-particle grid.
    pub fn free_two_particle() -> Self {
        Self::Sum(vec![Self::quadratic(1.0, 0), Self::absolute(1.0, 1)])
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        match self {
            Self::Quadratic { coef, axis } => coef * p[*axis] * p[*axis],
            Self::Absolute { coef, axis } => coef * p[*axis].abs(),
            Self::ShiftedQuadratic {
                coef,
                scale,
                shift,
                axis,
            } => {
                let q = scale * p[*axis] + shift;
                coef * q * q
            }
            Self::ShiftedAbsolute {
                coef,
                scale,
                shift,
                axis,
            } => coef * (scale * p[*axis] - shift).abs(),
            Self::Constant(c) => *c,
            Self::Sum(terms) => terms.iter().map(|t| t.eval(p)).sum(),
        }
    }

    /// Highest particle axis referenced, if any.
    pub fn max_axis(&self) -> Option<usize> {
        match self {
            Self::Quadratic { axis, .. }
            | Self::Absolute { axis, .. }
            | Self::ShiftedQuadratic { axis, .. }
            | Self::ShiftedAbsolute { axis, .. } => Some(*axis),
            Self::Constant(_) => None,
            Self::Sum(terms) => terms.iter().filter_map(|t| t.max_axis()).max(),
        }
    }

    /// True when `m(-P) == m(P)` for every `P`.
    pub fn is_even(&self) -> bool {
        match self {
            Self::Quadratic { .. } | Self::Absolute { .. } | Self::Constant(_) => true,
            Self::ShiftedQuadratic { shift, .. } | Self::ShiftedAbsolute { shift, .. } => {
                *shift == 0.0
            }
            Self::Sum(terms) => terms.iter().all(|t| t.is_even()),
        }
    }

    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        match self.max_axis() {
            Some(a) if a >= grid.particles() => Err(Error::GridMismatch(format!(
                "symbol acts on particle axis {a} but the grid has {} particle(s)",
                grid.particles()
            ))),
            _ => Ok(()),
        }
    }

    /// Multiplier values on the momentum lattice, FFT ordering.
    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        self.check_grid(grid)?;
        let mut out = vec![0.0; grid.len()];
        crate::par::fill_indexed(&mut out, |i| self.eval(grid.site_momentum(i)));
        Ok(out)
    }
}

/// `inverse-Fourier(m(P) * Fourier(psi))`.
pub fn apply_multiplier(psi: &WaveFunction, m: &DispersionSymbol) -> Result<WaveFunction> {
    let field = m.sample(psi.grid())?;
    Ok(apply_multiplier_field(psi, &field))
}

/// Apply a precomputed real multiplier (FFT ordering).
pub fn apply_multiplier_field(psi: &WaveFunction, field: &[f64]) -> WaveFunction {
    let grid = *psi.grid();
    let mut data = psi.amplitudes().to_vec();
    fft::apply_real_multiplier(&grid, &mut data, field);
    WaveFunction::new(grid, data).expect("multiplier preserves the grid")
}

/// Apply an arbitrary momentum-space function.
pub fn apply_multiplier_fn<F>(psi: &WaveFunction, f: F) -> WaveFunction
where
    F: Fn([f64; 2]) -> Complex64 + Sync + Send,
{
    let grid = *psi.grid();
    let mut field = vec![Complex64::new(0.0, 0.0); grid.len()];
    crate::par::fill_indexed(&mut field, |i| f(grid.site_momentum(i)));
    let mut data = psi.amplitudes().to_vec();
    fft::apply_complex_multiplier(&grid, &mut data, &field);
    WaveFunction::new(grid, data).expect("multiplier preserves the grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(grid: GridSpec, m: [i32; 2]) -> (WaveFunction, [f64; 2]) {
        let k = [
            m[0] as f64 * grid.momentum_spacing(),
            m[1] as f64 * grid.momentum_spacing(),
        ];
        let psi = WaveFunction::from_fn(grid, move |x, y| {
            Complex64::from_polar(1.0, k[0] * x + k[1] * y)
        });
        (psi, k)
    }

    #[test]
    fn identity_symbol_is_identity() {
        let g = GridSpec::new(2, 16, 5.0).unwrap();
        let psi = WaveFunction::from_fn(g, |x, y| Complex64::new((-x * x).exp(), y.sin()));
        let out = apply_multiplier(&psi, &DispersionSymbol::Constant(1.0)).unwrap();
        assert!(out.sub(&psi).norm() < 1e-12 * psi.norm());
    }

    #[test]
    fn fourier_mode_is_an_eigenvector_of_abs() {
        let g = GridSpec::new(1, 32, 8.0).unwrap();
        let (psi, k) = mode(g, [-5, 0]);
        let out = apply_multiplier(&psi, &DispersionSymbol::absolute(1.0, 0)).unwrap();
        let mut expect = psi.clone();
        expect.scale(Complex64::new(k[0].abs(), 0.0));
        assert!(out.sub(&expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn unimodular_multiplier_preserves_norm() {
        let g = GridSpec::new(2, 32, 6.0).unwrap();
        let psi = WaveFunction::from_fn(g, |x, y| {
            Complex64::new((-(x - 1.0).powi(2)).exp(), (-(y * y)).exp())
        });
        let out = apply_multiplier_fn(&psi, |p| {
            Complex64::from_polar(1.0, p[0] * p[0] - 0.3 * p[1].abs())
        });
        assert!((out.norm() - psi.norm()).abs() < 1e-12 * psi.norm());
    }

    #[test]
    fn axis_out_of_range_is_rejected() {
        let g = GridSpec::new(1, 16, 4.0).unwrap();
        let psi = WaveFunction::zeros(g);
        assert!(apply_multiplier(&psi, &DispersionSymbol::absolute(1.0, 1)).is_err());
    }

    #[test]
    fn external_momentum_of_photon_electron_cluster_is_p_plus_k() {
        // multiplying by p_a = p + k acts on a product mode as (p0 + k0)
        let g = GridSpec::new(2, 16, 4.0).unwrap();
        for m in [[1, 2], [-3, 5], [7, -7]] {
            let (psi, k) = mode(g, m);
            let out = apply_multiplier_fn(&psi, |p| Complex64::new(p[0] + p[1], 0.0));
            let mut expect = psi.clone();
            expect.scale(Complex64::new(k[0] + k[1], 0.0));
            assert!(out.sub(&expect).norm() < 1e-11 * psi.norm());
        }
    }

    #[test]
    fn shifted_symbols() {
        let s = DispersionSymbol::ShiftedQuadratic {
            coef: 0.25,
            scale: 1.0,
            shift: 0.5,
            axis: 0,
        };
        assert!((s.eval([1.5, 0.0]) - 1.0).abs() < 1e-15);
        let a = DispersionSymbol::ShiftedAbsolute {
            coef: 0.5,
            scale: 2.0,
            shift: 1.0,
            axis: 0,
        };
        assert!((a.eval([0.0, 0.0]) - 0.5).abs() < 1e-15);
        assert!(!s.is_even());
        assert!(DispersionSymbol::free_two_particle().is_even());
    }
}
