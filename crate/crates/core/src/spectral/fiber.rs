use std::io::Write;

use nalgebra::{DMatrix, DVector};

use super::{dense_spectrum, imag_time_solve, ImagTimeOptions, DENSE_LIMIT};
use crate::commutator::continuum_edge;
use crate::error::{Error, Result};
use crate::lattice::{ClusterId, GridSpec, HamiltonianSpec, ThreeBodyModel};
use crate::par;

/// `H_a(s)` for a two-cluster decomposition.
pub fn reduced_hamiltonian(
    model: &ThreeBodyModel,
    a: ClusterId,
    s: f64,
) -> Result<HamiltonianSpec> {
    model.reduced(a, s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionSample {
    pub s: f64,
    pub lambda: f64,
    pub residual: f64,
    /// Continuum edge of the fiber.
    pub edge: f64,
    /// Too close to the continuum edge to be used in the fit.
    pub flagged: bool,
}

/// Least-squares fit `lambda(s) = c0 + c1 s + c2 s^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSummary {
    pub constant: f64,
    pub linear: f64,
    pub quadratic: f64,
    /// `lambda(0)`, or the fitted constant if `s = 0` was not scanned.
    pub lambda0: f64,
    /// `max |lambda(s) - s^2 - lambda0|` over unflagged samples.
    pub max_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct DispersionCurve {
    pub cluster: ClusterId,
    pub samples: Vec<DispersionSample>,
    pub fit: FitSummary,
    /// Dense ground energy at `s = 0` when the grid permits it.
    pub lambda0_dense: Option<f64>,
}

impl DispersionCurve {
    /// CSV with columns `s,lambda,lambda_minus_s2,residual,flagged`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "s,lambda,lambda_minus_s2,residual,flagged")?;
        for p in &self.samples {
            writeln!(
                w,
                "{:?},{:?},{:?},{:?},{}",
                p.s,
                p.lambda,
                p.lambda - p.s * p.s,
                p.residual,
                p.flagged
            )?;
        }
        Ok(())
    }
}

/// Fiber ground energies of `H_(xy)(0)(s)` along `s_values`.
///
/// A sample is flagged when its energy is within 10% of the gap
/// `edge(s) - lambda(0)` of the continuum edge.
pub fn dispersion_scan(
    model: &ThreeBodyModel,
    s_values: &[f64],
    grid: &GridSpec,
    tol: f64,
) -> Result<DispersionCurve> {
    let a = ClusterId::Pair;
    grid.ensure_particles(1)?;
    if s_values.is_empty() {
        return Err(Error::InvalidParameter("no fiber momenta to scan".into()));
    }
    let solved = par::try_map_range(s_values.len(), |i| {
        let h = reduced_hamiltonian(model, a, s_values[i])?;
        let r = imag_time_solve(
            &h,
            grid,
            &ImagTimeOptions {
                tol,
                ..Default::default()
            },
        )?;
        Ok::<_, Error>((r.eigenvalues[0], r.residuals[0]))
    })?;

    let lambda0_dense = if grid.len() <= DENSE_LIMIT {
        Some(dense_spectrum(&reduced_hamiltonian(model, a, 0.0)?, grid, 1)?.eigenvalues[0])
    } else {
        None
    };
    let at_zero = s_values.iter().position(|&s| s == 0.0).map(|i| solved[i].0);
    let reference =
        at_zero.unwrap_or_else(|| solved.iter().map(|p| p.0).fold(f64::INFINITY, f64::min));

    let samples: Vec<DispersionSample> = s_values
        .iter()
        .zip(&solved)
        .map(|(&s, &(lambda, residual))| {
            let edge = continuum_edge(s);
            let guard = edge - 0.1 * (edge - reference).abs();
            DispersionSample {
                s,
                lambda,
                residual,
                edge,
                flagged: lambda >= guard,
            }
        })
        .collect();

    let used: Vec<&DispersionSample> = samples.iter().filter(|p| !p.flagged).collect();
    let (constant, linear, quadratic) = fit_quadratic(&used);
    let lambda0 = at_zero.unwrap_or(constant);
    let max_deviation = used
        .iter()
        .map(|p| (p.lambda - p.s * p.s - lambda0).abs())
        .fold(0.0, f64::max);
    Ok(DispersionCurve {
        cluster: a,
        samples,
        fit: FitSummary {
            constant,
            linear,
            quadratic,
            lambda0,
            max_deviation,
        },
        lambda0_dense,
    })
}

fn fit_quadratic(points: &[&DispersionSample]) -> (f64, f64, f64) {
    if points.len() < 3 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let a = DMatrix::from_fn(points.len(), 3, |i, j| points[i].s.powi(j as i32));
    let b = DVector::from_iterator(points.len(), points.iter().map(|p| p.lambda));
    let svd = a.svd(true, true);
    match svd.solve(&b, 1e-14) {
        Ok(c) => (c[0], c[1], c[2]),
        Err(_) => (f64::NAN, f64::NAN, f64::NAN),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_a_parabola() {
        let pts: Vec<DispersionSample> = [-0.2, -0.1, 0.0, 0.1, 0.2]
            .iter()
            .map(|&s| DispersionSample {
                s,
                lambda: -0.5 + 0.01 * s + s * s,
                residual: 0.0,
                edge: 0.0,
                flagged: false,
            })
            .collect();
        let refs: Vec<&DispersionSample> = pts.iter().collect();
        let (c0, c1, c2) = fit_quadratic(&refs);
        assert!((c0 + 0.5).abs() < 1e-12 && (c1 - 0.01).abs() < 1e-12 && (c2 - 1.0).abs() < 1e-10);
    }
}
