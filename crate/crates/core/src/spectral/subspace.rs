use num_complex::Complex64;

use super::ritz::{orthonormalize, rayleigh_ritz};
use super::{EigenMethod, EigenResult};
use crate::error::{Error, Result};
use crate::lattice::{DiscreteHamiltonian, GridSpec, HamiltonianSpec, WaveFunction};
use crate::{par, random};

#[derive(Debug, Clone)]
pub struct SubspaceOptions {
    /// Number of wanted eigenpairs.
    pub count: usize,
    /// Guard vectors carried along to speed up convergence of the last pair.
    pub guard: usize,
    pub degree: usize,
    pub tol: f64,
    pub max_iterations: usize,
    /// Only pairs strictly below this energy are returned.
    pub cutoff: Option<f64>,
    pub deflate: Vec<WaveFunction>,
    /// Width of the Gaussian envelope of the random start block.
    pub start_width: f64,
    pub seed: u64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        Self {
            count: 1,
            guard: 4,
            degree: 24,
            tol: 1e-8,
            max_iterations: 200,
            cutoff: None,
            deflate: Vec::new(),
            start_width: f64::NAN,
            seed: 0,
        }
    }
}

/// Scaled Chebyshev filter damping `[a, b]`; `lo` is a lower spectral bound.
fn chebyshev_filter(
    op: &DiscreteHamiltonian,
    x: &WaveFunction,
    degree: usize,
    a: f64,
    b: f64,
    lo: f64,
) -> Result<WaveFunction> {
    let e = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    let mut sigma = e / (lo - c);
    let sigma1 = sigma;
    let shift = |v: &WaveFunction| -> Result<WaveFunction> {
        let mut hv = op.apply(v)?;
        hv.add_scaled(Complex64::new(-c, 0.0), v);
        Ok(hv)
    };
    let mut prev = x.clone();
    let mut cur = shift(x)?.scaled(sigma1 / e);
    for _ in 1..degree {
        let sigma2 = 1.0 / (2.0 / sigma1 - sigma);
        let mut next = shift(&cur)?.scaled(2.0 * sigma2 / e);
        next.add_scaled(Complex64::new(-sigma * sigma2, 0.0), &prev);
        prev = cur;
        cur = next;
        sigma = sigma2;
    }
    Ok(cur)
}

/// Chebyshev-filtered subspace iteration for the lowest eigenpairs.
pub fn subspace_iteration(
    h: &HamiltonianSpec,
    grid: &GridSpec,
    opts: &SubspaceOptions,
) -> Result<EigenResult> {
    if opts.count == 0 {
        return Err(Error::InvalidParameter(
            "subspace count must be positive".into(),
        ));
    }
    let op = h.discretize(grid)?;
    let (lo, hi) = op.spectral_bounds();
    let width = if opts.start_width.is_finite() {
        opts.start_width
    } else {
        grid.half_extent() / 4.0
    };
    let m = opts.count + opts.guard;
    let start: Vec<WaveFunction> = (0..m)
        .map(|i| {
            let mut rng = random::rng_for(opts.seed, &format!("subspace/{i}"));
            random::enveloped_noise(grid, width, &mut rng)
        })
        .collect();
    let mut basis = orthonormalize(start, &opts.deflate, 1e-10);
    let mut ritz = rayleigh_ritz(&op, &basis)?;
    let mut best = f64::INFINITY;

    for _ in 0..opts.max_iterations {
        let wanted = opts.count.min(ritz.values.len());
        let residuals: Vec<f64> = (0..wanted)
            .map(|k| {
                let mut r = ritz.applied[k].clone();
                r.add_scaled(Complex64::new(-ritz.values[k], 0.0), &ritz.vectors[k]);
                r.norm()
            })
            .collect();
        let keep: Vec<usize> = (0..wanted)
            .filter(|&k| opts.cutoff.is_none_or(|c| ritz.values[k] < c))
            .collect();
        let worst = residuals
            .iter()
            .zip(&ritz.values)
            .enumerate()
            .filter(|(k, _)| {
                opts.cutoff
                    .is_none_or(|c| ritz.values[*k] < c + 0.05 * (1.0 + c.abs()))
            })
            .map(|(_, (r, l))| r / (1.0 + l.abs()))
            .fold(0.0f64, f64::max);
        best = best.min(worst);
        if worst <= opts.tol {
            return Ok(EigenResult {
                eigenvalues: keep.iter().map(|&k| ritz.values[k]).collect(),
                eigenvectors: keep.iter().map(|&k| ritz.vectors[k].clone()).collect(),
                residuals: keep.iter().map(|&k| residuals[k]).collect(),
                method: EigenMethod::IterativeSubspace,
                tolerance: opts.tol,
            });
        }
        let a = *ritz.values.last().unwrap();
        let a = if a <= ritz.values[0] + 1e-12 {
            ritz.values[0] + 0.1 * (hi - lo)
        } else {
            a
        };
        let lower = lo.min(ritz.values[0] - 1e-3 * (hi - lo));
        let filtered = par::try_map_range(ritz.vectors.len(), |k| {
            chebyshev_filter(&op, &ritz.vectors[k], opts.degree, a, hi, lower)
        })?;
        basis = orthonormalize(filtered, &opts.deflate, 1e-12);
        if basis.is_empty() {
            break;
        }
        ritz = rayleigh_ritz(&op, &basis)?;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        residual: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_grid, CoordTag, DispersionSymbol, PotentialSpec};
    use crate::spectral::dense_spectrum;

    #[test]
    fn matches_dense_on_a_small_two_particle_grid() {
        let g = make_grid(2, 32, 12.0).unwrap();
        let h = HamiltonianSpec::new(DispersionSymbol::free_two_particle())
            .with_potential(PotentialSpec::gaussian_well(3.0, 1.5), CoordTag::X)
            .with_potential(PotentialSpec::gaussian_well(2.0, 1.5), CoordTag::XMinusY);
        let d = dense_spectrum(&h, &g, 3).unwrap();
        let opts = SubspaceOptions {
            count: 3,
            tol: 1e-9,
            ..Default::default()
        };
        let s = subspace_iteration(&h, &g, &opts).unwrap();
        for k in 0..3 {
            assert!((s.eigenvalues[k] - d.eigenvalues[k]).abs() < 1e-8, "{k}");
        }
    }
}
