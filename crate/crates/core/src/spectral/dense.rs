use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{EigenMethod, EigenResult};
use crate::error::{Error, Result};
use crate::lattice::{GridSpec, HamiltonianSpec, WaveFunction};

/// Largest grid accepted by [`dense_spectrum`].
pub const DENSE_LIMIT: usize = 4096;

/// Lowest `count` eigenpairs of the exact lattice operator by full
/// diagonalization.
///
/// The kinetic part is a convolution, so the matrix is assembled from the
/// multiplier's kernel (the operator applied to a delta at the origin site).
pub fn dense_spectrum(h: &HamiltonianSpec, grid: &GridSpec, count: usize) -> Result<EigenResult> {
    let n = grid.len();
    if n > DENSE_LIMIT {
        return Err(Error::GridTooLarge {
            size: n,
            limit: DENSE_LIMIT,
        });
    }
    let op = h.discretize(grid)?;
    let mut delta = WaveFunction::zeros(*grid);
    delta.amplitudes_mut()[0] = Complex64::new(1.0, 0.0);
    let kernel = crate::lattice::apply_multiplier_field(&delta, &op.kinetic).into_amplitudes();

    let side = grid.points();
    let two = grid.particles() == 2;
    let offset = |i: usize, j: usize| -> usize {
        if two {
            let (i0, i1) = (i / side, i % side);
            let (j0, j1) = (j / side, j % side);
            ((i0 + side - j0) % side) * side + (i1 + side - j1) % side
        } else {
            (i + side - j) % side
        }
    };

    let scale = kernel.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let real = kernel.iter().all(|z| z.im.abs() <= 1e-13 * scale.max(1.0));
    let count = count.min(n);

    let (values, vectors): (Vec<f64>, Vec<Vec<Complex64>>) = if real {
        let m = DMatrix::<f64>::from_fn(n, n, |i, j| {
            let mut v = kernel[offset(i, j)].re;
            if i == j {
                v += op.potential[i];
            }
            v
        });
        let eig = SymmetricEigen::new(m);
        let order = ascending(eig.eigenvalues.as_slice());
        order
            .into_iter()
            .take(count)
            .map(|k| {
                let col = eig.eigenvectors.column(k);
                (
                    eig.eigenvalues[k],
                    col.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                )
            })
            .unzip()
    } else {
        let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let mut v = kernel[offset(i, j)];
            if i == j {
                v += op.potential[i];
            }
            v
        });
        let eig = SymmetricEigen::new(m);
        let order = ascending(eig.eigenvalues.as_slice());
        order
            .into_iter()
            .take(count)
            .map(|k| {
                (
                    eig.eigenvalues[k],
                    eig.eigenvectors.column(k).iter().copied().collect(),
                )
            })
            .unzip()
    };

    let w = 1.0 / grid.cell_volume().sqrt();
    let mut eigenvectors = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    for (lambda, v) in values.iter().zip(vectors) {
        let psi = WaveFunction::new(*grid, v.into_iter().map(|z| z * w).collect())?;
        residuals.push(op.residual(&psi, *lambda)?);
        eigenvectors.push(psi);
    }
    Ok(EigenResult {
        eigenvalues: values,
        eigenvectors,
        residuals,
        method: EigenMethod::Dense,
        tolerance: 1e-9,
    })
}

fn ascending(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_grid, CoordTag, DispersionSymbol, PotentialSpec};

    #[test]
    fn free_quadratic_gives_lattice_values() {
        let g = make_grid(1, 16, 4.0).unwrap();
        let h = HamiltonianSpec::new(DispersionSymbol::quadratic(1.0, 0));
        let r = dense_spectrum(&h, &g, 16).unwrap();
        let mut expect: Vec<f64> = g.momenta().iter().map(|k| k * k).collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in r.eigenvalues.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn shifted_symbol_uses_complex_path() {
        let g = make_grid(1, 32, 8.0).unwrap();
        let h = HamiltonianSpec::new(DispersionSymbol::ShiftedAbsolute {
            coef: 1.0,
            scale: 1.0,
            shift: 0.3,
            axis: 0,
        })
        .with_potential(PotentialSpec::gaussian_well(1.0, 1.0), CoordTag::Internal);
        let r = dense_spectrum(&h, &g, 4).unwrap();
        assert!(r.residuals.iter().all(|&x| x < 1e-9));
        assert!(r.orthonormality_defect() < 1e-10);
    }

    #[test]
    fn too_large_grid_is_refused() {
        let g = make_grid(2, 128, 8.0).unwrap();
        let h = HamiltonianSpec::new(DispersionSymbol::free_two_particle());
        assert!(matches!(
            dense_spectrum(&h, &g, 1),
            Err(Error::GridTooLarge { .. })
        ));
    }
}
