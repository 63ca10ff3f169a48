use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{
    apply_multiplier_fn, ClusterId, DiscreteHamiltonian, HamiltonianSpec, WaveFunction,
};

/// Default bound on the mass outside `0.8 L` for dilation-type operators.
pub const BOUNDARY_TOLERANCE: f64 = 1e-8;
pub const INTERIOR_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConjugateScope {
    /// `A = (P.X + X.P) / 2`.
    Full,
    /// `A^a`, the dilation of the internal coordinate `x^a`.
    Internal,
    /// `A_a`, the dilation of the external coordinate `x_a`.
    External,
}

/// Which dilation generator to apply.
///
/// On a 2-particle grid a scoped generator dilates the chart coordinate with
/// its canonical momentum: for `(xy)(0)` that is `x - y` with `(p - k)/2`
/// and `x + y` with `(p + k)/2`, so `A^a + A_a = A`. On a 1-particle (fiber)
/// grid `Full` and `Internal` both dilate the single coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConjugateSpec {
    pub scope: ConjugateScope,
    pub cluster: Option<ClusterId>,
}

/// `u = c0 x + c1 y` dilated with momentum `m0 p + m1 k`.
#[derive(Debug, Clone, Copy)]
struct Axis {
    coord: [f64; 2],
    momentum: [f64; 2],
}

impl ConjugateSpec {
    pub fn full() -> Self {
        Self {
            scope: ConjugateScope::Full,
            cluster: None,
        }
    }

    pub fn internal(a: ClusterId) -> Result<Self> {
        a.ensure_two_cluster()?;
        Ok(Self {
            scope: ConjugateScope::Internal,
            cluster: Some(a),
        })
    }

    pub fn external(a: ClusterId) -> Result<Self> {
        a.ensure_two_cluster()?;
        Ok(Self {
            scope: ConjugateScope::External,
            cluster: Some(a),
        })
    }

    fn axes(&self, particles: usize) -> Result<Vec<Axis>> {
        let x = Axis {
            coord: [1.0, 0.0],
            momentum: [1.0, 0.0],
        };
        let y = Axis {
            coord: [0.0, 1.0],
            momentum: [0.0, 1.0],
        };
        if particles == 1 {
            return match self.scope {
                ConjugateScope::External => Err(Error::GridMismatch(
                    "external dilation needs a 2-particle grid".into(),
                )),
                _ => Ok(vec![x]),
            };
        }
        let a = match (self.scope, self.cluster) {
            (ConjugateScope::Full, _) => return Ok(vec![x, y]),
            (_, Some(a)) => a,
            (_, None) => {
                return Err(Error::InvalidParameter(
                    "scoped dilation needs a cluster".into(),
                ))
            }
        };
        let internal = self.scope == ConjugateScope::Internal;
        Ok(match a {
            ClusterId::PhotonFree => vec![if internal { x } else { y }],
            ClusterId::ElectronFree => vec![if internal { y } else { x }],
            ClusterId::Pair => vec![if internal {
                Axis {
                    coord: [1.0, -1.0],
                    momentum: [0.5, -0.5],
                }
            } else {
                Axis {
                    coord: [1.0, 1.0],
                    momentum: [0.5, 0.5],
                }
            }],
            other => return Err(Error::NotTwoCluster(other)),
        })
    }
}

fn check_interior(psi: &WaveFunction, tolerance: f64) -> Result<()> {
    let mass = psi.mass_outside(INTERIOR_FRACTION);
    if mass > tolerance {
        return Err(Error::BoundaryMass {
            mass,
            limit: tolerance,
        });
    }
    Ok(())
}

/// `A psi` with the default interior tolerance.
pub fn apply_conjugate(psi: &WaveFunction, c: &ConjugateSpec) -> Result<WaveFunction> {
    apply_conjugate_with(psi, c, BOUNDARY_TOLERANCE)
}

/// `A psi = (1/2) sum (Q u + u Q) psi` with `Q` applied spectrally and `u`
/// pointwise. Fails when more than `tolerance` of the mass sits outside
/// `0.8 L`, where the position multiplier is cut by the periodic box.
pub fn apply_conjugate_with(
    psi: &WaveFunction,
    c: &ConjugateSpec,
    tolerance: f64,
) -> Result<WaveFunction> {
    check_interior(psi, tolerance)?;
    let grid = *psi.grid();
    let mut out = WaveFunction::zeros(grid);
    for axis in c.axes(grid.particles())? {
        let coord: Vec<f64> = (0..grid.len())
            .map(|i| {
                let s = grid.site(i);
                axis.coord[0] * s[0] + axis.coord[1] * s[1]
            })
            .collect();
        let q =
            |p: [f64; 2]| Complex64::new(axis.momentum[0] * p[0] + axis.momentum[1] * p[1], 0.0);
        let mut upsi = psi.clone();
        upsi.multiply_field(&coord);
        let qu = apply_multiplier_fn(&upsi, q);
        let mut uq = apply_multiplier_fn(psi, q);
        uq.multiply_field(&coord);
        out.add_scaled(Complex64::new(0.5, 0.0), &qu);
        out.add_scaled(Complex64::new(0.5, 0.0), &uq);
    }
    Ok(out)
}

/// Quadratic form of `[H, iA]`: `2 Im <A psi, H psi>`.
pub fn commutator_form(psi: &WaveFunction, h: &HamiltonianSpec, c: &ConjugateSpec) -> Result<f64> {
    let op = h.discretize(psi.grid())?;
    commutator_form_op(psi, &op, c, BOUNDARY_TOLERANCE)
}

pub fn commutator_form_op(
    psi: &WaveFunction,
    op: &DiscreteHamiltonian,
    c: &ConjugateSpec,
    tolerance: f64,
) -> Result<f64> {
    let a = apply_conjugate_with(psi, c, tolerance)?;
    let h = op.apply(psi)?;
    Ok(2.0 * a.inner(&h).im)
}

/// `<psi, i(HA - AH) psi>` by nested application; its imaginary part
/// measures how far the lattice operators are from being symmetric.
pub fn commutator_expectation(
    psi: &WaveFunction,
    op: &DiscreteHamiltonian,
    c: &ConjugateSpec,
    tolerance: f64,
) -> Result<Complex64> {
    let a = apply_conjugate_with(psi, c, tolerance)?;
    let ha = op.apply(&a)?;
    let h = op.apply(psi)?;
    let ah = apply_conjugate_with(&h, c, 1.0)?;
    let i = Complex64::new(0.0, 1.0);
    Ok(i * (psi.inner(&ha) - psi.inner(&ah)))
}
