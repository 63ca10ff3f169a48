use std::fmt;

use num_complex::Complex64;

use super::conjugate::{commutator_form_op, ConjugateSpec, BOUNDARY_TOLERANCE};
use crate::error::Result;
use crate::lattice::{
    apply_multiplier_fn, ClusterId, CoordTag, GridSpec, HamiltonianSpec, PotentialSpec,
    ThreeBodyModel, WaveFunction,
};

/// Closed-form commutators `[H, iA]` of the model.
///
/// `Free`, `Full` and `Truncated` act on the 2-particle grid. `Subsystem`
/// and `Fibered` act on a fiber grid whose coordinate is `x^a`; for `(xy)(0)`
/// the fiber momentum `q` is canonical to `x - y` and `p^a = 2q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CommutatorFormula {
    /// `2p^2 + |k|`
    Free,
    /// `2p^2 + |k| - sum_a x^a . grad I^a`
    Full,
    /// `[H_a, iA] = 2p^2 + |k| - x^a . grad I^a`
    Truncated(ClusterId),
    /// `[h_a, iA^a]`
    Subsystem(ClusterId),
    /// `[H_a, iA](s)`
    Fibered(ClusterId, f64),
}

impl fmt::Display for CommutatorFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommutatorFormula::Free => write!(f, "free"),
            CommutatorFormula::Full => write!(f, "full"),
            CommutatorFormula::Truncated(a) => write!(f, "truncated{a}"),
            CommutatorFormula::Subsystem(a) => write!(f, "subsystem{a}"),
            CommutatorFormula::Fibered(a, s) => write!(f, "fibered{a}@{s}"),
        }
    }
}

impl CommutatorFormula {
    /// Every formula in the model's list, with fibered ones at the given momenta.
    pub fn catalogue(fiber_momenta: &[f64]) -> Vec<CommutatorFormula> {
        let mut out = vec![CommutatorFormula::Free, CommutatorFormula::Full];
        for a in ClusterId::TWO_CLUSTER {
            out.push(CommutatorFormula::Truncated(a));
        }
        for a in ClusterId::TWO_CLUSTER {
            out.push(CommutatorFormula::Subsystem(a));
        }
        for &s in fiber_momenta {
            for a in ClusterId::TWO_CLUSTER {
                out.push(CommutatorFormula::Fibered(a, s));
            }
        }
        out
    }

    pub fn particles(&self) -> usize {
        match self {
            CommutatorFormula::Subsystem(_) | CommutatorFormula::Fibered(..) => 1,
            _ => 2,
        }
    }

    fn cluster(&self) -> Option<ClusterId> {
        match *self {
            CommutatorFormula::Truncated(a)
            | CommutatorFormula::Subsystem(a)
            | CommutatorFormula::Fibered(a, _) => Some(a),
            _ => None,
        }
    }

    fn validate(&self, grid: &GridSpec) -> Result<()> {
        if let Some(a) = self.cluster() {
            a.ensure_two_cluster()?;
        }
        grid.ensure_particles(self.particles())
    }

    /// Kinetic part as a function of lattice momentum.
    pub fn kinetic(&self, p: [f64; 2]) -> f64 {
        let q = p[0];
        match *self {
            CommutatorFormula::Free | CommutatorFormula::Full | CommutatorFormula::Truncated(_) => {
                2.0 * p[0] * p[0] + p[1].abs()
            }
            CommutatorFormula::Subsystem(a) => match a {
                ClusterId::PhotonFree => 2.0 * q * q,
                ClusterId::ElectronFree => q.abs(),
                _ => 2.0 * q * q + q.abs(),
            },
            CommutatorFormula::Fibered(a, s) => match a {
                ClusterId::PhotonFree => s.abs() + 2.0 * q * q,
                ClusterId::ElectronFree => 2.0 * s * s + q.abs(),
                _ => {
                    let pa = 2.0 * q;
                    let gap = (pa - s).abs();
                    // the two one-sided limits at p^a = s are +-s; use their mean
                    let singular = if gap < 1e-14 {
                        0.0
                    } else {
                        (pa * pa - s * pa) / gap
                    };
                    0.5 * pa * pa + 0.5 * pa * s + 0.5 * singular
                }
            },
        }
    }

    /// Potentials whose dilation derivative enters, with their tags on the formula's grid.
    fn potentials(&self, model: &ThreeBodyModel) -> Vec<(PotentialSpec, CoordTag)> {
        match *self {
            CommutatorFormula::Free => vec![],
            CommutatorFormula::Full => model.full_hamiltonian().potentials,
            CommutatorFormula::Truncated(a) => model.intra(a),
            CommutatorFormula::Subsystem(a) | CommutatorFormula::Fibered(a, _) => model
                .subsystem_potential(a)
                .map(|v| vec![(v.clone(), CoordTag::Internal)])
                .unwrap_or_default(),
        }
    }

    /// The Hamiltonian and generator whose commutator this formula claims to be,
    /// plus the constant contributed by the external dilation on a fiber.
    pub fn pairing(&self, model: &ThreeBodyModel) -> Result<(HamiltonianSpec, ConjugateSpec, f64)> {
        Ok(match *self {
            CommutatorFormula::Free => (model.free_hamiltonian(), ConjugateSpec::full(), 0.0),
            CommutatorFormula::Full => (model.full_hamiltonian(), ConjugateSpec::full(), 0.0),
            CommutatorFormula::Truncated(a) => (model.truncated(a), ConjugateSpec::full(), 0.0),
            CommutatorFormula::Subsystem(a) => {
                (model.subsystem(a)?, ConjugateSpec::internal(a)?, 0.0)
            }
            CommutatorFormula::Fibered(a, s) => {
                let external = match a {
                    ClusterId::PhotonFree => s.abs(),
                    ClusterId::ElectronFree => 2.0 * s * s,
                    _ => 0.0,
                };
                (model.reduced(a, s)?, ConjugateSpec::internal(a)?, external)
            }
        })
    }
}

fn sample_field(
    grid: &GridSpec,
    pots: &[(PotentialSpec, CoordTag)],
    f: impl Fn(&PotentialSpec, f64) -> f64 + Sync + Send,
) -> Result<Vec<f64>> {
    let mut h = HamiltonianSpec::new(crate::lattice::DispersionSymbol::Constant(0.0));
    h.potentials = pots.to_vec();
    h.sample_potentials(grid, f)
}

/// Apply the formula's right-hand side to `psi`.
pub fn analytic_commutator_apply(
    psi: &WaveFunction,
    which: &CommutatorFormula,
    model: &ThreeBodyModel,
) -> Result<WaveFunction> {
    let grid = *psi.grid();
    which.validate(&grid)?;
    let w = *which;
    let mut out = apply_multiplier_fn(psi, move |p| Complex64::new(w.kinetic(p), 0.0));
    let field = sample_field(&grid, &which.potentials(model), |v, u| -v.virial(u))?;
    add_field(&mut out, psi, &field);
    Ok(out)
}

fn add_field(out: &mut WaveFunction, psi: &WaveFunction, field: &[f64]) {
    for ((o, a), f) in out
        .amplitudes_mut()
        .iter_mut()
        .zip(psi.amplitudes())
        .zip(field)
    {
        *o += a * f;
    }
}

/// `<psi, C psi>` for the closed-form commutator `C`.
pub fn analytic_commutator_form(
    psi: &WaveFunction,
    which: &CommutatorFormula,
    model: &ThreeBodyModel,
) -> Result<f64> {
    let c = analytic_commutator_apply(psi, which, model)?;
    Ok(psi.inner(&c).re)
}

/// The same quantity through `2 Im <A psi, H psi>` on the paired operators.
pub fn lattice_commutator_form(
    psi: &WaveFunction,
    which: &CommutatorFormula,
    model: &ThreeBodyModel,
) -> Result<f64> {
    which.validate(psi.grid())?;
    let (h, c, external) = which.pairing(model)?;
    let op = h.discretize(psi.grid())?;
    Ok(commutator_form_op(psi, &op, &c, BOUNDARY_TOLERANCE)? + external * psi.norm_sqr())
}

/// Second commutator `[[h_a, iA^a], iA^a]` on a fiber grid:
/// `4p^2 + x(xV12')'`, `|k| + y(yV13')'`, `(p^a)^2 + |p^a|/2 + x^a(x^a V23')'`.
pub fn second_commutator_apply(
    psi: &WaveFunction,
    a: ClusterId,
    model: &ThreeBodyModel,
) -> Result<WaveFunction> {
    a.ensure_two_cluster()?;
    let grid = *psi.grid();
    grid.ensure_particles(1)?;
    let kinetic = move |p: [f64; 2]| {
        let q = p[0];
        let v = match a {
            ClusterId::PhotonFree => 4.0 * q * q,
            ClusterId::ElectronFree => q.abs(),
            _ => 4.0 * q * q + q.abs(),
        };
        Complex64::new(v, 0.0)
    };
    let mut out = apply_multiplier_fn(psi, kinetic);
    let v = model.subsystem_potential(a)?.clone();
    let field = sample_field(&grid, &[(v, CoordTag::Internal)], |v, u| v.second_virial(u))?;
    add_field(&mut out, psi, &field);
    Ok(out)
}

pub fn second_commutator_form(
    psi: &WaveFunction,
    a: ClusterId,
    model: &ThreeBodyModel,
) -> Result<f64> {
    let s = second_commutator_apply(psi, a, model)?;
    Ok(psi.inner(&s).re)
}

/// `2 Im <A^a psi, C psi>` with `C` the closed-form first commutator.
pub fn nested_second_commutator_form(
    psi: &WaveFunction,
    a: ClusterId,
    model: &ThreeBodyModel,
) -> Result<f64> {
    let c = analytic_commutator_apply(psi, &CommutatorFormula::Subsystem(a), model)?;
    let ap = super::apply_conjugate(psi, &ConjugateSpec::internal(a)?)?;
    Ok(2.0 * ap.inner(&c).im)
}
