use num_complex::Complex64;

use super::TraceSeries;
use crate::error::{Error, Result};
use crate::lattice::{fft, DiscreteHamiltonian, GridSpec, HamiltonianSpec, WaveFunction};

/// Sites with some coordinate beyond this fraction of `L` count as boundary.
pub const BOUNDARY_FRACTION: f64 = 0.9;

/// Evolution parameters.
#[derive(Debug, Clone)]
pub struct PropagatorSpec {
    pub h: HamiltonianSpec,
    pub dt: f64,
    pub steps_per_sample: usize,
    /// Largest tolerated boundary mass.
    pub boundary_limit: f64,
}

impl PropagatorSpec {
    pub fn new(h: HamiltonianSpec, dt: f64) -> Self {
        Self {
            h,
            dt,
            steps_per_sample: 10,
            boundary_limit: 1e-6,
        }
    }
}

/// Strang splitting `e^{-i dt V/2} e^{-i dt m(p)} e^{-i dt V/2}` on a fixed grid.
#[derive(Debug, Clone)]
pub struct Propagator {
    op: DiscreteHamiltonian,
    dt: f64,
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    boundary_limit: f64,
    reference_norm_sqr: Option<f64>,
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Completed,
    Breach { time: f64, mass: f64 },
}

impl RunStatus {
    pub fn into_result(self) -> Result<()> {
        match self {
            RunStatus::Completed => Ok(()),
            RunStatus::Breach { time, mass } => Err(Error::BoundaryBreach { time, mass }),
        }
    }
}

impl Propagator {
    pub fn new(spec: &PropagatorSpec, grid: &GridSpec) -> Result<Self> {
        Self::directed(spec, grid, true)
    }

    /// Propagator for `e^{+i dt H}`.
    pub fn backward(spec: &PropagatorSpec, grid: &GridSpec) -> Result<Self> {
        Self::directed(spec, grid, false)
    }

    fn directed(spec: &PropagatorSpec, grid: &GridSpec, forward: bool) -> Result<Self> {
        if !(spec.dt.is_finite() && spec.dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time step {} must be positive",
                spec.dt
            )));
        }
        if spec.steps_per_sample == 0 {
            return Err(Error::InvalidParameter(
                "steps_per_sample must be positive".into(),
            ));
        }
        let op = spec.h.discretize(grid)?;
        let dt = if forward { spec.dt } else { -spec.dt };
        Ok(Self::from_operator(op, dt, spec.boundary_limit))
    }

    pub fn from_operator(op: DiscreteHamiltonian, dt: f64, boundary_limit: f64) -> Self {
        let half_potential = op
            .potential
            .iter()
            .map(|&v| Complex64::from_polar(1.0, -0.5 * dt * v))
            .collect();
        let kinetic = op
            .kinetic
            .iter()
            .map(|&m| Complex64::from_polar(1.0, -dt * m))
            .collect();
        Self {
            op,
            dt,
            half_potential,
            kinetic,
            boundary_limit,
            reference_norm_sqr: None,
        }
    }

    /// Measure boundary mass against `norm^2` instead of the evolving state's own norm.
    pub fn with_reference_norm(mut self, norm: f64) -> Self {
        self.reference_norm_sqr = Some(norm * norm);
        self
    }

    /// Boundary mass of `psi` as a fraction of the reference norm.
    pub fn boundary_mass(&self, psi: &WaveFunction) -> f64 {
        let m = psi.mass_outside(BOUNDARY_FRACTION);
        match self.reference_norm_sqr {
            Some(r) if r > 0.0 => m * psi.norm_sqr() / r,
            _ => m,
        }
    }

    /// Signed time step.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn operator(&self) -> &DiscreteHamiltonian {
        &self.op
    }

    pub fn step(&self, psi: &mut WaveFunction) {
        let grid = self.op.grid;
        let amps = psi.amplitudes_mut();
        mul(amps, &self.half_potential);
        fft::apply_complex_multiplier(&grid, amps, &self.kinetic);
        mul(amps, &self.half_potential);
    }

    /// Number of steps covering `|duration|`, rounded to the nearest step.
    pub fn steps_for(&self, duration: f64) -> usize {
        (duration.abs() / self.dt.abs()).round() as usize
    }

    /// Advance `steps` steps, calling `observer(t, psi)` at `t0` and every `every` steps.
    /// Stops at the first sample whose boundary mass exceeds the limit.
    pub fn run<F>(
        &self,
        psi: &mut WaveFunction,
        t0: f64,
        steps: usize,
        every: usize,
        mut observer: F,
    ) -> Result<RunStatus>
    where
        F: FnMut(f64, &WaveFunction) -> Result<()>,
    {
        self.op.grid.ensure_same(psi.grid())?;
        let every = every.max(1);
        let mut check = |t: f64, psi: &WaveFunction| -> Result<Option<RunStatus>> {
            let mass = self.boundary_mass(psi);
            if mass > self.boundary_limit {
                return Ok(Some(RunStatus::Breach { time: t, mass }));
            }
            observer(t, psi)?;
            Ok(None)
        };
        if let Some(s) = check(t0, psi)? {
            return Ok(s);
        }
        for n in 1..=steps {
            self.step(psi);
            if n % every == 0 || n == steps {
                if let Some(s) = check(t0 + n as f64 * self.dt, psi)? {
                    return Ok(s);
                }
            }
        }
        Ok(RunStatus::Completed)
    }
}

fn mul(a: &mut [Complex64], b: &[Complex64]) {
    a.iter_mut().zip(b).for_each(|(z, w)| *z *= w);
}

/// Outcome of [`evolve`]: final state, norm and energy traces, and status.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: WaveFunction,
    pub norm: TraceSeries,
    pub energy: TraceSeries,
    pub status: RunStatus,
}

impl Evolution {
    /// `max_t |E(t) - E(0)|` over the recorded samples.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy.values.first().copied().unwrap_or(0.0);
        self.energy
            .values
            .iter()
            .map(|e| (e - e0).abs())
            .fold(0.0, f64::max)
    }

    /// `max_t | ||psi(t)|| - ||psi(0)|| |`.
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.norm.values.first().copied().unwrap_or(0.0);
        self.norm
            .values
            .iter()
            .map(|n| (n - n0).abs())
            .fold(0.0, f64::max)
    }
}

/// Evolve `psi0` for time `duration`, recording norm and energy.
pub fn evolve(psi0: &WaveFunction, spec: &PropagatorSpec, duration: f64) -> Result<Evolution> {
    let prop = Propagator::new(spec, psi0.grid())?;
    let mut state = psi0.clone();
    let mut norm = TraceSeries::new("norm");
    let mut energy = TraceSeries::new("energy");
    let steps = prop.steps_for(duration);
    let status = prop.run(&mut state, 0.0, steps, spec.steps_per_sample, |t, psi| {
        norm.push(t, psi.norm());
        energy.push(t, prop.op.energy(psi)?);
        Ok(())
    })?;
    for s in [&mut norm, &mut energy] {
        s.meta("dt", spec.dt);
        s.meta("duration", duration);
        s.meta("status", format!("{status:?}"));
    }
    Ok(Evolution {
        state,
        norm,
        energy,
        status,
    })
}
