//! Split-step time evolution and the dynamical estimates built on it.

mod channels;
mod estimates;
mod propagator;

use std::io::Write;

pub use channels::{
    cauchy_trace, channel_cutoff, completeness_defect, wave_operator_approx, ChannelConfig,
    ChannelConvention, CompletenessRun,
};
pub use estimates::{
    local_decay_trace, minimal_velocity_trace, smooth_below, weight_field, SpectralHypotheses,
};
pub use propagator::{evolve, Evolution, Propagator, PropagatorSpec, RunStatus, BOUNDARY_FRACTION};

use crate::error::{Error, Result};
use crate::lattice::{ClusterId, GridSpec, ThreeBodyModel, WaveFunction};
use crate::random::Packet;
use crate::spectral::ground_state_imag_time;

/// Normalized `phi(x) g(y)`: the ground state `phi` of `h_{(y)(x0)}` (energy returned)
/// times a photon packet `g`, on a 2-particle grid.
pub fn channel_product_state(
    model: &ThreeBodyModel,
    grid: &GridSpec,
    photon: Packet,
    tol: f64,
) -> Result<(WaveFunction, f64)> {
    grid.ensure_particles(2)?;
    let line = GridSpec::new(1, grid.points(), grid.half_extent())?;
    let h = model.subsystem(ClusterId::PhotonFree)?;
    if h.potentials.is_empty() {
        return Err(Error::InvalidParameter(
            "the electron-center potential is zero".into(),
        ));
    }
    let bound = ground_state_imag_time(&h, &line, tol)?;
    let g = WaveFunction::from_fn(line, |y, _| photon.eval(y));
    let psi = WaveFunction::product(&bound.eigenvectors[0], &g)?.normalized();
    Ok((psi, bound.eigenvalues[0]))
}

/// Minimal-velocity and channel cutoff parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    pub delta: f64,
    pub epsilon: f64,
    /// Weight power of `<X>^{-mu}`.
    pub mu: f64,
    /// Transition width of the smoothed step as a fraction of its threshold.
    pub smoothing: f64,
}

impl CutoffSpec {
    pub fn new(delta: f64, epsilon: f64, mu: f64) -> Result<Self> {
        let c = Self {
            delta,
            epsilon,
            mu,
            smoothing: 0.1,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > self.epsilon && self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need delta > epsilon > 0, got delta = {}, epsilon = {}",
                self.delta, self.epsilon
            )));
        }
        if !(self.mu > 0.5) {
            return Err(Error::InvalidParameter(format!(
                "mu = {} must exceed 1/2",
                self.mu
            )));
        }
        if !(self.smoothing > 0.0) {
            return Err(Error::InvalidParameter(
                "cutoff smoothing must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `delta' = delta - epsilon`.
    pub fn delta_prime(&self) -> f64 {
        self.delta - self.epsilon
    }
}

/// Time-stamped scalar observable.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub metadata: Vec<(String, String)>,
}

impl TraceSeries {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            times: Vec::new(),
            values: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, v: f64) {
        self.times.push(t);
        self.values.push(v);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        Some((*self.times.last()?, *self.values.last()?))
    }

    /// Value at the sample closest to `t`.
    pub fn at(&self, t: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.values)
            .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
            .map(|p| *p.1)
    }

    /// Times strictly increasing and values finite.
    pub fn is_well_formed(&self) -> bool {
        self.times.windows(2).all(|w| w[1] > w[0]) && self.values.iter().all(|v| v.is_finite())
    }

    /// CSV `t,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,{}", self.label)?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(w, "{t:?},{v:?}")?;
        }
        Ok(())
    }

    /// Plain `key = value` sidecar.
    pub fn write_sidecar<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "label = {}", self.label)?;
        writeln!(w, "samples = {}", self.times.len())?;
        for (k, v) in &self.metadata {
            writeln!(w, "{k} = {v}")?;
        }
        Ok(())
    }
}
