use super::propagator::{Propagator, PropagatorSpec};
use super::{CutoffSpec, TraceSeries};
use crate::error::{Error, Result};
use crate::lattice::{GridSpec, HamiltonianSpec, WaveFunction};
use crate::spectral::{SpectralFilter, ThresholdTable};

/// `(1 - tanh((u - threshold)/width)) / 2`.
pub fn smooth_below(u: f64, threshold: f64, width: f64) -> f64 {
    0.5 * (1.0 - ((u - threshold) / width).tanh())
}

/// `<X>^{-mu} = (1 + x^2 + y^2)^{-mu/2}` sampled on the grid.
pub fn weight_field(grid: &GridSpec, mu: f64) -> Vec<f64> {
    (0..grid.len())
        .map(|i| {
            let [x, y] = grid.site(i);
            (1.0 + x * x + y * y).powf(-0.5 * mu)
        })
        .collect()
}

/// Known spectral data of `H` that a dynamical window must avoid.
#[derive(Debug, Clone, Default)]
pub struct SpectralHypotheses {
    pub thresholds: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    /// Mourre constant on the window, when known.
    pub mourre_constant: Option<f64>,
    /// When false, violations are recorded instead of rejected.
    pub enforce: bool,
}

impl SpectralHypotheses {
    pub fn new(table: &ThresholdTable, eigenvalues: Vec<f64>) -> Self {
        Self {
            thresholds: table.thresholds(),
            eigenvalues,
            mourre_constant: None,
            enforce: true,
        }
    }

    pub fn with_mourre_constant(mut self, theta: f64) -> Self {
        self.mourre_constant = Some(theta);
        self
    }

    /// Same data with enforcement disabled, for negative controls.
    pub fn bypassed(mut self) -> Self {
        self.enforce = false;
        self
    }

    /// Description of the first violated window condition.
    pub fn window_violation(&self, window: (f64, f64)) -> Option<String> {
        let (lo, hi) = window;
        if let Some(t) = self.thresholds.iter().find(|&&t| t >= lo && t <= hi) {
            return Some(format!("threshold {t} lies in [{lo}, {hi}]"));
        }
        if let Some(e) = self.eigenvalues.iter().find(|&&e| e >= lo && e <= hi) {
            return Some(format!("eigenvalue {e} lies in [{lo}, {hi}]"));
        }
        None
    }

    fn check_window(&self, window: (f64, f64), trace: &mut TraceSeries) -> Result<()> {
        if let Some(v) = self.window_violation(window) {
            if self.enforce {
                return Err(Error::Hypothesis(v));
            }
            trace.meta("hypothesis_violation", v);
        }
        Ok(())
    }

    fn check_delta(&self, delta: f64, trace: &mut TraceSeries) -> Result<()> {
        let v = match self.mourre_constant {
            None => Some("no Mourre constant supplied for the window".to_string()),
            Some(theta) if delta >= theta => {
                Some(format!("delta = {delta} is not below theta = {theta}"))
            }
            Some(_) => None,
        };
        if let Some(v) = v {
            if self.enforce {
                return Err(Error::Hypothesis(v));
            }
            trace.meta("hypothesis_violation", v);
        }
        Ok(())
    }
}

/// Filter `psi0` to the window, remove `deflate`, and normalize.
fn filtered_seed(
    psi0: &WaveFunction,
    h: &HamiltonianSpec,
    window: (f64, f64),
    sharpness: f64,
    deflate: &[WaveFunction],
) -> Result<(WaveFunction, f64)> {
    let filter = SpectralFilter::new(h, psi0.grid(), window, sharpness)?;
    let mut psi = filter.apply(psi0)?;
    psi.project_out(deflate);
    let norm = psi.norm();
    if !(norm > 1e-12 * psi0.norm()) {
        return Err(Error::InvalidWindow(format!(
            "seed has no weight in [{}, {}]",
            window.0, window.1
        )));
    }
    Ok((psi.scaled(1.0 / norm), norm))
}

fn steps_per_sample(spec: &PropagatorSpec, interval: f64) -> usize {
    ((interval / spec.dt).floor() as usize).max(1)
}

/// Cumulative `I(t) = int_0^t ||<X>^{-mu} e^{-isH} psi||^2 ds` for the normalized filtered seed.
///
/// The saturation ratio `I(T)/I(T/2)` is stored under the `ratio` metadata key.
#[allow(clippy::too_many_arguments)]
pub fn local_decay_trace(
    psi0: &WaveFunction,
    prop: &PropagatorSpec,
    window: (f64, f64),
    mu: f64,
    duration: f64,
    hypotheses: &SpectralHypotheses,
    deflate: &[WaveFunction],
    sharpness: f64,
) -> Result<(TraceSeries, f64)> {
    if !(mu > 0.5) {
        return Err(Error::InvalidParameter(format!(
            "mu = {mu} must exceed 1/2"
        )));
    }
    let mut trace = TraceSeries::new("local_decay_integral");
    hypotheses.check_window(window, &mut trace)?;
    let (mut psi, filtered_norm) = filtered_seed(psi0, &prop.h, window, sharpness, deflate)?;
    let weight = weight_field(psi.grid(), 2.0 * mu);
    let vol = psi.grid().cell_volume();
    let density = |psi: &WaveFunction| -> f64 {
        psi.amplitudes()
            .iter()
            .zip(&weight)
            .map(|(z, w)| z.norm_sqr() * w)
            .sum::<f64>()
            * vol
    };

    let propagator = Propagator::new(prop, psi.grid())?;
    let every = steps_per_sample(prop, 0.25);
    let mut integral = 0.0;
    let mut last: Option<(f64, f64)> = None;
    let status = propagator.run(
        &mut psi,
        0.0,
        propagator.steps_for(duration),
        every,
        |t, psi| {
            let d = density(psi);
            if let Some((t0, d0)) = last {
                integral += 0.5 * (t - t0) * (d + d0);
            }
            last = Some((t, d));
            trace.push(t, integral);
            Ok(())
        },
    )?;
    status.into_result()?;

    let end = trace.last().map(|p| p.0).unwrap_or(0.0);
    let half = trace.at(0.5 * end).unwrap_or(0.0);
    let ratio = trace.last().map(|p| p.1).unwrap_or(0.0) / half;
    trace.meta("mu", mu);
    trace.meta("window", format!("{} {}", window.0, window.1));
    trace.meta("dt", prop.dt);
    trace.meta("filtered_norm", filtered_norm);
    trace.meta("ratio", ratio);
    Ok((trace, ratio))
}

/// `|| F(X^2 / t^{2-eps} < delta) psi(t) ||` for `t` in `[1, T]`, `psi` the normalized filtered seed.
#[allow(clippy::too_many_arguments)]
pub fn minimal_velocity_trace(
    psi0: &WaveFunction,
    prop: &PropagatorSpec,
    window: (f64, f64),
    cutoffs: &CutoffSpec,
    duration: f64,
    hypotheses: &SpectralHypotheses,
    deflate: &[WaveFunction],
    sharpness: f64,
) -> Result<TraceSeries> {
    cutoffs.validate()?;
    if duration < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "duration {duration} is shorter than 1"
        )));
    }
    let mut trace = TraceSeries::new("minimal_velocity_norm");
    hypotheses.check_window(window, &mut trace)?;
    hypotheses.check_delta(cutoffs.delta, &mut trace)?;
    let (mut psi, filtered_norm) = filtered_seed(psi0, &prop.h, window, sharpness, deflate)?;
    let grid = *psi.grid();
    let r2: Vec<f64> = (0..grid.len())
        .map(|i| {
            let [x, y] = grid.site(i);
            x * x + y * y
        })
        .collect();
    let vol = grid.cell_volume();

    let propagator = Propagator::new(prop, &grid)?;
    let every = steps_per_sample(prop, 0.25);
    let status = propagator.run(
        &mut psi,
        0.0,
        propagator.steps_for(duration),
        every,
        |t, psi| {
            if t < 1.0 - 1e-12 {
                return Ok(());
            }
            let thr = cutoffs.delta * t.powf(2.0 - cutoffs.epsilon);
            let width = cutoffs.smoothing * thr;
            let m: f64 = psi
                .amplitudes()
                .iter()
                .zip(&r2)
                .map(|(z, &u)| z.norm_sqr() * smooth_below(u, thr, width).powi(2))
                .sum::<f64>()
                * vol;
            trace.push(t, m.sqrt());
            Ok(())
        },
    )?;
    status.into_result()?;
    trace.meta("delta", cutoffs.delta);
    trace.meta("epsilon", cutoffs.epsilon);
    trace.meta("window", format!("{} {}", window.0, window.1));
    trace.meta("filtered_norm", filtered_norm);
    Ok(trace)
}
