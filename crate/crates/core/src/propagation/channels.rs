use num_complex::Complex64;

use super::estimates::smooth_below;
use super::propagator::{Propagator, PropagatorSpec};
use super::{CutoffSpec, TraceSeries};
use crate::error::{Error, Result};
use crate::lattice::{
    cluster_coordinates, ClusterId, GridSpec, HamiltonianSpec, ThreeBodyModel, WaveFunction,
};
use crate::par;
use crate::spectral::SpectralFilter;

/// Which cluster coordinate the channel cutoff acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelConvention {
    /// `x^a`: `x`, `y`, `x - y`.
    #[default]
    Internal,
    /// `x_a`: `y`, `x`, `x + y`.
    External,
}

/// `F((x^a)^2 / t^{2-eps} < delta')` on the 2-particle grid.
pub fn channel_cutoff(
    grid: &GridSpec,
    a: ClusterId,
    t: f64,
    cutoffs: &CutoffSpec,
    convention: ChannelConvention,
) -> Result<Vec<f64>> {
    a.ensure_two_cluster()?;
    grid.ensure_particles(2)?;
    cutoffs.validate()?;
    if !(t >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "cutoff time {t} is below 1"
        )));
    }
    let thr = cutoffs.delta_prime() * t.powf(2.0 - cutoffs.epsilon);
    let width = cutoffs.smoothing * thr;
    Ok((0..grid.len())
        .map(|i| {
            let c = cluster_coordinates(a, grid.site(i));
            let u = match convention {
                ChannelConvention::Internal if a == ClusterId::Pair => grid.wrap(c.internal[0]),
                ChannelConvention::Internal => c.internal[0],
                ChannelConvention::External => c.external[0],
            };
            smooth_below(u * u, thr, width)
        })
        .collect())
}

/// Shared settings of the channel experiments.
#[derive(Debug, Clone)]
pub struct ChannelConfig {
    pub dt: f64,
    pub sharpness: f64,
    pub boundary_limit: f64,
    pub convention: ChannelConvention,
    /// Thresholds of `H`; the window must avoid them.
    pub thresholds: Vec<f64>,
    /// Eigenvectors of `H` removed from the filtered state.
    pub deflate: Vec<WaveFunction>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            sharpness: 6.0,
            boundary_limit: 1e-6,
            convention: ChannelConvention::Internal,
            thresholds: Vec::new(),
            deflate: Vec::new(),
        }
    }
}

impl ChannelConfig {
    fn propagator(&self, h: HamiltonianSpec) -> PropagatorSpec {
        PropagatorSpec {
            h,
            dt: self.dt,
            steps_per_sample: 1,
            boundary_limit: self.boundary_limit,
        }
    }

    fn check_window(&self, window: (f64, f64)) -> Result<()> {
        let (lo, hi) = window;
        if !(lo < hi && hi < 0.0) {
            return Err(Error::InvalidWindow(format!(
                "[{lo}, {hi}] must be a negative interval"
            )));
        }
        if let Some(t) = self.thresholds.iter().find(|&&t| t >= lo && t <= hi) {
            return Err(Error::Hypothesis(format!(
                "threshold {t} lies in [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    /// Filtered, deflated seed (not renormalized).
    fn seed(
        &self,
        psi0: &WaveFunction,
        h: &HamiltonianSpec,
        window: (f64, f64),
    ) -> Result<WaveFunction> {
        self.check_window(window)?;
        let op = h.discretize(psi0.grid())?;
        let (smin, _) = op.spectral_bounds();
        if window.1 < smin {
            // the spectral projection onto a window below the spectrum vanishes
            return Ok(WaveFunction::zeros(*psi0.grid()));
        }
        let filter = SpectralFilter::from_operator(op, window, self.sharpness)?;
        let mut psi = filter.apply(psi0)?;
        psi.project_out(&self.deflate);
        Ok(psi)
    }
}

fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) || schedule[0] < 1.0 {
        return Err(Error::InvalidParameter(
            "schedule must be strictly increasing and start at t >= 1".into(),
        ));
    }
    Ok(())
}

/// Evolve for each duration in `durations` (increasing, measured from `t0`), returning the states.
fn checkpoints(
    prop: &Propagator,
    mut psi: WaveFunction,
    t0: f64,
    durations: &[f64],
) -> Result<Vec<WaveFunction>> {
    let mut out = Vec::with_capacity(durations.len());
    let mut t = t0;
    let mut done = 0usize;
    for &d in durations {
        let total = prop.steps_for(d);
        let steps = total.saturating_sub(done);
        prop.run(&mut psi, t, steps, steps.max(1), |_, _| Ok(()))?
            .into_result()?;
        done = total;
        t = t0 + done as f64 * prop.dt();
        out.push(psi.clone());
    }
    Ok(out)
}

fn with_field(psi: &WaveFunction, field: &[f64]) -> WaveFunction {
    let mut out = psi.clone();
    out.multiply_field(field);
    out
}

/// Deift-Simon approximant `phi_a(t) = e^{i H_a t} F_a(t) e^{-i H t} E(H) psi0`.
pub fn wave_operator_approx(
    a: ClusterId,
    psi0: &WaveFunction,
    model: &ThreeBodyModel,
    window: (f64, f64),
    cutoffs: &CutoffSpec,
    t: f64,
    cfg: &ChannelConfig,
) -> Result<WaveFunction> {
    a.ensure_two_cluster()?;
    let grid = *psi0.grid();
    let field = channel_cutoff(&grid, a, t, cutoffs, cfg.convention)?;
    let h = model.full_hamiltonian();
    let psi = cfg.seed(psi0, &h, window)?;
    let forward = Propagator::new(&cfg.propagator(h), &grid)?;
    let psi_t = checkpoints(&forward, psi, 0.0, &[t])?.remove(0);
    let back = Propagator::backward(&cfg.propagator(model.truncated(a)), &grid)?
        .with_reference_norm(psi_t.norm());
    Ok(checkpoints(&back, with_field(&psi_t, &field), t, &[t])?.remove(0))
}

/// Result of [`completeness_defect`].
#[derive(Debug, Clone)]
pub struct CompletenessRun {
    pub defect: TraceSeries,
    /// `||phi_a||` at the reference time for each two-cluster channel.
    pub channel_norms: Vec<(ClusterId, f64)>,
    pub filtered_norm: f64,
}

/// `||e^{-itH} psi - sum_a e^{-itH_a} phi_a||` along `schedule`, with `phi_a` taken at the last scheduled time.
pub fn completeness_defect(
    psi0: &WaveFunction,
    model: &ThreeBodyModel,
    window: (f64, f64),
    cutoffs: &CutoffSpec,
    schedule: &[f64],
    cfg: &ChannelConfig,
) -> Result<CompletenessRun> {
    validate_schedule(schedule)?;
    cutoffs.validate()?;
    let grid = *psi0.grid();
    grid.ensure_particles(2)?;
    let h = model.full_hamiltonian();
    let psi = cfg.seed(psi0, &h, window)?;
    let filtered_norm = psi.norm();
    let forward = Propagator::new(&cfg.propagator(h), &grid)?;
    let states = checkpoints(&forward, psi, 0.0, schedule)?;
    let t_ref = *schedule.last().unwrap();
    let reference = states.last().unwrap();

    let channels = ClusterId::TWO_CLUSTER;
    let per_channel =
        par::try_map_range(channels.len(), |c| -> Result<(f64, Vec<WaveFunction>)> {
            let a = channels[c];
            let field = channel_cutoff(&grid, a, t_ref, cutoffs, cfg.convention)?;
            let chi = with_field(reference, &field);
            let back = Propagator::backward(&cfg.propagator(model.truncated(a)), &grid)?
                .with_reference_norm(filtered_norm);
            // offsets back from t_ref, in increasing order
            let offsets: Vec<f64> = schedule.iter().rev().map(|t| t_ref - t).collect();
            let mut states = checkpoints(&back, chi.clone(), t_ref, &offsets)?;
            states.reverse();
            Ok((chi.norm(), states))
        })?;

    let mut defect = TraceSeries::new("completeness_defect");
    for (k, &t) in schedule.iter().enumerate() {
        let mut r = states[k].clone();
        for (_, channel) in &per_channel {
            r.add_scaled(Complex64::new(-1.0, 0.0), &channel[k]);
        }
        defect.push(t, r.norm());
    }
    defect.meta("reference_time", t_ref);
    defect.meta("delta", cutoffs.delta);
    defect.meta("epsilon", cutoffs.epsilon);
    defect.meta("window", format!("{} {}", window.0, window.1));
    defect.meta("filtered_norm", filtered_norm);
    defect.meta("convention", format!("{:?}", cfg.convention));
    let channel_norms = channels
        .iter()
        .zip(&per_channel)
        .map(|(a, (n, _))| (*a, *n))
        .collect::<Vec<_>>();
    for (a, n) in &channel_norms {
        defect.meta(&format!("channel_norm {}", a.slug()), n);
    }
    Ok(CompletenessRun {
        defect,
        channel_norms,
        filtered_norm,
    })
}

/// `||phi_a(t_{k+1}) - phi_a(t_k)||` along `schedule`, recorded at `t_{k+1}`.
pub fn cauchy_trace(
    a: ClusterId,
    psi0: &WaveFunction,
    model: &ThreeBodyModel,
    window: (f64, f64),
    cutoffs: &CutoffSpec,
    schedule: &[f64],
    cfg: &ChannelConfig,
) -> Result<TraceSeries> {
    a.ensure_two_cluster()?;
    validate_schedule(schedule)?;
    let grid = *psi0.grid();
    let h = model.full_hamiltonian();
    let psi = cfg.seed(psi0, &h, window)?;
    let forward = Propagator::new(&cfg.propagator(h), &grid)?;
    let states = checkpoints(&forward, psi, 0.0, schedule)?;
    let channel = Propagator::new(&cfg.propagator(model.truncated(a)), &grid)?
        .with_reference_norm(states[0].norm());

    let cut: Vec<WaveFunction> = schedule
        .iter()
        .zip(&states)
        .map(|(&t, s)| {
            Ok(with_field(
                s,
                &channel_cutoff(&grid, a, t, cutoffs, cfg.convention)?,
            ))
        })
        .collect::<Result<_>>()?;
    let diffs = par::try_map_range(schedule.len() - 1, |k| -> Result<f64> {
        let moved = checkpoints(
            &channel,
            cut[k].clone(),
            schedule[k],
            &[schedule[k + 1] - schedule[k]],
        )?
        .remove(0);
        Ok(cut[k + 1].sub(&moved).norm())
    })?;
    let mut trace = TraceSeries::new(format!("cauchy_{}", a.slug()));
    for (k, d) in diffs.into_iter().enumerate() {
        trace.push(schedule[k + 1], d);
    }
    trace.meta("cluster", a.label());
    trace.meta("window", format!("{} {}", window.0, window.1));
    Ok(trace)
}
