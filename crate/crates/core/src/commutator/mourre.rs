use std::io::Write;

use num_complex::Complex64;

use super::analytic::{analytic_commutator_form, CommutatorFormula};
use super::conjugate::{commutator_form_op, ConjugateSpec};
use crate::error::{Error, Result};
use crate::lattice::{GridSpec, ThreeBodyModel, WaveFunction};
use crate::spectral::{SpectralFilter, ThresholdTable};
use crate::{par, random};

#[derive(Debug, Clone)]
pub struct MourreOptions {
    pub samples: usize,
    /// Defaults to `0.1 d(E)`.
    pub epsilon: Option<f64>,
    pub sharpness: f64,
    pub seed: u64,
    /// Gaussian envelope width of the random seeds before filtering.
    pub seed_width: f64,
    /// Photon momenta below this scale are removed from the seeds.
    pub photon_gap: f64,
    /// Interior tolerance for the dilation generator.
    pub boundary_tolerance: f64,
    /// States to project out after filtering (orthonormal).
    pub deflate: Vec<WaveFunction>,
    /// Energy variance below which a sample is flagged as an eigenstate.
    pub eigenstate_variance: f64,
}

impl Default for MourreOptions {
    fn default() -> Self {
        Self {
            samples: 10,
            epsilon: None,
            sharpness: 6.0,
            seed: 0,
            seed_width: 4.0,
            photon_gap: 0.15,
            boundary_tolerance: 1e-8,
            deflate: Vec::new(),
            eigenstate_variance: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MourreSample {
    pub form: f64,
    /// The same form from the closed-form commutator, which needs no dilation.
    pub analytic_form: f64,
    /// `||f(H) seed||` before normalization.
    pub filtered_norm: f64,
    /// `||(H - <H>) psi||` of the normalized sample.
    pub energy_spread: f64,
    pub boundary_mass: f64,
    pub eigenstate: bool,
}

#[derive(Debug, Clone)]
pub struct MourreReport {
    pub energy: f64,
    pub window: (f64, f64),
    pub distance: f64,
    pub epsilon: f64,
    /// `d(E) - epsilon`.
    pub bound: f64,
    pub deflated: usize,
    pub samples: Vec<MourreSample>,
}

impl MourreReport {
    pub fn forms(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.form).collect()
    }

    pub fn violations(&self, allowance: f64) -> usize {
        self.samples
            .iter()
            .filter(|s| s.form < self.bound - allowance)
            .count()
    }

    /// `max |form - analytic_form|` over the samples.
    pub fn path_discrepancy(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.form - s.analytic_form).abs())
            .fold(0.0, f64::max)
    }

    /// `min(form) - bound`.
    pub fn worst_margin(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.form - self.bound)
            .fold(f64::INFINITY, f64::min)
    }

    /// CSV `sample,form_value,bound,margin,eigen_deflated_count` and a summary comment.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "sample,form_value,bound,margin,eigen_deflated_count")?;
        for (i, s) in self.samples.iter().enumerate() {
            writeln!(
                w,
                "{i},{:?},{:?},{:?},{}",
                s.form,
                self.bound,
                s.form - self.bound,
                self.deflated
            )?;
        }
        writeln!(
            w,
            "# E={:?} window=({:?},{:?}) d={:?} epsilon={:?} violations={} worst_margin={:?}",
            self.energy,
            self.window.0,
            self.window.1,
            self.distance,
            self.epsilon,
            self.violations(0.0),
            self.worst_margin()
        )?;
        Ok(())
    }
}

/// Filtered random states near `E` and their commutator forms against `d(E) - epsilon`.
pub fn mourre_report(
    energy: f64,
    window: (f64, f64),
    model: &ThreeBodyModel,
    grid: &GridSpec,
    thresholds: &ThresholdTable,
    opts: &MourreOptions,
) -> Result<MourreReport> {
    grid.ensure_particles(2)?;
    if opts.samples == 0 {
        return Err(Error::InvalidParameter(
            "at least one sample is required".into(),
        ));
    }
    if thresholds.is_threshold(energy) {
        return Err(Error::Hypothesis(format!("E = {energy} is a threshold")));
    }
    if thresholds.contains_threshold(window.0, window.1) {
        return Err(Error::InvalidWindow(format!(
            "({}, {}) contains a threshold",
            window.0, window.1
        )));
    }
    let distance = thresholds.distance(energy);
    if window.0 < energy - 0.5 * distance || window.1 > energy + 0.5 * distance {
        return Err(Error::InvalidWindow(format!(
            "({}, {}) reaches beyond d(E)/2 = {} around E = {energy}",
            window.0,
            window.1,
            0.5 * distance
        )));
    }
    let epsilon = opts.epsilon.unwrap_or(0.1 * distance);
    let filter = SpectralFilter::new(&model.full_hamiltonian(), grid, window, opts.sharpness)?;
    let op = filter.operator();
    let conj = ConjugateSpec::full();

    let samples = par::try_map_range(opts.samples, |i| {
        let mut rng = random::rng_for(opts.seed, &format!("mourre/{i}"));
        let seed = random::photon_gap(
            &random::enveloped_noise(grid, opts.seed_width, &mut rng),
            opts.photon_gap,
        );
        let mut psi = filter.apply(&seed)?;
        psi.project_out(&opts.deflate);
        let filtered_norm = psi.norm();
        if filtered_norm == 0.0 {
            return Err(Error::InvalidWindow(
                "filter removed the whole sample".into(),
            ));
        }
        let psi = psi.scaled(1.0 / filtered_norm);
        let boundary_mass = psi.mass_outside(super::conjugate::INTERIOR_FRACTION);
        let form = commutator_form_op(&psi, op, &conj, opts.boundary_tolerance)?;
        let analytic_form = analytic_commutator_form(&psi, &CommutatorFormula::Full, model)?;
        let mut hpsi = op.apply(&psi)?;
        let mean = psi.inner(&hpsi).re;
        hpsi.add_scaled(Complex64::new(-mean, 0.0), &psi);
        let energy_spread = hpsi.norm();
        Ok::<_, Error>(MourreSample {
            form,
            analytic_form,
            filtered_norm,
            energy_spread,
            boundary_mass,
            eigenstate: energy_spread < opts.eigenstate_variance,
        })
    })?;

    Ok(MourreReport {
        energy,
        window,
        distance,
        epsilon,
        bound: distance - epsilon,
        deflated: opts.deflate.len(),
        samples,
    })
}
