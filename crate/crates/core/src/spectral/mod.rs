//! Eigensolvers, fibered Hamiltonians, thresholds and spectral filtering.

mod dense;
mod fiber;
mod filter;
mod imag_time;
mod ritz;
mod subspace;
mod thresholds;

use std::io::Write;

pub use dense::{dense_spectrum, DENSE_LIMIT};
pub use fiber::{
    dispersion_scan, reduced_hamiltonian, DispersionCurve, DispersionSample, FitSummary,
};
pub use filter::{filter_response, FilteredState, SpectralFilter};
pub use imag_time::{ground_state_imag_time, imag_time_solve, ImagTimeOptions};
pub use subspace::{subspace_iteration, SubspaceOptions};
pub use thresholds::{
    bound_states, distance_to_threshold, distance_to_threshold_with, threshold_table,
    ClusterThresholds, ThresholdOptions, ThresholdTable, THRESHOLD_MATCH,
};

use crate::error::Result;
use crate::lattice::WaveFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    Dense,
    ImaginaryTime,
    IterativeSubspace,
}

impl EigenMethod {
    pub fn name(self) -> &'static str {
        match self {
            EigenMethod::Dense => "dense",
            EigenMethod::ImaginaryTime => "imaginary-time",
            EigenMethod::IterativeSubspace => "iterative-subspace",
        }
    }
}

/// Eigenpairs in ascending order with their residuals `||H psi - lambda psi||`.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<WaveFunction>,
    pub residuals: Vec<f64>,
    pub method: EigenMethod,
    /// Residual tolerance the solver worked to.
    pub tolerance: f64,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `max |<v_i, v_j> - delta_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = &self.eigenvectors;
        let mut worst = 0.0f64;
        for i in 0..v.len() {
            for j in 0..=i {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v[i].inner(&v[j]) - target).norm());
            }
        }
        worst
    }

    /// CSV with columns `index,eigenvalue,residual`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,eigenvalue,residual")?;
        for (i, (e, r)) in self.eigenvalues.iter().zip(&self.residuals).enumerate() {
            writeln!(w, "{i},{e:?},{r:?}")?;
        }
        Ok(())
    }
}
