use std::io::Write;

use super::{
    dense_spectrum, imag_time_solve, EigenMethod, EigenResult, ImagTimeOptions, DENSE_LIMIT,
};
use crate::error::{Error, Result};
use crate::lattice::{ClusterId, GridSpec, HamiltonianSpec, ThreeBodyModel, WaveFunction};
use crate::par;

/// Two energies closer than this are the same threshold.
pub const THRESHOLD_MATCH: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ThresholdOptions {
    pub tol: f64,
    /// Rayleigh quotients above `-eta` end the search for bound states.
    pub eta: f64,
    /// Largest fraction of a bound state allowed outside half the box.
    pub localization: f64,
    pub max_states: usize,
    /// Fallback distance `b` used below the lowest threshold.
    pub fallback: f64,
    pub seed: u64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            eta: 1e-3,
            localization: 1e-3,
            max_states: 8,
            fallback: 1.0,
            seed: 0,
        }
    }
}

/// Negative, localized eigenpairs of `h` found by repeated deflated solves.
pub fn bound_states(
    h: &HamiltonianSpec,
    grid: &GridSpec,
    opts: &ThresholdOptions,
) -> Result<EigenResult> {
    let mut found = EigenResult {
        eigenvalues: Vec::new(),
        eigenvectors: Vec::new(),
        residuals: Vec::new(),
        method: EigenMethod::ImaginaryTime,
        tolerance: opts.tol,
    };
    if h.potentials.is_empty() {
        return Ok(found);
    }
    while found.len() < opts.max_states {
        let solve = ImagTimeOptions {
            tol: opts.tol,
            deflate: found.eigenvectors.clone(),
            seed: opts.seed.wrapping_add(found.len() as u64),
            ..Default::default()
        };
        let r = imag_time_solve(h, grid, &solve)?;
        let lambda = r.eigenvalues[0];
        let psi: &WaveFunction = &r.eigenvectors[0];
        if lambda >= -opts.eta || psi.mass_outside(0.5) > opts.localization {
            break;
        }
        found.eigenvalues.push(lambda);
        found.residuals.push(r.residuals[0]);
        found
            .eigenvectors
            .push(r.eigenvectors.into_iter().next().unwrap());
    }
    Ok(found)
}

/// Bound-state energies of one subsystem Hamiltonian `h_a`.
#[derive(Debug, Clone)]
pub struct ClusterThresholds {
    pub cluster: ClusterId,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Largest disagreement with dense diagonalization, when the grid allows it.
    pub dense_discrepancy: Option<f64>,
}

impl ClusterThresholds {
    /// `G_a`: the lowest eigenvalue, or zero.
    pub fn ground(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(0.0, f64::min)
    }

    /// `d(E, a)`.
    pub fn distance(&self, e: f64, fallback: f64) -> f64 {
        let mut levels = self.eigenvalues.clone();
        levels.push(0.0);
        if levels.iter().any(|l| (e - l).abs() <= THRESHOLD_MATCH) {
            return 0.0;
        }
        if e < self.ground() {
            return fallback;
        }
        let below = levels
            .iter()
            .copied()
            .filter(|&l| l < e)
            .fold(f64::NEG_INFINITY, f64::max);
        e - below
    }
}

#[derive(Debug, Clone)]
pub struct ThresholdTable {
    pub clusters: Vec<ClusterThresholds>,
    pub fallback: f64,
}

impl ThresholdTable {
    /// A table from known eigenvalue lists, one per two-cluster decomposition.
    pub fn from_levels(levels: &[(ClusterId, Vec<f64>)], fallback: f64) -> Self {
        Self {
            clusters: levels
                .iter()
                .map(|(c, l)| ClusterThresholds {
                    cluster: *c,
                    eigenvalues: l.clone(),
                    residuals: vec![0.0; l.len()],
                    dense_discrepancy: None,
                })
                .collect(),
            fallback,
        }
    }

    pub fn cluster(&self, a: ClusterId) -> Option<&ClusterThresholds> {
        self.clusters.iter().find(|c| c.cluster == a)
    }

    /// Every threshold, zero included, ascending and deduplicated.
    pub fn thresholds(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .clusters
            .iter()
            .flat_map(|c| c.eigenvalues.iter().copied())
            .chain(std::iter::once(0.0))
            .collect();
        all.sort_by(f64::total_cmp);
        all.dedup_by(|a, b| (*a - *b).abs() <= THRESHOLD_MATCH);
        all
    }

    pub fn lowest(&self) -> f64 {
        self.thresholds()[0]
    }

    pub fn is_threshold(&self, e: f64) -> bool {
        self.thresholds()
            .iter()
            .any(|t| (e - t).abs() <= THRESHOLD_MATCH)
    }

    /// Does the closed interval contain a threshold?
    pub fn contains_threshold(&self, lo: f64, hi: f64) -> bool {
        self.thresholds().iter().any(|&t| t >= lo && t <= hi)
    }

    /// `d(E) = min_a d(E, a)`.
    pub fn distance(&self, e: f64) -> f64 {
        distance_to_threshold_with(e, self, self.fallback)
    }

    /// CSV with columns `cluster,eigenvalue,residual`; zero is listed last.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "cluster,eigenvalue,residual")?;
        for c in &self.clusters {
            for (e, r) in c.eigenvalues.iter().zip(&c.residuals) {
                writeln!(w, "{},{e:?},{r:?}", c.cluster.label())?;
            }
        }
        writeln!(w, "zero,0.0,0.0")?;
        Ok(())
    }
}

/// `d(E)` with the table's fallback constant.
pub fn distance_to_threshold(e: f64, table: &ThresholdTable) -> f64 {
    table.distance(e)
}

/// `d(E)` with an explicit fallback constant `b`.
pub fn distance_to_threshold_with(e: f64, table: &ThresholdTable, fallback: f64) -> f64 {
    table
        .clusters
        .iter()
        .map(|c| c.distance(e, fallback))
        .fold(f64::INFINITY, f64::min)
}

/// Bound states of the three subsystem Hamiltonians on a 1-particle grid.
pub fn threshold_table(
    model: &ThreeBodyModel,
    grid: &GridSpec,
    opts: &ThresholdOptions,
) -> Result<ThresholdTable> {
    grid.ensure_particles(1)?;
    let clusters = par::try_map_range(ClusterId::TWO_CLUSTER.len(), |i| {
        let a = ClusterId::TWO_CLUSTER[i];
        cluster_levels(model, a, grid, opts).map_err(|e| Error::ClusterSolve {
            cluster: a,
            source: Box::new(e),
        })
    })?;
    Ok(ThresholdTable {
        clusters,
        fallback: opts.fallback,
    })
}

fn cluster_levels(
    model: &ThreeBodyModel,
    a: ClusterId,
    grid: &GridSpec,
    opts: &ThresholdOptions,
) -> Result<ClusterThresholds> {
    let h = model.subsystem(a)?;
    let found = bound_states(&h, grid, opts)?;
    let dense_discrepancy = if grid.len() <= DENSE_LIMIT && !h.potentials.is_empty() {
        let d = dense_spectrum(&h, grid, found.len() + 1)?;
        let mut worst = 0.0f64;
        for (k, e) in found.eigenvalues.iter().enumerate() {
            worst = worst.max((e - d.eigenvalues[k]).abs());
        }
        Some(worst)
    } else {
        None
    };
    Ok(ClusterThresholds {
        cluster: a,
        eigenvalues: found.eigenvalues,
        residuals: found.residuals,
        dense_discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(levels: Vec<f64>) -> ThresholdTable {
        ThresholdTable::from_levels(
            &[
                (ClusterId::PhotonFree, levels),
                (ClusterId::ElectronFree, vec![]),
                (ClusterId::Pair, vec![]),
            ],
            1.0,
        )
    }

    #[test]
    fn piecewise_distance() {
        let t = table(vec![-1.0]);
        assert!((t.distance(-0.4) - 0.6).abs() < 1e-15);
        assert_eq!(t.distance(-1.5), 1.0);
        assert_eq!(t.distance(-1.0), 0.0);
        assert_eq!(t.distance(0.0), 0.0);
        assert!((t.distance(0.25) - 0.25).abs() < 1e-15);
        assert_eq!(distance_to_threshold_with(-1.5, &t, 3.0), 3.0);
    }

    #[test]
    fn threshold_set_includes_zero() {
        let t = table(vec![-1.0, -0.25]);
        assert_eq!(t.thresholds(), vec![-1.0, -0.25, 0.0]);
        assert!(t.contains_threshold(-0.3, -0.2));
        assert!(!t.contains_threshold(-0.9, -0.3));
    }
}
