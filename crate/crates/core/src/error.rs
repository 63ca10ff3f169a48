use thiserror::Error;

use crate::lattice::ClusterId;

/// Every failure the laboratory reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("coordinate tag {tag} is not defined on a {particles}-particle grid")]
    IncompatibleTag { tag: &'static str, particles: usize },

    #[error("cluster {0} does not have two clusters")]
    NotTwoCluster(ClusterId),

    #[error("grid with {size} sites is too large for dense diagonalization (limit {limit}); use an iterative solver")]
    GridTooLarge { size: usize, limit: usize },

    #[error("solver did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("eigensolver failed on cluster {cluster}: {source}")]
    ClusterSolve {
        cluster: ClusterId,
        #[source]
        source: Box<Error>,
    },

    #[error("state has mass {mass:e} outside the interior region (limit {limit:e})")]
    BoundaryMass { mass: f64, limit: f64 },

    #[error("quadrature did not reach tolerance {tol:e}; achieved {achieved:e}")]
    QuadratureTolerance { tol: f64, achieved: f64 },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("partition cover fails in direction ({x:.6}, {y:.6})")]
    CoverFailure { x: f64, y: f64 },

    #[error("evolution left the box at t = {time}: boundary mass {mass:e}")]
    BoundaryBreach { time: f64, mass: f64 },

    #[error("malformed wavefunction dump: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
