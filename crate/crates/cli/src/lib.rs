//! Command-line front end for the scattering laboratory: configs, experiment
//! runs with manifests, and the acceptance suite.

pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod suite;

pub use config::{Experiment, ExperimentConfig};
pub use error::{CliError, Result};
pub use experiments::{run, RunOptions, RunReport};

/// Size the global rayon pool. Without the `parallel` feature this is a no-op.
pub fn set_threads(threads: usize) -> Result<()> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Failed(format!("cannot size the thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}
