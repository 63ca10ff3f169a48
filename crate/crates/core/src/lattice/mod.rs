//! Grids, wavefunctions, Fourier multipliers, cluster charts and potentials.

mod cluster;
pub mod dump;
pub mod fft;
mod grid;
mod hamiltonian;
mod model;
mod potential;
mod symbol;
mod wave;

pub use cluster::{cluster_coordinates, ChartPoint, ClusterId};
pub use grid::{make_grid, GridSpec};
pub use hamiltonian::{apply_hamiltonian, CoordTag, DiscreteHamiltonian, HamiltonianSpec};
pub use model::ThreeBodyModel;
pub use potential::{PotentialFamily, PotentialSpec, TabulatedProfile};
pub use symbol::{apply_multiplier, apply_multiplier_field, apply_multiplier_fn, DispersionSymbol};
pub use wave::WaveFunction;
