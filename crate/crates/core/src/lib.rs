//! Numerical laboratory for a dispersive three-body model: an electron with
//! kinetic energy `p^2`, a massless photon with `|k|`, and a fixed center.
//!
//! Everything runs on periodic FFT grids with one dimension per particle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commutator;
pub mod error;
pub mod lattice;
pub mod par;
pub mod partition;
pub mod propagation;
pub mod random;
pub mod spectral;

pub use error::{Error, Result};
pub use lattice::{ClusterId, GridSpec, HamiltonianSpec, ThreeBodyModel, WaveFunction};
