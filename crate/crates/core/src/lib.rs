//! Spatiotemporal Schmidt decomposition of SPDC biphotons.
//!
//! The two-photon amplitude of a rotationally symmetric pump depends on
//! the azimuthal angles only through their difference, so a transform over
//! that difference splits the six-variable problem into independent
//! `(q, omega)` kernels, one per OAM index `l`.

pub mod analysis;
pub mod bench;
pub mod biphoton;
pub mod cli;
pub mod config;
pub mod container;
pub mod correlation;
pub mod dispersion;
pub mod error;
pub mod export;
pub mod grid;
pub mod highgain;
mod linalg;
pub mod oracle;
pub mod presets;
pub mod quadrature;
pub mod schmidt;

pub use error::{Error, Result};
