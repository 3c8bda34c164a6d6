//! Explicit finite-difference solver for the Allen-Cahn equation
//! `phi_t = -F'(phi) / eps^2 + lap(phi)`, `F(phi) = (phi^2 - 1)^2 / 4`,
//! on uniform 2D/3D grids with zero-Neumann boundaries.
//!
//! Two step implementations share one scheme: a per-cell reference loop
//! and a padded cross-stencil convolution that runs in parallel over rows.

pub mod analysis;
pub mod config;
pub mod dump;
pub mod error;
pub mod grid;
pub mod harness;
pub mod init;
pub mod output;
pub mod params;
pub mod preset;
pub mod real;
pub mod stepper;

pub use analysis::{Diagnostics, PhaseStats};
pub use config::ConfigFile;
pub use error::{Error, Result};
pub use grid::{GridSpec, ScalarField};
pub use init::{InitialCondition, StarBranch};
pub use params::{default_params, epsilon_m, Backend, RunConfig, SchemeParams};
pub use preset::{preset, ExperimentPreset};
pub use real::{Precision, Real};
pub use stepper::{run, run_dual, run_dual_with, DualReport, RunReport, StencilKernel, Stepper};
