//! Finite-stage constructions: perturbations, the `X_0` family, bumps, `M_k` bases,
//! schedules, Shkarin grids and the simultaneous approximant.

pub mod bump;
pub mod grid;
pub mod lem1;
pub mod mk;
pub mod schedule;
pub mod simul;
pub mod windows;
pub mod x0;

pub use bump::{lem2_bump, lem2_bump_family, Bump, BumpWindows};
pub use grid::{grid_band, grid_radius, shkarin_grid, GridArtifact};
pub use lem1::{lem1_perturb, Perturbation};
pub use mk::{compute_nk, compute_ns_family, default_m_schedule, mk_basis, MkArtifact, MkOptions};
pub use simul::{simul_build, BandPlan, QBlock, SimulArtifact, SimulOptions};
pub use schedule::{phi_default, phi_schedule, Role, Schedule, WindowMap};
pub use x0::{default_seeds, x0_build, Mode, StageEntry, X0Artifact, X0Options};
