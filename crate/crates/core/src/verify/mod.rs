//! Independent verification: every measurement is recomputed from the raw polynomials.

pub mod checks;
pub mod orbit;
pub mod report;

pub use checks::{check_bump, check_grid, check_lem1, check_mk, check_nk, check_simul, check_x0, DEFAULT_TOL_SLACK};
pub use orbit::{
    angle_mesh, b_mesh, orbit_error, orbit_visit, orbit_visit_windows, perturbation_probe, probe_radii, sweep_mesh, OperatorSpec,
    SweepFamily, Visit,
};
pub use report::{Check, Metadata, OperatorKind, Side, VerificationReport, WitnessRecord};
