//! Finite-stage constructions for common hypercyclic subspaces of `μD` and `T_a`
//! on entire functions, together with independent numerical verification.
//!
//! Entire functions are truncated to [`ComplexPolynomial`]s. Norms `p_j` are
//! sup norms on closed disks, `p'_j` are weighted coefficient sums.

pub mod approx;
pub mod constructions;
pub mod error;
pub mod logscalar;
pub mod norms;
pub mod poly;
pub mod serde_float;
pub mod verify;

pub use approx::{
    fit, fit_with, make_compact, verify_fit, ApproxCertificate, Disk, DiskUnionCompact, FitOptions,
    PiecewiseTarget, TargetPiece,
};
pub use error::{Error, Result};
pub use logscalar::LogScalar;
pub use norms::{coeff_norm, log_coeff_norm, monomial_ratio, sup_norm, NormEstimate};
pub use poly::{ComplexPolynomial, Valuation};

pub use num_complex::Complex64 as C64;

/// Relative tolerance used for equality assertions between computed quantities.
pub const REL_TOL: f64 = 1e-10;
/// Absolute slack (scaled by the larger side) for norm inequalities.
pub const INEQ_SLACK: f64 = 1e-9;
