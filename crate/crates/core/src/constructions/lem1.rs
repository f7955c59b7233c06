use crate::approx::{fit_with, make_compact, ApproxCertificate, Disk, FitOptions, Guard, PiecewiseTarget, TargetPiece};
use crate::error::{Error, Result};
use crate::poly::ComplexPolynomial;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Penalty on `|z| = R` at `1e14 × eps`. Close disks need fast-growing approximants, and
/// the default guard stops them short of `eps`; this bound still keeps the rounding noise of
/// the monomial coefficients near `1e-2 × eps`.
pub const LEM1_GUARD: Guard = Guard {
    radius_factor: 1.0,
    bound: None,
    headroom: 1e14,
};

/// Output of [`lem1_perturb`]: `P` plus the fit that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub p: ComplexPolynomial,
    pub j: f64,
    pub a: C64,
    pub n: u64,
    pub eps: f64,
    pub f: ComplexPolynomial,
    /// `D(0, j)` and `D(a·n, j)`.
    pub disks: [Disk; 2],
    pub certificate: ApproxCertificate,
}

/// `P` with `p_j(P) < eps` and `p_j(T_a^n(P + f)) < eps`.
///
/// `p_j(T_a^n g)` is the sup of `|g|` over `D(a·n, j)`, so the fit asks for `0` on
/// `D(0, j)` and `−f` on `D(a·n, j)`.
pub fn lem1_perturb(j: f64, a: C64, n: u64, eps: f64, f: &ComplexPolynomial) -> Result<Perturbation> {
    if !(j > 0.0) || !(eps > 0.0) {
        return Err(Error::InvalidInput("j and eps must be positive".into()));
    }
    if a.norm() == 0.0 {
        return Err(Error::InvalidInput("a must be nonzero".into()));
    }
    let near = Disk::new(C64::new(0.0, 0.0), j)?;
    let far = Disk::new(a * n as f64, j)?;
    if !(n as f64 * a.norm() > 2.0 * j) {
        return Err(Error::Geometry {
            first: 0,
            second: 1,
            detail: format!("n|a| = {} does not exceed 2j = {}", n as f64 * a.norm(), 2.0 * j),
        });
    }
    let compact = make_compact(vec![near, far])?;
    let target = PiecewiseTarget::new(vec![TargetPiece::zero(), TargetPiece::poly(-f)]);
    let (p, certificate) = fit_with(&compact, &target, &FitOptions { guard: Some(LEM1_GUARD), ..FitOptions::new(eps) })?;
    Ok(Perturbation {
        p,
        j,
        a,
        n,
        eps,
        f: f.clone(),
        disks: [near, far],
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_f_gives_zero() {
        let r = lem1_perturb(1.0, C64::new(1.0, 0.0), 3, 0.1, &ComplexPolynomial::zero()).unwrap();
        assert!(r.p.is_zero());
    }

    #[test]
    fn too_close_is_geometry_error() {
        let e = lem1_perturb(1.0, C64::new(1.0, 0.0), 1, 0.1, &ComplexPolynomial::one());
        assert!(matches!(e, Err(Error::Geometry { .. })));
    }
}
