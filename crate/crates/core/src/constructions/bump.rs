use super::schedule::{Schedule, WindowMap};
use super::windows::{plan_mt, sector_cover, strip_cover};
use crate::approx::{degree_ladder, fit_with, DEFAULT_MAX_DEGREE, ApproxCertificate, Disk, DiskUnionCompact, FitOptions, PiecewiseTarget, TargetPiece};
use crate::error::{Error, Result};
use crate::poly::ComplexPolynomial;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Tolerance for `|P − z^d|` on `D(0,1)`; keeps `p_1(P) ≥ 1 − 0.45`.
pub const UNIT_TOL: f64 = 0.45;
/// Fraction of `eps` requested from the fit on the windows.
pub const WINDOW_MARGIN: f64 = 0.9;

/// Windows of a family bump: stage `j` uses `m_{k1[j-1]}` and `t_{k2[j-1]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpWindows {
    pub phi: WindowMap,
    pub m: Schedule,
    pub t: Schedule,
    pub k1: Vec<usize>,
    pub k2: Vec<usize>,
    /// Growth `b` in `e^{bk}`.
    pub b: f64,
    /// `C = sup |z|` over the compact.
    pub reach: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub p: ComplexPolynomial,
    pub d: usize,
    pub k: usize,
    pub eps: f64,
    /// Pair mode translation parameter; `None` for the family version.
    pub a: Option<C64>,
    /// Pair mode: `m_1..m_k`.
    pub m: Vec<u64>,
    pub windows: Option<BumpWindows>,
    pub certificate: ApproxCertificate,
}

/// Degrees `1..16` before the usual ladder: bump degrees feed later valuations, so small
/// solutions are worth trying first.
fn bump_degrees() -> Vec<usize> {
    let mut v: Vec<usize> = (1..16).collect();
    v.extend(degree_ladder(DEFAULT_MAX_DEGREE));
    v
}

fn unit_disk() -> Disk {
    Disk {
        center: C64::new(0.0, 0.0),
        radius: 1.0,
    }
}

fn unit_target(d: usize) -> TargetPiece {
    TargetPiece::poly(ComplexPolynomial::monomial(d, C64::new(1.0, 0.0)))
}

/// `P` with `val(P) ≥ d`, `p_1(P) ≥ 1/2` and `p_j(T_a^{m_j} P) < eps` for `j ≤ k`.
///
/// Fits `z^d` on `D(0,1)` and `0` on every `D(a·m_j, j)`.
pub fn lem2_bump(a: C64, m: &Schedule, k: usize, eps: f64, d: usize) -> Result<Bump> {
    if !(eps > 0.0) || a.norm() == 0.0 || k == 0 {
        return Err(Error::InvalidInput("need eps > 0, a ≠ 0 and k ≥ 1".into()));
    }
    if m.len() < k {
        return Err(Error::InvalidInput(format!("m-schedule has {} < {k} entries", m.len())));
    }
    let m1 = m.get(1).unwrap() as f64 * a.norm();
    if !(m1 > 2.0) {
        return Err(Error::Geometry {
            first: 0,
            second: 1,
            detail: format!("m_1|a| = {m1} does not exceed 2"),
        });
    }
    let mut groups = vec![vec![unit_disk()]];
    for j in 1..=k {
        groups.push(vec![Disk::new(a * m.get(j).unwrap() as f64, j as f64)?]);
    }
    let compact = DiskUnionCompact::clustered(groups)?;
    let mut pieces = vec![unit_target(d)];
    pieces.extend((0..k).map(|_| TargetPiece::zero()));
    let mut tol = vec![UNIT_TOL];
    tol.extend((0..k).map(|_| WINDOW_MARGIN * eps));
    let opts = FitOptions::new(eps).with_tolerances(tol).with_valuation(d).with_degrees(bump_degrees());
    let (p, certificate) = fit_with(&compact, &PiecewiseTarget::new(pieces), &opts)?;
    Ok(Bump {
        p,
        d,
        k,
        eps,
        a: Some(a),
        m: m.values[..k].to_vec(),
        windows: None,
        certificate,
    })
}

/// Family version: `p_j(e^{bk} T_a^k P) < eps` for every `a` outside the arc `|arg a| < 1/j`
/// and `k` in the `m`-window of stage `j`, and `p_j(e^{bk} T_1^k P) < eps` on the `t`-window.
///
/// The fit asks for `|Q| < eps / (e^{bC} C^d)` away from `D(0,1)` through `P = z^d Q`.
pub fn lem2_bump_family(
    m: &Schedule,
    t: &Schedule,
    phi: &WindowMap,
    s: usize,
    b: f64,
    eps: f64,
    d: usize,
) -> Result<Bump> {
    if !(eps > 0.0) || !(b >= 0.0) || s == 0 {
        return Err(Error::InvalidInput("need eps > 0, b ≥ 0 and s ≥ 1".into()));
    }
    let (k1, k2) = plan_mt(m, t, phi, s, 1.0, &|j| j as f64)?;
    let mut groups = vec![vec![unit_disk()]];
    for j in 1..=s {
        let jf = j as f64;
        let (lo, hi) = phi.window(m.get(k1[j - 1]).unwrap());
        groups.push(sector_cover(lo, hi, jf, 1.0 / jf));
        let (lo, hi) = phi.window(t.get(k2[j - 1]).unwrap());
        groups.push(strip_cover(lo, hi, jf));
    }
    let compact = DiskUnionCompact::clustered(groups)?;
    let reach = compact.max_modulus();
    let window_tol = (eps.ln() - b * reach).exp() * WINDOW_MARGIN;
    if !(window_tol > 0.0) {
        return Err(Error::ApproximationFailure {
            best_ratio: f64::INFINITY,
            best_degree: 0,
            best_errors: vec![],
            reason: format!("window tolerance eps·e^(-bC) underflows at C = {reach}"),
        });
    }
    let mut pieces = vec![unit_target(d)];
    pieces.extend((1..compact.piece_count()).map(|_| TargetPiece::zero()));
    let tol: Vec<f64> = (0..compact.disks().len())
        .map(|i| if compact.piece_of(i) == 0 { UNIT_TOL } else { window_tol })
        .collect();
    let opts = FitOptions::new(eps).with_tolerances(tol).with_valuation(d).with_degrees(bump_degrees());
    let (p, certificate) = fit_with(&compact, &PiecewiseTarget::new(pieces), &opts)?;
    Ok(Bump {
        p,
        d,
        k: s,
        eps,
        a: None,
        m: vec![],
        windows: Some(BumpWindows {
            phi: *phi,
            m: m.clone(),
            t: t.clone(),
            k1,
            k2,
            b,
            reach,
        }),
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::schedule::Role;
    use crate::norms::sup_norm;
    use crate::LogScalar;

    fn sched(v: &[u64]) -> Schedule {
        Schedule::new(v.to_vec(), Role::RotationTranslation).unwrap()
    }

    #[test]
    fn basic_bump() {
        let b = lem2_bump(C64::new(1.0, 0.0), &sched(&[3]), 1, 0.1, 0).unwrap();
        assert!(b.certificate.is_valid());
        assert!(sup_norm(&b.p, 1.0, LogScalar::ONE).sampled_sup() >= 0.5);
    }

    #[test]
    fn valuation_is_structural() {
        let b = lem2_bump(C64::new(1.0, 0.0), &sched(&[6]), 1, 0.1, 5).unwrap();
        assert!(b.p.valuation().at_least(5));
    }

    #[test]
    fn close_window_is_geometry_error() {
        let e = lem2_bump(C64::new(1.0, 0.0), &sched(&[1]), 1, 0.1, 0);
        assert!(matches!(e, Err(Error::Geometry { .. })));
    }
}
