//! Polynomial approximation on finite unions of disjoint closed disks.
//!
//! Stands in for Mergelyan's theorem: weighted discrete least squares on
//! boundary samples, degree escalation, and an a-posteriori check on a denser,
//! offset grid that never reuses the fitting points.

mod lsq;

pub use lsq::{COND_LIMIT, MAX_ENTRIES};

use crate::error::{Error, Result};
use crate::logscalar::LogScalar;
use crate::poly::ComplexPolynomial;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Margin for strict disjointness of disks belonging to different pieces.
pub const DISJOINT_MARGIN: f64 = 1e-12;
/// Interior spot samples per disk in the verification grid.
pub const INTERIOR_SAMPLES: usize = 32;
/// Lawson reweighting is used only below this many matrix entries.
pub const LAWSON_MAX_ENTRIES: usize = 1_500_000;
/// Reweighting rounds per degree.
pub const LAWSON_ITERS: usize = 25;
/// Ladder rungs at degree ≥ `LADDER_BASE` without a better error ratio before the fit gives up.
pub const STALL_RUNGS: usize = 4;
/// Default cap on the fitted degree.
pub const LADDER_BASE: usize = 16;
pub const DEFAULT_MAX_DEGREE: usize = 2048;

/// Closed disk `D(center, radius)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: C64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidInput(format!("disk D({center}, {radius}) is not valid")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    /// `sup |z|` over the disk.
    pub fn max_modulus(&self) -> f64 {
        self.center.norm() + self.radius
    }

    /// Gap between the two boundaries (negative when they overlap).
    pub fn gap(&self, other: &Disk) -> f64 {
        (self.center - other.center).norm() - self.radius - other.radius
    }
}

/// A compact made of pieces; each piece is a union of closed disks sharing one target.
///
/// Disks of different pieces are strictly disjoint. In the common case every piece
/// is a single disk; overlapping disks inside one piece describe the sector and
/// strip shaped windows used by the family constructions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskUnionCompact {
    disks: Vec<Disk>,
    piece_of: Vec<usize>,
    pieces: usize,
}

/// Validates pairwise strict disjointness; one piece per disk.
pub fn make_compact(disks: Vec<Disk>) -> Result<DiskUnionCompact> {
    DiskUnionCompact::clustered(disks.into_iter().map(|d| vec![d]).collect())
}

impl DiskUnionCompact {
    /// Builds a compact from groups of disks; disks may overlap only inside a group.
    pub fn clustered(groups: Vec<Vec<Disk>>) -> Result<Self> {
        if groups.is_empty() || groups.iter().any(|g| g.is_empty()) {
            return Err(Error::InvalidInput("compact needs at least one disk per piece".into()));
        }
        let mut disks = Vec::new();
        let mut piece_of = Vec::new();
        for (p, g) in groups.iter().enumerate() {
            for d in g {
                Disk::new(d.center, d.radius)?;
                disks.push(*d);
                piece_of.push(p);
            }
        }
        for i in 0..disks.len() {
            for j in (i + 1)..disks.len() {
                if piece_of[i] == piece_of[j] {
                    continue;
                }
                let gap = disks[i].gap(&disks[j]);
                if !(gap > DISJOINT_MARGIN) {
                    return Err(Error::Geometry {
                        first: i,
                        second: j,
                        detail: format!(
                            "D({}, {}) and D({}, {}) have boundary gap {gap:.3e}",
                            disks[i].center, disks[i].radius, disks[j].center, disks[j].radius
                        ),
                    });
                }
            }
        }
        Ok(Self {
            disks,
            piece_of,
            pieces: groups.len(),
        })
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    pub fn piece_count(&self) -> usize {
        self.pieces
    }

    pub fn piece_of(&self, disk: usize) -> usize {
        self.piece_of[disk]
    }

    pub fn piece_disks(&self, piece: usize) -> impl Iterator<Item = &Disk> {
        self.disks
            .iter()
            .zip(self.piece_of.iter())
            .filter(move |(_, p)| **p == piece)
            .map(|(d, _)| d)
    }

    /// `R = max(|c| + r)` over all disks.
    pub fn max_modulus(&self) -> f64 {
        self.disks.iter().map(|d| d.max_modulus()).fold(0.0, f64::max)
    }

    pub fn piece_max_modulus(&self, piece: usize) -> f64 {
        self.piece_disks(piece).map(|d| d.max_modulus()).fold(0.0, f64::max)
    }

    pub fn piece_contains_origin(&self, piece: usize) -> bool {
        self.piece_disks(piece).any(|d| d.contains(C64::new(0.0, 0.0)))
    }

    /// `(disk, z)` for `per_disk` equispaced points on each circle, rotated by `offset`
    /// steps, dropping points that lie strictly inside another disk of the same piece.
    pub fn boundary_samples(&self, per_disk: usize, offset: f64) -> Vec<(usize, C64)> {
        let mut out = Vec::with_capacity(self.disks.len() * per_disk);
        for (i, d) in self.disks.iter().enumerate() {
            let piece = self.piece_of[i];
            for k in 0..per_disk {
                let t = 2.0 * PI * (k as f64 + offset) / per_disk as f64;
                let z = d.center + C64::from_polar(d.radius, t);
                let covered = self.disks.iter().enumerate().any(|(j, e)| {
                    j != i && self.piece_of[j] == piece && (z - e.center).norm() < e.radius * (1.0 - 1e-12)
                });
                if !covered {
                    out.push((i, z));
                }
            }
        }
        out
    }

    /// Sunflower points, uniform in `r² × angle`, inside every disk.
    pub fn interior_samples(&self, per_disk: usize) -> Vec<(usize, C64)> {
        let golden = PI * (3.0 - 5f64.sqrt());
        let mut out = Vec::with_capacity(self.disks.len() * per_disk);
        for (i, d) in self.disks.iter().enumerate() {
            for k in 0..per_disk {
                let r = d.radius * ((k as f64 + 0.5) / per_disk as f64).sqrt();
                out.push((i, d.center + C64::from_polar(r, k as f64 * golden)));
            }
        }
        out
    }
}

/// Target `scale · base(z − shift)` on one piece.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetPiece {
    pub base: ComplexPolynomial,
    pub shift: C64,
    pub scale: LogScalar,
}

impl TargetPiece {
    pub fn zero() -> Self {
        Self::poly(ComplexPolynomial::zero())
    }

    pub fn poly(base: ComplexPolynomial) -> Self {
        Self {
            base,
            shift: C64::new(0.0, 0.0),
            scale: LogScalar::ONE,
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::poly(ComplexPolynomial::constant(c))
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() || self.scale.is_zero()
    }

    pub fn eval(&self, z: C64) -> C64 {
        if self.is_zero() {
            return C64::new(0.0, 0.0);
        }
        self.scale.apply(self.base.eval(z - self.shift))
    }

    /// The target as one polynomial in `z`, if representable.
    pub fn expand(&self) -> Result<ComplexPolynomial> {
        if self.is_zero() {
            return Ok(ComplexPolynomial::zero());
        }
        self.base.taylor_shift(-self.shift)?.scale_log(self.scale)
    }
}

/// One [`TargetPiece`] per piece of the companion compact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseTarget {
    pub pieces: Vec<TargetPiece>,
}

impl PiecewiseTarget {
    pub fn new(pieces: Vec<TargetPiece>) -> Self {
        Self { pieces }
    }

    fn check(&self, compact: &DiskUnionCompact) -> Result<()> {
        if self.pieces.len() != compact.piece_count() {
            return Err(Error::InvalidInput(format!(
                "target has {} pieces, compact has {}",
                self.pieces.len(),
                compact.piece_count()
            )));
        }
        Ok(())
    }
}

/// Penalty circle `|z| = radius_factor · R` on which the fit is asked to stay below `bound`.
///
/// Keeps coefficient growth, and hence rounding noise on the compact, under control.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Guard {
    pub radius_factor: f64,
    /// Explicit bound; `None` means `headroom × smallest disk tolerance`.
    pub bound: Option<f64>,
    pub headroom: f64,
}

impl Default for Guard {
    fn default() -> Self {
        Self {
            radius_factor: 1.05,
            bound: None,
            headroom: 1e12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Nominal tolerance; used for every disk unless `tolerances` is given.
    pub eps: f64,
    /// Per-disk tolerances (absolute).
    pub tolerances: Option<Vec<f64>>,
    pub min_valuation: usize,
    pub max_degree: usize,
    /// Explicit degree ladder; defaults to `ceil(16·1.5^t)`.
    pub degrees: Option<Vec<usize>>,
    pub guard: Option<Guard>,
}

impl FitOptions {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            tolerances: None,
            min_valuation: 0,
            max_degree: DEFAULT_MAX_DEGREE,
            degrees: None,
            guard: Some(Guard::default()),
        }
    }

    pub fn with_tolerances(mut self, tol: Vec<f64>) -> Self {
        self.tolerances = Some(tol);
        self
    }

    pub fn with_valuation(mut self, d: usize) -> Self {
        self.min_valuation = d;
        self
    }

    pub fn with_max_degree(mut self, n: usize) -> Self {
        self.max_degree = n;
        self
    }

    pub fn with_degrees(mut self, degrees: Vec<usize>) -> Self {
        self.degrees = Some(degrees);
        self
    }

    pub fn without_guard(mut self) -> Self {
        self.guard = None;
        self
    }
}

/// `ceil(16·1.5^t)` up to `max_degree` (or `[max_degree]` when that is below 16).
pub fn degree_ladder(max_degree: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut t = 0;
    loop {
        let d = (LADDER_BASE as f64 * 1.5f64.powi(t)).ceil() as usize;
        if d > max_degree {
            break;
        }
        out.push(d);
        t += 1;
    }
    if out.is_empty() {
        out.push(max_degree);
    }
    out
}

/// A fitted polynomial's independently measured errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxCertificate {
    pub requested_eps: f64,
    /// Tolerance of each disk (all equal to `requested_eps` unless set per disk).
    pub tolerances: Vec<f64>,
    pub fitted_degree: usize,
    pub min_valuation: usize,
    #[serde(with = "crate::serde_float::vec")]
    pub verified_error: Vec<f64>,
    pub verification_samples: usize,
}

impl ApproxCertificate {
    pub fn is_valid(&self) -> bool {
        self.verified_error
            .iter()
            .zip(self.tolerances.iter())
            .all(|(e, t)| e < t)
    }

    /// `max_i error_i / tol_i`.
    pub fn worst_ratio(&self) -> f64 {
        self.verified_error
            .iter()
            .zip(self.tolerances.iter())
            .map(|(e, t)| e / t)
            .fold(0.0, f64::max)
    }
}

/// Fits with a single tolerance; see [`fit_with`].
pub fn fit(
    compact: &DiskUnionCompact,
    target: &PiecewiseTarget,
    eps: f64,
    min_valuation: usize,
    max_degree: usize,
) -> Result<(ComplexPolynomial, ApproxCertificate)> {
    let opts = FitOptions::new(eps)
        .with_valuation(min_valuation)
        .with_max_degree(max_degree);
    fit_with(compact, target, &opts)
}

enum QTarget<'a> {
    Plain(&'a TargetPiece),
    Divided(TargetPiece),
    PointwiseDivided(&'a TargetPiece, usize),
}

impl QTarget<'_> {
    fn eval(&self, z: C64) -> C64 {
        match self {
            QTarget::Plain(t) => t.eval(z),
            QTarget::Divided(t) => t.eval(z),
            QTarget::PointwiseDivided(t, d) => t.eval(z) / z.powu(*d as u32),
        }
    }
}

/// Fits `P` with `val(P) ≥ min_valuation` and `|P − target| < tol` on every disk.
///
/// With `d = min_valuation > 0` the fit is done for `Q` against `target/z^d`, with each
/// disk's tolerance divided by `(max |z|)^d`, and `P = z^d Q` is returned.
pub fn fit_with(
    compact: &DiskUnionCompact,
    target: &PiecewiseTarget,
    opts: &FitOptions,
) -> Result<(ComplexPolynomial, ApproxCertificate)> {
    target.check(compact)?;
    let nd = compact.disks().len();
    let tolerances = match &opts.tolerances {
        Some(t) if t.len() == nd => t.clone(),
        Some(t) => {
            return Err(Error::InvalidInput(format!(
                "{} tolerances for {nd} disks",
                t.len()
            )))
        }
        None => vec![opts.eps; nd],
    };
    if tolerances.iter().any(|t| !(*t > 0.0)) || !(opts.eps > 0.0) {
        return Err(Error::InvalidInput("tolerances must be positive".into()));
    }
    let d = opts.min_valuation;
    let cert = |p: &ComplexPolynomial, degree: usize, density: usize| {
        let errs = verify_fit(p, compact, target, density);
        ApproxCertificate {
            requested_eps: opts.eps,
            tolerances: tolerances.clone(),
            fitted_degree: degree,
            min_valuation: d,
            verified_error: errs,
            verification_samples: verification_count(compact, density),
        }
    };

    // Exact shortcuts: all-zero targets, and one common target on every piece.
    if target.pieces.iter().all(|t| t.is_zero()) {
        let p = ComplexPolynomial::zero();
        let c = cert(&p, 0, 4 * 64);
        return Ok((p, c));
    }
    if target.pieces.windows(2).all(|w| w[0] == w[1]) {
        if let Ok(p) = target.pieces[0].expand() {
            if p.valuation().at_least(d) && p.degree() <= opts.max_degree {
                let density = 4 * 64.max(4 * (p.degree() + 1));
                let c = cert(&p, p.degree(), density);
                if c.is_valid() {
                    return Ok((p, c));
                }
            }
        }
    }

    let np = compact.piece_count();
    let mut qtargets = Vec::with_capacity(np);
    for (i, t) in target.pieces.iter().enumerate() {
        if d == 0 {
            qtargets.push(QTarget::Plain(t));
        } else if compact.piece_contains_origin(i) {
            if !t.is_zero() && (t.shift != C64::new(0.0, 0.0) || !t.base.valuation().at_least(d)) {
                return Err(Error::InvalidInput(format!(
                    "piece {i} contains 0 but its target is not divisible by z^{d}"
                )));
            }
            let base = t.base.div_z_pow(d).unwrap_or_default();
            qtargets.push(QTarget::Divided(TargetPiece {
                base,
                shift: t.shift,
                scale: t.scale,
            }));
        } else {
            qtargets.push(QTarget::PointwiseDivided(t, d));
        }
    }
    let mut qtol = Vec::with_capacity(nd);
    for (i, disk) in compact.disks().iter().enumerate() {
        let tq = (tolerances[i].ln() - d as f64 * disk.max_modulus().ln()).exp();
        if !(tq > 1e-300) {
            return Err(Error::ApproximationFailure {
                best_ratio: f64::INFINITY,
                best_degree: 0,
                best_errors: vec![],
                reason: format!("tolerance of disk {i} underflows after division by |z|^{d}"),
            });
        }
        qtol.push(tq);
    }

    let r_basis = compact.max_modulus();
    let guard_bound = opts.guard.map(|g| {
        let min_tol = qtol.iter().copied().fold(f64::INFINITY, f64::min);
        (g.radius_factor * r_basis, g.bound.unwrap_or(g.headroom * min_tol))
    });
    let ladder: Vec<usize> = opts
        .degrees
        .clone()
        .unwrap_or_else(|| degree_ladder(opts.max_degree))
        .into_iter()
        .filter(|n| n + d <= opts.max_degree)
        .collect();
    if ladder.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no admissible degree with valuation {d} under max_degree {}",
            opts.max_degree
        )));
    }

    let lr = r_basis.ln();
    let to_p = |y: &[C64]| -> Option<ComplexPolynomial> {
        let coeffs: Vec<C64> = y
            .iter()
            .enumerate()
            .map(|(k, c)| if *c == C64::new(0.0, 0.0) { *c } else { c * (-(k as f64) * lr).exp() })
            .collect();
        ComplexPolynomial::from_coeffs(coeffs).ok().map(|q| q.mul_z_pow(d))
    };

    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut stop_reason = String::from("max_degree reached");
    let mut stalled = 0usize;
    'ladder: for &n in &ladder {
        if stalled >= STALL_RUNGS {
            stop_reason = format!("no improvement over {STALL_RUNGS} degree steps");
            break;
        }
        let best_before = best.as_ref().map_or(f64::INFINITY, |b| b.0);
        let per = 64.max(4 * (n + 1));
        let mut rows: Vec<(f64, C64, C64)> = compact
            .boundary_samples(per, 0.0)
            .into_iter()
            .map(|(i, z)| (1.0 / qtol[i], z, qtargets[compact.piece_of(i)].eval(z)))
            .collect();
        let fitted = rows.len();
        if let Some((rg, mg)) = guard_bound {
            for k in 0..per {
                let z = C64::from_polar(rg, 2.0 * PI * k as f64 / per as f64);
                rows.push((1.0 / mg, z, C64::new(0.0, 0.0)));
            }
        }
        if rows.iter().any(|(_, _, v)| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NumericOverflow("target values are not representable".into()));
        }
        let base_w: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let lawson = rows.len() * (n + 1) <= LAWSON_MAX_ENTRIES;
        let mut lw = vec![1.0f64; fitted];
        let mut valid: Option<(f64, ComplexPolynomial, ApproxCertificate)> = None;
        let iterations = if lawson { LAWSON_ITERS } else { 1 };
        for it in 0..iterations {
            let y = match lsq::solve_scaled_monomial(&rows, n, r_basis) {
                Ok((y, _)) => y,
                Err(e @ (Error::Conditioning { .. } | Error::ProblemTooLarge { .. })) => {
                    if it > 0 {
                        break;
                    }
                    if best.is_none() {
                        return Err(e);
                    }
                    stop_reason = e.to_string();
                    break 'ladder;
                }
                Err(e) => return Err(e),
            };
            let Some(p) = to_p(&y) else {
                if it > 0 {
                    break;
                }
                stop_reason = format!("coefficients at degree {n} are not representable");
                break 'ladder;
            };
            let c = cert(&p, n + d, 4 * per);
            let ratio = c.worst_ratio();
            if best.as_ref().map_or(true, |b| ratio < b.0) {
                best = Some((ratio, n + d, c.verified_error.clone()));
            }
            if c.is_valid() {
                // Keep reweighting while the margin still improves.
                match &valid {
                    Some((r, _, _)) if ratio >= *r => break,
                    _ => valid = Some((ratio, p, c)),
                }
            } else if valid.is_some() {
                break;
            }
            if it + 1 == iterations {
                break;
            }
            // Lawson step: reweight fitting rows by their scaled residuals.
            let q = ComplexPolynomial::from_coeffs(y.clone()).unwrap_or_default();
            for (i, row) in rows.iter().take(fitted).enumerate() {
                let r = (q.eval(row.1 / r_basis) - row.2).norm() * base_w[i];
                lw[i] *= if r.is_finite() { r } else { 1.0 };
            }
            let mean = lw.iter().sum::<f64>() / fitted as f64;
            if !(mean > 0.0) || !mean.is_finite() {
                break;
            }
            for (i, row) in rows.iter_mut().take(fitted).enumerate() {
                lw[i] = (lw[i] / mean).max(1e-12);
                row.0 = base_w[i] * lw[i].sqrt();
            }
        }
        if let Some((_, p, c)) = valid {
            return Ok((p, c));
        }
        let now = best.as_ref().map_or(f64::INFINITY, |b| b.0);
        if n >= LADDER_BASE {
            stalled = if now < 0.99 * best_before { 0 } else { stalled + 1 };
        }
    }
    let (best_ratio, best_degree, best_errors) = best.unwrap_or((f64::INFINITY, 0, vec![]));
    Err(Error::ApproximationFailure {
        best_ratio,
        best_degree,
        best_errors,
        reason: stop_reason,
    })
}

fn verification_count(compact: &DiskUnionCompact, density: usize) -> usize {
    compact.boundary_samples(density, 0.5).len() + INTERIOR_SAMPLES * compact.disks().len()
}

/// Per-disk `max |P − target|` over a boundary grid of `grid_density` points per circle
/// (offset half a step from the fitting grid) plus interior spot samples.
pub fn verify_fit(
    p: &ComplexPolynomial,
    compact: &DiskUnionCompact,
    target: &PiecewiseTarget,
    grid_density: usize,
) -> Vec<f64> {
    let mut samples = compact.boundary_samples(grid_density, 0.5);
    samples.extend(compact.interior_samples(INTERIOR_SAMPLES));
    let nd = compact.disks().len();
    samples
        .par_iter()
        .fold(
            || vec![0.0f64; nd],
            |mut acc, (disk, z)| {
                let t = &target.pieces[compact.piece_of(*disk)];
                let e = (p.eval(*z) - t.eval(*z)).norm();
                let e = if e.is_nan() { f64::INFINITY } else { e };
                if e > acc[*disk] {
                    acc[*disk] = e;
                }
                acc
            },
        )
        .reduce(
            || vec![0.0f64; nd],
            |a, b| a.iter().zip(b.iter()).map(|(x, y)| x.max(*y)).collect(),
        )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn d(re: f64, im: f64, r: f64) -> Disk {
        Disk::new(c(re, im), r).unwrap()
    }

    #[test]
    fn compact_validation() {
        assert!(make_compact(vec![d(0.0, 0.0, 1.0), d(5.0, 0.0, 1.0)]).is_ok());
        assert!(make_compact(vec![d(0.0, 0.0, 1.0), d(-3.0, 0.0, 1.0), d(0.0, 3.0, 1.0)]).is_ok());
        match make_compact(vec![d(0.0, 0.0, 1.0), d(1.5, 0.0, 1.0)]) {
            Err(Error::Geometry { first, second, .. }) => assert_eq!((first, second), (0, 1)),
            other => panic!("{other:?}"),
        }
        // tangent disks are rejected too
        assert!(make_compact(vec![d(0.0, 0.0, 1.0), d(2.0, 0.0, 1.0)]).is_err());
        assert!(Disk::new(c(0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn ladder_matches_rule() {
        assert_eq!(degree_ladder(200), vec![16, 24, 36, 54, 81, 122, 183]);
        assert_eq!(degree_ladder(10), vec![10]);
    }

    #[test]
    fn zero_target_gives_zero() {
        let k = make_compact(vec![d(0.0, 0.0, 1.0), d(5.0, 0.0, 1.0)]).unwrap();
        let t = PiecewiseTarget::new(vec![TargetPiece::zero(), TargetPiece::zero()]);
        let (p, cert) = fit(&k, &t, 1e-3, 0, 2048).unwrap();
        assert!(p.is_zero());
        assert!(cert.verified_error.iter().all(|e| *e == 0.0));
    }

    #[test]
    fn single_disk_polynomial_is_expanded() {
        let k = make_compact(vec![d(2.0, 1.0, 0.5)]).unwrap();
        let q = ComplexPolynomial::from_real(&[1.0, -2.0, 0.5]);
        let t = PiecewiseTarget::new(vec![TargetPiece {
            base: q.clone(),
            shift: c(2.0, 1.0),
            scale: LogScalar::exp_real(0.5),
        }]);
        let (p, cert) = fit(&k, &t, 1e-9, 0, 2048).unwrap();
        assert_eq!(p.degree(), 2);
        assert!(cert.verified_error[0] < 1e-13);
    }

    #[test]
    fn verify_detects_constant_offset() {
        let k = make_compact(vec![d(0.0, 0.0, 1.0)]).unwrap();
        let q = ComplexPolynomial::from_real(&[0.0, 1.0]);
        let t = PiecewiseTarget::new(vec![TargetPiece::poly(q.clone())]);
        let shifted = &q + &ComplexPolynomial::constant(c(0.25, 0.0));
        let e = verify_fit(&shifted, &k, &t, 256);
        assert!((e[0] - 0.25).abs() < 1e-14);
        assert_eq!(verify_fit(&q, &k, &t, 256)[0], 0.0);
    }

    #[test]
    fn clustered_boundary_drops_covered_points() {
        let g = vec![d(0.0, 0.0, 1.0), d(1.0, 0.0, 1.0)];
        let k = DiskUnionCompact::clustered(vec![g]).unwrap();
        let s = k.boundary_samples(64, 0.0);
        assert!(s.len() < 128 && s.len() > 64);
        for (_, z) in s {
            assert!((z.norm() - 1.0).abs() < 1e-9 || ((z - c(1.0, 0.0)).norm() - 1.0).abs() < 1e-9);
            assert!(z.norm() >= 1.0 - 1e-9 && (z - c(1.0, 0.0)).norm() >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn valuation_precondition_on_origin_piece() {
        let k = make_compact(vec![d(0.0, 0.0, 1.0), d(5.0, 0.0, 1.0)]).unwrap();
        let t = PiecewiseTarget::new(vec![TargetPiece::constant(c(1.0, 0.0)), TargetPiece::zero()]);
        let opts = FitOptions::new(0.1).with_valuation(2);
        assert!(matches!(fit_with(&k, &t, &opts), Err(Error::InvalidInput(_))));
    }
}
