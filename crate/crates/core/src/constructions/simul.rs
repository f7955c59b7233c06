use super::grid::{grid_band, grid_radius};
use super::schedule::{phi_schedule, Role, Schedule, WindowMap};
use crate::approx::{fit_with, make_compact, ApproxCertificate, Disk, FitOptions, PiecewiseTarget, TargetPiece};
use crate::error::{Error, Result};
use crate::logscalar::LogScalar;
use crate::norms::sup_norm;
use crate::poly::ComplexPolynomial;
use crate::verify::{angle_mesh, b_mesh, sweep_mesh, SweepFamily, WitnessRecord};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Overlap factor for the open-interval covering of `[−n, n]`.
const COVER_OVERLAP: f64 = 0.999;
const SCHEDULE_LEN: usize = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulOptions {
    pub l: usize,
    pub n: u64,
    pub eps: f64,
    pub f: ComplexPolynomial,
    /// Minimal window index `K`.
    pub k_min: usize,
    pub phi: WindowMap,
    /// `(n_k)`, `(m_k)`, `(t_k)`; greedy φ-schedules from 1 when absent.
    pub schedules: Option<[Schedule; 3]>,
    /// Continuity radius `δ` (angles and `b`).
    pub delta: f64,
    /// Continuity constant `C_l > 1`.
    pub c_l: f64,
    /// Verification mesh: unit-circle angles and `b` values in `[−n, n]`.
    pub angles: usize,
    pub b_points: usize,
}

impl SimulOptions {
    pub fn new(l: usize, n: u64, eps: f64, f: ComplexPolynomial) -> Self {
        Self {
            l,
            n,
            eps,
            f,
            k_min: 1,
            phi: WindowMap { growth: 1.0 },
            schedules: None,
            delta: 0.1,
            c_l: 2.0,
            angles: 16,
            b_points: 5,
        }
    }
}

/// Grid bands `m` (so `S_m` lives in `[mR, (m+1)R)`) placed inside consecutive schedule windows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandPlan {
    /// First and last schedule index used.
    pub k_first: usize,
    pub k_last: usize,
    pub windows: Vec<(u64, u64)>,
    pub bands: Vec<u64>,
    /// Centres of the parameter cover, one per band.
    pub centers: Vec<f64>,
    /// `Σ δR⁻¹/(m+1)` over the bands of the windows used.
    pub budget: f64,
}

/// One derivative block `e^{−b s} S^s f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QBlock {
    pub b: f64,
    pub s: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulArtifact {
    pub x: ComplexPolynomial,
    pub p: ComplexPolynomial,
    pub q: ComplexPolynomial,
    pub l: usize,
    pub n: u64,
    pub eps: f64,
    pub f: ComplexPolynomial,
    /// Disk radius `m(l)`; grid spacing is `4 m(l)`.
    pub m_l: f64,
    pub c_l: f64,
    pub delta: f64,
    pub grid_r: f64,
    pub k0: usize,
    pub n_window: (u64, u64),
    pub translation: BandPlan,
    pub real_translation: BandPlan,
    pub schedules: [Schedule; 3],
    pub phi: WindowMap,
    pub angle_mesh: Vec<C64>,
    pub b_mesh: Vec<f64>,
    pub blocks: Vec<QBlock>,
    pub certificate: Option<ApproxCertificate>,
    pub witnesses: Vec<WitnessRecord>,
}

/// Derivative, rotated translation and real translation meshes with their windows.
fn sweep_families(
    angles: &[C64],
    bs: &[f64],
    n_window: (u64, u64),
    translation: &[(u64, u64)],
    real_translation: &[(u64, u64)],
) -> Vec<(SweepFamily, Vec<(u64, u64)>)> {
    vec![
        (SweepFamily::Derivative { mu: C64::new(1.0, 0.0), b_mesh: bs.to_vec() }, vec![n_window]),
        (SweepFamily::Translation { a_mesh: angles.to_vec(), b_mesh: bs.to_vec() }, translation.to_vec()),
        (SweepFamily::Translation { a_mesh: vec![C64::new(1.0, 0.0)], b_mesh: bs.to_vec() }, real_translation.to_vec()),
    ]
}

impl SimulArtifact {
    /// The three meshes swept at build time, with their windows.
    pub fn sweep_plan(&self) -> Vec<(SweepFamily, Vec<(u64, u64)>)> {
        sweep_families(&self.angle_mesh, &self.b_mesh, self.n_window, &self.translation.windows, &self.real_translation.windows)
    }
}

/// `H(x) = Σ_{m=1}^{x} 1/m`.
fn harmonic(x: u64) -> f64 {
    if x <= 4096 {
        return (1..=x).map(|m| 1.0 / m as f64).sum();
    }
    let xf = x as f64;
    xf.ln() + 0.577_215_664_901_532_9 + 0.5 / xf - 1.0 / (12.0 * xf * xf)
}

/// Bands `m ≥ floor` with `[Rm, R(m+1)) ⊂ [lo, hi]`, as an inclusive range.
fn bands_in(window: (u64, u64), r: u64, floor: u64) -> Option<(u64, u64)> {
    let first = window.0.div_ceil(r).max(floor);
    let end = (window.1 + 1) / r;
    (end > first).then(|| (first, end - 1))
}

/// First `k ≥ k_min` from which consecutive windows give `Σ δR⁻¹/(m+1) > need`, then the
/// fewest bands whose intervals of radius `δR⁻¹/(m+1)` cover `[−n, n]`.
fn plan_bands(
    sched: &Schedule,
    phi: &WindowMap,
    k_min: usize,
    r: u64,
    delta: f64,
    n: f64,
    floor: u64,
    name: &str,
) -> Result<BandPlan> {
    let need = 2.0 * n;
    let unit = delta / r as f64;
    let mut best = 0.0f64;
    for k in k_min.max(1)..=sched.len() {
        let mut budget = 0.0;
        let mut windows = Vec::new();
        for k2 in k..=sched.len() {
            let w = phi.window(sched.get(k2).unwrap());
            windows.push(w);
            if let Some((a, b)) = bands_in(w, r, floor) {
                budget += unit * (harmonic(b + 1) - harmonic(a));
            }
            if budget > need {
                let (bands, centers, used) = cover(&windows, r, floor, unit, n)?;
                windows.truncate(used);
                return Ok(BandPlan {
                    k_first: k,
                    k_last: k + windows.len() - 1,
                    windows,
                    bands,
                    centers,
                    budget,
                });
            }
        }
        best = best.max(budget);
    }
    Err(Error::WindowSelection(format!(
        "{name}-schedule too sparse: harmonic budget Σ δR⁻¹/(m+1) = {best:.3e} over windows k ≥ {k_min} \
         (R = {r}, δ = {delta}) cannot exceed 2n = {need}"
    )))
}

/// Greedy open cover of `[−n, n]` by `]c_k − ρ_k, c_k + ρ_k[` with `ρ_k = unit/(m_k+1)`.
/// Also returns how many leading windows were used.
fn cover(windows: &[(u64, u64)], r: u64, floor: u64, unit: f64, n: f64) -> Result<(Vec<u64>, Vec<f64>, usize)> {
    let (mut bands, mut centers) = (Vec::new(), Vec::new());
    let mut reach = -n;
    for (wi, &w) in windows.iter().enumerate() {
        let Some((a, b)) = bands_in(w, r, floor) else { continue };
        let mut m = a;
        while m <= b {
            let rho = unit / (m + 1) as f64;
            let c = reach + COVER_OVERLAP * rho;
            bands.push(m);
            centers.push(c);
            reach = c + COVER_OVERLAP * rho;
            if c + rho > n && reach > n - 1e-15 {
                return Ok((bands, centers, wi + 1));
            }
            if bands.len() > 1 << 20 {
                return Err(Error::Construction("b-cover needs more than 2^20 grid bands".into()));
            }
            m += 1;
        }
    }
    Err(Error::WindowSelection("cover of [−n, n] incomplete despite the harmonic budget".into()))
}

fn trivial_plan(sched: &Schedule, phi: &WindowMap, k_min: usize) -> Result<BandPlan> {
    let k = k_min.max(1);
    let v = sched
        .get(k)
        .ok_or_else(|| Error::WindowSelection(format!("schedule has no entry {k}")))?;
    Ok(BandPlan {
        k_first: k,
        k_last: k,
        windows: vec![phi.window(v)],
        bands: vec![],
        centers: vec![],
        budget: 0.0,
    })
}

fn default_schedules(phi: &WindowMap) -> [Schedule; 3] {
    [
        phi_schedule(phi, 1, SCHEDULE_LEN),
        phi_schedule(phi, 1, SCHEDULE_LEN).with_role(Role::RotationTranslation),
        phi_schedule(phi, 1, SCHEDULE_LEN).with_role(Role::RealTranslation),
    ]
}

/// `x = P + Q` with `p_l(x) < eps` and a recorded in-window witness for every point of the
/// angle × `b` verification mesh, for `e^{bs}D^s`, `e^{bs}T_a^s` and `e^{bs}T_1^s`.
pub fn simul_build(opts: &SimulOptions) -> Result<SimulArtifact> {
    let SimulOptions { l, n, eps, ref f, k_min, phi, delta, c_l, .. } = *opts;
    if l == 0 || n == 0 || !(eps > 0.0) || !(delta > 0.0) || !(c_l > 1.0) || opts.angles == 0 || opts.b_points == 0 {
        return Err(Error::InvalidInput(
            "need l, n ≥ 1, eps, δ > 0, C_l > 1 and nonempty meshes".into(),
        ));
    }
    let schedules = opts.schedules.clone().unwrap_or_else(|| default_schedules(&phi));
    for s in &schedules {
        if !s.is_phi_increasing(&phi) {
            return Err(Error::InvalidInput(format!("schedule {:?} is not φ-increasing", s.values)));
        }
    }
    let [ns, ms, ts] = &schedules;
    let lf = l as f64;
    let m_l = lf + 1.0;
    let spacing = 4.0 * m_l;
    let grid_r = grid_radius(delta, spacing, 1)?;
    let r = grid_r as u64;
    let nf = n as f64;
    let angles = angle_mesh(opts.angles);
    let bs = b_mesh(nf, opts.b_points);

    let (translation, real_translation) = if f.is_zero() {
        // Every iterate of 0 hits the target 0: one window each, no grid.
        (trivial_plan(ms, &phi, k_min)?, trivial_plan(ts, &phi, k_min)?)
    } else {
        let translation = plan_bands(ms, &phi, k_min, r, delta, nf, 0, "m")?;
        let floor = translation.bands.last().copied().unwrap_or(0) + 1;
        let real_translation = plan_bands(ts, &phi, k_min, r, delta, nf, floor, "t")?;
        (translation, real_translation)
    };

    // Translation part P: zero near the origin, e^{−b|z|} f(· − z) on every D(z, m(l)).
    let mut disks = vec![Disk::new(C64::new(0.0, 0.0), m_l)?];
    let mut pieces = vec![TargetPiece::zero()];
    for plan in [&translation, &real_translation] {
        for (&band, &b) in plan.bands.iter().zip(&plan.centers) {
            let g = grid_band(delta, spacing, band, grid_r)?;
            for z in g.points {
                disks.push(Disk::new(z, m_l)?);
                pieces.push(TargetPiece {
                    base: f.clone(),
                    shift: z,
                    scale: LogScalar::exp_real(-b * z.norm()),
                });
            }
        }
    }
    let big_n = disks.iter().map(|d| d.center.norm()).fold(0.0, f64::max);
    let ln_tol = (eps / (2.0 * c_l)).ln() - nf * big_n;
    if ln_tol < (1e-300f64).ln() {
        return Err(Error::ApproximationFailure {
            best_ratio: f64::INFINITY,
            best_degree: 0,
            best_errors: vec![],
            reason: format!("tolerance ε/(2C_l)·e^(−nN) = e^{ln_tol:.1} is below double range (N = {big_n})"),
        });
    }
    let mut tol = vec![eps / 2.0];
    tol.extend(std::iter::repeat(ln_tol.exp()).take(disks.len() - 1));
    let (p, certificate) = if f.is_zero() {
        (ComplexPolynomial::zero(), None)
    } else {
        let compact = make_compact(disks)?;
        let (p, c) = fit_with(&compact, &PiecewiseTarget::new(pieces), &FitOptions::new(eps).with_tolerances(tol))?;
        (p, Some(c))
    };

    // Derivative part Q: degree-disjoint blocks e^{−b_q s_q} S^{s_q} f above deg P.
    let gap = f.degree() as u64 + 1;
    let span = gap * (bs.len() as u64 - 1);
    let k0 = (k_min.max(1)..=ns.len())
        .find(|&k| {
            let v = ns.get(k).unwrap();
            v > p.degree() as u64 && span <= phi.phi(v)
        })
        .ok_or_else(|| {
            Error::WindowSelection(format!(
                "n-schedule has no window above deg P = {} holding {} blocks",
                p.degree(),
                bs.len()
            ))
        })?;
    let n_window = phi.window(ns.get(k0).unwrap());
    let blocks: Vec<QBlock> = bs
        .iter()
        .enumerate()
        .map(|(i, &b)| QBlock { b, s: n_window.0 + gap * i as u64 })
        .collect();
    let mut q = ComplexPolynomial::zero();
    for blk in &blocks {
        let part = f.scaled_antiderivative(blk.s as usize, LogScalar::exp_real(-blk.b * blk.s as f64))?;
        q = &q + &part;
    }
    let x = &p + &q;

    let px = sup_norm(&x, lf, LogScalar::ONE);
    if !(px.sampled_sup() < eps) {
        return Err(Error::Construction(format!("p_l(x) = {:.3e} is not below eps = {eps}", px.sampled_sup())));
    }
    let mut witnesses = Vec::new();
    let sweeps = sweep_families(&angles, &bs, n_window, &translation.windows, &real_translation.windows);
    for (family, windows) in &sweeps {
        let rep = sweep_mesh(&x, family, windows, f, lf, eps)?;
        if let Some(w) = rep.witnesses.iter().find(|w| !w.found) {
            return Err(Error::Construction(format!(
                "no witness for a = {}, b = {} ({:?}); best error {:.3e}",
                w.a, w.b, w.kind, w.error
            )));
        }
        witnesses.extend(rep.witnesses);
    }
    Ok(SimulArtifact {
        x,
        p,
        q,
        l,
        n,
        eps,
        f: f.clone(),
        m_l,
        c_l,
        delta,
        grid_r,
        k0,
        n_window,
        translation,
        real_translation,
        schedules,
        phi,
        angle_mesh: angles,
        b_mesh: bs,
        blocks,
        certificate,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_matches_sum() {
        let direct: f64 = (1..=10_000u64).map(|m| 1.0 / m as f64).sum();
        assert!((harmonic(10_000) - direct).abs() < 1e-10);
    }

    #[test]
    fn band_containment() {
        let (a, b) = bands_in((100, 420), 50, 0).unwrap();
        assert_eq!((a, b), (2, 7));
        assert!(50 * a >= 100 && 50 * (b + 1) <= 421);
    }

    #[test]
    fn zero_target_gives_zero() {
        let a = simul_build(&SimulOptions::new(1, 1, 0.5, ComplexPolynomial::zero())).unwrap();
        assert!(a.x.is_zero());
        assert_eq!(a.witnesses.len(), 5 + 16 * 5 + 5);
        assert!(a.witnesses.iter().all(|w| w.found && w.error == 0.0));
    }

    #[test]
    fn sparse_schedule_is_reported() {
        let e = simul_build(&SimulOptions::new(1, 1, 0.5, ComplexPolynomial::z()));
        assert!(matches!(e, Err(Error::WindowSelection(msg)) if msg.contains("m-schedule")));
    }
}
