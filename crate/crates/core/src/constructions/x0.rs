use super::schedule::{phi_default, phi_schedule, Role, Schedule, WindowMap};
use super::windows::{default_mt_schedules, first_above, plan_mt, sector_cover, strip_cover, FAMILY_SCHEDULE_LEN};
use crate::approx::{fit_with, ApproxCertificate, Disk, DiskUnionCompact, FitOptions, PiecewiseTarget, TargetPiece};
use crate::error::{Error, Result};
use crate::norms::sup_norm;
use crate::poly::{ln_factorial, ComplexPolynomial};
use crate::logscalar::LogScalar;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Default degree budgets tried in turn; every fit of one build uses the same budget.
pub const DEFAULT_BUDGETS: [usize; 5] = [24, 36, 54, 81, 122];
/// Fits aim at this fraction of each stage bound.
pub const FIT_MARGIN: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One pair `μD`, `T_a`.
    Pair,
    /// `e^b D` for all `b`, and `e^b T_a` over `a` on the circle, with φ-windows.
    Family,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageEntry {
    pub l: usize,
    pub k: usize,
    pub p: ComplexPolynomial,
    pub certificate: ApproxCertificate,
}

/// Window indices chosen per stage in family mode (1-based indices into the schedules).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyWindows {
    pub phi: WindowMap,
    pub k0: Vec<usize>,
    pub k1: Vec<usize>,
    pub k2: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct X0Artifact {
    pub mode: Mode,
    pub mu: C64,
    pub a: C64,
    pub stages: usize,
    pub seeds: Vec<ComplexPolynomial>,
    pub entries: Vec<StageEntry>,
    /// Pair mode: `n_1..n_K`. Family mode: the full φ-schedule.
    pub n_schedule: Schedule,
    pub m_schedule: Schedule,
    pub t_schedule: Option<Schedule>,
    pub family: Option<FamilyWindows>,
    pub degree_budget: usize,
    /// Radius of every translation window disk (pair mode).
    pub window_radius: f64,
    pub vectors: Vec<ComplexPolynomial>,
}

impl X0Artifact {
    /// `P_{l,k}`; `k == l` is the seed.
    pub fn p(&self, l: usize, k: usize) -> Option<&ComplexPolynomial> {
        if k == l {
            return self.seeds.get(l);
        }
        self.entries.iter().find(|e| e.l == l && e.k == k).map(|e| &e.p)
    }

    /// Number of seeds that start a series (`l < min(len, K + 1)`).
    pub fn series_count(&self) -> usize {
        self.seeds.len().min(self.stages + 1)
    }

    /// `Σ_{i=l}^{upto} P_{l,i}`.
    pub fn partial_sum(&self, l: usize, upto: usize) -> ComplexPolynomial {
        partial_sum(&self.seeds, &self.entries, l, upto)
    }

    fn window(&self, sched: &Schedule, idx: &[usize], s: usize) -> Option<(u64, u64)> {
        let fam = self.family.as_ref()?;
        let v = sched.get(*idx.get(s.checked_sub(1)?)?)?;
        Some(fam.phi.window(v))
    }

    pub fn n_window(&self, s: usize) -> Option<(u64, u64)> {
        self.window(&self.n_schedule, &self.family.as_ref()?.k0, s)
    }

    pub fn m_window(&self, s: usize) -> Option<(u64, u64)> {
        self.window(&self.m_schedule, &self.family.as_ref()?.k1, s)
    }

    pub fn t_window(&self, s: usize) -> Option<(u64, u64)> {
        self.window(self.t_schedule.as_ref()?, &self.family.as_ref()?.k2, s)
    }
}

fn partial_sum(seeds: &[ComplexPolynomial], entries: &[StageEntry], l: usize, upto: usize) -> ComplexPolynomial {
    let mut acc = seeds.get(l).cloned().unwrap_or_default();
    for e in entries.iter().filter(|e| e.l == l && e.k <= upto) {
        acc = &acc + &e.p;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct X0Options {
    pub mu: C64,
    pub a: C64,
    pub stages: usize,
    pub mode: Mode,
    pub phi: Option<WindowMap>,
    /// Pair mode: distance between consecutive window centers.
    pub spacing: f64,
    pub budgets: Vec<usize>,
    /// Family mode: explicit `(n, m, t)` schedules, generated when absent.
    pub schedules: Option<[Schedule; 3]>,
}

impl X0Options {
    pub fn pair(mu: C64, a: C64, stages: usize) -> Self {
        Self {
            mu,
            a,
            stages,
            mode: Mode::Pair,
            phi: None,
            spacing: 300.0,
            budgets: DEFAULT_BUDGETS.to_vec(),
            schedules: None,
        }
    }

    pub fn family(stages: usize, phi: WindowMap) -> Self {
        Self {
            mu: C64::new(1.0, 0.0),
            a: C64::new(1.0, 0.0),
            stages,
            mode: Mode::Family,
            phi: Some(phi),
            spacing: 300.0,
            budgets: DEFAULT_BUDGETS.to_vec(),
            schedules: None,
        }
    }
}

/// `{0, 1, z, iz, z², 1+z}`.
pub fn default_seeds() -> Vec<ComplexPolynomial> {
    vec![
        ComplexPolynomial::zero(),
        ComplexPolynomial::one(),
        ComplexPolynomial::z(),
        ComplexPolynomial::monomial(1, C64::new(0.0, 1.0)),
        ComplexPolynomial::monomial(2, C64::new(1.0, 0.0)),
        ComplexPolynomial::from_real(&[1.0, 1.0]),
    ]
}

fn retryable(e: &Error) -> bool {
    matches!(
        e,
        Error::ApproximationFailure { .. }
            | Error::Conditioning { .. }
            | Error::ProblemTooLarge { .. }
            | Error::Construction(_)
    )
}

/// Builds the triangular family `P_{l,k}` and schedules for `K` stages.
///
/// All fits of one attempt share a degree budget `B`; the first budget for which
/// every stage succeeds is kept.
pub fn x0_build(seeds: &[ComplexPolynomial], opts: &X0Options) -> Result<X0Artifact> {
    if seeds.is_empty() {
        return Err(Error::InvalidInput("at least one seed is required".into()));
    }
    if opts.budgets.is_empty() {
        return Err(Error::InvalidInput("no degree budget given".into()));
    }
    let mut last = None;
    for &b in &opts.budgets {
        let r = match opts.mode {
            Mode::Pair => build_pair(seeds, opts, b),
            Mode::Family => build_family(seeds, opts, b),
        };
        match r {
            Ok(a) => return Ok(a),
            Err(Error::StageFailure { l, k, source }) if retryable(&source) => last = Some((l, k, *source)),
            Err(e) => return Err(e),
        }
    }
    let (l, k, e) = last.expect("at least one budget was tried");
    Err(Error::stage(l, k, e))
}

fn stage_targets(parts: usize, current: &[usize], value: &ComplexPolynomial) -> PiecewiseTarget {
    PiecewiseTarget::new(
        (0..parts)
            .map(|i| {
                if current.contains(&i) {
                    TargetPiece::poly(-value)
                } else {
                    TargetPiece::zero()
                }
            })
            .collect(),
    )
}

fn fixed_degree(tolerances: Vec<f64>, budget: usize) -> FitOptions {
    let eps = tolerances.iter().copied().fold(f64::INFINITY, f64::min);
    FitOptions::new(eps)
        .with_tolerances(tolerances)
        .with_degrees(vec![budget])
        .with_max_degree(budget)
}

fn build_pair(seeds: &[ComplexPolynomial], opts: &X0Options, budget: usize) -> Result<X0Artifact> {
    let big_k = opts.stages;
    let (mu, a) = (opts.mu, opts.a);
    if a.norm() == 0.0 {
        return Err(Error::InvalidInput("a must be nonzero".into()));
    }
    let rw = big_k.max(1) as f64;
    let r0 = rw + 1.0;
    let step = (opts.spacing / a.norm()).ceil().max(1.0) as u64;
    let m: Vec<u64> = (1..=big_k as u64).map(|k| step * k).collect();
    let mut disks = vec![Disk::new(C64::new(0.0, 0.0), r0)?];
    for &mk in &m {
        disks.push(Disk::new(a * mk as f64, rw)?);
    }
    let compact = if big_k > 0 {
        Some(crate::approx::make_compact(disks)?)
    } else {
        None
    };

    let mut n: Vec<u64> = Vec::with_capacity(big_k);
    let mut entries: Vec<StageEntry> = Vec::new();
    for k in 1..=big_k {
        let nk = if k == 1 {
            seeds[0].degree() as u64 + 1
        } else {
            let mut d = budget.max(n[k - 2] as usize);
            for l in 0..k {
                if let Some(p) = if l == k - 1 { seeds.get(l) } else { entries.iter().find(|e| e.l == l && e.k == k - 1).map(|e| &e.p) } {
                    d = d.max(p.degree());
                }
            }
            d as u64 + 1
        };
        n.push(nk);
        let bound = 0.5f64.powi(k as i32);
        // Cauchy: p_k((μD)^n P) ≤ |μ|^n n! η / (r0 − k)^n when |P| ≤ η on D(0, r0).
        let ln_growth = n
            .iter()
            .filter(|&&nj| nj as usize <= budget)
            .map(|&nj| {
                nj as f64 * mu.norm().ln() + ln_factorial(nj) - nj as f64 * (r0 - k as f64).ln()
            })
            .fold(0.0f64, f64::max);
        let eta = FIT_MARGIN * bound * (-ln_growth).exp();
        let mut tol = vec![eta];
        tol.extend(std::iter::repeat(FIT_MARGIN * bound).take(big_k));
        let compact = compact.as_ref().expect("K ≥ 1");
        for l in 0..k.min(seeds.len()) {
            let prev = partial_sum(seeds, &entries, l, k - 1);
            let target = stage_targets(big_k + 1, &[k], &prev);
            let (p, certificate) =
                fit_with(compact, &target, &fixed_degree(tol.clone(), budget)).map_err(|e| Error::stage(l, k, e))?;
            for &nj in &n {
                let d = p
                    .derivative_iter(nj as usize, mu)
                    .map_err(|e| Error::stage(l, k, e))?;
                let est = sup_norm(&d, k as f64, LogScalar::ONE);
                if !(est.sampled_sup() < FIT_MARGIN * bound) {
                    return Err(Error::stage(
                        l,
                        k,
                        Error::Construction(format!("derivative bullet with n = {nj} not met")),
                    ));
                }
            }
            entries.push(StageEntry { l, k, p, certificate });
        }
    }
    let vectors = (0..seeds.len().min(big_k + 1))
        .map(|l| partial_sum(seeds, &entries, l, big_k))
        .collect();
    Ok(X0Artifact {
        mode: Mode::Pair,
        mu,
        a,
        stages: big_k,
        seeds: seeds.to_vec(),
        entries,
        n_schedule: Schedule::new(n, Role::Derivative)?,
        m_schedule: Schedule::new(m, Role::RotationTranslation)?,
        t_schedule: None,
        family: None,
        degree_budget: budget,
        window_radius: rw,
        vectors,
    })
}

struct FamilyPlan {
    n: Schedule,
    m: Schedule,
    t: Schedule,
    k0: Vec<usize>,
    k1: Vec<usize>,
    k2: Vec<usize>,
}

fn plan_family(
    seeds: &[ComplexPolynomial],
    big_k: usize,
    phi: &WindowMap,
    budget: usize,
    given: Option<&[Schedule; 3]>,
) -> Result<FamilyPlan> {
    let kf = big_k as f64;
    let dmax = seeds.iter().map(|p| p.degree()).max().unwrap_or(0).max(budget) as u64;
    let (n, m, t) = match given {
        Some([n, m, t]) => {
            for s in [n, m, t] {
                if !s.is_phi_increasing(phi) {
                    return Err(Error::InvalidInput(format!("schedule {:?} is not φ-increasing", s.values)));
                }
            }
            (n.clone(), m.clone(), t.clone())
        }
        None => {
            let (m, t) = default_mt_schedules(phi, kf, kf);
            (phi_schedule(phi, dmax + 1, FAMILY_SCHEDULE_LEN), m, t)
        }
    };
    let mut k0 = Vec::new();
    for s in 1..=big_k {
        let i0 = first_above(&n, k0.last().copied().unwrap_or(0), dmax).ok_or_else(|| {
            Error::WindowSelection(format!("n-schedule has no entry above degree {dmax} for stage {s}"))
        })?;
        k0.push(i0);
    }
    let (k1, k2) = plan_mt(&m, &t, phi, big_k, kf, &|_| kf)?;
    Ok(FamilyPlan { n, m, t, k0, k1, k2 })
}

fn build_family(seeds: &[ComplexPolynomial], opts: &X0Options, budget: usize) -> Result<X0Artifact> {
    let big_k = opts.stages;
    let phi = opts.phi.unwrap_or_else(|| phi_default(1.0));
    let plan = plan_family(seeds, big_k, &phi, budget, opts.schedules.as_ref())?;
    let mut entries: Vec<StageEntry> = Vec::new();
    let mut past_hi = 0u64;
    for s in 1..=big_k {
        let sf = s as f64;
        let bound = 0.5f64.powi(s as i32);
        let (m_lo, m_hi) = phi.window(plan.m.get(plan.k1[s - 1]).unwrap());
        let (t_lo, t_hi) = phi.window(plan.t.get(plan.k2[s - 1]).unwrap());
        let rho0 = if s == 1 { sf } else { past_hi as f64 + sf };
        let groups = vec![
            vec![Disk::new(C64::new(0.0, 0.0), rho0)?],
            sector_cover(m_lo, m_hi, sf, 1.0 / sf),
            strip_cover(t_lo, t_hi, sf),
        ];
        let compact = DiskUnionCompact::clustered(groups)?;
        // A window disk centred at distance k carries the factor e^{s k}.
        let tol: Vec<f64> = compact
            .disks()
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let k = if i == 0 { past_hi as f64 } else { d.center.norm().round() };
                FIT_MARGIN * bound * (-sf * k).exp()
            })
            .collect();
        for l in 0..s.min(seeds.len()) {
            let prev = partial_sum(seeds, &entries, l, s - 1);
            let target = stage_targets(3, &[1, 2], &prev);
            let (p, certificate) =
                fit_with(&compact, &target, &fixed_degree(tol.clone(), budget)).map_err(|e| Error::stage(l, s, e))?;
            entries.push(StageEntry { l, k: s, p, certificate });
        }
        past_hi = t_hi;
    }
    let vectors = (0..seeds.len().min(big_k + 1))
        .map(|l| partial_sum(seeds, &entries, l, big_k))
        .collect();
    Ok(X0Artifact {
        mode: Mode::Family,
        mu: opts.mu,
        a: opts.a,
        stages: big_k,
        seeds: seeds.to_vec(),
        entries,
        n_schedule: plan.n,
        m_schedule: plan.m,
        t_schedule: Some(plan.t),
        family: Some(FamilyWindows {
            phi,
            k0: plan.k0,
            k1: plan.k1,
            k2: plan.k2,
        }),
        degree_budget: budget,
        window_radius: big_k as f64,
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_stages_keeps_seeds() {
        let seeds = vec![ComplexPolynomial::one(), ComplexPolynomial::z()];
        let art = x0_build(&seeds, &X0Options::pair(C64::new(1.0, 0.0), C64::new(1.0, 0.0), 0)).unwrap();
        assert!(art.entries.is_empty());
        assert_eq!(art.vectors.len(), 1);
        assert_eq!(art.seeds, seeds);
    }
}
