use super::bump::{lem2_bump, lem2_bump_family, Bump};
use super::schedule::{phi_schedule, Role, Schedule, WindowMap};
use super::windows::{default_mt_schedules, FAMILY_SCHEDULE_LEN};
use super::x0::Mode;
use crate::error::{Error, Result};
use crate::norms::log_monomial_ratio;
use crate::poly::{ln_falling, ComplexPolynomial};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Exponents scanned past the last violation before the majorant takes over.
pub const SEARCH_MARGIN: u64 = 512;

/// Scans `n = 1, 2, ...` for the last `n` where `bad(n)` holds, stopping once `SEARCH_MARGIN`
/// clean exponents have passed and `tail_ok(n)` certifies every larger `n`.
fn threshold(bad: impl Fn(u64) -> bool, tail_ok: impl Fn(u64) -> bool) -> u64 {
    let mut last_bad = 0u64;
    let mut n = 1u64;
    loop {
        if bad(n) {
            last_bad = n;
        } else if n >= last_bad + SEARCH_MARGIN && tail_ok(n) {
            return last_bad + 1;
        }
        n += 1;
    }
}

/// Smallest `N` with `p'_j((μD)^{n_i} z^n) ≤ p'_{2j}(z^n)` for all `n ≥ N` and `i, j ≤ k`.
///
/// The tail is closed by `max(1,|μ|)^{n_k} n^{n_k} / 2^n ≤ 1`, which dominates every ratio
/// and is decreasing once `n > n_k / ln 2`.
pub fn compute_nk(mu: C64, prefix: &[u64], k: usize) -> Result<u64> {
    if k == 0 || prefix.len() < k {
        return Err(Error::InvalidInput(format!(
            "need k ≥ 1 and at least k schedule entries, got k = {k}, {} entries",
            prefix.len()
        )));
    }
    let exps = &prefix[..k];
    let top = *exps.iter().max().unwrap() as f64;
    let lmu = mu.norm().max(1.0).ln();
    let bad = |n: u64| {
        exps.iter()
            .any(|&m| (1..=k).any(|j| log_monomial_ratio(n, m, mu, j as f64) > 0.0))
    };
    let tail_ok = |n: u64| {
        let nf = n as f64;
        nf > top / LN_2 && top * lmu + top * nf.ln() - nf * LN_2 <= 0.0
    };
    Ok(threshold(bad, tail_ok))
}

/// `ln [ p'_j(e^{sW} D^m z^n) / p'_{j+1}(z^n) ]`.
fn log_family_ratio(n: u64, m: u64, s: usize, width: u64, j: usize) -> f64 {
    if m > n {
        return f64::NEG_INFINITY;
    }
    let jf = j as f64;
    (s as f64) * width as f64 + ln_falling(n, m) + (n - m) as f64 * jf.ln() - n as f64 * (jf + 1.0).ln()
}

/// Family threshold: smallest `N_s` with
/// `p'_j(e^{sW} D^m z^n) ≤ 2 p'_{j+1}(z^n)` for `n ≥ N_s`, `m ≤ W = n_s + φ(n_s)`, `j ≤ s`.
///
/// Tail majorant: `e^{sW} n^W (s/(s+1))^n ≤ 2`, decreasing once `n > W / ln(1 + 1/s)`.
pub fn compute_ns_family(s: usize, n_s: u64, phi: &WindowMap) -> Result<u64> {
    if s == 0 {
        return Err(Error::InvalidInput("s must be at least 1".into()));
    }
    let width = n_s + phi.phi(n_s);
    let wf = width as f64;
    let sf = s as f64;
    let decay = (1.0 + 1.0 / sf).ln();
    let bad = |n: u64| {
        (1..=s).any(|j| {
            (0..=width.min(n)).any(|m| log_family_ratio(n, m, s, width, j) > LN_2)
        })
    };
    let tail_ok = |n: u64| {
        let nf = n as f64;
        nf > wf / decay && sf * wf + wf * nf.ln() - nf * decay <= LN_2
    };
    Ok(threshold(bad, tail_ok))
}

/// Basic sequence `P_1..P_K` with valuation gaps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MkArtifact {
    pub mode: Mode,
    pub mu: C64,
    pub a: C64,
    pub basis: Vec<ComplexPolynomial>,
    /// `N_k` per element.
    pub nk: Vec<u64>,
    /// Valuation requested from each bump.
    pub valuations: Vec<usize>,
    pub n_schedule: Schedule,
    pub m_schedule: Schedule,
    pub t_schedule: Option<Schedule>,
    pub phi: Option<WindowMap>,
    pub bumps: Vec<Bump>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MkOptions {
    pub mu: C64,
    pub a: C64,
    pub stages: usize,
    pub mode: Mode,
    pub phi: WindowMap,
    /// `(n_k)`, `(m_k)` and, in family mode, `(t_k)`.
    pub n: Option<Schedule>,
    pub m: Option<Schedule>,
    pub t: Option<Schedule>,
}

impl MkOptions {
    pub fn pair(mu: C64, a: C64, stages: usize) -> Self {
        Self {
            mu,
            a,
            stages,
            mode: Mode::Pair,
            phi: WindowMap { growth: 1.0 },
            n: None,
            m: None,
            t: None,
        }
    }

    pub fn family(stages: usize, phi: WindowMap) -> Self {
        Self {
            mu: C64::new(1.0, 0.0),
            a: C64::new(1.0, 0.0),
            stages,
            mode: Mode::Family,
            phi,
            n: None,
            m: None,
            t: None,
        }
    }
}

/// `m_1 = ceil(6/|a|)`, `m_{k+1} = ceil((2 m_k |a| + 3) / |a|)`: every `D(a m_j, j)` is
/// clear of `D(0,1)` and of its neighbours.
pub fn default_m_schedule(a: C64, count: usize) -> Schedule {
    let r = a.norm();
    let mut values = Vec::with_capacity(count);
    let mut m = (6.0 / r).ceil() as u64;
    for _ in 0..count {
        values.push(m);
        m = ((2.0 * m as f64 * r + 3.0) / r).ceil() as u64;
    }
    Schedule {
        values,
        role: Role::RotationTranslation,
    }
}

pub fn mk_basis(opts: &MkOptions) -> Result<MkArtifact> {
    let k_max = opts.stages;
    if k_max == 0 {
        return Err(Error::InvalidInput("need at least one stage".into()));
    }
    match opts.mode {
        Mode::Pair => mk_pair(opts),
        Mode::Family => mk_family(opts),
    }
}

fn need(s: &Schedule, k: usize, name: &str) -> Result<()> {
    if s.len() < k {
        return Err(Error::InvalidInput(format!("{name}-schedule has {} < {k} entries", s.len())));
    }
    Ok(())
}

fn mk_pair(opts: &MkOptions) -> Result<MkArtifact> {
    let k_max = opts.stages;
    if opts.a.norm() == 0.0 {
        return Err(Error::InvalidInput("a must be nonzero".into()));
    }
    let n = opts.n.clone().unwrap_or_else(|| Schedule {
        values: (1..=k_max as u64).collect(),
        role: Role::Derivative,
    });
    let m = opts.m.clone().unwrap_or_else(|| default_m_schedule(opts.a, k_max));
    need(&n, k_max, "n")?;
    need(&m, k_max, "m")?;
    let mut art = MkArtifact {
        mode: Mode::Pair,
        mu: opts.mu,
        a: opts.a,
        basis: vec![],
        nk: vec![],
        valuations: vec![],
        n_schedule: n.clone(),
        m_schedule: m.clone(),
        t_schedule: None,
        phi: None,
        bumps: vec![],
    };
    let mut prev_deg = 0usize;
    for k in 1..=k_max {
        let nk = compute_nk(opts.mu, &n.values, k)?;
        let d = (prev_deg + 1).max(nk as usize);
        let eps = 0.5f64.powi(k as i32);
        let bump = lem2_bump(opts.a, &m, k, eps, d).map_err(|e| Error::stage(k, k, e))?;
        prev_deg = bump.p.degree();
        art.nk.push(nk);
        art.valuations.push(d);
        art.basis.push(bump.p.clone());
        art.bumps.push(bump);
    }
    Ok(art)
}

fn mk_family(opts: &MkOptions) -> Result<MkArtifact> {
    let k_max = opts.stages;
    let phi = opts.phi;
    let (dm, dt) = default_mt_schedules(&phi, 1.0, 1.0);
    let n = opts
        .n
        .clone()
        .unwrap_or_else(|| phi_schedule(&phi, 1, FAMILY_SCHEDULE_LEN.min(k_max.max(1) + 4)));
    let m = opts.m.clone().unwrap_or(dm);
    let t = opts.t.clone().unwrap_or(dt);
    need(&n, k_max, "n")?;
    for s in [&n, &m, &t] {
        if !s.is_phi_increasing(&phi) {
            return Err(Error::InvalidInput(format!("schedule {:?} is not φ-increasing", s.values)));
        }
    }
    let mut art = MkArtifact {
        mode: Mode::Family,
        mu: opts.mu,
        a: opts.a,
        basis: vec![],
        nk: vec![],
        valuations: vec![],
        n_schedule: n.clone(),
        m_schedule: m.clone(),
        t_schedule: Some(t.clone()),
        phi: Some(phi),
        bumps: vec![],
    };
    let mut prev_deg = 0usize;
    for s in 1..=k_max {
        let ns = compute_ns_family(s, n.get(s).unwrap(), &phi)?;
        let d = (prev_deg + 1).max(ns as usize);
        let eps = 0.5f64.powi(s as i32);
        let bump = lem2_bump_family(&m, &t, &phi, s, s as f64, eps, d).map_err(|e| Error::stage(s, s, e))?;
        prev_deg = bump.p.degree();
        art.nk.push(ns);
        art.valuations.push(d);
        art.basis.push(bump.p.clone());
        art.bumps.push(bump);
    }
    Ok(art)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nk_examples() {
        assert_eq!(compute_nk(C64::new(1.0, 0.0), &[1], 1).unwrap(), 1);
        assert_eq!(compute_nk(C64::new(3.0, 0.0), &[2], 1).unwrap(), 10);
        assert_eq!(compute_nk(C64::new(0.0, 0.0), &[4], 1).unwrap(), 1);
    }

    #[test]
    fn nk_short_prefix() {
        assert!(compute_nk(C64::new(1.0, 0.0), &[1], 2).is_err());
    }

    #[test]
    fn default_m_for_unit_a() {
        assert_eq!(default_m_schedule(C64::new(1.0, 0.0), 3).values, vec![6, 15, 33]);
    }

    #[test]
    fn family_threshold_holds_past_n() {
        let phi = WindowMap { growth: 1.0 };
        let n = compute_ns_family(1, 1, &phi).unwrap();
        for q in n..n + 200 {
            for m in 0..=2u64.min(q) {
                assert!(log_family_ratio(q, m, 1, 2, 1) <= LN_2);
            }
        }
    }
}
