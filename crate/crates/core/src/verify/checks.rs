use super::orbit::sweep_mesh;
use super::report::{Check, Side, VerificationReport};
use crate::constructions::windows::sector_angles;
use crate::constructions::x0::{Mode, X0Artifact};
use crate::constructions::{Bump, GridArtifact, MkArtifact, Perturbation, SimulArtifact};
use crate::logscalar::LogScalar;
use crate::norms::{log_circle_max, log_coeff_norm, log_monomial_ratio, sample_count, sup_norm};
use crate::poly::ComplexPolynomial;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{LN_2, PI};

/// Default headroom for sampled-side checks.
pub const DEFAULT_TOL_SLACK: f64 = 0.05;

fn ln_pow2(k: usize) -> f64 {
    -(k as f64) * LN_2
}

/// Sampled `ln p_j(scale · T_c g)`: `|g|` over the circle `|z − c| = j`.
fn log_translated(g: &ComplexPolynomial, c: C64, j: f64, scale: LogScalar) -> f64 {
    log_circle_max(g, c, j, sample_count(g.degree()), scale)
}

fn log_derivative(g: &ComplexPolynomial, m: u64, mu: C64, j: f64, scale: LogScalar) -> f64 {
    match g.scaled_derivative(m as usize, mu, scale) {
        Ok(d) => sup_norm(&d, j, LogScalar::ONE).log_sampled_sup,
        Err(_) => f64::INFINITY,
    }
}

/// Re-measures every stage bullet and, in pair mode, the finite tail sums.
pub fn check_x0(art: &X0Artifact, tol_slack: f64) -> VerificationReport {
    let mut rep = VerificationReport::default();
    rep.metadata.tol_slack = Some(tol_slack);
    let slack = (1.0 + tol_slack).ln();
    match art.mode {
        Mode::Pair => x0_pair(art, slack, &mut rep),
        Mode::Family => x0_family(art, slack, &mut rep),
    }
    rep
}

fn x0_pair(art: &X0Artifact, slack: f64, rep: &mut VerificationReport) {
    let (mu, a) = (art.mu, art.a);
    let n = &art.n_schedule.values;
    let m = &art.m_schedule.values;
    let one = LogScalar::ONE;
    let checks: Vec<Vec<Check>> = art
        .entries
        .par_iter()
        .map(|e| {
            let (l, k) = (e.l, e.k);
            let kf = k as f64;
            let bound = ln_pow2(k) + slack;
            let mut out = Vec::new();
            let tag = |s: &str| format!("x0[l={l},k={k}].{s}");
            out.push(Check::new(
                tag("i"),
                "p_k(P_{l,k}) < 2^-k",
                sup_norm(&e.p, kf, one).log_sampled_sup,
                bound,
                Side::SampledLower,
                true,
            ));
            for (j, &nj) in n.iter().enumerate().take(k) {
                out.push(Check::new(
                    tag(&format!("ii.j={}", j + 1)),
                    "p_k((μD)^{n_j} P_{l,k}) < 2^-k",
                    log_derivative(&e.p, nj, mu, kf, one),
                    bound,
                    Side::SampledLower,
                    true,
                ));
            }
            for (j, &mj) in m.iter().enumerate().take(k - 1) {
                out.push(Check::new(
                    tag(&format!("iii.j={}", j + 1)),
                    "p_k(T_a^{m_j} P_{l,k}) < 2^-k",
                    log_translated(&e.p, a * mj as f64, kf, one),
                    bound,
                    Side::SampledLower,
                    true,
                ));
            }
            let sum = art.partial_sum(l, k);
            out.push(Check::new(
                tag("iv"),
                "p_k(T_a^{m_k} Σ_{i=l}^{k} P_{l,i}) < 2^-k",
                log_translated(&sum, a * m[k - 1] as f64, kf, one),
                bound,
                Side::SampledLower,
                true,
            ));
            out
        })
        .collect();
    rep.checks.extend(checks.into_iter().flatten());

    // Tails: for j > l, with x_l = Σ_{i=l}^{K} P_{l,i},
    //   p_j(Σ_{i=j}^{K} P_{l,i}) ≤ Σ_{i=j}^{K} 2^-i,
    //   p_j((μD)^{n_j} x_l) ≤ Σ_{i=j}^{K} 2^-i,
    //   p_j(T_a^{m_j} x_l) ≤ Σ_{i=j}^{K} 2^-i.
    let big_k = art.stages;
    for l in 0..art.vectors.len() {
        let x = &art.vectors[l];
        for j in (l + 1).max(1)..=big_k {
            let jf = j as f64;
            let tail_bound = ((0.5f64).powi(j as i32 - 1) - (0.5f64).powi(big_k as i32)).ln() + slack;
            let tail: ComplexPolynomial = art
                .entries
                .iter()
                .filter(|e| e.l == l && e.k >= j)
                .fold(ComplexPolynomial::zero(), |acc, e| &acc + &e.p);
            let tag = |s: &str| format!("x0.tail[l={l},j={j}].{s}");
            rep.push(Check::new(
                tag("sum"),
                "p_j(Σ_{i=j}^{K} P_{l,i}) ≤ Σ_{i=j}^{K} 2^-i",
                sup_norm(&tail, jf, one).log_sampled_sup,
                tail_bound,
                Side::SampledLower,
                false,
            ));
            rep.push(Check::new(
                tag("derivative"),
                "p_j((μD)^{n_j} x_l) ≤ Σ_{i=j}^{K} 2^-i",
                log_derivative(x, n[j - 1], mu, jf, one),
                tail_bound,
                Side::SampledLower,
                false,
            ));
            rep.push(Check::new(
                tag("translation"),
                "p_j(T_a^{m_j} x_l) ≤ Σ_{i=j}^{K} 2^-i",
                log_translated(x, a * m[j - 1] as f64, jf, one),
                tail_bound,
                Side::SampledLower,
                false,
            ));
        }
    }
}

/// Angular mesh used for sector checks at stage `s`.
const SECTOR_ANGLES: usize = 32;

fn x0_family(art: &X0Artifact, slack: f64, rep: &mut VerificationReport) {
    let one = LogScalar::ONE;
    let checks: Vec<Vec<Check>> = art
        .entries
        .par_iter()
        .map(|e| {
            let (l, s) = (e.l, e.k);
            let sf = s as f64;
            let bound = ln_pow2(s) + slack;
            let tag = |t: &str| format!("x0f[l={l},s={s}].{t}");
            let mut out = vec![Check::new(
                tag("i"),
                "p_s(P_{l,s}) < 2^-s",
                sup_norm(&e.p, sf, one).log_sampled_sup,
                bound,
                Side::SampledLower,
                true,
            )];
            let sum = art.partial_sum(l, s);
            for j in 1..=s {
                if let Some((lo, hi)) = art.n_window(j) {
                    let worst = (lo..=hi)
                        .map(|k| log_derivative(&e.p, k, C64::new(1.0, 0.0), sf, LogScalar::exp_real(sf * k as f64)))
                        .fold(f64::NEG_INFINITY, f64::max);
                    out.push(Check::new(
                        tag(&format!("ii.j={j}")),
                        "p_s(e^{sk} D^k P_{l,s}) < 2^-s on the n-window",
                        worst,
                        bound,
                        Side::SampledLower,
                        true,
                    ));
                }
                let g = if j == s { &sum } else { &e.p };
                if let Some((lo, hi)) = art.m_window(j) {
                    let angles = sector_angles(1.0 / j as f64, SECTOR_ANGLES);
                    let worst = (lo..=hi)
                        .flat_map(|k| angles.iter().map(move |&t| (k, t)))
                        .map(|(k, t)| {
                            log_translated(g, C64::from_polar(k as f64, t), sf, LogScalar::exp_real(sf * k as f64))
                        })
                        .fold(f64::NEG_INFINITY, f64::max);
                    out.push(Check::new(
                        tag(&format!("m.j={j}")),
                        "p_s(e^{sk} T_a^k ·) < 2^-s on the m-window, a outside the arc |arg a| < 1/j",
                        worst,
                        bound,
                        Side::SampledLower,
                        true,
                    ));
                }
                if let Some((lo, hi)) = art.t_window(j) {
                    let worst = (lo..=hi)
                        .map(|k| log_translated(g, C64::new(k as f64, 0.0), sf, LogScalar::exp_real(sf * k as f64)))
                        .fold(f64::NEG_INFINITY, f64::max);
                    out.push(Check::new(
                        tag(&format!("t.j={j}")),
                        "p_s(e^{sk} T_1^k ·) < 2^-s on the t-window",
                        worst,
                        bound,
                        Side::SampledLower,
                        true,
                    ));
                }
            }
            out
        })
        .collect();
    rep.checks.extend(checks.into_iter().flatten());
}

/// `q_j(x) = max(2 p'_1(x), p'_{2j}(x))` in log form.
fn log_q(x: &ComplexPolynomial, j: f64) -> f64 {
    (LN_2 + log_coeff_norm(x, 1.0)).max(log_coeff_norm(x, 2.0 * j))
}

/// Structural checks plus random-combination checks of the `q_j` bounds (pair mode).
pub fn check_mk(art: &MkArtifact, j_max: usize, trials: usize, tol_slack: f64, seed: u64) -> VerificationReport {
    let mut rep = VerificationReport::default();
    rep.metadata.tol_slack = Some(tol_slack);
    rep.metadata.seed = Some(seed);
    let one = LogScalar::ONE;
    let big_k = art.basis.len();
    for (i, p) in art.basis.iter().enumerate() {
        let k = i + 1;
        rep.push(Check::new(
            format!("mk[{k}].p1"),
            "p_1(P_k) ≥ 1/2",
            -sup_norm(p, 1.0, one).log_sampled_sup,
            LN_2,
            Side::SampledLower,
            false,
        ));
        let val = p.valuation();
        rep.push(Check::fact(
            format!("mk[{k}].valuation"),
            "val(P_k) ≥ N_k",
            art.nk.get(i).map_or(false, |&nk| val.at_least(nk as usize)),
        ));
        if k > 1 {
            rep.push(Check::fact(
                format!("mk[{k}].gap"),
                "val(P_k) > deg(P_{k-1})",
                val.at_least(art.basis[i - 1].degree() + 1),
            ));
        }
    }
    if art.mode != Mode::Pair {
        rep.note("q_bounds", "random-combination q_j checks run in pair mode only");
        return rep;
    }
    let slack = (1.0 + tol_slack).ln();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for k in 1..=big_k {
        for t in 0..trials {
            let coeffs: Vec<C64> = (k..=big_k)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            cases.push((k, t, coeffs));
        }
    }
    let checks: Vec<Vec<Check>> = cases
        .par_iter()
        .map(|(k, t, coeffs)| {
            let k = *k;
            let x = coeffs
                .iter()
                .zip(&art.basis[k - 1..])
                .fold(ComplexPolynomial::zero(), |acc, (c, p)| &acc + &p.scale(*c));
            let mut out = Vec::new();
            let tag = |s: &str| format!("mk.trial[k={k},t={t}].{s}");
            let p1 = log_coeff_norm(&x, 1.0);
            for (i, c) in coeffs.iter().enumerate() {
                out.push(Check::new(
                    tag(&format!("coef.l={}", k + i)),
                    "|a_l| ≤ 2 p'_1(x)",
                    c.norm().ln(),
                    LN_2 + p1,
                    Side::CoeffUpper,
                    false,
                ));
            }
            let mk = art.m_schedule.get(k).unwrap_or(0) as f64;
            let nk = art.n_schedule.get(k).unwrap_or(0);
            for j in 1..=j_max.min(k) {
                let jf = j as f64;
                let q = log_q(&x, jf) + slack;
                out.push(Check::new(
                    tag(&format!("translation.j={j}")),
                    "p_j(T_a^{m_k} x) ≤ q_j(x)",
                    log_translated(&x, art.a * mk, jf, one),
                    q,
                    Side::SampledLower,
                    false,
                ));
                out.push(Check::new(
                    tag(&format!("derivative.j={j}")),
                    "p_j((μD)^{n_k} x) ≤ q_j(x)",
                    log_derivative(&x, nk, art.mu, jf, one),
                    q,
                    Side::SampledLower,
                    false,
                ));
            }
            out
        })
        .collect();
    rep.checks.extend(checks.into_iter().flatten());
    rep
}

/// The three grid clauses: integer moduli in the band, pairwise spacing `≥ C`
/// (exhaustive sweep), and coverage of `sample_count` unit vectors.
pub fn check_grid(g: &GridArtifact, sample_count: usize) -> VerificationReport {
    let mut rep = VerificationReport::default();
    let (lo, hi) = g.band();
    let moduli_ok = g.points.iter().all(|z| {
        let m = z.norm();
        (m - m.round()).abs() <= 1e-9 * m.max(1.0) && m >= lo - 1e-9 && m <= hi + 1e-9
    });
    rep.push(Check::fact("grid.moduli", "|z| ∈ ℕ and nR + C ≤ |z| ≤ (n+1)R − C", moduli_ok && !g.points.is_empty()));

    // Sweep over points sorted by real part; only pairs within C in x can violate.
    let mut idx: Vec<usize> = (0..g.points.len()).collect();
    idx.sort_by(|&i, &j| g.points[i].re.total_cmp(&g.points[j].re));
    let mut min_d = f64::INFINITY;
    for a in 0..idx.len() {
        let za = g.points[idx[a]];
        for &ib in &idx[a + 1..] {
            let zb = g.points[ib];
            if zb.re - za.re >= g.c {
                break;
            }
            min_d = min_d.min((zb - za).norm());
        }
    }
    rep.push(Check::new(
        "grid.spacing",
        "|z − z'| ≥ C",
        -min_d.ln(),
        -(g.c * (1.0 - 1e-12)).ln(),
        Side::Exact,
        false,
    ));

    // A witness z has angular distance below the chord bound δ/|z| ≤ δ/ρ_min (times π/2),
    // so only points in that angular band around w are candidates.
    let mut by_angle: Vec<(f64, C64)> = g.points.iter().map(|z| (z.arg().rem_euclid(2.0 * PI), *z)).collect();
    by_angle.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rho_min = g.points.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let band = (PI / 2.0 * g.delta / rho_min).min(PI);
    let ratio = |w: C64, z: &C64| {
        let r = z.norm();
        (w - z / r).norm() * r / g.delta
    };
    let worst = (0..sample_count)
        .into_par_iter()
        .map(|i| {
            let th = 2.0 * PI * (i as f64 + 0.5) / sample_count as f64;
            let w = C64::from_polar(1.0, th);
            let mut best = f64::INFINITY;
            for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
                let (lo, hi) = (th - band + shift, th + band + shift);
                let start = by_angle.partition_point(|p| p.0 < lo);
                for (ang, z) in &by_angle[start..] {
                    if *ang > hi {
                        break;
                    }
                    best = best.min(ratio(w, z));
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    rep.push(Check::new(
        "grid.coverage",
        "∀w ∃z ∈ S: |w − z/|z|| < δ/|z|",
        worst.ln(),
        0.0,
        Side::SampledLower,
        true,
    ));
    rep.metadata.tolerances.push(("delta".into(), g.delta));
    rep.metadata.tolerances.push(("C".into(), g.c));
    rep.note("coverage_samples", sample_count.to_string());
    rep
}

/// Both inequalities of the perturbation, re-sampled at `density` times the default count.
/// `p'_j` upper bounds are recorded as notes.
pub fn check_lem1(pert: &Perturbation, density: usize, tol_slack: f64) -> VerificationReport {
    let mut rep = VerificationReport::default();
    rep.metadata.tol_slack = Some(tol_slack);
    let one = LogScalar::ONE;
    let n = sample_count(pert.p.degree().max(pert.f.degree())) * density.max(1);
    let bound = pert.eps.ln() + (1.0 + tol_slack).ln();
    let near = log_circle_max(&pert.p, C64::new(0.0, 0.0), pert.j, n, one);
    let g = &pert.p + &pert.f;
    let shift = pert.a * pert.n as f64;
    let far = log_circle_max(&g, shift, pert.j, n, one);
    rep.push(Check::new("lem1.near", "p_j(P) < ε", near, bound, Side::SampledLower, true));
    rep.push(Check::new("lem1.far", "p_j(T_a^n(P + f)) < ε", far, bound, Side::SampledLower, true));
    rep.note("near_coeff_upper", format!("{:.6e}", log_coeff_norm(&pert.p, pert.j).exp()));
    rep.note("samples", n.to_string());
    rep.metadata.tolerances.push(("eps".into(), pert.eps));
    rep
}

/// `p_l(x) < ε` and a fresh sweep of all three windows over the artifact's mesh.
pub fn check_simul(art: &SimulArtifact, tol_slack: f64) -> VerificationReport {
    let mut rep = VerificationReport::default();
    rep.metadata.tol_slack = Some(tol_slack);
    let lf = art.l as f64;
    rep.push(Check::new(
        "simul.small",
        "p_l(x) < ε",
        sup_norm(&art.x, lf, LogScalar::ONE).log_sampled_sup,
        art.eps.ln() + (1.0 + tol_slack).ln(),
        Side::SampledLower,
        true,
    ));
    let families = art.sweep_plan();
    for (family, windows) in &families {
        match sweep_mesh(&art.x, family, windows, &art.f, lf, art.eps) {
            Ok(r) => rep.extend(r),
            Err(e) => rep.push(Check::fact("simul.sweep", format!("sweep ran ({e})"), false)),
        }
    }
    rep
}

/// `p_1(P) ≥ 1/2`, `val(P) ≥ d` and, in pair mode, `p_j(T_a^{m_j} P) < ε` for `j ≤ k`.
pub fn check_bump(bump: &Bump, tol_slack: f64) -> VerificationReport {
    let mut rep = VerificationReport::default();
    rep.metadata.tol_slack = Some(tol_slack);
    let one = LogScalar::ONE;
    rep.push(Check::new(
        "bump.p1",
        "p_1(P) ≥ 1/2",
        -sup_norm(&bump.p, 1.0, one).log_sampled_sup,
        LN_2,
        Side::SampledLower,
        false,
    ));
    rep.push(Check::fact("bump.valuation", "val(P) ≥ d", bump.p.valuation().at_least(bump.d)));
    match bump.a {
        Some(a) => {
            let bound = bump.eps.ln() + (1.0 + tol_slack).ln();
            for (i, &m) in bump.m.iter().take(bump.k).enumerate() {
                let j = (i + 1) as f64;
                rep.push(Check::new(
                    format!("bump.window.j={}", i + 1),
                    "p_j(T_a^{m_j} P) < ε",
                    log_translated(&bump.p, a * m as f64, j, one),
                    bound,
                    Side::SampledLower,
                    true,
                ));
            }
        }
        None => rep.push(Check::new(
            "bump.certificate",
            "max_i error_i / tol_i < 1",
            bump.certificate.worst_ratio().ln(),
            0.0,
            Side::SampledLower,
            true,
        )),
    }
    rep
}

/// Brute-force confirmation of `N = compute_nk(...)`: some ratio exceeds 1 at `N − 1`, none
/// does on `[N, n_max]`, and the majorant `max(1,|μ|)^{n_k} n^{n_k} 2^{−n}` is `≤ 1` and
/// decreasing from `n_max` on.
pub fn check_nk(mu: C64, prefix: &[u64], k: usize, n: u64, n_max: u64) -> VerificationReport {
    let mut rep = VerificationReport::default();
    let exps = &prefix[..k.min(prefix.len())];
    let worst = |q: u64| {
        exps.iter()
            .flat_map(|&m| (1..=k).map(move |j| log_monomial_ratio(q, m, mu, j as f64)))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    if n > 1 {
        rep.push(Check::new(
            "nk.minimal",
            "some p'_j((μD)^{n_i} z^{N−1}) > p'_{2j}(z^{N−1})",
            -worst(n - 1),
            0.0,
            Side::Exact,
            true,
        ));
    }
    let scan = (n..=n_max).into_par_iter().map(worst).reduce(|| f64::NEG_INFINITY, f64::max);
    rep.push(Check::new(
        "nk.scan",
        "p'_j((μD)^{n_i} z^n) ≤ p'_{2j}(z^n) for N ≤ n ≤ n_max",
        scan,
        0.0,
        Side::Exact,
        false,
    ));
    let top = exps.iter().copied().max().unwrap_or(0) as f64;
    let nf = n_max as f64;
    let majorant = top * mu.norm().max(1.0).ln() + top * nf.ln() - nf * LN_2;
    rep.push(Check::fact("nk.majorant_decreasing", "n_max > n_k / ln 2", nf > top / LN_2));
    rep.push(Check::new("nk.majorant", "max(1,|μ|)^{n_k} n^{n_k} / 2^n ≤ 1 at n_max", majorant, 0.0, Side::Exact, false));
    rep.note("n_max", n_max.to_string());
    rep
}
