use super::report::{Check, OperatorKind, Side, VerificationReport, WitnessRecord};
use crate::error::{Error, Result};
use crate::logscalar::LogScalar;
use crate::norms::sample_count;
use crate::poly::ComplexPolynomial;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

/// `e^{bs} (μD)^s` or `e^{bs} T_a^s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub mu: C64,
    pub a: C64,
    pub b: f64,
}

impl OperatorSpec {
    pub fn derivative(mu: C64, b: f64) -> Self {
        Self {
            kind: OperatorKind::Derivative,
            mu,
            a: C64::new(0.0, 0.0),
            b,
        }
    }

    pub fn translation(a: C64, b: f64) -> Result<Self> {
        if a.norm() == 0.0 {
            return Err(Error::InvalidInput("translation requires a ≠ 0".into()));
        }
        Ok(Self {
            kind: OperatorKind::Translation,
            mu: C64::new(1.0, 0.0),
            a,
            b,
        })
    }
}

fn circle(l: f64, n: usize) -> impl Iterator<Item = C64> {
    (0..n).map(move |k| C64::from_polar(l, 2.0 * PI * k as f64 / n as f64))
}

/// Sampled `p_l(op^s x − f)` on `|w| = l`; `inf` when the orbit is not representable.
pub fn orbit_error(x: &ComplexPolynomial, op: &OperatorSpec, s: u64, f: &ComplexPolynomial, l: f64) -> f64 {
    let scale = LogScalar::exp_real(op.b * s as f64);
    let n = sample_count(x.degree().max(f.degree()));
    let err = match op.kind {
        OperatorKind::Derivative => {
            let Ok(d) = x.scaled_derivative(s as usize, op.mu, scale) else {
                return f64::INFINITY;
            };
            let g = &d - f;
            circle(l, n).map(|w| (g.eval(w)).norm()).fold(0.0, f64::max)
        }
        OperatorKind::Translation => {
            let shift = op.a * s as f64;
            circle(l, n)
                .map(|w| {
                    let v = (scale * x.log_eval(w + shift)).to_complex();
                    (v - f.eval(w)).norm()
                })
                .fold(0.0, f64::max)
        }
    };
    if err.is_nan() {
        f64::INFINITY
    } else {
        err
    }
}

/// Result of scanning one window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Visit {
    /// Witness (smallest success) or best iterate tried.
    pub s: u64,
    #[serde(with = "crate::serde_float")]
    pub error: f64,
    pub found: bool,
}

/// Smallest `s` in `[lo, hi]` with `p_l(op^s x − f) < eps`, else the best `(s, error)`.
pub fn orbit_visit(
    x: &ComplexPolynomial,
    op: &OperatorSpec,
    window: (u64, u64),
    f: &ComplexPolynomial,
    l: f64,
    eps: f64,
) -> Result<Visit> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::InvalidInput(format!("empty window [{lo}, {hi}]")));
    }
    let mut best = Visit {
        s: lo,
        error: f64::INFINITY,
        found: false,
    };
    for s in lo..=hi {
        let e = orbit_error(x, op, s, f, l);
        if e < eps {
            return Ok(Visit { s, error: e, found: true });
        }
        if e < best.error {
            best = Visit { s, error: e, found: false };
        }
    }
    Ok(best)
}

/// Scans several windows in order and stops at the first witness.
pub fn orbit_visit_windows(
    x: &ComplexPolynomial,
    op: &OperatorSpec,
    windows: &[(u64, u64)],
    f: &ComplexPolynomial,
    l: f64,
    eps: f64,
) -> Result<(Visit, (u64, u64))> {
    let mut best: Option<(Visit, (u64, u64))> = None;
    for &w in windows {
        let v = orbit_visit(x, op, w, f, l, eps)?;
        if v.found {
            return Ok((v, w));
        }
        if best.map_or(true, |(b, _)| v.error < b.error) {
            best = Some((v, w));
        }
    }
    best.ok_or_else(|| Error::InvalidInput("no windows given".into()))
}

/// Mesh of operator parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SweepFamily {
    /// `e^{bs} (μD)^s` for every `b` in the mesh.
    Derivative { mu: C64, b_mesh: Vec<f64> },
    /// `e^{bs} T_a^s` for every `(a, b)` in the product mesh.
    Translation { a_mesh: Vec<C64>, b_mesh: Vec<f64> },
}

impl SweepFamily {
    pub fn operators(&self) -> Result<Vec<OperatorSpec>> {
        match self {
            SweepFamily::Derivative { mu, b_mesh } => Ok(b_mesh.iter().map(|&b| OperatorSpec::derivative(*mu, b)).collect()),
            SweepFamily::Translation { a_mesh, b_mesh } => a_mesh
                .iter()
                .flat_map(|&a| b_mesh.iter().map(move |&b| OperatorSpec::translation(a, b)))
                .collect(),
        }
    }
}

/// `count` equispaced unit vectors starting at angle 0.
pub fn angle_mesh(count: usize) -> Vec<C64> {
    (0..count).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / count as f64)).collect()
}

/// `count` equispaced points of `[−n, n]` (just `0` when `count == 1`).
pub fn b_mesh(n: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![0.0];
    }
    (0..count).map(|k| -n + 2.0 * n * k as f64 / (count - 1) as f64).collect()
}

/// One [`orbit_visit_windows`] per mesh point.
pub fn sweep_mesh(
    x: &ComplexPolynomial,
    family: &SweepFamily,
    windows: &[(u64, u64)],
    f: &ComplexPolynomial,
    l: f64,
    eps: f64,
) -> Result<VerificationReport> {
    let ops = family.operators()?;
    if ops.is_empty() {
        return Err(Error::InvalidInput("empty mesh".into()));
    }
    let visits: Vec<(OperatorSpec, (Visit, (u64, u64)))> = ops
        .par_iter()
        .map(|op| orbit_visit_windows(x, op, windows, f, l, eps).map(|v| (*op, v)))
        .collect::<Result<_>>()?;
    let mut report = VerificationReport::default();
    report.metadata.tolerances.push(("eps".into(), eps));
    for (op, (v, w)) in visits {
        report.witnesses.push(WitnessRecord {
            kind: op.kind,
            a: op.a,
            b: op.b,
            window: w,
            s: Some(v.s),
            error: v.error,
            found: v.found,
        });
    }
    Ok(report)
}

/// Errors `p_l(e^{cs} T_w^s x − f)` over `probe_count` points with `|a − w| < δ/s`,
/// `|b − c| < δ/s`, `w` on the unit circle.
pub fn perturbation_probe(
    x: &ComplexPolynomial,
    s: u64,
    a: C64,
    b: f64,
    f: &ComplexPolynomial,
    l: f64,
    delta: f64,
    probe_count: usize,
) -> Result<VerificationReport> {
    if s == 0 {
        return Err(Error::InvalidInput("s must be at least 1".into()));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidInput("probe radius factor must be nonnegative".into()));
    }
    let a = a / a.norm();
    let r = delta / s as f64;
    let base = orbit_error(x, &OperatorSpec::translation(a, b)?, s, f, l);
    // Golden-ratio sequence over the (angle, b) rectangle, pulled slightly inside.
    let tau_max = 2.0 * (0.5 * r).min(1.0).asin() * 0.999;
    let g = 0.618_033_988_749_894_9_f64;
    let probes: Vec<(C64, f64)> = (0..probe_count)
        .map(|i| {
            let u = ((i as f64 + 0.5) * g).fract() * 2.0 - 1.0;
            let v = ((i as f64 + 0.5) / probe_count as f64) * 2.0 - 1.0;
            (a * C64::from_polar(1.0, u * tau_max), b + v * r * 0.999)
        })
        .collect();
    let errs: Vec<f64> = probes
        .par_iter()
        .map(|(w, c)| orbit_error(x, &OperatorSpec::translation(*w, *c).unwrap(), s, f, l))
        .collect();
    let worst = errs.iter().copied().fold(base, f64::max);
    let mut report = VerificationReport::default();
    report.push(Check::new(
        "unperturbed_error",
        "p_l(e^{bs} T_a^s x − f)",
        base.ln(),
        f64::INFINITY,
        Side::SampledLower,
        true,
    ));
    report.push(Check::new(
        "probe_max_error",
        "max p_l(e^{cs} T_w^s x − f) over |a−w|, |b−c| < δ/s",
        worst.ln(),
        (2.0 * base).ln(),
        Side::SampledLower,
        false,
    ));
    report.metadata.tolerances.push(("probe_radius".into(), r));
    report.note("probe_count", probe_count.to_string());
    Ok(report)
}

/// [`perturbation_probe`] over shrinking `deltas`: the worst error must be `< 2×` the
/// witness error at the smallest radius and non-increasing as the radius shrinks.
pub fn probe_radii(
    x: &ComplexPolynomial,
    s: u64,
    a: C64,
    b: f64,
    f: &ComplexPolynomial,
    l: f64,
    deltas: &[f64],
    probe_count: usize,
) -> Result<VerificationReport> {
    if deltas.is_empty() || deltas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput("probe radii must be non-empty and strictly decreasing".into()));
    }
    let mut report = VerificationReport::default();
    let mut worst = Vec::with_capacity(deltas.len());
    let mut base = f64::NAN;
    for &d in deltas {
        let rep = perturbation_probe(x, s, a, b, f, l, d, probe_count)?;
        base = rep.checks[0].measured_log;
        worst.push(rep.checks[1].measured_log);
        report.note(format!("probe_max_error[δ={d}]"), format!("{:.6e}", rep.checks[1].measured_log.exp()));
    }
    report.push(Check::new(
        "unperturbed_error",
        "p_l(e^{bs} T_a^s x − f)",
        base,
        f64::INFINITY,
        Side::SampledLower,
        true,
    ));
    report.push(Check::new(
        "probe_smallest_radius",
        "max p_l(e^{cs} T_w^s x − f) < 2 p_l(e^{bs} T_a^s x − f) at the smallest δ",
        *worst.last().unwrap(),
        LN_2 + base,
        Side::SampledLower,
        true,
    ));
    for (i, w) in worst.windows(2).enumerate() {
        report.push(Check::new(
            format!("probe_monotone[{i}]"),
            "probe error non-increasing as δ shrinks",
            w[1],
            w[0],
            Side::SampledLower,
            false,
        ));
    }
    report.note("probe_count", probe_count.to_string());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_preimage_is_witness() {
        // x(z) = e^{-b s0} f(z − a s0) so that e^{b s0} x(w + a s0) = f(w).
        let f = ComplexPolynomial::z();
        let (a, b, s0) = (C64::new(0.0, 1.0), 0.5, 7u64);
        let x = f
            .taylor_shift(-a * s0 as f64)
            .unwrap()
            .scale(C64::new((-b * s0 as f64).exp(), 0.0));
        let v = orbit_visit(&x, &OperatorSpec::translation(a, b).unwrap(), (5, 9), &f, 1.0, 1e-6).unwrap();
        assert!(v.found);
        assert_eq!(v.s, s0);
    }

    #[test]
    fn zero_vector_has_no_witness() {
        let f = ComplexPolynomial::one();
        let v = orbit_visit(
            &ComplexPolynomial::zero(),
            &OperatorSpec::derivative(C64::new(1.0, 0.0), 0.0),
            (1, 4),
            &f,
            1.0,
            0.5,
        )
        .unwrap();
        assert!(!v.found);
        assert!((v.error - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_radius_probe_matches() {
        let f = ComplexPolynomial::z();
        let x = f.taylor_shift(C64::new(-3.0, 0.0)).unwrap();
        let rep = perturbation_probe(&x, 3, C64::new(1.0, 0.0), 0.0, &f, 1.0, 0.0, 8).unwrap();
        assert_eq!(rep.checks[0].measured_log, rep.checks[1].measured_log);
    }
}
