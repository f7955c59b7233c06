use crate::config::{DiskSpec, RunConfig};
use hcsub::constructions::{Bump, GridArtifact, MkArtifact, Perturbation, SimulArtifact, X0Artifact};
use hcsub::norms::{sample_count, sup_norm};
use hcsub::verify::{
    check_bump, check_grid, check_lem1, check_mk, check_nk, check_simul, check_x0, Check, Side, VerificationReport,
    DEFAULT_TOL_SLACK,
};
use hcsub::{make_compact, verify_fit, ApproxCertificate, ComplexPolynomial, Disk, LogScalar, PiecewiseTarget, TargetPiece, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub j: f64,
    pub sampled_sup: f64,
    pub coeff_bound: f64,
    pub sample_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    pub poly: ComplexPolynomial,
    pub rows: Vec<NormRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitArtifact {
    pub disks: Vec<DiskSpec>,
    pub eps: f64,
    pub p: ComplexPolynomial,
    pub certificate: ApproxCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NkArtifact {
    pub mu: C64,
    pub prefix: Vec<u64>,
    pub k: usize,
    pub n: u64,
}

/// Everything a construction subcommand writes; `check` reads it back.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Artifact {
    Norms(NormTable),
    Fit(FitArtifact),
    Lem1(Perturbation),
    Bump(Bump),
    X0(X0Artifact),
    Mk(MkArtifact),
    Nk(NkArtifact),
    Grid(GridArtifact),
    Simul(SimulArtifact),
}

impl Artifact {
    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::Norms(_) => "norms",
            Artifact::Fit(_) => "fit",
            Artifact::Lem1(_) => "lem1",
            Artifact::Bump(_) => "bump",
            Artifact::X0(_) => "x0",
            Artifact::Mk(_) => "mk",
            Artifact::Nk(_) => "nk",
            Artifact::Grid(_) => "grid",
            Artifact::Simul(_) => "simul",
        }
    }
}

pub fn fit_problem(disks: &[DiskSpec]) -> hcsub::Result<(hcsub::DiskUnionCompact, PiecewiseTarget)> {
    let ds = disks
        .iter()
        .map(|d| Disk::new(C64::new(d.center[0], d.center[1]), d.radius))
        .collect::<hcsub::Result<Vec<_>>>()?;
    let compact = make_compact(ds)?;
    let target = PiecewiseTarget::new(disks.iter().map(|d| TargetPiece::poly(d.target.clone())).collect());
    Ok((compact, target))
}

fn check_norms(t: &NormTable) -> VerificationReport {
    let mut rep = VerificationReport::default();
    for row in &t.rows {
        let est = sup_norm(&t.poly, row.j, LogScalar::ONE);
        rep.push(Check::new(
            format!("norms.j={}", row.j),
            "p_j(f) ≤ p'_j(f)",
            est.log_sampled_sup,
            est.log_coeff_bound + hcsub::INEQ_SLACK,
            Side::Exact,
            false,
        ));
    }
    rep
}

fn check_fit(a: &FitArtifact, density: usize) -> VerificationReport {
    let mut rep = VerificationReport::default();
    let (compact, target) = match fit_problem(&a.disks) {
        Ok(v) => v,
        Err(e) => {
            rep.push(Check::fact("fit.compact", format!("disks form a valid compact ({e})"), false));
            return rep;
        }
    };
    let grid = density * 64.max(4 * (a.p.degree() + 1));
    let errs = verify_fit(&a.p, &compact, &target, grid);
    for (i, (e, t)) in errs.iter().zip(&a.certificate.tolerances).enumerate() {
        rep.push(Check::new(
            format!("fit.disk={i}"),
            "sup |P − f_i| over D_i < tol_i",
            e.ln(),
            t.ln(),
            Side::SampledLower,
            true,
        ));
    }
    rep.note("grid_density", grid.to_string());
    rep.note("default_samples", sample_count(a.p.degree()).to_string());
    rep
}

/// The verifier each construction subcommand runs, with the config's overrides.
pub fn check(art: &Artifact, cfg: &RunConfig) -> VerificationReport {
    let slack = cfg.tol_slack.unwrap_or(DEFAULT_TOL_SLACK);
    let density = cfg.density.unwrap_or(4);
    match art {
        Artifact::Norms(t) => check_norms(t),
        Artifact::Fit(a) => check_fit(a, density),
        Artifact::Lem1(p) => check_lem1(p, density, slack),
        Artifact::Bump(b) => check_bump(b, slack),
        Artifact::X0(x) => check_x0(x, slack),
        Artifact::Mk(m) => check_mk(
            m,
            cfg.j_max.unwrap_or(m.basis.len()),
            cfg.trials.unwrap_or(50),
            slack,
            cfg.seed.unwrap_or(0),
        ),
        Artifact::Nk(a) => check_nk(a.mu, &a.prefix, a.k, a.n, cfg.samples.unwrap_or(10_000).max(a.n)),
        Artifact::Grid(g) => check_grid(g, cfg.samples.unwrap_or(1000) as usize),
        Artifact::Simul(s) => check_simul(s, slack),
    }
}
