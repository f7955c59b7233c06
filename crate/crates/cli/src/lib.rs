//! Driver behind the `hcsub` binary: every construction and verifier as a subcommand,
//! with JSON artifacts, JSON reports and CSV traces.

pub mod artifact;
pub mod config;
pub mod output;

use artifact::{check, fit_problem, Artifact, FitArtifact, NkArtifact, NormRow, NormTable};
use config::RunConfig;
use hcsub::constructions::{
    compute_nk, default_m_schedule, grid_radius, grid_band, lem1_perturb, lem2_bump, mk_basis, simul_build, x0_build,
    MkOptions, Mode, Role, Schedule, SimulOptions, WindowMap, X0Options,
};
use hcsub::norms::sup_norm;
use hcsub::verify::{
    angle_mesh, b_mesh, orbit_error, probe_radii, sweep_mesh, OperatorKind, OperatorSpec, SweepFamily,
    VerificationReport,
};
use hcsub::{fit_with, ComplexPolynomial, FitOptions, LogScalar};
use output::{sha256_hex, to_json, write_atomic, write_csv, TraceRow};
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Norms,
    Fit,
    Lem1,
    Bump,
    X0,
    Mk,
    Nk,
    Grid,
    Simul,
    Check,
    Sweep,
    Probe,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Norms => "norms",
            Subcommand::Fit => "fit",
            Subcommand::Lem1 => "lem1",
            Subcommand::Bump => "bump",
            Subcommand::X0 => "x0",
            Subcommand::Mk => "mk",
            Subcommand::Nk => "nk",
            Subcommand::Grid => "grid",
            Subcommand::Simul => "simul",
            Subcommand::Check => "check",
            Subcommand::Sweep => "sweep",
            Subcommand::Probe => "probe",
        }
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_CONSTRUCTION: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

enum Failure {
    Config(String),
    Construction(String),
}

impl From<hcsub::Error> for Failure {
    fn from(e: hcsub::Error) -> Self {
        match e {
            hcsub::Error::InvalidInput(m) => Failure::Config(m),
            other => Failure::Construction(other.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Construction(format!("{e:#}"))
    }
}

#[derive(Serialize)]
struct ReportEnvelope<'a> {
    subcommand: Subcommand,
    version: &'static str,
    config: &'a RunConfig,
    artifact_kind: Option<&'a str>,
    artifact_path: Option<String>,
    artifact_sha256: Option<String>,
    passed: bool,
    elapsed_ms: f64,
    report: &'a VerificationReport,
}

#[derive(Serialize)]
struct ErrorEnvelope<'a> {
    subcommand: Subcommand,
    version: &'static str,
    config: &'a RunConfig,
    exit_code: i32,
    error: &'a str,
}

struct Run {
    cmd: Subcommand,
    cfg: RunConfig,
    scenario: String,
    out: PathBuf,
    start: Instant,
    files: Vec<PathBuf>,
    lines: Vec<String>,
}

pub fn run(cmd: Subcommand, cfg: RunConfig) -> Outcome {
    let scenario = cfg.scenario.clone().unwrap_or_else(|| cmd.name().to_string());
    let mut r = Run {
        cmd,
        out: cfg.out_dir(),
        cfg,
        scenario,
        start: Instant::now(),
        files: vec![],
        lines: vec![],
    };
    let result = match r.cfg.validate() {
        Err(m) => Err(Failure::Config(m)),
        Ok(()) => r.dispatch(),
    };
    let code = match result {
        Ok(code) => code,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Config(m) => (EXIT_CONFIG, format!("config error: {m}")),
                Failure::Construction(m) => (EXIT_CONSTRUCTION, format!("construction failure: {m}")),
            };
            r.lines.push(msg.clone());
            let env = ErrorEnvelope {
                subcommand: cmd,
                version: env!("CARGO_PKG_VERSION"),
                config: &r.cfg,
                exit_code: code,
                error: &msg,
            };
            let path = r.path("error.json");
            if to_json(&env).and_then(|b| write_atomic(&path, &b)).is_ok() {
                r.files.push(path);
            }
            code
        }
    };
    Outcome {
        code,
        files: r.files,
        lines: r.lines,
    }
}

impl Run {
    fn path(&self, suffix: &str) -> PathBuf {
        self.out.join(format!("{}.{}.{suffix}", self.scenario, self.cmd.name()))
    }

    fn dispatch(&mut self) -> Result<i32, Failure> {
        match self.cmd {
            Subcommand::Check => {
                let (art, digest, path) = self.load_artifact()?;
                let rep = check(&art, &self.cfg);
                self.finish(&rep, Some((art.kind(), path, digest)))
            }
            Subcommand::Sweep => self.sweep(),
            Subcommand::Probe => self.probe(),
            _ => {
                let art = self.construct()?;
                let bytes = to_json(&art)?;
                let path = self.out.join(format!("{}.{}.json", self.scenario, art.kind()));
                write_atomic(&path, &bytes)?;
                self.files.push(path.clone());
                let digest = sha256_hex(&bytes);
                let rep = check(&art, &self.cfg);
                if self.cfg.csv == Some(true) {
                    if let Artifact::Simul(s) = &art {
                        let rows = trace_plan(&self.scenario, &s.x, &s.f, s.l as f64, s.eps, &s.sweep_plan())?;
                        let p = self.path("trace.csv");
                        write_csv(&p, &rows)?;
                        self.files.push(p);
                    }
                }
                self.finish(&rep, Some((art.kind(), path, digest)))
            }
        }
    }

    fn load_artifact(&self) -> Result<(Artifact, String, PathBuf), Failure> {
        let path = self
            .cfg
            .artifact
            .clone()
            .ok_or_else(|| Failure::Config("--artifact is required".into()))?;
        let bytes = std::fs::read(&path).map_err(|e| Failure::Config(format!("reading {}: {e}", path.display())))?;
        let art: Artifact =
            serde_json::from_slice(&bytes).map_err(|e| Failure::Config(format!("parsing {}: {e}", path.display())))?;
        Ok((art, sha256_hex(&bytes), path))
    }

    fn finish(&mut self, rep: &VerificationReport, art: Option<(&str, PathBuf, String)>) -> Result<i32, Failure> {
        let passed = rep.passed();
        let (kind, apath, digest) = match art {
            Some((k, p, d)) => (Some(k), Some(p.display().to_string()), Some(d)),
            None => (None, None, None),
        };
        let env = ReportEnvelope {
            subcommand: self.cmd,
            version: env!("CARGO_PKG_VERSION"),
            config: &self.cfg,
            artifact_kind: kind,
            artifact_path: apath,
            artifact_sha256: digest,
            passed,
            elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
            report: rep,
        };
        let path = self.path("report.json");
        write_atomic(&path, &to_json(&env)?)?;
        self.files.push(path);
        for c in rep.failures() {
            self.lines.push(format!(
                "FAIL {}: {} (measured {:.4}, bound {:.4})",
                c.name, c.anchor, c.measured_log, c.bound_log
            ));
        }
        let missing = rep.witnesses.iter().filter(|w| !w.found).count();
        if missing > 0 {
            self.lines.push(format!("FAIL {missing} of {} mesh points without a witness", rep.witnesses.len()));
        }
        self.lines.push(format!(
            "{}: {} ({} checks, {} witnesses)",
            self.cmd.name(),
            if passed { "PASS" } else { "FAIL" },
            rep.checks.len(),
            rep.witnesses.len()
        ));
        Ok(if passed { EXIT_PASS } else { EXIT_CHECKS_FAILED })
    }

    fn construct(&mut self) -> Result<Artifact, Failure> {
        let c = &self.cfg;
        let art = match self.cmd {
            Subcommand::Norms => {
                let poly = c.poly.clone().ok_or_else(|| Failure::Config("--poly is required".into()))?;
                let radii = c.radii.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0]);
                let rows = radii
                    .iter()
                    .map(|&j| {
                        let e = sup_norm(&poly, j, LogScalar::ONE);
                        NormRow {
                            j,
                            sampled_sup: e.sampled_sup(),
                            coeff_bound: e.coeff_bound(),
                            sample_count: e.sample_count,
                        }
                    })
                    .collect::<Vec<_>>();
                for r in &rows {
                    self.lines.push(format!("j = {}: p_j = {:.6e}, p'_j = {:.6e}", r.j, r.sampled_sup, r.coeff_bound));
                }
                Artifact::Norms(NormTable { poly, rows })
            }
            Subcommand::Fit => {
                let disks = c.disks.clone().ok_or_else(|| Failure::Config("at least one --disk is required".into()))?;
                let eps = c.eps.ok_or_else(|| Failure::Config("--eps is required".into()))?;
                let (compact, target) = fit_problem(&disks)?;
                let mut opts = FitOptions::new(eps);
                if let Some(n) = c.max_degree {
                    opts = opts.with_max_degree(n);
                }
                if let Some(d) = c.d {
                    opts = opts.with_valuation(d);
                }
                let (p, certificate) = fit_with(&compact, &target, &opts)?;
                self.lines.push(format!("fitted degree {}", certificate.fitted_degree));
                Artifact::Fit(FitArtifact {
                    disks,
                    eps,
                    p,
                    certificate,
                })
            }
            Subcommand::Lem1 => {
                let f = c.target.clone().unwrap_or_else(ComplexPolynomial::z);
                Artifact::Lem1(lem1_perturb(
                    c.j.unwrap_or(1.0),
                    c.a_c(),
                    c.n.unwrap_or(3),
                    c.eps.unwrap_or(0.1),
                    &f,
                )?)
            }
            Subcommand::Bump => {
                let k = c.k.or(c.stages).unwrap_or(1);
                let a = c.a_c();
                let m = match &c.m_schedule {
                    Some(v) => Schedule::new(v.clone(), Role::RotationTranslation)?,
                    None => default_m_schedule(a, k),
                };
                let eps = c.eps.unwrap_or(0.5f64.powi(k as i32));
                Artifact::Bump(lem2_bump(a, &m, k, eps, c.d.unwrap_or(1))?)
            }
            Subcommand::X0 => {
                let seeds = c
                    .seeds
                    .clone()
                    .unwrap_or_else(|| vec![ComplexPolynomial::one(), ComplexPolynomial::z()]);
                let k = c.stages.unwrap_or(4);
                let opts = match c.mode.unwrap_or(Mode::Pair) {
                    Mode::Pair => X0Options::pair(c.mu_c(), c.a_c(), k),
                    Mode::Family => X0Options::family(k, phi(c)),
                };
                Artifact::X0(x0_build(&seeds, &opts)?)
            }
            Subcommand::Mk => {
                let k = c.stages.unwrap_or(2);
                let mut opts = match c.mode.unwrap_or(Mode::Pair) {
                    Mode::Pair => MkOptions::pair(c.mu_c(), c.a_c(), k),
                    Mode::Family => MkOptions::family(k, phi(c)),
                };
                if let Some(v) = &c.prefix {
                    opts.n = Some(Schedule::new(v.clone(), Role::Derivative)?);
                }
                if let Some(v) = &c.m_schedule {
                    opts.m = Some(Schedule::new(v.clone(), Role::RotationTranslation)?);
                }
                Artifact::Mk(mk_basis(&opts)?)
            }
            Subcommand::Nk => {
                let prefix = c.prefix.clone().ok_or_else(|| Failure::Config("--prefix is required".into()))?;
                let k = c.k.unwrap_or(prefix.len());
                let mu = c.mu_c();
                let n = compute_nk(mu, &prefix, k)?;
                self.lines.push(format!("N = {n}"));
                Artifact::Nk(NkArtifact { mu, prefix, k, n })
            }
            Subcommand::Grid => {
                let (delta, cc, n) = (c.delta.unwrap_or(0.5), c.c.unwrap_or(4.0), c.n.unwrap_or(1));
                let r = grid_radius(delta, cc, n)?;
                let g = grid_band(delta, cc, n, r)?;
                self.lines.push(format!("R = {r}, {} points", g.points.len()));
                Artifact::Grid(g)
            }
            Subcommand::Simul => {
                let f = c.target.clone().unwrap_or_else(ComplexPolynomial::z);
                let mut opts = SimulOptions::new(c.l.unwrap_or(1), c.n.unwrap_or(1), c.eps.unwrap_or(0.5), f);
                opts.phi = phi(c);
                if let Some(d) = c.delta {
                    opts.delta = d;
                }
                if let Some(x) = c.c_l {
                    opts.c_l = x;
                }
                if let Some(x) = c.angles {
                    opts.angles = x;
                }
                if let Some(x) = c.b_points {
                    opts.b_points = x;
                }
                if let Some(k) = c.k {
                    opts.k_min = k;
                }
                Artifact::Simul(simul_build(&opts)?)
            }
            Subcommand::Check | Subcommand::Sweep | Subcommand::Probe => unreachable!(),
        };
        Ok(art)
    }

    /// Sweep source: a `simul` artifact, or `--poly`, `--target`, `--operator` and `--window`s.
    fn sweep(&mut self) -> Result<i32, Failure> {
        let c = self.cfg.clone();
        let (x, f, l, eps, plan, art) = if c.artifact.is_some() {
            let (art, digest, path) = self.load_artifact()?;
            let Artifact::Simul(s) = &art else {
                return Err(Failure::Config(format!("sweep needs a simul artifact, got {}", art.kind())));
            };
            let plan = s.sweep_plan();
            (s.x.clone(), s.f.clone(), s.l as f64, s.eps, plan, Some(("simul", path, digest)))
        } else {
            let x = c.poly.clone().ok_or_else(|| Failure::Config("--poly or --artifact is required".into()))?;
            let f = c.target.clone().unwrap_or_else(ComplexPolynomial::z);
            let windows: Vec<(u64, u64)> = c
                .windows
                .clone()
                .ok_or_else(|| Failure::Config("--window is required".into()))?
                .into_iter()
                .map(|[lo, hi]| (lo, hi))
                .collect();
            let bs = match (c.n, c.b) {
                (Some(n), _) => b_mesh(n as f64, c.b_points.unwrap_or(5)),
                (None, b) => vec![b.unwrap_or(0.0)],
            };
            let family = match c.operator.unwrap_or(OperatorKind::Translation) {
                OperatorKind::Derivative => SweepFamily::Derivative { mu: c.mu_c(), b_mesh: bs },
                OperatorKind::Translation => SweepFamily::Translation {
                    a_mesh: c.angles.map_or_else(|| vec![c.a_c()], angle_mesh),
                    b_mesh: bs,
                },
            };
            let eps = c.eps.unwrap_or(0.5);
            (x, f, c.l.unwrap_or(1) as f64, eps, vec![(family, windows)], None)
        };
        let mut rep = VerificationReport::default();
        for (family, windows) in &plan {
            rep.extend(sweep_mesh(&x, family, windows, &f, l, eps)?);
        }
        if c.csv == Some(true) {
            let rows = trace_plan(&self.scenario, &x, &f, l, eps, &plan)?;
            let p = self.path("trace.csv");
            write_csv(&p, &rows)?;
            self.files.push(p);
        }
        self.finish(&rep, art)
    }

    /// Probe source: a witness of a `simul` artifact, or `--poly`, `--target`, `--s`, `--a`, `--b`.
    fn probe(&mut self) -> Result<i32, Failure> {
        let c = self.cfg.clone();
        let deltas = c.probe_deltas.clone().unwrap_or_else(|| vec![0.1, 0.05, 0.025]);
        let count = c.probe_count.unwrap_or(64);
        let (x, f, l, s, a, b, art) = if c.artifact.is_some() {
            let (art, digest, path) = self.load_artifact()?;
            let Artifact::Simul(sa) = &art else {
                return Err(Failure::Config(format!("probe needs a simul artifact, got {}", art.kind())));
            };
            let candidates: Vec<_> = sa
                .witnesses
                .iter()
                .filter(|w| w.found && w.kind == OperatorKind::Translation)
                .collect();
            let w = candidates
                .get(c.witness.unwrap_or(0))
                .ok_or_else(|| Failure::Config("no such translation witness in the artifact".into()))?;
            let s = w.s.ok_or_else(|| Failure::Config("witness has no iterate".into()))?;
            (sa.x.clone(), sa.f.clone(), sa.l as f64, s, w.a, w.b, Some(("simul", path, digest)))
        } else {
            let x = c.poly.clone().ok_or_else(|| Failure::Config("--poly or --artifact is required".into()))?;
            let s = c.s.ok_or_else(|| Failure::Config("--s is required".into()))?;
            let f = c.target.clone().unwrap_or_else(ComplexPolynomial::z);
            (x, f, c.l.unwrap_or(1) as f64, s, c.a_c(), c.b.unwrap_or(0.0), None)
        };
        let rep = probe_radii(&x, s, a, b, &f, l, &deltas, count)?;
        if c.csv == Some(true) {
            let err = orbit_error(&x, &OperatorSpec::translation(a, b)?, s, &f, l);
            let rows = vec![TraceRow {
                scenario: self.scenario.clone(),
                a_re: a.re,
                a_im: a.im,
                b,
                s,
                log_error: err.ln(),
            }];
            let p = self.path("trace.csv");
            write_csv(&p, &rows)?;
            self.files.push(p);
        }
        self.finish(&rep, art)
    }
}

fn phi(c: &RunConfig) -> WindowMap {
    WindowMap {
        growth: c.phi_growth.unwrap_or(1.0),
    }
}

/// Every iterate visited by the sweep, up to and including the first witness per mesh point.
fn trace_plan(
    scenario: &str,
    x: &ComplexPolynomial,
    f: &ComplexPolynomial,
    l: f64,
    eps: f64,
    plan: &[(SweepFamily, Vec<(u64, u64)>)],
) -> Result<Vec<TraceRow>, Failure> {
    let mut rows = Vec::new();
    for (family, windows) in plan {
        for op in family.operators()? {
            'mesh: for &(lo, hi) in windows {
                for s in lo..=hi {
                    let e = orbit_error(x, &op, s, f, l);
                    rows.push(TraceRow {
                        scenario: scenario.to_string(),
                        a_re: if op.kind == OperatorKind::Derivative { 0.0 } else { op.a.re },
                        a_im: if op.kind == OperatorKind::Derivative { 0.0 } else { op.a.im },
                        b: op.b,
                        s,
                        log_error: e.ln(),
                    });
                    if e < eps {
                        break 'mesh;
                    }
                }
            }
        }
    }
    Ok(rows)
}
