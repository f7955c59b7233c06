use clap::Parser;
use hcsub::constructions::Mode;
use hcsub::verify::OperatorKind;
use hcsub::ComplexPolynomial;
use hcsub_cli::config::{parse_complex, parse_disk, parse_list, parse_poly, parse_window, DiskSpec, RunConfig, OUT_DIR_ENV};
use hcsub_cli::{run, Subcommand, EXIT_CONFIG};
use std::path::PathBuf;

// Aliases keep clap from reading `Option<Vec<_>>` as a repeated flag.
type U64List = Vec<u64>;
type F64List = Vec<f64>;

/// Finite-stage constructions and verifiers for common hypercyclic subspaces.
///
/// Exit codes: 0 all checks pass, 1 checks failed, 2 construction failure, 3 config error.
#[derive(Parser, Debug)]
#[command(name = "hcsub", version)]
struct Cli {
    #[arg(value_enum)]
    command: Subcommand,

    /// JSON RunConfig; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long, value_name = "K")]
    stages: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    /// `re,im`
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    mu: Option<[f64; 2]>,
    /// `re,im`
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    a: Option<[f64; 2]>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long)]
    j: Option<f64>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    s: Option<u64>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long)]
    phi_growth: Option<f64>,
    /// Comma-separated `n`-schedule prefix.
    #[arg(long, value_parser = parse_list::<u64>)]
    prefix: Option<U64List>,
    #[arg(long, value_parser = parse_list::<u64>)]
    m_schedule: Option<U64List>,
    #[arg(long)]
    delta: Option<f64>,
    /// Grid spacing `C`.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    c_l: Option<f64>,
    #[arg(long)]
    angles: Option<usize>,
    #[arg(long)]
    b_points: Option<usize>,
    /// Coefficients `re,im;re,im;...`, lowest degree first.
    #[arg(long, value_parser = parse_poly, allow_hyphen_values = true)]
    poly: Option<ComplexPolynomial>,
    #[arg(long, value_parser = parse_poly, allow_hyphen_values = true)]
    target: Option<ComplexPolynomial>,
    /// Repeatable; one seed polynomial per flag.
    #[arg(long = "seed-poly", value_parser = parse_poly, allow_hyphen_values = true)]
    seed_poly: Vec<ComplexPolynomial>,
    #[arg(long, value_parser = parse_list::<f64>)]
    radii: Option<F64List>,
    /// Repeatable `re,im,r`; pairs with `--disk-target` in order.
    #[arg(long, value_parser = parse_disk, allow_hyphen_values = true)]
    disk: Vec<([f64; 2], f64)>,
    #[arg(long = "disk-target", value_parser = parse_poly, allow_hyphen_values = true)]
    disk_target: Vec<ComplexPolynomial>,
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long, value_parser = parse_operator)]
    operator: Option<OperatorKind>,
    /// Repeatable `lo,hi`.
    #[arg(long, value_parser = parse_window)]
    window: Vec<[u64; 2]>,
    #[arg(long)]
    tol_slack: Option<f64>,
    #[arg(long)]
    density: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    j_max: Option<usize>,
    #[arg(long)]
    probe_count: Option<usize>,
    #[arg(long, value_parser = parse_list::<f64>)]
    probe_deltas: Option<F64List>,
    #[arg(long)]
    witness: Option<usize>,
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    artifact: Option<PathBuf>,
    /// Output directory (default: $HCSUB_OUT_DIR, else ./hcsub-out).
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
    /// Write CSV traces.
    #[arg(long)]
    csv: bool,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "pair" => Ok(Mode::Pair),
        "family" => Ok(Mode::Family),
        _ => Err(format!("mode must be pair or family, got {s:?}")),
    }
}

fn parse_operator(s: &str) -> Result<OperatorKind, String> {
    match s {
        "derivative" => Ok(OperatorKind::Derivative),
        "translation" => Ok(OperatorKind::Translation),
        _ => Err(format!("operator must be derivative or translation, got {s:?}")),
    }
}

impl Cli {
    fn flags(self) -> Result<RunConfig, String> {
        if self.disk.len() != self.disk_target.len() {
            return Err(format!(
                "{} --disk flags but {} --disk-target flags",
                self.disk.len(),
                self.disk_target.len()
            ));
        }
        let disks: Vec<DiskSpec> = self
            .disk
            .into_iter()
            .zip(self.disk_target)
            .map(|((center, radius), target)| DiskSpec { center, radius, target })
            .collect();
        Ok(RunConfig {
            scenario: self.scenario,
            stages: self.stages,
            eps: self.eps,
            mu: self.mu,
            a: self.a,
            b: self.b,
            j: self.j,
            l: self.l,
            n: self.n,
            k: self.k,
            d: self.d,
            s: self.s,
            mode: self.mode,
            phi_growth: self.phi_growth,
            prefix: self.prefix,
            m_schedule: self.m_schedule,
            delta: self.delta,
            c: self.c,
            c_l: self.c_l,
            angles: self.angles,
            b_points: self.b_points,
            poly: self.poly,
            target: self.target,
            seeds: (!self.seed_poly.is_empty()).then_some(self.seed_poly),
            radii: self.radii,
            disks: (!disks.is_empty()).then_some(disks),
            max_degree: self.max_degree,
            operator: self.operator,
            windows: (!self.window.is_empty()).then_some(self.window),
            tol_slack: self.tol_slack,
            density: self.density,
            samples: self.samples,
            trials: self.trials,
            j_max: self.j_max,
            probe_count: self.probe_count,
            probe_deltas: self.probe_deltas,
            witness: self.witness,
            seed: self.seed,
            artifact: self.artifact,
            out: self.out,
            csv: self.csv.then_some(true),
        })
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let command = cli.command;
    let base = match &cli.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(m) => {
                eprintln!("config error: {m}");
                std::process::exit(EXIT_CONFIG);
            }
        },
        None => RunConfig::default(),
    };
    let cfg = match cli.flags() {
        Ok(f) => base.merge(f),
        Err(m) => {
            eprintln!("config error: {m}");
            std::process::exit(EXIT_CONFIG);
        }
    };
    let outcome = run(command, cfg);
    for line in &outcome.lines {
        println!("{line}");
    }
    for f in &outcome.files {
        eprintln!("wrote {}", f.display());
    }
    std::process::exit(outcome.code);
}
