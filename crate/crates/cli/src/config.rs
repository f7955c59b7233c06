use hcsub::constructions::Mode;
use hcsub::verify::OperatorKind;
use hcsub::{ComplexPolynomial, C64};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "HCSUB_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "hcsub-out";

/// One disk of a `fit` target: the compact piece `D(center, radius)` and the polynomial
/// to approximate on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub target: ComplexPolynomial,
}

/// Every parameter a subcommand may read. Absent fields take the subcommand's default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stages: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Stage index for `nk` and `bump`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Requested valuation for `bump`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Iterate for `probe`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_growth: Option<f64>,
    /// `n`-schedule prefix (`nk`, `mk`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_schedule: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Grid spacing `C`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_points: Option<usize>,
    /// Polynomial for `norms`; the vector for `sweep` and `probe` without an artifact.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<ComplexPolynomial>,
    /// Target `f` (`lem1`, `simul`, `sweep`, `probe`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<ComplexPolynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<ComplexPolynomial>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disks: Option<Vec<DiskSpec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub windows: Option<Vec<[u64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_slack: Option<f64>,
    /// Oversampling factor of independent re-verification.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<usize>,
    /// Coverage samples for `grid`, brute-force limit for `nk`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_count: Option<usize>,
    /// Shrinking probe radius factors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_deltas: Option<Vec<f64>>,
    /// Index into an artifact's witness list for `probe`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<bool>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),* $(,)?) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("parsing {}: {e}", path.display()))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(mut self, other: RunConfig) -> Self {
        overlay!(self, other; scenario, stages, eps, mu, a, b, j, l, n, k, d, s, mode, phi_growth,
            prefix, m_schedule, delta, c, c_l, angles, b_points, poly, target, seeds, radii, disks,
            max_degree, operator, windows, tol_slack, density, samples, trials, j_max, probe_count,
            probe_deltas, witness, seed, artifact, out, csv);
        self
    }

    /// Range checks that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("eps", self.eps),
            ("j", self.j),
            ("delta", self.delta),
            ("c", self.c),
            ("phi_growth", self.phi_growth),
        ];
        for (name, v) in positive {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(format!("{name} must be a positive finite number, got {x}"));
                }
            }
        }
        if let Some(x) = self.c_l {
            if !(x > 1.0 && x.is_finite()) {
                return Err(format!("c_l must exceed 1, got {x}"));
            }
        }
        if let Some(x) = self.tol_slack {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(format!("tol_slack must be nonnegative, got {x}"));
            }
        }
        if let Some(x) = self.b {
            if !x.is_finite() {
                return Err("b must be finite".into());
            }
        }
        for (name, v) in [("mu", self.mu), ("a", self.a)] {
            if let Some([re, im]) = v {
                if !(re.is_finite() && im.is_finite()) {
                    return Err(format!("{name} must be finite"));
                }
            }
        }
        let nonzero = [
            ("stages", self.stages),
            ("l", self.l),
            ("k", self.k),
            ("angles", self.angles),
            ("b_points", self.b_points),
            ("density", self.density),
            ("j_max", self.j_max),
            ("probe_count", self.probe_count),
        ];
        for (name, v) in nonzero {
            if v == Some(0) {
                return Err(format!("{name} must be at least 1"));
            }
        }
        if let Some(r) = &self.radii {
            if r.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err("radii must be positive".into());
            }
        }
        if let Some(ds) = &self.probe_deltas {
            if ds.is_empty() || ds.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                return Err("probe_deltas must be a non-empty list of nonnegative numbers".into());
            }
        }
        if let Some(ds) = &self.disks {
            if ds.iter().any(|d| !(d.radius > 0.0 && d.radius.is_finite())) {
                return Err("disk radii must be positive".into());
            }
        }
        if let Some(ws) = &self.windows {
            if ws.iter().any(|[lo, hi]| lo > hi) {
                return Err("windows must satisfy lo ≤ hi".into());
            }
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    pub fn mu_c(&self) -> C64 {
        self.mu.map_or(C64::new(1.0, 0.0), |[re, im]| C64::new(re, im))
    }

    pub fn a_c(&self) -> C64 {
        self.a.map_or(C64::new(1.0, 0.0), |[re, im]| C64::new(re, im))
    }
}

/// `"re,im"` or a bare real.
pub fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("expected re,im, got {s:?}")),
    }
}

/// `"c0;c1;..."` with each coefficient `re,im` (or a bare real), lowest degree first.
pub fn parse_poly(s: &str) -> Result<ComplexPolynomial, String> {
    let coeffs = s
        .split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_complex(t).map(|[re, im]| C64::new(re, im)))
        .collect::<Result<Vec<_>, _>>()?;
    ComplexPolynomial::from_coeffs(coeffs).map_err(|e| e.to_string())
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<T>().map_err(|e| format!("bad entry {t:?}: {e}")))
        .collect()
}

/// `"re,im,r"`.
pub fn parse_disk(s: &str) -> Result<([f64; 2], f64), String> {
    let v: Vec<f64> = parse_list(s)?;
    match v.as_slice() {
        [re, im, r] => Ok(([*re, *im], *r)),
        _ => Err(format!("expected re,im,r, got {s:?}")),
    }
}

/// `"lo,hi"`.
pub fn parse_window(s: &str) -> Result<[u64; 2], String> {
    let v: Vec<u64> = parse_list(s)?;
    match v.as_slice() {
        [lo, hi] => Ok([*lo, *hi]),
        _ => Err(format!("expected lo,hi, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_flag() {
        let p = parse_poly("1,0;0,1").unwrap();
        assert_eq!(p.coeffs(), &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        assert_eq!(parse_poly("2").unwrap().coeffs(), &[C64::new(2.0, 0.0)]);
        assert!(parse_poly("1,2,3").is_err());
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"eps": 0.1, "epsilon": 2}"#).is_err());
    }

    #[test]
    fn negative_eps_rejected() {
        let c = RunConfig {
            eps: Some(-1.0),
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
