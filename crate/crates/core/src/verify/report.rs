use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Which side of the true value a measurement certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Boundary-sampled sup: a lower bound of the true norm.
    SampledLower,
    /// Coefficient norm `p'_j`: an upper bound of the true norm.
    CoeffUpper,
    /// Exact or structural quantity.
    Exact,
}

/// One inequality `measured < bound` (or `≤`), both stored as natural logs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The inequality being checked, in the notation of the construction.
    pub anchor: String,
    #[serde(with = "crate::serde_float")]
    pub measured_log: f64,
    #[serde(with = "crate::serde_float")]
    pub bound_log: f64,
    pub side: Side,
    pub strict: bool,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, measured_log: f64, bound_log: f64, side: Side, strict: bool) -> Self {
        let pass = if strict {
            measured_log < bound_log
        } else {
            measured_log <= bound_log
        };
        Self {
            name: name.into(),
            anchor: anchor.into(),
            measured_log,
            bound_log,
            side,
            strict,
            pass: pass && !measured_log.is_nan(),
        }
    }

    /// A yes/no structural fact.
    pub fn fact(name: impl Into<String>, anchor: impl Into<String>, holds: bool) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            measured_log: if holds { 0.0 } else { 1.0 },
            bound_log: 0.0,
            side: Side::Exact,
            strict: false,
            pass: holds,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// `e^{bs} (μD)^s`.
    Derivative,
    /// `e^{bs} T_a^s`.
    Translation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub kind: OperatorKind,
    pub a: C64,
    pub b: f64,
    pub window: (u64, u64),
    /// Smallest successful iterate, or the best one tried when `found` is false.
    pub s: Option<u64>,
    #[serde(with = "crate::serde_float")]
    pub error: f64,
    pub found: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub tol_slack: Option<f64>,
    pub tolerances: Vec<(String, f64)>,
    pub notes: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub witnesses: Vec<WitnessRecord>,
    pub metadata: Metadata,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.witnesses.iter().all(|w| w.found)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.witnesses.extend(other.witnesses);
        self.metadata.notes.extend(other.metadata.notes);
        self.metadata.tolerances.extend(other.metadata.tolerances);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.notes.push((key.into(), value.into()));
    }
}
