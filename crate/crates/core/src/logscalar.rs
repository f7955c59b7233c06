use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;
use std::ops::Mul;

/// A complex scalar stored as `(ln|c|, arg c)`, with an explicit zero.
///
/// Products add log-magnitudes, so factors such as `e^{bs}` or `μ^m` never
/// overflow while they are being composed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogScalar {
    Zero,
    NonZero { log_mag: f64, phase: f64 },
}

impl LogScalar {
    pub const ONE: LogScalar = LogScalar::NonZero {
        log_mag: 0.0,
        phase: 0.0,
    };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            LogScalar::Zero
        } else {
            LogScalar::NonZero {
                log_mag,
                phase: wrap_phase(phase),
            }
        }
    }

    /// `e^{x}` for real `x`.
    pub fn exp_real(x: f64) -> Self {
        LogScalar::new(x, 0.0)
    }

    pub fn from_complex(c: C64) -> Self {
        if c == C64::new(0.0, 0.0) {
            LogScalar::Zero
        } else {
            LogScalar::new(c.norm().ln(), c.arg())
        }
    }

    /// `|μ|^m e^{i m arg μ}`.
    pub fn powu(self, m: u64) -> Self {
        match self {
            LogScalar::Zero if m == 0 => LogScalar::ONE,
            LogScalar::Zero => LogScalar::Zero,
            LogScalar::NonZero { log_mag, phase } => {
                LogScalar::new(log_mag * m as f64, phase * m as f64)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LogScalar::Zero)
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn log_magnitude(&self) -> f64 {
        match self {
            LogScalar::Zero => f64::NEG_INFINITY,
            LogScalar::NonZero { log_mag, .. } => *log_mag,
        }
    }

    pub fn phase(&self) -> f64 {
        match self {
            LogScalar::Zero => 0.0,
            LogScalar::NonZero { phase, .. } => *phase,
        }
    }

    pub fn magnitude(&self) -> f64 {
        self.log_magnitude().exp()
    }

    /// Converts back to a complex number; infinite parts signal overflow.
    pub fn to_complex(&self) -> C64 {
        match self {
            LogScalar::Zero => C64::new(0.0, 0.0),
            LogScalar::NonZero { log_mag, phase } => C64::from_polar(log_mag.exp(), *phase),
        }
    }

    /// `self * c` evaluated without forming `self` as a plain float first.
    pub fn apply(&self, c: C64) -> C64 {
        match self {
            LogScalar::Zero => C64::new(0.0, 0.0),
            LogScalar::NonZero { log_mag, phase } => {
                if c == C64::new(0.0, 0.0) {
                    return c;
                }
                if log_mag.abs() < 600.0 {
                    return c * C64::from_polar(log_mag.exp(), *phase);
                }
                let lm = log_mag + c.norm().ln();
                C64::from_polar(lm.exp(), phase + c.arg())
            }
        }
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: LogScalar) -> LogScalar {
        match (self, rhs) {
            (LogScalar::NonZero { log_mag: a, phase: p }, LogScalar::NonZero { log_mag: b, phase: q }) => {
                LogScalar::new(a + b, p + q)
            }
            _ => LogScalar::Zero,
        }
    }
}

fn wrap_phase(p: f64) -> f64 {
    if !p.is_finite() || (-PI..=PI).contains(&p) {
        return p;
    }
    let w = (p + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

#[derive(Serialize, Deserialize)]
struct LogScalarRepr {
    log_mag: Option<f64>,
    phase: f64,
}

impl Serialize for LogScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            LogScalar::Zero => LogScalarRepr {
                log_mag: None,
                phase: 0.0,
            },
            LogScalar::NonZero { log_mag, phase } => LogScalarRepr {
                log_mag: Some(*log_mag),
                phase: *phase,
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LogScalarRepr::deserialize(d)?;
        match repr.log_mag {
            None => Ok(LogScalar::Zero),
            Some(lm) if lm.is_finite() && repr.phase.is_finite() => Ok(LogScalar::new(lm, repr.phase)),
            Some(_) => Err(serde::de::Error::custom("log_mag and phase must be finite")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_exponent_stays_exact() {
        let s = LogScalar::exp_real(1.0 * 700.0);
        assert_eq!(s.log_magnitude(), 700.0);
        let t = s * s;
        assert_eq!(t.log_magnitude(), 1400.0);
        assert!(t.to_complex().re.is_infinite());
    }

    #[test]
    fn apply_cancels_large_factors() {
        let big = LogScalar::exp_real(710.0);
        let small = C64::new((-750.0f64).exp(), 0.0);
        assert_eq!(small.re, 0.0);
        let c = C64::from_polar((-700.0f64).exp(), 0.3);
        let v = big.apply(c);
        assert!((v.norm() - 10f64.exp()).abs() < 1e-9 * 10f64.exp());
        assert!((v.arg() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn powu_and_zero() {
        let mu = LogScalar::from_complex(C64::new(0.0, 2.0));
        let m3 = mu.powu(3).to_complex();
        assert!((m3 - C64::new(0.0, -8.0)).norm() < 1e-12);
        assert_eq!(LogScalar::Zero.powu(0), LogScalar::ONE);
        assert!(LogScalar::Zero.powu(2).is_zero());
    }

    #[test]
    fn serde_round_trip() {
        for s in [LogScalar::Zero, LogScalar::new(-3.5, 1.25)] {
            let j = serde_json::to_string(&s).unwrap();
            let back: LogScalar = serde_json::from_str(&j).unwrap();
            assert_eq!(s, back);
        }
        let j = serde_json::to_string(&LogScalar::Zero).unwrap();
        assert_eq!(j, r#"{"log_mag":null,"phase":0.0}"#);
    }
}
