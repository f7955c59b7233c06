use crate::error::{Error, Result};
use crate::logscalar::LogScalar;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Neg, Sub};

/// Refusal threshold for coefficient-space Taylor shifts.
pub const SHIFT_LIMIT: f64 = 1e280;

const ZERO: C64 = C64::new(0.0, 0.0);
/// Largest natural log that still fits in an `f64` with some headroom.
const LN_MAX: f64 = 709.0;

/// Polynomial `Σ c_k z^k` with complex `f64` coefficients in canonical form:
/// the highest stored coefficient is nonzero, and the zero polynomial stores nothing.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct ComplexPolynomial {
    coeffs: Vec<C64>,
}

/// Valuation of a polynomial; the zero polynomial has `Infinite`, ordered above every integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(usize),
    Infinite,
}

impl Valuation {
    pub fn at_least(self, d: usize) -> bool {
        self >= Valuation::Finite(d)
    }
}

impl TryFrom<Vec<[f64; 2]>> for ComplexPolynomial {
    type Error = String;
    fn try_from(v: Vec<[f64; 2]>) -> std::result::Result<Self, String> {
        let coeffs: Vec<C64> = v.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        ComplexPolynomial::from_coeffs(coeffs).map_err(|e| e.to_string())
    }
}

impl From<ComplexPolynomial> for Vec<[f64; 2]> {
    fn from(p: ComplexPolynomial) -> Self {
        p.coeffs.iter().map(|c| [c.re, c.im]).collect()
    }
}

impl ComplexPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::from_coeffs_unchecked(vec![c])
    }

    /// `c z^n`.
    pub fn monomial(n: usize, c: C64) -> Self {
        let mut v = vec![ZERO; n + 1];
        v[n] = c;
        Self::from_coeffs_unchecked(v)
    }

    /// The identity function `z`.
    pub fn z() -> Self {
        Self::monomial(1, C64::new(1.0, 0.0))
    }

    /// Builds a polynomial, rejecting non-finite coefficients.
    pub fn from_coeffs(coeffs: Vec<C64>) -> Result<Self> {
        if let Some(k) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NumericOverflow(format!("coefficient {k} is not finite")));
        }
        Ok(Self::from_coeffs_unchecked(coeffs))
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::from_coeffs_unchecked(coeffs.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    fn from_coeffs_unchecked(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == ZERO) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    fn checked(coeffs: Vec<C64>, what: &str) -> Result<Self> {
        Self::from_coeffs(coeffs).map_err(|_| Error::NumericOverflow(format!("{what} produced non-finite coefficients")))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `z^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest stored index; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|c| *c != ZERO) {
            Some(k) => Valuation::Finite(k),
            None => Valuation::Infinite,
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Plain Horner evaluation; may return non-finite values on overflow.
    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Horner evaluation with an overflow check.
    pub fn evaluate(&self, z: C64) -> Result<C64> {
        let v = self.eval(z);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NumericOverflow(format!("evaluation at {z} overflowed")))
        }
    }

    /// `p(z)` as a [`LogScalar`], computed without overflow for large `|z|`.
    pub fn log_eval(&self, z: C64) -> LogScalar {
        if self.is_zero() {
            return LogScalar::Zero;
        }
        let m = self.max_abs_coeff();
        let r = z.norm();
        let (acc, extra_log, extra_phase) = if r <= 1.0 {
            let mut acc = ZERO;
            for c in self.coeffs.iter().rev() {
                acc = acc * z + c / m;
            }
            (acc, 0.0, 0.0)
        } else {
            let w = z.inv();
            let mut acc = ZERO;
            for c in self.coeffs.iter() {
                acc = acc * w + c / m;
            }
            let n = self.degree() as f64;
            (acc, n * r.ln(), n * z.arg())
        };
        if acc == ZERO {
            return LogScalar::Zero;
        }
        LogScalar::new(m.ln() + extra_log + acc.norm().ln(), extra_phase + acc.arg())
    }

    /// `ln|p(z)|`, computed without overflow for large `|z|` (`-inf` at roots).
    pub fn log_abs_eval(&self, z: C64) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let m = self.max_abs_coeff();
        let r = z.norm();
        if r <= 1.0 {
            let mut acc = ZERO;
            for c in self.coeffs.iter().rev() {
                acc = acc * z + c / m;
            }
            m.ln() + acc.norm().ln()
        } else {
            let w = z.inv();
            let mut acc = ZERO;
            for c in self.coeffs.iter() {
                acc = acc * w + c / m;
            }
            m.ln() + self.degree() as f64 * r.ln() + acc.norm().ln()
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_coeffs_unchecked(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `scale * self`, coefficient-wise in log space; errors if a coefficient overflows.
    pub fn scale_log(&self, s: LogScalar) -> Result<Self> {
        let v: Vec<C64> = self.coeffs.iter().map(|c| s.apply(*c)).collect();
        Self::checked(v, "log-scaled product")
    }

    /// `z^d · self`.
    pub fn mul_z_pow(&self, d: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![ZERO; d];
        v.extend_from_slice(&self.coeffs);
        Self { coeffs: v }
    }

    /// Exact quotient by `z^d`; `None` if the valuation is below `d`.
    pub fn div_z_pow(&self, d: usize) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if !self.valuation().at_least(d) {
            return None;
        }
        Some(Self::from_coeffs_unchecked(self.coeffs[d..].to_vec()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut v = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::from_coeffs_unchecked(v)
    }

    /// `q(z) = p(z + c)`. Refused when `max|c_k| (|c|+1)^deg > 1e280`.
    pub fn taylor_shift(&self, c: C64) -> Result<Self> {
        if self.is_zero() || c == ZERO {
            return Ok(self.clone());
        }
        let n = self.degree();
        let log_bound = self.max_abs_coeff().ln() + n as f64 * (c.norm() + 1.0).ln();
        if log_bound > SHIFT_LIMIT.ln() {
            return Err(Error::NumericOverflow(format!(
                "taylor shift by {c} of a degree-{n} polynomial exceeds the coefficient limit"
            )));
        }
        let mut a = self.coeffs.clone();
        for i in 0..n {
            for j in (i..n).rev() {
                let next = a[j + 1];
                a[j] += c * next;
            }
        }
        Self::checked(a, "taylor shift")
    }

    /// `(μD)^m p`: coefficient of `z^{k-m}` is `μ^m k!/(k-m)! c_k`.
    pub fn derivative_iter(&self, m: usize, mu: C64) -> Result<Self> {
        if m == 0 {
            return Ok(self.clone());
        }
        if m > self.degree() || self.is_zero() || mu == ZERO {
            return Ok(Self::zero());
        }
        let mu_pow = LogScalar::from_complex(mu).powu(m as u64);
        let lmu = mu.norm().ln() * m as f64;
        let mut out = Vec::with_capacity(self.coeffs.len() - m);
        for k in m..self.coeffs.len() {
            let c = self.coeffs[k];
            if c == ZERO {
                out.push(ZERO);
                continue;
            }
            let lf = ln_falling(k as u64, m as u64);
            if lf + lmu + c.norm().ln() > LN_MAX {
                return Err(Error::NumericOverflow(format!(
                    "derivative of order {m} overflows at coefficient {k}"
                )));
            }
            if lf < 600.0 {
                let mut fall = 1.0;
                for v in (k - m + 1)..=k {
                    fall *= v as f64;
                }
                out.push(mu_pow.apply(c) * fall);
            } else {
                out.push((mu_pow * LogScalar::new(lf, 0.0)).apply(c));
            }
        }
        Self::checked(out, "derivative")
    }

    /// `scale · (μD)^m p` computed coefficient-wise in log space, so that huge
    /// factorial products meet tiny coefficients without intermediate overflow.
    pub fn scaled_derivative(&self, m: usize, mu: C64, scale: LogScalar) -> Result<Self> {
        if self.is_zero() || scale.is_zero() {
            return Ok(Self::zero());
        }
        if m == 0 {
            return self.scale_log(scale);
        }
        if m > self.degree() || mu == ZERO {
            return Ok(Self::zero());
        }
        let factor = scale * LogScalar::from_complex(mu).powu(m as u64);
        let mut out = Vec::with_capacity(self.coeffs.len() - m);
        for k in m..self.coeffs.len() {
            let c = self.coeffs[k];
            let f = factor * LogScalar::new(ln_falling(k as u64, m as u64), 0.0);
            out.push(f.apply(c));
        }
        Self::checked(out, "scaled derivative")
    }

    /// `scale · S^m p` where `S^m` maps `a_k z^k` to `a_k k!/(k+m)! z^{k+m}`,
    /// a right inverse of `D^m`.
    pub fn scaled_antiderivative(&self, m: usize, scale: LogScalar) -> Result<Self> {
        if self.is_zero() || scale.is_zero() {
            return Ok(Self::zero());
        }
        let mut out = vec![ZERO; m + self.coeffs.len()];
        for (k, c) in self.coeffs.iter().enumerate() {
            let f = scale * LogScalar::new(-ln_falling((k + m) as u64, m as u64), 0.0);
            out[k + m] = f.apply(*c);
        }
        Self::checked(out, "antiderivative")
    }

    /// The pair `(e^{bs}, T_{as} p)` representing `e^{bs} T_a^s p`.
    pub fn scaled_translate_iter(&self, a: C64, s: u64, b: f64) -> Result<(LogScalar, Self)> {
        let scale = LogScalar::exp_real(b * s as f64);
        let shifted = self.taylor_shift(a * s as f64)?;
        Ok((scale, shifted))
    }
}

impl Add for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn add(self, rhs: &ComplexPolynomial) -> ComplexPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        ComplexPolynomial::from_coeffs_unchecked(v)
    }
}

impl Sub for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn sub(self, rhs: &ComplexPolynomial) -> ComplexPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        ComplexPolynomial::from_coeffs_unchecked(v)
    }
}

impl Neg for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn neg(self) -> ComplexPolynomial {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Add for ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn add(self, rhs: ComplexPolynomial) -> ComplexPolynomial {
        &self + &rhs
    }
}

impl Sub for ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn sub(self, rhs: ComplexPolynomial) -> ComplexPolynomial {
        &self - &rhs
    }
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 256 {
        return (2..=n).map(|v| (v as f64).ln()).sum();
    }
    let x = n as f64;
    // Stirling series; the first omitted term is below 1e-17 for n > 256.
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// `ln (n!/(n-m)!)` for `m ≤ n`.
pub fn ln_falling(n: u64, m: u64) -> f64 {
    debug_assert!(m <= n);
    if m <= 64 {
        ((n - m + 1)..=n).map(|v| (v as f64).ln()).sum()
    } else {
        ln_factorial(n) - ln_factorial(n - m)
    }
}

/// Relative comparison used across the crate for equality assertions.
pub fn rel_close(a: C64, b: C64, tol: f64) -> bool {
    let scale = a.norm().max(b.norm()).max(f64::MIN_POSITIVE);
    (a - b).norm() <= tol * scale
}

/// Coefficient-wise relative comparison, scaled by the largest coefficient of either side.
pub fn poly_close(p: &ComplexPolynomial, q: &ComplexPolynomial, tol: f64) -> bool {
    let scale = p.max_abs_coeff().max(q.max_abs_coeff());
    if scale == 0.0 {
        return true;
    }
    let n = p.coeffs.len().max(q.coeffs.len());
    (0..n).all(|k| (p.coeff(k) - q.coeff(k)).norm() <= tol * scale)
}
