use crate::logscalar::LogScalar;
use crate::poly::{ln_falling, ComplexPolynomial};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Two-sided estimate of `scale · p_j(p)`, kept in log form.
///
/// `log_sampled_sup` is a lower bound of the true sup (boundary sampling),
/// `log_coeff_bound` an upper bound (`p'_j`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub log_sampled_sup: f64,
    pub log_coeff_bound: f64,
    pub radius: f64,
    pub sample_count: usize,
}

impl NormEstimate {
    pub fn sampled_sup(&self) -> f64 {
        self.log_sampled_sup.exp()
    }

    pub fn coeff_bound(&self) -> f64 {
        self.log_coeff_bound.exp()
    }
}

/// Boundary sample count for a polynomial of the given degree.
pub fn sample_count(degree: usize) -> usize {
    256.max(8 * (degree + 1))
}

/// `scale · max |p|` over `n` equispaced points of the circle `|z - center| = r`,
/// returned as a natural log. Evaluates at shifted points, never shifts coefficients.
pub fn log_circle_max(p: &ComplexPolynomial, center: C64, r: f64, n: usize, scale: LogScalar) -> f64 {
    if p.is_zero() || scale.is_zero() {
        return f64::NEG_INFINITY;
    }
    let m = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            p.log_abs_eval(center + C64::from_polar(r, t))
        })
        .fold(f64::NEG_INFINITY, f64::max);
    m + scale.log_magnitude()
}

/// `p_j` estimate with `N = max(256, 8(deg+1))` samples on `|z| = j`.
pub fn sup_norm(p: &ComplexPolynomial, j: f64, scale: LogScalar) -> NormEstimate {
    assert!(j > 0.0, "radius must be positive");
    sup_norm_with(p, j, scale, sample_count(p.degree()))
}

pub fn sup_norm_with(p: &ComplexPolynomial, j: f64, scale: LogScalar, n: usize) -> NormEstimate {
    let mut terms = p.coeffs().iter().enumerate().filter(|(_, c)| c.norm() > 0.0);
    // A single term `c z^k` attains `|c| j^k` everywhere on the circle.
    let log_sampled_sup = match (terms.next(), terms.next()) {
        (Some((k, c)), None) => c.norm().ln() + k as f64 * j.ln() + scale.log_magnitude(),
        _ => log_circle_max(p, C64::new(0.0, 0.0), j, n, scale),
    };
    let log_coeff_bound = log_coeff_norm(p, j) + scale.log_magnitude();
    NormEstimate {
        log_sampled_sup,
        log_coeff_bound: if p.is_zero() || scale.is_zero() {
            f64::NEG_INFINITY
        } else {
            log_coeff_bound
        },
        radius: j,
        sample_count: n,
    }
}

/// `ln p'_j(p) = ln Σ |c_k| j^k` via log-sum-exp.
pub fn log_coeff_norm(p: &ComplexPolynomial, j: f64) -> f64 {
    let lj = j.ln();
    let terms: Vec<f64> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, c)| c.norm().ln() + k as f64 * lj)
        .collect();
    log_sum_exp(&terms)
}

/// `p'_j(p)`; infinite if it exceeds the `f64` range.
pub fn coeff_norm(p: &ComplexPolynomial, j: f64) -> f64 {
    log_coeff_norm(p, j).exp()
}

pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// `ln [ p'_l((μD)^m z^n) / p'_{2l}(z^n) ] = ln(|μ|^m n!/(n-m)! l^{n-m} / (2l)^n)`.
pub fn log_monomial_ratio(n: u64, m: u64, mu: C64, l: f64) -> f64 {
    if m > n {
        return f64::NEG_INFINITY;
    }
    let lmu = if m == 0 { 0.0 } else { m as f64 * mu.norm().ln() };
    lmu + ln_falling(n, m) + (n - m) as f64 * l.ln() - n as f64 * (2.0 * l).ln()
}

pub fn monomial_ratio(n: u64, m: u64, mu: C64, l: f64) -> f64 {
    log_monomial_ratio(n, m, mu, l).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_sup_is_exact() {
        for n in [0usize, 1, 5, 17] {
            let p = ComplexPolynomial::monomial(n, C64::new(1.0, 0.0));
            for j in [1.0, 2.0, 4.0] {
                let e = sup_norm(&p, j, LogScalar::ONE);
                let want = (j as f64).powi(n as i32);
                assert!((e.sampled_sup() - want).abs() <= 1e-12 * want);
                assert!((e.coeff_bound() - want).abs() <= 1e-12 * want);
            }
        }
    }

    #[test]
    fn coeff_norm_examples() {
        let p = ComplexPolynomial::from_real(&[3.0, 0.0, 0.0, 1.0]);
        assert!((coeff_norm(&p, 2.0) - 11.0).abs() < 1e-12);
        assert_eq!(coeff_norm(&ComplexPolynomial::zero(), 3.0), 0.0);
    }

    #[test]
    fn ratio_examples() {
        let one = C64::new(1.0, 0.0);
        assert!((monomial_ratio(2, 1, one, 1.0) - 0.5).abs() < 1e-15);
        assert!((monomial_ratio(10, 2, C64::new(3.0, 0.0), 1.0) - 810.0 / 1024.0).abs() < 1e-13);
        assert!((monomial_ratio(7, 0, C64::new(5.0, 1.0), 3.0) - 2f64.powi(-7)).abs() < 1e-15);
        assert_eq!(monomial_ratio(2, 3, one, 1.0), 0.0);
    }

    #[test]
    fn scale_applies_in_log_space() {
        let p = ComplexPolynomial::constant(C64::new(2.0, 0.0));
        let e = sup_norm(&p, 1.0, LogScalar::exp_real(1000.0));
        assert!((e.log_sampled_sup - (1000.0 + 2f64.ln())).abs() < 1e-9);
        assert!(e.sampled_sup().is_infinite());
    }
}
