use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Above this many matrix entries the least-squares solve is refused.
pub const MAX_ENTRIES: usize = 60_000_000;
/// Column-norm ratio of the triangular factor beyond which the system is called singular.
pub const COND_LIMIT: f64 = 1e15;

/// Solves `min ‖A y − b‖₂` by Householder QR. Rows are `(weight, point, rhs)`;
/// column `k` of `A` is `weight · (point / scale)^k` for `k ≤ degree`.
pub fn solve_scaled_monomial(
    rows: &[(f64, C64, C64)],
    degree: usize,
    scale: f64,
) -> Result<(Vec<C64>, f64)> {
    let cols = degree + 1;
    if rows.len() < cols {
        return Err(Error::InvalidInput(format!(
            "{} samples cannot determine {cols} coefficients",
            rows.len()
        )));
    }
    if rows.len().saturating_mul(cols) > MAX_ENTRIES {
        return Err(Error::ProblemTooLarge {
            rows: rows.len(),
            cols,
        });
    }
    let mut a = DMatrix::<C64>::zeros(rows.len(), cols);
    let mut b = DVector::<C64>::zeros(rows.len());
    for (i, (w, z, rhs)) in rows.iter().enumerate() {
        let u = z / scale;
        let mut pw = C64::new(*w, 0.0);
        for k in 0..cols {
            a[(i, k)] = pw;
            pw *= u;
        }
        b[i] = rhs * *w;
    }
    let qr = a.qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..cols).map(|k| r[(k, k)].norm()).collect();
    let dmax = diag.iter().copied().fold(0.0, f64::max);
    let dmin = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = if dmin > 0.0 { dmax / dmin } else { f64::INFINITY };
    if !(ratio < COND_LIMIT) {
        return Err(Error::Conditioning { degree, ratio });
    }
    let q = qr.q();
    let rhs = q.adjoint() * b;
    let y = r
        .solve_upper_triangular(&rhs)
        .ok_or(Error::Conditioning { degree, ratio })?;
    Ok((y.iter().copied().collect(), ratio))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_polynomial() {
        // 2 - i z + 0.5 z^3 sampled on a circle.
        let truth = [C64::new(2.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)];
        let rows: Vec<_> = (0..40)
            .map(|k| {
                let z = C64::from_polar(3.0, k as f64 * 0.157);
                let v = truth.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c);
                (1.0, z, v)
            })
            .collect();
        let (y, _) = solve_scaled_monomial(&rows, 3, 3.0).unwrap();
        for k in 0..4 {
            let c = y[k] / 3f64.powi(k as i32);
            assert!((c - truth[k]).norm() < 1e-12, "{k}: {c}");
        }
    }

    #[test]
    fn underdetermined_is_rejected() {
        let rows = vec![(1.0, C64::new(1.0, 0.0), C64::new(1.0, 0.0)); 2];
        assert!(matches!(solve_scaled_monomial(&rows, 4, 1.0), Err(Error::InvalidInput(_))));
    }
}
