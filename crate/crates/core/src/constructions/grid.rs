use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Finite set `S` in the band `nR + C ≤ |z| ≤ (n+1)R − C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridArtifact {
    pub r: f64,
    pub n: u64,
    pub delta: f64,
    pub c: f64,
    /// Integer circle radii, outermost first.
    pub radii: Vec<u64>,
    /// Combined angular mesh size; circle `t` holds angles `2π(qL + t)/M`.
    pub m: usize,
    pub points: Vec<C64>,
}

impl GridArtifact {
    pub fn band(&self) -> (f64, f64) {
        (self.n as f64 * self.r + self.c, (self.n + 1) as f64 * self.r - self.c)
    }
}

struct Layout {
    radii: Vec<u64>,
    m: usize,
}

/// Circles at the top of the band, `ceil(C)` apart, with the smallest admissible `M`.
fn layout(delta: f64, c: f64, n: u64, r: f64) -> Option<Layout> {
    let l = (c / (2.0 * delta)).ceil() as usize + 1;
    let step = c.ceil() as u64;
    let lo = n as f64 * r + c;
    let top = ((n + 1) as f64 * r - c).floor();
    if top < 0.0 {
        return None;
    }
    let top = top as u64;
    let span = step * (l as u64 - 1);
    if top < span {
        return None;
    }
    let radii: Vec<u64> = (0..l as u64).map(|t| top - t * step).collect();
    let rho_min = *radii.last().unwrap() as f64;
    let rho_max = top as f64;
    if rho_min < lo || rho_min <= 0.0 {
        return None;
    }
    // Coverage: the combined mesh has gap 2π/M, so every w is within chord 2 sin(π/2M).
    let need = (PI / (2.0 * (delta / (2.0 * rho_max)).min(1.0).asin())).floor() as usize + 1;
    let m = need.div_ceil(l).max(2) * l;
    if !(2.0 * (PI / (2.0 * m as f64)).sin() < delta / rho_max) {
        return None;
    }
    // Spacing on one circle: angular gap 2πL/M.
    if !(2.0 * rho_min * (PI * l as f64 / m as f64).sin() >= c) {
        return None;
    }
    Some(Layout { radii, m })
}

/// Smallest integer `R` for which band `0` and band `n` both admit the layout; the same `R`
/// then serves every band.
pub fn grid_radius(delta: f64, c: f64, n: u64) -> Result<f64> {
    if !(delta > 0.0) || !(c > 0.0) || !delta.is_finite() || !c.is_finite() {
        return Err(Error::InvalidInput("delta and C must be positive".into()));
    }
    let l = (c / (2.0 * delta)).ceil() + 1.0;
    let start = (2.0 * c + (l - 1.0) * c.ceil()).ceil().max(1.0);
    let mut r = start;
    while layout(delta, c, 0, r).is_none() || layout(delta, c, n, r).is_none() {
        r += 1.0;
        if r > start * 1e6 {
            return Err(Error::Construction(format!("no grid radius found for δ = {delta}, C = {c}")));
        }
    }
    Ok(r)
}

/// `S` for band `n` at a given `R`.
pub fn grid_band(delta: f64, c: f64, n: u64, r: f64) -> Result<GridArtifact> {
    let lay = layout(delta, c, n, r)
        .ok_or_else(|| Error::Construction(format!("R = {r} does not admit band {n}")))?;
    let l = lay.radii.len();
    let mut points = Vec::with_capacity(lay.m);
    for (t, rho) in lay.radii.iter().enumerate() {
        for q in 0..lay.m / l {
            let ang = 2.0 * PI * (q * l + t) as f64 / lay.m as f64;
            points.push(C64::from_polar(*rho as f64, ang));
        }
    }
    let g = GridArtifact {
        r,
        n,
        delta,
        c,
        radii: lay.radii,
        m: lay.m,
        points,
    };
    if let Some(msg) = structural_violation(&g) {
        return Err(Error::Construction(msg));
    }
    Ok(g)
}

pub fn shkarin_grid(delta: f64, c: f64, n: u64) -> Result<GridArtifact> {
    let r = grid_radius(delta, c, n)?;
    grid_band(delta, c, n, r)
}

/// Moduli and spacing clauses; coverage is sampled by the verifier.
fn structural_violation(g: &GridArtifact) -> Option<String> {
    let (lo, hi) = g.band();
    for z in &g.points {
        let m = z.norm();
        if (m - m.round()).abs() > 1e-9 * m.max(1.0) || m < lo - 1e-9 || m > hi + 1e-9 {
            return Some(format!("point {z} has modulus {m} outside [{lo}, {hi}] or non-integer"));
        }
    }
    closest_pair_below(&g.points, g.c).map(|(i, j)| format!("points {i} and {j} are closer than C = {}", g.c))
}

/// Some pair at distance `< c`, found by bucketing into cells of side `c`.
pub fn closest_pair_below(points: &[C64], c: f64) -> Option<(usize, usize)> {
    let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let key = |z: &C64| ((z.re / c).floor() as i64, (z.im / c).floor() as i64);
    for (i, z) in points.iter().enumerate() {
        cells.entry(key(z)).or_default().push(i);
    }
    for (i, z) in points.iter().enumerate() {
        let (kx, ky) = key(z);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = cells.get(&(kx + dx, ky + dy)) {
                    for &j in v {
                        if j > i && (points[j] - z).norm() < c * (1.0 - 1e-12) {
                            return Some((i, j));
                        }
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_is_valid() {
        let g = shkarin_grid(0.5, 4.0, 1).unwrap();
        assert!(g.points.len() >= 3);
        for k in 0..500 {
            let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / 500.0);
            assert!(g.points.iter().any(|z| (w - z / z.norm()).norm() < g.delta / z.norm()));
        }
    }

    #[test]
    fn radius_is_band_independent() {
        let r = grid_radius(0.5, 4.0, 3).unwrap();
        assert!(grid_band(0.5, 4.0, 7, r).is_ok());
    }
}
