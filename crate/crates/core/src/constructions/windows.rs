use super::schedule::{phi_schedule, Role, Schedule, WindowMap};
use crate::approx::Disk;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Schedule length generated for family constructions.
pub const FAMILY_SCHEDULE_LEN: usize = 40;

/// Disks covering `⋃ D(a·k, r)` over integers `k ∈ [lo, hi]` and `a = e^{iα}` with `θ ≤ α ≤ 2π − θ`.
///
/// Centers sit on each circle `|z| = k` with arc spacing at most `r`; each disk has
/// radius `1.5 r`, enough to contain every `D(a·k, r)` between two mesh angles.
pub fn sector_cover(lo: u64, hi: u64, r: f64, theta: f64) -> Vec<Disk> {
    let span = 2.0 * PI - 2.0 * theta;
    let mut out = Vec::new();
    for k in lo..=hi {
        let kf = k as f64;
        let count = ((span * kf / r).ceil() as usize).max(1) + 1;
        for i in 0..count {
            let alpha = theta + span * i as f64 / (count - 1) as f64;
            out.push(Disk {
                center: C64::from_polar(kf, alpha),
                radius: 1.5 * r,
            });
        }
    }
    out
}

/// The disks `D(k, r)` for integers `k ∈ [lo, hi]` (windows of `T_1`).
pub fn strip_cover(lo: u64, hi: u64, r: f64) -> Vec<Disk> {
    (lo..=hi)
        .map(|k| Disk {
            center: C64::new(k as f64, 0.0),
            radius: r,
        })
        .collect()
}

/// Angles `θ ≤ α ≤ 2π − θ` on an even mesh of `count` points.
pub fn sector_angles(theta: f64, count: usize) -> Vec<f64> {
    let span = 2.0 * PI - 2.0 * theta;
    if count <= 1 {
        return vec![PI];
    }
    (0..count)
        .map(|i| theta + span * i as f64 / (count - 1) as f64)
        .collect()
}

/// Whether the end disks of a sector cover leave the excluded arc open.
pub fn sector_gap_open(lo: u64, r: f64, theta: f64) -> bool {
    2.0 * lo as f64 * theta.min(PI / 2.0).sin() > 3.0 * r + 1e-9
}

fn first_index(s: &Schedule, after: usize, ok: impl Fn(u64) -> bool) -> Option<usize> {
    (after + 1..=s.len()).find(|&i| ok(s.get(i).unwrap()))
}

fn m_fits(v: u64, s: usize, reach: f64, outer: f64) -> bool {
    let sf = s as f64;
    v as f64 - 1.5 * reach > outer + 1.0 && sector_gap_open(v, sf, 1.0 / sf)
}

fn t_fits(v: u64, reach: f64, m_hi: u64) -> bool {
    v as f64 - reach > m_hi as f64 + 1.5 * reach + 1.0
}

/// Default `(m_k)`, `(t_k)`: greedy φ-schedules started at the smallest values
/// admitting stage 1 outside `D(0, inner)` with window reach `reach(1)`.
pub fn default_mt_schedules(phi: &WindowMap, inner: f64, reach: f64) -> (Schedule, Schedule) {
    let m_start = (1u64..).find(|&v| m_fits(v, 1, reach, inner)).unwrap();
    let m_hi = phi.window(m_start).1;
    let t_start = (1u64..).find(|&v| t_fits(v, reach, m_hi)).unwrap();
    (
        phi_schedule(phi, m_start, FAMILY_SCHEDULE_LEN).with_role(Role::RotationTranslation),
        phi_schedule(phi, t_start, FAMILY_SCHEDULE_LEN).with_role(Role::RealTranslation),
    )
}

/// Chooses increasing indices `k_{1,s}`, `k_{2,s}` so that, outward from `D(0, inner)`,
/// the sector windows of `(m_k)` and strip windows of `(t_k)` alternate with gaps.
///
/// `reach(s)` is the disk radius used to separate stage `s` windows; the sector of stage
/// `s` excludes the arc of half-width `1/s` and is covered with radius `s`.
pub fn plan_mt(
    m: &Schedule,
    t: &Schedule,
    phi: &WindowMap,
    stages: usize,
    inner: f64,
    reach: &dyn Fn(usize) -> f64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let (mut k1, mut k2): (Vec<usize>, Vec<usize>) = (Vec::new(), Vec::new());
    let mut outer = inner;
    for s in 1..=stages {
        let r = reach(s);
        let i1 = first_index(m, k1.last().copied().unwrap_or(0), |v| m_fits(v, s, r, outer))
            .ok_or_else(|| Error::WindowSelection(format!("m-schedule too short for stage {s}")))?;
        let m_hi = phi.window(m.get(i1).unwrap()).1;
        let i2 = first_index(t, k2.last().copied().unwrap_or(0), |v| t_fits(v, r, m_hi))
            .ok_or_else(|| Error::WindowSelection(format!("t-schedule too short for stage {s}")))?;
        outer = phi.window(t.get(i2).unwrap()).1 as f64 + r;
        k1.push(i1);
        k2.push(i2);
    }
    Ok((k1, k2))
}

/// First index after `after` whose value exceeds `floor`.
pub fn first_above(s: &Schedule, after: usize, floor: u64) -> Option<usize> {
    first_index(s, after, |v| v > floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_cover_contains_window_disks() {
        let disks = sector_cover(4, 6, 1.0, 1.0);
        for k in 4..=6 {
            for t in 0..200 {
                let alpha = 1.0 + (2.0 * PI - 2.0) * t as f64 / 199.0;
                let c = C64::from_polar(k as f64, alpha);
                for q in 0..16 {
                    let z = c + C64::from_polar(1.0, 2.0 * PI * q as f64 / 16.0);
                    assert!(disks.iter().any(|d| (z - d.center).norm() <= d.radius + 1e-12));
                }
            }
        }
    }
}
