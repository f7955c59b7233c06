use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// `(n_k)`, exponents of the derivative.
    Derivative,
    /// `(m_k)`, exponents of `T_a` with `a` on the circle.
    RotationTranslation,
    /// `(t_k)`, exponents of `T_1`.
    RealTranslation,
}

/// Strictly increasing positive integers with a role tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub values: Vec<u64>,
    pub role: Role,
}

impl Schedule {
    pub fn new(values: Vec<u64>, role: Role) -> Result<Self> {
        if values.first() == Some(&0) {
            return Err(Error::InvalidInput("schedule values must be positive".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "schedule {values:?} is not strictly increasing"
            )));
        }
        Ok(Self { values, role })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based access matching the `n_k` notation.
    pub fn get(&self, k: usize) -> Option<u64> {
        k.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    /// `value_{k+1} > value_k + φ(value_k)` for every consecutive pair.
    pub fn is_phi_increasing(&self, phi: &WindowMap) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0] + phi.phi(w[0]))
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }
}

/// `φ(k) = max(k, ceil(growth · k))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowMap {
    pub growth: f64,
}

impl WindowMap {
    pub fn phi(&self, k: u64) -> u64 {
        k.max((self.growth * k as f64).ceil() as u64)
    }

    /// Inclusive window `[k, k + φ(k)]`.
    pub fn window(&self, k: u64) -> (u64, u64) {
        (k, k + self.phi(k))
    }

    /// `Σ_{m=k}^{k+φ(k)} 1/m`.
    pub fn harmonic(&self, k: u64) -> f64 {
        let (lo, hi) = self.window(k);
        (lo.max(1)..=hi).map(|m| 1.0 / m as f64).sum()
    }
}

pub fn phi_default(growth: f64) -> WindowMap {
    WindowMap {
        growth: if growth.is_finite() && growth > 0.0 { growth } else { 1.0 },
    }
}

/// Greedy φ-increasing sequence `v_{t+1} = v_t + φ(v_t) + 1`.
pub fn phi_schedule(phi: &WindowMap, start: u64, count: usize) -> Schedule {
    let mut values = Vec::with_capacity(count);
    let mut v = start.max(1);
    for _ in 0..count {
        values.push(v);
        v = v + phi.phi(v) + 1;
    }
    Schedule {
        values,
        role: Role::Derivative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_recurrence() {
        let phi = phi_default(1.0);
        let s = phi_schedule(&phi, 1, 4);
        assert_eq!(s.values, vec![1, 3, 7, 15]);
        assert!(s.is_phi_increasing(&phi));
        assert!(!Schedule::new(vec![1, 2, 3], Role::Derivative).unwrap().is_phi_increasing(&phi));
    }

    #[test]
    fn harmonic_window_lower_bound() {
        let phi = phi_default(1.0);
        for k in 1..=1000 {
            assert!(phi.harmonic(k) >= std::f64::consts::LN_2);
        }
    }

    #[test]
    fn rejects_non_increasing() {
        assert!(Schedule::new(vec![2, 2], Role::Derivative).is_err());
        assert!(Schedule::new(vec![0, 2], Role::Derivative).is_err());
    }
}
