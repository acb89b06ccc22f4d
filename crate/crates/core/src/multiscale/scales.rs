use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{AbstractParams, SpaceParams};

const DEGENERACY_TOL: f64 = 1e-14;

/// Break-even depths `m̂_t, m̄_t, m̃_t, m_t` (as functions of the ring `t`) and levels
/// `t̃(n), t(n), t̂(n)` for a rank budget `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalScales {
    pub params: AbstractParams,
    pub space: SpaceParams,
    pub n: f64,
    pub t_tilde: f64,
    pub t_flat: f64,
    /// Only for `q > 2`.
    pub t_hat: Option<f64>,
}

impl CriticalScales {
    fn kt(&self, t: f64) -> f64 {
        self.params.k_star as f64 * t
    }

    pub fn log2_n(&self) -> f64 {
        self.n.log2()
    }

    /// `2^{γkt}·2^{m̂_t} = n`.
    pub fn m_hat(&self, t: f64) -> f64 {
        self.log2_n() - self.params.gamma_star * self.kt(t)
    }

    /// `2^{γkt}·2^{m̄_t} = n^{q/2}`, defined for `q > 2`.
    pub fn m_bar(&self, t: f64) -> Option<f64> {
        (self.space.q > 2.0).then(|| 0.5 * self.space.q * self.log2_n() - self.params.gamma_star * self.kt(t))
    }

    /// Depth balancing the zero-order bound against the derivative bound without the
    /// `l_q` interpolation factor.
    pub fn m_tilde(&self, t: f64) -> f64 {
        let a = &self.params;
        let s = &self.space;
        (a.mu_star + a.alpha_star + a.gamma_star * (s.inv_p0() - s.inv_p1())) * self.kt(t) / a.s_star
    }

    /// Depth at which the two ball radii of the discretized body coincide.
    pub fn m_flat(&self, t: f64) -> f64 {
        let a = &self.params;
        (a.mu_star + a.alpha_star) * self.kt(t) / flat_coefficient(a, &self.space)
    }
}

fn flat_coefficient(a: &AbstractParams, s: &SpaceParams) -> f64 {
    a.s_star + s.inv_p0() - s.inv_p1()
}

/// `μ + α + γ(s + 1/p0 − 1/p1)`, the coefficient of `kt` shared by the level equations.
pub fn level_coefficient(a: &AbstractParams, s: &SpaceParams) -> f64 {
    a.mu_star + a.alpha_star + a.gamma_star * flat_coefficient(a, s)
}

pub fn critical_scales(a: &AbstractParams, s: &SpaceParams, n: f64) -> Result<CriticalScales> {
    a.validate()?;
    s.validate()?;
    if !(n >= 2.0 && n.is_finite()) {
        return Err(Error::Validation(format!("budget n = {n} must be at least 2")));
    }
    let lc = level_coefficient(a, s);
    let fc = flat_coefficient(a, s);
    let scale = 1.0 + a.mu_star.abs() + a.alpha_star.abs() + a.gamma_star * (a.s_star + 2.0);
    if lc.abs() <= DEGENERACY_TOL * scale {
        return Err(Error::DegenerateParameters(
            "mu_* + alpha_* + gamma_*(s_* + 1/p0 - 1/p1) vanishes".into(),
        ));
    }
    if fc.abs() <= DEGENERACY_TOL * (1.0 + a.s_star) {
        return Err(Error::DegenerateParameters("s_* + 1/p0 - 1/p1 vanishes".into()));
    }
    let k = a.k_star as f64;
    let log_n = n.log2();
    Ok(CriticalScales {
        params: *a,
        space: *s,
        n,
        t_tilde: a.s_star * log_n / (lc * k),
        t_flat: fc * log_n / (lc * k),
        t_hat: (s.q > 2.0).then(|| fc * 0.5 * s.q * log_n / (lc * k)),
    })
}
