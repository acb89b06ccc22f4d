//! Order-level lower-bound curves `n ↦ n^{-θ}` from the five bump embeddings.

use serde::{Deserialize, Serialize};

use crate::ballwidths::{exact_width, gluskin_order};
use crate::error::{Error, Result};
use crate::exponents::{check_hypotheses, problem_to_abstract, AbstractParams, LpExponent, SobolevProblem, SpaceParams};
use crate::multiscale::level_coefficient;

const DEGENERACY_TOL: f64 = 1e-14;

/// `(m_t, m̃_t)`: the depths where the derivative and zero-order radii of the
/// discretized body balance, without and with the `l_∞ → l_q` factor.
pub fn matched_scales_lower(a: &AbstractParams, s: &SpaceParams, t: f64) -> Result<(f64, f64)> {
    let kt = a.k_star as f64 * t;
    let flat = a.s_star + s.inv_p0() - s.inv_p1();
    if flat.abs() <= DEGENERACY_TOL {
        return Err(Error::DegenerateParameters("s_* + 1/p0 - 1/p1 vanishes".into()));
    }
    if a.s_star.abs() <= DEGENERACY_TOL {
        return Err(Error::DegenerateParameters("s_* vanishes".into()));
    }
    let m = (a.mu_star + a.alpha_star) * kt / flat;
    let m_tilde = (a.mu_star + a.alpha_star + a.gamma_star * (s.inv_p0() - s.inv_p1())) * kt / a.s_star;
    Ok((m, m_tilde))
}

/// One budget's lower bounds; absent components do not apply in the regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub n: usize,
    pub b94: f64,
    pub b95: f64,
    pub b96: f64,
    pub b97: Option<f64>,
    pub b98: Option<f64>,
    pub max: f64,
}

impl LowerBoundRow {
    pub fn components(&self) -> impl Iterator<Item = f64> {
        [Some(self.b94), Some(self.b95), Some(self.b96), self.b97, self.b98]
            .into_iter()
            .flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCurve {
    /// Exponent `θ` of each component (`b_i ≍ n^{-θ_i}`), where it is a pure power.
    pub exponents: [Option<f64>; 5],
    /// Which term dominates for large `n`: 94..=98.
    pub dominant: u8,
    pub rows: Vec<LowerBoundRow>,
}

/// `d_n(B_{p1}^{2n}, l_q^{2n})` at order level.
fn ball_width_2n(n: usize, p1: LpExponent, q: f64) -> Result<f64> {
    let ql = LpExponent::finite(q);
    let est = if q <= p1.value() {
        exact_width(2 * n, n, p1, ql)?
    } else {
        gluskin_order(2 * n, n, p1, ql)?
    };
    Ok(est.value)
}

pub fn lower_bound_curve(p: &SobolevProblem, budgets: &[usize]) -> Result<LowerBoundCurve> {
    let report = check_hypotheses(p);
    if !report.overall {
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        return Err(Error::Validation(format!("hypotheses fail: {}", failed.join(", "))));
    }
    if budgets.iter().any(|&n| n < 1) {
        return Err(Error::Validation("budgets must be positive".into()));
    }
    let a = problem_to_abstract(p)?;
    let s = &p.space;
    if level_coefficient(&a, s).abs() <= DEGENERACY_TOL {
        return Err(Error::DegenerateParameters("exponent denominator vanishes".into()));
    }
    let pair = crate::exponents::abstract_exponents(&a, s)?;
    let q = s.q;
    let sobolev = a.s_star + s.inv_q() - s.inv_p1();
    let theta95 = pair.theta_tilde;
    let theta96 = pair.theta_hat + (0.5 - s.inv_q()).max(0.0);
    let theta97 = (q > 2.0 && s.p1.value() < q).then_some(q * sobolev / 2.0);
    let theta98 = (q > 2.0).then_some(q * pair.theta_hat / 2.0);
    let rows = budgets
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let b94 = nf.powf(-sobolev) * ball_width_2n(n, s.p1, q)?;
            let b95 = nf.powf(-theta95);
            let b96 = nf.powf(-theta96);
            let b97 = theta97.map(|th| nf.powf(-th));
            let b98 = theta98.map(|th| nf.powf(-th));
            let mut row = LowerBoundRow {
                n,
                b94,
                b95,
                b96,
                b97,
                b98,
                max: 0.0,
            };
            row.max = row.components().fold(0.0, f64::max);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    // the ball width factor is n^{1/q - 1/p1} for q <= p1; otherwise its order varies
    let theta94 = (q <= s.p1.value()).then_some(sobolev - (s.inv_q() - s.inv_p1()));
    let exponents = [theta94, Some(theta95), Some(theta96), theta97, theta98];
    let dominant = exponents
        .iter()
        .enumerate()
        .filter_map(|(i, th)| th.map(|t| (i, t)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map_or(95, |(i, _)| 94 + i as u8);
    Ok(LowerBoundCurve {
        exponents,
        dominant,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sq() -> SpaceParams {
        SpaceParams::new(2.0, 2.0, 2.0).unwrap()
    }

    #[test]
    fn matched_scale_reference() {
        let a = AbstractParams::new(1.0, 0.0, 1.0, 2.0);
        let (m, mt) = matched_scales_lower(&a, &sq(), 1.0).unwrap();
        assert_relative_eq!(m, 3.0, epsilon = 1e-15);
        assert_relative_eq!(mt, 3.0, epsilon = 1e-15);
        assert_eq!(matched_scales_lower(&a, &sq(), 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn line_example_has_slope_one_third() {
        let p = SobolevProblem::power_rd(1, 1, sq(), 1.0, 1.0, 0.0);
        let c = lower_bound_curve(&p, &[16, 32, 64]).unwrap();
        assert_relative_eq!(c.exponents[1].unwrap(), 1.0 / 3.0, epsilon = 1e-14);
        let r = &c.rows;
        assert_relative_eq!((r[2].max / r[1].max).log2(), -1.0 / 3.0, epsilon = 1e-12);
        assert!(r[0].b97.is_none() && r[0].b98.is_none());
        assert_relative_eq!(r[1].b95 / r[0].b95, 2f64.powf(-1.0 / 3.0), epsilon = 1e-14);
    }

    #[test]
    fn failing_hypotheses_rejected() {
        let p = SobolevProblem::power_hset(1, 1, sq(), 0.0, 0.5, 0.5, 0.0);
        assert!(matches!(lower_bound_curve(&p, &[4]), Err(Error::Validation(_))));
    }
}
