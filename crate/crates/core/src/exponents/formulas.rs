use serde::{Deserialize, Serialize};

use super::params::{polynomial_space_dim, AbstractParams, SobolevProblem, SpaceParams, WeightFamily};
use crate::error::{Error, Result};

/// The two rate exponents `θ̃` (zero-order constraint dominates) and `θ̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub theta_tilde: f64,
    pub theta_hat: f64,
}

fn nonzero(denominator: f64, scale: f64, what: &str) -> Result<()> {
    if denominator == 0.0 || denominator.abs() <= 1e-14 * scale.max(1.0) {
        return Err(Error::DegenerateParameters(format!(
            "{what}: shared denominator vanishes ({denominator:e})"
        )));
    }
    Ok(())
}

/// `μ + α + γ(s + 1/p0 − 1/p1)`.
pub fn shared_denominator(a: &AbstractParams, s: &SpaceParams) -> f64 {
    a.mu_star + a.alpha_star + a.gamma_star * (a.s_star + s.inv_p0() - s.inv_p1())
}

pub fn abstract_exponents(a: &AbstractParams, s: &SpaceParams) -> Result<ExponentPair> {
    let (ip0, ip1, iq) = (s.inv_p0(), s.inv_p1(), s.inv_q());
    let (st, g, al, mu) = (a.s_star, a.gamma_star, a.alpha_star, a.mu_star);
    let den = shared_denominator(a, s);
    let scale = mu.abs() + al.abs() + g.abs() * (st.abs() + 2.0);
    nonzero(den, scale, "abstract exponents")?;
    let theta_tilde = st * (al + g * ip0 - g * iq) / den;
    let theta_hat = (al * (st + iq - ip1) + mu * (iq - ip0)) / den;
    Ok(ExponentPair {
        theta_tilde,
        theta_hat,
    })
}

/// Maps a concrete problem onto the abstract parameters (with `k_* = 1`, `c = 1`, `t0 = 0`).
pub fn problem_to_abstract(p: &SobolevProblem) -> Result<AbstractParams> {
    p.validate()?;
    let (r, d) = (p.r as f64, p.d as f64);
    let (ip0, ip1, iq) = (p.space.inv_p0(), p.space.inv_p1(), p.space.inv_q());
    let s_star = r / d;
    let (gamma_star, mu_star, alpha_star) = match p.weights {
        WeightFamily::PowerHset {
            theta,
            beta,
            sigma,
            lambda,
        } => (
            theta,
            beta + lambda - r - d * iq + d * ip1,
            sigma - lambda + d * iq - d * ip0,
        ),
        WeightFamily::LogHset {
            gamma, mu, alpha, nu, ..
        } => (gamma + 1.0, mu + nu, alpha - nu),
        WeightFamily::PowerRd { beta, sigma, lambda } => (
            0.0,
            beta + lambda + r + d * iq - d * ip1,
            sigma - lambda + d * ip0 - d * iq,
        ),
    };
    Ok(AbstractParams {
        s_star,
        gamma_star,
        alpha_star,
        mu_star,
        k_star: 1,
        c: 1.0,
        t0: 0,
        r0: polynomial_space_dim(p.r, p.d),
    })
}

/// The closed-form exponents of each concrete example, written in the problem's own
/// variables rather than through the abstract map.
pub fn concrete_exponents(p: &SobolevProblem) -> Result<ExponentPair> {
    let (r, d) = (p.r as f64, p.d as f64);
    let (ip0, ip1, iq) = (p.space.inv_p0(), p.space.inv_p1(), p.space.inv_q());
    let rd = r / d;
    match p.weights {
        WeightFamily::PowerHset {
            theta,
            beta,
            sigma,
            lambda,
        } => {
            let den = beta + sigma - (r + d * ip0 - d * ip1) * (1.0 - theta / d);
            nonzero(den, beta.abs() + sigma.abs() + r + 2.0 * d, "power_hset exponents")?;
            let tilde = rd * (sigma - lambda + (d - theta) * iq - (d - theta) * ip0) / den;
            let hat = (sigma * (rd + iq - ip1) + beta * (iq - ip0) - lambda * (rd + ip0 - ip1)) / den;
            Ok(ExponentPair {
                theta_tilde: tilde,
                theta_hat: hat,
            })
        }
        WeightFamily::LogHset {
            gamma, mu, alpha, nu, ..
        } => {
            let den = mu + alpha + (gamma + 1.0) * (rd + ip0 - ip1);
            nonzero(den, mu.abs() + alpha.abs() + (gamma + 1.0) * (rd + 2.0), "log_hset exponents")?;
            let tilde = rd * (alpha - nu + (gamma + 1.0) * (ip0 - iq)) / den;
            let hat = ((alpha - nu) * (rd + iq - ip1) + (mu + nu) * (iq - ip0)) / den;
            Ok(ExponentPair {
                theta_tilde: tilde,
                theta_hat: hat,
            })
        }
        WeightFamily::PowerRd { beta, sigma, lambda } => {
            let den = beta + sigma + r + d * ip0 - d * ip1;
            nonzero(den, beta.abs() + sigma.abs() + r + 2.0 * d, "power_rd exponents")?;
            let tilde = rd * (sigma - lambda + d * ip0 - d * iq) / den;
            let hat = ((sigma - lambda + d * ip0 - d * iq) * (rd + iq - ip1)
                + (beta + lambda + r + d * iq - d * ip1) * (iq - ip0))
                / den;
            Ok(ExponentPair {
                theta_tilde: tilde,
                theta_hat: hat,
            })
        }
    }
}
