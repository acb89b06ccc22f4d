use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An integrability exponent in `(1, ∞]` (or `[1, ∞]` for finite-dimensional balls).
///
/// Infinity is a first-class value: [`LpExponent::recip`] returns exactly `0.0`
/// for it, and it serializes as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LpExponent(f64);

impl LpExponent {
    pub const INFINITY: LpExponent = LpExponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("exponent {p} is not in [1, inf]")));
        }
        Ok(LpExponent(p))
    }

    pub fn finite(p: f64) -> Self {
        LpExponent(p)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn recip(self) -> f64 {
        if self.0.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }
}

impl From<f64> for LpExponent {
    fn from(p: f64) -> Self {
        LpExponent(p)
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl std::str::FromStr for LpExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "INF" | "∞" => Ok(LpExponent::INFINITY),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("cannot parse exponent '{other}'")))
                .and_then(LpExponent::new),
        }
    }
}

impl Serialize for LpExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for LpExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExponentVisitor;

        impl Visitor<'_> for ExponentVisitor {
            type Value = LpExponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<LpExponent, E> {
                Ok(LpExponent(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<LpExponent, E> {
                Ok(LpExponent(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<LpExponent, E> {
                Ok(LpExponent(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<LpExponent, E> {
                v.parse::<LpExponent>().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExponentVisitor)
    }
}

/// The triple `(p0, p1, q)`: zero-order constraint, derivative constraint, target norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub p0: LpExponent,
    pub p1: LpExponent,
    pub q: f64,
}

impl SpaceParams {
    pub fn new(p0: impl Into<LpExponent>, p1: impl Into<LpExponent>, q: f64) -> Result<Self> {
        let s = SpaceParams {
            p0: p0.into(),
            p1: p1.into(),
            q,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let open_above_one = |p: f64| p > 1.0 && !p.is_nan();
        if !open_above_one(self.p0.value()) {
            return Err(Error::Validation(format!("p0 = {} must lie in (1, inf]", self.p0)));
        }
        if !open_above_one(self.p1.value()) {
            return Err(Error::Validation(format!("p1 = {} must lie in (1, inf]", self.p1)));
        }
        if !(open_above_one(self.q) && self.q.is_finite()) {
            return Err(Error::Validation(format!("q = {} must lie in (1, inf)", self.q)));
        }
        Ok(())
    }

    pub fn inv_p0(&self) -> f64 {
        self.p0.recip()
    }

    pub fn inv_p1(&self) -> f64 {
        self.p1.recip()
    }

    pub fn inv_q(&self) -> f64 {
        1.0 / self.q
    }
}

/// Weight families of the three concrete examples.
///
/// `power_hset`: `g = dist^-β`, `w = dist^-σ`, `v = dist^-λ` to an h-set with `h(t) = t^θ`.
/// `log_hset`: `g = t^-β |log t|^μ`, `w = t^-σ |log t|^α`, `v = t^-λ |log t|^ν`, `h(t) = |log t|^-γ`.
/// `power_rd`: `g = (1+|x|)^β`, `w = (1+|x|)^σ`, `v = (1+|x|)^λ` on the whole space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFamily {
    PowerHset {
        theta: f64,
        beta: f64,
        sigma: f64,
        lambda: f64,
    },
    LogHset {
        gamma: f64,
        beta: f64,
        mu: f64,
        sigma: f64,
        alpha: f64,
        lambda: f64,
        nu: f64,
    },
    PowerRd {
        beta: f64,
        sigma: f64,
        lambda: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    PowerHset,
    LogHset,
    PowerRd,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::PowerHset => "power_hset",
            ProblemKind::LogHset => "log_hset",
            ProblemKind::PowerRd => "power_rd",
        })
    }
}

/// Absolute tolerance for the exact critical relations of the log family.
pub const CRITICAL_RELATION_TOL: f64 = 1e-12;

/// One concrete weighted Sobolev width problem: the class `M` (derivative order `r`,
/// dimension `d`, weights `g`, `w`) measured in `L_{q,v}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevProblem {
    pub r: u32,
    pub d: u32,
    #[serde(flatten)]
    pub space: SpaceParams,
    #[serde(flatten)]
    pub weights: WeightFamily,
}

impl SobolevProblem {
    pub fn power_hset(r: u32, d: u32, space: SpaceParams, theta: f64, beta: f64, sigma: f64, lambda: f64) -> Self {
        SobolevProblem {
            r,
            d,
            space,
            weights: WeightFamily::PowerHset {
                theta,
                beta,
                sigma,
                lambda,
            },
        }
    }

    pub fn power_rd(r: u32, d: u32, space: SpaceParams, beta: f64, sigma: f64, lambda: f64) -> Self {
        SobolevProblem {
            r,
            d,
            space,
            weights: WeightFamily::PowerRd { beta, sigma, lambda },
        }
    }

    /// Log-family problem with `β`, `σ` derived from `λ` through the critical relations
    /// `β + λ = r + d/q − d/p1` and `σ − λ = d/p0 − d/q`.
    #[allow(clippy::too_many_arguments)]
    pub fn log_hset(r: u32, d: u32, space: SpaceParams, gamma: f64, lambda: f64, mu: f64, alpha: f64, nu: f64) -> Self {
        let (rf, df) = (r as f64, d as f64);
        let beta = rf + df * space.inv_q() - df * space.inv_p1() - lambda;
        let sigma = lambda + df * space.inv_p0() - df * space.inv_q();
        SobolevProblem {
            r,
            d,
            space,
            weights: WeightFamily::LogHset {
                gamma,
                beta,
                mu,
                sigma,
                alpha,
                lambda,
                nu,
            },
        }
    }

    pub fn kind(&self) -> ProblemKind {
        match self.weights {
            WeightFamily::PowerHset { .. } => ProblemKind::PowerHset,
            WeightFamily::LogHset { .. } => ProblemKind::LogHset,
            WeightFamily::PowerRd { .. } => ProblemKind::PowerRd,
        }
    }

    /// `s_* = r/d`.
    pub fn smoothness(&self) -> f64 {
        self.r as f64 / self.d as f64
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: SobolevProblem = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    /// Residuals of the two log-family critical relations (zero for other kinds).
    pub fn critical_relation_residuals(&self) -> (f64, f64) {
        match self.weights {
            WeightFamily::LogHset {
                beta, sigma, lambda, ..
            } => {
                let (r, d) = (self.r as f64, self.d as f64);
                let s = &self.space;
                let first = beta + lambda - (r + d * s.inv_q() - d * s.inv_p1());
                let second = sigma - lambda - (d * s.inv_p0() - d * s.inv_q());
                (first, second)
            }
            _ => (0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::Validation("r must be a positive integer".into()));
        }
        if self.d == 0 {
            return Err(Error::Validation("d must be a positive integer".into()));
        }
        self.space.validate()?;
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Validation(format!("{name} = {v} is not finite")))
            }
        };
        match self.weights {
            WeightFamily::PowerHset {
                theta,
                beta,
                sigma,
                lambda,
            } => {
                for (n, v) in [("theta", theta), ("beta", beta), ("sigma", sigma), ("lambda", lambda)] {
                    finite(n, v)?;
                }
                if !(theta >= 0.0 && theta < self.d as f64) {
                    return Err(Error::Validation(format!(
                        "h-set exponent theta = {theta} must satisfy 0 <= theta < d = {}",
                        self.d
                    )));
                }
            }
            WeightFamily::LogHset {
                gamma,
                beta,
                mu,
                sigma,
                alpha,
                lambda,
                nu,
            } => {
                for (n, v) in [
                    ("gamma", gamma),
                    ("beta", beta),
                    ("mu", mu),
                    ("sigma", sigma),
                    ("alpha", alpha),
                    ("lambda", lambda),
                    ("nu", nu),
                ] {
                    finite(n, v)?;
                }
                if gamma < 0.0 {
                    return Err(Error::Validation(format!("gamma = {gamma} must be >= 0")));
                }
                let (a, b) = self.critical_relation_residuals();
                if a.abs() > CRITICAL_RELATION_TOL || b.abs() > CRITICAL_RELATION_TOL {
                    return Err(Error::Validation(format!(
                        "log family requires beta + lambda = r + d/q - d/p1 and sigma - lambda = d/p0 - d/q \
                         (residuals {a:e}, {b:e})"
                    )));
                }
            }
            WeightFamily::PowerRd { beta, sigma, lambda } => {
                for (n, v) in [("beta", beta), ("sigma", sigma), ("lambda", lambda)] {
                    finite(n, v)?;
                }
            }
        }
        Ok(())
    }
}

/// Parameters of the abstract two-constraint class: Assumptions B–E constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbstractParams {
    pub s_star: f64,
    pub gamma_star: f64,
    pub alpha_star: f64,
    pub mu_star: f64,
    pub k_star: u32,
    pub c: f64,
    pub t0: u32,
    pub r0: usize,
}

impl AbstractParams {
    pub fn new(s_star: f64, gamma_star: f64, alpha_star: f64, mu_star: f64) -> Self {
        AbstractParams {
            s_star,
            gamma_star,
            alpha_star,
            mu_star,
            k_star: 1,
            c: 1.0,
            t0: 0,
            r0: 1,
        }
    }

    pub fn with_k_star(mut self, k: u32) -> Self {
        self.k_star = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s_star > 0.0 && self.s_star.is_finite()) {
            return Err(Error::Validation(format!("s_* = {} must be positive", self.s_star)));
        }
        if !(self.gamma_star >= 0.0 && self.gamma_star.is_finite()) {
            return Err(Error::Validation(format!("gamma_* = {} must be >= 0", self.gamma_star)));
        }
        if !self.alpha_star.is_finite() || !self.mu_star.is_finite() {
            return Err(Error::Validation("alpha_*, mu_* must be finite".into()));
        }
        if self.k_star == 0 {
            return Err(Error::Validation("k_* must be a positive integer".into()));
        }
        if !(self.c >= 1.0) {
            return Err(Error::Validation(format!("c = {} must be >= 1", self.c)));
        }
        if self.r0 == 0 {
            return Err(Error::Validation("r0 must be positive".into()));
        }
        Ok(())
    }

    /// `s_* > (1/p1 − 1/q)_+`, the standing assumption pairing these parameters with `s`.
    pub fn compatible_with(&self, s: &SpaceParams) -> bool {
        self.s_star > (s.inv_p1() - s.inv_q()).max(0.0)
    }
}

/// Number of monomials of degree at most `r − 1` in `d` variables.
pub fn polynomial_space_dim(r: u32, d: u32) -> usize {
    // C(r - 1 + d, d)
    let (n, k) = ((r - 1 + d) as u128, d as u128);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_round_trips_as_string() {
        let s = SpaceParams::new(LpExponent::INFINITY, 2.0, 3.0).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"inf\""), "{text}");
        let back: SpaceParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.inv_p0(), 0.0);
    }

    #[test]
    fn problem_json_uses_flat_schema() {
        let text = r#"{"kind":"power_rd","r":1,"d":1,"p0":2,"p1":"inf","q":2,"beta":1,"sigma":1,"lambda":0}"#;
        let p = SobolevProblem::from_json(text).unwrap();
        assert_eq!(p.kind(), ProblemKind::PowerRd);
        assert!(p.space.p1.is_infinite());
        let again = SobolevProblem::from_json(&p.to_json()).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn rejects_out_of_range_exponents() {
        assert!(SpaceParams::new(1.0, 2.0, 2.0).is_err());
        assert!(SpaceParams::new(2.0, 2.0, f64::INFINITY).is_err());
        let p = SobolevProblem::power_hset(1, 1, SpaceParams::new(2.0, 2.0, 2.0).unwrap(), 1.0, 0.0, 0.0, 0.0);
        assert!(matches!(p.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn log_family_enforces_critical_relations() {
        let s = SpaceParams::new(3.0, 1.5, 2.5).unwrap();
        let good = SobolevProblem::log_hset(2, 1, s, 0.0, 0.3, 1.0, 2.0, 0.1);
        good.validate().unwrap();
        let mut bad = good;
        if let WeightFamily::LogHset { ref mut beta, .. } = bad.weights {
            *beta += 1e-6;
        }
        assert!(bad.validate().is_err());
    }

    #[test]
    fn polynomial_dimensions() {
        assert_eq!(polynomial_space_dim(1, 3), 1);
        assert_eq!(polynomial_space_dim(3, 1), 3);
        assert_eq!(polynomial_space_dim(3, 2), 6);
        assert_eq!(polynomial_space_dim(2, 3), 4);
    }
}
