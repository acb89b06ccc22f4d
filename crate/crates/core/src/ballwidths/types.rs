use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::LpExponent;

/// `radius · B_p^N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: LpExponent,
    pub radius: f64,
}

impl BallSpec {
    pub fn new(dim: usize, p: impl Into<LpExponent>, radius: f64) -> Result<Self> {
        let b = BallSpec {
            dim,
            p: p.into(),
            radius,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn unit(dim: usize, p: impl Into<LpExponent>) -> Result<Self> {
        Self::new(dim, p, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Validation("ball dimension must be positive".into()));
        }
        LpExponent::new(self.p.value())?;
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Validation(format!("radius {} must be positive", self.radius)));
        }
        Ok(())
    }
}

/// `k0·B_{p0}^N ∩ k1·B_{p1}^N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionSpec {
    #[serde(rename = "N")]
    pub dim: usize,
    pub ball0: BallSpec,
    pub ball1: BallSpec,
}

impl IntersectionSpec {
    pub fn new(dim: usize, p0: impl Into<LpExponent>, k0: f64, p1: impl Into<LpExponent>, k1: f64) -> Result<Self> {
        let s = IntersectionSpec {
            dim,
            ball0: BallSpec::new(dim, p0, k0)?,
            ball1: BallSpec::new(dim, p1, k1)?,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.ball0.validate()?;
        self.ball1.validate()?;
        if self.ball0.dim != self.dim || self.ball1.dim != self.dim {
            return Err(Error::Validation(format!(
                "balls of dimensions {} and {} in an intersection of dimension {}",
                self.ball0.dim, self.ball1.dim, self.dim
            )));
        }
        Ok(())
    }
}

/// Either kind of convex body handled by the numeric estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "body", rename_all = "snake_case")]
pub enum Body {
    Ball(BallSpec),
    Intersection(IntersectionSpec),
}

impl Body {
    pub fn dim(&self) -> usize {
        match self {
            Body::Ball(b) => b.dim,
            Body::Intersection(s) => s.dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Body::Ball(b) => b.validate(),
            Body::Intersection(s) => s.validate(),
        }
    }

    /// Splits the body into a positive scale and a normalized body (first radius 1).
    pub fn normalized(&self) -> (f64, Body) {
        match *self {
            Body::Ball(b) => (b.radius, Body::Ball(BallSpec { radius: 1.0, ..b })),
            Body::Intersection(s) => {
                let k = s.ball0.radius;
                let ball0 = BallSpec { radius: 1.0, ..s.ball0 };
                let ball1 = BallSpec {
                    radius: s.ball1.radius / k,
                    ..s.ball1
                };
                (k, Body::Intersection(IntersectionSpec { ball0, ball1, ..s }))
            }
        }
    }

    /// Returns `c · self`.
    pub fn scaled(&self, c: f64) -> Body {
        match *self {
            Body::Ball(b) => Body::Ball(BallSpec {
                radius: b.radius * c,
                ..b
            }),
            Body::Intersection(s) => Body::Intersection(IntersectionSpec {
                ball0: BallSpec {
                    radius: s.ball0.radius * c,
                    ..s.ball0
                },
                ball1: BallSpec {
                    radius: s.ball1.radius * c,
                    ..s.ball1
                },
                ..s
            }),
        }
    }

    /// Gauge of the body: smallest `τ ≥ 0` with `x ∈ τ·body`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        match self {
            Body::Ball(b) => lp_norm(x, b.p.value()) / b.radius,
            Body::Intersection(s) => {
                (lp_norm(x, s.ball0.p.value()) / s.ball0.radius).max(lp_norm(x, s.ball1.p.value()) / s.ball1.radius)
            }
        }
    }
}

impl From<BallSpec> for Body {
    fn from(b: BallSpec) -> Self {
        Body::Ball(b)
    }
}

impl From<IntersectionSpec> for Body {
    fn from(s: IntersectionSpec) -> Self {
        Body::Intersection(s)
    }
}

pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        scale * x.iter().map(|v| (v.abs() / scale).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Exact,
    Upper,
    Lower,
    /// Correct up to an unspecified constant factor.
    Order,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub method: String,
    pub n: usize,
    pub target_q: LpExponent,
    /// Estimated absolute uncertainty, for numeric methods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl WidthEstimate {
    pub fn new(value: f64, kind: EstimateKind, method: &str, n: usize, q: impl Into<LpExponent>) -> Self {
        WidthEstimate {
            value,
            kind,
            method: method.to_string(),
            n,
            target_q: q.into(),
            tolerance: None,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }
}

/// Knobs of the randomized subspace search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    /// Random starting frames.
    pub restarts: usize,
    /// Sampled boundary points when the extreme points cannot be enumerated.
    pub samples_per_eval: usize,
    pub refine_steps: usize,
    pub tolerance: f64,
    /// Largest admissible ambient dimension.
    pub dim_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 0x5eed,
            restarts: 24,
            samples_per_eval: 256,
            refine_steps: 60,
            tolerance: 1e-10,
            dim_cap: 64,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.samples_per_eval == 0 {
            return Err(Error::Validation("restarts and samples_per_eval must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Validation("search tolerance must be positive".into()));
        }
        Ok(())
    }
}
