//! Weights of the concrete problems and weighted `L_e` norms by ring-wise quadrature.

use serde::{Deserialize, Serialize};

use super::domain::{DomainSpec, Geometry};
use crate::error::{Error, Result};
use crate::exponents::{SobolevProblem, WeightFamily};
use crate::functions::TestFunction;
use crate::quadrature::{integrate_graded, split_points, GaussLegendre, QuadratureSpec};

/// Panels per sub-interval end in the graded rule used for norms.
const NORM_GRADING: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    /// `|x|^{-exponent}`.
    Power { exponent: f64 },
    /// `(1 + |x|)^{exponent}`.
    OnePlus { exponent: f64 },
}

impl Weight {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Weight::Power { exponent } => x.abs().powf(-exponent),
            Weight::OnePlus { exponent } => (1.0 + x.abs()).powf(exponent),
        }
    }

    pub fn recip(&self) -> Weight {
        match *self {
            Weight::Power { exponent } => Weight::Power { exponent: -exponent },
            Weight::OnePlus { exponent } => Weight::OnePlus { exponent: -exponent },
        }
    }
}

/// `g` (derivative constraint), `w` (zero-order constraint), `v` (target space).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSet {
    pub g: Weight,
    pub w: Weight,
    pub v: Weight,
}

/// Weights of a one-dimensional problem on its matching geometry.
pub fn problem_weights(p: &SobolevProblem, dom: &DomainSpec) -> Result<WeightSet> {
    if p.d != 1 {
        return Err(Error::UnsupportedRegime(format!("numerical experiments need d = 1, got d = {}", p.d)));
    }
    match (p.weights, dom.geometry) {
        (
            WeightFamily::PowerHset {
                theta,
                beta,
                sigma,
                lambda,
            },
            Geometry::IntervalSingularOrigin,
        ) => {
            if theta != 0.0 {
                return Err(Error::UnsupportedRegime(format!(
                    "the singular interval realizes theta = 0 only, got {theta}"
                )));
            }
            Ok(WeightSet {
                g: Weight::Power { exponent: beta },
                w: Weight::Power { exponent: sigma },
                v: Weight::Power { exponent: lambda },
            })
        }
        (WeightFamily::PowerRd { beta, sigma, lambda }, Geometry::RealLine) => Ok(WeightSet {
            g: Weight::OnePlus { exponent: beta },
            w: Weight::OnePlus { exponent: sigma },
            v: Weight::OnePlus { exponent: lambda },
        }),
        (WeightFamily::LogHset { .. }, _) => Err(Error::UnsupportedRegime(
            "log_hset problems have no one-dimensional ring geometry here".into(),
        )),
        (_, g) => Err(Error::UnsupportedRegime(format!("{} does not live on {g:?}", p.kind()))),
    }
}

/// The geometry matching a problem kind.
pub fn default_domain(p: &SobolevProblem, t_max: u32) -> Result<DomainSpec> {
    let geometry = match p.weights {
        WeightFamily::PowerHset { .. } => Geometry::IntervalSingularOrigin,
        WeightFamily::PowerRd { .. } => Geometry::RealLine,
        WeightFamily::LogHset { .. } => {
            return Err(Error::UnsupportedRegime(
                "log_hset problems have no one-dimensional ring geometry here".into(),
            ))
        }
    };
    DomainSpec::new(geometry, t_max)
}

/// Integral of `|h|^e` (or sup of `|h|` for `e = ∞`) over `(a, b)`, split at `breaks`.
pub(crate) fn piece_power(rule: &GaussLegendre, a: f64, b: f64, breaks: &[f64], e: f64, h: &dyn Fn(f64) -> f64) -> f64 {
    let mut knots = vec![a];
    knots.extend(split_points(a, b, breaks));
    knots.push(b);
    let mut acc = 0.0f64;
    for w in knots.windows(2) {
        if e.is_infinite() {
            for (x, _) in rule.mapped(w[0], w[1]) {
                acc = acc.max(h(x).abs());
            }
        } else {
            acc += integrate_graded(rule, w[0], w[1], NORM_GRADING, |x| h(x).abs().powf(e));
        }
    }
    acc
}

/// Per-ring `∫|h·wt|^e` (or sup) for rings `t_from..=t_last` restricted to `support`.
fn ring_contributions(
    dom: &DomainSpec,
    rule: &GaussLegendre,
    weight: Weight,
    e: f64,
    support: Option<(f64, f64)>,
    breaks: &[f64],
    rings: std::ops::RangeInclusive<u32>,
    h: &dyn Fn(f64) -> f64,
) -> Vec<f64> {
    let g = |x: f64| h(x) * weight.eval(x);
    rings
        .map(|t| {
            let mut acc = 0.0f64;
            for (a, b) in dom.ring_pieces(t) {
                let (lo, hi) = match support {
                    Some((sa, sb)) => (a.max(sa), b.min(sb)),
                    None => (a, b),
                };
                if lo >= hi {
                    continue;
                }
                let v = piece_power(rule, lo, hi, breaks, e, &g);
                acc = if e.is_infinite() { acc.max(v) } else { acc + v };
            }
            acc
        })
        .collect()
}

/// `‖h·weight‖_{L_e}` over the rings from `t_from` outward (toward the singular set on
/// the interval, toward infinity on the truncated line).
#[allow(clippy::too_many_arguments)]
pub(crate) fn norm_from_ring(
    dom: &DomainSpec,
    quad: &QuadratureSpec,
    weight: Weight,
    e: f64,
    support: Option<(f64, f64)>,
    breaks: &[f64],
    t_from: u32,
    h: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    if !(e >= 1.0) {
        return Err(Error::Domain(format!("norm exponent {e} must be >= 1")));
    }
    let rule = quad.rule();
    let unbounded = dom.has_unbounded_rings();
    let t_last = if unbounded {
        dom.t_max.max(quad.grading_depth).max(t_from + 2)
    } else {
        dom.t_max
    };
    if t_from > t_last {
        return Ok(0.0);
    }
    let parts = ring_contributions(dom, &rule, weight, e, support, breaks, t_from..=t_last, h);
    let mut total = if e.is_infinite() {
        parts.iter().copied().fold(0.0, f64::max)
    } else {
        parts.iter().sum::<f64>()
    };
    let support_reaches_end = support.is_none_or(|(a, _)| a <= 0.0);
    if unbounded && support_reaches_end && parts.len() >= 2 {
        let (prev, last) = (parts[parts.len() - 2], parts[parts.len() - 1]);
        if last > 0.0 {
            let ratio = last / prev;
            let limit = if e.is_infinite() { 1.0 + 1e-9 } else { 1.0 };
            if !(ratio < limit) {
                return Err(Error::Domain(format!(
                    "weighted L_{e} norm diverges at the singular point (ring ratio {ratio:.4})"
                )));
            }
            if !e.is_infinite() {
                total += last * ratio / (1.0 - ratio);
            }
        }
    }
    if !total.is_finite() {
        return Err(Error::Numeric(format!("weighted L_{e} norm is not finite")));
    }
    Ok(if e.is_infinite() { total } else { total.powf(1.0 / e) })
}

/// `‖f·weight‖_{L_e(Ω)}`.
pub fn weighted_norm(f: &dyn TestFunction, weight: Weight, e: f64, dom: &DomainSpec, quad: &QuadratureSpec) -> Result<f64> {
    norm_from_ring(dom, quad, weight, e, f.support(), &f.breakpoints(), 0, &|x| f.value(x))
}

/// `(‖f^{(r)}/g‖_{L_{p1}}, ‖w f‖_{L_{p0}})`; `f` lies in the class when both are at most 1.
pub fn check_membership(
    f: &dyn TestFunction,
    p: &SobolevProblem,
    dom: &DomainSpec,
    quad: &QuadratureSpec,
) -> Result<(f64, f64)> {
    quad.validate(p.r)?;
    let ws = problem_weights(p, dom)?;
    let probe = f.support().map_or(0.5, |(a, b)| 0.5 * (a + b));
    if f.derivative(p.r, probe).is_none() {
        return Err(Error::Input(format!("function has no derivative of order {}", p.r)));
    }
    let r = p.r;
    let deriv = |x: f64| f.derivative(r, x).unwrap_or(f64::NAN);
    let breaks = f.breakpoints();
    let sobolev = norm_from_ring(dom, quad, ws.g.recip(), p.space.p1.value(), f.support(), &breaks, 0, &deriv)?;
    let zero_order = weighted_norm(f, ws.w, p.space.p0.value(), dom, quad)?;
    Ok((sobolev, zero_order))
}
