use super::types::{BallSpec, EstimateKind, IntersectionSpec, WidthEstimate};
use crate::error::{Error, Result};
use crate::exponents::{AbstractParams, LpExponent, SpaceParams};

/// `d_n(B_p^N, l_q^N) = (N − n)^{1/q − 1/p}` for `1 ≤ q ≤ p ≤ ∞`.
pub fn exact_width(dim: usize, n: usize, p: LpExponent, q: LpExponent) -> Result<WidthEstimate> {
    if q.value() < 1.0 || p.value() < 1.0 {
        return Err(Error::Domain(format!("exponents p = {p}, q = {q} must be >= 1")));
    }
    if q.value() > p.value() {
        return Err(Error::Domain(format!("closed form needs q <= p, got p = {p}, q = {q}")));
    }
    if n > dim {
        return Err(Error::Domain(format!("n = {n} exceeds dimension {dim}")));
    }
    let value = if n == dim {
        0.0
    } else {
        ((dim - n) as f64).powf(q.recip() - p.recip())
    };
    Ok(WidthEstimate::new(value, EstimateKind::Exact, "exact", n, q))
}

/// Order of `d_n(B_p^N, l_q^N)` for `p ≤ q` (constant factors unknown).
pub fn gluskin_order(dim: usize, n: usize, p: LpExponent, q: LpExponent) -> Result<WidthEstimate> {
    let (pv, qv) = (p.value(), q.value());
    if n > dim {
        return Err(Error::Domain(format!("n = {n} exceeds dimension {dim}")));
    }
    let first = pv >= 1.0 && pv < qv && qv.is_finite() && qv > 2.0;
    let second = pv >= 1.0 && pv <= qv && qv <= 2.0;
    if !first && !second {
        return Err(Error::Domain(format!("no order estimate for p = {p}, q = {q}")));
    }
    if n >= dim {
        return Ok(WidthEstimate::new(0.0, EstimateKind::Order, "gluskin", n, q));
    }
    let value = if first {
        let lambda = ((p.recip() - q.recip()) / (0.5 - q.recip())).min(1.0);
        let base = if n == 0 {
            1.0
        } else {
            ((n as f64).powf(-0.5) * (dim as f64).powf(q.recip())).min(1.0)
        };
        base.powf(lambda)
    } else {
        1.0
    };
    Ok(WidthEstimate::new(value, EstimateKind::Order, "gluskin", n, q))
}

/// Ball `B_{q̃}` containing `k0·B_{p0} ∩ k1·B_{p1}`, with its interpolation parameter `λ`.
pub fn interpolation_ball(spec: &IntersectionSpec, q_tilde: LpExponent) -> Result<(BallSpec, f64)> {
    let (i0, i1) = (spec.ball0.p.recip(), spec.ball1.p.recip());
    if i0 == i1 {
        return Err(Error::Domain("interpolation needs p0 != p1".into()));
    }
    let lambda = (q_tilde.recip() - i1) / (i0 - i1);
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!(
            "q~ = {q_tilde} is not strictly between p0 = {} and p1 = {}",
            spec.ball0.p, spec.ball1.p
        )));
    }
    let radius = spec.ball0.radius.powf(lambda) * spec.ball1.radius.powf(1.0 - lambda);
    Ok((
        BallSpec {
            dim: spec.dim,
            p: q_tilde,
            radius,
        },
        lambda,
    ))
}

/// `(k1, k0)`: radii of the derivative-side (`p1`) and zero-order (`p0`) balls at real depth `m`.
pub fn wtm_radii(a: &AbstractParams, s: &SpaceParams, t: f64, m: f64) -> (f64, f64) {
    let kt = a.k_star as f64 * t;
    let k1 = (a.mu_star * kt - m * (a.s_star + s.inv_q() - s.inv_p1())).exp2();
    let k0 = (-a.alpha_star * kt + m * (s.inv_p0() - s.inv_q())).exp2();
    (k1, k0)
}

/// Real-valued dimension budget `c·2^{γkt}·2^m`.
pub fn wtm_dimension(a: &AbstractParams, t: u32, m: u32) -> f64 {
    a.c * (a.gamma_star * a.k_star as f64 * t as f64 + m as f64).exp2()
}

/// The discretized body on ring `t`, depth `m`.
pub fn wtm_body(a: &AbstractParams, s: &SpaceParams, t: u32, m: u32) -> Result<IntersectionSpec> {
    let budget = wtm_dimension(a, t, m);
    if !budget.is_finite() || budget > 1e15 {
        return Err(Error::Size(format!("dimension budget {budget:e} is too large")));
    }
    let dim = ((budget + 0.5).floor() as usize).max(1);
    let (k1, k0) = wtm_radii(a, s, t as f64, m as f64);
    IntersectionSpec::new(dim, s.p0, k0, s.p1, k1)
}

fn single_ball_route(ball: &BallSpec, n: usize, q: LpExponent) -> Option<WidthEstimate> {
    let base = if q.value() <= ball.p.value() {
        exact_width(ball.dim, n, ball.p, q).ok()
    } else {
        gluskin_order(ball.dim, n, ball.p, q).ok()
    }?;
    let mut out = base;
    out.value *= ball.radius;
    out.kind = if out.kind == EstimateKind::Exact {
        EstimateKind::Upper
    } else {
        out.kind
    };
    out.method = format!("single_ball_p{}:{}", ball.p, out.method);
    Some(out)
}

/// Upper (or order-level) estimate of `d_n(k0·B_{p0} ∩ k1·B_{p1}, l_q)`: the best of the
/// single-ball relaxations and the interpolation routes through `B_q` and `B_2`.
pub fn intersection_width_upper(spec: &IntersectionSpec, n: usize, q: LpExponent) -> Result<WidthEstimate> {
    spec.validate()?;
    if n >= spec.dim {
        return Ok(WidthEstimate::new(0.0, EstimateKind::Upper, "full_dimension", n, q));
    }
    let mut routes: Vec<WidthEstimate> = Vec::new();
    for ball in [&spec.ball0, &spec.ball1] {
        routes.extend(single_ball_route(ball, n, q));
        if ball.p.value() < q.value() {
            // the trivial bound ‖x‖_q ≤ ‖x‖_p
            routes.push(WidthEstimate::new(ball.radius, EstimateKind::Upper, "radius", n, q));
        }
    }
    if let Ok((ball, _)) = interpolation_ball(spec, q) {
        routes.push(WidthEstimate::new(ball.radius, EstimateKind::Upper, "interpolate_q", n, q));
    }
    if let Ok((ball, _)) = interpolation_ball(spec, LpExponent::finite(2.0)) {
        if let Some(mut e) = single_ball_route(&ball, n, q) {
            e.method = format!("interpolate_2:{}", e.method);
            routes.push(e);
        }
    }
    routes
        .into_iter()
        .filter(|e| e.value.is_finite())
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| Error::UnsupportedRegime(format!("no width route for q = {q} on {spec:?}")))
}
