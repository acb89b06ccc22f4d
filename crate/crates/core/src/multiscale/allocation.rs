//! Per-ring depths and correction budgets for a rank budget `n`.

use serde::{Deserialize, Serialize};

use super::domain::DomainSpec;
use super::scales::CriticalScales;
use crate::ballwidths::{intersection_width_upper, wtm_body};
use crate::error::{Error, Result};
use crate::exponents::LpExponent;

/// Guard against `⌊m⌋` dropping a level because of rounding in `m`.
const FLOOR_GUARD: f64 = 1e-9;
/// Hard cap on any partition depth used by the approximant.
pub const MAX_DEPTH: u32 = 22;

/// Anchors of the depth profile. Unset anchors get the defaults chosen in
/// [`rank_allocation`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Anchors {
    /// `t_*(n)`, or `t_1(n)` when correction layers are used.
    pub t_star: Option<f64>,
    /// `t_**(n)`, for the two-stage profiles.
    pub t_star2: Option<f64>,
    /// `m_1(n)`, for the correction budgets.
    pub m_one: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocOptions {
    /// Decay rate away from the anchors; defaults from the exponent gap.
    pub eps: Option<f64>,
    pub anchors: Anchors,
    /// Correction levels allowed beyond a ring's main depth.
    pub max_extra_depth: u32,
}

impl Default for AllocOptions {
    fn default() -> Self {
        AllocOptions {
            eps: None,
            anchors: Anchors::default(),
            max_extra_depth: 10,
        }
    }
}

/// `0.8 ×` the gap between the smallest exponent and the next, clamped to `[0.01, 0.5]`;
/// `0.05` when there is no usable gap. [`rank_allocation`] lowers it further when the
/// main depths would otherwise turn negative.
pub fn default_eps(gap: f64) -> f64 {
    if gap.is_finite() && gap > 1e-12 {
        (0.8 * gap).clamp(0.01, 0.5)
    } else {
        0.05
    }
}

/// Which rings get approximated and how the depth profile is shaped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CasePlan {
    pub case_id: u8,
    /// Critical level; rings `0..=⌊end⌋` are approximated.
    pub end: f64,
    /// Level where a two-stage profile switches anchors.
    pub split: Option<f64>,
    /// Whether `P_{t,m+1} − P_{t,m}` layers are added (`q > 2` regimes).
    pub corrections: bool,
}

pub fn case_plan(case_id: u8, cs: &CriticalScales) -> Result<CasePlan> {
    let (tt, tf) = (cs.t_tilde, cs.t_flat);
    let th = cs.t_hat;
    let need_hat = || th.ok_or_else(|| Error::Validation(format!("case {case_id} needs q > 2")));
    let (end, split, corrections) = match case_id {
        1 => (tt, None, false),
        2 => (tt, Some(tf), false),
        3 | 4 => (tt, None, true),
        5 => (tf, None, false),
        6 => (tf, Some(tt), false),
        7..=9 => (need_hat()?, None, true),
        _ => return Err(Error::Validation(format!("unknown case {case_id}"))),
    };
    Ok(CasePlan {
        case_id,
        end,
        split,
        corrections,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionLevel {
    pub m: u32,
    /// `l(t, m)`.
    pub budget: usize,
    /// Coefficient blocks kept; each block has rank `r0`.
    pub blocks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingPlan {
    pub t: u32,
    pub m_star: f64,
    pub depth: u32,
    pub main_rank: usize,
    pub corrections: Vec<CorrectionLevel>,
}

impl RingPlan {
    pub fn rank(&self, r0: usize) -> usize {
        self.main_rank + r0 * self.corrections.iter().map(|c| c.blocks).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankAllocation {
    pub plan: CasePlan,
    pub n: usize,
    pub eps: f64,
    /// Anchors actually used.
    pub anchors: Anchors,
    pub rings: Vec<RingPlan>,
    /// First ring on which the approximant vanishes.
    pub t_cut: u32,
    pub r0: usize,
    pub total_rank: usize,
    /// `total_rank / n`.
    pub rank_constant: f64,
}

/// `l(t, m) = ⌈n·2^{−ε(|t−t_1|+|m−m_1|)}⌉` for `m ≤ m̄_t`, else 0.
pub fn correction_budget(cs: &CriticalScales, eps: f64, t: u32, m: u32, t_one: f64, m_one: f64) -> usize {
    let tf = t as f64;
    match cs.m_bar(tf) {
        Some(bar) if (m as f64) <= bar => {
            let decay = eps * ((tf - t_one).abs() + (m as f64 - m_one).abs());
            (cs.n * (-decay).exp2()).ceil() as usize
        }
        _ => 0,
    }
}

/// `λ` with `1/q = (1−λ)/p1 + λ/p0`.
fn interpolation_lambda(cs: &CriticalScales) -> Option<f64> {
    let s = &cs.space;
    let den = s.inv_p0() - s.inv_p1();
    (den != 0.0).then(|| (s.inv_q() - s.inv_p1()) / den)
}

fn default_t_star(cs: &CriticalScales, stage_end: f64) -> f64 {
    let a = &cs.params;
    let s = &cs.space;
    // sign of the growth rate in t of the error terms on the first stage
    if a.mu_star + a.gamma_star * (a.s_star + s.inv_q() - s.inv_p1()) < 0.0 {
        0.0
    } else {
        stage_end
    }
}

fn default_t_star2(cs: &CriticalScales, split: f64, end: f64) -> f64 {
    let a = &cs.params;
    let Some(lambda) = interpolation_lambda(cs) else {
        return end;
    };
    let rate = (1.0 - lambda) * a.mu_star - lambda * a.alpha_star + a.gamma_star * a.s_star * (1.0 - lambda);
    if rate < 0.0 {
        split
    } else {
        end
    }
}

fn main_depth(plan: &CasePlan, cs: &CriticalScales, eps: f64, anchors: &Anchors, t: f64) -> f64 {
    let anchor = match plan.split {
        Some(split) if t > split => anchors.t_star2.unwrap_or(split),
        _ => anchors.t_star.unwrap_or(0.0),
    };
    let m = cs.m_hat(t) - eps * (t - anchor).abs();
    if plan.corrections {
        m.max(0.0)
    } else {
        m
    }
}

/// Half the largest `ε` keeping every main depth nonnegative; main depths are linear in
/// `t` on each stage, so the stage endpoints decide.
fn feasible_eps(plan: &CasePlan, cs: &CriticalScales, anchors: &Anchors) -> f64 {
    if plan.corrections || plan.end < 0.0 {
        return f64::INFINITY;
    }
    let mut stages = vec![(0.0, plan.split.unwrap_or(plan.end), anchors.t_star.unwrap_or(0.0))];
    if let Some(split) = plan.split {
        stages.push((split, plan.end, anchors.t_star2.unwrap_or(split)));
    }
    let mut cap = f64::INFINITY;
    for (lo, hi, anchor) in stages {
        for t in [lo, hi] {
            let dist = (t - anchor).abs();
            if dist > FLOOR_GUARD {
                cap = cap.min(cs.m_hat(t).max(0.0) / dist);
            }
        }
    }
    0.5 * cap
}

fn floor_depth(m: f64) -> u32 {
    (m + FLOOR_GUARD).floor().max(0.0) as u32
}

fn build(
    plan: CasePlan,
    cs: &CriticalScales,
    eps: f64,
    anchors: Anchors,
    dom: &DomainSpec,
    r0: usize,
    max_extra: u32,
) -> Result<RankAllocation> {
    let n = cs.n.round() as usize;
    let mut rings = Vec::new();
    if plan.end >= 0.0 {
        let last = (plan.end + FLOOR_GUARD).floor() as u32;
        for t in 0..=last {
            let m_star = main_depth(&plan, cs, eps, &anchors, t as f64);
            if m_star < -FLOOR_GUARD {
                return Err(Error::Allocation(format!(
                    "main depth {m_star:.4} on ring {t} is negative; decrease eps = {eps}"
                )));
            }
            let depth = floor_depth(m_star);
            if depth > MAX_DEPTH {
                return Err(Error::Size(format!("depth {depth} on ring {t} exceeds the cap {MAX_DEPTH}")));
            }
            let cells = dom.pieces_in_ring(t) << depth;
            let mut corrections = Vec::new();
            if plan.corrections {
                let (t_one, m_one) = (anchors.t_star.unwrap_or(0.0), anchors.m_one.unwrap_or(0.0));
                let top = depth.saturating_add(max_extra).min(MAX_DEPTH - 1);
                for m in depth..=top {
                    let budget = correction_budget(cs, eps, t, m, t_one, m_one);
                    if budget == 0 {
                        break;
                    }
                    let available = dom.pieces_in_ring(t) << m;
                    corrections.push(CorrectionLevel {
                        m,
                        budget,
                        blocks: budget.div_ceil(r0).min(available),
                    });
                }
            }
            rings.push(RingPlan {
                t,
                m_star,
                depth,
                main_rank: r0 * cells,
                corrections,
            });
        }
    }
    let t_cut = rings.len() as u32;
    let total_rank: usize = rings.iter().map(|r| r.rank(r0)).sum();
    Ok(RankAllocation {
        plan,
        n,
        eps,
        anchors,
        rings,
        t_cut,
        r0,
        total_rank,
        rank_constant: total_rank as f64 / n as f64,
    })
}

/// Predicted correction error `Σ d_{l(t,m)}(W_{t,m}, l_q)` for an allocation.
fn predicted_correction_error(cs: &CriticalScales, alloc: &RankAllocation) -> f64 {
    let q = LpExponent::finite(cs.space.q);
    let mut total = 0.0;
    for ring in &alloc.rings {
        for level in &ring.corrections {
            let est = wtm_body(&cs.params, &cs.space, ring.t, level.m)
                .and_then(|body| intersection_width_upper(&body, level.budget, q));
            match est {
                Ok(e) => total += e.value,
                Err(_) => return f64::INFINITY,
            }
        }
    }
    total
}

/// Main depths and correction budgets for the regime `case_id` at budget `cs.n`.
pub fn rank_allocation(
    cs: &CriticalScales,
    case_id: u8,
    gap: f64,
    dom: &DomainSpec,
    r0: usize,
    opts: &AllocOptions,
) -> Result<RankAllocation> {
    if let Some(eps) = opts.eps {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Validation(format!("eps = {eps} must be positive")));
        }
    }
    let plan = case_plan(case_id, cs)?;
    let first_end = plan.split.unwrap_or(plan.end);
    for (name, v) in [("t_star", opts.anchors.t_star), ("t_star2", opts.anchors.t_star2)] {
        if let Some(v) = v {
            if !(v >= 0.0 && v <= plan.end.max(0.0) + FLOOR_GUARD) {
                return Err(Error::Validation(format!(
                    "anchor {name} = {v} outside [0, {:.6}]",
                    plan.end.max(0.0)
                )));
            }
        }
    }
    let mut anchors = opts.anchors;
    anchors.t_star.get_or_insert_with(|| default_t_star(cs, first_end.max(0.0)));
    if let Some(split) = plan.split {
        anchors.t_star2.get_or_insert_with(|| default_t_star2(cs, split, plan.end));
    }
    let eps = match opts.eps {
        Some(e) => e,
        None => {
            let cap = feasible_eps(&plan, cs, &anchors);
            let e = default_eps(gap).min(cap);
            if !(e > 0.0) {
                return Err(Error::Allocation(format!("no positive eps keeps the main depths nonnegative (cap {cap})")));
            }
            e
        }
    };
    if !plan.corrections {
        anchors.m_one = None;
        return build(plan, cs, eps, anchors, dom, r0, opts.max_extra_depth);
    }
    if anchors.m_one.is_some() {
        return build(plan, cs, eps, anchors, dom, r0, opts.max_extra_depth);
    }
    // choose m_1 among the two natural depths at t_1 by the predicted error
    let t_one = anchors.t_star.unwrap_or(0.0);
    let mut candidates = vec![main_depth(&plan, cs, eps, &anchors, t_one).ceil()];
    if let Some(bar) = cs.m_bar(t_one) {
        candidates.push(bar.floor().max(0.0));
    }
    let mut best: Option<(f64, RankAllocation)> = None;
    for m_one in candidates {
        let mut a = anchors;
        a.m_one = Some(m_one);
        let alloc = build(plan, cs, eps, a, dom, r0, opts.max_extra_depth)?;
        let score = predicted_correction_error(cs, &alloc);
        if best.as_ref().is_none_or(|(s, _)| score < *s) {
            best = Some((score, alloc));
        }
    }
    Ok(best.expect("at least one candidate").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{AbstractParams, SpaceParams};
    use crate::multiscale::domain::Geometry;
    use crate::multiscale::scales::critical_scales;

    fn interval() -> DomainSpec {
        DomainSpec::new(Geometry::IntervalSingularOrigin, 30).unwrap()
    }

    #[test]
    fn case_one_rank_is_linear_in_n() {
        let a = AbstractParams::new(1.0, 0.0, 1.0, 2.0);
        let s = SpaceParams::new(2.0, 2.0, 2.0).unwrap();
        let cs = critical_scales(&a, &s, 8.0).unwrap();
        let alloc = rank_allocation(&cs, 1, 0.2, &interval(), 1, &AllocOptions::default()).unwrap();
        assert_eq!(alloc.t_cut, 2);
        let direct: f64 = alloc.rings.iter().map(|r| r.m_star.exp2()).sum();
        assert!(direct <= 4.0 * 8.0, "{direct}");
        assert!(alloc.total_rank as f64 <= direct);
    }

    #[test]
    fn empty_ring_range() {
        // negative level coefficient puts t~(n) below zero
        let a = AbstractParams::new(1.0, 0.0, -3.0, 1.0);
        let s = SpaceParams::new(2.0, 2.0, 2.0).unwrap();
        let cs = critical_scales(&a, &s, 64.0).unwrap();
        let alloc = rank_allocation(&cs, 1, 0.2, &interval(), 1, &AllocOptions::default()).unwrap();
        assert!(alloc.rings.is_empty());
        assert_eq!((alloc.t_cut, alloc.total_rank), (0, 0));
    }

    #[test]
    fn budgets_vanish_above_m_bar() {
        let a = AbstractParams::new(1.0, 0.0, 0.5, 0.5);
        let s = SpaceParams::new(4.0, 1.5, 3.0).unwrap();
        let cs = critical_scales(&a, &s, 64.0).unwrap();
        for t in 0..4 {
            let bar = cs.m_bar(t as f64).unwrap();
            for m in 0..20 {
                let l = correction_budget(&cs, 0.1, t, m, 0.0, 0.0);
                if m as f64 > bar {
                    assert_eq!(l, 0);
                } else {
                    assert!(l >= 1);
                }
            }
        }
        let alloc = rank_allocation(&cs, 4, 0.2, &interval(), 1, &AllocOptions::default()).unwrap();
        assert!(alloc.anchors.m_one.is_some());
        for ring in &alloc.rings {
            for c in &ring.corrections {
                assert!(c.m as f64 <= cs.m_bar(ring.t as f64).unwrap());
            }
        }
    }

    #[test]
    fn oversized_eps_is_an_allocation_error() {
        let a = AbstractParams::new(1.0, 0.0, 1.0, -0.5);
        let s = SpaceParams::new(2.0, 2.0, 2.0).unwrap();
        let cs = critical_scales(&a, &s, 16.0).unwrap();
        let opts = AllocOptions {
            eps: Some(3.0),
            anchors: Anchors {
                t_star: Some(cs.t_tilde),
                ..Anchors::default()
            },
            ..AllocOptions::default()
        };
        assert!(matches!(rank_allocation(&cs, 1, 0.2, &interval(), 1, &opts), Err(Error::Allocation(_))));
    }

    #[test]
    fn default_eps_policy() {
        assert_eq!(default_eps(0.25), 0.2);
        assert_eq!(default_eps(0.0), 0.05);
        assert_eq!(default_eps(10.0), 0.5);
        assert_eq!(default_eps(0.001), 0.01);
    }
}
