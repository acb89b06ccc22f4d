//! Assembly of the rank-`n` piecewise-polynomial approximant and its weighted error.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::allocation::{case_plan, rank_allocation, AllocOptions, RankAllocation};
use super::domain::{Cell, DomainSpec, Geometry};
use super::projection::{l2_project, LocalPoly};
use super::scales::{critical_scales, CriticalScales};
use super::weights::{norm_from_ring, problem_weights, Weight};
use crate::error::{Error, Result};
use crate::exponents::{abstract_exponents, definition3_profile, problem_to_abstract, AbstractParams, SobolevProblem};
use crate::functions::TestFunction;
use crate::quadrature::{split_points, GaussLegendre, QuadratureSpec};

/// `P_{t,m+1} f − P_{t,m} f` on one parent cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionBlock {
    pub parent: Cell,
    pub coarse: LocalPoly,
    pub fine: [LocalPoly; 2],
    /// `L_{q,v}` norm of the block, used to rank blocks.
    pub norm: f64,
}

impl CorrectionBlock {
    pub fn eval(&self, x: f64) -> f64 {
        let mid = 0.5 * (self.parent.a + self.parent.b);
        let fine = if x < mid { &self.fine[0] } else { &self.fine[1] };
        fine.eval(x) - self.coarse.eval(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingApprox {
    pub t: u32,
    pub depth: u32,
    /// Projections on the depth-`depth` cells meeting the function's support; all other
    /// cells carry the zero polynomial.
    pub main: Vec<(Cell, LocalPoly)>,
    pub corrections: Vec<CorrectionBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approximant {
    pub allocation: RankAllocation,
    pub rings: Vec<RingApprox>,
    pub degree: usize,
}

impl Approximant {
    pub fn t_cut(&self) -> u32 {
        self.allocation.t_cut
    }

    pub fn rank(&self) -> usize {
        self.allocation.total_rank
    }
}

/// Everything fixed by the problem and the budget, independent of the function.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub problem: SobolevProblem,
    pub domain: DomainSpec,
    pub quad: QuadratureSpec,
    pub v: Weight,
    pub allocation: RankAllocation,
}

impl Scheme {
    pub fn new(p: &SobolevProblem, dom: &DomainSpec, n: usize, opts: &AllocOptions, quad: &QuadratureSpec) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation(format!("budget n = {n} must be at least 2")));
        }
        quad.validate(p.r)?;
        let ws = problem_weights(p, dom)?;
        let (a, cs, case_id, gap) = regime(p, dom, n as f64)?;
        let allocation = rank_allocation(&cs, case_id, gap, dom, a.r0, opts)?;
        if allocation.t_cut > dom.t_max + 1 {
            return Err(Error::Size(format!(
                "budget n = {n} needs ring {} but the domain resolves only up to t_max = {}",
                allocation.t_cut - 1,
                dom.t_max
            )));
        }
        Ok(Scheme {
            problem: *p,
            domain: *dom,
            quad: *quad,
            v: ws.v,
            allocation,
        })
    }

    fn degree(&self) -> usize {
        self.problem.r as usize - 1
    }

    pub fn approximate(&self, f: &dyn TestFunction) -> Result<Approximant> {
        let rule = self.quad.rule();
        let (lo, hi) = f.support().unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
        let breaks = f.breakpoints();
        let value = |x: f64| f.value(x);
        let deg = self.degree();
        let mut rings = Vec::new();
        for plan in &self.allocation.rings {
            let (t, depth) = (plan.t, plan.depth);
            let mut projections: HashMap<(u32, usize), LocalPoly> = HashMap::new();
            let mut project = |cell: &Cell| -> Result<LocalPoly> {
                if let Some(p) = projections.get(&(cell.m, cell.index)) {
                    return Ok(p.clone());
                }
                let p = l2_project(&value, cell.a, cell.b, deg, &rule, &breaks)?;
                projections.insert((cell.m, cell.index), p.clone());
                Ok(p)
            };
            let coarse_cells = self.domain.cells_meeting(t, depth, lo, hi)?;
            let main = coarse_cells
                .iter()
                .map(|c| project(c).map(|p| (*c, p)))
                .collect::<Result<Vec<_>>>()?;
            let mut corrections = Vec::new();
            for level in &plan.corrections {
                let mut blocks = Vec::new();
                for parent in self.domain.cells_meeting(t, level.m, lo, hi)? {
                    let coarse = project(&parent)?;
                    let [c0, c1] = parent.children();
                    let fine = [project(&c0)?, project(&c1)?];
                    let mut block = CorrectionBlock {
                        parent,
                        coarse,
                        fine,
                        norm: 0.0,
                    };
                    let q = self.problem.space.q;
                    let power = cell_power(&rule, parent.a, parent.b, &[], q, &|x| block.eval(x) * self.v.eval(x));
                    block.norm = power.powf(1.0 / q);
                    blocks.push(block);
                }
                blocks.sort_by(|a, b| b.norm.total_cmp(&a.norm).then(a.parent.index.cmp(&b.parent.index)));
                blocks.truncate(level.blocks);
                blocks.retain(|b| b.norm > 0.0);
                corrections.extend(blocks);
            }
            rings.push(RingApprox {
                t,
                depth,
                main,
                corrections,
            });
        }
        Ok(Approximant {
            allocation: self.allocation.clone(),
            rings,
            degree: deg,
        })
    }

    /// `‖f − A‖_{L_{q,v}(Ω)}`: ring-wise on the approximated rings plus the full norm of
    /// `f` on the rings from `t_cut` on.
    pub fn error(&self, f: &dyn TestFunction, approx: &Approximant) -> Result<f64> {
        let q = self.problem.space.q;
        let rule = self.quad.rule();
        let breaks = f.breakpoints();
        let mut total = 0.0;
        for ring in &approx.rings {
            total += ring_error_power(&rule, f, ring, &breaks, q, self.v);
        }
        let tail = norm_from_ring(
            &self.domain,
            &self.quad,
            self.v,
            q,
            f.support(),
            &breaks,
            approx.t_cut(),
            &|x| f.value(x),
        )?;
        total += tail.powf(q);
        if !total.is_finite() {
            return Err(Error::Numeric("approximation error is not finite".into()));
        }
        Ok(total.powf(1.0 / q))
    }
}

fn regime(p: &SobolevProblem, dom: &DomainSpec, n: f64) -> Result<(AbstractParams, CriticalScales, u8, f64)> {
    let mut a = problem_to_abstract(p)?;
    a.c = dom.ring_constant();
    let pair = abstract_exponents(&a, &p.space)?;
    let profile = definition3_profile(&p.space, a.s_star, &pair)?;
    let cs = critical_scales(&a, &p.space, n)?;
    Ok((a, cs, profile.case_id, profile.gap()))
}

/// Last level the scheme approximates at budget `n` (rings `0..=⌊·⌋`), and the deepest
/// main depth `m̂_0`, or `m̄_0` when correction layers are used.
pub fn critical_extent(p: &SobolevProblem, dom: &DomainSpec, n: usize) -> Result<(f64, f64)> {
    let (_, cs, case_id, _) = regime(p, dom, n as f64)?;
    let plan = case_plan(case_id, &cs)?;
    let depth = match (plan.corrections, cs.m_bar(0.0)) {
        (true, Some(bar)) => bar,
        _ => cs.m_hat(0.0),
    };
    Ok((plan.end, depth))
}

/// A ring count leaving four rings of margin past the last approximated ring at `n_max`.
pub fn suggested_t_max(p: &SobolevProblem, geometry: Geometry, n_max: usize) -> Result<u32> {
    let probe = DomainSpec::new(geometry, 2)?;
    let (end, _) = critical_extent(p, &probe, n_max.max(2))?;
    Ok((end.max(0.0).ceil() as u32 + 4).max(8))
}

/// `∫_a^b |h|^q` with the base rule, split at `breaks`.
fn cell_power(rule: &GaussLegendre, a: f64, b: f64, breaks: &[f64], q: f64, h: &dyn Fn(f64) -> f64) -> f64 {
    let mut knots = vec![a];
    knots.extend(split_points(a, b, breaks));
    knots.push(b);
    knots
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], |x| h(x).abs().powf(q)))
        .sum()
}

struct ErrorWalk<'a> {
    rule: &'a GaussLegendre,
    f: &'a dyn TestFunction,
    breaks: &'a [f64],
    q: f64,
    v: Weight,
    blocks: HashMap<(u32, usize), &'a CorrectionBlock>,
    /// Cells with at least one kept block strictly below them.
    refined: HashSet<(u32, usize)>,
}

impl<'a> ErrorWalk<'a> {
    /// Integrates on `cell` unless a kept block sits on it or below, in which case the
    /// cell is split and each half carries the active blocks.
    fn power(&self, cell: &Cell, main: &LocalPoly, active: &mut Vec<&'a CorrectionBlock>) -> f64 {
        let key = (cell.m, cell.index);
        let own = self.blocks.get(&key).copied();
        if own.is_none() && !self.refined.contains(&key) {
            return cell_power(self.rule, cell.a, cell.b, self.breaks, self.q, &|x| {
                let approx = main.eval(x) + active.iter().map(|blk| blk.eval(x)).sum::<f64>();
                (self.f.value(x) - approx) * self.v.eval(x)
            });
        }
        if let Some(b) = own {
            active.push(b);
        }
        let total = cell.children().iter().map(|c| self.power(c, main, active)).sum();
        if own.is_some() {
            active.pop();
        }
        total
    }
}

fn ring_error_power(rule: &GaussLegendre, f: &dyn TestFunction, ring: &RingApprox, breaks: &[f64], q: f64, v: Weight) -> f64 {
    let mut blocks = HashMap::new();
    let mut refined = HashSet::new();
    for b in &ring.corrections {
        let (mut m, mut i) = (b.parent.m, b.parent.index);
        blocks.insert((m, i), b);
        while m > ring.depth {
            m -= 1;
            i >>= 1;
            if !refined.insert((m, i)) {
                break;
            }
        }
    }
    let walk = ErrorWalk {
        rule,
        f,
        breaks,
        q,
        v,
        blocks,
        refined,
    };
    let mut active = Vec::new();
    ring.main.iter().map(|(cell, main)| walk.power(cell, main, &mut active)).sum()
}

/// Builds the scheme for budget `n` and approximates `f` with it.
pub fn approximate(
    f: &dyn TestFunction,
    p: &SobolevProblem,
    dom: &DomainSpec,
    n: usize,
    opts: &AllocOptions,
    quad: &QuadratureSpec,
) -> Result<Approximant> {
    Scheme::new(p, dom, n, opts, quad)?.approximate(f)
}
