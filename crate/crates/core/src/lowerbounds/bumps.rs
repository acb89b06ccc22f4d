//! Compactly supported bumps and their disjoint scaled families.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::SobolevProblem;
use crate::functions::{Poly, TestFunction};
use crate::multiscale::{check_membership, problem_weights, weighted_norm, DomainSpec, Geometry, Weight};
use crate::quadrature::{integrate_graded, GaussLegendre, QuadratureSpec};

/// Finest depth a family may use.
pub const MAX_FAMILY_DEPTH: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpProfile {
    /// `(x(1−x))^{r+1}`: `r` continuous derivatives, all vanishing at 0 and 1.
    #[default]
    Polynomial,
    /// `exp(−1/(x(1−x)))`, infinitely smooth.
    Smooth,
}

/// The reference bump `ψ` on `[0, 1]`, scaled to unit `L_q` norm.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSpec {
    pub r: u32,
    pub profile: BumpProfile,
    pub q: f64,
    /// Multiplier making `‖ψ‖_{L_q(0,1)} = 1`.
    pub normalizer: f64,
    /// Derivative polynomials: the monomial form for `Polynomial`, and for `Smooth` the
    /// `P_k` in `ψ^{(k)} = e^{−1/u} P_k / u^{2k}`, `u = x(1−x)`.
    derivs: Vec<Poly>,
}

fn u_poly() -> Poly {
    Poly(vec![0.0, 1.0, -1.0])
}

impl BumpSpec {
    pub fn new(r: u32, profile: BumpProfile, q: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::Validation("bump smoothness r must be positive".into()));
        }
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::Validation(format!("normalization exponent q = {q} must be finite and >= 1")));
        }
        let u = u_poly();
        let derivs = match profile {
            BumpProfile::Polynomial => {
                let base = u.pow(r + 1);
                (0..=r).map(|k| base.nth_derivative(k)).collect()
            }
            BumpProfile::Smooth => {
                let du = u.derivative();
                let mut out = vec![Poly::constant(1.0)];
                for k in 0..r {
                    let pk = &out[k as usize];
                    let next = pk
                        .mul(&du)
                        .add(&pk.derivative().mul(&u.pow(2)))
                        .add(&pk.mul(&u).mul(&du).scale(-2.0 * k as f64));
                    out.push(next);
                }
                out
            }
        };
        let mut spec = BumpSpec {
            r,
            profile,
            q,
            normalizer: 1.0,
            derivs,
        };
        let rule = GaussLegendre::cached(32);
        let raw = integrate_graded(&rule, 0.0, 1.0, 24, |x| spec.raw(0, x).abs().powf(q)).powf(1.0 / q);
        spec.normalizer = 1.0 / raw;
        Ok(spec)
    }

    fn raw(&self, order: u32, x: f64) -> f64 {
        if !(x > 0.0 && x < 1.0) {
            return 0.0;
        }
        let p = &self.derivs[order as usize];
        match self.profile {
            BumpProfile::Polynomial => p.eval(x),
            BumpProfile::Smooth => {
                let u = x * (1.0 - x);
                (-1.0 / u).exp() * p.eval(x) / u.powi(2 * order as i32)
            }
        }
    }

    /// `ψ^{(order)}(x)`; zero outside `(0, 1)`.
    pub fn derivative(&self, order: u32, x: f64) -> Option<f64> {
        (order <= self.r).then(|| self.normalizer * self.raw(order, x))
    }

    pub fn value(&self, x: f64) -> f64 {
        self.normalizer * self.raw(0, x)
    }
}

/// `coef · ψ((x − a)/(b − a))`.
#[derive(Debug, Clone)]
pub struct Bump {
    pub spec: Arc<BumpSpec>,
    pub a: f64,
    pub b: f64,
    pub coef: f64,
}

impl Bump {
    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

impl TestFunction for Bump {
    fn value(&self, x: f64) -> f64 {
        self.coef * self.spec.value((x - self.a) / self.width())
    }

    fn derivative(&self, order: u32, x: f64) -> Option<f64> {
        let h = self.width();
        self.spec
            .derivative(order, (x - self.a) / h)
            .map(|d| self.coef * d / h.powi(order as i32))
    }

    fn support(&self) -> Option<(f64, f64)> {
        Some((self.a, self.b))
    }
}

/// A finite sum of bumps with pairwise disjoint supports.
#[derive(Debug, Clone)]
pub struct BumpSum {
    pub members: Vec<Bump>,
}

impl BumpSum {
    fn locate(&self, x: f64) -> Option<&Bump> {
        let i = self.members.partition_point(|b| b.b <= x);
        self.members.get(i).filter(|b| b.a <= x)
    }
}

impl TestFunction for BumpSum {
    fn value(&self, x: f64) -> f64 {
        self.locate(x).map_or(0.0, |b| b.value(x))
    }

    fn derivative(&self, order: u32, x: f64) -> Option<f64> {
        match self.locate(x) {
            Some(b) => b.derivative(order, x),
            None => self.members.first().map_or(Some(0.0), |b| b.spec.derivative(order, -1.0)),
        }
    }

    fn support(&self) -> Option<(f64, f64)> {
        let first = self.members.first()?;
        let last = self.members.last()?;
        Some((first.a, last.b))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.members.iter().flat_map(|b| [b.a, b.b]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyOptions {
    pub profile: BumpProfile,
    /// Fraction of the ring piece covered by the members, centered in the piece.
    pub span_fraction: f64,
    pub quad: QuadratureSpec,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            profile: BumpProfile::Polynomial,
            span_fraction: 1.0,
            quad: QuadratureSpec::default(),
        }
    }
}

/// `2^m` disjoint bumps in ring `j`, each of unit `L_{q,v}` norm.
#[derive(Debug, Clone)]
pub struct BumpFamily {
    pub j: u32,
    pub m: u32,
    /// Common support length `ρ`.
    pub rho: f64,
    pub members: Vec<Bump>,
}

impl BumpFamily {
    pub fn count(&self) -> usize {
        self.members.len()
    }

    /// `Σ c_i ψ_i`.
    pub fn combination(&self, coefs: &[f64]) -> BumpSum {
        BumpSum {
            members: self
                .members
                .iter()
                .zip(coefs)
                .map(|(b, c)| Bump {
                    coef: b.coef * c,
                    ..b.clone()
                })
                .collect(),
        }
    }
}

/// Positive piece of ring `j` that hosts a family.
fn host_piece(dom: &DomainSpec, j: u32) -> (f64, f64) {
    let pieces = dom.ring_pieces(j);
    match dom.geometry {
        Geometry::IntervalSingularOrigin => pieces[0],
        Geometry::RealLine => *pieces.last().expect("rings are nonempty"),
    }
}

fn check_family_args(dom: &DomainSpec, j: u32, m: u32, opts: &FamilyOptions) -> Result<()> {
    if j > dom.t_max {
        return Err(Error::Size(format!("ring j = {j} is beyond t_max = {}", dom.t_max)));
    }
    if m > MAX_FAMILY_DEPTH {
        return Err(Error::Size(format!("depth m = {m} exceeds {MAX_FAMILY_DEPTH}")));
    }
    if !(opts.span_fraction > 0.0 && opts.span_fraction <= 1.0) {
        return Err(Error::Validation(format!("span fraction {} must lie in (0, 1]", opts.span_fraction)));
    }
    Ok(())
}

/// Support of member `i` of the depth-`m` family in ring `j`.
fn member_support(dom: &DomainSpec, j: u32, m: u32, i: usize, span_fraction: f64) -> (f64, f64) {
    let (a, b) = host_piece(dom, j);
    let window = (b - a) * span_fraction;
    let start = a + 0.5 * (b - a - window);
    let count = 1usize << m;
    let rho = window / count as f64;
    let lo = start + rho * i as f64;
    let hi = if i + 1 == count { start + window } else { lo + rho };
    (lo, hi)
}

fn normalized(spec: &Arc<BumpSpec>, (lo, hi): (f64, f64), v: Weight, dom: &DomainSpec, quad: &QuadratureSpec) -> Result<Bump> {
    let unit = Bump {
        spec: spec.clone(),
        a: lo,
        b: hi,
        coef: 1.0,
    };
    let norm = weighted_norm(&unit, v, spec.q, dom, quad)?;
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Numeric(format!("bump on ({lo}, {hi}) has norm {norm}")));
    }
    Ok(Bump { coef: 1.0 / norm, ..unit })
}

/// Member `index` of the family in ring `j` at depth `m`, without building the rest.
pub fn build_bump_member(
    p: &SobolevProblem,
    dom: &DomainSpec,
    j: u32,
    m: u32,
    index: usize,
    opts: &FamilyOptions,
) -> Result<Bump> {
    check_family_args(dom, j, m, opts)?;
    if index >= 1usize << m {
        return Err(Error::Validation(format!("member {index} out of range for depth {m}")));
    }
    let ws = problem_weights(p, dom)?;
    let spec = Arc::new(BumpSpec::new(p.r, opts.profile, p.space.q)?);
    normalized(&spec, member_support(dom, j, m, index, opts.span_fraction), ws.v, dom, &opts.quad)
}

pub fn build_bump_family(p: &SobolevProblem, dom: &DomainSpec, j: u32, m: u32, opts: &FamilyOptions) -> Result<BumpFamily> {
    check_family_args(dom, j, m, opts)?;
    let ws = problem_weights(p, dom)?;
    let spec = Arc::new(BumpSpec::new(p.r, opts.profile, p.space.q)?);
    let members = (0..1usize << m)
        .map(|i| normalized(&spec, member_support(dom, j, m, i, opts.span_fraction), ws.v, dom, &opts.quad))
        .collect::<Result<Vec<_>>>()?;
    let rho = members[0].width();
    Ok(BumpFamily { j, m, rho, members })
}

/// `(‖ψ_i‖_{W^r_{p1,g}}, ‖ψ_i‖_{L_{p0,w}})` for every member.
pub fn bump_norms(fam: &BumpFamily, p: &SobolevProblem, dom: &DomainSpec, quad: &QuadratureSpec) -> Result<Vec<(f64, f64)>> {
    fam.members.iter().map(|b| check_membership(b, p, dom, quad)).collect()
}
