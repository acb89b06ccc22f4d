//! Sup-error of the multi-scale scheme over a membership-checked ensemble.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::allocation::AllocOptions;
use super::approximant::{critical_extent, Scheme};
use super::domain::DomainSpec;
use super::weights::check_membership;
use crate::error::{Error, Result};
use crate::exponents::SobolevProblem;
use crate::functions::{Poly, Scaled, TestFunction, Zero};
use crate::lowerbounds::{build_bump_family, build_bump_member, BumpProfile, FamilyOptions, MAX_FAMILY_DEPTH};
use crate::quadrature::QuadratureSpec;
use crate::rng::substream;

/// Slack allowed when checking that rescaled members lie in the class.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MemberSpec {
    Zero,
    /// Closed-form polynomial, monomial coefficients lowest first.
    Polynomial { coeffs: Vec<f64> },
    /// One bump on cell `index` of the depth-`depth` family in ring `ring`.
    Bump {
        ring: u32,
        depth: u32,
        #[serde(default)]
        index: Option<usize>,
        #[serde(default)]
        profile: BumpProfile,
    },
    /// All members of a family with seeded random coefficients in `±[1/2, 1]`.
    RandomBumps {
        ring: u32,
        depth: u32,
        #[serde(default)]
        profile: BumpProfile,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub members: Vec<MemberSpec>,
    /// Rescale each member onto the boundary of the class (`max` of its two norms = 1).
    #[serde(default = "default_true")]
    pub normalize: bool,
}

fn default_true() -> bool {
    true
}

impl EnsembleSpec {
    /// Single bumps on rings `0..=j_max` at depths `0..=m_max`, one per (ring, depth).
    pub fn bump_grid(j_max: u32, m_max: u32, profile: BumpProfile) -> Self {
        let members = (0..=j_max)
            .flat_map(|ring| {
                (0..=m_max).map(move |depth| MemberSpec::Bump {
                    ring,
                    depth,
                    index: None,
                    profile,
                })
            })
            .collect();
        EnsembleSpec {
            members,
            normalize: true,
        }
    }

    /// Grid reaching two rings past the last approximated ring and two levels past the
    /// deepest depth at budget `n_max`, within the domain and family limits.
    pub fn default_for(p: &SobolevProblem, dom: &DomainSpec, n_max: usize) -> Result<Self> {
        let (end, depth) = critical_extent(p, dom, n_max.max(2))?;
        let log_n = (n_max.max(2) as f64).log2();
        let j_max = (end.max(log_n).ceil() as u32 + 2).min(dom.t_max);
        let m_max = (depth.max(log_n).ceil() as u32 + 2).min(MAX_FAMILY_DEPTH);
        Ok(Self::bump_grid(j_max, m_max, BumpProfile::Polynomial))
    }
}

/// A membership-checked ensemble member.
pub struct Member {
    pub label: String,
    pub function: Box<dyn TestFunction>,
    pub sobolev: f64,
    pub weighted_p0: f64,
}

fn realize(spec: &MemberSpec, p: &SobolevProblem, dom: &DomainSpec, quad: &QuadratureSpec, seed: u64, k: usize) -> Result<(String, Box<dyn TestFunction>)> {
    let family_opts = |profile| FamilyOptions {
        profile,
        span_fraction: 1.0,
        quad: *quad,
    };
    Ok(match spec {
        MemberSpec::Zero => ("zero".into(), Box::new(Zero)),
        MemberSpec::Polynomial { coeffs } => {
            if coeffs.is_empty() {
                return Err(Error::Validation("polynomial member needs coefficients".into()));
            }
            (format!("poly{coeffs:?}"), Box::new(Poly(coeffs.clone())))
        }
        MemberSpec::Bump {
            ring,
            depth,
            index,
            profile,
        } => {
            let i = index.unwrap_or((1usize << depth) / 2);
            let b = build_bump_member(p, dom, *ring, *depth, i, &family_opts(*profile))?;
            (format!("bump(j={ring},m={depth},i={i})"), Box::new(b))
        }
        MemberSpec::RandomBumps { ring, depth, profile } => {
            let fam = build_bump_family(p, dom, *ring, *depth, &family_opts(*profile))?;
            let mut rng = substream(seed, "ensemble", k as u64);
            let coefs: Vec<f64> = (0..fam.count())
                .map(|_| {
                    let mag: f64 = rng.random_range(0.5..=1.0);
                    if rng.random::<bool>() {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect();
            (format!("random(j={ring},m={depth})"), Box::new(fam.combination(&coefs)))
        }
    })
}

/// Builds every member, rescales it if requested, and rejects members outside the class.
pub fn build_ensemble(spec: &EnsembleSpec, p: &SobolevProblem, dom: &DomainSpec, quad: &QuadratureSpec, seed: u64) -> Result<Vec<Member>> {
    spec.members
        .par_iter()
        .enumerate()
        .map(|(k, ms)| {
            let (label, f) = realize(ms, p, dom, quad, seed, k)?;
            let (sob, zero) = check_membership(f.as_ref(), p, dom, quad)?;
            let scale = sob.max(zero);
            let (function, sob, zero): (Box<dyn TestFunction>, f64, f64) = if spec.normalize && scale > 0.0 {
                (
                    Box::new(Scaled {
                        factor: 1.0 / scale,
                        inner: f,
                    }),
                    sob / scale,
                    zero / scale,
                )
            } else {
                (f, sob, zero)
            };
            if sob > 1.0 + MEMBERSHIP_TOL || zero > 1.0 + MEMBERSHIP_TOL {
                return Err(Error::Validation(format!(
                    "ensemble member {label} lies outside the class (norms {sob:.6e}, {zero:.6e})"
                )));
            }
            Ok(Member {
                label,
                function,
                sobolev: sob,
                weighted_p0: zero,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    /// Sup over the ensemble of `‖f − A_n f‖_{L_{q,v}}`.
    pub error: f64,
    pub rank: usize,
    /// `rank / n`.
    pub rank_constant: f64,
    pub eps: f64,
    /// Label of the member attaining the sup.
    pub worst: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub alloc: AllocOptions,
    pub quad: QuadratureSpec,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            alloc: AllocOptions::default(),
            quad: QuadratureSpec::default(),
            seed: 0x5eed,
        }
    }
}

pub fn run_experiment(
    p: &SobolevProblem,
    dom: &DomainSpec,
    budgets: &[usize],
    ensemble: &EnsembleSpec,
    cfg: &ExperimentConfig,
) -> Result<Vec<ExperimentRow>> {
    if budgets.is_empty() {
        return Err(Error::Validation("no budgets given".into()));
    }
    if budgets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("budgets must be strictly increasing".into()));
    }
    let members = build_ensemble(ensemble, p, dom, &cfg.quad, cfg.seed)?;
    budgets
        .iter()
        .map(|&n| {
            let clock = Instant::now();
            let scheme = Scheme::new(p, dom, n, &cfg.alloc, &cfg.quad)?;
            let errors = members
                .par_iter()
                .map(|m| {
                    let approx = scheme.approximate(m.function.as_ref())?;
                    scheme.error(m.function.as_ref(), &approx)
                })
                .collect::<Result<Vec<f64>>>()?;
            let (worst, error) = errors
                .iter()
                .enumerate()
                .fold((None, 0.0f64), |acc, (i, &e)| if e > acc.1 { (Some(i), e) } else { acc });
            Ok(ExperimentRow {
                n,
                error,
                rank: scheme.allocation.total_rank,
                rank_constant: scheme.allocation.rank_constant,
                eps: scheme.allocation.eps,
                worst: worst.map_or_else(|| "-".to_string(), |i| members[i].label.clone()),
                seconds: clock.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::SpaceParams;
    use crate::multiscale::domain::Geometry;

    fn setup() -> (SobolevProblem, DomainSpec) {
        let sp = SpaceParams::new(2.0, 2.0, 2.0).unwrap();
        (
            SobolevProblem::power_hset(1, 1, sp, 0.0, 1.0, 1.0, 0.25),
            DomainSpec::new(Geometry::IntervalSingularOrigin, 16).unwrap(),
        )
    }

    #[test]
    fn zero_ensemble() {
        let (p, d) = setup();
        let ens = EnsembleSpec {
            members: vec![MemberSpec::Zero],
            normalize: true,
        };
        let rows = run_experiment(&p, &d, &[16, 32], &ens, &ExperimentConfig::default()).unwrap();
        assert!(rows.iter().all(|r| r.error == 0.0));
    }

    #[test]
    fn members_outside_the_class_are_rejected() {
        let (p, d) = setup();
        let ens = EnsembleSpec {
            members: vec![MemberSpec::Polynomial { coeffs: vec![0.0, 5.0] }],
            normalize: false,
        };
        let r = run_experiment(&p, &d, &[16], &ens, &ExperimentConfig::default());
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn budgets_must_increase() {
        let (p, d) = setup();
        let ens = EnsembleSpec::bump_grid(1, 1, BumpProfile::Polynomial);
        assert!(run_experiment(&p, &d, &[32, 16], &ens, &ExperimentConfig::default()).is_err());
    }

    #[test]
    fn random_members_are_seeded() {
        let (p, d) = setup();
        let ens = EnsembleSpec {
            members: vec![MemberSpec::RandomBumps {
                ring: 2,
                depth: 3,
                profile: BumpProfile::Polynomial,
            }],
            normalize: true,
        };
        let cfg = ExperimentConfig::default();
        let a = run_experiment(&p, &d, &[16, 64], &ens, &cfg).unwrap();
        let b = run_experiment(&p, &d, &[16, 64], &ens, &cfg).unwrap();
        assert_eq!(a[0].error, b[0].error);
        assert!(a[1].error <= a[0].error);
    }
}
