//! One-dimensional multi-scale upper-bound construction: ring partitions, local
//! projections, rank allocation from the critical scales, and weighted errors.

mod allocation;
mod approximant;
mod domain;
mod experiment;
mod projection;
mod scales;
mod weights;

pub use allocation::{
    case_plan, correction_budget, default_eps, rank_allocation, AllocOptions, Anchors, CasePlan, CorrectionLevel,
    RankAllocation, RingPlan, MAX_DEPTH,
};
pub use approximant::{approximate, critical_extent, suggested_t_max, Approximant, CorrectionBlock, RingApprox, Scheme};
pub use domain::{build_partition, Cell, DomainSpec, Geometry, Partition, MAX_CELLS_PER_LEVEL};
pub use experiment::{
    build_ensemble, run_experiment, EnsembleSpec, ExperimentConfig, ExperimentRow, Member, MemberSpec, MEMBERSHIP_TOL,
};
pub use projection::{basis_values, l2_project, LocalPoly};
pub use scales::{critical_scales, level_coefficient, CriticalScales};
pub use weights::{check_membership, default_domain, problem_weights, weighted_norm, Weight, WeightSet};
