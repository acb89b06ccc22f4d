//! Bump families embedding finite-dimensional balls into the class, and the resulting
//! lower-bound curves.

mod bumps;
mod curve;

pub use bumps::{
    build_bump_family, build_bump_member, bump_norms, Bump, BumpFamily, BumpProfile, BumpSpec, BumpSum, FamilyOptions,
    MAX_FAMILY_DEPTH,
};
pub use curve::{lower_bound_curve, matched_scales_lower, LowerBoundCurve, LowerBoundRow};
