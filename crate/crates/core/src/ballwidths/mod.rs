//! Widths of finite-dimensional balls and of two-ball intersections.

pub mod distance;
mod formulas;
mod oracle;
mod search;
mod types;

pub use formulas::{
    exact_width, gluskin_order, interpolation_ball, intersection_width_upper, wtm_body, wtm_dimension, wtm_radii,
};
pub use oracle::{brute_force_width_oracle, ORACLE_MAX_DIM, ORACLE_MAX_N};
pub use search::{extreme_points, numeric_width_upper, PointCloud};
pub use types::{lp_norm, BallSpec, Body, EstimateKind, IntersectionSpec, SearchConfig, WidthEstimate};
