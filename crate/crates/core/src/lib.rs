//! Order exponents of Kolmogorov widths for weighted Sobolev classes, with numerical
//! cross-checks: finite-dimensional ball widths, a multi-scale piecewise-polynomial
//! approximation scheme, and bump-function lower bounds.

pub mod ballwidths;
pub mod cli;
pub mod error;
pub mod exponents;
pub mod fit;
pub mod functions;
pub mod lowerbounds;
pub mod multiscale;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
