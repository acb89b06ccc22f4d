//! Rate exponents of weighted Sobolev widths: the abstract formulas, the three concrete
//! weight families, regime classification and hypothesis checks.

mod formulas;
mod hypotheses;
mod params;
mod profile;

pub use formulas::{abstract_exponents, concrete_exponents, problem_to_abstract, shared_denominator, ExponentPair};
pub use hypotheses::{
    check_hypotheses, check_hypotheses_with, predicted_width_exponent, predicted_width_exponent_with, Condition,
    HypothesisReport, WidthPrediction,
};
pub use params::{
    polynomial_space_dim, AbstractParams, LpExponent, ProblemKind, SobolevProblem, SpaceParams, WeightFamily,
    CRITICAL_RELATION_TOL,
};
pub use profile::{
    case_length, case_predicates, classify, definition3_profile, definition3_profile_with, profile_thetas,
    Case8Theta4, ExponentProfile, ProfileOptions, TieDiagnostic, DEFAULT_TIE_TOLERANCE,
};
