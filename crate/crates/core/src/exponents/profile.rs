use serde::{Deserialize, Serialize};

use super::formulas::ExponentPair;
use super::params::SpaceParams;
use crate::error::{Error, Result};

pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-12;

/// Which value the fourth exponent of case 8 takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case8Theta4 {
    /// `q·θ̂/2`, matching cases 3, 4, 7, 9 and the corresponding error term.
    #[default]
    QScaled,
    /// `θ̂/2`, literally as printed.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    pub case8_theta4: Case8Theta4,
    pub tie_tolerance: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            case8_theta4: Case8Theta4::QScaled,
            tie_tolerance: DEFAULT_TIE_TOLERANCE,
        }
    }
}

/// Indices (1-based) of minimal exponents that fall within tolerance of each other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieDiagnostic {
    pub tied: Vec<usize>,
    pub minimum: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentProfile {
    pub case_id: u8,
    pub j0: usize,
    pub thetas: Vec<f64>,
    /// 1-based index of the strict minimizer.
    pub j_star: Option<usize>,
    pub theta_star: Option<f64>,
    pub tie: Option<TieDiagnostic>,
}

impl ExponentProfile {
    /// Distance from the smallest exponent to the next distinct one.
    pub fn gap(&self) -> f64 {
        let mut sorted = self.thetas.clone();
        sorted.sort_by(f64::total_cmp);
        sorted[1] - sorted[0]
    }

    pub fn min_theta(&self) -> f64 {
        self.thetas.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// The nine parameter regimes. Evaluated independently so that uniqueness can be checked.
///
/// Boundary conventions beyond the printed inequalities:
/// * cases 3 and 4 also take `p0 = q` (their lists coincide with cases 8/9 there);
/// * case 5 excludes `p0 = p1 = q`, which case 1 already owns;
/// * case 8 requires `max(p0, p1) > 2`, leaving `p0 = p1 = 2 < q` to case 7.
pub fn case_predicates(s: &SpaceParams) -> [bool; 9] {
    let (p0, p1, q) = (s.p0.value(), s.p1.value(), s.q);
    let (lo, hi) = (p0.min(p1), p0.max(p1));
    let case1 = p0 >= q && p1 >= q;
    [
        case1,
        p0 > q && p1 < q && q <= 2.0,
        p0 >= q && (2.0..q).contains(&p1),
        p0 >= q && p1 < 2.0 && 2.0 < q,
        p0 <= q && p1 <= q && q <= 2.0 && !case1,
        p0 < q && q <= 2.0 && p1 > q,
        p0 < q && q > 2.0 && hi <= 2.0,
        p0 < q && q > 2.0 && lo >= 2.0 && hi > 2.0,
        p0 < q && q > 2.0 && lo < 2.0 && 2.0 < hi,
    ]
}

pub fn classify(s: &SpaceParams) -> Result<u8> {
    let hits: Vec<u8> = case_predicates(s)
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u8 + 1)
        .collect();
    match hits.as_slice() {
        [one] => Ok(*one),
        [] => Err(Error::Domain(format!("no regime matches {s:?}"))),
        many => Err(Error::Domain(format!("regimes {many:?} all match {s:?}"))),
    }
}

/// Exponent list of the regime in force, in canonical order.
pub fn profile_thetas(case_id: u8, s: &SpaceParams, s_star: f64, e: &ExponentPair, opts: &ProfileOptions) -> Vec<f64> {
    let (ip1, iq, q) = (s.inv_p1(), s.inv_q(), s.q);
    let (tt, th) = (e.theta_tilde, e.theta_hat);
    let sobolev = s_star + iq - ip1;
    let half_q = q * sobolev / 2.0;
    let hat_shift = th + 0.5 - iq;
    let q_hat = q * th / 2.0;
    match case_id {
        1 => vec![s_star, tt],
        2 => vec![sobolev, tt, th],
        3 => vec![s_star, half_q, tt, q_hat],
        4 => vec![s_star + 0.5 - ip1, half_q, tt, hat_shift, q_hat],
        5 => vec![sobolev, th],
        6 => vec![s_star, tt, th],
        7 => vec![s_star + 0.5 - ip1, half_q, hat_shift, q_hat],
        8 => {
            let fourth = match opts.case8_theta4 {
                Case8Theta4::QScaled => q_hat,
                Case8Theta4::AsPrinted => th / 2.0,
            };
            vec![s_star, half_q, tt, fourth]
        }
        9 => vec![s_star + (0.5 - ip1).min(0.0), half_q, tt, hat_shift, q_hat],
        _ => unreachable!("case ids are 1..=9"),
    }
}

pub fn case_length(case_id: u8) -> usize {
    [2, 3, 4, 5, 2, 3, 4, 4, 5][case_id as usize - 1]
}

pub fn definition3_profile(s: &SpaceParams, s_star: f64, e: &ExponentPair) -> Result<ExponentProfile> {
    definition3_profile_with(s, s_star, e, &ProfileOptions::default())
}

pub fn definition3_profile_with(
    s: &SpaceParams,
    s_star: f64,
    e: &ExponentPair,
    opts: &ProfileOptions,
) -> Result<ExponentProfile> {
    s.validate()?;
    let case_id = classify(s)?;
    let thetas = profile_thetas(case_id, s, s_star, e, opts);
    debug_assert_eq!(thetas.len(), case_length(case_id));
    let minimum = thetas.iter().copied().fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = thetas
        .iter()
        .enumerate()
        .filter(|(_, &t)| (t - minimum).abs() <= opts.tie_tolerance)
        .map(|(i, _)| i + 1)
        .collect();
    let (j_star, theta_star, tie) = if tied.len() == 1 {
        (Some(tied[0]), Some(thetas[tied[0] - 1]), None)
    } else {
        (
            None,
            None,
            Some(TieDiagnostic {
                tied,
                minimum,
                tolerance: opts.tie_tolerance,
            }),
        )
    };
    Ok(ExponentProfile {
        case_id,
        j0: thetas.len(),
        thetas,
        j_star,
        theta_star,
        tie,
    })
}
