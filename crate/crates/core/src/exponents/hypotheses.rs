use serde::{Deserialize, Serialize};

use super::formulas::{abstract_exponents, concrete_exponents, problem_to_abstract, ExponentPair};
use super::params::{SobolevProblem, WeightFamily, CRITICAL_RELATION_TOL};
use super::profile::{definition3_profile_with, ExponentProfile, ProfileOptions};

/// One line of a [`HypothesisReport`]. For margin conditions `value` must be positive;
/// for residual conditions (names ending in `_residual`) it must be within tolerance of zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub conditions: Vec<Condition>,
    pub overall: bool,
}

impl HypothesisReport {
    fn from_conditions(conditions: Vec<Condition>) -> Self {
        let overall = conditions.iter().all(|c| c.pass);
        HypothesisReport { conditions, overall }
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.pass)
    }
}

fn positive(name: &str, value: f64) -> Condition {
    Condition {
        name: name.to_string(),
        value,
        pass: value > 0.0,
    }
}

pub fn check_hypotheses(p: &SobolevProblem) -> HypothesisReport {
    check_hypotheses_with(p, &ProfileOptions::default())
}

pub fn check_hypotheses_with(p: &SobolevProblem, opts: &ProfileOptions) -> HypothesisReport {
    evaluate(p, opts).0
}

fn evaluate(p: &SobolevProblem, opts: &ProfileOptions) -> (HypothesisReport, Option<ExponentPair>, Option<ExponentProfile>) {
    let mut out = Vec::new();
    if let Err(e) = p.validate() {
        out.push(Condition {
            name: format!("valid_problem: {e}"),
            value: f64::NAN,
            pass: false,
        });
        return (HypothesisReport::from_conditions(out), None, None);
    }
    let (r, d) = (p.r as f64, p.d as f64);
    let s = &p.space;
    let (ip0, ip1, iq) = (s.inv_p0(), s.inv_p1(), s.inv_q());

    out.push(positive("smoothness", r / d + iq.min(ip0) - ip1));
    match p.weights {
        WeightFamily::PowerHset {
            theta, beta, sigma, ..
        } => {
            out.push(Condition {
                name: "hset_dimension".into(),
                value: d - theta,
                pass: theta >= 0.0 && theta < d,
            });
            let a = beta + sigma - r - (d - theta) * ip0 + (d - theta) * ip1;
            let b = beta + sigma - r - d * ip0 + d * ip1;
            out.push(positive("weight_balance", a.min(b)));
        }
        WeightFamily::LogHset {
            gamma, mu, alpha, ..
        } => {
            let (x, y) = p.critical_relation_residuals();
            out.push(Condition {
                name: "critical_relation_residual".into(),
                value: x.abs().max(y.abs()),
                pass: x.abs() <= CRITICAL_RELATION_TOL && y.abs() <= CRITICAL_RELATION_TOL,
            });
            out.push(positive("log_weight_balance", (mu + alpha + (gamma + 1.0) * (ip0 - ip1)).min(mu + alpha)));
        }
        WeightFamily::PowerRd { beta, sigma, .. } => {
            out.push(positive("weight_balance", beta + sigma + r + d * ip0 - d * ip1));
        }
    }

    let a = match problem_to_abstract(p) {
        Ok(a) => a,
        Err(_) => return (HypothesisReport::from_conditions(out), None, None),
    };
    let (st, g, al, mu) = (a.s_star, a.gamma_star, a.alpha_star, a.mu_star);
    out.push(positive("abstract_smoothness", st - (ip1 - iq).max(0.0)));
    out.push(positive("smoothness_margins", st.min(st + iq - ip1).min(st + ip0 - ip1)));
    out.push(positive("balance_margins", (mu + al + g * ip0 - g * ip1).min(mu + al)));

    let p0 = s.p0.value();
    let q = s.q;
    let p1 = s.p1.value();
    if p0 >= q {
        out.push(positive("tail_decay_zero_order", al - g * iq + g * ip0));
    }
    if (p0 <= q && p1 <= q) || (p0 < q && p1 > q) {
        out.push(positive("tail_decay_mixed", al * (st + iq - ip1) - mu * (ip0 - iq)));
    }

    let pair = match concrete_exponents(p).and_then(|c| abstract_exponents(&a, s).map(|_| c)) {
        Ok(pair) => pair,
        Err(_) => {
            out.push(Condition {
                name: "nondegenerate_exponents".into(),
                value: 0.0,
                pass: false,
            });
            return (HypothesisReport::from_conditions(out), None, None);
        }
    };
    if p0 >= q {
        out.push(positive("theta_tilde_positive", pair.theta_tilde));
    } else {
        out.push(positive("theta_hat_positive", pair.theta_hat));
    }

    let profile = definition3_profile_with(s, st, &pair, opts).ok();
    let gap = profile.as_ref().map_or(0.0, |pr| pr.gap());
    out.push(Condition {
        name: "strict_minimizer".into(),
        value: gap,
        pass: profile.as_ref().is_some_and(|pr| pr.j_star.is_some()),
    });
    (HypothesisReport::from_conditions(out), Some(pair), profile)
}

/// Result of the full problem → exponents → profile pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthPrediction {
    /// `θ_{j*}`, present only when every hypothesis holds and the minimizer is strict.
    pub theta_star: Option<f64>,
    pub exponents: Option<ExponentPair>,
    pub profile: Option<ExponentProfile>,
    pub report: HypothesisReport,
}

pub fn predicted_width_exponent(p: &SobolevProblem) -> WidthPrediction {
    predicted_width_exponent_with(p, &ProfileOptions::default())
}

pub fn predicted_width_exponent_with(p: &SobolevProblem, opts: &ProfileOptions) -> WidthPrediction {
    let (report, exponents, profile) = evaluate(p, opts);
    let theta_star = if report.overall {
        profile.as_ref().and_then(|pr| pr.theta_star)
    } else {
        None
    };
    WidthPrediction {
        theta_star,
        exponents,
        profile,
        report,
    }
}
