use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::output::{csv_table, emit, format_sig, read_pairs};
use super::{BallWidthArgs, Command, ExponentArgs, FitArgs, Format, LowerBoundArgs, RunConfig, SimulateArgs, WidthMethod};
use crate::ballwidths::{
    brute_force_width_oracle, exact_width, gluskin_order, intersection_width_upper, numeric_width_upper, BallSpec, Body,
    IntersectionSpec, SearchConfig, WidthEstimate,
};
use crate::error::{Error, Result};
use crate::exponents::{check_hypotheses, predicted_width_exponent_with, ProfileOptions, SobolevProblem};
use crate::fit::{fit_rate, WindowPolicy};
use crate::lowerbounds::lower_bound_curve;
use crate::multiscale::{
    default_domain, run_experiment, suggested_t_max, AllocOptions, Anchors, DomainSpec, EnsembleSpec, ExperimentConfig,
};
use crate::quadrature::QuadratureSpec;

/// Runs one parsed command, writing its artifact to `--out` or `stdout`.
pub fn dispatch(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    match &cfg.command {
        Command::Exponent(a) => exponent(a, stdout),
        Command::Check(a) => {
            let p = load_problem(&a.problem)?;
            emit(a.out.as_deref(), &to_json(&check_hypotheses(&p))?, stdout)
        }
        Command::BallWidth(a) => ball_width(a, stdout),
        Command::Simulate(a) => simulate(a, stdout),
        Command::LowerBound(a) => lower_bound(a, stdout),
        Command::Fit(a) => fit(a, stdout),
    }
}

fn load_problem(path: &Path) -> Result<SobolevProblem> {
    SobolevProblem::from_json(&fs::read_to_string(path)?)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn check_budgets(budgets: &[usize]) -> Result<()> {
    if budgets.is_empty() {
        return Err(Error::Validation("no budgets given".into()));
    }
    if budgets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("budgets must be strictly increasing".into()));
    }
    Ok(())
}

fn exponent(a: &ExponentArgs, stdout: &mut dyn Write) -> Result<()> {
    let p = load_problem(&a.problem.problem)?;
    let opts = ProfileOptions {
        case8_theta4: a.case8.into(),
        tie_tolerance: a.tie_tol,
    };
    emit(a.problem.out.as_deref(), &to_json(&predicted_width_exponent_with(&p, &opts))?, stdout)
}

fn ball_width(a: &BallWidthArgs, stdout: &mut dyn Write) -> Result<()> {
    let body = match (a.p1, a.k1) {
        (Some(p1), Some(k1)) => Body::Intersection(IntersectionSpec::new(a.dim, a.p, a.k0, p1, k1)?),
        _ => Body::Ball(BallSpec::new(a.dim, a.p, a.k0)?),
    };
    let mut search = SearchConfig {
        seed: a.seed,
        ..SearchConfig::default()
    };
    if let Some(r) = a.restarts {
        search.restarts = r;
    }
    let closed_form = |f: fn(usize, usize, _, _) -> Result<WidthEstimate>| -> Result<WidthEstimate> {
        let Body::Ball(ball) = body else {
            return Err(Error::Validation("closed-form widths apply to a single ball; drop --p1/--k1".into()));
        };
        let mut est = f(ball.dim, a.n, ball.p, a.q)?;
        est.value *= ball.radius;
        Ok(est)
    };
    let est = match a.method {
        WidthMethod::Exact => closed_form(exact_width)?,
        WidthMethod::Gluskin => closed_form(gluskin_order)?,
        WidthMethod::Upper => match body {
            Body::Intersection(spec) => intersection_width_upper(&spec, a.n, a.q)?,
            Body::Ball(_) => return Err(Error::Validation("method upper needs an intersection (--p1, --k1)".into())),
        },
        WidthMethod::Numeric => numeric_width_upper(&body, a.n, a.q, &search)?,
        WidthMethod::Oracle => brute_force_width_oracle(&body, a.n, a.q, &search)?,
    };
    let text = match a.format {
        Format::Json => to_json(&est)?,
        Format::Csv => csv_table(
            &["N", "n", "p", "q", "method", "value"],
            [vec![
                a.dim.to_string(),
                a.n.to_string(),
                a.p.to_string(),
                a.q.to_string(),
                est.method.clone(),
                format_sig(est.value),
            ]],
        )?,
    };
    emit(a.out.as_deref(), &text, stdout)
}

fn simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    check_budgets(&a.budgets)?;
    let p = load_problem(&a.problem)?;
    let n_max = *a.budgets.last().expect("budgets checked nonempty");
    let geometry = default_domain(&p, 2)?.geometry;
    let t_max = match a.t_max {
        Some(t) => t,
        None => suggested_t_max(&p, geometry, n_max)?,
    };
    let dom = DomainSpec::new(geometry, t_max)?;
    let ensemble = match &a.ensemble {
        Some(path) => serde_json::from_str::<EnsembleSpec>(&fs::read_to_string(path)?)?,
        None => EnsembleSpec::default_for(&p, &dom, n_max)?,
    };
    let cfg = ExperimentConfig {
        alloc: AllocOptions {
            eps: a.eps,
            anchors: Anchors {
                t_star: a.t_star,
                t_star2: a.t_star2,
                m_one: a.m_one,
            },
            max_extra_depth: a.max_extra_depth,
        },
        quad: QuadratureSpec {
            nodes: a.nodes,
            grading_depth: a.grading_depth,
        },
        seed: a.seed,
    };
    let rows = run_experiment(&p, &dom, &a.budgets, &ensemble, &cfg)?;
    let text = match a.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => csv_table(
            &["n", "error", "rank", "seconds"],
            rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    format_sig(r.error),
                    r.rank.to_string(),
                    format!("{:.3}", r.seconds),
                ]
            }),
        )?,
    };
    emit(a.out.as_deref(), &text, stdout)
}

fn lower_bound(a: &LowerBoundArgs, stdout: &mut dyn Write) -> Result<()> {
    check_budgets(&a.budgets)?;
    let p = load_problem(&a.problem)?;
    let curve = lower_bound_curve(&p, &a.budgets)?;
    let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
    let text = match a.format {
        Format::Json => to_json(&curve)?,
        Format::Csv => csv_table(
            &["n", "b94", "b95", "b96", "b97", "b98", "max"],
            curve.rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    format_sig(r.b94),
                    format_sig(r.b95),
                    format_sig(r.b96),
                    opt(r.b97),
                    opt(r.b98),
                    format_sig(r.max),
                ]
            }),
        )?,
    };
    emit(a.out.as_deref(), &text, stdout)
}

fn fit(a: &FitArgs, stdout: &mut dyn Write) -> Result<()> {
    let pairs = read_pairs(&a.input, &a.column)?;
    let policy = if a.all {
        WindowPolicy::All
    } else if a.n_min.is_some() || a.n_max.is_some() {
        WindowPolicy::Range {
            n_min: a.n_min.unwrap_or(f64::NEG_INFINITY),
            n_max: a.n_max.unwrap_or(f64::INFINITY),
        }
    } else {
        WindowPolicy::DropSmallest {
            fraction: a.drop_fraction,
        }
    };
    emit(a.out.as_deref(), &to_json(&fit_rate(&pairs, policy)?)?, stdout)
}
