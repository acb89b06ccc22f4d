//! Brute-force width oracle for tiny dimensions (`N ≤ 5`, `n ≤ 2`).
//!
//! Deliberately shares no numerical code with [`super::search`]: its own distance
//! solvers, its own point sets, pattern search instead of random perturbation.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::types::{lp_norm, Body, EstimateKind, IntersectionSpec, SearchConfig, WidthEstimate};
use crate::error::{Error, Result};
use crate::exponents::LpExponent;
use crate::rng::substream;

pub const ORACLE_MAX_DIM: usize = 5;
pub const ORACLE_MAX_N: usize = 2;
const GAUSSIAN_POINTS: usize = 400;
const RANDOM_STARTS: usize = 6;
const MAX_SWEEPS: usize = 800;

/// `min_c ‖x − B c‖_q` for an arbitrary (not necessarily orthonormal) basis `B`.
fn oracle_distance(x: &DVector<f64>, b: &DMatrix<f64>, q: f64) -> f64 {
    let k = b.ncols();
    if k == 0 {
        return lp_norm(x.as_slice(), q);
    }
    if q == 2.0 {
        let gram = b.tr_mul(b);
        let rhs = b.tr_mul(x);
        return match gram.lu().solve(&rhs) {
            Some(c) => (x - b * c).norm(),
            None => f64::INFINITY,
        };
    }
    if q == 1.0 {
        // residual vanishes on k coordinates at some optimum
        let dim = b.nrows();
        let mut best = lp_norm(x.as_slice(), 1.0);
        let mut rows = vec![0usize; k];
        fn walk(
            pos: usize,
            start: usize,
            rows: &mut Vec<usize>,
            dim: usize,
            x: &DVector<f64>,
            b: &DMatrix<f64>,
            best: &mut f64,
        ) {
            let k = rows.len();
            if pos == k {
                let a = DMatrix::from_fn(k, k, |i, j| b[(rows[i], j)]);
                let rhs = DVector::from_fn(k, |i, _| x[rows[i]]);
                if let Some(c) = a.lu().solve(&rhs) {
                    let d: f64 = (x - b * c).iter().map(|v| v.abs()).sum();
                    if d < *best {
                        *best = d;
                    }
                }
                return;
            }
            for r in start..dim {
                rows[pos] = r;
                walk(pos + 1, r + 1, rows, dim, x, b, best);
            }
        }
        walk(0, 0, &mut rows, dim, x, b, &mut best);
        return best;
    }
    newton_distance(x, b, q)
}

/// Damped Newton on `Σ|x − Bc|^q`, started from the least-squares fit. Residuals are
/// floored inside the Hessian so that `q < 2` stays well posed near exact fits.
fn newton_distance(x: &DVector<f64>, b: &DMatrix<f64>, q: f64) -> f64 {
    let k = b.ncols();
    let power = |c: &DVector<f64>| (x - b * c).iter().map(|r| r.abs().powf(q)).sum::<f64>();
    let mut c = b.tr_mul(b).lu().solve(&b.tr_mul(x)).unwrap_or_else(|| DVector::zeros(k));
    let mut value = power(&c);
    let floor = 1e-12 * x.amax().max(1e-300);
    for _ in 0..200 {
        let r = x - b * &c;
        let grad = -(b.tr_mul(&r.map(|v| v.signum() * v.abs().powf(q - 1.0)))) * q;
        let w = r.map(|v| v.abs().max(floor).powf(q - 2.0));
        let weighted = DMatrix::from_fn(b.nrows(), k, |i, j| w[i] * b[(i, j)]);
        let hess = b.tr_mul(&weighted) * (q * (q - 1.0));
        let Some(dir) = hess.lu().solve(&(-&grad)) else {
            break;
        };
        let slope = grad.dot(&dir);
        if !(slope < 0.0) {
            break;
        }
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-12 {
            let trial = &c + &dir * t;
            let v = power(&trial);
            if v <= value + 1e-4 * t * slope {
                moved = v < value;
                c = trial;
                value = v;
                break;
            }
            t *= 0.5;
        }
        if !moved || dir.amax() <= 1e-13 * (1.0 + c.amax()) {
            break;
        }
    }
    value.powf(1.0 / q)
}

struct OraclePoints {
    points: Vec<DVector<f64>>,
    exact: bool,
}

fn dense_points(body: &Body, seed: u64) -> OraclePoints {
    let dim = body.dim();
    let exact = match body {
        Body::Ball(b) if b.p.is_infinite() => {
            let points = (0..1usize << dim)
                .map(|mask| DVector::from_fn(dim, |i, _| if (mask >> i) & 1 == 1 { -1.0 } else { 1.0 }))
                .collect();
            return OraclePoints { points, exact: true };
        }
        Body::Ball(b) if b.p.value() == 1.0 => {
            let mut points = Vec::new();
            for i in 0..dim {
                for s in [1.0, -1.0] {
                    points.push(DVector::from_fn(dim, |j, _| if i == j { s } else { 0.0 }));
                }
            }
            return OraclePoints { points, exact: true };
        }
        Body::Intersection(s) => {
            if let Some(points) = polytope_points(s) {
                return OraclePoints { points, exact: true };
            }
            false
        }
        _ => false,
    };
    // lattice directions {-K..K}^N plus Gaussian samples, pushed to the boundary
    let k: i64 = match dim {
        0..=2 => 4,
        3 => 3,
        4 => 2,
        _ => 1,
    };
    let side = (2 * k + 1) as usize;
    let mut points = Vec::new();
    let push = |v: DVector<f64>, points: &mut Vec<DVector<f64>>| {
        let g = body.gauge(v.as_slice());
        if g > 0.0 {
            points.push(v / g);
        }
    };
    for code in 0..side.pow(dim as u32) {
        let mut c = code;
        let v = DVector::from_fn(dim, |_, _| {
            let d = (c % side) as i64 - k;
            c /= side;
            d as f64
        });
        push(v, &mut points);
    }
    let mut rng = substream(seed, "oracle-points", dim as u64);
    for _ in 0..GAUSSIAN_POINTS {
        let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        push(v, &mut points);
    }
    OraclePoints { points, exact }
}

/// For `B_1 ∩ B_∞` bodies: every boundary point whose entries lie in `{0, ±a, ±(r − ⌊r/a⌋a)}`,
/// one of each `±` pair. The set contains all vertices, so the sup over it is exact.
fn polytope_points(s: &IntersectionSpec) -> Option<Vec<DVector<f64>>> {
    let (one, cube) = match (s.ball0.p, s.ball1.p) {
        (a, b) if a.value() == 1.0 && b.is_infinite() => (s.ball0.radius, s.ball1.radius),
        (a, b) if b.value() == 1.0 && a.is_infinite() => (s.ball1.radius, s.ball0.radius),
        _ => return None,
    };
    let rest = one - (one / cube).floor() * cube;
    let levels = [0.0, cube, -cube, rest, -rest];
    let dim = s.dim;
    let mut points: Vec<DVector<f64>> = Vec::new();
    for code in 0..levels.len().pow(dim as u32) {
        let mut c = code;
        let v = DVector::from_fn(dim, |_, _| {
            let x = levels[c % levels.len()];
            c /= levels.len();
            x
        });
        let lead = v.iter().find(|x| x.abs() > 0.0).copied().unwrap_or(0.0);
        let l1: f64 = v.iter().map(|x| x.abs()).sum();
        let linf = v.amax();
        let on_boundary = (l1 - one).abs() <= 1e-12 * one && linf <= cube * (1.0 + 1e-12)
            || (linf - cube).abs() <= 1e-12 * cube && l1 <= one * (1.0 + 1e-12);
        if lead > 0.0 && on_boundary && !points.contains(&v) {
            points.push(v);
        }
    }
    Some(points)
}

fn worst_case(points: &OraclePoints, b: &DMatrix<f64>, q: f64) -> f64 {
    points
        .points
        .iter()
        .map(|x| oracle_distance(x, b, q))
        .fold(0.0, f64::max)
}

/// Sup over the points, abandoned as soon as it reaches `cutoff`. Points that set the
/// maximum last time are tried first, which usually ends a losing trial after a few
/// evaluations.
fn worst_case_below(points: &OraclePoints, hot: &mut Vec<usize>, b: &DMatrix<f64>, q: f64, cutoff: f64) -> Option<f64> {
    let mut worst = 0.0f64;
    for (pos, &i) in hot.iter().enumerate() {
        let d = oracle_distance(&points.points[i], b, q);
        if d >= cutoff {
            hot[..=pos].rotate_right(1);
            return None;
        }
        worst = worst.max(d);
    }
    let mut arg = None;
    for (i, x) in points.points.iter().enumerate() {
        if hot.contains(&i) {
            continue;
        }
        let d = oracle_distance(x, b, q);
        if d >= cutoff {
            hot.insert(0, i);
            hot.truncate(8);
            return None;
        }
        if d > worst {
            worst = d;
            arg = Some(i);
        }
    }
    if let Some(i) = arg {
        hot.insert(0, i);
        hot.truncate(8);
    }
    Some(worst)
}

fn normalize_columns(b: &mut DMatrix<f64>) {
    for mut col in b.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
}

/// Compass search over all basis entries.
fn pattern_search(start: DMatrix<f64>, points: &OraclePoints, q: f64) -> (DMatrix<f64>, f64, f64) {
    let mut b = start;
    normalize_columns(&mut b);
    let mut value = worst_case(points, &b, q);
    let mut hot = Vec::new();
    let mut step = 0.5;
    let mut sweeps = 0;
    while step > 1e-7 && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut improved = false;
        for idx in 0..b.len() {
            for sign in [1.0, -1.0] {
                let mut trial = b.clone();
                trial[idx] += sign * step;
                normalize_columns(&mut trial);
                if let Some(v) = worst_case_below(points, &mut hot, &trial, q, value * (1.0 - 1e-12)) {
                    b = trial;
                    value = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (b, value, step)
}

/// Polishes the sup for the final basis by ascent from the worst lattice points.
fn polish_sup(body: &Body, points: &OraclePoints, b: &DMatrix<f64>, q: f64) -> f64 {
    let base = worst_case(points, b, q);
    if points.exact {
        return base;
    }
    let mut order: Vec<(f64, usize)> = points
        .points
        .iter()
        .enumerate()
        .map(|(i, x)| (oracle_distance(x, b, q), i))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = base;
    let dim = body.dim();
    for &(v0, i) in order.iter().take(6) {
        let mut x = points.points[i].clone();
        let mut v = v0;
        let mut step = 0.1;
        while step > 1e-9 {
            let mut moved = false;
            for j in 0..dim {
                for s in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[j] += s * step;
                    let g = body.gauge(y.as_slice());
                    if g <= 0.0 {
                        continue;
                    }
                    let y = y / g;
                    let vy = oracle_distance(&y, b, q);
                    if vy > v {
                        x = y;
                        v = vy;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best = best.max(v);
    }
    best
}

/// Near-exact `d_n(body, l_q^N)` for `N ≤ 5`, `n ≤ 2`.
pub fn brute_force_width_oracle(body: &Body, n: usize, q: LpExponent, cfg: &SearchConfig) -> Result<WidthEstimate> {
    body.validate()?;
    let dim = body.dim();
    if dim > ORACLE_MAX_DIM || n > ORACLE_MAX_N {
        return Err(Error::Size(format!(
            "oracle handles N <= {ORACLE_MAX_DIM}, n <= {ORACLE_MAX_N}; got N = {dim}, n = {n}"
        )));
    }
    if !(q.value() >= 1.0 && q.value().is_finite()) {
        return Err(Error::Domain(format!("oracle needs finite q >= 1, got {q}")));
    }
    if n >= dim {
        return Ok(WidthEstimate::new(0.0, EstimateKind::Exact, "oracle", n, q).with_tolerance(0.0));
    }
    let qv = q.value();
    let (scale, unit) = body.normalized();
    let points = dense_points(&unit, cfg.seed);
    let mut starts: Vec<DMatrix<f64>> = Vec::new();
    let mut push_coordinate = |rows: &[usize]| {
        starts.push(DMatrix::from_fn(dim, n, |i, j| if rows[j] == i { 1.0 } else { 0.0 }));
    };
    match n {
        0 => {}
        1 => (0..dim).for_each(|i| push_coordinate(&[i])),
        _ => {
            for i in 0..dim {
                for j in (i + 1)..dim {
                    push_coordinate(&[i, j]);
                }
            }
        }
    }
    let mut rng = substream(cfg.seed, "oracle-starts", (dim * 10 + n) as u64);
    for _ in 0..cfg.restarts.min(RANDOM_STARTS) {
        starts.push(DMatrix::from_fn(dim, n, |_, _| rng.sample::<f64, _>(StandardNormal)));
    }
    if n > 0 {
        // a few symmetric frames: all-ones direction and alternating signs
        starts.push(DMatrix::from_fn(dim, n, |i, j| if j == 0 { 1.0 } else if i % 2 == 0 { 1.0 } else { -1.0 }));
    }
    let (best_b, best_value, last_step) = if n == 0 {
        let b = DMatrix::zeros(dim, 0);
        let v = worst_case(&points, &b, qv);
        (b, v, 0.0)
    } else {
        starts
            .into_par_iter()
            .map(|s| pattern_search(s, &points, qv))
            .collect::<Vec<_>>()
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one start")
    };
    let value = polish_sup(&unit, &points, &best_b, qv).max(best_value);
    let relative = if points.exact { 1e-6 + last_step } else { 0.02 };
    Ok(WidthEstimate::new(scale * value, EstimateKind::Exact, "oracle", n, q).with_tolerance(scale * value * relative))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballwidths::types::BallSpec;
    use approx::assert_relative_eq;

    #[test]
    fn reference_values() {
        let cfg = SearchConfig::default();
        let disk = Body::Ball(BallSpec::unit(2, 2.0).unwrap());
        assert_relative_eq!(brute_force_width_oracle(&disk, 1, 2.0.into(), &cfg).unwrap().value, 1.0, epsilon = 1e-9);
        let cube = Body::Ball(BallSpec::unit(4, LpExponent::INFINITY).unwrap());
        assert_relative_eq!(brute_force_width_oracle(&cube, 1, 1.0.into(), &cfg).unwrap().value, 3.0, epsilon = 1e-6);
        let b = Body::Ball(BallSpec::unit(6, 2.0).unwrap());
        assert!(matches!(brute_force_width_oracle(&b, 1, 2.0.into(), &cfg), Err(Error::Size(_))));
    }

    #[test]
    fn independent_distance_agrees_on_simple_cases() {
        let b = DMatrix::from_vec(3, 1, vec![2.0, 0.0, 0.0]);
        let x = DVector::from_vec(vec![7.0, 3.0, -4.0]);
        for q in [1.0, 1.5, 2.0, 3.0] {
            assert_relative_eq!(oracle_distance(&x, &b, q), lp_norm(&[3.0, -4.0], q), epsilon = 1e-9);
        }
    }
}
