//! Randomized search for good `n`-dimensional subspaces: an empirical upper bound on `d_n`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::distance::{binomial, combinations, distance_gradient, lq_distance, project};
use super::types::{Body, EstimateKind, SearchConfig, WidthEstimate};
use crate::error::{Error, Result};
use crate::exponents::LpExponent;
use crate::rng::substream;

/// Coordinate subspaces are tried exhaustively up to this many.
const COORDINATE_CAP: usize = 512;
/// Exhaustive sign vertices up to this dimension.
const VERTEX_DIM_CAP: usize = 16;
/// Largest enumerated vertex set of a polytope body.
const VERTEX_CAP: usize = 1 << 14;
/// Candidates that go on to local refinement.
const REFINED: usize = 4;

/// Boundary points whose maximal distance approximates the sup over the body.
pub struct PointCloud {
    pub points: Vec<DVector<f64>>,
    /// True if the points are all extreme points of the body (the sup is exact).
    pub exhaustive: bool,
}

fn to_boundary(body: &Body, v: DVector<f64>) -> Option<DVector<f64>> {
    let g = body.gauge(v.as_slice());
    (g > 0.0 && g.is_finite()).then(|| v / g)
}

fn gaussian(rng: &mut impl Rng, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// `{-1, 0, 1}^N` with the first nonzero entry positive.
fn ternary_directions(dim: usize) -> Vec<DVector<f64>> {
    let total = 3usize.pow(dim as u32);
    (1..total)
        .filter_map(|mut code| {
            let v = DVector::from_fn(dim, |_, _| {
                let d = (code % 3) as f64 - 1.0;
                code /= 3;
                d
            });
            let first = v.iter().find(|x| **x != 0.0).copied()?;
            (first > 0.0).then_some(v)
        })
        .collect()
}

/// Vertices of `r·B_1 ∩ a·B_∞` up to sign: `⌊r/a⌋` entries at `±a` and one remainder entry.
fn cross_cube_vertices(dim: usize, r: f64, a: f64) -> Option<Vec<DVector<f64>>> {
    let full = (r / a).floor();
    if full >= dim as f64 {
        return None;
    }
    let j = full as usize;
    let rest = r - j as f64 * a;
    let has_rest = rest > 1e-12 * r;
    let count = binomial(dim, j) * if has_rest { (dim - j) << j } else { 1usize << j.saturating_sub(1) };
    if count > VERTEX_CAP {
        return None;
    }
    let mut out = Vec::with_capacity(count);
    for rows in combinations(dim, j) {
        let extra: Vec<Option<usize>> = if has_rest {
            (0..dim).filter(|i| !rows.contains(i)).map(Some).collect()
        } else {
            vec![None]
        };
        for e in extra {
            for mask in 0..1usize << j {
                let mut v = DVector::zeros(dim);
                for (b, &i) in rows.iter().enumerate() {
                    v[i] = if (mask >> b) & 1 == 1 { -a } else { a };
                }
                if let Some(i) = e {
                    v[i] = rest;
                }
                // one of each ± pair: the remainder is always positive, otherwise the lead entry is
                if has_rest || v.iter().find(|x| **x != 0.0).is_some_and(|x| *x > 0.0) {
                    out.push(v);
                }
            }
        }
    }
    Some(out)
}

pub fn extreme_points(body: &Body, cfg: &SearchConfig) -> PointCloud {
    let dim = body.dim();
    let mut rng = substream(cfg.seed, "extreme-points", dim as u64);
    if let Body::Intersection(s) = body {
        let (b0, b1) = (s.ball0, s.ball1);
        let (one, cube) = match (b0.p.value() == 1.0, b1.p.is_infinite(), b1.p.value() == 1.0, b0.p.is_infinite()) {
            (true, true, _, _) => (Some(b0), Some(b1)),
            (_, _, true, true) => (Some(b1), Some(b0)),
            _ => (None, None),
        };
        if let (Some(one), Some(cube)) = (one, cube) {
            if one.radius <= cube.radius {
                return extreme_points(&Body::Ball(one), cfg);
            }
            match cross_cube_vertices(dim, one.radius, cube.radius) {
                Some(points) => {
                    return PointCloud {
                        points,
                        exhaustive: true,
                    }
                }
                None if one.radius >= dim as f64 * cube.radius => return extreme_points(&Body::Ball(cube), cfg),
                None => {}
            }
        }
    }
    if let Body::Ball(b) = body {
        if b.p.is_infinite() {
            if dim <= VERTEX_DIM_CAP {
                let points = (0..1usize << (dim - 1))
                    .map(|mask| {
                        DVector::from_fn(dim, |i, _| if i > 0 && (mask >> (i - 1)) & 1 == 1 { -1.0 } else { 1.0 })
                    })
                    .collect();
                return PointCloud {
                    points,
                    exhaustive: true,
                };
            }
            let points = (0..cfg.samples_per_eval)
                .map(|_| DVector::from_fn(dim, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 }))
                .collect();
            return PointCloud {
                points,
                exhaustive: false,
            };
        }
        if b.p.value() == 1.0 {
            let points = (0..dim)
                .map(|i| DVector::from_fn(dim, |j, _| if i == j { 1.0 } else { 0.0 }))
                .collect();
            return PointCloud {
                points,
                exhaustive: true,
            };
        }
    }
    let mut points = Vec::new();
    if 3f64.powi(dim as i32) <= 4.0 * cfg.samples_per_eval as f64 {
        points.extend(ternary_directions(dim).into_iter().filter_map(|v| to_boundary(body, v)));
    } else {
        for k in 1..=dim {
            for _ in 0..2 {
                let mut v = DVector::zeros(dim);
                for _ in 0..k {
                    let i = rng.random_range(0..dim);
                    v[i] = if rng.random::<bool>() { 1.0 } else { -1.0 };
                }
                points.extend(to_boundary(body, v));
            }
        }
    }
    for _ in 0..cfg.samples_per_eval {
        points.extend(to_boundary(body, gaussian(&mut rng, dim)));
    }
    PointCloud {
        points,
        exhaustive: false,
    }
}

/// `max_x dist_q(x, span U)`, stopping early once `cutoff` is exceeded.
fn sup_distance(points: &[DVector<f64>], u: &DMatrix<f64>, q: f64, tol: f64, cutoff: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for x in points {
        worst = worst.max(lq_distance(x, u, q, tol));
        if worst > cutoff {
            return worst;
        }
    }
    worst
}

/// Local ascent on the body's boundary from the worst sampled points.
fn refine_sup(body: &Body, cloud: &PointCloud, u: &DMatrix<f64>, q: f64, cfg: &SearchConfig) -> f64 {
    let mut scored: Vec<(f64, usize)> = cloud
        .points
        .iter()
        .enumerate()
        .map(|(i, x)| (lq_distance(x, u, q, cfg.tolerance), i))
        .collect();
    let mut best = scored.iter().fold(0.0_f64, |m, s| m.max(s.0));
    if cloud.exhaustive {
        return best;
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(start, idx) in scored.iter().take(8) {
        let mut x = cloud.points[idx].clone();
        let mut value = start;
        let mut eta = 0.25;
        for _ in 0..200 {
            let proj = project(&x, u, q, cfg.tolerance);
            let grad = distance_gradient(&proj, q);
            let Some(trial) = to_boundary(body, &x + grad * eta) else { break };
            let v = lq_distance(&trial, u, q, cfg.tolerance);
            if v > value {
                value = v;
                x = trial;
                eta *= 1.5;
            } else {
                eta *= 0.5;
                if eta < 1e-9 {
                    break;
                }
            }
        }
        // random moves get past kinks of the boundary where the gradient step stalls
        let mut rng = substream(cfg.seed, "sup-refine", idx as u64);
        let mut sigma = 0.1;
        for _ in 0..300 {
            let Some(trial) = to_boundary(body, &x + gaussian(&mut rng, x.len()) * sigma) else { continue };
            let v = lq_distance(&trial, u, q, cfg.tolerance);
            if v > value {
                value = v;
                x = trial;
                sigma = (sigma * 1.5_f64).min(0.5);
            } else {
                sigma *= 0.85;
                if sigma < 1e-7 {
                    break;
                }
            }
        }
        best = best.max(value);
    }
    best
}

fn orthonormal_frame(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let k = m.ncols();
    if k == 0 {
        return m;
    }
    // modified Gram–Schmidt keeps column order, which matters for nested extensions
    for j in 0..k {
        for i in 0..j {
            let proj = m.column(i).dot(&m.column(j));
            let ci = m.column(i).clone_owned();
            let mut cj = m.column_mut(j);
            cj -= ci * proj;
        }
        let norm = m.column(j).norm();
        if norm > 1e-12 {
            m.column_mut(j).scale_mut(1.0 / norm);
        }
    }
    m
}

fn extend_frame(u: &DMatrix<f64>, v: DVector<f64>) -> DMatrix<f64> {
    let mut m = u.clone().insert_column(u.ncols(), 0.0);
    m.set_column(u.ncols(), &v);
    orthonormal_frame(m)
}

fn frame_is_full_rank(u: &DMatrix<f64>) -> bool {
    (0..u.ncols()).all(|j| (u.column(j).norm() - 1.0).abs() < 1e-8)
}

fn candidates(dim: usize, k: usize, previous: Option<&DMatrix<f64>>, cfg: &SearchConfig) -> Vec<DMatrix<f64>> {
    let mut out = Vec::new();
    if binomial(dim, k) <= COORDINATE_CAP {
        for rows in combinations(dim, k) {
            out.push(DMatrix::from_fn(dim, k, |i, j| if rows[j] == i { 1.0 } else { 0.0 }));
        }
    }
    let mut rng = substream(cfg.seed, "frames", (dim * 1000 + k) as u64);
    for _ in 0..cfg.restarts {
        let g = DMatrix::from_fn(dim, k, |_, _| rng.sample::<f64, _>(StandardNormal));
        out.push(orthonormal_frame(g));
    }
    if let Some(prev) = previous {
        for i in 0..dim.min(16) {
            let e = DVector::from_fn(dim, |j, _| if i == j { 1.0 } else { 0.0 });
            out.push(extend_frame(prev, e));
        }
        for _ in 0..4 {
            out.push(extend_frame(prev, gaussian(&mut rng, dim)));
        }
    }
    out.retain(frame_is_full_rank);
    out
}

/// Random-perturbation hill climbing on the frame.
fn refine_frame(
    start: &DMatrix<f64>,
    start_value: f64,
    points: &[DVector<f64>],
    q: f64,
    cfg: &SearchConfig,
    stream: u64,
) -> (DMatrix<f64>, f64) {
    let mut rng = substream(cfg.seed, "refine", stream);
    let (mut u, mut value) = (start.clone(), start_value);
    let mut sigma = 0.3;
    for _ in 0..cfg.refine_steps {
        let noise = DMatrix::from_fn(u.nrows(), u.ncols(), |_, _| rng.sample::<f64, _>(StandardNormal) * sigma);
        let trial = orthonormal_frame(&u + noise);
        if !frame_is_full_rank(&trial) {
            continue;
        }
        let v = sup_distance(points, &trial, q, cfg.tolerance, value);
        if v < value {
            u = trial;
            value = v;
            sigma = (sigma * 1.3).min(1.0);
        } else {
            sigma *= 0.7;
            if sigma < 1e-6 {
                break;
            }
        }
    }
    (u, value)
}

fn best_frame(dim: usize, k: usize, previous: Option<&DMatrix<f64>>, cloud: &PointCloud, q: f64, cfg: &SearchConfig) -> DMatrix<f64> {
    let pool = candidates(dim, k, previous, cfg);
    let mut scored: Vec<(f64, usize)> = pool
        .par_iter()
        .enumerate()
        .map(|(i, u)| (sup_distance(&cloud.points, u, q, cfg.tolerance, f64::INFINITY), i))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let refined: Vec<(f64, usize, DMatrix<f64>)> = scored
        .iter()
        .take(REFINED)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&(v, i)| {
            let (u, value) = refine_frame(&pool[i], v, &cloud.points, q, cfg, (k * 100_000 + i) as u64);
            (value, i, u)
        })
        .collect();
    refined
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, _, u)| u)
        .unwrap_or_else(|| DMatrix::zeros(dim, k))
}

/// Empirical upper bound on `d_n(body, l_q^N)`.
///
/// Subspaces of every dimension `k ≤ n` are searched in turn, each seeded with extensions
/// of the best `(k−1)`-dimensional one, and the reported value is the running minimum, so
/// the estimate is non-increasing in `n`. The search runs on the body normalized to unit
/// first radius and the result is rescaled, so it is exactly scale-equivariant.
pub fn numeric_width_upper(body: &Body, n: usize, q: LpExponent, cfg: &SearchConfig) -> Result<WidthEstimate> {
    body.validate()?;
    cfg.validate()?;
    let dim = body.dim();
    if dim > cfg.dim_cap {
        return Err(Error::Size(format!("dimension {dim} exceeds the search cap {}", cfg.dim_cap)));
    }
    if !(q.value() >= 1.0 && q.value().is_finite()) {
        return Err(Error::Domain(format!("numeric search needs finite q >= 1, got {q}")));
    }
    if n >= dim {
        return Ok(WidthEstimate::new(0.0, EstimateKind::Upper, "numeric_search", n, q));
    }
    let (scale, unit) = body.normalized();
    let qv = q.value();
    let cloud = extreme_points(&unit, cfg);
    let mut running = f64::INFINITY;
    let mut previous: Option<DMatrix<f64>> = None;
    for k in 0..=n {
        let u = if k == 0 {
            DMatrix::zeros(dim, 0)
        } else {
            best_frame(dim, k, previous.as_ref(), &cloud, qv, cfg)
        };
        running = running.min(refine_sup(&unit, &cloud, &u, qv, cfg));
        previous = Some(u);
    }
    let tol = if cloud.exhaustive { cfg.tolerance } else { 1e-6 };
    Ok(WidthEstimate::new(scale * running, EstimateKind::Upper, "numeric_search", n, q).with_tolerance(scale * tol * running.max(1.0)))
}
