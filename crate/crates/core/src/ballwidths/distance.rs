//! `l_q` distance from a point to a subspace spanned by orthonormal columns.

use nalgebra::{DMatrix, DVector};

use super::types::lp_norm;

/// Subset-enumeration budget for the exact `q = 1` solver.
const L1_SUBSET_CAP: usize = 4096;
const MAX_ITER: usize = 200;

/// Optimal residual `x − U c` together with its `l_q` norm.
#[derive(Debug, Clone)]
pub struct Projection {
    pub distance: f64,
    pub residual: DVector<f64>,
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Lexicographic `k`-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

pub fn lq_distance(x: &DVector<f64>, u: &DMatrix<f64>, q: f64, tol: f64) -> f64 {
    project(x, u, q, tol).distance
}

pub fn project(x: &DVector<f64>, u: &DMatrix<f64>, q: f64, tol: f64) -> Projection {
    let finish = |residual: DVector<f64>| Projection {
        distance: lp_norm(residual.as_slice(), q),
        residual,
    };
    if u.ncols() == 0 {
        return finish(x.clone());
    }
    let c0 = u.tr_mul(x);
    if q == 2.0 {
        return finish(x - u * c0);
    }
    if q == 1.0 && binomial(u.nrows(), u.ncols()) <= L1_SUBSET_CAP {
        return l1_by_vertices(x, u);
    }
    if q < 2.0 {
        finish(irls(x, u, q, c0, tol))
    } else {
        finish(newton(x, u, q, c0, tol))
    }
}

/// An optimal `l_1` residual vanishes on `n` coordinates where the restricted basis is
/// invertible, so checking every such interpolation is exact.
fn l1_by_vertices(x: &DVector<f64>, u: &DMatrix<f64>) -> Projection {
    let (big_n, k) = u.shape();
    let mut best: Option<Projection> = None;
    for rows in combinations(big_n, k) {
        let a = DMatrix::from_fn(k, k, |i, j| u[(rows[i], j)]);
        let b = DVector::from_fn(k, |i, _| x[rows[i]]);
        let Some(c) = a.lu().solve(&b) else { continue };
        let residual = x - u * c;
        let d = residual.iter().map(|v| v.abs()).sum::<f64>();
        if best.as_ref().is_none_or(|p| d < p.distance) {
            best = Some(Projection { distance: d, residual });
        }
    }
    best.unwrap_or_else(|| Projection {
        distance: x.iter().map(|v| v.abs()).sum(),
        residual: x.clone(),
    })
}

fn objective(r: &DVector<f64>, q: f64) -> f64 {
    r.iter().map(|v| v.abs().powf(q)).sum()
}

/// Iteratively reweighted least squares for `1 ≤ q < 2` with a shrinking floor on `|r_i|`.
fn irls(x: &DVector<f64>, u: &DMatrix<f64>, q: f64, c0: DVector<f64>, tol: f64) -> DVector<f64> {
    let scale = x.amax().max(f64::MIN_POSITIVE);
    let mut c = c0;
    let mut r = x - u * &c;
    let mut best_obj = objective(&r, q);
    let mut best_r = r.clone();
    let mut delta = 1e-2 * scale;
    while delta > 1e-13 * scale {
        for _ in 0..MAX_ITER {
            let w = r.map(|v| v.abs().max(delta).powf(q - 2.0));
            let uw = DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * w[i]);
            let lhs = uw.tr_mul(u);
            let rhs = uw.tr_mul(x);
            let Some(next) = lhs.cholesky().map(|ch| ch.solve(&rhs)) else { break };
            let step = (&next - &c).amax();
            c = next;
            r = x - u * &c;
            let obj = objective(&r, q);
            if obj < best_obj {
                best_obj = obj;
                best_r = r.clone();
            }
            if step <= tol * scale {
                break;
            }
        }
        delta *= 0.1;
    }
    best_r
}

/// Damped Newton for the smooth convex case `q > 2`.
fn newton(x: &DVector<f64>, u: &DMatrix<f64>, q: f64, c0: DVector<f64>, tol: f64) -> DVector<f64> {
    let scale = x.amax().max(f64::MIN_POSITIVE);
    let mut c = c0;
    let mut r = x - u * &c;
    let mut obj = objective(&r, q);
    for _ in 0..MAX_ITER {
        let g_inner = r.map(|v| v.signum() * v.abs().powf(q - 1.0));
        let grad = -(u.tr_mul(&g_inner)) * q;
        let h_diag = r.map(|v| v.abs().powf(q - 2.0));
        let uh = DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * h_diag[i]);
        let mut hess = uh.tr_mul(u) * (q * (q - 1.0));
        let ridge = 1e-14 * hess.diagonal().amax().max(scale.powf(q - 2.0) * 1e-12);
        for i in 0..hess.nrows() {
            hess[(i, i)] += ridge;
        }
        let dir = match hess.cholesky() {
            Some(ch) => -ch.solve(&grad),
            None => -grad.clone(),
        };
        let slope = grad.dot(&dir);
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial_c = &c + &dir * step;
            let trial_r = x - u * &trial_c;
            let trial = objective(&trial_r, q);
            if trial <= obj + 1e-4 * step * slope {
                let gain = obj - trial;
                c = trial_c;
                r = trial_r;
                obj = trial;
                accepted = true;
                if gain <= tol * obj.max(f64::MIN_POSITIVE) || (&dir * step).amax() <= tol * scale {
                    return r;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    r
}

/// Gradient in `x` of `dist_q(x, L)`, from the optimal residual.
pub fn distance_gradient(p: &Projection, q: f64) -> DVector<f64> {
    if p.distance == 0.0 {
        return DVector::zeros(p.residual.len());
    }
    let denom = p.distance.powf(q - 1.0);
    p.residual.map(|v| v.signum() * v.abs().powf(q - 1.0) / denom)
}
