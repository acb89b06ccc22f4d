//! Gauss–Legendre rules and composite integration helpers.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the three-term recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() <= 1e-15 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared, lazily built rule with `n` nodes.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))).clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes mapped to `[a, b]` paired with scaled weights.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Integrates over `[a, b]`, splitting at every breakpoint strictly inside.
    pub fn integrate_split<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, breaks: &[f64], mut f: F) -> f64 {
        let mut total = 0.0;
        let mut left = a;
        for &c in split_points(a, b, breaks).iter().chain(std::iter::once(&b)) {
            total += self.integrate(left, c, &mut f);
            left = c;
        }
        total
    }
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Values `P_0(x), …, P_{n-1}(x)`.
pub fn legendre_values(n: usize, x: f64, out: &mut [f64]) {
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n > 1 {
        out[1] = x;
    }
    for k in 2..n {
        let kf = k as f64;
        out[k] = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
    }
}

/// Sorted, deduplicated breakpoints strictly inside `(a, b)`.
pub fn split_points(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let tol = 1e-14 * (b - a).abs().max(f64::MIN_POSITIVE);
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&c| c > a + tol && c < b - tol).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup_by(|x, y| (*x - *y).abs() <= tol);
    inner
}

/// Nodes per cell and how many geometric levels to resolve toward a singular end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub grading_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes: 16,
            grading_depth: 48,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self, r: u32) -> Result<()> {
        if self.nodes < r as usize + 2 {
            return Err(Error::Validation(format!(
                "quadrature needs at least r + 2 = {} nodes per cell, got {}",
                r + 2,
                self.nodes
            )));
        }
        if self.grading_depth == 0 {
            return Err(Error::Validation("grading depth must be positive".into()));
        }
        Ok(())
    }

    pub fn rule(&self) -> Arc<GaussLegendre> {
        GaussLegendre::cached(self.nodes)
    }

    pub fn refined(&self) -> Self {
        QuadratureSpec {
            nodes: self.nodes * 2,
            grading_depth: self.grading_depth + 8,
        }
    }
}

/// Integral over `[a, b]` with geometric panels clustered toward both ends.
///
/// Meant for integrands that are smooth inside but lose regularity at the endpoints,
/// e.g. `(x(1-x))^a` with non-integer `a`.
pub fn integrate_graded<F: FnMut(f64) -> f64>(rule: &GaussLegendre, a: f64, b: f64, levels: u32, mut f: F) -> f64 {
    let mut total = 0.0;
    let mut h = (b - a) / 2.0;
    for _ in 0..levels {
        let inner = h / 2.0;
        total += rule.integrate(a + inner, a + h, &mut f);
        total += rule.integrate(b - h, b - inner, &mut f);
        h = inner;
    }
    total += rule.integrate(a, a + h, &mut f);
    total += rule.integrate(b - h, b, &mut f);
    total
}
