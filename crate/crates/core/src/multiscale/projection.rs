//! Local `L_2` projection onto polynomials of degree `< r` in an orthonormal
//! shifted-Legendre basis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{legendre_values, split_points, GaussLegendre};

/// A polynomial on `[a, b]` stored by its orthonormal Legendre coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalPoly {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

impl LocalPoly {
    pub fn zero(a: f64, b: f64, terms: usize) -> Self {
        LocalPoly {
            a,
            b,
            coeffs: vec![0.0; terms],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut buf = [0.0f64; 16];
        let mut big;
        let vals: &mut [f64] = if self.coeffs.len() <= buf.len() {
            &mut buf[..self.coeffs.len()]
        } else {
            big = vec![0.0; self.coeffs.len()];
            &mut big
        };
        basis_values(self.a, self.b, x, vals);
        vals.iter().zip(&self.coeffs).map(|(p, c)| p * c).sum()
    }

    /// `L_2` norm on `[a, b]`, which by orthonormality is the coefficient norm.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Orthonormal basis `φ_k(x) = √((2k+1)/(b−a)) P_k(2(x−a)/(b−a) − 1)`, `k < out.len()`.
pub fn basis_values(a: f64, b: f64, x: f64, out: &mut [f64]) {
    let h = b - a;
    let y = 2.0 * (x - a) / h - 1.0;
    legendre_values(out.len(), y, out);
    for (k, v) in out.iter_mut().enumerate() {
        *v *= ((2 * k + 1) as f64 / h).sqrt();
    }
}

/// Coefficients of the `L_2(a, b)` projection of `f` onto degree `≤ degree`.
pub fn l2_project(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    degree: usize,
    rule: &GaussLegendre,
    breaks: &[f64],
) -> Result<LocalPoly> {
    if rule.len() < degree + 2 {
        return Err(Error::Numeric(format!(
            "{} quadrature nodes cannot project onto degree {degree}",
            rule.len()
        )));
    }
    let terms = degree + 1;
    let mut coeffs = vec![0.0; terms];
    let mut phi = vec![0.0; terms];
    let mut knots = vec![a];
    knots.extend(split_points(a, b, breaks));
    knots.push(b);
    for w in knots.windows(2) {
        for (x, wt) in rule.mapped(w[0], w[1]) {
            let fx = f(x);
            basis_values(a, b, x, &mut phi);
            for (c, p) in coeffs.iter_mut().zip(&phi) {
                *c += wt * fx * p;
            }
        }
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numeric(format!("projection on ({a}, {b}) is not finite")));
    }
    Ok(LocalPoly { a, b, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn residual_l2(f: &dyn Fn(f64) -> f64, p: &LocalPoly, rule: &GaussLegendre) -> f64 {
        rule.integrate(p.a, p.b, |x| (f(x) - p.eval(x)).powi(2)).sqrt()
    }

    #[test]
    fn reference_projections() {
        let rule = GaussLegendre::new(12);
        let c = l2_project(&|_| 7.0, 0.0, 1.0, 2, &rule, &[]).unwrap();
        assert_relative_eq!(c.eval(0.3), 7.0, epsilon = 1e-13);
        let lin = |x: f64| x;
        let p = l2_project(&lin, 0.0, 1.0, 0, &rule, &[]).unwrap();
        assert_relative_eq!(p.coeffs[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(residual_l2(&lin, &p, &rule), 1.0 / 12f64.sqrt(), epsilon = 1e-14);
        let sq = |x: f64| x * x;
        let p = l2_project(&sq, 0.0, 1.0, 1, &rule, &[]).unwrap();
        assert_relative_eq!(residual_l2(&sq, &p, &rule), 1.0 / (6.0 * 5f64.sqrt()), epsilon = 1e-14);
    }

    #[test]
    fn kinks_are_resolved_by_breaks() {
        let rule = GaussLegendre::new(8);
        let f = |x: f64| (x - 0.3).abs();
        let p = l2_project(&f, 0.0, 1.0, 0, &rule, &[0.3]).unwrap();
        // mean of |x − 0.3| on [0, 1] is (0.09 + 0.49) / 2
        assert_relative_eq!(p.coeffs[0], 0.29, epsilon = 1e-14);
    }

    #[test]
    fn too_few_nodes() {
        let rule = GaussLegendre::new(2);
        assert!(l2_project(&|x| x, 0.0, 1.0, 1, &rule, &[]).is_err());
    }
}
