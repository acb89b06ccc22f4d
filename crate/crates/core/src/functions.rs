//! Univariate test functions with analytic derivatives.

use serde::{Deserialize, Serialize};

/// Dense polynomial in the monomial basis, lowest degree first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    pub fn nth_derivative(&self, order: u32) -> Poly {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly(
            (0..n)
                .map(|k| self.0.get(k).copied().unwrap_or(0.0) + other.0.get(k).copied().unwrap_or(0.0))
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Poly {
        Poly(self.0.iter().map(|&a| a * c).collect())
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::constant(1.0), |acc, _| acc.mul(self))
    }
}

/// A function on (a subset of) the real line that the approximation and norm code can
/// sample. Derivatives are optional; norms of the `r`-th derivative need them.
pub trait TestFunction: Send + Sync {
    fn value(&self, x: f64) -> f64;

    /// The derivative of the given order, or `None` if it is not available.
    fn derivative(&self, order: u32, x: f64) -> Option<f64>;

    /// Closed interval outside of which the function vanishes; `None` for global support.
    fn support(&self) -> Option<(f64, f64)> {
        None
    }

    /// Points where the function (or a derivative) is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        self.support().map(|(a, b)| vec![a, b]).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl TestFunction for Zero {
    fn value(&self, _x: f64) -> f64 {
        0.0
    }

    fn derivative(&self, _order: u32, _x: f64) -> Option<f64> {
        Some(0.0)
    }

    fn support(&self) -> Option<(f64, f64)> {
        Some((0.0, 0.0))
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl TestFunction for Poly {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn derivative(&self, order: u32, x: f64) -> Option<f64> {
        Some(self.nth_derivative(order).eval(x))
    }
}

/// `factor · inner`.
pub struct Scaled<F> {
    pub factor: f64,
    pub inner: F,
}

impl<F: TestFunction> TestFunction for Scaled<F> {
    fn value(&self, x: f64) -> f64 {
        self.factor * self.inner.value(x)
    }

    fn derivative(&self, order: u32, x: f64) -> Option<f64> {
        self.inner.derivative(order, x).map(|d| self.factor * d)
    }

    fn support(&self) -> Option<(f64, f64)> {
        self.inner.support()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

impl<F: TestFunction + ?Sized> TestFunction for &F {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }

    fn derivative(&self, order: u32, x: f64) -> Option<f64> {
        (**self).derivative(order, x)
    }

    fn support(&self) -> Option<(f64, f64)> {
        (**self).support()
    }

    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

impl<F: TestFunction + ?Sized> TestFunction for Box<F> {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }

    fn derivative(&self, order: u32, x: f64) -> Option<f64> {
        (**self).derivative(order, x)
    }

    fn support(&self) -> Option<(f64, f64)> {
        (**self).support()
    }

    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

/// A plain closure without derivative information.
pub struct ValueOnly<G>(pub G);

impl<G: Fn(f64) -> f64 + Send + Sync> TestFunction for ValueOnly<G> {
    fn value(&self, x: f64) -> f64 {
        (self.0)(x)
    }

    fn derivative(&self, order: u32, x: f64) -> Option<f64> {
        (order == 0).then(|| (self.0)(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_algebra() {
        let u = Poly(vec![0.0, 1.0, -1.0]); // x(1 - x)
        let sq = u.pow(2);
        assert_eq!(sq.0, vec![0.0, 0.0, 1.0, -2.0, 1.0]);
        assert_eq!(sq.derivative().0, vec![0.0, 2.0, -6.0, 4.0]);
        assert_eq!(sq.eval(0.5), 1.0 / 16.0);
        assert_eq!(u.add(&Poly::constant(1.0)).eval(2.0), -1.0);
    }

    #[test]
    fn scaled_functions_scale_derivatives() {
        let f = Scaled {
            factor: 3.0,
            inner: Poly(vec![1.0, 2.0]),
        };
        assert_eq!(f.value(1.0), 9.0);
        assert_eq!(f.derivative(1, 0.0), Some(6.0));
        assert_eq!(ValueOnly(|x: f64| x).derivative(1, 0.0), None);
    }
}
