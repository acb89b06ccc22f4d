//! Log-log least-squares rates over the large-`n` end of a sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which budgets enter the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum WindowPolicy {
    /// Drop this fraction of the smallest budgets (rounded down).
    DropSmallest { fraction: f64 },
    /// Keep budgets in `[n_min, n_max]`.
    Range { n_min: f64, n_max: f64 },
    All,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        WindowPolicy::DropSmallest { fraction: 0.25 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Slope of `log2(value)` against `log2(n)`.
    pub slope: f64,
    pub intercept: f64,
    /// Smallest and largest budget used.
    pub window: (f64, f64),
    /// RMS of the fit residuals, in `log2` units.
    pub residual: f64,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 4;

/// Least-squares line through `(log2 n, log2 value)` over the window picked by `policy`.
///
/// Needs at least four pairs overall, positive values and budgets, and two distinct
/// budgets inside the window.
pub fn fit_rate(pairs: &[(f64, f64)], policy: WindowPolicy) -> Result<RateFit> {
    if pairs.len() < MIN_FIT_POINTS {
        return Err(Error::Domain(format!(
            "rate fit needs at least {MIN_FIT_POINTS} pairs, got {}",
            pairs.len()
        )));
    }
    if let Some(&(n, v)) = pairs.iter().find(|&&(n, v)| !(n > 0.0 && v > 0.0 && n.is_finite() && v.is_finite())) {
        return Err(Error::Domain(format!("rate fit needs positive finite pairs, got ({n}, {v})")));
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let window: Vec<(f64, f64)> = match policy {
        WindowPolicy::All => sorted,
        WindowPolicy::DropSmallest { fraction } => {
            if !(0.0..1.0).contains(&fraction) {
                return Err(Error::Validation(format!("drop fraction {fraction} outside [0, 1)")));
            }
            let drop = (fraction * sorted.len() as f64).floor() as usize;
            sorted.split_off(drop)
        }
        WindowPolicy::Range { n_min, n_max } => sorted.into_iter().filter(|&(n, _)| n >= n_min && n <= n_max).collect(),
    };
    let xs: Vec<f64> = window.iter().map(|p| p.0.log2()).collect();
    let ys: Vec<f64> = window.iter().map(|p| p.1.log2()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if xs.len() < 2 || sxx <= 0.0 {
        return Err(Error::Domain("rate fit window holds fewer than two distinct budgets".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(RateFit {
        slope,
        intercept,
        window: (window[0].0, window[window.len() - 1].0),
        residual: (rss / k).sqrt(),
        points: window.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn budgets() -> Vec<f64> {
        (4..=10).map(|k| (1u32 << k) as f64).collect()
    }

    #[test]
    fn exact_power() {
        let pairs: Vec<_> = budgets().into_iter().map(|n| (n, n.powf(-0.75))).collect();
        let f = fit_rate(&pairs, WindowPolicy::default()).unwrap();
        assert_relative_eq!(f.slope, -0.75, epsilon = 1e-12);
        assert!(f.residual < 1e-12);
        // 7 points, floor(7/4) = 1 dropped
        assert_eq!(f.points, 6);
        assert_eq!(f.window, (32.0, 1024.0));
    }

    #[test]
    fn constant_and_scaled() {
        let c: Vec<_> = budgets().into_iter().map(|n| (n, 2.5)).collect();
        assert_relative_eq!(fit_rate(&c, WindowPolicy::All).unwrap().slope, 0.0, epsilon = 1e-12);
        let s: Vec<_> = budgets().into_iter().map(|n| (n, 3.0 * n.powf(-1.0 / 3.0))).collect();
        let f = fit_rate(&s, WindowPolicy::All).unwrap();
        assert_relative_eq!(f.slope, -1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(f.intercept, 3f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let few = [(1.0, 1.0), (2.0, 0.5), (4.0, 0.25)];
        assert!(matches!(fit_rate(&few, WindowPolicy::All), Err(Error::Domain(_))));
        let neg = [(1.0, 1.0), (2.0, 0.5), (4.0, 0.0), (8.0, 0.1)];
        assert!(matches!(fit_rate(&neg, WindowPolicy::All), Err(Error::Domain(_))));
        let flat = [(4.0, 1.0), (4.0, 0.5), (4.0, 0.2), (4.0, 0.1)];
        assert!(matches!(fit_rate(&flat, WindowPolicy::All), Err(Error::Domain(_))));
    }

    #[test]
    fn range_window() {
        let pairs: Vec<_> = budgets().into_iter().map(|n| (n, if n < 100.0 { 1.0 } else { 1.0 / n })).collect();
        let f = fit_rate(&pairs, WindowPolicy::Range { n_min: 128.0, n_max: 1024.0 }).unwrap();
        assert_relative_eq!(f.slope, -1.0, epsilon = 1e-12);
        assert_eq!(f.points, 4);
    }
}
