//! Least-squares fit of `y = a e^{b x} + c`.
//!
//! For fixed `b` the model is linear in `(a, c)`, so the residual is profiled
//! over `b` alone: a coarse scan followed by golden-section refinement.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Residual sum of squares.
    pub rss: f64,
}

impl ExpFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.a * (self.b * x).exp() + self.c
    }
}

fn linear_part(x: &[f64], y: &[f64], b: f64) -> Option<(f64, f64, f64)> {
    let n = x.len() as f64;
    let e: Vec<f64> = x.iter().map(|&xi| (b * xi).exp()).collect();
    let se: f64 = e.iter().sum();
    let see: f64 = e.iter().map(|v| v * v).sum();
    let sy: f64 = y.iter().sum();
    let sey: f64 = e.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = see * n - se * se;
    if det.abs() <= 1e-300 || !det.is_finite() {
        return None;
    }
    let a = (sey * n - se * sy) / det;
    let c = (see * sy - se * sey) / det;
    let rss = e
        .iter()
        .zip(y)
        .map(|(ei, yi)| (yi - a * ei - c).powi(2))
        .sum();
    Some((a, c, rss))
}

/// Fits with `b` searched in `[b_lo, b_hi]`.
pub fn fit_exponential_in(x: &[f64], y: &[f64], b_lo: f64, b_hi: f64) -> Result<ExpFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::FitFailure(format!(
            "need at least 3 paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let profile = |b: f64| linear_part(x, y, b).map_or(f64::INFINITY, |(_, _, r)| r);

    const GRID: usize = 2000;
    let step = (b_hi - b_lo) / GRID as f64;
    let (best, _) = (0..=GRID)
        .map(|i| b_lo + step * i as f64)
        .map(|b| (b, profile(b)))
        .fold((b_lo, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });

    let (mut lo, mut hi) = ((best - step).max(b_lo), (best + step).min(b_hi));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut m1 = hi - ratio * (hi - lo);
    let mut m2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (profile(m1), profile(m2));
    for _ in 0..200 {
        if f1 < f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - ratio * (hi - lo);
            f1 = profile(m1);
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + ratio * (hi - lo);
            f2 = profile(m2);
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let b = 0.5 * (lo + hi);
    let (a, c, rss) = linear_part(x, y, b)
        .ok_or_else(|| Error::FitFailure("degenerate design at optimum".into()))?;
    Ok(ExpFit { a, b, c, rss })
}

/// Decaying-exponential fit with `b` in `[-5, 0)`.
pub fn fit_exponential(x: &[f64], y: &[f64]) -> Result<ExpFit> {
    fit_exponential_in(x, y, -5.0, -1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_parameters() {
        let x: Vec<f64> = (2..=30).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|&n| -4.11 * (-0.4633 * n).exp() + 2.493).collect();
        let fit = fit_exponential(&x, &y).unwrap();
        assert!((fit.a + 4.11).abs() < 1e-6, "{fit:?}");
        assert!((fit.b + 0.4633).abs() < 1e-8);
        assert!((fit.c - 2.493).abs() < 1e-8);
        assert!(fit.rss < 1e-20);
    }

    #[test]
    fn too_few_points() {
        assert!(fit_exponential(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }
}
