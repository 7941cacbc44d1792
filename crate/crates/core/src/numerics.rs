//! Scalar numerics: Richardson extrapolation, Gauss-Legendre quadrature and
//! straight-line least squares.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Outcome of [`leading_coefficient`].
#[derive(Debug, Clone, Serialize)]
pub struct Extrapolation {
    pub value: f64,
    /// Diagonal estimates `R_{k,k}`, one per ladder step.
    pub estimates: Vec<f64>,
    /// Smallest sample point used.
    pub t_final: f64,
}

pub const MAX_LEVELS: usize = 20;
pub const AGREEMENT: f64 = 5e-3;

/// Leading coefficient `c` of `f(t) = c t^a + O(t^{a+1})`.
///
/// Samples `q(t) = f(t) / t^a` at `t_k = t_start 2^-k`, `k <= 20`, and runs a
/// Richardson table assuming an error expansion in integer powers of `t`. Stops
/// once three consecutive diagonal estimates agree to 0.5%.
pub fn leading_coefficient<F>(f: F, a: u32, t_start: f64) -> Result<Extrapolation>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(t_start > 0.0 && t_start.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_start must be positive, got {t_start}")));
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut estimates = Vec::new();
    for k in 0..=MAX_LEVELS {
        let t = t_start * 0.5_f64.powi(k as i32);
        let mut row = vec![f(t)? / t.powi(a as i32)];
        for j in 1..=k {
            let p = 2f64.powi(j as i32);
            let prev = &rows[k - 1];
            row.push((p * row[j - 1] - prev[j - 1]) / (p - 1.0));
        }
        estimates.push(row[k]);
        rows.push(row);
        if estimates.len() >= 3 {
            let last = &estimates[estimates.len() - 3..];
            let hi = last.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = last.iter().copied().fold(f64::INFINITY, f64::min);
            if hi - lo <= AGREEMENT * last[2].abs() {
                return Ok(Extrapolation { value: last[2], estimates, t_final: t });
            }
        }
    }
    Err(Error::ExtrapolationFailed { estimates })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub const QUADRATURE_NODES: usize = 24;

/// `int_0^t f(s) ds` by a single Gauss-Legendre panel.
pub fn integrate<F>(f: F, t: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (nodes, weights) = gauss_legendre(QUADRATURE_NODES);
    let half = 0.5 * t;
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        sum += w * f(half * (x + 1.0))?;
    }
    Ok(half * sum)
}

/// Least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation of a data point from the line.
    pub residual: f64,
}

pub fn line_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() {
        return Err(Error::Dimension(format!("{} abscissae but {} ordinates", n, ys.len())));
    }
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, available: n });
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).abs()).fold(0.0, f64::max);
    Ok(LineFit { slope, intercept, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_recovers_cubic_coefficient() {
        let r = leading_coefficient(|t| Ok(0.25 * t.powi(3) + 3.0 * t.powi(4) - t.powi(6)), 3, 0.5).unwrap();
        assert!((r.value - 0.25).abs() < 1e-3 * 0.25, "{r:?}");
    }

    #[test]
    fn richardson_reports_failure() {
        // Wrong order: q(t) = 1/t has no limit.
        let r = leading_coefficient(|t| Ok(t * t), 3, 1.0);
        assert!(matches!(r, Err(Error::ExtrapolationFailed { .. })));
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(24);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(46)).sum();
        assert!((i - 2.0 / 47.0).abs() < 1e-14);
        let v = integrate(|s| Ok(s.exp()), 2.0).unwrap();
        assert!((v - (2f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn line_fit_exact() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let f = line_fit(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15 && (f.intercept + 1.0).abs() < 1e-15);
        assert!(matches!(line_fit(&[1.0], &[1.0]), Err(Error::InsufficientData { .. })));
    }
}
