//! Propagator norm `|e^{-Bt}|_2` on time grids, waiting times and tail fits.

use std::fmt::Write as _;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{
    general_eigenvalues, hermitian_eigen, matrix_exponential, spectral_norm, ComplexMatrix, SemiDissipativeSystem,
};
use crate::numerics::{gauss_legendre, line_fit, QUADRATURE_NODES};

/// Slack allowed in the non-increase check between consecutive grid points.
pub const MONOTONE_SLACK: f64 = 1e-10;
/// Slack allowed above 1 for a sampled norm.
pub const NORM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    pub points: Vec<f64>,
    pub spacing: Spacing,
    pub t_min: f64,
    pub t_max: f64,
}

impl TimeGrid {
    pub fn linear(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        check_range(t_min, t_max, points)?;
        let step = (t_max - t_min) / (points - 1) as f64;
        let mut pts: Vec<f64> = (0..points).map(|i| t_min + step * i as f64).collect();
        pts[points - 1] = t_max;
        Self::explicit(pts).map(|g| TimeGrid { spacing: Spacing::Linear, ..g })
    }

    pub fn log(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        check_range(t_min, t_max, points)?;
        if t_min <= 0.0 {
            return Err(Error::InvalidGrid(format!("logarithmic grid needs t_min > 0, got {t_min}")));
        }
        let (a, b) = (t_min.ln(), t_max.ln());
        let step = (b - a) / (points - 1) as f64;
        let mut pts: Vec<f64> = (0..points).map(|i| (a + step * i as f64).exp()).collect();
        pts[0] = t_min;
        pts[points - 1] = t_max;
        Self::explicit(pts).map(|g| TimeGrid { spacing: Spacing::Log, ..g })
    }

    /// Arbitrary strictly increasing non-negative sample times.
    pub fn explicit(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("grid has no points".into()));
        }
        if points.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidGrid("grid points must be finite and non-negative".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("grid points must be strictly increasing".into()));
        }
        let (t_min, t_max) = (points[0], points[points.len() - 1]);
        Ok(Self { points, spacing: Spacing::Explicit, t_min, t_max })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_range(t_min: f64, t_max: f64, points: usize) -> Result<()> {
    if points < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 points, got {points}")));
    }
    if !(t_min.is_finite() && t_max.is_finite() && t_min >= 0.0 && t_min < t_max) {
        return Err(Error::InvalidGrid(format!("need 0 <= t_min < t_max, got [{t_min}, {t_max}]")));
    }
    Ok(())
}

/// `e^{-Bt}`.
pub fn propagator(sys: &SemiDissipativeSystem, t: f64) -> Result<ComplexMatrix> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be finite and non-negative, got {t}")));
    }
    matrix_exponential(&sys.matrix().scale_real(-t))
}

/// `|e^{-Bt}|_2`, unclamped.
pub fn propagator_norm_at(sys: &SemiDissipativeSystem, t: f64) -> Result<f64> {
    Ok(spectral_norm(&propagator(sys, t)?))
}

/// `1 - |e^{-Bt}|_2` without cancellation.
///
/// Uses `I - P(t)^* P(t) = 2 int_0^t P(s)^* B_H P(s) ds`, so the deficit is
/// `lambda_min` of a quadrature sum and keeps its relative accuracy for small `t`.
pub fn propagator_norm_deficit(sys: &SemiDissipativeSystem, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be finite and non-negative, got {t}")));
    }
    let n = sys.dim();
    let (nodes, weights) = gauss_legendre(QUADRATURE_NODES);
    let half = 0.5 * t;
    let mut acc = ComplexMatrix::zeros(n, n);
    for (x, w) in nodes.iter().zip(&weights) {
        let p = propagator(sys, half * (x + 1.0))?;
        let term = &(&p.adjoint() * sys.hermitian()) * &p;
        acc = &acc + &term.scale_real(2.0 * half * w);
    }
    let squared = hermitian_eigen(&acc.hermitian_part())?.min().max(0.0);
    // 1 - sqrt(1 - d) = d / (1 + sqrt(1 - d))
    Ok(squared / (1.0 + (1.0 - squared).max(0.0).sqrt()))
}

/// SHA-256 over the little-endian bytes of `(rows, cols, re, im, ...)`, hex encoded.
pub fn fingerprint(m: &ComplexMatrix) -> String {
    let mut h = Sha256::new();
    h.update((m.rows() as u64).to_le_bytes());
    h.update((m.cols() as u64).to_le_bytes());
    for z in m.as_slice() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayCurve {
    pub grid: TimeGrid,
    pub norms: Vec<f64>,
    pub system_fingerprint: String,
}

impl DecayCurve {
    /// `t,norm` rows with 17 significant digits and LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,norm\n");
        for (t, v) in self.grid.points.iter().zip(&self.norms) {
            let _ = writeln!(out, "{t:.16e},{v:.16e}");
        }
        out
    }

    /// Validates the range and non-increase invariants of a sampled curve.
    pub fn check(&self) -> Result<()> {
        for (&t, &v) in self.grid.points.iter().zip(&self.norms) {
            // Exact zeros only arise from underflow at very large times.
            if !(v.is_finite() && (0.0..=1.0 + NORM_SLACK).contains(&v)) {
                return Err(Error::NormOutOfRange { t, norm: v });
            }
        }
        for (i, w) in self.norms.windows(2).enumerate() {
            if w[1] > w[0] + MONOTONE_SLACK {
                return Err(Error::NotMonotone { t: self.grid.points[i + 1], prev: w[0], next: w[1] });
            }
        }
        Ok(())
    }
}

/// Samples the propagator norm at every grid point, each from its own matrix
/// exponential, and checks `0 <= norm <= 1` and non-increase.
pub fn decay_curve(sys: &SemiDissipativeSystem, grid: &TimeGrid) -> Result<DecayCurve> {
    let norms = grid.points.par_iter().map(|&t| propagator_norm_at(sys, t)).collect::<Result<Vec<_>>>()?;
    let curve = DecayCurve { grid: grid.clone(), norms, system_fingerprint: fingerprint(sys.matrix()) };
    curve.check()?;
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WaitingTime {
    Reached { t0: f64 },
    /// The norm was still above the threshold at `hi`, the horizon.
    NotReached { lo: f64, hi: f64 },
}

impl WaitingTime {
    pub fn value(self) -> Option<f64> {
        match self {
            WaitingTime::Reached { t0 } => Some(t0),
            WaitingTime::NotReached { .. } => None,
        }
    }
}

/// `max(100, 100 / lambda)` with `lambda = min Re(sigma(B))` when positive.
pub fn default_horizon(sys: &SemiDissipativeSystem) -> Result<f64> {
    let rate = general_eigenvalues(sys.matrix())?.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    Ok(if rate > 0.0 { (100.0 / rate).max(100.0) } else { 100.0 })
}

/// Smallest `t` with `|e^{-Bt}|_2 <= 1/e`, to within `tol_t`.
pub fn waiting_time(sys: &SemiDissipativeSystem, tol_t: f64) -> Result<WaitingTime> {
    let horizon = default_horizon(sys)?;
    time_to_threshold(sys, (-1.0f64).exp(), tol_t, horizon)
}

/// Smallest `t <= horizon` with `|e^{-Bt}|_2 <= threshold`: doubling from
/// `t = 1` to bracket, then bisection.
pub fn time_to_threshold(sys: &SemiDissipativeSystem, threshold: f64, tol_t: f64, horizon: f64) -> Result<WaitingTime> {
    if !(tol_t > 0.0) {
        return Err(Error::InvalidParameter(format!("tol_t must be positive, got {tol_t}")));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter(format!("horizon must be positive, got {horizon}")));
    }
    let above = |t: f64| -> Result<bool> { Ok(propagator_norm_at(sys, t)? > threshold) };
    let mut lo = 0.0;
    let mut hi = 1.0f64.min(horizon);
    while above(hi)? {
        if hi >= horizon {
            return Ok(WaitingTime::NotReached { lo, hi });
        }
        lo = hi;
        hi = (2.0 * hi).min(horizon);
    }
    while hi - lo > tol_t {
        let mid = 0.5 * (lo + hi);
        if above(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(WaitingTime::Reached { t0: 0.5 * (lo + hi) })
}

/// `|P(t)| ~ c_star e^{-mu t}` fitted on a window of a curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit {
    pub c_star: f64,
    pub mu: f64,
    pub window: Range<usize>,
    /// Largest absolute deviation in `log norm`.
    pub residual: f64,
}

pub fn tail_fit(curve: &DecayCurve, window: Range<usize>) -> Result<TailFit> {
    if window.end > curve.norms.len() || window.start >= window.end {
        return Err(Error::InvalidParameter(format!("window {window:?} outside a curve of {} points", curve.norms.len())));
    }
    if window.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, available: window.len() });
    }
    let ts = &curve.grid.points[window.clone()];
    let norms = &curve.norms[window.clone()];
    if let Some((i, &v)) = norms.iter().enumerate().find(|(_, v)| **v <= 0.0) {
        return Err(Error::NormOutOfRange { t: ts[i], norm: v });
    }
    let logs: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let fit = line_fit(ts, &logs)?;
    Ok(TailFit { c_star: fit.intercept.exp(), mu: -fit.slope, window, residual: fit.residual })
}
