//! Short-time law `|e^{-Bt}|_2 = 1 - c t^a + O(t^{a+1})` with `a = 2 m_HC + 1`:
//! the exact coefficient, fits from sampled curves, and `eps A + C` sweeps.

use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::{compute_index, t_chain, HcIndex, IndexReport, IndexVariant, Tolerances};
use crate::linalg::{
    hermitian_eigen, kernel_basis, spectral_norm, vec_norm, ComplexMatrix, SemiDissipativeSystem, C64,
};
use crate::numerics::{integrate, leading_coefficient, line_fit, Extrapolation};
use crate::propagator::{decay_curve, waiting_time, DecayCurve, TimeGrid};
use crate::rational::{coefficient_prefactor, to_f64, trajectory_prefactor};

/// Relative agreement demanded between the `B`-power and `B_A`-power forms.
pub const FORM_AGREEMENT: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct Coefficient {
    pub m_hc: usize,
    /// `2 m_HC + 1`.
    pub a: u32,
    pub c: f64,
    /// The same coefficient from `(B_A^*)^m B_H B_A^m`.
    pub c_anti_form: f64,
    /// Unit minimizer in `ker(T~~_{m-1})` (an eigenvector of `B_H` for `m = 0`).
    pub minimizer: Vec<C64>,
    pub kernel_dim: usize,
    /// The kernel-projected form is numerically singular, so `c` was set to 0.
    pub degenerate: bool,
}

/// `lambda_min(K^* F K)` and the minimizing unit vector `K v`.
pub fn constrained_min(form: &ComplexMatrix, kernel: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    if kernel.cols() == 0 {
        return Err(Error::EmptyKernel("constrained minimum over an empty subspace".into()));
    }
    if form.rows() != kernel.rows() {
        return Err(Error::Dimension(format!("form is {}x{}, kernel has {} rows", form.rows(), form.cols(), kernel.rows())));
    }
    let gram = &kernel.adjoint() * kernel;
    let defect = (&gram - &ComplexMatrix::identity(kernel.cols())).max_abs();
    if defect > 1e-10 {
        return Err(Error::InvalidParameter(format!("kernel columns are not orthonormal (defect {defect:.3e})")));
    }
    let projected = (&(&kernel.adjoint() * form) * kernel).hermitian_part();
    let eig = hermitian_eigen(&projected)?;
    let x = kernel.mul_vec(&eig.eigenvectors.column(0));
    Ok((eig.min(), x))
}

fn quadratic_form(b: &ComplexMatrix, b_h: &ComplexMatrix, m: usize) -> ComplexMatrix {
    let p = b.powers(m).pop().expect("powers is never empty");
    &(&p.adjoint() * b_h) * &p
}

/// Optimal short-time coefficient `c` and exponent `a`.
///
/// For `m = 0`, `c = lambda_min(B_H)`. Otherwise
/// `c = min <x, (B^*)^m B_H B^m x> / ((2m+1)! binom(2m, m))` over unit `x` in
/// `ker(T~~_{m-1})`, cross-checked against the `B_A`-power form.
pub fn theoretical_coefficient(sys: &SemiDissipativeSystem, report: &IndexReport, tols: &Tolerances) -> Result<Coefficient> {
    let m = report.m_hc.finite().ok_or(Error::NoExpansion)?;
    let a = 2 * m as u32 + 1;
    if m == 0 {
        let eig = sys.hermitian_eigen();
        return Ok(Coefficient {
            m_hc: 0,
            a,
            c: eig.min(),
            c_anti_form: eig.min(),
            minimizer: eig.eigenvectors.column(0),
            kernel_dim: 0,
            degenerate: false,
        });
    }

    let t_prev = t_chain(sys, IndexVariant::TAdjoint, m - 1, tols.psd)?;
    let kernel = kernel_basis(&t_prev, tols.rank)?;
    if kernel.cols() == 0 {
        return Err(Error::EmptyKernel(format!("ker T~~_{} is trivial although m_HC = {m}", m - 1)));
    }
    let form_b = quadratic_form(sys.matrix(), sys.hermitian(), m);
    let form_a = quadratic_form(sys.anti_hermitian(), sys.hermitian(), m);
    let (value_b, minimizer) = constrained_min(&form_b, &kernel)?;
    let (value_a, _) = constrained_min(&form_a, &kernel)?;

    let scale = value_b.abs().max(value_a.abs());
    if (value_b - value_a).abs() > FORM_AGREEMENT * scale {
        return Err(Error::CoefficientMismatch { b_form: value_b, anti_form: value_a });
    }
    let degenerate = value_b <= tols.psd * spectral_norm(&form_b);
    let prefactor = to_f64(&coefficient_prefactor(m as u64));
    let (c, c_anti_form) = if degenerate { (0.0, 0.0) } else { (prefactor * value_b, prefactor * value_a) };
    Ok(Coefficient { m_hc: m, a, c, c_anti_form, minimizer, kernel_dim: kernel.cols(), degenerate })
}

/// `1 - |e^{-Bt} x|^2 = 2 int_0^t |sqrt(B_H) e^{-Bs} x|^2 ds` for unit `x`,
/// evaluated by quadrature so that small values keep full relative accuracy.
pub fn dissipated_energy(sys: &SemiDissipativeSystem, root: &ComplexMatrix, x: &[C64], t: f64) -> Result<f64> {
    let integral = integrate(
        |s| {
            let y = crate::propagator::propagator(sys, s)?.mul_vec(x);
            Ok(vec_norm(&root.mul_vec(&y)).powi(2))
        },
        t,
    )?;
    Ok(2.0 * integral)
}

/// Default first rung of the extrapolation ladder, `min(1/2, 1/(2|B|))`.
pub fn default_t_start(sys: &SemiDissipativeSystem) -> f64 {
    0.5 / sys.norm().max(1.0)
}

fn check_in_kernel(sys: &SemiDissipativeSystem, root: &ComplexMatrix, x0: &[C64], m: usize) -> Result<()> {
    let norm_b = sys.norm().max(1.0);
    let scale = spectral_norm(root).max(f64::MIN_POSITIVE);
    let mut y = x0.to_vec();
    for power in 0..m {
        let residual = vec_norm(&root.mul_vec(&y));
        if residual > 1e-8 * scale * norm_b.powi(power as i32) {
            return Err(Error::NotInKernel { power, residual });
        }
        y = sys.matrix().mul_vec(&y);
    }
    Ok(())
}

/// Extracts the `t^{2m+1}` coefficient of `1 - |e^{-Bt} x0|^2` by Richardson
/// extrapolation. Requires `sqrt(B_H) B^j x0 = 0` for `j < m`.
pub fn solution_norm_expansion_check(sys: &SemiDissipativeSystem, x0: &[C64], m: usize, tol_psd: f64) -> Result<Extrapolation> {
    if x0.len() != sys.dim() {
        return Err(Error::Dimension(format!("vector of length {} for a system of dimension {}", x0.len(), sys.dim())));
    }
    if (vec_norm(x0) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!("x0 must be a unit vector, |x0| = {}", vec_norm(x0))));
    }
    let root = sys.sqrt_hermitian(tol_psd)?;
    check_in_kernel(sys, &root, x0, m)?;
    leading_coefficient(|t| dissipated_energy(sys, &root, x0, t), 2 * m as u32 + 1, default_t_start(sys))
}

/// `2 binom(2m, m) / (2m+1)! * |sqrt(B_H) B^m x0|^2`, the predicted value of
/// [`solution_norm_expansion_check`].
pub fn predicted_trajectory_coefficient(sys: &SemiDissipativeSystem, x0: &[C64], m: usize, tol_psd: f64) -> Result<f64> {
    let root = sys.sqrt_hermitian(tol_psd)?;
    let mut y = x0.to_vec();
    for _ in 0..m {
        y = sys.matrix().mul_vec(&y);
    }
    Ok(to_f64(&trajectory_prefactor(m as u64)) * vec_norm(&root.mul_vec(&y)).powi(2))
}

/// Bounds on `1 - norm` inside which auto-selected fit points must lie.
pub const AUTO_RANGE: (f64, f64) = (1e-10, 1e-2);
/// Bounds on `1 - norm` for explicitly windowed fits.
pub const VALID_RANGE: (f64, f64) = (1e-13, 0.1);
/// Largest relative spread of local log-log slopes in an auto window.
pub const SLOPE_SPREAD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitWindow {
    /// Longest run of points with `1 - norm` in [`AUTO_RANGE`], local slopes
    /// varying by less than [`SLOPE_SPREAD`], spanning at least a factor 2 in `t`.
    Auto,
    Times { t_lo: f64, t_hi: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalFit {
    pub a_fit: f64,
    pub c_fit: f64,
    /// Largest deviation in `log(1 - norm)` from the fitted line.
    pub residual: f64,
    pub indices: Range<usize>,
    pub t_lo: f64,
    pub t_hi: f64,
    pub window_rule: FitWindow,
}

fn auto_window(ts: &[f64], d: &[f64]) -> Option<Range<usize>> {
    let n = ts.len();
    let ok = |i: usize| ts[i] > 0.0 && d[i] >= AUTO_RANGE.0 && d[i] <= AUTO_RANGE.1;
    let slope = |i: usize| (d[i + 1].ln() - d[i].ln()) / (ts[i + 1].ln() - ts[i].ln());
    let mut best: Option<Range<usize>> = None;
    for i in 0..n {
        if !ok(i) {
            continue;
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for j in i + 1..n {
            if !ok(j) {
                break;
            }
            let s = slope(j - 1);
            lo = lo.min(s);
            hi = hi.max(s);
            if hi - lo >= SLOPE_SPREAD * lo.abs().max(hi.abs()) {
                break;
            }
            let len = j + 1 - i;
            if ts[j] >= 2.0 * ts[i] && best.as_ref().is_none_or(|b| len > b.len()) {
                best = Some(i..j + 1);
            }
        }
    }
    best
}

/// Fits `1 - norm = c t^a` by least squares on `(log t, log(1 - norm))`.
pub fn empirical_fit(curve: &DecayCurve, window: FitWindow) -> Result<EmpiricalFit> {
    let ts = &curve.grid.points;
    let d: Vec<f64> = curve.norms.iter().map(|v| 1.0 - v).collect();
    let idx: Vec<usize> = match window {
        FitWindow::Auto => auto_window(ts, &d).map(|r| r.collect()).unwrap_or_default(),
        FitWindow::Times { t_lo, t_hi } => (0..ts.len())
            .filter(|&i| ts[i] >= t_lo && ts[i] <= t_hi && ts[i] > 0.0)
            .filter(|&i| d[i] > VALID_RANGE.0 && d[i] < VALID_RANGE.1)
            .collect(),
    };
    if idx.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, available: idx.len() });
    }
    let xs: Vec<f64> = idx.iter().map(|&i| ts[i].ln()).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| d[i].ln()).collect();
    let fit = line_fit(&xs, &ys)?;
    let (first, last) = (idx[0], idx[idx.len() - 1]);
    Ok(EmpiricalFit {
        a_fit: fit.slope,
        c_fit: fit.intercept.exp(),
        residual: fit.residual,
        indices: first..last + 1,
        t_lo: ts[first],
        t_hi: ts[last],
        window_rule: window,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ShortTimeResult {
    pub m_hc: usize,
    pub a_theory: u32,
    pub c_theory: f64,
    pub degenerate: bool,
    pub a_fit: f64,
    pub c_fit: f64,
    pub fit_window: (f64, f64),
    pub fit_residual: f64,
    pub window_rule: FitWindow,
}

pub fn short_time_result(
    sys: &SemiDissipativeSystem,
    report: &IndexReport,
    curve: &DecayCurve,
    window: FitWindow,
    tols: &Tolerances,
) -> Result<ShortTimeResult> {
    let coef = theoretical_coefficient(sys, report, tols)?;
    let fit = empirical_fit(curve, window)?;
    Ok(ShortTimeResult {
        m_hc: coef.m_hc,
        a_theory: coef.a,
        c_theory: coef.c,
        degenerate: coef.degenerate,
        a_fit: fit.a_fit,
        c_fit: fit.c_fit,
        fit_window: (fit.t_lo, fit.t_hi),
        fit_residual: fit.residual,
        window_rule: fit.window_rule,
    })
}

/// Log grid on which `c t^a` sweeps `1 - norm` from about 1e-11 to 1e-1,
/// bracketing the auto window.
pub fn short_time_grid(a: u32, c: f64, points: usize) -> Result<TimeGrid> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("coefficient must be positive, got {c}")));
    }
    let t = |level: f64| (level / c).powf(1.0 / a as f64);
    TimeGrid::log(t(1e-11), t(1e-1), points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepConfig {
    pub tols: Tolerances,
    /// Points of the per-eps short-time grid.
    pub points: usize,
    /// Bisection accuracy of the waiting time.
    pub tol_t: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { tols: Tolerances::default(), points: 200, tol_t: 1e-6 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub eps: f64,
    pub c_theory: f64,
    pub c_fit: f64,
    pub a_fit: f64,
    pub t0: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonSweep {
    pub m_hc: usize,
    pub a: u32,
    pub entries: Vec<SweepEntry>,
    /// `c_eps = c_tilde |eps|^{2 m_HC}`, from the mean of `log c_eps - 2m log|eps|`.
    pub c_tilde: f64,
    /// Free least-squares slope of `log c_eps` against `log|eps|`, when defined.
    pub slope: Option<f64>,
    pub window_rule: FitWindow,
}

impl EpsilonSweep {
    pub fn eps_values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.eps).collect()
    }

    pub fn c_values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.c_theory).collect()
    }

    pub fn t0_values(&self) -> Vec<Option<f64>> {
        self.entries.iter().map(|e| e.t0).collect()
    }

    /// `eps,m_hc,a,c_theory,c_fit,t0`; an empty `t0` field means not reached.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,m_hc,a,c_theory,c_fit,t0\n");
        for e in &self.entries {
            let t0 = e.t0.map(|t| format!("{t:.16e}")).unwrap_or_default();
            out.push_str(&format!(
                "{:.16e},{},{},{:.16e},{:.16e},{}\n",
                e.eps, self.m_hc, self.a, e.c_theory, e.c_fit, t0
            ));
        }
        out
    }
}

fn check_anti_hermitian(a: &ComplexMatrix) -> Result<()> {
    let tol = 1e-12 * a.max_abs().max(1.0);
    let defect = (a + &a.adjoint()).max_abs();
    if defect > tol {
        return Err(Error::InvalidParameter(format!("A is not anti-Hermitian (|A + A^*| = {defect:.3e})")));
    }
    Ok(())
}

/// Coefficient, empirical fit and waiting time of `eps A + C` for each `eps`.
pub fn epsilon_sweep(a: &ComplexMatrix, c: &ComplexMatrix, eps: &[f64], config: &SweepConfig) -> Result<EpsilonSweep> {
    if eps.is_empty() {
        return Err(Error::InvalidParameter("empty eps list".into()));
    }
    if let Some(bad) = eps.iter().find(|e| **e == 0.0 || !e.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be finite and non-zero, got {bad}")));
    }
    check_anti_hermitian(a)?;
    let tols = &config.tols;

    let base = SemiDissipativeSystem::from_split(a, c, 1.0)?;
    let base_report = compute_index(&base, tols, None)?;
    let m = base_report.m_hc.finite().ok_or(Error::NoExpansion)?;
    let c1 = theoretical_coefficient(&base, &base_report, tols)?.c;

    let entries = eps
        .par_iter()
        .map(|&e| -> Result<SweepEntry> {
            let sys = SemiDissipativeSystem::from_split(a, c, e)?;
            let report = compute_index(&sys, tols, None)?;
            if report.m_hc != HcIndex::Finite(m) {
                return Err(Error::IndexVaries(format!("index {} at eps = 1 but {} at eps = {e}", m, report.m_hc)));
            }
            let coef = theoretical_coefficient(&sys, &report, tols)?;
            let expected = e.abs().powi(2 * m as i32) * c1;
            if (coef.c - expected).abs() > 1e-10 * expected.abs() {
                return Err(Error::ScalingMismatch { eps: e, c_eps: coef.c, expected });
            }
            let grid = short_time_grid(coef.a, coef.c, config.points)?;
            let fit = empirical_fit(&decay_curve(&sys, &grid)?, FitWindow::Auto)?;
            let t0 = waiting_time(&sys, config.tol_t)?.value();
            Ok(SweepEntry { eps: e, c_theory: coef.c, c_fit: fit.c_fit, a_fit: fit.a_fit, t0 })
        })
        .collect::<Result<Vec<_>>>()?;

    let two_m = 2.0 * m as f64;
    let logs: Vec<f64> = entries.iter().map(|e| e.c_theory.ln() - two_m * e.eps.abs().ln()).collect();
    let c_tilde = (logs.iter().sum::<f64>() / logs.len() as f64).exp();
    let xs: Vec<f64> = entries.iter().map(|e| e.eps.abs().ln()).collect();
    let ys: Vec<f64> = entries.iter().map(|e| e.c_theory.ln()).collect();
    let slope = line_fit(&xs, &ys).ok().map(|f| f.slope);

    Ok(EpsilonSweep { m_hc: m, a: 2 * m as u32 + 1, entries, c_tilde, slope, window_rule: FitWindow::Auto })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::linalg::C64;

    fn sys(b: ComplexMatrix) -> SemiDissipativeSystem {
        SemiDissipativeSystem::new(b).unwrap()
    }

    fn coefficient(b: ComplexMatrix) -> Coefficient {
        let s = sys(b);
        let tols = Tolerances::default();
        let r = compute_index(&s, &tols, None).unwrap();
        theoretical_coefficient(&s, &r, &tols).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        let c = coefficient(builtin::envelope());
        assert_eq!(c.a, 3);
        assert!((c.c - 0.0075).abs() < 1e-15);
        let c = coefficient(builtin::num1(1.0));
        assert!((c.c - 1.0 / 12.0).abs() < 1e-14);
        let c = coefficient(builtin::num2(1.0));
        assert_eq!(c.a, 7);
        assert!((c.c * 100_800.0 - 1.0).abs() < 1e-9);
        let c = coefficient(ComplexMatrix::identity(3).scale_real(2.0));
        assert_eq!((c.a, c.c), (1, 2.0));
    }

    #[test]
    fn infinite_index_has_no_expansion() {
        let s = sys(ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap());
        let tols = Tolerances::default();
        let r = compute_index(&s, &tols, None).unwrap();
        assert!(matches!(theoretical_coefficient(&s, &r, &tols), Err(Error::NoExpansion)));
    }

    #[test]
    fn constrained_min_examples() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::default();
        let k = ComplexMatrix::from_columns(3, &[vec![one, zero, zero], vec![zero, one, zero]]);
        let (v, x) = constrained_min(&ComplexMatrix::from_diag(&[3.0, 5.0, 7.0]), &k).unwrap();
        assert!((v - 3.0).abs() < 1e-15);
        assert!((x[0].norm() - 1.0).abs() < 1e-15);
        let (v, _) = constrained_min(&ComplexMatrix::identity(3), &k).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(matches!(constrained_min(&ComplexMatrix::identity(3), &ComplexMatrix::zeros(3, 0)), Err(Error::EmptyKernel(_))));

        // Index-1 family at eps = 1: the form restricted to span{e1, e2} is the identity.
        let s = sys(builtin::num1(1.0));
        let e = |i: usize| (0..4).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect::<Vec<_>>();
        let k = ComplexMatrix::from_columns(4, &[e(0), e(1)]);
        let (v, _) = constrained_min(&quadratic_form(s.matrix(), s.hermitian(), 1), &k).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trajectory_coefficient_envelope() {
        let s = sys(builtin::envelope());
        let x0 = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let r = solution_norm_expansion_check(&s, &x0, 1, 1e-12).unwrap();
        assert!((r.value / 0.06 - 1.0).abs() < 0.01, "{r:?}");
        let p = predicted_trajectory_coefficient(&s, &x0, 1, 1e-12).unwrap();
        assert!((p - 0.06).abs() < 1e-15);
    }

    #[test]
    fn trajectory_precondition() {
        let s = sys(builtin::envelope());
        let x0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(matches!(solution_norm_expansion_check(&s, &x0, 1, 1e-12), Err(Error::NotInKernel { power: 0, .. })));
    }

    #[test]
    fn synthetic_power_law_fit() {
        let grid = TimeGrid::log(0.1, 0.5, 60).unwrap();
        let norms = grid.points.iter().map(|t| 1.0 - 0.25 * t.powi(5)).collect();
        let curve = DecayCurve { grid, norms, system_fingerprint: String::new() };
        let f = empirical_fit(&curve, FitWindow::Times { t_lo: 0.0, t_hi: 1.0 }).unwrap();
        assert!((f.a_fit - 5.0).abs() < 1e-8 && (f.c_fit - 0.25).abs() < 1e-8, "{f:?}");
        let f = empirical_fit(&curve, FitWindow::Auto).unwrap();
        assert!((f.a_fit - 5.0).abs() < 1e-6, "{f:?}");
        let drained = empirical_fit(&curve, FitWindow::Times { t_lo: 10.0, t_hi: 20.0 });
        assert!(matches!(drained, Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn coercive_sweep_is_flat() {
        let a = ComplexMatrix::zeros(2, 2);
        let c = ComplexMatrix::identity(2);
        let s = epsilon_sweep(&a, &c, &[0.5, 1.0, 2.0], &SweepConfig::default()).unwrap();
        assert_eq!(s.m_hc, 0);
        assert!(s.c_values().iter().all(|v| (v - 1.0).abs() < 1e-15));
        assert!((s.c_tilde - 1.0).abs() < 1e-15);
        assert!(epsilon_sweep(&a, &c, &[0.0], &SweepConfig::default()).is_err());
    }
}
