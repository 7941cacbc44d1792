//! Numerical and exact checks of the combinatorial series identities behind
//! the short-time law, the trajectory family `x_tau`, and the two-sided bound
//! on `|e^{-Bt}|_2`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::index::{IndexReport, Tolerances};
use crate::linalg::{matrix_exponential, spectral_norm, vec_norm, ComplexMatrix, SemiDissipativeSystem, C64};
use crate::numerics::{leading_coefficient, Extrapolation};
use crate::propagator::propagator_norm_deficit;
use crate::rational::{binomial, coefficient_prefactor, factorial, int, ratio, to_f64};
use crate::short_time::{default_t_start, dissipated_energy, theoretical_coefficient};

/// `binom(k,m) binom(j-k-1,m) / (binom(k+m,m) binom(j-k-1+m,m))` for
/// `m <= k` and `m <= j-k-1`.
pub fn delta_coefficient(m: usize, j: usize, k: usize) -> Result<BigRational> {
    if m > k || k + 1 + m > j {
        return Err(Error::OutOfDomain { m, j, k });
    }
    let (m, j, k) = (m as u64, j as u64, k as u64);
    let r = j - k - 1;
    Ok(ratio(binomial(k, m) * binomial(r, m), binomial(k + m, m) * binomial(r + m, m)))
}

/// Operands of the series identity: both sides are truncated at total degree
/// `truncation_degree` in `t`.
#[derive(Debug, Clone)]
pub struct SeriesOperand {
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub w: ComplexMatrix,
    pub truncation_degree: usize,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesMode {
    /// Largest `|LHS_d - RHS_d| |t|^d` over degrees `d`.
    Coefficients,
    /// `|sum_d (LHS_d - RHS_d) t^d|` at the given `t`.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResidual {
    pub absolute: f64,
    /// Norm of the largest single retained term.
    pub scale: f64,
    pub relative: f64,
}

/// `(2i+1)! binom(k+i, i) / (k+2i+1)!`, the inner series weights.
fn inner_weight(i: u64, k: u64) -> BigRational {
    ratio(factorial(2 * i + 1) * binomial(k + i, i), factorial(k + 2 * i + 1))
}

/// Rational coefficient of `U^p V W^q` (`p + q = d - 1`) on each side of the identity.
fn monomial_coefficients(m: u64, d: u64, p: u64) -> (BigRational, BigRational) {
    let q = d - 1 - p;
    let lhs = ratio(binomial(d - 1, p), factorial(d));
    let mut rhs = BigRational::zero();
    for i in 0..=m.min(p).min(q) {
        let outer = ratio(One::one(), factorial(2 * i + 1) * binomial(2 * i, i));
        rhs += outer * inner_weight(i, p - i) * inner_weight(i, q - i);
    }
    if d >= 2 * m + 3 && p > m && p + m + 2 <= d {
        let delta = delta_coefficient(m as usize + 1, d as usize, p as usize).expect("inside domain");
        rhs += lhs.clone() * delta;
    }
    (lhs, rhs)
}

/// Checks the identity monomial by monomial in exact rationals; returns the
/// first `(degree, power of U)` that disagrees.
pub fn sum_of_squares_exact(m: usize, truncation_degree: usize) -> Result<Option<(usize, usize)>> {
    check_degree(m, truncation_degree)?;
    for d in 1..=truncation_degree as u64 {
        for p in 0..d {
            let (lhs, rhs) = monomial_coefficients(m as u64, d, p);
            if lhs != rhs {
                return Ok(Some((d as usize, p as usize)));
            }
        }
    }
    Ok(None)
}

fn check_degree(m: usize, degree: usize) -> Result<()> {
    if degree < 2 * m + 3 {
        return Err(Error::Configuration(format!("truncation degree {degree} below 2m+3 = {}", 2 * m + 3)));
    }
    Ok(())
}

/// Evaluates both sides of the series identity with floating-point matrix
/// products, degree by degree, and returns their discrepancy.
///
/// The left side is `sum_j t^j/j! sum_k binom(j-1,k) U^k V W^{j-k-1}`. The right
/// side is assembled from the products of the two inner series for
/// `i = 0..=m` plus the `Delta^{(m+1)}`-weighted remainder.
pub fn sum_of_squares_residual(op: &SeriesOperand, m: usize, mode: SeriesMode) -> Result<SeriesResidual> {
    let deg = op.truncation_degree;
    check_degree(m, deg)?;
    if op.t.abs() > 1.0 || !op.t.is_finite() {
        return Err(Error::InvalidParameter(format!("|t| must be at most 1, got {}", op.t)));
    }
    let n = op.v.ensure_square()?;
    if op.u.rows() != n || op.w.rows() != n || !op.u.is_square() || !op.w.is_square() {
        return Err(Error::Dimension("U, V, W must be square of equal size".into()));
    }
    let up = op.u.powers(deg);
    let wp = op.w.powers(deg);
    let uv: Vec<ComplexMatrix> = up.iter().map(|p| p * &op.v).collect();
    let mono = |p: usize, q: usize| &uv[p] * &wp[q];
    let f = |q: &BigRational| to_f64(q);

    let mut lhs = vec![ComplexMatrix::zeros(n, n); deg + 1];
    let mut rhs = vec![ComplexMatrix::zeros(n, n); deg + 1];
    let mut scale: f64 = 0.0;
    let mut add = |slot: &mut ComplexMatrix, coef: f64, term: &ComplexMatrix, d: usize| {
        let scaled = term.scale_real(coef);
        scale = scale.max(spectral_norm(&scaled) * op.t.abs().powi(d as i32));
        *slot = &*slot + &scaled;
    };

    for d in 1..=deg {
        for p in 0..d {
            let coef = f(&ratio(binomial(d as u64 - 1, p as u64), factorial(d as u64)));
            add(&mut lhs[d], coef, &mono(p, d - 1 - p), d);
        }
    }
    for i in 0..=m {
        let outer = f(&ratio(One::one(), factorial(2 * i as u64 + 1) * binomial(2 * i as u64, i as u64)));
        for k in 0..deg {
            for l in 0..deg {
                let d = 2 * i + 1 + k + l;
                if d > deg {
                    break;
                }
                let left = uv[k + i].scale_real(f(&inner_weight(i as u64, k as u64)));
                let right = wp[l + i].scale_real(f(&inner_weight(i as u64, l as u64)));
                add(&mut rhs[d], outer, &(&left * &right), d);
            }
        }
    }
    for d in (2 * m + 3)..=deg {
        for p in (m + 1)..=(d - m - 2) {
            let delta = delta_coefficient(m + 1, d, p)?;
            let coef = f(&(ratio(binomial(d as u64 - 1, p as u64), factorial(d as u64)) * delta));
            add(&mut rhs[d], coef, &mono(p, d - 1 - p), d);
        }
    }

    let absolute = match mode {
        SeriesMode::Coefficients => (1..=deg)
            .map(|d| spectral_norm(&(&lhs[d] - &rhs[d])) * op.t.abs().powi(d as i32))
            .fold(0.0, f64::max),
        SeriesMode::Sampled => {
            let mut diff = ComplexMatrix::zeros(n, n);
            for d in 1..=deg {
                diff = &diff + &(&lhs[d] - &rhs[d]).scale_real(op.t.powi(d as i32));
            }
            spectral_norm(&diff)
        }
    };
    let relative = if scale > 0.0 { absolute / scale } else { absolute };
    Ok(SeriesResidual { absolute, scale, relative })
}

/// `U_j = (-1)^j sum_k binom(j,k) (B^*)^k B^{j-k}`.
pub fn u_binomial(b: &ComplexMatrix, j: usize) -> ComplexMatrix {
    let n = b.rows();
    let bp = b.powers(j);
    let ap = b.adjoint().powers(j);
    let mut acc = ComplexMatrix::zeros(n, n);
    for k in 0..=j {
        let coef = to_f64(&BigRational::from_integer(binomial(j as u64, k as u64)));
        acc = &acc + &(&ap[k] * &bp[j - k]).scale_real(coef);
    }
    if j % 2 == 1 {
        acc = acc.scale_real(-1.0);
    }
    acc
}

/// `U_j = (-1)^j 2 sum_k binom(j-1,k) (B^*)^k B_H B^{j-1-k}`, `U_0 = I`.
pub fn u_factored(b: &ComplexMatrix, j: usize) -> ComplexMatrix {
    let n = b.rows();
    if j == 0 {
        return ComplexMatrix::identity(n);
    }
    let bh = b.hermitian_part();
    let bp = b.powers(j - 1);
    let ap = b.adjoint().powers(j - 1);
    let mut acc = ComplexMatrix::zeros(n, n);
    for k in 0..j {
        let coef = 2.0 * to_f64(&BigRational::from_integer(binomial(j as u64 - 1, k as u64)));
        acc = &acc + &(&(&ap[k] * &bh) * &bp[j - 1 - k]).scale_real(coef);
    }
    if j % 2 == 1 {
        acc = acc.scale_real(-1.0);
    }
    acc
}

/// Exact `b_1, ..., b_m` of the trajectory family (with `b_0 = 1` implicit).
pub fn tau_coefficients(m: usize) -> Result<Vec<BigRational>> {
    if m == 0 {
        return Err(Error::InvalidParameter("the trajectory family needs m >= 1".into()));
    }
    let mu = m as u64;
    let mut b = vec![int(1)];
    for l in 1..=mu {
        let base = 2 * mu - 2 * l + 1;
        let mut sum = BigRational::zero();
        for k in 1..=l {
            let w = ratio(factorial(base) * binomial(k + mu - l, mu - l), factorial(k + base));
            let term = w * b[(l - k) as usize].clone();
            sum += if (l - k) % 2 == 0 { term } else { -term };
        }
        b.push(if l % 2 == 0 { -sum } else { sum });
    }
    b.remove(0);
    Ok(b)
}

fn rationals_as_strings<S: Serializer>(b: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(b.iter().map(|q| q.to_string()))
}

/// `x_tau = x0 + sum_l b_l tau^l B^l x0` for a kernel vector `x0`.
#[derive(Debug, Clone, Serialize)]
pub struct TauFamily {
    pub m: usize,
    #[serde(serialize_with = "rationals_as_strings")]
    pub b: Vec<BigRational>,
    pub x0: Vec<C64>,
    /// `|sqrt(B_H) B^m x0|^2 / ((2m+1)! binom(2m, m))`.
    pub c1_x0: f64,
}

impl TauFamily {
    /// Requires a unit `x0` with `sqrt(B_H) B^j x0 = 0` for `j < m`.
    pub fn new(sys: &SemiDissipativeSystem, x0: &[C64], m: usize, tol_psd: f64) -> Result<Self> {
        let b = tau_coefficients(m)?;
        if x0.len() != sys.dim() {
            return Err(Error::Dimension(format!("vector of length {} for a system of dimension {}", x0.len(), sys.dim())));
        }
        if (vec_norm(x0) - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("x0 must be a unit vector, |x0| = {}", vec_norm(x0))));
        }
        let root = sys.sqrt_hermitian(tol_psd)?;
        let scale = spectral_norm(&root).max(f64::MIN_POSITIVE);
        let norm_b = sys.norm().max(1.0);
        let mut y = x0.to_vec();
        for power in 0..m {
            let residual = vec_norm(&root.mul_vec(&y));
            if residual > 1e-8 * scale * norm_b.powi(power as i32) {
                return Err(Error::NotInKernel { power, residual });
            }
            y = sys.matrix().mul_vec(&y);
        }
        let c1_x0 = to_f64(&coefficient_prefactor(m as u64)) * vec_norm(&root.mul_vec(&y)).powi(2);
        Ok(Self { m, b, x0: x0.to_vec(), c1_x0 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauVector {
    pub raw: Vec<C64>,
    pub normalized: Vec<C64>,
}

pub fn tau_vector(sys: &SemiDissipativeSystem, fam: &TauFamily, tau: f64) -> Result<TauVector> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!("tau must lie in [0, 1], got {tau}")));
    }
    let mut raw = fam.x0.clone();
    let mut y = fam.x0.clone();
    for (l, b) in fam.b.iter().enumerate() {
        y = sys.matrix().mul_vec(&y);
        let coef = to_f64(b) * tau.powi(l as i32 + 1);
        for (r, yi) in raw.iter_mut().zip(&y) {
            *r += yi * coef;
        }
    }
    let norm = vec_norm(&raw);
    let normalized = raw.iter().map(|z| z / norm).collect();
    Ok(TauVector { raw, normalized })
}

/// `g(x; t) = |e^{-Bt} x|^2 - |x|^2`.
pub fn g_function(sys: &SemiDissipativeSystem, x: &[C64], t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be finite and non-negative, got {t}")));
    }
    let y = matrix_exponential(&sys.matrix().scale_real(-t))?.mul_vec(x);
    Ok(vec_norm(&y).powi(2) - vec_norm(x).powi(2))
}

/// Leading `tau^{2m+1}` coefficient of `-g(x_tau; tau)`, expected to be `2 c1(x0)`.
pub fn verify_family_order(sys: &SemiDissipativeSystem, fam: &TauFamily, tol_psd: f64) -> Result<Extrapolation> {
    let root = sys.sqrt_hermitian(tol_psd)?;
    let f = |tau: f64| {
        let x = tau_vector(sys, fam, tau)?.raw;
        dissipated_energy(sys, &root, &x, tau)
    };
    leading_coefficient(f, 2 * fam.m as u32 + 1, default_t_start(sys).min(1.0))
}

/// Margins of `|P(t)|_2` against `1 - c t^a` on `t_k = t_max 2^-k`.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub a: u32,
    pub c: f64,
    pub t: Vec<f64>,
    /// `|P(t)| - (1 - c t^a)`.
    pub margins: Vec<f64>,
    /// `margin / t^{a+1}`.
    pub ratios: Vec<f64>,
    /// Smallest `K` with `|margin| <= K t^{a+1}` on the samples.
    pub k_bound: f64,
    /// Largest `|ratio|` on the smaller-`t` half over that on the larger-`t` half.
    pub growth: f64,
}

/// Largest `growth` accepted as bounded.
pub const SANDWICH_GROWTH: f64 = 2.0;

pub fn verify_sandwich(
    sys: &SemiDissipativeSystem,
    report: &IndexReport,
    tols: &Tolerances,
    t_max: f64,
    samples: usize,
) -> Result<SandwichReport> {
    if samples < 4 {
        return Err(Error::InsufficientData { needed: 4, available: samples });
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_max must be positive, got {t_max}")));
    }
    let coef = theoretical_coefficient(sys, report, tols)?;
    let (a, c) = (coef.a, coef.c);
    let mut t = Vec::with_capacity(samples);
    let mut margins = Vec::with_capacity(samples);
    let mut ratios = Vec::with_capacity(samples);
    for k in 0..samples {
        let tk = t_max * 0.5f64.powi(k as i32);
        let margin = c * tk.powi(a as i32) - propagator_norm_deficit(sys, tk)?;
        t.push(tk);
        margins.push(margin);
        ratios.push(margin / tk.powi(a as i32 + 1));
    }
    let half = samples / 2;
    let peak = |r: &[f64]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (early, late) = (peak(&ratios[..half]), peak(&ratios[half..]));
    let growth = if early > 0.0 { late / early } else if late > 0.0 { f64::INFINITY } else { 0.0 };
    let k_bound = peak(&ratios);
    if growth > SANDWICH_GROWTH {
        return Err(Error::FailedOrder { growth });
    }
    Ok(SandwichReport { a, c, t, margins, ratios, k_bound, growth })
}

/// `|Delta| <= 1` over the whole domain for `m <= m_max`, `j <= j_max`.
pub fn delta_bounded(m_max: usize, j_max: usize) -> bool {
    (0..=m_max).all(|m| {
        (0..=j_max).all(|j| {
            (m..j.saturating_sub(m)).all(|k| match delta_coefficient(m, j, k) {
                Ok(d) => !d.is_negative() && d <= int(1),
                Err(_) => true,
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::index::compute_index;

    fn sys(b: ComplexMatrix) -> SemiDissipativeSystem {
        SemiDissipativeSystem::new(b).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_coefficient(1, 3, 1).unwrap(), ratio(1.into(), 4.into()));
        assert_eq!(delta_coefficient(2, 5, 2).unwrap(), ratio(1.into(), 36.into()));
        for j in 1..10 {
            for k in 0..j {
                assert_eq!(delta_coefficient(0, j, k).unwrap(), int(1));
            }
        }
        assert!(matches!(delta_coefficient(2, 4, 2), Err(Error::OutOfDomain { .. })));
        assert!(delta_bounded(4, 20));
    }

    #[test]
    fn series_identity_is_exact() {
        for m in 0..=3 {
            assert_eq!(sum_of_squares_exact(m, 2 * m + 8).unwrap(), None, "m = {m}");
        }
        assert!(matches!(sum_of_squares_exact(2, 6), Err(Error::Configuration(_))));
    }

    #[test]
    fn scalar_series() {
        let one = ComplexMatrix::identity(1);
        let op = SeriesOperand { u: one.clone(), v: one.clone(), w: one, truncation_degree: 12, t: 0.5 };
        for mode in [SeriesMode::Coefficients, SeriesMode::Sampled] {
            assert!(sum_of_squares_residual(&op, 0, mode).unwrap().relative <= 1e-13);
        }
    }

    #[test]
    fn series_with_vanishing_outer_factors() {
        let z = ComplexMatrix::zeros(2, 2);
        let v = builtin::envelope();
        let op = SeriesOperand { u: z.clone(), v, w: z, truncation_degree: 9, t: 0.7 };
        assert_eq!(sum_of_squares_residual(&op, 1, SeriesMode::Coefficients).unwrap().absolute, 0.0);
    }

    #[test]
    fn tau_coefficients_small() {
        assert_eq!(tau_coefficients(1).unwrap(), vec![ratio(1.into(), 2.into())]);
        assert_eq!(tau_coefficients(2).unwrap(), vec![ratio(1.into(), 2.into()), ratio(1.into(), 12.into())]);
        for m in 1..=6 {
            assert_eq!(tau_coefficients(m).unwrap()[0], ratio(1.into(), 2.into()));
        }
        assert!(tau_coefficients(0).is_err());
    }

    #[test]
    fn envelope_family() {
        let s = sys(builtin::envelope());
        let x0 = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let fam = TauFamily::new(&s, &x0, 1, 1e-12).unwrap();
        assert!((fam.c1_x0 - 0.0075).abs() < 1e-15);
        let v = tau_vector(&s, &fam, 0.4).unwrap();
        assert!((v.raw[0].re + 3.0 * 0.4 / 20.0).abs() < 1e-15 && v.raw[1] == C64::new(1.0, 0.0));
        assert!((vec_norm(&v.normalized) - 1.0).abs() < 1e-15);
        assert_eq!(tau_vector(&s, &fam, 0.0).unwrap().raw, x0.to_vec());
        let obs = verify_family_order(&s, &fam, 1e-12).unwrap();
        assert!((obs.value / 0.015 - 1.0).abs() < 0.01, "{obs:?}");
    }

    #[test]
    fn g_function_closed_form() {
        let s = sys(builtin::envelope());
        let x = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        for i in 0..=100 {
            let t = 0.1 * i as f64;
            let want = 45.0 / 32.0 * (-t / 5.0).exp() - 9.0 / 16.0 * (-t).exp() + 5.0 / 32.0 * (-9.0 * t / 5.0).exp();
            assert!((g_function(&s, &x, t).unwrap() + 1.0 - want).abs() < 1e-10, "t = {t}");
        }
        let unit = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let g = g_function(&sys(ComplexMatrix::identity(2)), &unit, 0.3).unwrap();
        assert!((g - ((-0.6f64).exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn u_forms_agree() {
        let b = builtin::num2(0.7);
        for j in 0..=10 {
            let d = spectral_norm(&(&u_binomial(&b, j) - &u_factored(&b, j)));
            assert!(d <= 1e-12 * spectral_norm(&u_binomial(&b, j)).max(1.0), "j = {j}: {d}");
        }
        assert_eq!(u_factored(&b, 1), b.hermitian_part().scale_real(-2.0));
    }

    #[test]
    fn sandwich_examples() {
        let tols = Tolerances::default();
        let s = sys(ComplexMatrix::identity(2));
        let r = verify_sandwich(&s, &compute_index(&s, &tols, None).unwrap(), &tols, 0.1, 8).unwrap();
        assert!((r.ratios.last().unwrap() - 0.5).abs() < 0.01, "{r:?}");

        for b in [builtin::num1(1.0), builtin::envelope()] {
            let s = sys(b);
            let r = verify_sandwich(&s, &compute_index(&s, &tols, None).unwrap(), &tols, 0.1, 8).unwrap();
            assert!(r.k_bound.is_finite() && r.growth <= SANDWICH_GROWTH, "{r:?}");
        }
    }
}
