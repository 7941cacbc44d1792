use super::hermitian::{hermitian_eigen, Rotation};
use super::matrix::{inner, ComplexMatrix, C64};

const MAX_SWEEPS: usize = 80;

/// Singular values (descending) by one-sided Jacobi on the orientation with
/// fewer columns. Small singular values keep high relative accuracy, which the
/// rank decisions need.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let a = if m.rows() >= m.cols() { m.clone() } else { m.adjoint() };
    let mut cols = a.columns();
    let k = cols.len();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = Rotation::annihilating(alpha, beta, gamma);
                let (left, right) = cols.split_at_mut(q);
                for (xp, xq) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (np, nq) = rot.apply_right(*xp, *xq);
                    *xp = np;
                    *xq = nq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Largest singular value, as the square root of the largest eigenvalue of
/// `M* M` (or `M M*`, whichever is smaller).
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let gram = if m.cols() <= m.rows() { &m.adjoint() * m } else { m * &m.adjoint() };
    match hermitian_eigen(&gram) {
        Ok(eig) => eig.max().max(0.0).sqrt(),
        // The Gram matrix is Hermitian by construction; fall back to Jacobi SVD
        // if the eigensolver ever refuses it.
        Err(_) => singular_values(m).first().copied().unwrap_or(0.0),
    }
}

/// Number of singular values exceeding `tol_rank * sigma_max`.
pub fn rank_with_tolerance(m: &ComplexMatrix, tol_rank: f64) -> usize {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol_rank * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        assert_eq!(spectral_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((spectral_norm(&m) - 2.0).abs() < 1e-15);
        let (s, c) = (0.3_f64.sin(), 0.3_f64.cos());
        let rot = ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]).unwrap();
        assert!((spectral_norm(&rot) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_values_of_rectangular() {
        // [[3, 0, 0], [0, 0, 4]] has singular values {4, 3}
        let m = ComplexMatrix::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, 0.0, 4.0]]).unwrap();
        let sv = singular_values(&m);
        assert_eq!(sv.len(), 2);
        assert!((sv[0] - 4.0).abs() < 1e-15 && (sv[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_with_tolerance(&ComplexMatrix::identity(4), 1e-10), 4);
        let ones = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert_eq!(rank_with_tolerance(&ones, 1e-10), 1);
        assert_eq!(rank_with_tolerance(&ComplexMatrix::zeros(2, 5), 1e-10), 0);
    }

    #[test]
    fn tiny_singular_value_is_resolved() {
        let m = ComplexMatrix::from_diag(&[1.0, 1e-12]);
        let sv = singular_values(&m);
        assert!((sv[1] - 1e-12).abs() < 1e-26);
        assert_eq!(rank_with_tolerance(&m, 1e-10), 1);
        assert_eq!(rank_with_tolerance(&m, 1e-13), 2);
    }
}
