//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, plus the
//! PSD square root and kernel bases built on top of it.
//!
//! Jacobi is used instead of tridiagonal QR because the matrices here are small
//! and the kernel decisions downstream depend on tiny eigenvalues being
//! resolved to absolute accuracy `~ eps * |H|`.

use serde::Serialize;

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Relative Hermitian-symmetry tolerance applied to inputs.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `V diag(f(lambda)) V*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let fl = f(lam);
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * fl;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    h.ensure_square()?;
    let tol = HERMITIAN_TOL * h.max_abs().max(f64::MIN_POSITIVE);
    let asymmetry = h.hermitian_defect();
    if asymmetry > tol {
        return Err(Error::NotHermitian { asymmetry, tol });
    }
    Ok(())
}

/// Unitary 2x2 rotation `J = [[c, s], [-s conj(u), c conj(u)]]` that
/// diagonalizes `[[alpha, gamma], [conj(gamma), beta]]` under `J* G J`.
#[derive(Clone, Copy)]
pub(crate) struct Rotation {
    pub c: f64,
    pub s: f64,
    pub u_conj: C64,
}

impl Rotation {
    pub fn annihilating(alpha: f64, beta: f64, gamma: C64) -> Self {
        let g = gamma.norm();
        let u_conj = (gamma / g).conj();
        let theta = (beta - alpha) / (2.0 * g);
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        Rotation { c, s: t * c, u_conj }
    }

    /// Returns `(x_p, x_q) J` as the new pair.
    #[inline]
    pub fn apply_right(&self, xp: C64, xq: C64) -> (C64, C64) {
        (xp * self.c - xq * self.u_conj * self.s, xp * self.s + xq * self.u_conj * self.c)
    }

    /// Returns `J* (x_p, x_q)^T` as the new pair.
    #[inline]
    fn apply_left_adjoint(&self, xp: C64, xq: C64) -> (C64, C64) {
        let u = self.u_conj.conj();
        (xp * self.c - xq * u * self.s, xp * self.s + xq * u * self.c)
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(h)?;
    let n = h.rows();
    let mut a = h.hermitian_part();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = scale == 0.0 || n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= f64::EPSILON * 1e-2 * scale {
            converged = true;
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let gamma = a[(p, q)];
                let g = gamma.norm();
                if g == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                // Skip rotations that cannot change the diagonal in floating point.
                if g <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                let rot = Rotation::annihilating(app, aqq, gamma);
                for k in 0..n {
                    let (xp, xq) = rot.apply_right(a[(k, p)], a[(k, q)]);
                    a[(k, p)] = xp;
                    a[(k, q)] = xq;
                }
                for k in 0..n {
                    let (xp, xq) = rot.apply_left_adjoint(a[(p, k)], a[(q, k)]);
                    a[(p, k)] = xp;
                    a[(q, k)] = xq;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let (xp, xq) = rot.apply_right(v[(k, p)], v[(k, q)]);
                    v[(k, p)] = xp;
                    v[(k, q)] = xq;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { what: "Hermitian Jacobi eigensolver", iterations: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let columns: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();
    Ok(HermitianEigen { eigenvalues, eigenvectors: ComplexMatrix::from_columns(n, &columns) })
}

/// PSD tolerance convention: `tol_psd * |H|_2`, or `tol_psd` itself when `H = 0`.
pub fn psd_tolerance(tol_psd: f64, norm: f64) -> f64 {
    if norm > 0.0 {
        tol_psd * norm
    } else {
        tol_psd
    }
}

/// Unique PSD square root of a Hermitian PSD matrix. Eigenvalues in
/// `[-tol, tol]` are treated as zero, so round-off in the kernel of `H` does
/// not become an `O(sqrt(eps))` component of the root.
pub fn hermitian_sqrt(h: &ComplexMatrix, tol_psd: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(h)?;
    let norm = eig.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    sqrt_from_eigen(&eig, psd_tolerance(tol_psd, norm))
}

/// Square root with an absolute tolerance `tol`.
pub(crate) fn sqrt_from_eigen(eig: &HermitianEigen, tol: f64) -> Result<ComplexMatrix> {
    if eig.min() < -tol {
        return Err(Error::NotPsd { min_eigenvalue: eig.min(), tol });
    }
    Ok(eig.map(|x| if x <= tol { 0.0 } else { x.sqrt() }))
}

/// Orthonormal basis (as columns) of the eigenvectors whose eigenvalues are at
/// most `tol_rank * lambda_max(H)`.
pub fn kernel_basis(h: &ComplexMatrix, tol_rank: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(h)?;
    Ok(kernel_from_eigen(&eig, tol_rank))
}

fn kernel_from_eigen(eig: &HermitianEigen, tol_rank: f64) -> ComplexMatrix {
    let n = eig.eigenvectors.rows();
    let cutoff = tol_rank * eig.max().max(0.0);
    let cols: Vec<Vec<C64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam <= cutoff)
        .map(|(k, _)| eig.eigenvectors.column(k))
        .collect();
    ComplexMatrix::from_columns(n, &cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_and_two_by_two() {
        let eig = hermitian_eigen(&ComplexMatrix::from_diag(&[3.0, -1.0, 2.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![-1.0, 2.0, 3.0]);

        let h = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let eig = hermitian_eigen(&h).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((eig.eigenvalues[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn complex_reconstruction_and_orthonormality() {
        let h = ComplexMatrix::new(
            3,
            3,
            vec![
                c(2.0, 0.0), c(1.0, 1.0), c(0.0, -0.5),
                c(1.0, -1.0), c(-1.0, 0.0), c(0.25, 0.0),
                c(0.0, 0.5), c(0.25, 0.0), c(4.0, 0.0),
            ],
        )
        .unwrap();
        let eig = hermitian_eigen(&h).unwrap();
        let resid = spectral_norm(&(&eig.reconstruct() - &h));
        assert!(resid <= 1e-13 * spectral_norm(&h), "residual {resid}");
        let v = &eig.eigenvectors;
        let gram = &v.adjoint() * v;
        assert!(spectral_norm(&(&gram - &ComplexMatrix::identity(3))) < 1e-13);
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sqrt_examples() {
        let p = ComplexMatrix::from_diag(&[0.0, 0.0, 1.0, 1.0]);
        assert!(spectral_norm(&(&hermitian_sqrt(&p, 1e-12).unwrap() - &p)) < 1e-15);

        let d = hermitian_sqrt(&ComplexMatrix::from_diag(&[4.0, 9.0]), 1e-12).unwrap();
        assert!(spectral_norm(&(&d - &ComplexMatrix::from_diag(&[2.0, 3.0]))) < 1e-15);

        let h = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let r = hermitian_sqrt(&h, 1e-12).unwrap();
        assert!(spectral_norm(&(&(&r * &r) - &h)) <= 1e-12);
    }

    #[test]
    fn sqrt_rejects_indefinite_and_clamps_roundoff() {
        let bad = ComplexMatrix::from_diag(&[1.0, -0.1]);
        assert!(matches!(hermitian_sqrt(&bad, 1e-12), Err(Error::NotPsd { .. })));
        let nearly = ComplexMatrix::from_diag(&[1.0, -1e-14]);
        let r = hermitian_sqrt(&nearly, 1e-12).unwrap();
        assert_eq!(r[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&ComplexMatrix::from_diag(&[0.0, 0.0, 1.0, 1.0]), 1e-10).unwrap();
        assert_eq!(k.cols(), 2);
        for j in 0..2 {
            let col = k.column(j);
            assert!(col[2].norm() < 1e-15 && col[3].norm() < 1e-15);
        }
        assert_eq!(kernel_basis(&ComplexMatrix::identity(3), 1e-10).unwrap().cols(), 0);

        let k = kernel_basis(&ComplexMatrix::from_diag(&[1.0, 0.0]), 1e-10).unwrap();
        assert_eq!(k.cols(), 1);
        assert!((k[(1, 0)].norm() - 1.0).abs() < 1e-15);
    }
}
