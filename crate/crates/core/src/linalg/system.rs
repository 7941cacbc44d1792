use serde::Serialize;

use super::hermitian::{hermitian_eigen, psd_tolerance, sqrt_from_eigen, HermitianEigen};
use super::matrix::ComplexMatrix;
use super::svd::spectral_norm;
use crate::error::{Error, Result};

/// A generator `B` of `x' = -Bx` together with its Hermitian/anti-Hermitian
/// split and the spectrum of the Hermitian part.
///
/// Construction never rejects an indefinite `B_H`; use
/// [`SemiDissipativeSystem::validate`] for that.
#[derive(Debug, Clone, Serialize)]
pub struct SemiDissipativeSystem {
    b: ComplexMatrix,
    b_h: ComplexMatrix,
    b_a: ComplexMatrix,
    #[serde(skip)]
    b_h_eigen: HermitianEigen,
    psd_margin: f64,
    norm: f64,
}

/// Splits `B = B_H + B_A` and records `lambda_min(B_H)` as the PSD margin.
pub fn hermitian_split(b: &ComplexMatrix) -> Result<SemiDissipativeSystem> {
    SemiDissipativeSystem::new(b.clone())
}

impl SemiDissipativeSystem {
    pub fn new(b: ComplexMatrix) -> Result<Self> {
        let n = b.ensure_square()?;
        if n == 0 {
            return Err(Error::Dimension("system dimension must be at least 1".into()));
        }
        let b_h = b.hermitian_part();
        let b_a = b.anti_hermitian_part();
        let b_h_eigen = hermitian_eigen(&b_h)?;
        let psd_margin = b_h_eigen.min();
        let norm = spectral_norm(&b);
        Ok(Self { b, b_h, b_a, b_h_eigen, psd_margin, norm })
    }

    /// `epsilon * A + C` for an anti-Hermitian `A` and PSD `C`.
    pub fn from_split(a: &ComplexMatrix, c: &ComplexMatrix, epsilon: f64) -> Result<Self> {
        if a.rows() != c.rows() || a.cols() != c.cols() {
            return Err(Error::Dimension("split parts must have the same shape".into()));
        }
        Self::new(&a.scale_real(epsilon) + c)
    }

    pub fn dim(&self) -> usize {
        self.b.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn hermitian(&self) -> &ComplexMatrix {
        &self.b_h
    }

    pub fn anti_hermitian(&self) -> &ComplexMatrix {
        &self.b_a
    }

    pub fn hermitian_eigen(&self) -> &HermitianEigen {
        &self.b_h_eigen
    }

    pub fn psd_margin(&self) -> f64 {
        self.psd_margin
    }

    pub fn lambda_max_hermitian(&self) -> f64 {
        self.b_h_eigen.max()
    }

    /// Absolute PSD tolerance `tol_psd * max(|B_H|_2, |B|_2)`, or `tol_psd`
    /// when `B = 0`. Round-off in `B_H` scales with `|B|`, not with `|B_H|`.
    pub fn psd_tolerance(&self, tol_psd: f64) -> f64 {
        let norm = self.b_h_eigen.min().abs().max(self.b_h_eigen.max().abs());
        psd_tolerance(tol_psd, norm.max(self.norm))
    }

    pub fn is_semi_dissipative(&self, tol_psd: f64) -> bool {
        self.psd_margin >= -self.psd_tolerance(tol_psd)
    }

    pub fn validate(&self, tol_psd: f64) -> Result<()> {
        if self.is_semi_dissipative(tol_psd) {
            Ok(())
        } else {
            Err(Error::NotSemiDissipative { psd_margin: self.psd_margin, tol: self.psd_tolerance(tol_psd) })
        }
    }

    pub fn sqrt_hermitian(&self, tol_psd: f64) -> Result<ComplexMatrix> {
        sqrt_from_eigen(&self.b_h_eigen, self.psd_tolerance(tol_psd))
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Same system rescaled to `s B`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.b.scale_real(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anti_hermitian_input() {
        let b = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let sys = hermitian_split(&b).unwrap();
        assert!(sys.hermitian().is_zero());
        assert_eq!(sys.anti_hermitian(), &b);
        assert_eq!(sys.psd_margin(), 0.0);
        assert!(sys.is_semi_dissipative(1e-12));
    }

    #[test]
    fn envelope_split() {
        let b = ComplexMatrix::from_real_rows(&[&[1.0, -0.3], &[0.3, 0.0]]).unwrap();
        let sys = hermitian_split(&b).unwrap();
        assert_eq!(sys.hermitian(), &ComplexMatrix::from_diag(&[1.0, 0.0]));
        assert_eq!(sys.hermitian_eigen().eigenvalues, vec![0.0, 1.0]);
    }

    #[test]
    fn identity_split() {
        let sys = hermitian_split(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(sys.hermitian(), &ComplexMatrix::identity(3));
        assert!(sys.anti_hermitian().is_zero());
        assert_eq!(sys.psd_margin(), 1.0);
    }

    #[test]
    fn indefinite_is_kept_but_fails_validation() {
        let sys = hermitian_split(&ComplexMatrix::from_diag(&[1.0, -0.5])).unwrap();
        assert_eq!(sys.psd_margin(), -0.5);
        assert!(matches!(sys.validate(1e-12), Err(Error::NotSemiDissipative { .. })));
    }

    #[test]
    fn non_square_is_rejected() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_split(&m), Err(Error::Dimension(_))));
    }
}
