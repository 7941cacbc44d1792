use super::matrix::ComplexMatrix;
use crate::error::Result;

const SERIES_REMAINDER: f64 = 1e-17;
const MAX_TERMS: usize = 40;

/// `e^M` by scaling and squaring around a truncated Taylor series.
///
/// `M` is scaled by `2^-s` so that its norm is at most 1/2; the series is then
/// summed until the tail bound `|A|^{k+1}/(k+1)! * 1/(1 - |A|/(k+2))` drops
/// below 1e-17, and the result is squared `s` times. The Frobenius norm is used
/// as the (upper-bounding) scaling norm.
pub fn matrix_exponential(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.ensure_square()?;
    let norm = m.frobenius_norm();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = m.scale_real(0.5_f64.powi(squarings as i32));
    let a = norm * 0.5_f64.powi(squarings as i32);

    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    let mut term_bound = 1.0;
    for k in 1..=MAX_TERMS {
        term = (&term * &scaled).scale_real(1.0 / k as f64);
        result = &result + &term;
        term_bound *= a / k as f64;
        let tail = term_bound * a / (k + 1) as f64 / (1.0 - a / (k + 2) as f64);
        if tail < SERIES_REMAINDER {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm;

    #[test]
    fn zero_gives_identity() {
        let e = matrix_exponential(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e, ComplexMatrix::identity(3));
    }

    #[test]
    fn nilpotent_series_terminates() {
        let n = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let want = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(spectral_norm(&(&matrix_exponential(&n).unwrap() - &want)) < 1e-15);
    }

    #[test]
    fn diagonal_decay() {
        let m = ComplexMatrix::from_diag(&[-1.0, -2.0]);
        let e = matrix_exponential(&m).unwrap();
        assert!((e[(0, 0)].re - (-1.0_f64).exp()).abs() < 1e-15);
        assert!((e[(1, 1)].re - (-2.0_f64).exp()).abs() < 1e-15);
        assert!(e[(0, 1)].norm() == 0.0);
    }

    #[test]
    fn rotation_generator_large_argument() {
        let t = 40.0;
        let m = ComplexMatrix::from_real_rows(&[&[0.0, t], &[-t, 0.0]]).unwrap();
        let e = matrix_exponential(&m).unwrap();
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-12);
        assert!((e[(0, 1)].re - t.sin()).abs() < 1e-12);
    }
}
