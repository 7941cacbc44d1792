//! Reference generators used in examples, tests and the CLI.

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

fn real(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows).expect("static matrix is well formed")
}

/// Index 1, `B_H = diag(0,0,1,1)`.
pub fn b1() -> ComplexMatrix {
    real(&[
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, -1.0, 1.0, 0.0],
        &[-1.0, 0.0, 0.0, 1.0],
    ])
}

/// Index 2, same Hermitian part as [`b1`].
pub fn b2() -> ComplexMatrix {
    real(&[
        &[0.0, 1.0, 0.0, 0.0],
        &[-1.0, 0.0, 1.0, 0.0],
        &[0.0, -1.0, 1.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
}

/// `k x k` tridiagonal chain with `+1` above, `-1` below the diagonal and a
/// single dissipative entry in the last position; index `k - 1`.
pub fn e_k(k: usize) -> ComplexMatrix {
    assert!(k >= 1, "E_k needs k >= 1");
    let mut m = ComplexMatrix::zeros(k, k);
    for i in 0..k - 1 {
        m[(i, i + 1)].re = 1.0;
        m[(i + 1, i)].re = -1.0;
    }
    m[(k - 1, k - 1)].re = 1.0;
    m
}

/// `[[1, -3/10], [3/10, 0]]`, eigenvalues 1/10 and 9/10.
pub fn envelope() -> ComplexMatrix {
    real(&[&[1.0, -0.3], &[0.3, 0.0]])
}

/// `(A, C)` of the index-1 family `eps A + C`.
pub fn num1_split() -> (ComplexMatrix, ComplexMatrix) {
    let a = real(&[
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, -1.0, 0.0, 0.0],
        &[-1.0, 0.0, 0.0, 0.0],
    ]);
    (a, ComplexMatrix::from_diag(&[0.0, 0.0, 1.0, 1.0]))
}

/// `(A, C)` of the index-3 family `eps A + C`.
pub fn num2_split() -> (ComplexMatrix, ComplexMatrix) {
    let a = real(&[
        &[0.0, 1.0, 0.0, 0.0],
        &[-1.0, 0.0, 1.0, 0.0],
        &[0.0, -1.0, 0.0, 1.0],
        &[0.0, 0.0, -1.0, 0.0],
    ]);
    (a, ComplexMatrix::from_diag(&[0.0, 0.0, 0.0, 1.0]))
}

pub fn num1(eps: f64) -> ComplexMatrix {
    let (a, c) = num1_split();
    &a.scale_real(eps) + &c
}

pub fn num2(eps: f64) -> ComplexMatrix {
    let (a, c) = num2_split();
    &a.scale_real(eps) + &c
}

/// A named example: its matrix and, for the `eps A + C` families, the split.
#[derive(Debug, Clone)]
pub struct Example {
    pub name: String,
    pub matrix: ComplexMatrix,
    pub split: Option<(ComplexMatrix, ComplexMatrix)>,
}

/// Resolves `b1`, `b2`, `ek:<k>`, `envelope`, `num1`, `num2`. The families are
/// returned at `eps = 1`.
pub fn by_name(name: &str) -> Result<Example> {
    let (matrix, split) = match name {
        "b1" => (b1(), None),
        "b2" => (b2(), None),
        "envelope" => (envelope(), None),
        "num1" => (num1(1.0), Some(num1_split())),
        "num2" => (num2(1.0), Some(num2_split())),
        other => {
            let k = other
                .strip_prefix("ek:")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown example `{other}`")))?;
            (e_k(k), None)
        }
    };
    Ok(Example { name: name.to_string(), matrix, split })
}

pub const NAMES: [&str; 6] = ["b1", "b2", "ek:<k>", "envelope", "num1", "num2"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ek_shape() {
        let e = e_k(3);
        let want = real(&[&[0.0, 1.0, 0.0], &[-1.0, 0.0, 1.0], &[0.0, -1.0, 1.0]]);
        assert_eq!(e, want);
        assert_eq!(e_k(1), ComplexMatrix::identity(1));
    }

    #[test]
    fn families_split_exactly() {
        let (a, c) = num2_split();
        assert!((&a + &a.adjoint()).is_zero());
        assert_eq!(num2(1.0), &a + &c);
        assert_eq!(by_name("num1").unwrap().matrix, num1(1.0));
    }

    #[test]
    fn names() {
        assert_eq!(by_name("ek:5").unwrap().matrix.rows(), 5);
        for bad in ["ek:0", "ek:x", "foo"] {
            assert!(by_name(bad).is_err());
        }
    }
}
