//! Matrix input documents.
//!
//! ```json
//! {"n": 2, "matrix": [[1, [0, -0.3]], [0.3, 0]], "split": {"A": [[0, 1], [-1, 0]], "C": [[1, 0], [0, 0]]}}
//! ```
//!
//! Entries are real numbers or `[re, im]` pairs. `matrix` may be omitted when
//! `split` is present; otherwise it must equal `A + C`.

use std::io::Read;
use std::path::Path;

use hypodecay::builtin;
use hypodecay::linalg::{hermitian_eigen, psd_tolerance, ComplexMatrix, C64};
use serde::Deserialize;

use crate::CliError;

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Pair([f64; 2]),
}

type Rows = Vec<Vec<Entry>>;

#[derive(Deserialize)]
struct RawSplit {
    #[serde(rename = "A")]
    a: Rows,
    #[serde(rename = "C")]
    c: Rows,
}

#[derive(Deserialize)]
struct RawDocument {
    n: usize,
    matrix: Option<Rows>,
    split: Option<RawSplit>,
}

/// A validated system description.
#[derive(Debug, Clone)]
pub struct MatrixInput {
    pub name: String,
    pub matrix: ComplexMatrix,
    pub split: Option<(ComplexMatrix, ComplexMatrix)>,
}

impl MatrixInput {
    /// The generator to analyze: `matrix`, or `eps A + C` when `eps` is given.
    pub fn generator(&self, eps: Option<f64>) -> Result<ComplexMatrix, CliError> {
        match (eps, &self.split) {
            (None, _) => Ok(self.matrix.clone()),
            (Some(e), Some((a, c))) => {
                if !e.is_finite() {
                    return Err(CliError::Usage(format!("--eps must be finite, got {e}")));
                }
                Ok(&a.scale_real(e) + c)
            }
            (Some(_), None) => Err(CliError::Usage(format!("--eps needs a split, but {} has none", self.name))),
        }
    }
}

fn to_matrix(rows: Rows, n: usize, what: &str) -> Result<ComplexMatrix, CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Invalid(format!("{what} must be {n}x{n}")));
    }
    let rows: Vec<Vec<C64>> = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|e| match e {
                    Entry::Real(x) => C64::new(x, 0.0),
                    Entry::Pair([re, im]) => C64::new(re, im),
                })
                .collect()
        })
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| CliError::Invalid(format!("{what}: {e}")))
}

fn check_split(a: &ComplexMatrix, c: &ComplexMatrix, tol_psd: f64) -> Result<(), CliError> {
    let defect = (a + &a.adjoint()).max_abs();
    if defect > 1e-12 * a.max_abs().max(1.0) {
        return Err(CliError::Invalid(format!("split A is not anti-Hermitian (|A + A^*| = {defect:.3e})")));
    }
    let asym = c.hermitian_defect();
    if asym > 1e-12 * c.max_abs().max(1.0) {
        return Err(CliError::Invalid(format!("split C is not Hermitian (asymmetry {asym:.3e})")));
    }
    let eig = hermitian_eigen(&c.hermitian_part())?;
    let tol = psd_tolerance(tol_psd, eig.min().abs().max(eig.max().abs()));
    if eig.min() < -tol {
        return Err(CliError::Invalid(format!("split C is not PSD (smallest eigenvalue {:.6e})", eig.min())));
    }
    Ok(())
}

/// Parses and validates a document; syntax errors carry line and column.
pub fn parse_document(text: &str, name: &str, tol_psd: f64) -> Result<MatrixInput, CliError> {
    let raw: RawDocument = serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        let full = e.to_string();
        let message = full.strip_suffix(&format!(" at line {line} column {column}")).unwrap_or(&full).to_string();
        CliError::Parse { line, column, message }
    })?;
    let n = raw.n;
    if n == 0 {
        return Err(CliError::Invalid("n must be at least 1".into()));
    }
    let matrix = raw.matrix.map(|m| to_matrix(m, n, "matrix")).transpose()?;
    let split = match raw.split {
        Some(s) => {
            let a = to_matrix(s.a, n, "split.A")?;
            let c = to_matrix(s.c, n, "split.C")?;
            check_split(&a, &c, tol_psd)?;
            Some((a, c))
        }
        None => None,
    };
    let matrix = match (matrix, &split) {
        (Some(m), Some((a, c))) => {
            let sum = a + c;
            let gap = (&m - &sum).max_abs();
            if gap > 1e-12 * m.max_abs().max(1.0) {
                return Err(CliError::Invalid(format!("matrix differs from A + C by {gap:.3e}")));
            }
            m
        }
        (Some(m), None) => m,
        (None, Some((a, c))) => a + c,
        (None, None) => return Err(CliError::Invalid("document needs a matrix or a split".into())),
    };
    Ok(MatrixInput { name: name.to_string(), matrix, split })
}

/// Reads a document from a file, or from standard input for `-`.
pub fn read_document(path: &Path, tol_psd: f64) -> Result<MatrixInput, CliError> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        parse_document(&text, "stdin", tol_psd)
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        parse_document(&text, &path.display().to_string(), tol_psd)
    }
}

pub fn example(name: &str) -> Result<MatrixInput, CliError> {
    let ex = builtin::by_name(name).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(MatrixInput { name: ex.name, matrix: ex.matrix, split: ex.split })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_entries() {
        let m = parse_document(r#"{"n": 2, "matrix": [[1, [0, 2]], [[0, -2], 0]]}"#, "t", 1e-12).unwrap();
        assert_eq!(m.matrix[(0, 1)], C64::new(0.0, 2.0));
        assert_eq!(m.matrix[(0, 0)], C64::new(1.0, 0.0));
        assert!(m.split.is_none());
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_document("{\"n\": 2,\n  \"matrix\": [[1, 2],, ]}", "t", 1e-12).unwrap_err();
        match err {
            CliError::Parse { line, column, .. } => assert_eq!((line, column), (2, 21)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn split_rules() {
        let ok = r#"{"n": 2, "split": {"A": [[0, 1], [-1, 0]], "C": [[1, 0], [0, 0]]}}"#;
        let m = parse_document(ok, "t", 1e-12).unwrap();
        assert_eq!(m.matrix[(0, 1)], C64::new(1.0, 0.0));
        let b = m.generator(Some(0.5)).unwrap();
        assert_eq!(b[(1, 0)], C64::new(-0.5, 0.0));

        let not_anti = r#"{"n": 2, "split": {"A": [[0, 1], [1, 0]], "C": [[1, 0], [0, 0]]}}"#;
        assert!(matches!(parse_document(not_anti, "t", 1e-12), Err(CliError::Invalid(_))));
        let not_psd = r#"{"n": 2, "split": {"A": [[0, 1], [-1, 0]], "C": [[1, 0], [0, -1]]}}"#;
        assert!(matches!(parse_document(not_psd, "t", 1e-12), Err(CliError::Invalid(_))));
        let wrong_sum = r#"{"n": 2, "matrix": [[1, 0], [0, 0]], "split": {"A": [[0, 1], [-1, 0]], "C": [[1, 0], [0, 0]]}}"#;
        assert!(matches!(parse_document(wrong_sum, "t", 1e-12), Err(CliError::Invalid(_))));
    }

    #[test]
    fn shape_and_eps_errors() {
        assert!(matches!(parse_document(r#"{"n": 2, "matrix": [[1]]}"#, "t", 1e-12), Err(CliError::Invalid(_))));
        let m = parse_document(r#"{"n": 1, "matrix": [[1]]}"#, "t", 1e-12).unwrap();
        assert!(matches!(m.generator(Some(1.0)), Err(CliError::Usage(_))));
    }
}
