//! Command implementations behind the `hypodecay` binary.

pub mod commands;
pub mod input;
pub mod json;

use hypodecay::{ErrorClass, Tolerances};
use thiserror::Error;

pub use commands::{analyze, decay, selftest, sweep, Outcome};
pub use input::{example, parse_document, read_document, MatrixInput};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] hypodecay::Error),
}

impl CliError {
    /// 2 usage, 3 validation, 4 numerical quality, 5 internal inconsistency.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Parse { .. } | CliError::Invalid(_) => 3,
            CliError::Core(e) => match e.class() {
                ErrorClass::Usage => 2,
                ErrorClass::Validation => 3,
                ErrorClass::NumericalQuality => 4,
                ErrorClass::Inconsistency => 5,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub tol_rank: f64,
    pub tol_psd: f64,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub points: usize,
    pub grid: Grid,
    pub output: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol_rank: 1e-10,
            tol_psd: 1e-12,
            t_min: None,
            t_max: None,
            points: 400,
            grid: Grid::Linear,
            output: OutputFormat::Json,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol_rank > 0.0) || !(self.tol_psd > 0.0) {
            return Err(CliError::Usage("tolerances must be positive".into()));
        }
        if self.points < 2 {
            return Err(CliError::Usage(format!("--points must be at least 2, got {}", self.points)));
        }
        let (lo, hi) = self.time_range();
        if !(lo < hi) {
            return Err(CliError::Usage(format!("need t_min < t_max, got {lo} and {hi}")));
        }
        Ok(())
    }

    /// Defaults are `[0, 10]` for linear grids and `[1e-4, 1e2]` for log grids.
    pub fn time_range(&self) -> (f64, f64) {
        let (lo, hi) = match self.grid {
            Grid::Linear => (0.0, 10.0),
            Grid::Log => (1e-4, 1e2),
        };
        (self.t_min.unwrap_or(lo), self.t_max.unwrap_or(hi))
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances { rank: self.tol_rank, psd: self.tol_psd, ..Tolerances::default() }
    }
}

/// `N` geometrically spaced values from `A` to `B`, parsed from `A:B:N`.
pub fn parse_eps_geo(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("expected A:B:N, got {spec:?}"));
    };
    let a: f64 = a.parse().map_err(|_| format!("bad start {a:?}"))?;
    let b: f64 = b.parse().map_err(|_| format!("bad end {b:?}"))?;
    let n: usize = n.parse().map_err(|_| format!("bad count {n:?}"))?;
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err("A and B must be positive".into());
    }
    match n {
        0 => Err("N must be at least 1".into()),
        1 => Ok(vec![a]),
        _ => {
            let ratio = (b / a).ln() / (n - 1) as f64;
            Ok((0..n).map(|i| if i == n - 1 { b } else { a * (ratio * i as f64).exp() }).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_geo() {
        let v = parse_eps_geo("0.25:1:3").unwrap();
        assert_eq!(v.len(), 3);
        assert!((v[1] - 0.5).abs() < 1e-15 && v[2] == 1.0);
        assert_eq!(parse_eps_geo("2:2:1").unwrap(), vec![2.0]);
        assert!(parse_eps_geo("0:1:3").is_err());
        assert!(parse_eps_geo("1:2").is_err());
    }

    #[test]
    fn config_checks() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig { points: 1, ..RunConfig::default() };
        assert_eq!(bad.validate().unwrap_err().exit_code(), 2);
        let log = RunConfig { grid: Grid::Log, ..RunConfig::default() };
        assert_eq!(log.time_range(), (1e-4, 1e2));
        let inverted = RunConfig { t_min: Some(3.0), t_max: Some(1.0), ..RunConfig::default() };
        assert!(inverted.validate().is_err());
    }
}
