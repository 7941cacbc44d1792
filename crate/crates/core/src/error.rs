use thiserror::Error;

use crate::index::{HcIndex, IndexVariant};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds {tol:.3e})")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("matrix is not positive semi-definite (smallest eigenvalue {min_eigenvalue:.6e}, tolerance {tol:.3e})")]
    NotPsd { min_eigenvalue: f64, tol: f64 },

    #[error("system is not semi-dissipative: psd_margin = {psd_margin:.6e} below -{tol:.3e}")]
    NotSemiDissipative { psd_margin: f64, tol: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("variant {0} cannot be used here")]
    WrongVariant(IndexVariant),

    #[error("index characterizations disagree: {}", format_variants(.per_variant))]
    InconsistentIndex { per_variant: Vec<(IndexVariant, HcIndex)> },

    #[error("borderline spectrum: index {m_hc} but min Re(eigenvalue) = {min_real_part:.6e} (tolerance {tol:.3e})")]
    BorderlineSpectrum { m_hc: HcIndex, min_real_part: f64, tol: f64 },

    #[error("the short-time expansion does not exist for a non-hypocoercive system")]
    NoExpansion,

    #[error("empty kernel: {0}")]
    EmptyKernel(String),

    #[error("vector is not in the required kernel: |sqrt(B_H) B^{power} x| = {residual:.3e}")]
    NotInKernel { power: usize, residual: f64 },

    #[error("coefficient formulas disagree: {b_form:.17e} vs {anti_form:.17e}")]
    CoefficientMismatch { b_form: f64, anti_form: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("propagator norm increases at t = {t:.6e}: {prev:.17e} -> {next:.17e}")]
    NotMonotone { t: f64, prev: f64, next: f64 },

    #[error("propagator norm {norm:.17e} outside (0, 1] at t = {t:.6e}")]
    NormOutOfRange { t: f64, norm: f64 },

    #[error("insufficient data: need {needed} points, have {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index arguments out of domain: m = {m}, j = {j}, k = {k}")]
    OutOfDomain { m: usize, j: usize, k: usize },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("extrapolation did not settle; last estimates {estimates:?}")]
    ExtrapolationFailed { estimates: Vec<f64> },

    #[error("margin/t^(a+1) grows by {growth:.3e} as t -> 0; (a, c) is not the leading term")]
    FailedOrder { growth: f64 },

    #[error("coefficient at eps = {eps} is {c_eps:.17e}, scaling law predicts {expected:.17e}")]
    ScalingMismatch { eps: f64, c_eps: f64, expected: f64 },

    #[error("hypocoercivity index changes across the family: {0}")]
    IndexVaries(String),
}

fn format_variants(per_variant: &[(IndexVariant, HcIndex)]) -> String {
    per_variant
        .iter()
        .map(|(v, m)| format!("{v}={m}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Coarse grouping used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Validation,
    NumericalQuality,
    Inconsistency,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Dimension(_) | InvalidGrid(_) | InvalidParameter(_) | Configuration(_)
            | WrongVariant(_) | OutOfDomain { .. } => ErrorClass::Usage,
            NonFinite | NotHermitian { .. } | NotPsd { .. } | NotSemiDissipative { .. }
            | NoExpansion | NotInKernel { .. } => ErrorClass::Validation,
            NoConvergence { .. } | NotMonotone { .. } | NormOutOfRange { .. }
            | InsufficientData { .. } | ExtrapolationFailed { .. } | FailedOrder { .. } => {
                ErrorClass::NumericalQuality
            }
            InconsistentIndex { .. } | BorderlineSpectrum { .. } | EmptyKernel(_)
            | CoefficientMismatch { .. } | ScalingMismatch { .. } | IndexVaries(_) => ErrorClass::Inconsistency,
        }
    }
}
