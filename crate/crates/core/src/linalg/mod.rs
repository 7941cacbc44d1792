//! Dense complex linear algebra used throughout the crate.

mod expm;
mod hermitian;
mod matrix;
mod schur;
mod svd;
mod system;

pub use expm::matrix_exponential;
pub use hermitian::{hermitian_eigen, hermitian_sqrt, kernel_basis, psd_tolerance, HermitianEigen, HERMITIAN_TOL};
pub use matrix::{inner, normalize, vec_norm, ComplexMatrix, C64};
pub use schur::general_eigenvalues;
pub use svd::{rank_with_tolerance, singular_values, spectral_norm};
pub use system::{hermitian_split, SemiDissipativeSystem};
