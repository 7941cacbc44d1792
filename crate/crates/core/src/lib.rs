//! Analysis of semi-dissipative linear systems `x' = -Bx`: hypocoercivity
//! index, propagator norm `|e^{-Bt}|_2`, and its short-time decay law.

pub mod appendix;
pub mod builtin;
pub mod error;
pub mod index;
pub mod linalg;
pub mod numerics;
pub mod propagator;
pub mod rational;
pub mod sampling;
pub mod short_time;

pub use error::{Error, ErrorClass, Result};
pub use index::{compute_index, HcIndex, IndexReport, IndexVariant, Tolerances};
pub use linalg::{ComplexMatrix, SemiDissipativeSystem, C64};
