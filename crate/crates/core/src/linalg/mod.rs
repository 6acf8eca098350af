//! Banded symmetric storage, Cholesky factorization and generalized
//! symmetric-definite eigensolvers.

mod banded;
mod eigen;

pub use banded::{BandedCholesky, BandedSym};
pub use eigen::{dense_generalized, smallest_eigenpairs, EigenOptions, EigenPairs};
