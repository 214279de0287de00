//! Sparse storage, banded LU and dense spectral helpers.

mod banded;
mod dense;
mod ordering;
mod sparse;

pub use banded::{BandedLu, FactorStats};
pub use dense::{min_generalized_eigenvalue, null_space, null_space_split, NullSpaceSplit};
pub use ordering::reverse_cuthill_mckee;
pub use sparse::CsrMatrix;
