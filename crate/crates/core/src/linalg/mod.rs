//! Sparse and dense linear-algebra substrate.

mod cholesky;
mod dense;
mod lanczos;
mod psqmr;
mod sparse;

pub use cholesky::{cholesky_factorize, cholesky_factorize_permuted, CholeskyFactor};
pub(crate) use cholesky::factorize_owned;
pub use dense::{all_finite, axpy, dot, norm2, scale_in_place, DenseMatrix};
pub use lanczos::{lanczos_topk, tridiagonal_eig, PartialEig};
pub use psqmr::{psqmr, JacobiPreconditioner, PsqmrOutcome};
pub use sparse::CscMatrix;
