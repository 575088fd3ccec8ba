//! Dense linear-algebra kernels: Householder QR, one-sided Jacobi SVD,
//! nonsymmetric eigenpairs, symmetric tridiagonal QL and least squares.
//!
//! Every routine is a pure function of its inputs. Iterative kernels stop
//! with [`Error::NoConvergence`](crate::Error::NoConvergence) after `100·n`
//! sweeps instead of returning unconverged output.

mod eig;
mod lstsq;
mod matrix;
mod qr;
mod scalar;
mod svd;
mod tridiag;

pub use eig::{eig_general, EigenPairs};
pub use lstsq::{least_squares, least_squares_detailed, LeastSquares, SolveMethod, SINGULAR_CUTOFF};
pub use matrix::{dot, norm2, CMatrix, Matrix};
pub use qr::{qr_factor, QrFactors, RANK_DEFICIENCY_TOL};
pub use scalar::Scalar;
pub use svd::{svd_economy, SvdFactors};
pub use tridiag::eig_sym_tridiag;
