use super::qr::{qr_factor, solve_upper};
use super::svd::svd_economy;
use super::{Matrix, Scalar};
use crate::error::{Error, Result};

/// Singular values below this fraction of σ_max are treated as zero.
pub const SINGULAR_CUTOFF: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    Qr,
    /// Minimum-norm pseudo-inverse with the [`SINGULAR_CUTOFF`] cutoff.
    MinNormSvd,
}

#[derive(Clone, Debug)]
pub struct LeastSquares<T> {
    pub solution: Matrix<T>,
    /// Numerical rank of the coefficient matrix.
    pub rank: usize,
    /// 2-norm condition number σ_max/σ_min (infinite when rank deficient).
    pub condition: f64,
    pub method: SolveMethod,
}

/// `X = argmin ‖A·X − B‖_F`.
pub fn least_squares<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    least_squares_detailed(a, b).map(|ls| ls.solution)
}

/// Least squares with rank and conditioning diagnostics.
///
/// Full-column-rank systems are solved through Householder QR. Otherwise the
/// minimum-norm solution is formed from the SVD with singular values below
/// `1e-12·σ_max` discarded.
pub fn least_squares_detailed<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
) -> Result<LeastSquares<T>> {
    if a.rows() != b.rows() {
        return Err(Error::shape(format!(
            "least_squares: A has {} rows, B has {}",
            a.rows(),
            b.rows()
        )));
    }
    a.check_finite()?;
    b.check_finite()?;

    let svd = svd_economy(a)?;
    let smax = svd.sigma[0];
    let cutoff = SINGULAR_CUTOFF * smax;
    let rank = svd.sigma.iter().filter(|&&s| s > cutoff && s > 0.0).count();
    let smin = *svd.sigma.last().expect("nonempty");
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };

    if a.rows() >= a.cols() && rank == a.cols() {
        let qr = qr_factor(a)?;
        let qtb = qr.q.adjoint_matmul(b);
        return Ok(LeastSquares {
            solution: solve_upper(&qr.r, &qtb),
            rank,
            condition,
            method: SolveMethod::Qr,
        });
    }

    // X = W · Σ⁺ · Uᴴ · B over the retained directions.
    let mut utb = svd.u.columns(0..rank).adjoint_matmul(b);
    for i in 0..rank {
        let inv = 1.0 / svd.sigma[i];
        for c in 0..utb.cols() {
            utb[(i, c)] = utb[(i, c)].scale(inv);
        }
    }
    let solution = if rank == 0 {
        Matrix::zeros(a.cols(), b.cols())
    } else {
        svd.w.columns(0..rank).matmul(&utb)
    };
    Ok(LeastSquares {
        solution,
        rank,
        condition,
        method: SolveMethod::MinNormSvd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(m: usize, n: usize, seed: u64) -> Matrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn identity_returns_rhs() {
        let b = random(4, 2, 1);
        let x = least_squares(&Matrix::identity(4), &b).unwrap();
        assert!(x.sub(&b).max_abs() < 1e-15);
    }

    #[test]
    fn consistent_overdetermined_is_exact() {
        let a = random(12, 3, 2);
        let x_true = random(3, 2, 3);
        let b = a.matmul(&x_true);
        let ls = least_squares_detailed(&a, &b).unwrap();
        assert_eq!(ls.method, SolveMethod::Qr);
        assert!(ls.solution.sub(&x_true).max_abs() < 1e-10);
    }

    #[test]
    fn residual_is_orthogonal_to_range() {
        let a = random(20, 4, 4);
        let b = random(20, 3, 5);
        let x = least_squares(&a, &b).unwrap();
        let resid = a.matmul(&x).sub(&b);
        let normal = a.adjoint_matmul(&resid);
        assert!(normal.frobenius_norm() <= 1e-8 * a.frobenius_norm() * b.frobenius_norm());
    }

    #[test]
    fn rank_deficient_gives_minimum_norm() {
        // Two identical columns: the minimum-norm solution splits the weight evenly.
        let a = Matrix::from_rows(&[[1.0, 1.0], [2.0, 2.0], [0.0, 0.0]]).unwrap();
        let b = Matrix::from_rows(&[[2.0], [4.0], [0.0]]).unwrap();
        let ls = least_squares_detailed(&a, &b).unwrap();
        assert_eq!(ls.method, SolveMethod::MinNormSvd);
        assert_eq!(ls.rank, 1);
        assert!((ls.solution[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((ls.solution[(1, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch_rejected() {
        assert!(least_squares(&random(3, 2, 1), &random(4, 1, 1)).is_err());
    }
}
