use super::{dot, norm2, Matrix, Scalar};
use crate::error::{Error, Result};

/// Economy singular value decomposition `A ≈ U·diag(σ)·Wᴴ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdFactors<T = f64> {
    /// m×k, orthonormal columns.
    pub u: Matrix<T>,
    /// k values, nonincreasing and nonnegative.
    pub sigma: Vec<f64>,
    /// n×k, orthonormal columns.
    pub w: Matrix<T>,
    pub rank_used: usize,
}

impl<T: Scalar> SvdFactors<T> {
    /// Keep the leading `k` singular triplets.
    pub fn truncate(&self, k: usize) -> Self {
        let k = k.min(self.rank_used);
        SvdFactors {
            u: self.u.columns(0..k),
            sigma: self.sigma[..k].to_vec(),
            w: self.w.columns(0..k),
            rank_used: k,
        }
    }

    pub fn recompose(&self) -> Matrix<T> {
        let mut us = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            for v in us.col_mut(j) {
                *v = v.scale(s);
            }
        }
        us.matmul(&self.w.adjoint())
    }

    /// Number of singular values above `rel_tol·σ_max`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let cutoff = self.sigma.first().copied().unwrap_or(0.0) * rel_tol;
        self.sigma.iter().filter(|&&s| s > cutoff).count()
    }
}

/// Economy SVD by one-sided (Hestenes) Jacobi rotations.
///
/// Singular vectors follow a deterministic sign convention: the entry of
/// largest modulus in each column of `U` is real and positive.
pub fn svd_economy<T: Scalar>(a: &Matrix<T>) -> Result<SvdFactors<T>> {
    a.check_finite()?;
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::shape("svd of an empty matrix"));
    }
    let mut f = if m >= n {
        jacobi_tall(a)?
    } else {
        let t = jacobi_tall(&a.adjoint())?;
        SvdFactors {
            u: t.w,
            sigma: t.sigma,
            w: t.u,
            rank_used: t.rank_used,
        }
    };
    normalize_signs(&mut f);
    Ok(f)
}

fn jacobi_tall<T: Scalar>(a: &Matrix<T>) -> Result<SvdFactors<T>> {
    let (m, n) = a.shape();
    let mut work = a.clone();
    let mut v = Matrix::<T>::identity(n);
    let tol = f64::EPSILON * (m as f64).sqrt();
    let max_sweeps = 100 * n;

    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = work.col(p).iter().map(|x| x.abs_sqr()).sum();
                let beta: f64 = work.col(q).iter().map(|x| x.abs_sqr()).sum();
                if alpha < f64::MIN_POSITIVE || beta < f64::MIN_POSITIVE {
                    continue;
                }
                let gamma = dot(work.col(p), work.col(q));
                let g = gamma.abs();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let ph = gamma.phase().conj();
                rotate(&mut work, p, q, c, s, ph);
                rotate(&mut v, p, q, c, s, ph);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            algorithm: "one-sided Jacobi SVD",
            iterations: max_sweeps,
        });
    }

    let norms: Vec<f64> = (0..n).map(|j| norm2(work.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut u = Matrix::zeros(m, n);
    let w = v.select_columns(&order);
    let sigma_max = sigma[0];
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        if s > 0.0 {
            for (dst, &src) in u.col_mut(k).iter_mut().zip(work.col(j)) {
                *dst = src.scale(1.0 / s);
            }
        }
    }
    // Directions whose singular value sits at rounding level carry no
    // reliable orientation; re-orthogonalize them against the rest.
    for (k, &s) in sigma.iter().enumerate() {
        if s <= 1e-10 * sigma_max || s == 0.0 {
            complete_column(&mut u, k);
        }
    }

    Ok(SvdFactors {
        u,
        sigma,
        w,
        rank_used: n,
    })
}

/// Apply the rotation `[a_p, a_q·ph] ↦ [c·a_p − s·a_q', s·a_p + c·a_q']`.
fn rotate<T: Scalar>(mat: &mut Matrix<T>, p: usize, q: usize, c: f64, s: f64, ph: T) {
    let (cp, cq) = mat.col_pair_mut(p, q);
    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *xp;
        let b = *xq * ph;
        *xp = a.scale(c) - b.scale(s);
        *xq = a.scale(s) + b.scale(c);
    }
}

/// Replace column `k` with a unit vector orthogonal to columns `0..k` and to
/// every other column with a meaningful direction.
fn complete_column<T: Scalar>(u: &mut Matrix<T>, k: usize) {
    let m = u.rows();
    let n = u.cols();
    let others: Vec<usize> = (0..n).filter(|&j| j != k).collect();
    let mut candidates: Vec<Vec<T>> = Vec::new();
    if norm2(u.col(k)) > 0.0 {
        candidates.push(u.col(k).to_vec());
    }
    candidates.extend((0..m).map(|i| {
        let mut e = vec![T::zero(); m];
        e[i] = T::one();
        e
    }));
    for mut cand in candidates {
        for _ in 0..2 {
            for &j in &others {
                let oj = u.col(j);
                if norm2(oj) == 0.0 {
                    continue;
                }
                let proj = dot(oj, &cand);
                for (c, &o) in cand.iter_mut().zip(oj) {
                    *c -= o * proj;
                }
            }
        }
        let nrm = norm2(&cand);
        if nrm > 1e-3 {
            for (dst, c) in u.col_mut(k).iter_mut().zip(cand) {
                *dst = c.scale(1.0 / nrm);
            }
            return;
        }
    }
}

fn normalize_signs<T: Scalar>(f: &mut SvdFactors<T>) {
    for j in 0..f.u.cols() {
        let pivot = f
            .u
            .col(j)
            .iter()
            .copied()
            .fold(T::zero(), |best, x| if x.abs() > best.abs() { x } else { best });
        if pivot.abs() == 0.0 {
            continue;
        }
        let ph = pivot.phase().conj();
        for x in f.u.col_mut(j) {
            *x *= ph;
        }
        for x in f.w.col_mut(j) {
            *x *= ph;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(m: usize, n: usize, seed: u64) -> Matrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn check(a: &Matrix<f64>) -> SvdFactors {
        let f = svd_economy(a).unwrap();
        let k = a.rows().min(a.cols());
        assert_eq!(f.sigma.len(), k);
        assert!(f.u.orthonormality_error() <= 1e-10, "U not orthonormal");
        assert!(f.w.orthonormality_error() <= 1e-10, "W not orthonormal");
        assert!(f.recompose().sub(a).frobenius_norm() <= 1e-9 * a.frobenius_norm().max(1e-300));
        assert!(f.sigma.windows(2).all(|w| w[0] >= w[1] && w[1] >= 0.0));
        f
    }

    #[test]
    fn diagonal() {
        let f = check(&Matrix::from_rows(&[[3.0, 0.0], [0.0, 1.0]]).unwrap());
        assert_eq!(f.sigma, vec![3.0, 1.0]);
        let f = check(&Matrix::from_rows(&[[1.0, 0.0], [0.0, -3.0]]).unwrap());
        assert_eq!(f.sigma, vec![3.0, 1.0]);
    }

    #[test]
    fn rank_one_outer_product() {
        let a_vec = [1.0, -2.0, 2.0];
        let b_vec = [3.0, 0.0, 4.0, 0.0];
        let a = Matrix::from_fn(3, 4, |i, j| a_vec[i] * b_vec[j]);
        let f = check(&a);
        assert!((f.sigma[0] - 15.0).abs() < 1e-12);
        assert!(f.sigma[1..].iter().all(|&s| s < 1e-12));
    }

    #[test]
    fn tall_and_wide_shapes() {
        check(&random(30, 10, 1));
        check(&random(10, 30, 2));
        check(&random(1, 5, 3));
        check(&random(5, 1, 4));
    }

    #[test]
    fn zero_matrix_keeps_orthonormal_factors() {
        let f = check(&Matrix::zeros(4, 3));
        assert!(f.sigma.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn complex_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = Matrix::from_fn(7, 4, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let f = svd_economy(&a).unwrap();
        assert!(f.u.orthonormality_error() <= 1e-10);
        assert!(f.w.orthonormality_error() <= 1e-10);
        assert!(f.recompose().sub(&a).frobenius_norm() <= 1e-9 * a.frobenius_norm());
    }

    #[test]
    fn sign_convention_is_deterministic() {
        let a = random(6, 3, 5);
        let f = svd_economy(&a).unwrap();
        let g = svd_economy(&a.scaled(2.0)).unwrap();
        for j in 0..3 {
            for i in 0..6 {
                assert!((f.u[(i, j)] - g.u[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn non_finite_rejected() {
        let mut a = random(3, 3, 1);
        a[(1, 2)] = f64::INFINITY;
        assert!(matches!(svd_economy(&a), Err(Error::NonFinite { .. })));
    }
}
