//! Seeded randomized SVD of rank `k`.
//!
//! Test matrices are filled column by column with standard normal draws
//! from a ChaCha8 stream seeded by `ChaCha8Rng::seed_from_u64(seed)`,
//! transformed by the `rand_distr::StandardNormal` ziggurat sampler. Both
//! crates are pinned to exact versions, so a seed always yields the same bits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{qr_factor, svd_economy, Matrix, SvdFactors};

/// Extra sample columns drawn beyond the target rank unless overridden.
pub const DEFAULT_OVERSAMPLING: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RsvdOptions {
    pub target_rank: usize,
    pub seed: u64,
    /// Extra Gaussian samples; the sample width is capped at `min(Nx, Nt)`.
    pub oversampling: usize,
    pub power_iterations: usize,
    /// Orthonormalize the range sample `V0·M` before projecting.
    pub orthonormalize_sample: bool,
}

impl RsvdOptions {
    pub fn new(target_rank: usize, seed: u64) -> Self {
        RsvdOptions {
            target_rank,
            seed,
            oversampling: DEFAULT_OVERSAMPLING,
            power_iterations: 0,
            orthonormalize_sample: true,
        }
    }

    /// The bare five-step construction: `k` samples, no power iterations,
    /// and no orthonormalization of `V0·M` (so `U` is generally not
    /// orthonormal).
    pub fn literal(target_rank: usize, seed: u64) -> Self {
        RsvdOptions {
            oversampling: 0,
            orthonormalize_sample: false,
            ..Self::new(target_rank, seed)
        }
    }

    pub fn with_oversampling(mut self, p: usize) -> Self {
        self.oversampling = p;
        self
    }

    pub fn with_power_iterations(mut self, q: usize) -> Self {
        self.power_iterations = q;
        self
    }

    pub fn with_orthonormalize_sample(mut self, on: bool) -> Self {
        self.orthonormalize_sample = on;
        self
    }

    fn validate(&self, nx: usize, nt: usize) -> Result<()> {
        let bound = nx.min(nt);
        if self.target_rank == 0 || self.target_rank > bound {
            return Err(Error::invalid(format!(
                "target rank {} outside 1..={bound} for a {nx}x{nt} matrix",
                self.target_rank
            )));
        }
        Ok(())
    }

    /// Number of Gaussian columns actually drawn.
    pub fn sample_width(&self, nx: usize, nt: usize) -> usize {
        (self.target_rank + self.oversampling).min(nx).min(nt)
    }
}

/// Randomized SVD output with sampling diagnostics.
#[derive(Clone, Debug)]
pub struct Rsvd {
    pub factors: SvdFactors,
    /// Input was identically zero; `U` then comes from a random sample.
    pub degenerate: bool,
    /// The orthonormalized range sample had a near-zero pivot.
    pub sample_rank_deficient: bool,
    pub sample_width: usize,
}

fn fill_gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<f64> {
    let mut m = Matrix::zeros(rows, cols);
    for j in 0..cols {
        for v in m.col_mut(j) {
            *v = StandardNormal.sample(rng);
        }
    }
    m
}

/// `n_rows × k` matrix of i.i.d. standard normal entries, reproducible from `seed`.
pub fn gaussian_test_matrix(n_rows: usize, k: usize, seed: u64) -> Result<Matrix<f64>> {
    if k == 0 || n_rows < k {
        return Err(Error::invalid(format!(
            "gaussian test matrix needs n_rows >= k >= 1, got {n_rows}x{k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(fill_gaussian(&mut rng, n_rows, k))
}

/// Randomized SVD of `v0` (Nx×Nt) truncated to `opts.target_rank`.
pub fn rsvd(v0: &Matrix<f64>, opts: &RsvdOptions) -> Result<Rsvd> {
    let (nx, nt) = v0.shape();
    opts.validate(nx, nt)?;
    v0.check_finite()?;
    let k = opts.target_rank;
    let width = opts.sample_width(nx, nt);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let m = fill_gaussian(&mut rng, nt, width);
    let degenerate = v0.max_abs() == 0.0;

    let mut sample_rank_deficient = false;
    let mut q = if degenerate {
        let qr = qr_factor(&fill_gaussian(&mut rng, nx, width))?;
        qr.q
    } else {
        v0.matmul(&m)
    };
    if opts.orthonormalize_sample && !degenerate {
        let qr = qr_factor(&q)?;
        sample_rank_deficient = qr.rank_deficient;
        q = qr.q;
    }
    for _ in 0..opts.power_iterations {
        q = v0.matmul(&v0.adjoint_matmul(&q));
        if opts.orthonormalize_sample {
            let qr = qr_factor(&q)?;
            sample_rank_deficient = qr.rank_deficient;
            q = qr.q;
        }
    }

    let p = q.adjoint_matmul(v0);
    let small = svd_economy(&p)?;
    let u = q.matmul(&small.u);
    let full = SvdFactors {
        u,
        sigma: small.sigma,
        w: small.w,
        rank_used: small.rank_used,
    };
    Ok(Rsvd {
        factors: full.truncate(k),
        degenerate,
        sample_rank_deficient,
        sample_width: width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outer_sum(nx: usize, nt: usize, terms: &[(f64, u64)]) -> Matrix<f64> {
        let mut out = Matrix::zeros(nx, nt);
        for &(scale, seed) in terms {
            let a = gaussian_test_matrix(nx, 1, seed).unwrap();
            let b = gaussian_test_matrix(nt, 1, seed + 100).unwrap();
            out = out.add(&a.matmul(&b.transpose()).scaled(scale));
        }
        out
    }

    #[test]
    fn gaussian_matrix_is_deterministic_and_seed_sensitive() {
        let a = gaussian_test_matrix(10, 3, 7).unwrap();
        let b = gaussian_test_matrix(10, 3, 7).unwrap();
        let c = gaussian_test_matrix(10, 3, 8).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        assert_ne!(a.as_slice(), c.as_slice());
        assert!(gaussian_test_matrix(2, 3, 0).is_err());
        assert!(gaussian_test_matrix(2, 0, 0).is_err());
    }

    #[test]
    fn gaussian_moments() {
        let n = 10_000;
        let g = gaussian_test_matrix(n, 1, 2024).unwrap();
        let mean = g.as_slice().iter().sum::<f64>() / n as f64;
        let var = g.as_slice().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() <= 4.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() <= 0.1, "variance {var}");
    }

    #[test]
    fn exact_rank_two_is_recovered() {
        let v0 = outer_sum(30, 40, &[(3.0, 1), (0.5, 2)]);
        let r = rsvd(&v0, &RsvdOptions::new(2, 9)).unwrap();
        let err = r.factors.recompose().sub(&v0).frobenius_norm();
        assert!(err <= 1e-8 * v0.frobenius_norm(), "{err}");
        assert!(r.factors.u.orthonormality_error() <= 1e-8);
        assert!(r.factors.w.orthonormality_error() <= 1e-8);
    }

    #[test]
    fn exact_rank_two_without_oversampling() {
        let v0 = outer_sum(30, 40, &[(3.0, 1), (0.5, 2)]);
        let r = rsvd(&v0, &RsvdOptions::new(2, 9).with_oversampling(0)).unwrap();
        assert_eq!(r.sample_width, 2);
        let err = r.factors.recompose().sub(&v0).frobenius_norm();
        assert!(err <= 1e-8 * v0.frobenius_norm(), "{err}");
    }

    #[test]
    fn scaled_unit_spike() {
        let mut v0 = Matrix::zeros(5, 6);
        v0[(0, 0)] = -4.0;
        let r = rsvd(&v0, &RsvdOptions::new(1, 3)).unwrap();
        assert!((r.factors.sigma[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rank_bounds_are_enforced() {
        let v0 = outer_sum(5, 8, &[(1.0, 1)]);
        assert!(rsvd(&v0, &RsvdOptions::new(0, 1)).is_err());
        assert!(rsvd(&v0, &RsvdOptions::new(6, 1)).is_err());
        assert!(rsvd(&v0, &RsvdOptions::new(5, 1)).is_ok());
    }

    #[test]
    fn zero_input_is_flagged() {
        let r = rsvd(&Matrix::zeros(6, 9), &RsvdOptions::new(2, 5)).unwrap();
        assert!(r.degenerate);
        assert!(r.factors.sigma.iter().all(|&s| s == 0.0));
        assert!(r.factors.u.orthonormality_error() < 1e-12);
    }

    #[test]
    fn literal_mode_matches_range_but_not_orthonormality() {
        let v0 = outer_sum(20, 25, &[(2.0, 4), (1.0, 5), (0.3, 6)]);
        let r = rsvd(&v0, &RsvdOptions::literal(3, 1)).unwrap();
        assert_eq!(r.sample_width, 3);
        // U = Q·T spans the sampled range but is scaled by the sample norms.
        assert!(r.factors.u.orthonormality_error() > 1e-3);
    }

    #[test]
    fn power_iterations_keep_exactness() {
        let v0 = outer_sum(15, 20, &[(5.0, 7), (1.0, 8)]);
        let r = rsvd(&v0, &RsvdOptions::new(2, 2).with_power_iterations(2)).unwrap();
        assert!(r.factors.recompose().sub(&v0).frobenius_norm() <= 1e-8 * v0.frobenius_norm());
    }

    #[test]
    fn fixed_seed_is_bitwise_reproducible() {
        let v0 = outer_sum(12, 18, &[(2.0, 1), (1.0, 2), (0.1, 3)]);
        let a = rsvd(&v0, &RsvdOptions::new(2, 77)).unwrap();
        let b = rsvd(&v0, &RsvdOptions::new(2, 77)).unwrap();
        assert_eq!(a.factors, b.factors);
    }
}
