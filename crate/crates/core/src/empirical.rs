//! Empirical (Fourier) modes and the mean projection norm used to compare
//! them with ROD modes.
//!
//! The empirical basis is the left singular basis of the full snapshot
//! matrix, rescaled to unit `L²(D)` norm: `ψ_i = U_{·,i}/√dx`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{svd_economy, CMatrix, Matrix};
use crate::rod::{InnerProduct, RodModel};
use crate::snapshot::SnapshotMatrix;

/// Singular values at or below this fraction of σ_max are treated as zero.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct FourierModes {
    /// Nx×r modes, orthonormal under the grid inner product.
    pub psi: Matrix<f64>,
    pub sigma: Vec<f64>,
    /// r×(Nt+1) coefficients `⟨u(·,t_i), ψ_j⟩`.
    pub coefficients: Matrix<f64>,
    /// Numerical rank `r` of the snapshot matrix.
    pub rank: usize,
}

pub fn fourier_decomposition(data: &SnapshotMatrix) -> Result<FourierModes> {
    let ip = InnerProduct::for_grid(data);
    let svd = svd_economy(data.values())?;
    let rank = svd.numerical_rank(RANK_TOL);
    if rank == 0 {
        return Err(Error::invalid("snapshot matrix is identically zero; no empirical modes"));
    }
    let psi = svd.u.columns(0..rank).scaled(1.0 / ip.dx.sqrt());
    let coefficients = psi.adjoint_matmul(data.values()).scaled(ip.dx);
    Ok(FourierModes {
        psi,
        sigma: svd.sigma[..rank].to_vec(),
        coefficients,
        rank,
    })
}

/// `P_u φ = (⟨φ, u⟩/⟨u, u⟩)·u`.
pub fn project(phi: &[Complex64], u: &[Complex64], ip: &InnerProduct) -> Result<Vec<Complex64>> {
    if phi.len() != u.len() {
        return Err(Error::shape(format!("projection of length {} onto length {}", phi.len(), u.len())));
    }
    let uu = ip.inner(u, u).re;
    if uu == 0.0 {
        return Err(Error::invalid("cannot project onto a zero snapshot"));
    }
    let c = ip.inner(phi, u) / uu;
    Ok(u.iter().map(|&v| v * c).collect())
}

/// `(1/m)·Σ_i Σ_t |⟨φ_i, u_t⟩|²/⟨u_t, u_t⟩` over the columns `u_t` of `v0`,
/// i.e. the summed squared projection norms divided by `denominator`.
pub fn mean_projection_norm(
    modes: &CMatrix,
    v0: &Matrix<f64>,
    ip: &InnerProduct,
    denominator: usize,
) -> Result<f64> {
    if denominator == 0 {
        return Err(Error::invalid("mean over zero modes"));
    }
    if modes.rows() != v0.rows() {
        return Err(Error::shape(format!("modes have {} rows, snapshots {}", modes.rows(), v0.rows())));
    }
    let mut total = 0.0;
    for t in 0..v0.cols() {
        let u: Vec<Complex64> = v0.col(t).iter().map(|&v| v.into()).collect();
        let uu = ip.inner(&u, &u).re;
        if uu == 0.0 {
            return Err(Error::ZeroColumn { index: t });
        }
        for j in 0..modes.cols() {
            total += ip.inner(modes.col(j), &u).norm_sqr() / uu;
        }
    }
    Ok(total / denominator as f64)
}

fn leading_snapshots(data: &SnapshotMatrix) -> Result<Matrix<f64>> {
    Ok(crate::rod::shift_split(data)?.0)
}

/// ROD convention: average over the N_DTM retained modes, projected on `V0`.
pub fn rod_projection_norm(model: &RodModel, data: &SnapshotMatrix) -> Result<f64> {
    let v0 = leading_snapshots(data)?;
    mean_projection_norm(&model.modes, &v0, &InnerProduct::for_grid(data), model.rank())
}

/// Fourier convention: the first `count` empirical modes projected on `V0`,
/// with the sum divided by Nx.
pub fn fourier_projection_norm(fourier: &FourierModes, data: &SnapshotMatrix, count: usize) -> Result<f64> {
    let n = count.min(fourier.rank);
    let psi = fourier.psi.columns(0..n).to_complex();
    let v0 = leading_snapshots(data)?;
    mean_projection_norm(&psi, &v0, &InnerProduct::for_grid(data), data.nx())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionComparison {
    pub rho_rod: f64,
    /// Using all `r` empirical modes.
    pub rho_fourier: f64,
    /// Using only the first `N_DTM` empirical modes.
    pub rho_fourier_same_rank: f64,
    pub ratio: f64,
    pub dominates: bool,
}

pub fn compare_projections(model: &RodModel, fourier: &FourierModes, data: &SnapshotMatrix) -> Result<ProjectionComparison> {
    let rho_rod = rod_projection_norm(model, data)?;
    let rho_fourier = fourier_projection_norm(fourier, data, fourier.rank)?;
    let rho_fourier_same_rank = fourier_projection_norm(fourier, data, model.rank())?;
    Ok(ProjectionComparison {
        rho_rod,
        rho_fourier,
        rho_fourier_same_rank,
        ratio: rho_rod / rho_fourier,
        dominates: rho_rod > rho_fourier,
    })
}

/// Both sides computed from the same empirical basis and normalization;
/// the ratio is 1 and no dominance is reported.
pub fn fourier_self_comparison(fourier: &FourierModes, data: &SnapshotMatrix) -> Result<ProjectionComparison> {
    let rho = fourier_projection_norm(fourier, data, fourier.rank)?;
    Ok(ProjectionComparison {
        rho_rod: rho,
        rho_fourier: rho,
        rho_fourier_same_rank: rho,
        ratio: 1.0,
        dominates: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> SnapshotMatrix {
        let v = Matrix::from_fn(12, 8, |i, j| (i as f64 * 0.5).sin() * (1.0 + j as f64) + (i as f64 * 0.2).cos() * 0.3);
        SnapshotMatrix::from_uniform(v, 0.1, 0.1).unwrap()
    }

    #[test]
    fn fourier_modes_are_orthonormal_and_reconstruct() {
        let d = data();
        let f = fourier_decomposition(&d).unwrap();
        assert_eq!(f.rank, 2);
        let ip = InnerProduct::for_grid(&d);
        let g = f.psi.adjoint_matmul(&f.psi).scaled(ip.dx);
        assert!(g.sub(&Matrix::identity(2)).max_abs() < 1e-12);
        let back = f.psi.matmul(&f.coefficients);
        assert!(back.sub(d.values()).max_abs() < 1e-10);
    }

    #[test]
    fn projection_is_idempotent_and_parallel() {
        let ip = InnerProduct::new(0.2).unwrap();
        let u: Vec<Complex64> = [1.0, 2.0, -1.0].iter().map(|&v| v.into()).collect();
        let phi: Vec<Complex64> = vec![Complex64::new(0.5, 1.0), 0.3.into(), Complex64::new(0.0, -2.0)];
        let p = project(&phi, &u, &ip).unwrap();
        let pp = project(&p, &u, &ip).unwrap();
        for (a, b) in p.iter().zip(&pp) {
            assert!((a - b).norm() < 1e-14);
        }
        let ratio = p[0] / u[0];
        for (a, b) in p.iter().zip(&u) {
            assert!((a - ratio * b).norm() < 1e-14);
        }
        assert!(project(&phi, &[Complex64::default(); 3], &ip).is_err());
    }

    #[test]
    fn fourier_projection_sum_counts_snapshots() {
        // Each snapshot lies in span(ψ), so Σ_j |⟨ψ_j,u⟩|²/⟨u,u⟩ = 1 per V0 column.
        let d = data();
        let f = fourier_decomposition(&d).unwrap();
        let rho = fourier_projection_norm(&f, &d, f.rank).unwrap();
        assert!((rho * d.nx() as f64 - d.nt() as f64).abs() < 1e-10);
    }

    #[test]
    fn zero_column_is_named() {
        let mut v = Matrix::from_fn(4, 3, |i, j| (i + j) as f64 + 1.0);
        v.col_mut(1).fill(0.0);
        let ip = InnerProduct::new(0.1).unwrap();
        let modes = Matrix::from_fn(4, 1, |i, _| i as f64).to_complex();
        match mean_projection_norm(&modes, &v, &ip, 1) {
            Err(Error::ZeroColumn { index }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn self_comparison_has_unit_ratio() {
        let d = data();
        let c = fourier_self_comparison(&fourier_decomposition(&d).unwrap(), &d).unwrap();
        assert_eq!(c.ratio, 1.0);
        assert!(!c.dominates);
    }

    #[test]
    fn zero_data_has_no_modes() {
        let d = SnapshotMatrix::from_uniform(Matrix::zeros(4, 3), 0.1, 0.1).unwrap();
        assert!(fourier_decomposition(&d).is_err());
    }
}
