//! Randomized orthogonal decomposition of a snapshot matrix.
//!
//! [`fit`] runs the full pipeline:
//!
//! 1. split the snapshots into `V0 = [u_0 … u_{Nt−1}]` and `V1 = [u_1 … u_Nt]`;
//! 2. randomized SVD `V0 ≈ U·Σ·Wᵀ` at the requested rank;
//! 3. reduced propagator `S = Uᴴ·V1·W·Σ⁻¹`;
//! 4. eigenpairs `S·X = X·Λ`;
//! 5. shape modes `φ_i = U·X_{·,i} / ‖U·X_{·,i}‖`;
//! 6. amplitudes by least squares of every snapshot (including `u_Nt`) on the modes.
//!
//! The twin model is `u(x, t_i) ≈ Σ_j a_j(t_i)·φ_j(x)`; [`reconstruct`]
//! evaluates it on the training grid.

mod model_file;

use num_complex::Complex64;

pub use model_file::{parse_model, read_model, render_model, write_model};

use crate::error::{Error, Result, StageExt};
use crate::linalg::{
    dot, eig_general, least_squares_detailed, norm2, qr_factor, CMatrix, EigenPairs, Matrix,
    Scalar, SvdFactors,
};
use crate::rsvd::{rsvd, RsvdOptions, DEFAULT_OVERSAMPLING};
use crate::snapshot::SnapshotMatrix;

/// Singular values below this fraction of σ_max are not inverted by the propagator.
pub const PROPAGATOR_CUTOFF: f64 = 1e-12;
/// Amplitude solves above this condition number log a warning.
pub const AMPLITUDE_CONDITION_LIMIT: f64 = 1e12;
/// Reconstruction imaginary residue allowed, relative to `max|u|`.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-6;

/// Discrete `L²(D)` inner product on a uniform grid (rectangle rule):
/// `⟨f, g⟩ = dx·Σ f_i·conj(g_i)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerProduct {
    pub dx: f64,
}

impl InnerProduct {
    pub fn new(dx: f64) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::invalid(format!("inner product weight must be positive, got {dx}")));
        }
        Ok(InnerProduct { dx })
    }

    pub fn for_grid(data: &SnapshotMatrix) -> Self {
        InnerProduct { dx: data.dx() }
    }

    pub fn inner<T: Scalar>(&self, f: &[T], g: &[T]) -> T {
        dot(g, f).scale(self.dx)
    }

    pub fn norm<T: Scalar>(&self, f: &[T]) -> f64 {
        self.dx.sqrt() * norm2(f)
    }

    /// `G_ij = ⟨φ_j, φ_i⟩`, i.e. `dx·ΦᴴΦ`.
    pub fn gram(&self, modes: &CMatrix) -> CMatrix {
        modes.adjoint_matmul(modes).scaled(Complex64::new(self.dx, 0.0))
    }

    /// Largest entry of `|G − I|` for the weighted Gram matrix.
    pub fn gram_deviation(&self, modes: &CMatrix) -> f64 {
        let g = self.gram(modes);
        let mut worst: f64 = 0.0;
        for j in 0..g.cols() {
            for i in 0..g.rows() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }
}

/// Configuration of a decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub rank: usize,
    pub seed: u64,
    pub oversampling: usize,
    pub power_iterations: usize,
    pub orthonormalize_sample: bool,
    /// Replace the modes by an orthonormal basis of their span after fitting.
    pub reorthonormalize_modes: bool,
}

impl FitOptions {
    pub fn new(rank: usize, seed: u64) -> Self {
        FitOptions {
            rank,
            seed,
            oversampling: DEFAULT_OVERSAMPLING,
            power_iterations: 0,
            orthonormalize_sample: true,
            reorthonormalize_modes: false,
        }
    }

    pub fn rsvd_options(&self) -> RsvdOptions {
        RsvdOptions {
            target_rank: self.rank,
            seed: self.seed,
            oversampling: self.oversampling,
            power_iterations: self.power_iterations,
            orthonormalize_sample: self.orthonormalize_sample,
        }
    }
}

/// Quantities measured while fitting; none of them alter the model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitDiagnostics {
    /// `max |⟨φ_i, φ_j⟩ − δ_ij|` over the retained modes.
    pub gram_deviation: f64,
    /// `max_i ‖S·x_i − λ_i·x_i‖₂`.
    pub eigen_residual: f64,
    /// `‖V1 − U·S·Uᴴ·V0‖_F`: one-step residual of the reduced propagator.
    pub propagator_residual: f64,
    pub amplitude_condition: f64,
    /// Singular directions discarded before inverting Σ.
    pub truncated_directions: usize,
    /// Modes discarded because `U·X_{·,i}` vanished.
    pub dropped_modes: usize,
}

/// A fitted twin data model.
#[derive(Clone, Debug, PartialEq)]
pub struct RodModel {
    /// Nx×N_DTM shape modes, unit norm under [`InnerProduct`].
    pub modes: CMatrix,
    /// N_DTM×(Nt+1) amplitudes `a_j(t_i)`.
    pub amplitudes: CMatrix,
    /// Propagator eigenvalue paired with each mode.
    pub eigenvalues: Vec<Complex64>,
    pub options: FitOptions,
    pub x_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub dx: f64,
    pub dt: f64,
    pub diagnostics: FitDiagnostics,
}

impl RodModel {
    /// Number of retained modes, N_DTM.
    pub fn rank(&self) -> usize {
        self.modes.cols()
    }

    pub fn seed(&self) -> u64 {
        self.options.seed
    }

    pub fn nx(&self) -> usize {
        self.modes.rows()
    }

    pub fn n_snapshots(&self) -> usize {
        self.amplitudes.cols()
    }

    pub fn inner_product(&self) -> InnerProduct {
        InnerProduct { dx: self.dx }
    }

    /// `Φ·A` before taking the real part.
    pub fn complex_field(&self) -> CMatrix {
        self.modes.matmul(&self.amplitudes)
    }
}

/// `(V0, V1)`: columns `0..Nt` and `1..=Nt`.
pub fn shift_split(data: &SnapshotMatrix) -> Result<(Matrix<f64>, Matrix<f64>)> {
    let n = data.n_snapshots();
    if n < 2 {
        return Err(Error::invalid("time-shifted split needs at least two snapshots"));
    }
    let v = data.values();
    Ok((v.columns(0..n - 1), v.columns(1..n)))
}

/// Reduced propagator together with the rank actually inverted.
#[derive(Clone, Debug)]
pub struct Propagator {
    /// `retained × retained` matrix `S`.
    pub matrix: Matrix<f64>,
    pub retained: usize,
    pub truncated: usize,
}

/// `S = Uᴴ·V1·W·Σ⁻¹`, skipping singular directions below `1e-12·σ_max`.
pub fn propagator(svd: &SvdFactors, v1: &Matrix<f64>) -> Result<Propagator> {
    if svd.u.rows() != v1.rows() || svd.w.rows() != v1.cols() {
        return Err(Error::shape(format!(
            "propagator: U is {}x{}, W is {}x{}, V1 is {}x{}",
            svd.u.rows(),
            svd.u.cols(),
            svd.w.rows(),
            svd.w.cols(),
            v1.rows(),
            v1.cols()
        )));
    }
    let smax = svd.sigma.first().copied().unwrap_or(0.0);
    let retained = svd
        .sigma
        .iter()
        .take_while(|&&s| s > PROPAGATOR_CUTOFF * smax && s > 0.0)
        .count();
    if retained == 0 {
        return Err(Error::invalid("all singular values vanish; the data carries no dynamics"));
    }
    let truncated = svd.sigma.len() - retained;
    if truncated > 0 {
        log::warn!("propagator: truncated {truncated} near-zero singular direction(s)");
    }
    let u = svd.u.columns(0..retained);
    let mut w_scaled = svd.w.columns(0..retained);
    for j in 0..retained {
        let inv = 1.0 / svd.sigma[j];
        for v in w_scaled.col_mut(j) {
            *v *= inv;
        }
    }
    let matrix = u.adjoint_matmul(&v1.matmul(&w_scaled));
    Ok(Propagator {
        matrix,
        retained,
        truncated,
    })
}

/// Shape modes and the eigenpair index each one came from.
#[derive(Clone, Debug)]
pub struct ModeSet {
    pub modes: CMatrix,
    pub kept: Vec<usize>,
    pub dropped: usize,
}

/// `φ_i = U·X_{·,i}` normalized to unit `L²(D)` norm.
pub fn rod_modes(svd: &SvdFactors, eig: &EigenPairs, ip: &InnerProduct) -> Result<ModeSet> {
    let k = eig.vectors.rows();
    if svd.u.cols() < k {
        return Err(Error::shape(format!(
            "{k} eigenvectors for only {} singular vectors",
            svd.u.cols()
        )));
    }
    let u = svd.u.columns(0..k).to_complex();
    let raw = u.matmul(&eig.vectors);
    let scale = svd.u.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut kept = Vec::with_capacity(k);
    for i in 0..k {
        if norm2(raw.col(i)) > 1e-14 * scale {
            kept.push(i);
        }
    }
    let dropped = k - kept.len();
    if dropped > 0 {
        log::warn!("rod_modes: dropped {dropped} vanishing mode(s)");
    }
    let mut modes = raw.select_columns(&kept);
    for j in 0..modes.cols() {
        let nrm = ip.norm(modes.col(j));
        for v in modes.col_mut(j) {
            *v = v.scale(1.0 / nrm);
        }
    }
    Ok(ModeSet {
        modes,
        kept,
        dropped,
    })
}

/// Orthonormal basis (under `ip`) of the span of `modes`.
pub fn reorthonormalize(modes: &CMatrix, ip: &InnerProduct) -> Result<CMatrix> {
    let q = qr_factor(modes)?.q;
    Ok(q.scaled(Complex64::new(1.0 / ip.dx.sqrt(), 0.0)))
}

/// Amplitudes and the conditioning of the mode matrix.
#[derive(Clone, Debug)]
pub struct Amplitudes {
    pub values: CMatrix,
    pub condition: f64,
}

/// `A = argmin ‖Φ·A − V‖` in the dx-weighted norm (a constant weight, so the
/// ordinary least-squares minimizer). Reduces to `a_j(t_i) = ⟨u(·,t_i), φ_j⟩`
/// when the modes are orthonormal.
pub fn amplitudes(modes: &CMatrix, data: &SnapshotMatrix, _ip: &InnerProduct) -> Result<Amplitudes> {
    if modes.rows() != data.nx() {
        return Err(Error::shape(format!(
            "modes have {} rows, snapshots have {}",
            modes.rows(),
            data.nx()
        )));
    }
    if modes.cols() == 0 {
        return Err(Error::invalid("no modes to fit amplitudes on"));
    }
    if modes.cols() > data.n_snapshots() {
        return Err(Error::invalid(format!(
            "{} modes exceed {} snapshots",
            modes.cols(),
            data.n_snapshots()
        )));
    }
    let ls = least_squares_detailed(modes, &data.values().to_complex())?;
    if ls.condition > AMPLITUDE_CONDITION_LIMIT {
        log::warn!(
            "amplitudes: mode matrix condition {:e} exceeds {:e}; using minimum-norm solve",
            ls.condition,
            AMPLITUDE_CONDITION_LIMIT
        );
    }
    Ok(Amplitudes {
        values: ls.solution,
        condition: ls.condition,
    })
}

/// Fit with default options: oversampled, orthonormalized randomized sampling.
pub fn fit(data: &SnapshotMatrix, rank: usize, seed: u64) -> Result<RodModel> {
    fit_with(data, &FitOptions::new(rank, seed))
}

pub fn fit_with(data: &SnapshotMatrix, opts: &FitOptions) -> Result<RodModel> {
    let (v0, v1) = shift_split(data).stage("shift_split")?;
    let bound = v0.rows().min(v0.cols());
    if opts.rank == 0 || opts.rank > bound {
        return Err(Error::invalid(format!("rank {} outside 1..={bound}", opts.rank)));
    }
    let ip = InnerProduct::new(data.dx())?;

    let sampled = rsvd(&v0, &opts.rsvd_options()).stage("rsvd")?;
    let prop = propagator(&sampled.factors, &v1).stage("propagator")?;
    let svd = sampled.factors.truncate(prop.retained);
    let eig = eig_general(&prop.matrix).stage("eigen")?;
    let mode_set = rod_modes(&svd, &eig, &ip).stage("modes")?;

    let modes = if opts.reorthonormalize_modes {
        reorthonormalize(&mode_set.modes, &ip).stage("modes")?
    } else {
        mode_set.modes
    };
    let eigenvalues: Vec<Complex64> = mode_set.kept.iter().map(|&i| eig.values[i]).collect();
    let amps = amplitudes(&modes, data, &ip).stage("amplitudes")?;

    let u = svd.u.clone();
    let predicted = u.matmul(&prop.matrix.matmul(&u.adjoint_matmul(&v0)));
    let diagnostics = FitDiagnostics {
        gram_deviation: ip.gram_deviation(&modes),
        eigen_residual: eig.max_residual(&prop.matrix),
        propagator_residual: v1.sub(&predicted).frobenius_norm(),
        amplitude_condition: amps.condition,
        truncated_directions: prop.truncated,
        dropped_modes: mode_set.dropped,
    };

    Ok(RodModel {
        modes,
        amplitudes: amps.values,
        eigenvalues,
        options: *opts,
        x_grid: data.x_grid().to_vec(),
        t_grid: data.t_grid().to_vec(),
        dx: data.dx(),
        dt: data.dt(),
        diagnostics,
    })
}

/// Largest `|Im(Φ·A)|` relative to the largest `|Re(Φ·A)|`.
pub fn imaginary_residue(model: &RodModel) -> f64 {
    let field = model.complex_field();
    let scale = field.real_part().max_abs();
    let imag = field.imag_part().max_abs();
    if scale == 0.0 {
        imag
    } else {
        imag / scale
    }
}

/// Evaluate the twin model on the training grid: `Re(Φ·A)`.
pub fn reconstruct(model: &RodModel) -> Result<SnapshotMatrix> {
    let field = model.complex_field();
    let real = field.real_part();
    let scale = real.max_abs();
    let imag = field.imag_part().max_abs();
    if imag > IMAG_RESIDUE_LIMIT * scale {
        log::warn!(
            "reconstruct: imaginary residue {imag:e} exceeds {IMAG_RESIDUE_LIMIT:e}·max|u| = {:e}",
            IMAG_RESIDUE_LIMIT * scale
        );
    }
    SnapshotMatrix::from_grids(real, model.x_grid.clone(), model.t_grid.clone())
}
