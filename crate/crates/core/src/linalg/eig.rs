//! Eigenpairs of dense nonsymmetric matrices.
//!
//! The matrix is promoted to complex arithmetic, reduced to upper Hessenberg
//! form with Householder reflectors, and driven to complex Schur form by
//! Wilkinson-shifted QR sweeps built from Givens rotations. Eigenvectors are
//! recovered by back-substitution on the triangular factor and mapped back
//! through the accumulated unitary transform.

use num_complex::Complex64;

use super::qr::Reflector;
use super::{norm2, CMatrix, Matrix, Scalar};
use crate::error::{Error, Result};

/// Eigenvalues and unit-norm eigenvectors; column `i` pairs with `values[i]`.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<Complex64>,
    pub vectors: CMatrix,
}

impl EigenPairs {
    /// Largest `‖S·xᵢ − λᵢ·xᵢ‖₂` over all pairs.
    pub fn max_residual(&self, s: &Matrix<f64>) -> f64 {
        let sc = s.to_complex();
        (0..self.values.len())
            .map(|i| {
                let x = self.vectors.col(i);
                let sx = sc.matvec(x);
                let r: Vec<Complex64> = sx
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| a - self.values[i] * b)
                    .collect();
                norm2(&r)
            })
            .fold(0.0, f64::max)
    }
}

/// Eigen-decomposition of a real square matrix.
///
/// Results are ordered by decreasing modulus. Complex eigenvalues come in
/// adjacent conjugate pairs (positive imaginary part first) whose vectors are
/// exact conjugates of each other; eigenvalues with imaginary part below
/// `1e-10·‖S‖_F` are returned as real with real eigenvectors.
pub fn eig_general(s: &Matrix<f64>) -> Result<EigenPairs> {
    let (n, m) = s.shape();
    if n != m {
        return Err(Error::shape(format!("eig_general needs a square matrix, got {n}x{m}")));
    }
    if n == 0 {
        return Err(Error::shape("eig_general of an empty matrix"));
    }
    s.check_finite()?;

    let (values, vectors) = eig_complex(&s.to_complex())?;
    let fro = s.frobenius_norm();
    Ok(pair_conjugates(values, vectors, 1e-10 * fro))
}

/// Unordered eigenpairs of a complex square matrix.
pub(crate) fn eig_complex(a: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    let n = a.rows();
    let (mut h, mut z) = hessenberg(a);
    schur(&mut h, &mut z)?;
    let y = triangular_eigenvectors(&h);
    let mut x = z.matmul(&y);
    for j in 0..n {
        let nrm = norm2(x.col(j));
        for v in x.col_mut(j) {
            *v = v.scale(1.0 / nrm);
        }
    }
    let values = (0..n).map(|i| h[(i, i)]).collect();
    Ok((values, x))
}

/// Householder reduction `A = Z·H·Zᴴ` with `H` upper Hessenberg.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut z = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let Some(r) = Reflector::new(&x) else { continue };
        // Left: rows k+1.. of every column from k on.
        for c in k..n {
            r.apply_left(&mut h.col_mut(c)[k + 1..]);
        }
        // Right: columns k+1.. of every row, for both H and Z.
        for mat in [&mut h, &mut z] {
            for row in 0..n {
                let t: Complex64 = (k + 1..n).map(|c| mat[(row, c)] * r.v[c - k - 1]).sum();
                let t = t.scale(r.beta);
                for c in k + 1..n {
                    let upd = t * r.v[c - k - 1].conj();
                    mat[(row, c)] -= upd;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (h, z)
}

/// Givens rotation `G = [[c, s], [−conj(s), c]]` with `G·(a, b)ᵀ = (r, 0)ᵀ`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let nrm = an.hypot(bn);
    let c = an / nrm;
    let s = (a / an) * b.conj() / nrm;
    (c, s)
}

/// In-place reduction of Hessenberg `h` to upper triangular Schur form,
/// accumulating the unitary transforms into `z`.
fn schur(h: &mut CMatrix, z: &mut CMatrix) -> Result<()> {
    let n = h.rows();
    let cap = 100 * n.max(1);
    let norm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    let zero = Complex64::new(0.0, 0.0);

    while hi > 0 {
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = norm;
            }
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(Error::NoConvergence {
                algorithm: "shifted QR eigen-iteration",
                iterations: cap,
            });
        }

        let mu = if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for col in k..n {
                let a = h[(k, col)];
                let b = h[(k + 1, col)];
                h[(k, col)] = a.scale(c) + s * b;
                h[(k + 1, col)] = -s.conj() * a + b.scale(c);
            }
            h[(k + 1, k)] = zero;
            rotations.push((c, s));
        }
        for (k, &(c, s)) in (lo..hi).zip(&rotations) {
            let top = (k + 2).min(hi);
            for row in 0..=top {
                let a = h[(row, k)];
                let b = h[(row, k + 1)];
                h[(row, k)] = a.scale(c) + b * s.conj();
                h[(row, k + 1)] = -a * s + b.scale(c);
            }
            for row in 0..n {
                let a = z[(row, k)];
                let b = z[(row, k + 1)];
                z[(row, k)] = a.scale(c) + b * s.conj();
                z[(row, k + 1)] = -a * s + b.scale(c);
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Columns `y` with `T·y = T[i][i]·y`, `y[i] = 1`, `y[j>i] = 0`.
fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let n = t.rows();
    let small = f64::EPSILON * t.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut y = CMatrix::zeros(n, n);
    for i in 0..n {
        let lambda = t[(i, i)];
        let col = y.col_mut(i);
        col[i] = Complex64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let s: Complex64 = (j + 1..=i).map(|k| t[(j, k)] * col[k]).sum();
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            col[j] = -s / denom;
            let big = col[j].norm();
            if big > 1e100 {
                for v in col[j..=i].iter_mut() {
                    *v = v.scale(1.0 / big);
                }
            }
        }
    }
    y
}

/// Order eigenpairs by modulus, snap near-real values to the real axis, and
/// make conjugate partners exact conjugates of one another.
fn pair_conjugates(values: Vec<Complex64>, vectors: CMatrix, real_tol: f64) -> EigenPairs {
    let n = values.len();
    let mut used = vec![false; n];
    // Each group is (representative value, vector, has_partner).
    let mut groups: Vec<(Complex64, Vec<Complex64>, bool)> = Vec::new();

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[b].im.total_cmp(&values[a].im));
    for &i in &idx {
        if used[i] {
            continue;
        }
        used[i] = true;
        let v = values[i];
        if v.im.abs() <= real_tol {
            groups.push((Complex64::new(v.re, 0.0), realify(vectors.col(i)), false));
            continue;
        }
        if v.im > 0.0 {
            let partner = (0..n)
                .filter(|&j| !used[j] && values[j].im < -real_tol)
                .min_by(|&a, &b| {
                    (values[a] - v.conj())
                        .norm()
                        .total_cmp(&(values[b] - v.conj()).norm())
                });
            if let Some(j) = partner {
                if (values[j] - v.conj()).norm() <= 1e-6 * v.norm().max(real_tol) {
                    used[j] = true;
                    let avg = (v + values[j].conj()) * 0.5;
                    groups.push((avg, vectors.col(i).to_vec(), true));
                    continue;
                }
            }
        }
        groups.push((v, vectors.col(i).to_vec(), false));
    }

    groups.sort_by(|a, b| {
        b.0.norm()
            .total_cmp(&a.0.norm())
            .then(b.0.re.total_cmp(&a.0.re))
            .then(b.0.im.total_cmp(&a.0.im))
    });

    let mut out_values = Vec::with_capacity(n);
    let mut out = CMatrix::zeros(vectors.rows(), n);
    let mut k = 0;
    for (v, x, paired) in groups {
        out.col_mut(k).copy_from_slice(&x);
        out_values.push(v);
        k += 1;
        if paired {
            for (dst, src) in out.col_mut(k).iter_mut().zip(&x) {
                *dst = src.conj();
            }
            out_values.push(v.conj());
            k += 1;
        }
    }
    EigenPairs {
        values: out_values,
        vectors: out,
    }
}

/// Rotate a vector so its largest component is real positive, drop the
/// imaginary residue and renormalize.
fn realify(x: &[Complex64]) -> Vec<Complex64> {
    let pivot = x
        .iter()
        .copied()
        .fold(Complex64::new(0.0, 0.0), |b, v| if v.norm() > b.norm() { v } else { b });
    let ph = pivot.phase().conj();
    let re: Vec<f64> = x.iter().map(|v| (v * ph).re).collect();
    let nrm = norm2(&re);
    re.iter().map(|&r| Complex64::new(r / nrm, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(s: &Matrix<f64>) -> EigenPairs {
        let e = eig_general(s).unwrap();
        assert!(
            e.max_residual(s) <= 1e-8 * s.frobenius_norm(),
            "residual {}",
            e.max_residual(s)
        );
        for j in 0..s.rows() {
            assert!((norm2(e.vectors.col(j)) - 1.0).abs() < 1e-12);
        }
        e
    }

    #[test]
    fn diagonal_matrix() {
        let e = check(&Matrix::from_rows(&[[2.0, 0.0], [0.0, 5.0]]).unwrap());
        assert_eq!(e.values[0], Complex64::new(5.0, 0.0));
        assert_eq!(e.values[1], Complex64::new(2.0, 0.0));
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_has_imaginary_unit_spectrum() {
        let e = check(&Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap());
        assert!((e.values[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert_eq!(e.values[1], e.values[0].conj());
        assert_eq!(e.vectors[(0, 1)], e.vectors[(0, 0)].conj());
    }

    #[test]
    fn symmetric_input_gives_real_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = Matrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
        let s = b.add(&b.transpose());
        let e = check(&s);
        assert!(e.values.iter().all(|v| v.im.abs() <= 1e-9 * s.frobenius_norm()));
    }

    #[test]
    fn random_nonsymmetric_residuals() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 2 + (seed as usize % 12);
            let s = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let e = check(&s);
            let mods: Vec<f64> = e.values.iter().map(|v| v.norm()).collect();
            assert!(mods.windows(2).all(|w| w[0] >= w[1] - 1e-12));
            let mut k = 0;
            while k < n {
                if e.values[k].im != 0.0 {
                    assert_eq!(e.values[k + 1], e.values[k].conj());
                    k += 2;
                } else {
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn repeated_eigenvalue_identity() {
        let e = check(&Matrix::<f64>::identity(4).scaled(2.0));
        assert!(e.values.iter().all(|&v| v == Complex64::new(2.0, 0.0)));
    }

    #[test]
    fn jordan_block_is_handled() {
        let s = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let e = eig_general(&s).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0).norm() < 1e-7));
    }

    #[test]
    fn non_square_rejected() {
        assert!(eig_general(&Matrix::<f64>::zeros(2, 3)).is_err());
    }
}
