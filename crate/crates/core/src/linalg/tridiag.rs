use super::Matrix;
use crate::error::{Error, Result};

/// Eigen-decomposition of a real symmetric tridiagonal matrix by the
/// implicitly shifted QL method.
///
/// `offdiag[i]` couples rows `i` and `i + 1`. Eigenvalues come back in
/// ascending order; column `j` of the returned matrix is the unit
/// eigenvector for `values[j]`.
pub fn eig_sym_tridiag(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Matrix<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::shape("empty tridiagonal matrix"));
    }
    if offdiag.len() + 1 != n {
        return Err(Error::shape(format!(
            "offdiag has length {} for a diagonal of length {n}",
            offdiag.len()
        )));
    }
    if diag.iter().chain(offdiag).any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite tridiagonal entry"));
    }

    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = Matrix::<f64>::identity(n);
    let cap = 100 * n;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > cap {
                return Err(Error::NoConvergence {
                    algorithm: "tridiagonal QL",
                    iterations: cap,
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (zi, zi1) = z.col_pair_mut(i, i + 1);
                for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                    let f = *b;
                    *b = s * *a + c * f;
                    *a = c * *a - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&j| d[j]).collect();
    Ok((values, z.select_columns(&order)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(diag: &[f64], off: &[f64], values: &[f64], vecs: &Matrix<f64>) -> f64 {
        let n = diag.len();
        let mut worst: f64 = 0.0;
        for (j, &lam) in values.iter().enumerate() {
            let x = vecs.col(j);
            for i in 0..n {
                let mut y = diag[i] * x[i] - lam * x[i];
                if i > 0 {
                    y += off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += off[i] * x[i + 1];
                }
                worst = worst.max(y.abs());
            }
        }
        worst
    }

    #[test]
    fn one_by_one() {
        let (v, z) = eig_sym_tridiag(&[4.5], &[]).unwrap();
        assert_eq!(v, vec![4.5]);
        assert_eq!(z[(0, 0)], 1.0);
    }

    #[test]
    fn two_by_two() {
        let (v, z) = eig_sym_tridiag(&[0.0, 0.0], &[1.0]).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        assert!(z.orthonormality_error() < 1e-12);
    }

    #[test]
    fn hermite_jacobi_matrix_is_symmetric_spectrum() {
        let n = 10;
        let off: Vec<f64> = (1..n).map(|i| (i as f64 / 2.0).sqrt()).collect();
        let diag = vec![0.0; n];
        let (v, z) = eig_sym_tridiag(&diag, &off).unwrap();
        for i in 0..n {
            assert!((v[i] + v[n - 1 - i]).abs() < 1e-12);
        }
        assert!(z.orthonormality_error() < 1e-10);
        assert!(residual(&diag, &off, &v, &z) < 1e-12);
        // Each eigenvalue is a root of H_10: the Newton correction
        // H_n(x) / H_n'(x), with H_n' = 2n·H_{n-1}, must vanish.
        for &x in &v {
            let (mut h0, mut h1) = (1.0, 2.0 * x);
            for k in 1..n {
                let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            let step = h1 / (2.0 * n as f64 * h0);
            assert!(step.abs() < 1e-12, "Newton step {step} at {x}");
        }
    }

    #[test]
    fn general_matrix_residual_and_order() {
        let diag = [4.0, -1.0, 2.5, 0.3, 7.0, -3.0];
        let off = [1.0, 0.5, -2.0, 0.0, 1.5];
        let (v, z) = eig_sym_tridiag(&diag, &off).unwrap();
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
        assert!(z.orthonormality_error() < 1e-10);
        assert!(residual(&diag, &off, &v, &z) < 1e-12);
        let trace: f64 = diag.iter().sum();
        assert!((v.iter().sum::<f64>() - trace).abs() < 1e-12);
    }

    #[test]
    fn bad_lengths_rejected() {
        assert!(eig_sym_tridiag(&[1.0, 2.0], &[]).is_err());
        assert!(eig_sym_tridiag(&[], &[]).is_err());
    }
}
