//! Linear-algebra kernels checked against independent textbook algorithms.

use num_complex::Complex64;
use rod_core::linalg::{eig_general, least_squares, qr_factor, svd_economy, Matrix};
use rod_core::rsvd::gaussian_test_matrix;

/// Characteristic polynomial coefficients by Faddeev–LeVerrier:
/// `det(λI − A) = λⁿ + c[1]λⁿ⁻¹ + … + c[n]`, with `c[0] = 1`.
fn char_poly(a: &Matrix<f64>) -> Vec<f64> {
    let n = a.rows();
    let mut c = vec![1.0];
    let mut m = Matrix::<f64>::zeros(n, n);
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{k−1}·I
        let mut next = a.matmul(&m);
        for i in 0..n {
            next.col_mut(i)[i] += c[k - 1];
        }
        m = next;
        let am = a.matmul(&m);
        let trace: f64 = (0..n).map(|i| am[(i, i)]).sum();
        c.push(-trace / k as f64);
    }
    c
}

/// All roots of a monic polynomial by Durand–Kerner iteration.
fn durand_kerner(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let eval = |z: Complex64| c.iter().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * z + ci);
    let bound = 1.0 + c[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound * 0.5).collect();
    for _ in 0..5000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    // Polish each root with Newton steps on the polynomial.
    let deriv: Vec<f64> = c[..n].iter().enumerate().map(|(k, &ci)| ci * (n - k) as f64).collect();
    let eval_d = |z: Complex64| deriv.iter().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * z + ci);
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = eval_d(*r);
            if d.norm() > 0.0 {
                *r -= eval(*r) / d;
            }
        }
    }
    z
}

#[test]
fn eigenvalues_match_characteristic_polynomial_roots() {
    for seed in 0..10 {
        let a = gaussian_test_matrix(8, 8, 100 + seed).unwrap();
        let eig = eig_general(&a).unwrap();
        let roots = durand_kerner(&char_poly(&a));
        let mut unmatched = roots.clone();
        for &lambda in &eig.values {
            let (idx, dist) = unmatched
                .iter()
                .enumerate()
                .map(|(i, r)| (i, (r - lambda).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            assert!(dist <= 1e-7 * (1.0 + lambda.norm()), "seed {seed}: {lambda} off by {dist}");
            unmatched.remove(idx);
        }
        assert!(eig.max_residual(&a) < 1e-10);
    }
}

/// Eigenvalues of a symmetric matrix by cyclic two-sided Jacobi rotations.
fn jacobi_eigenvalues(mut a: Matrix<f64>) -> Vec<f64> {
    let n = a.rows();
    let get = |a: &Matrix<f64>, i: usize, j: usize| a[(i, j)];
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| get(&a, i, j).powi(2))
            .sum();
        if off.sqrt() < 1e-15 * a.frobenius_norm() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = get(&a, p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (get(&a, q, q) - get(&a, p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← Jᵀ·A·J with J the (p, q) rotation.
                let mut b = a.clone();
                for k in 0..n {
                    let akp = get(&a, k, p);
                    let akq = get(&a, k, q);
                    b.col_mut(p)[k] = c * akp - s * akq;
                    b.col_mut(q)[k] = s * akp + c * akq;
                }
                let mut out = b.clone();
                for k in 0..n {
                    let bpk = get(&b, p, k);
                    let bqk = get(&b, q, k);
                    out.col_mut(k)[p] = c * bpk - s * bqk;
                    out.col_mut(k)[q] = s * bpk + c * bqk;
                }
                a = out;
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

#[test]
fn singular_values_match_gram_eigenvalues() {
    for (m, n, seed) in [(12, 5, 1), (7, 7, 2), (30, 9, 3), (6, 10, 4)] {
        let a = gaussian_test_matrix(m.max(n), m.min(n), seed).unwrap();
        let a = if m >= n { a } else { a.transpose() };
        let svd = svd_economy(&a).unwrap();
        let ev = jacobi_eigenvalues(a.transpose().matmul(&a));
        for (s, e) in svd.sigma.iter().zip(&ev) {
            let oracle = e.max(0.0).sqrt();
            assert!((s - oracle).abs() <= 1e-10 * svd.sigma[0], "{m}x{n}: {s} vs {oracle}");
        }
        assert!(svd.recompose().sub(&a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
    }
}

#[test]
fn qr_diagonal_matches_gram_schmidt_norms() {
    let a = gaussian_test_matrix(15, 6, 9).unwrap();
    let qr = qr_factor(&a).unwrap();
    // Modified Gram–Schmidt, computed independently.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for j in 0..6 {
        let mut v = a.col(j).to_vec();
        for b in &basis {
            let d: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= d * bi;
            }
        }
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((qr.r[(j, j)] - nrm).abs() < 1e-12 * nrm, "column {j}");
        basis.push(v.iter().map(|x| x / nrm).collect());
        for (i, b) in basis[j].iter().enumerate() {
            assert!((qr.q[(i, j)] - b).abs() < 1e-10);
        }
    }
}

#[test]
fn least_squares_matches_normal_equations() {
    let a = gaussian_test_matrix(20, 4, 11).unwrap();
    let b = gaussian_test_matrix(20, 2, 12).unwrap();
    let x = least_squares(&a, &b).unwrap();
    // Residual must be orthogonal to the column space.
    let r = a.matmul(&x).sub(&b);
    let g = a.transpose().matmul(&r);
    assert!(g.max_abs() < 1e-12);
}
