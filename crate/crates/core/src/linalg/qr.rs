use super::{norm2, Matrix, Scalar};
use crate::error::{Error, Result};

/// Relative threshold on `|R[j][j]|` below which a factorization is flagged.
pub const RANK_DEFICIENCY_TOL: f64 = 1e-12;

/// Thin QR factors: `A = Q·R` with `Q` m×n orthonormal and `R` n×n upper
/// triangular with a real, nonnegative diagonal.
#[derive(Clone, Debug)]
pub struct QrFactors<T = f64> {
    pub q: Matrix<T>,
    pub r: Matrix<T>,
    /// Set when some `|R[j][j]| ≤ 1e-12·max|R[i][i]|`.
    pub rank_deficient: bool,
}

/// Elementary reflector `H = I − β·v·vᴴ` with `H·x = α·e₁`, `α = −phase(x₀)·‖x‖`.
pub(crate) struct Reflector<T> {
    pub v: Vec<T>,
    pub beta: f64,
}

impl<T: Scalar> Reflector<T> {
    /// `None` when `x` is the zero vector (the reflector would be the identity).
    pub fn new(x: &[T]) -> Option<Self> {
        let nrm = norm2(x);
        if nrm == 0.0 {
            return None;
        }
        let alpha = -(x[0].phase().scale(nrm));
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|c| c.abs_sqr()).sum();
        if vnorm_sq == 0.0 {
            return None;
        }
        Some(Reflector {
            v,
            beta: 2.0 / vnorm_sq,
        })
    }

    /// `y ← H·y` for a slice aligned with `v`.
    pub fn apply_left(&self, y: &mut [T]) {
        let s: T = self.v.iter().zip(y.iter()).map(|(&a, &b)| a.conj() * b).sum();
        let s = s.scale(self.beta);
        for (yi, &vi) in y.iter_mut().zip(&self.v) {
            *yi -= vi * s;
        }
    }
}

pub fn qr_factor<T: Scalar>(a: &Matrix<T>) -> Result<QrFactors<T>> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::invalid(format!(
            "qr_factor needs rows >= cols, got {m}x{n}"
        )));
    }
    a.check_finite()?;

    let mut work = a.clone();
    let mut reflectors = Vec::with_capacity(n);
    for j in 0..n {
        let h = Reflector::new(&work.col(j)[j..]);
        if let Some(h) = &h {
            for c in j..n {
                h.apply_left(&mut work.col_mut(c)[j..]);
            }
        }
        reflectors.push(h);
    }

    let mut r = Matrix::from_fn(n, n, |i, c| if i <= c { work[(i, c)] } else { T::zero() });

    let mut q = Matrix::from_fn(m, n, |i, c| if i == c { T::one() } else { T::zero() });
    for (j, h) in reflectors.iter().enumerate().rev() {
        if let Some(h) = h {
            for c in j..n {
                h.apply_left(&mut q.col_mut(c)[j..]);
            }
        }
    }

    // Rotate each (column of Q, row of R) pair so that R has a nonnegative diagonal.
    for j in 0..n {
        let d = r[(j, j)];
        if d.abs() == 0.0 {
            continue;
        }
        let ph = d.phase();
        for c in j..n {
            r[(j, c)] = ph.conj() * r[(j, c)];
        }
        r[(j, j)] = T::from_real(d.abs());
        for v in q.col_mut(j) {
            *v *= ph;
        }
    }

    let max_diag = (0..n).fold(0.0_f64, |acc, j| acc.max(r[(j, j)].abs()));
    let rank_deficient =
        max_diag == 0.0 || (0..n).any(|j| r[(j, j)].abs() <= RANK_DEFICIENCY_TOL * max_diag);

    Ok(QrFactors {
        q,
        r,
        rank_deficient,
    })
}

/// Solve `R·X = B` for upper-triangular, nonsingular `R`.
pub(crate) fn solve_upper<T: Scalar>(r: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let n = r.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        let col = x.col_mut(c);
        for i in (0..n).rev() {
            let mut s = col[i];
            for k in i + 1..n {
                s -= r[(i, k)] * col[k];
            }
            col[i] = s / r[(i, i)];
        }
    }
    x
}
