use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Relative tolerance for grid uniformity.
const GRID_TOL: f64 = 1e-12;

/// Snapshot matrix: column `i` holds the field sampled on `x_grid` at time
/// `t_grid[i]`. Both grids are strictly increasing and uniformly spaced.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotMatrix {
    values: Matrix<f64>,
    x_grid: Vec<f64>,
    t_grid: Vec<f64>,
    dx: f64,
    dt: f64,
}

impl SnapshotMatrix {
    /// Grids `x_i = i·dx` and `t_j = j·dt`.
    pub fn from_uniform(values: Matrix<f64>, dx: f64, dt: f64) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("grid spacings must be positive, got dx={dx}, dt={dt}")));
        }
        let x = (0..values.rows()).map(|i| i as f64 * dx).collect();
        let t = (0..values.cols()).map(|j| j as f64 * dt).collect();
        Self::build(values, x, t, dx, dt)
    }

    /// Explicit grids. The spatial grid needs at least two points; a single
    /// time sample is allowed and gets `dt = 0`.
    pub fn from_grids(values: Matrix<f64>, x_grid: Vec<f64>, t_grid: Vec<f64>) -> Result<Self> {
        if x_grid.len() < 2 {
            return Err(Error::invalid("spatial grid needs at least two points"));
        }
        let dx = uniform_spacing(&x_grid, "x")?;
        let dt = if t_grid.len() == 1 {
            0.0
        } else {
            uniform_spacing(&t_grid, "t")?
        };
        Self::build(values, x_grid, t_grid, dx, dt)
    }

    fn build(values: Matrix<f64>, x_grid: Vec<f64>, t_grid: Vec<f64>, dx: f64, dt: f64) -> Result<Self> {
        if values.rows() != x_grid.len() || values.cols() != t_grid.len() {
            return Err(Error::shape(format!(
                "values are {}x{} but grids have {} x {} points",
                values.rows(),
                values.cols(),
                x_grid.len(),
                t_grid.len()
            )));
        }
        if values.rows() == 0 || values.cols() == 0 {
            return Err(Error::shape("empty snapshot matrix"));
        }
        values.check_finite()?;
        Ok(SnapshotMatrix {
            values,
            x_grid,
            t_grid,
            dx,
            dt,
        })
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Matrix<f64>) -> Result<Self> {
        Self::build(values, self.x_grid.clone(), self.t_grid.clone(), self.dx, self.dt)
    }

    pub fn values(&self) -> &Matrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> Matrix<f64> {
        self.values
    }

    pub fn x_grid(&self) -> &[f64] {
        &self.x_grid
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of spatial points `Nx`.
    pub fn nx(&self) -> usize {
        self.values.rows()
    }

    /// Number of snapshots `Nt + 1`.
    pub fn n_snapshots(&self) -> usize {
        self.values.cols()
    }

    /// Index of the last snapshot, `Nt`.
    pub fn nt(&self) -> usize {
        self.values.cols() - 1
    }

    pub fn column(&self, j: usize) -> &[f64] {
        self.values.col(j)
    }

    /// Extent of the spatial domain.
    pub fn length(&self) -> f64 {
        self.x_grid[self.x_grid.len() - 1] - self.x_grid[0]
    }

    pub fn final_time(&self) -> f64 {
        self.t_grid[self.t_grid.len() - 1]
    }

    /// Whether `other` is sampled on the same grids (to 1e-12 relative).
    pub fn same_grid(&self, other: &SnapshotMatrix) -> bool {
        let close = |a: &[f64], b: &[f64]| {
            a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= GRID_TOL * x.abs().max(y.abs()).max(1.0))
        };
        close(&self.x_grid, &other.x_grid) && close(&self.t_grid, &other.t_grid)
    }
}

fn uniform_spacing(grid: &[f64], axis: &str) -> Result<f64> {
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("{axis} grid has a non-finite entry")));
    }
    let n = grid.len();
    let step = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    if step <= 0.0 {
        return Err(Error::invalid(format!("{axis} grid is not increasing")));
    }
    let scale = grid[0].abs().max(grid[n - 1].abs()).max(step);
    for (i, w) in grid.windows(2).enumerate() {
        let d = w[1] - w[0];
        if d <= 0.0 {
            return Err(Error::invalid(format!("{axis} grid is not strictly increasing at index {}", i + 1)));
        }
        if (d - step).abs() > GRID_TOL * scale {
            return Err(Error::invalid(format!("{axis} grid is not uniform at index {}", i + 1)));
        }
    }
    Ok(step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_constructor_builds_grids() {
        let s = SnapshotMatrix::from_uniform(Matrix::zeros(3, 4), 0.5, 0.1).unwrap();
        assert_eq!(s.x_grid(), &[0.0, 0.5, 1.0]);
        assert_eq!(s.nt(), 3);
        assert!((s.final_time() - 0.3).abs() < 1e-15);
        assert_eq!(s.length(), 1.0);
    }

    #[test]
    fn grid_validation() {
        let v = Matrix::zeros(3, 2);
        assert!(SnapshotMatrix::from_grids(v.clone(), vec![0.0, 1.0, 2.0], vec![0.0, 0.1]).is_ok());
        assert!(SnapshotMatrix::from_grids(v.clone(), vec![0.0, 1.0, 3.0], vec![0.0, 0.1]).is_err());
        assert!(SnapshotMatrix::from_grids(v.clone(), vec![0.0, 1.0, 2.0], vec![0.1, 0.0]).is_err());
        assert!(SnapshotMatrix::from_grids(v.clone(), vec![0.0, 1.0], vec![0.0, 0.1]).is_err());
        assert!(SnapshotMatrix::from_uniform(v, 0.0, 1.0).is_err());
        let single = SnapshotMatrix::from_grids(Matrix::zeros(2, 1), vec![0.0, 1.0], vec![0.0]).unwrap();
        assert_eq!(single.dt(), 0.0);
    }
}
