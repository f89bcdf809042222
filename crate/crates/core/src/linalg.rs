//! Small dense kernels: cyclic Jacobi eigensolver and what is built on it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Sweep stops once the off-diagonal Frobenius norm falls below this
/// fraction of the matrix norm.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// `A = Q diag(values) Q^t` with orthonormal columns in `Q`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymmetricEigen {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.vectors * DMatrix::from_diagonal(&self.values) * self.vectors.transpose()
    }

    /// `Q f(diag) Q^t`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d = self.values.map(f);
        &self.vectors * DMatrix::from_diagonal(&d) * self.vectors.transpose()
    }
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi rotations on a symmetric matrix.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Domain("eigensolver needs a square matrix".into()));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("matrix entries must be finite".into()));
    }
    let mut m = (a + a.transpose()) * 0.5;
    let mut q = DMatrix::<f64>::identity(n, n);
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let mut converged = off_diagonal_norm(&m) <= JACOBI_TOLERANCE * scale;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        for p in 0..n {
            for r in p + 1..n {
                let apr = m[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (m[(r, r)] - m[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkr) = (m[(k, p)], m[(k, r)]);
                    m[(k, p)] = c * mkp - s * mkr;
                    m[(k, r)] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let (mpk, mrk) = (m[(p, k)], m[(r, k)]);
                    m[(p, k)] = c * mpk - s * mrk;
                    m[(r, k)] = s * mpk + c * mrk;
                }
                for k in 0..n {
                    let (qkp, qkr) = (q[(k, p)], q[(k, r)]);
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&m) <= JACOBI_TOLERANCE * scale;
    }
    if !converged {
        return Err(Error::Internal(format!("Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| m[(i, i)]));
    let vectors = DMatrix::from_fn(n, n, |row, col| q[(row, order[col])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Max-norm of `M - I`.
pub fn identity_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    (m - DMatrix::<f64>::identity(n, n)).amax()
}

pub fn from_rows(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let ncols = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}
