use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::rational::{quantize, Rational};

/// Decimal digits kept when frame entries are turned into exact rationals.
pub const FRAME_DIGITS: u32 = 12;

/// Default tolerance for the orthonormality check.
pub const FRAME_TOLERANCE: f64 = 1e-9;

/// An `n`-dimensional linear subspace of `R^N`, given by `n` orthonormal rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoFrame {
    rows: Vec<Vec<f64>>,
    ambient: usize,
    tolerance: f64,
}

impl OrthoFrame {
    pub fn new(rows: Vec<Vec<f64>>, tolerance: f64) -> Result<Self> {
        let ambient = rows.first().map(Vec::len).ok_or_else(|| domain("frame needs at least one row"))?;
        if tolerance.is_nan() || tolerance < 0.0 {
            return Err(domain("frame tolerance must be nonnegative"));
        }
        if rows.len() > ambient || rows.iter().any(|r| r.len() != ambient) {
            return Err(domain("frame rows must all have length N >= n"));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(domain("frame entries must be finite"));
        }
        let frame = Self { rows, ambient, tolerance };
        let err = frame.gram_error();
        if err > tolerance {
            return Err(domain(format!("rows are not orthonormal: |GG^t - I| = {err:e} > {tolerance:e}")));
        }
        Ok(frame)
    }

    /// The span of the given coordinate axes.
    pub fn coordinate(ambient: usize, axes: &[usize]) -> Result<Self> {
        if axes.iter().any(|&a| a >= ambient) {
            return Err(domain("axis index out of range"));
        }
        let rows = axes
            .iter()
            .map(|&a| (0..ambient).map(|k| if k == a { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(rows, FRAME_TOLERANCE)
    }

    pub fn identity(ambient: usize) -> Result<Self> {
        Self::coordinate(ambient, &(0..ambient).collect::<Vec<_>>())
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `max |(G G^t - I)_{ij}|` with the rows as `G`.
    pub fn gram_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in self.rows.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// The orthogonal projector `G^t G` onto the subspace; independent of the
    /// chosen basis.
    pub fn projector(&self) -> Vec<Vec<f64>> {
        (0..self.ambient)
            .map(|i| (0..self.ambient).map(|j| self.rows.iter().map(|r| r[i] * r[j]).sum()).collect())
            .collect()
    }

    /// Rows rounded to `digits` decimal places as exact rationals.
    pub fn quantized_rows(&self, digits: u32) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| r.iter().map(|&x| quantize(x, digits)).collect()).collect()
    }

    /// Applies `x -> Q x` to the ambient space, i.e. rows become `r Q^t`.
    pub fn rotated(&self, q: &[Vec<f64>]) -> Result<Self> {
        if q.len() != self.ambient || q.iter().any(|r| r.len() != self.ambient) {
            return Err(domain("rotation must be N x N"));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| (0..self.ambient).map(|i| q[i].iter().zip(r).map(|(a, b)| a * b).sum()).collect())
            .collect();
        Self::new(rows, self.tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_orthonormal_rows() {
        assert!(OrthoFrame::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]], 1e-9).is_err());
        assert!(OrthoFrame::new(vec![vec![2.0, 0.0]], 1e-9).is_err());
        assert!(OrthoFrame::new(vec![vec![1.0], vec![0.0]], 1e-9).is_err());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(OrthoFrame::new(vec![vec![s, s, 0.0], vec![-s, s, 0.0]], 1e-12).is_ok());
    }

    #[test]
    fn projector_of_coordinate_plane() {
        let f = OrthoFrame::coordinate(3, &[0, 2]).unwrap();
        let p = f.projector();
        assert_eq!(p[0][0], 1.0);
        assert_eq!(p[1][1], 0.0);
        assert_eq!(p[2][2], 1.0);
    }
}
