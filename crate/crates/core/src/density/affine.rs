use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// z = A w + b with A invertible.
///
/// `tau = max(s_max², 1/s_min²)` makes both A and A⁻¹ √τ-Lipschitz.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    offset: DVector<f64>,
    s_min: f64,
    s_max: f64,
    ln_abs_det: f64,
}

/// Reciprocal condition number below which A is treated as singular.
const SINGULAR_RCOND: f64 = 1e-13;

impl AffineMap {
    pub fn new(matrix: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        let d = matrix.nrows();
        if d == 0 || matrix.ncols() != d {
            return Err(Error::input(format!(
                "affine matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if offset.len() != d {
            return Err(Error::Dimension { expected: d, got: offset.len() });
        }
        if matrix.iter().chain(offset.iter()).any(|x| !x.is_finite()) {
            return Err(Error::input("affine map has non-finite entries"));
        }
        let sv = matrix.clone().svd(false, false).singular_values;
        let s_max = sv.max();
        let s_min = sv.min();
        if !(s_min > SINGULAR_RCOND * s_max) {
            return Err(Error::input("affine matrix is singular"));
        }
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::input("affine matrix is singular"))?;
        let ln_abs_det = sv.iter().map(|s| s.ln()).sum();
        Ok(AffineMap { matrix, inverse, offset, s_min, s_max, ln_abs_det })
    }

    pub fn from_rows(rows: &[Vec<f64>], offset: &[f64]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::input("affine matrix rows must all have length d"));
        }
        let m = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        AffineMap::new(m, DVector::from_column_slice(offset))
    }

    pub fn translation(offset: &[f64]) -> Self {
        let d = offset.len();
        AffineMap::new(DMatrix::identity(d, d), DVector::from_column_slice(offset))
            .expect("identity is invertible")
    }

    pub fn scaled_translation(scale: f64, offset: &[f64]) -> Result<Self> {
        let d = offset.len();
        AffineMap::new(DMatrix::identity(d, d) * scale, DVector::from_column_slice(offset))
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn offset(&self) -> &[f64] {
        self.offset.as_slice()
    }

    pub fn tau(&self) -> f64 {
        (self.s_max * self.s_max).max(1.0 / (self.s_min * self.s_min))
    }

    pub fn singular_range(&self) -> (f64, f64) {
        (self.s_min, self.s_max)
    }

    pub fn ln_abs_det(&self) -> f64 {
        self.ln_abs_det
    }

    /// The same map with A replaced by c·A.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        AffineMap::new(&self.matrix * c, self.offset.clone())
    }

    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| self.offset[i] + (0..d).map(|j| self.matrix[(i, j)] * w[j]).sum::<f64>())
            .collect()
    }

    pub fn apply_inverse(&self, z: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.inverse[(i, j)] * (z[j] - self.offset[j])).sum::<f64>())
            .collect()
    }

    /// |A⁻¹(z − b)| without allocating.
    #[inline]
    pub fn inverse_norm(&self, z: &[f64]) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            let mut wi = 0.0;
            for j in 0..d {
                wi += self.inverse[(i, j)] * (z[j] - self.offset[j]);
            }
            acc += wi * wi;
        }
        acc.sqrt()
    }

    /// A_self⁻¹ (b_other − b_self), the image of 0 under self⁻¹ ∘ other.
    pub fn relative_origin(&self, other: &AffineMap) -> Vec<f64> {
        self.apply_inverse(other.offset())
    }

    pub fn is_identity_linear(&self) -> bool {
        self.matrix == DMatrix::identity(self.dim(), self.dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_and_det() {
        let a = AffineMap::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.5]], &[1.0, -1.0]).unwrap();
        assert!((a.tau() - 4.0).abs() < 1e-12);
        assert!(a.ln_abs_det().abs() < 1e-12);
        let id = AffineMap::translation(&[3.0]);
        assert_eq!(id.tau(), 1.0);
        let s = AffineMap::scaled_translation(2.0, &[0.0]).unwrap();
        assert!((s.ln_abs_det() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn inverse_round_trip() {
        let a = AffineMap::from_rows(&[vec![1.0, 2.0], vec![-0.5, 3.0]], &[0.2, 0.1]).unwrap();
        let w = [0.7, -1.1];
        let z = a.apply(&w);
        let back = a.apply_inverse(&z);
        assert!((back[0] - w[0]).abs() < 1e-14 && (back[1] - w[1]).abs() < 1e-14);
        assert!((a.inverse_norm(&z) - (w[0] * w[0] + w[1] * w[1]).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_singular() {
        assert!(AffineMap::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[0.0, 0.0]).is_err());
        assert!(AffineMap::from_rows(&[vec![0.0]], &[0.0]).is_err());
        assert!(AffineMap::from_rows(&[vec![1.0]], &[0.0, 1.0]).is_err());
    }
}
