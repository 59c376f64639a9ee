use std::ops::Mul;

use num_complex::Complex64;

use super::{CVec, LinalgError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix with at most four rows and columns.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        for n in [rows, cols] {
            if !(1..=4).contains(&n) {
                return Err(LinalgError::UnsupportedDimension(n));
            }
        }
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                left: rows * cols,
                right: data.len(),
            });
        }
        Ok(CMat { rows, cols, data })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self, LinalgError> {
        CMat::from_fn(rows, cols, |_, _| ZERO)
    }

    pub fn identity(n: usize) -> Result<Self, LinalgError> {
        CMat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(values: &[Complex64]) -> Result<Self, LinalgError> {
        CMat::from_fn(values.len(), values.len(), |i, j| {
            if i == j {
                values[i]
            } else {
                ZERO
            }
        })
    }

    pub fn diag_real(values: &[f64]) -> Result<Self, LinalgError> {
        let v: Vec<_> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        CMat::diag(&v)
    }

    /// Matrix whose `k`-th column is `columns[k]`.
    pub fn from_columns(columns: &[CVec]) -> Result<Self, LinalgError> {
        let Some(first) = columns.first() else {
            return Err(LinalgError::Empty);
        };
        let rows = first.dim();
        if let Some(bad) = columns.iter().find(|c| c.dim() != rows) {
            return Err(LinalgError::DimensionMismatch {
                left: rows,
                right: bad.dim(),
            });
        }
        CMat::from_fn(rows, columns.len(), |i, j| columns[j].get(i))
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &CVec, v: &CVec) -> Result<Self, LinalgError> {
        CMat::from_fn(u.dim(), v.dim(), |i, j| u.get(i) * v.get(j).conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.cols + j] = z;
    }

    pub fn column(&self, j: usize) -> CVec {
        CVec::new((0..self.rows).map(|i| self.get(i, j)).collect())
            .expect("column length is a supported vector dimension")
    }

    pub fn row(&self, i: usize) -> CVec {
        CVec::new((0..self.cols).map(|j| self.get(i, j)).collect())
            .expect("row length is a supported vector dimension")
    }

    pub fn adjoint(&self) -> Self {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj()).unwrap()
    }

    pub fn transpose(&self) -> Self {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i)).unwrap()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMat) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn matmul(&self, other: &CMat) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                left: self.cols,
                right: other.rows,
            });
        }
        CMat::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum()
        })
    }

    pub fn apply(&self, v: &CVec) -> Result<CVec, LinalgError> {
        if self.cols != v.dim() {
            return Err(LinalgError::DimensionMismatch {
                left: self.cols,
                right: v.dim(),
            });
        }
        CVec::new(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|k| self.get(i, k) * v.get(k)).sum())
                .collect(),
        )
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Largest entrywise modulus; the comparison metric used throughout the crate.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMat) -> Result<f64, LinalgError> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()).is_ok_and(|d| d <= tol)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let gram = self.adjoint().matmul(self).unwrap();
        gram.max_abs_diff(&CMat::identity(self.rows).unwrap())
            .is_ok_and(|d| d <= tol)
    }

    fn zip_with(
        &self,
        other: &CMat,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                left: self.rows * self.cols,
                right: other.rows * other.cols,
            });
        }
        Ok(CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }
}

impl Mul for &CMat {
    type Output = CMat;

    /// Panics on shape mismatch; use [`CMat::matmul`] for a checked product.
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs).expect("matrix shapes must agree")
    }
}

/// Kronecker product of two 2x2 operators, in the same ordering as [`super::tensor`].
pub fn tensor_op(a: &CMat, b: &CMat) -> Result<CMat, LinalgError> {
    for m in [a, b] {
        if m.rows != 2 || m.cols != 2 {
            return Err(LinalgError::DimensionMismatch {
                left: 4,
                right: m.rows * m.cols,
            });
        }
    }
    CMat::from_fn(4, 4, |r, c| {
        a.get(r / 2, c / 2) * b.get(r % 2, c % 2)
    })
}

/// Gram matrix `G[i][j] = ⟨v_i|v_j⟩`.
pub fn gram(vs: &[CVec]) -> Result<CMat, LinalgError> {
    let Some(first) = vs.first() else {
        return Err(LinalgError::Empty);
    };
    if let Some(bad) = vs.iter().find(|v| v.dim() != first.dim()) {
        return Err(LinalgError::DimensionMismatch {
            left: first.dim(),
            right: bad.dim(),
        });
    }
    CMat::from_fn(vs.len(), vs.len(), |i, j| {
        super::inner(&vs[i], &vs[j]).unwrap()
    })
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(m: &CMat) -> Result<CMat, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| m.get(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m.scale(Complex64::new(0.5f64.powi(squarings), 0.0));

    let mut result = CMat::identity(n)?;
    let mut term = CMat::identity(n)?;
    for k in 1..=18 {
        term = (&term * &scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        result = result.add(&term)?;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::tensor;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tensor_op_identity_and_diagonal() {
        let i2 = CMat::identity(2).unwrap();
        assert_eq!(tensor_op(&i2, &i2).unwrap(), CMat::identity(4).unwrap());
        let z = CMat::diag_real(&[1.0, -1.0]).unwrap();
        assert_eq!(
            tensor_op(&z, &z).unwrap(),
            CMat::diag_real(&[1.0, -1.0, -1.0, 1.0]).unwrap()
        );
    }

    #[test]
    fn tensor_op_acts_factorwise() {
        let a = CMat::new(2, 2, vec![c(0.3, 0.1), c(-1.0, 0.2), c(0.0, 0.7), c(0.5, -0.5)])
            .unwrap();
        let b = CMat::new(2, 2, vec![c(1.1, 0.0), c(0.2, 0.3), c(-0.4, 0.9), c(0.0, -1.0)])
            .unwrap();
        let u = CVec::new(vec![c(0.6, 0.1), c(-0.2, 0.4)]).unwrap();
        let v = CVec::new(vec![c(0.0, 1.0), c(0.3, -0.3)]).unwrap();
        let lhs = tensor_op(&a, &b)
            .unwrap()
            .apply(&tensor(&u, &v).unwrap())
            .unwrap();
        let rhs = tensor(&a.apply(&u).unwrap(), &b.apply(&v).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14);
    }

    #[test]
    fn gram_cases() {
        let basis: Vec<_> = (0..4).map(|k| CVec::basis(4, k).unwrap()).collect();
        assert_eq!(gram(&basis).unwrap(), CMat::identity(4).unwrap());
        let v = CVec::from_reals(&[0.6, 0.8]).unwrap();
        let g = gram(&[v.clone(), v]).unwrap();
        assert!(g.max_abs_diff(&CMat::from_fn(2, 2, |_, _| c(1.0, 0.0)).unwrap()).unwrap() < 1e-15);
        assert!(matches!(gram(&[]), Err(LinalgError::Empty)));
    }

    #[test]
    fn expm_of_pauli_rotation() {
        // exp(-i θ σx) = cos θ I - i sin θ σx
        let theta: f64 = 1.234;
        let sx = CMat::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let u = expm(&sx.scale(c(0.0, -theta))).unwrap();
        let expected = CMat::new(
            2,
            2,
            vec![
                c(theta.cos(), 0.0),
                c(0.0, -theta.sin()),
                c(0.0, -theta.sin()),
                c(theta.cos(), 0.0),
            ],
        )
        .unwrap();
        assert!(u.max_abs_diff(&expected).unwrap() < 1e-13);
        assert!(u.is_unitary(1e-13));
    }

    #[test]
    fn hermitian_and_unitary_flags() {
        let h = CMat::new(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]).unwrap();
        assert!(h.is_hermitian(1e-12));
        assert!(!h.is_unitary(1e-9));
        let s = CMat::new(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(2.0, 0.0)]).unwrap();
        assert!(!s.is_hermitian(1e-9));
    }
}
