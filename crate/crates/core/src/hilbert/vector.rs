use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LinalgError;

/// One complex entry in amplitude/phase form, phase in degrees.
///
/// Construction normalizes so that `amplitude >= 0` and `phase_deg` lies in `[0, 360)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    pub amplitude: f64,
    pub phase_deg: f64,
}

impl Polar {
    pub fn new(amplitude: f64, phase_deg: f64) -> Self {
        let (amplitude, phase_deg) = if amplitude < 0.0 {
            (-amplitude, phase_deg + 180.0)
        } else {
            (amplitude, phase_deg)
        };
        let mut phase_deg = phase_deg.rem_euclid(360.0);
        if phase_deg >= 360.0 {
            phase_deg = 0.0;
        }
        Polar {
            amplitude,
            phase_deg,
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Polar::new(z.norm(), z.arg().to_degrees())
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase_deg.to_radians())
    }
}

/// A vector in C^2 or C^4, stored in rectangular form.
#[derive(Clone, Debug, PartialEq)]
pub struct CVec {
    entries: Vec<Complex64>,
}

impl CVec {
    pub fn new(entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        match entries.len() {
            2 | 4 => Ok(CVec { entries }),
            n => Err(LinalgError::UnsupportedDimension(n)),
        }
    }

    pub fn from_reals(values: &[f64]) -> Result<Self, LinalgError> {
        CVec::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds a vector from `(amplitude, phase in degrees)` pairs.
    pub fn from_polar_deg(pairs: &[(f64, f64)]) -> Result<Self, LinalgError> {
        CVec::new(
            pairs
                .iter()
                .map(|&(a, p)| Polar::new(a, p).to_complex())
                .collect(),
        )
    }

    /// The `k`-th canonical basis vector of C^dim.
    pub fn basis(dim: usize, k: usize) -> Result<Self, LinalgError> {
        if k >= dim {
            return Err(LinalgError::IndexOutOfRange { index: k, dim });
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); dim];
        entries[k] = Complex64::new(1.0, 0.0);
        CVec::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.entries[k]
    }

    pub fn to_polar_deg(&self) -> Vec<Polar> {
        self.entries.iter().map(|&z| Polar::from_complex(z)).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self, LinalgError> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(LinalgError::ZeroVector);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        CVec {
            entries: self.entries.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        CVec {
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn add(&self, other: &CVec) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CVec) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CVec) -> Result<f64, LinalgError> {
        Ok(self
            .sub(other)?
            .entries
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    fn zip_with(
        &self,
        other: &CVec,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(CVec {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }
}

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner(u: &CVec, v: &CVec) -> Result<Complex64, LinalgError> {
    if u.dim() != v.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    Ok(u
        .entries
        .iter()
        .zip(&v.entries)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Tensor product of two qubit vectors, ordered `(u1v1, u1v2, u2v1, u2v2)`.
pub fn tensor(u: &CVec, v: &CVec) -> Result<CVec, LinalgError> {
    if u.dim() != 2 || v.dim() != 2 {
        return Err(LinalgError::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    let mut out = Vec::with_capacity(4);
    for a in &u.entries {
        for b in &v.entries {
            out.push(a * b);
        }
    }
    CVec::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polar_normalizes_sign_and_range() {
        let p = Polar::new(-0.5, 10.0);
        assert_eq!(p.amplitude, 0.5);
        assert!((p.phase_deg - 190.0).abs() < 1e-12);
        assert!((Polar::new(1.0, -90.0).phase_deg - 270.0).abs() < 1e-12);
        assert!((Polar::new(1.0, 720.0).phase_deg).abs() < 1e-12);
        let z = Polar::new(0.23, 13.93).to_complex();
        let back = Polar::from_complex(z);
        assert!((back.amplitude - 0.23).abs() < 1e-15);
        assert!((back.phase_deg - 13.93).abs() < 1e-12);
    }

    #[test]
    fn rejects_unsupported_dimension() {
        assert!(matches!(
            CVec::from_reals(&[1.0, 0.0, 0.0]),
            Err(LinalgError::UnsupportedDimension(3))
        ));
    }

    #[test]
    fn tensor_canonical_cases() {
        let e0 = CVec::basis(2, 0).unwrap();
        let e1 = CVec::basis(2, 1).unwrap();
        assert_eq!(tensor(&e0, &e1).unwrap(), CVec::basis(4, 1).unwrap());
        assert_eq!(tensor(&e0, &e0).unwrap(), CVec::basis(4, 0).unwrap());
    }

    #[test]
    fn tensor_of_plus_and_minus() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CVec::from_reals(&[h, h]).unwrap();
        let minus = CVec::from_reals(&[h, -h]).unwrap();
        let expected = CVec::from_reals(&[0.5, -0.5, 0.5, -0.5]).unwrap();
        let got = tensor(&plus, &minus).unwrap();
        assert!(got.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn tensor_rejects_dim4() {
        let e = CVec::basis(4, 0).unwrap();
        let q = CVec::basis(2, 0).unwrap();
        assert!(tensor(&e, &q).is_err());
    }

    #[test]
    fn inner_product_cases() {
        let e0 = CVec::basis(4, 0).unwrap();
        let e1 = CVec::basis(4, 1).unwrap();
        assert_eq!(inner(&e0, &e1).unwrap(), c(0.0, 0.0));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = CVec::new(vec![c(h, 0.0), c(0.0, h)]).unwrap();
        let v = CVec::new(vec![c(h, 0.0), c(0.0, -h)]).unwrap();
        assert!(inner(&u, &v).unwrap().norm() < 1e-15);
        assert!((inner(&u, &u).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        // conjugate-linear in the first slot
        let w = u.scale(c(0.0, 2.0));
        assert!((inner(&w, &u).unwrap() - c(0.0, -2.0)).norm() < 1e-12);
    }

    #[test]
    fn inner_rejects_mismatch() {
        let a = CVec::basis(2, 0).unwrap();
        let b = CVec::basis(4, 0).unwrap();
        assert!(inner(&a, &b).is_err());
    }
}
