//! One-sided (Hestenes) Jacobi SVD for matrices of dimension at most four.
//!
//! Column pairs of `M` are rotated until mutually orthogonal, which diagonalizes
//! `M†M` implicitly. The accumulated rotations form `V`; the column norms are
//! the singular values and the normalized columns form `U`.

use num_complex::Complex64;

use super::{inner, CMat, CVec, LinalgError};

pub const MAX_SWEEPS: usize = 200;
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Columns whose norm falls below this fraction of the largest singular value
/// are treated as null and their left vectors are completed to a unitary.
const NULL_COLUMN_REL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct SvdResult {
    pub left: CMat,
    pub singular_values: Vec<f64>,
    pub right: CMat,
}

impl SvdResult {
    /// `U Σ V†`.
    pub fn reconstruct(&self) -> CMat {
        let sigma: Vec<Complex64> = self
            .singular_values
            .iter()
            .map(|&s| Complex64::new(s, 0.0))
            .collect();
        let s = CMat::diag(&sigma).unwrap();
        &(&self.left * &s) * &self.right.adjoint()
    }

    /// Number of singular values above `rel_tol * σ_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let max = self.singular_values.first().copied().unwrap_or(0.0);
        if max == 0.0 {
            return 0;
        }
        self.singular_values
            .iter()
            .filter(|&&s| s > rel_tol * max)
            .count()
    }
}

pub fn svd(m: &CMat) -> Result<SvdResult, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| m.get(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();

    let mut converged = false;
    let mut residual = 0.0;
    for _ in 0..MAX_SWEEPS {
        residual = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let g = gamma.norm();
                if alpha == 0.0 || beta == 0.0 || g == 0.0 {
                    continue;
                }
                let off = g / (alpha * beta).sqrt();
                residual = residual.max(off);
                if off <= OFF_DIAGONAL_TOL {
                    continue;
                }
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if residual <= OFF_DIAGONAL_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual,
        });
    }

    let norms: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));

    let sigma_max = norms[order[0]];
    let mut left: Vec<Option<CVec>> = Vec::with_capacity(n);
    for &k in &order {
        if sigma_max > 0.0 && norms[k] > NULL_COLUMN_REL * sigma_max {
            let col = CVec::new(cols[k].iter().map(|z| z / norms[k]).collect())?;
            left.push(Some(col));
        } else {
            left.push(None);
        }
    }
    let left = complete_orthonormal(left, n)?;
    let right: Vec<CVec> = order
        .iter()
        .map(|&k| CVec::new(v[k].clone()))
        .collect::<Result<_, _>>()?;

    Ok(SvdResult {
        left: CMat::from_columns(&left)?,
        singular_values: order.iter().map(|&k| norms[k]).collect(),
        right: CMat::from_columns(&right)?,
    })
}

/// `[a_p, a_q] ← [a_p, a_q] · [[c, s·e^{iφ}], [-s·e^{-iφ}, c]]`
fn rotate(cols: &mut [Vec<Complex64>], p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    for i in 0..cols[p].len() {
        let ap = cols[p][i];
        let aq = cols[q][i];
        cols[p][i] = ap * c - aq * phase.conj() * s;
        cols[q][i] = ap * phase * s + aq * c;
    }
}

/// Fills `None` slots with unit vectors orthogonal to every other slot.
fn complete_orthonormal(slots: Vec<Option<CVec>>, dim: usize) -> Result<Vec<CVec>, LinalgError> {
    let mut known: Vec<CVec> = slots.iter().flatten().cloned().collect();
    let mut out = Vec::with_capacity(slots.len());
    for slot in slots {
        match slot {
            Some(v) => out.push(v),
            None => {
                let mut best: Option<CVec> = None;
                let mut best_norm = -1.0;
                for k in 0..dim {
                    let mut cand = CVec::basis(dim, k)?;
                    for _ in 0..2 {
                        for q in &known {
                            cand = cand.sub(&q.scale(inner(q, &cand)?))?;
                        }
                    }
                    let nrm = cand.norm();
                    if nrm > best_norm {
                        best_norm = nrm;
                        best = Some(cand);
                    }
                }
                let v = best.ok_or(LinalgError::Empty)?.normalized()?;
                known.push(v.clone());
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigh {
    /// Descending eigenvalues.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: CMat,
}

/// Hermitian eigen-decomposition through the SVD of a positive-definite shift `H + cI`.
pub fn eigh(h: &CMat) -> Result<Eigh, LinalgError> {
    if !h.is_hermitian(1e-9 * (1.0 + h.max_abs())) {
        return Err(LinalgError::NotHermitian(
            h.max_abs_diff(&h.adjoint()).unwrap_or(f64::NAN),
        ));
    }
    let shift = h.frobenius_norm() + 1.0;
    let n = h.rows();
    let shifted = h.add(&CMat::identity(n)?.scale(Complex64::new(shift, 0.0)))?;
    let dec = svd(&shifted)?;
    Ok(Eigh {
        values: dec.singular_values.iter().map(|s| s - shift).collect(),
        vectors: dec.right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_has_unit_singular_values() {
        let r = svd(&CMat::identity(4).unwrap()).unwrap();
        assert_eq!(r.singular_values, vec![1.0; 4]);
        assert!(r.left.is_unitary(1e-12) && r.right.is_unitary(1e-12));
    }

    #[test]
    fn rank_one_outer_product() {
        let u = CVec::new(vec![c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        let v = CVec::new(vec![c(0.0, 0.6), c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let m = CMat::outer(&u, &v).unwrap();
        let r = svd(&m).unwrap();
        assert!((r.singular_values[0] - 1.0).abs() < 1e-9);
        for s in &r.singular_values[1..] {
            assert!(s.abs() < 1e-9);
        }
        assert_eq!(r.rank(1e-7), 1);
        assert!(r.left.is_unitary(1e-9) && r.right.is_unitary(1e-9));
        assert!(r.reconstruct().max_abs_diff(&m).unwrap() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let r = svd(&CMat::zeros(2, 2).unwrap()).unwrap();
        assert_eq!(r.singular_values, vec![0.0, 0.0]);
        assert_eq!(r.rank(1e-7), 0);
        assert!(r.left.is_unitary(1e-12));
    }

    #[test]
    fn diagonal_sorted_descending() {
        let m = CMat::diag(&[c(0.1, 0.0), c(0.0, -3.0), c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        let r = svd(&m).unwrap();
        let expected = [3.0, 2.0, 0.1, 0.0];
        for (s, e) in r.singular_values.iter().zip(expected) {
            assert!((s - e).abs() < 1e-15);
        }
        assert!(r.reconstruct().max_abs_diff(&m).unwrap() < 1e-14);
    }

    #[test]
    fn eigh_of_diagonal_and_pauli_y() {
        let sy = CMat::new(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let e = eigh(&sy).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12 && (e.values[1] + 1.0).abs() < 1e-12);
        let v0 = e.vectors.column(0);
        let lhs = sy.apply(&v0).unwrap();
        assert!(lhs.max_abs_diff(&v0).unwrap() < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = CMat::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(eigh(&m), Err(LinalgError::NotHermitian(_))));
    }
}
