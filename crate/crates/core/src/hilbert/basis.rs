//! Orthonormality audit and repair for bases read from rounded printed values.

use num_complex::Complex64;

use super::{gram, inner, CMat, CVec, LinalgError, Polar};

/// Rounding half-widths of printed amplitude/phase components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundingPrecision {
    pub amplitude: f64,
    pub phase_deg: f64,
}

impl Default for RoundingPrecision {
    /// Two decimals on amplitudes and on phases in degrees.
    fn default() -> Self {
        RoundingPrecision {
            amplitude: 0.005,
            phase_deg: 0.005,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepairMethod {
    /// Input was already orthonormal to working precision.
    Unchanged,
    /// Nearest orthonormal basis in the rounding-weighted amplitude/phase metric.
    PrecisionProjection,
    /// Fallback when the projection did not converge.
    GramSchmidt,
}

#[derive(Clone, Debug)]
pub struct BasisRepair {
    pub vectors: Vec<CVec>,
    pub method: RepairMethod,
    /// Largest entrywise change against the input, in rectangular form.
    pub max_shift: f64,
}

/// Largest entrywise deviation of the Gram matrix from the identity, and the worst `(i, j)` pair.
pub fn orthonormality_defect(vs: &[CVec]) -> Result<(f64, (usize, usize)), LinalgError> {
    let g = gram(vs)?;
    let mut worst = (0.0, (0, 0));
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            let d = (g.get(i, j) - Complex64::new(target, 0.0)).norm();
            if d > worst.0 {
                worst = (d, (i, j));
            }
        }
    }
    Ok(worst)
}

/// Modified Gram–Schmidt, in input order.
pub fn gram_schmidt(vs: &[CVec]) -> Result<Vec<CVec>, LinalgError> {
    let mut out: Vec<CVec> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                w = w.sub(&q.scale(inner(q, &w)?))?;
            }
        }
        if w.norm() < 1e-12 {
            return Err(LinalgError::LinearlyDependent);
        }
        out.push(w.normalized()?);
    }
    Ok(out)
}

/// Repairs a nearly orthonormal square basis of printed, rounded vectors.
///
/// Each entry is treated as `a·e^{iφ}` with `a` and `φ` known to within the
/// given half-widths. A minimum-norm Gauss–Newton iteration in coordinates
/// scaled by those half-widths projects the basis onto the set of orthonormal
/// bases, so entries move roughly in proportion to how coarsely they were
/// printed. Entries printed with zero amplitude carry no phase information and
/// their phase is left free.
pub fn repair_basis(vs: &[CVec], precision: RoundingPrecision) -> Result<BasisRepair, LinalgError> {
    let n = vs.len();
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    if vs.iter().any(|v| v.dim() != n) {
        return Err(LinalgError::DimensionMismatch {
            left: n,
            right: vs[0].dim(),
        });
    }
    if orthonormality_defect(vs)?.0 <= 1e-13 {
        return Ok(BasisRepair {
            vectors: vs.to_vec(),
            method: RepairMethod::Unchanged,
            max_shift: 0.0,
        });
    }

    match project(vs, precision) {
        Some(projected) => {
            // one Gram–Schmidt pass removes the last rounding residue
            let vectors = gram_schmidt(&projected)?;
            Ok(BasisRepair {
                max_shift: max_shift(vs, &vectors)?,
                vectors,
                method: RepairMethod::PrecisionProjection,
            })
        }
        None => {
            let normalized: Vec<CVec> = vs.iter().map(|v| v.normalized()).collect::<Result<_, _>>()?;
            let vectors = gram_schmidt(&normalized)?;
            Ok(BasisRepair {
                max_shift: max_shift(vs, &vectors)?,
                vectors,
                method: RepairMethod::GramSchmidt,
            })
        }
    }
}

fn max_shift(a: &[CVec], b: &[CVec]) -> Result<f64, LinalgError> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.max_abs_diff(y))
        .try_fold(0.0, |acc, d| d.map(|d| f64::max(acc, d)))
}

fn project(vs: &[CVec], precision: RoundingPrecision) -> Option<Vec<CVec>> {
    let n = vs.len();
    let m = n * n;
    let polar: Vec<Polar> = vs.iter().flat_map(|v| v.to_polar_deg()).collect();
    let phase0: Vec<f64> = polar.iter().map(|p| p.phase_deg.to_radians()).collect();
    let amp_scale = precision.amplitude;
    let phase_scale: Vec<f64> = polar
        .iter()
        .map(|p| {
            if p.amplitude == 0.0 {
                std::f64::consts::PI
            } else {
                precision.phase_deg.to_radians()
            }
        })
        .collect();

    // y[0..m] amplitudes / amp_scale, y[m..2m] phase offsets / phase_scale
    let mut y: Vec<f64> = polar.iter().map(|p| p.amplitude / amp_scale).collect();
    y.extend(std::iter::repeat_n(0.0, m));

    let entries = |y: &[f64]| -> Vec<Complex64> {
        (0..m)
            .map(|e| Complex64::from_polar(y[e] * amp_scale, phase0[e] + y[m + e] * phase_scale[e]))
            .collect()
    };

    for _ in 0..100 {
        let v = entries(&y);
        let (f, jac) = residual_and_jacobian(&v, &y, n, amp_scale, &phase0, &phase_scale);
        let err = f.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if err <= 1e-13 {
            let vectors = (0..n)
                .map(|k| CVec::new(v[k * n..(k + 1) * n].to_vec()))
                .collect::<Result<Vec<_>, _>>()
                .ok()?;
            return Some(vectors);
        }
        // Δy = Jᵀ (J Jᵀ)⁻¹ f
        let rows = f.len();
        let cols = 2 * m;
        let mut jjt = vec![0.0; rows * rows];
        for r in 0..rows {
            for s in 0..rows {
                jjt[r * rows + s] = (0..cols).map(|c| jac[r * cols + c] * jac[s * cols + c]).sum();
            }
        }
        // constraints with no sensitivity (e.g. imaginary parts between real,
        // disjointly supported vectors) are already satisfied; damping keeps
        // the normal equations solvable
        let max_diag = (0..rows).map(|r| jjt[r * rows + r]).fold(0.0, f64::max);
        for r in 0..rows {
            jjt[r * rows + r] += 1e-14 * max_diag;
        }
        let z = solve_dense(jjt, f.clone(), rows)?;
        for c in 0..cols {
            let step: f64 = (0..rows).map(|r| jac[r * cols + c] * z[r]).sum();
            y[c] -= step;
        }
        if y.iter().any(|x| !x.is_finite()) {
            return None;
        }
    }
    None
}

/// Orthonormality residual (diagonal real parts, upper-triangle real and
/// imaginary parts) and its Jacobian with respect to the scaled coordinates.
fn residual_and_jacobian(
    v: &[Complex64],
    y: &[f64],
    n: usize,
    amp_scale: f64,
    phase0: &[f64],
    phase_scale: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let m = n * n;
    let at = |k: usize, c: usize| v[k * n + c];
    let g = |j: usize, k: usize| -> Complex64 { (0..n).map(|c| at(j, c).conj() * at(k, c)).sum() };

    let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        for k in j..n {
            pairs.push((j, k));
        }
    }
    let mut f = Vec::with_capacity(m);
    for &(j, k) in &pairs {
        let gjk = g(j, k);
        if j == k {
            f.push(gjk.re - 1.0);
        } else {
            f.push(gjk.re);
            f.push(gjk.im);
        }
    }

    let cols = 2 * m;
    let mut jac = vec![0.0; f.len() * cols];
    for var in 0..cols {
        let e = var % m;
        let (row_k, comp) = (e / n, e % n);
        let z = v[e];
        let unit = Complex64::from_polar(1.0, phase0[e] + y[m + e] * phase_scale[e]);
        let dv = if var < m {
            unit * amp_scale
        } else {
            Complex64::new(0.0, 1.0) * z * phase_scale[e]
        };
        let mut r = 0;
        for &(j, k) in &pairs {
            let mut dg = Complex64::new(0.0, 0.0);
            if j == row_k {
                dg += dv.conj() * at(k, comp);
            }
            if k == row_k {
                dg += at(j, comp).conj() * dv;
            }
            if j == k {
                jac[r * cols + var] = dg.re;
                r += 1;
            } else {
                jac[r * cols + var] = dg.re;
                jac[(r + 1) * cols + var] = dg.im;
                r += 2;
            }
        }
    }
    (f, jac)
}

/// Gaussian elimination with partial pivoting on a dense `n x n` real system.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        for row in (col + 1)..n {
            let factor = a[row * n + col] / a[col * n + col];
            if factor != 0.0 {
                for k in col..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    Some(x)
}

/// Matrix whose rows are the conjugated basis vectors: maps `vs[k]` to `e_k`.
pub fn coordinate_map(vs: &[CVec]) -> Result<CMat, LinalgError> {
    Ok(CMat::from_columns(vs)?.adjoint())
}
