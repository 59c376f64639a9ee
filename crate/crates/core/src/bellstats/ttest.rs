use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::StatsError;

/// Outcome of a one-sample t-test of `mean > threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub mean: f64,
    pub std_dev: f64,
    /// `P(T >= t)`
    pub p_one_sided: f64,
    /// `P(|T| >= |t|)`
    pub p_two_sided: f64,
}

pub fn t_test_vs_threshold(samples: &[f64], threshold: f64) -> Result<TTest, StatsError> {
    let n = samples.len();
    if n < 2 {
        return Err(StatsError::TooFewSamples(n));
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    if var <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let std_dev = var.sqrt();
    let t = (mean - threshold) / (std_dev / nf.sqrt());
    let df = nf - 1.0;
    let upper = student_t_upper_tail(t, df);
    Ok(TTest {
        t,
        df,
        mean,
        std_dev,
        p_one_sided: upper,
        p_two_sided: (2.0 * student_t_upper_tail(t.abs(), df)).min(1.0),
    })
}

/// `P(T >= t)` for Student's t with `df` degrees of freedom, by adaptive
/// Simpson integration of the density over `[0, |t|]`.
pub fn student_t_upper_tail(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return if t > 0.0 { 0.0 } else { 1.0 };
    }
    let log_norm = ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * std::f64::consts::PI).ln();
    let pdf = |x: f64| (log_norm - (df + 1.0) / 2.0 * (x * x / df).ln_1p()).exp();
    let x = t.abs();
    // split so each piece is smooth on the scale of its width
    let mut central = 0.0;
    let mut lo = 0.0;
    while lo < x {
        let hi = (lo + 1.0f64.max(lo)).min(x);
        central += adaptive_simpson(&pdf, lo, hi, 1e-15, 50);
        lo = hi;
    }
    let upper = 0.5 - central;
    if t >= 0.0 {
        upper.max(0.0)
    } else {
        (0.5 + central).min(1.0)
    }
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}
