//! Gradient-free fitting of eigenbases and states to coincidence tables.
//!
//! Unitaries are parametrized as `U = U₀ exp(iH(θ))` with `H` Hermitian; after
//! every sweep the accepted `θ` is folded into `U₀` and reset to zero, so the
//! search always moves in local coordinates around the current point.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{synthesize, ModelError, ObservableModel, Provenance, StateVector, DEFAULT_EIGENVALUES};
use crate::bellstats::{CoincidenceTable, Experiment, ExperimentDataset};
use crate::hilbert::random::{random_unit_vector, random_unitary};
use crate::hilbert::{expm, inner, tensor, CMat, CVec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub seed: u64,
    /// Sweeps per restart.
    pub max_iterations: usize,
    pub restarts: usize,
    pub target_misfit: f64,
    /// Initial and maximal coordinate step.
    pub initial_step: f64,
    /// A restart stalls once every coordinate step is below this.
    pub min_step: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            seed: 0,
            max_iterations: 2000,
            restarts: 64,
            target_misfit: 1e-10,
            initial_step: 0.5,
            min_step: 1e-9,
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<(), ModelError> {
        if !(self.target_misfit > 0.0) {
            return Err(ModelError::BadConfig("target_misfit must be positive".into()));
        }
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(ModelError::BadConfig("restarts and max_iterations must be positive".into()));
        }
        if !(self.initial_step > self.min_step && self.min_step > 0.0) {
            return Err(ModelError::BadConfig("need initial_step > min_step > 0".into()));
        }
        Ok(())
    }
}

/// Objective value after a sweep that accepted at least one step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub misfit: f64,
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub model: ObservableModel,
    /// Columns are the fitted eigenvectors.
    pub unitary: CMat,
    pub misfit: f64,
    pub iterations: usize,
    pub converged: bool,
    pub restart: usize,
    pub restarts_run: usize,
    pub trace: Vec<TracePoint>,
}

#[derive(Clone, Debug)]
pub struct StateFit {
    pub state: StateVector,
    /// Local unitaries for A, A', B, B': column `i` is the factor vector of outcome `i`.
    pub locals: [CMat; 4],
    /// Summed squared misfit over the four tables.
    pub objective: f64,
    pub table_misfits: [f64; 4],
    pub iterations: usize,
    pub converged: bool,
    pub restart: usize,
    pub restarts_run: usize,
    pub seed: u64,
    pub trace: Vec<TracePoint>,
}

impl StateFit {
    /// Product model of one experiment: eigenvectors `x_i ⊗ y_j`.
    pub fn model(&self, exp: Experiment) -> ObservableModel {
        let (first, second) = exp.sides();
        let (x, y) = (&self.locals[side_slot(first)], &self.locals[side_slot(second)]);
        let vs = product_basis(x, y);
        synthesize(&vs, DEFAULT_EIGENVALUES).expect("tensor products of unitary columns")
    }
}

fn side_slot(side: crate::bellstats::Side) -> usize {
    use crate::bellstats::Side;
    match side {
        Side::A => 0,
        Side::Ap => 1,
        Side::B => 2,
        Side::Bp => 3,
    }
}

fn product_basis(x: &CMat, y: &CMat) -> Vec<CVec> {
    let mut vs = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            vs.push(tensor(&x.column(i), &y.column(j)).unwrap());
        }
    }
    vs
}

/// `Σ_k (|⟨u_k|s⟩|² - t_k)²` over the columns of `u`.
pub fn misfit(u: &CMat, state: &CVec, target: &[f64; 4]) -> f64 {
    (0..4)
        .map(|k| (inner(&u.column(k), state).unwrap().norm_sqr() - target[k]).powi(2))
        .sum()
}

/// `exp(iH)` for the Hermitian `H` whose diagonal is `θ[..n]` and whose upper
/// triangle holds `θ[n + 2m] + iθ[n + 2m + 1]` in row-major order; `θ.len() = n²`.
pub fn unitary_from_generator(theta: &[f64]) -> CMat {
    let n = (theta.len() as f64).sqrt() as usize;
    assert_eq!(n * n, theta.len(), "generator needs n² parameters");
    let mut h = CMat::zeros(n, n).expect("dimension 2 or 4");
    let mut m = n;
    for i in 0..n {
        h.set(i, i, Complex64::new(theta[i], 0.0));
        for j in (i + 1)..n {
            let z = Complex64::new(theta[m], theta[m + 1]);
            h.set(i, j, z);
            h.set(j, i, z.conj());
            m += 2;
        }
    }
    expm(&h.scale(Complex64::i())).expect("square")
}

/// A problem in local coordinates: `eval(θ)` near the current base point,
/// `rebase(θ)` moves the base point to `θ`.
trait LocalProblem {
    fn dim(&self) -> usize;
    fn eval(&self, theta: &[f64]) -> f64;
    fn rebase(&mut self, theta: &[f64]);
}

struct SearchOutcome {
    misfit: f64,
    iterations: usize,
    trace: Vec<TracePoint>,
}

/// Adaptive coordinate search: per-coordinate steps grow on success and shrink
/// on failure, capped by a cosine decay from `initial_step` to `min_step`.
fn coordinate_search(p: &mut impl LocalProblem, cfg: &FitConfig) -> SearchOutcome {
    let n = p.dim();
    let mut theta = vec![0.0; n];
    let mut steps = vec![cfg.initial_step; n];
    let mut f = p.eval(&theta);
    let mut trace = vec![TracePoint { iteration: 0, misfit: f }];
    let mut it = 0;
    while it < cfg.max_iterations && f > cfg.target_misfit {
        it += 1;
        let decay = 0.5 * (1.0 + (PI * it as f64 / cfg.max_iterations as f64).cos());
        let cap = cfg.min_step + (cfg.initial_step - cfg.min_step) * decay;
        let mut accepted = false;
        for k in 0..n {
            let h = steps[k].min(cap);
            let mut moved = false;
            for dir in [1.0, -1.0] {
                theta[k] = dir * h;
                let trial = p.eval(&theta);
                if trial < f {
                    f = trial;
                    moved = true;
                    break;
                }
            }
            if moved {
                steps[k] = (2.0 * h).min(cfg.initial_step);
                accepted = true;
            } else {
                theta[k] = 0.0;
                steps[k] = 0.5 * h;
            }
        }
        if accepted {
            p.rebase(&theta);
            theta.iter_mut().for_each(|t| *t = 0.0);
            trace.push(TracePoint { iteration: it, misfit: f });
        } else if steps.iter().all(|&s| s < cfg.min_step) {
            break;
        }
    }
    SearchOutcome {
        misfit: f,
        iterations: it,
        trace,
    }
}

/// Restart `r` draws from ChaCha stream `r` of `seed`.
fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Restarts run in fixed-size batches and stop after the first batch containing
/// a converged run. The lowest-index converged restart wins; otherwise the lowest
/// misfit, ties to the lower index. Independent of the thread count.
fn run_restarts<T: Send>(
    cfg: &FitConfig,
    run: impl Fn(usize) -> (T, f64) + Sync,
) -> (usize, T, f64, usize) {
    const BATCH: usize = 8;
    let mut best: Option<(usize, T, f64)> = None;
    let mut done = 0;
    while done < cfg.restarts {
        let end = (done + BATCH).min(cfg.restarts);
        let batch: Vec<(usize, T, f64)> = (done..end)
            .into_par_iter()
            .map(|r| {
                let (t, m) = run(r);
                (r, t, m)
            })
            .collect();
        done = end;
        for (r, t, m) in batch {
            let better = match &best {
                None => true,
                Some((_, _, bm)) => {
                    let (conv, bconv) = (m <= cfg.target_misfit, *bm <= cfg.target_misfit);
                    (conv && !bconv) || (conv == bconv && !conv && m < *bm)
                }
            };
            if better {
                best = Some((r, t, m));
            }
        }
        if best.as_ref().is_some_and(|b| b.2 <= cfg.target_misfit) {
            break;
        }
    }
    let (r, t, m) = best.expect("at least one restart");
    (r, t, m, done)
}

struct BasisProblem {
    base: CMat,
    state: CVec,
    target: [f64; 4],
}

impl LocalProblem for BasisProblem {
    fn dim(&self) -> usize {
        16
    }
    fn eval(&self, theta: &[f64]) -> f64 {
        misfit(&(&self.base * &unitary_from_generator(theta)), &self.state, &self.target)
    }
    fn rebase(&mut self, theta: &[f64]) {
        self.base = &self.base * &unitary_from_generator(theta);
    }
}

/// Finds a unitary whose columns, used as eigenvectors, give `target` on `state`.
/// The target is renormalized to sum 1 first.
pub fn fit_basis(state: &StateVector, target: &CoincidenceTable, cfg: &FitConfig) -> Result<FitResult, ModelError> {
    cfg.validate()?;
    let t = target.normalized();
    let s = state.vector().clone();
    let (restart, (u, iterations, trace), m, restarts_run) = run_restarts(cfg, |r| {
        let mut rng = restart_rng(cfg.seed, r);
        let mut p = BasisProblem {
            base: random_unitary(&mut rng, 4),
            state: s.clone(),
            target: t,
        };
        let out = coordinate_search(&mut p, cfg);
        ((p.base, out.iterations, out.trace), out.misfit)
    });
    let cols: Vec<CVec> = (0..4).map(|k| u.column(k)).collect();
    let model = synthesize(&cols, DEFAULT_EIGENVALUES)?.with_labels(target.labels().clone());
    Ok(FitResult {
        model,
        unitary: u,
        misfit: m,
        iterations,
        converged: m <= cfg.target_misfit,
        restart,
        restarts_run,
        trace,
    })
}

const STATE_PARAMS: usize = 8;

struct StateProblem {
    state: CVec,
    locals: [CMat; 4],
    targets: [[f64; 4]; 4],
}

impl StateProblem {
    fn point(&self, theta: &[f64]) -> (CVec, [CMat; 4]) {
        let delta: Vec<Complex64> = (0..4)
            .map(|k| Complex64::new(theta[2 * k], theta[2 * k + 1]))
            .collect();
        let s = self
            .state
            .add(&CVec::new(delta).unwrap())
            .unwrap()
            .normalized()
            .unwrap_or_else(|_| self.state.clone());
        let locals = std::array::from_fn(|k| {
            let off = STATE_PARAMS + 4 * k;
            &self.locals[k] * &unitary_from_generator(&theta[off..off + 4])
        });
        (s, locals)
    }

    fn table_misfits(state: &CVec, locals: &[CMat; 4], targets: &[[f64; 4]; 4]) -> [f64; 4] {
        Experiment::ALL.map(|exp| {
            let (first, second) = exp.sides();
            let u = CMat::from_columns(&product_basis(&locals[side_slot(first)], &locals[side_slot(second)])).unwrap();
            misfit(&u, state, &targets[exp.index()])
        })
    }
}

impl LocalProblem for StateProblem {
    fn dim(&self) -> usize {
        STATE_PARAMS + 16
    }
    fn eval(&self, theta: &[f64]) -> f64 {
        let (s, l) = self.point(theta);
        Self::table_misfits(&s, &l, &self.targets).iter().sum()
    }
    fn rebase(&mut self, theta: &[f64]) {
        let (s, l) = self.point(theta);
        self.state = s;
        self.locals = l;
    }
}

/// Searches for the state and four local measurements `A, A', B, B'`, all product
/// under the standard identification, minimizing the summed squared misfit to
/// the dataset's four tables. An objective near zero means the data admit a
/// single-isomorphism product representation.
pub fn fit_state(ds: &ExperimentDataset, cfg: &FitConfig) -> Result<StateFit, ModelError> {
    cfg.validate()?;
    let targets = Experiment::ALL.map(|e| ds.table(e).normalized());
    let (restart, (state, locals, iterations, trace), objective, restarts_run) = run_restarts(cfg, |r| {
        let mut rng = restart_rng(cfg.seed, r);
        let state = random_unit_vector(&mut rng, 4);
        let locals = std::array::from_fn(|_| random_unitary(&mut rng, 2));
        let mut p = StateProblem { state, locals, targets };
        let out = coordinate_search(&mut p, cfg);
        ((p.state, p.locals, out.iterations, out.trace), out.misfit)
    });
    let table_misfits = StateProblem::table_misfits(&state, &locals, &targets);
    Ok(StateFit {
        state: StateVector::new(state, Provenance::Fitted)?,
        locals,
        objective,
        table_misfits,
        iterations,
        converged: objective <= cfg.target_misfit,
        restart,
        restarts_run,
        seed: cfg.seed,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellstats::CoincidenceTable;
    use crate::modelfit::probabilities_from_model;
    use rand::Rng;

    fn random_state(rng: &mut ChaCha8Rng) -> StateVector {
        StateVector::new(random_unit_vector(rng, 4), Provenance::User).unwrap()
    }

    #[test]
    fn generator_gives_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [2, 4] {
            let theta: Vec<f64> = (0..n * n).map(|_| rng.random_range(-2.0..2.0)).collect();
            assert!(unitary_from_generator(&theta).is_unitary(1e-12));
        }
        assert_eq!(unitary_from_generator(&[0.0; 16]), CMat::identity(4).unwrap());
    }

    #[test]
    fn realizable_target_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..5 {
            let state = random_state(&mut rng);
            let m = ObservableModel::from_unitary(&random_unitary(&mut rng, 4), DEFAULT_EIGENVALUES).unwrap();
            let target = probabilities_from_model(&state, &m);
            let cfg = FitConfig { seed: trial, ..FitConfig::default() };
            let r = fit_basis(&state, &target, &cfg).unwrap();
            assert!(r.converged && r.misfit <= 1e-10, "{trial}: {}", r.misfit);
            assert!(r.unitary.is_unitary(1e-9));
            let again = probabilities_from_model(&state, &r.model).probs();
            for (a, b) in again.iter().zip(target.probs()) {
                assert!((a - b).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn trace_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let state = random_state(&mut rng);
        let target = CoincidenceTable::from_probs([0.1, 0.2, 0.3, 0.4]).unwrap();
        let cfg = FitConfig { restarts: 2, target_misfit: 1e-14, ..FitConfig::default() };
        let r = fit_basis(&state, &target, &cfg).unwrap();
        assert!(r.trace.len() > 2);
        assert!(r.trace.windows(2).all(|w| w[1].misfit <= w[0].misfit && w[1].iteration > w[0].iteration));
        assert_eq!(r.trace.last().unwrap().misfit, r.misfit);
    }

    #[test]
    fn seed_determines_result() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let state = random_state(&mut rng);
        let target = CoincidenceTable::from_probs([0.4, 0.1, 0.1, 0.4]).unwrap();
        let cfg = FitConfig { seed: 3, ..FitConfig::default() };
        let a = fit_basis(&state, &target, &cfg).unwrap();
        let b = fit_basis(&state, &target, &cfg).unwrap();
        assert_eq!(a.unitary, b.unitary);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn bad_config_is_rejected() {
        let s = StateVector::new(CVec::basis(4, 0).unwrap(), Provenance::User).unwrap();
        let t = CoincidenceTable::uniform();
        for cfg in [
            FitConfig { restarts: 0, ..FitConfig::default() },
            FitConfig { min_step: 1.0, ..FitConfig::default() },
            FitConfig { target_misfit: 0.0, ..FitConfig::default() },
        ] {
            assert!(matches!(fit_basis(&s, &t, &cfg), Err(ModelError::BadConfig(_))));
        }
    }

    #[test]
    fn unreachable_target_reports_non_convergence() {
        // one sweep cannot reach this target
        let s = StateVector::new(random_unit_vector(&mut ChaCha8Rng::seed_from_u64(2), 4), Provenance::User).unwrap();
        let t = CoincidenceTable::from_probs([0.25, 0.25, 0.25, 0.25]).unwrap();
        let cfg = FitConfig { restarts: 2, max_iterations: 1, target_misfit: 1e-300, ..FitConfig::default() };
        let r = fit_basis(&s, &t, &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.restarts_run, 2);
    }

    #[test]
    fn one_outcome_tables_force_an_aligned_product_state() {
        let certain = CoincidenceTable::from_probs([1.0, 0.0, 0.0, 0.0]).unwrap();
        let ds = ExperimentDataset::from_tables("certain", None, Experiment::ALL.map(|e| (e, certain.clone())), None).unwrap();
        let cfg = FitConfig { restarts: 8, ..FitConfig::default() };
        let f = fit_state(&ds, &cfg).unwrap();
        assert!(f.converged, "objective {}", f.objective);
        let first = inner(&f.model(Experiment::AB).eigenvectors()[0], f.state.vector()).unwrap().norm();
        assert!(first > 1.0 - 1e-5);
        // state is x ⊗ y up to amplitudes of order sqrt(misfit)
        let v = f.state.vector();
        let det = v.get(0) * v.get(3) - v.get(1) * v.get(2);
        assert!(det.norm() < 1e-2, "{det}");
    }

    #[test]
    fn product_data_fit_with_zero_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let locals: [CMat; 4] = std::array::from_fn(|_| random_unitary(&mut rng, 2));
        let state = random_state(&mut rng);
        let tables = Experiment::ALL.map(|exp| {
            let (x, y) = exp.sides();
            let vs = product_basis(&locals[side_slot(x)], &locals[side_slot(y)]);
            (exp, probabilities_from_model(&state, &synthesize(&vs, DEFAULT_EIGENVALUES).unwrap()))
        });
        let ds = ExperimentDataset::from_tables("product", None, tables, None).unwrap();
        let f = fit_state(&ds, &FitConfig::default()).unwrap();
        assert!(f.converged && f.objective <= 1e-8, "objective {}", f.objective);
    }
}
