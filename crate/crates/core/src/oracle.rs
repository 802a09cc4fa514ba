//! Numerical evaluation of the Connes supremum
//! `sup { |tr(Δρ e)| : e Hermitian, ‖[D, π(e)]‖_op ≤ 1 }`.
//!
//! The objective is linear and the ball norm is an absolutely homogeneous
//! seminorm (it vanishes on multiples of the identity), so the supremum equals
//! the maximum of the ratio `tr(Δρ e) / ‖[D, π(e)]‖` and is attained on the
//! boundary of the ball. Each start runs projected ascent: step along the
//! gradient of that ratio, then rescale the iterate radially back onto the
//! boundary. The operator norm is replaced by a log-sum-exp smoothing of the
//! spectrum of `-i[D, π(e)]` while ascending, with the sharpness raised in
//! stages; every reported value is recomputed with the exact norm, so results
//! are certified lower bounds on the supremum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ball_norm, dirac_commutator, SpectralTriple, ADMISSIBILITY_TOL};
use crate::matlib::{hermitian_eigen, Complex, ComplexMatrix, HermitianEigen};
use crate::states::DensityMatrix;

/// Identifies the generator behind `OracleConfig::seed`.
pub const RNG_NAME: &str = "chacha8, stream = start index";

/// Sharpness schedule of the smoothed operator norm.
const SMOOTHING_SCHEDULE: [f64; 6] = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6];
const STEP_FLOOR: f64 = 1e-10;
const STALL_WINDOW: usize = 50;
const STEP_GROWTH: f64 = 1.5;
const VALUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub n_starts: usize,
    /// Iteration budget per start, shared across smoothing stages.
    pub max_iters: usize,
    pub step_init: f64,
    /// A stage ends once the ratio improves by less than this over 50 iterations.
    pub tol_value: f64,
    pub seed: u64,
    /// Iterates whose ball norm falls below this are treated as degenerate.
    pub projection_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n_starts: 64,
            max_iters: 2000,
            step_init: 0.1,
            tol_value: 1e-7,
            seed: 42,
            projection_tol: 1e-12,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if self.n_starts == 0
            || self.max_iters == 0
            || !positive(self.step_init)
            || !positive(self.tol_value)
            || !positive(self.projection_tol)
        {
            return Err(Error::InvalidConfig(format!("{self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Certified lower bound on the supremum: `tr(Δρ element)`.
    pub value: f64,
    /// Best admissible element found.
    pub element: ComplexMatrix,
    pub ball_norm: f64,
    pub starts_converged: usize,
    pub per_start_values: Vec<f64>,
}

/// Outcome of one ascent run.
#[derive(Debug, Clone, PartialEq)]
pub struct StartOutcome {
    /// Scaled so that its exact ball norm is 1 (or zero if degenerate).
    pub element: ComplexMatrix,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Subspace {
    Hermitian,
    RealDiagonal,
}

impl Subspace {
    fn project(self, m: &ComplexMatrix) -> ComplexMatrix {
        let n = m.dim();
        let mut out = match self {
            Subspace::Hermitian => m.hermitian_part(),
            Subspace::RealDiagonal => ComplexMatrix::from_diagonal(&m.diagonal_real()).expect("finite"),
        };
        // The identity direction changes neither the objective nor the ball norm.
        let shift = out.trace().re / n as f64;
        for i in 0..n {
            out[(i, i)] -= Complex::new(shift, 0.0);
        }
        out
    }
}

/// Smoothed ball norm of one element and its gradient.
struct NormEval {
    smooth: f64,
    gradient: ComplexMatrix,
}

struct Problem<'a> {
    triple: &'a SpectralTriple,
    delta: &'a ComplexMatrix,
    subspace: Subspace,
}

impl Problem<'_> {
    fn objective(&self, e: &ComplexMatrix) -> f64 {
        self.delta.trace_product(e).expect("dims checked").re
    }

    /// Eigen-decomposition of `K = -i[D, π(e)]`, Hermitian for Hermitian `e`.
    fn spectrum(&self, e: &ComplexMatrix) -> HermitianEigen {
        let comm = dirac_commutator(self.triple, e).expect("dims checked");
        let k = comm.scale(Complex::new(0.0, -1.0)).hermitian_part();
        hermitian_eigen(&k).expect("Hermitian by construction")
    }

    /// Norms and smoothed-norm gradient at `e / scale`, from the spectrum of `e`.
    fn norm_from(&self, eig: &HermitianEigen, scale: f64, sharpness: f64) -> NormEval {
        let values: Vec<f64> = eig.values.iter().map(|v| v / scale).collect();
        let exact = values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));

        // log-sum-exp over the spectrum of [[K, 0], [0, -K]].
        let mut weights = Vec::with_capacity(values.len());
        let mut total = 0.0;
        for &lam in &values {
            let plus = (sharpness * (lam - exact)).exp();
            let minus = (sharpness * (-lam - exact)).exp();
            total += plus + minus;
            weights.push(plus - minus);
        }
        let smooth = exact + total.ln() / sharpness;

        let n = values.len();
        let mut y = ComplexMatrix::zeros(n);
        for (idx, w) in weights.iter().enumerate() {
            let w = w / total;
            if w.abs() < 1e-300 {
                continue;
            }
            for r in 0..n {
                let vr = eig.vectors[(r, idx)] * w;
                for c in 0..n {
                    y[(r, c)] += vr * eig.vectors[(c, idx)].conj();
                }
            }
        }
        // d‖K‖ = Re tr(Y dK) with dK = -i[D, π(de)]; pull back through π.
        let d = self.triple.dirac();
        let z = (&(&y * d) - &(d * &y)).scale(Complex::new(0.0, -1.0));
        let m = self.triple.fock_dim();
        let mut blocks = ComplexMatrix::zeros(m);
        for copy in 0..self.triple.spinor_copies() {
            blocks = &blocks + &z.block(copy * m, copy * m, m);
        }
        NormEval {
            smooth,
            gradient: self.subspace.project(&blocks.dagger()),
        }
    }

    fn exact_norm(&self, e: &ComplexMatrix) -> f64 {
        self.spectrum(e).values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Radial projection onto the boundary `‖[D, π(e)]‖ = 1`.
    fn normalize(&self, e: &ComplexMatrix, projection_tol: f64) -> Option<ComplexMatrix> {
        let n = self.exact_norm(e);
        (n > projection_tol).then(|| e.scale_real(1.0 / n))
    }

    fn ascend(&self, seed: &ComplexMatrix, cfg: &OracleConfig) -> StartOutcome {
        let n = self.delta.dim();
        let degenerate = StartOutcome {
            element: ComplexMatrix::zeros(n),
            value: 0.0,
            converged: false,
            iterations: 0,
        };
        let Some(mut e) = self.normalize(&self.subspace.project(seed), cfg.projection_tol) else {
            return degenerate;
        };
        let mut iterations = 0;
        let mut converged = false;

        for (stage, &sharpness) in SMOOTHING_SCHEDULE.iter().enumerate() {
            let mut obj = self.objective(&e);
            let mut eval = self.norm_from(&self.spectrum(&e), 1.0, sharpness);
            let mut ratio = obj / eval.smooth;
            let mut step = cfg.step_init;
            let mut history = vec![ratio];
            let mut stage_done = false;

            while iterations < cfg.max_iters && step > STEP_FLOOR {
                iterations += 1;
                let grad = (&self.delta.scale_real(1.0 / eval.smooth)
                    - &eval.gradient.scale_real(obj / (eval.smooth * eval.smooth)))
                    .hermitian_part();
                let grad = self.subspace.project(&grad);
                let gnorm = grad.frobenius_norm();
                if gnorm < 1e-300 {
                    stage_done = true;
                    break;
                }
                let scale = step * e.frobenius_norm().max(f64::MIN_POSITIVE) / gnorm;
                let trial = &e + &grad.scale_real(scale);
                let t_eig = self.spectrum(&trial);
                let t_norm = t_eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
                if t_norm > cfg.projection_tol {
                    let trial = trial.scale_real(1.0 / t_norm);
                    let t_eval = self.norm_from(&t_eig, t_norm, sharpness);
                    let t_obj = self.objective(&trial);
                    let t_ratio = t_obj / t_eval.smooth;
                    if t_ratio > ratio {
                        e = trial;
                        obj = t_obj;
                        eval = t_eval;
                        ratio = t_ratio;
                        step = (step * STEP_GROWTH).min(1.0);
                    } else {
                        step *= 0.5;
                    }
                } else {
                    step *= 0.5;
                }
                history.push(ratio);
                if history.len() > STALL_WINDOW
                    && ratio - history[history.len() - 1 - STALL_WINDOW] < cfg.tol_value
                {
                    stage_done = true;
                    break;
                }
            }
            if step <= STEP_FLOOR {
                stage_done = true;
            }
            if stage == SMOOTHING_SCHEDULE.len() - 1 {
                converged = stage_done;
            }
            if iterations >= cfg.max_iters {
                break;
            }
        }

        // Final exact rescale; the reported value always comes from an admissible element.
        match self.normalize(&e, cfg.projection_tol) {
            Some(element) => {
                let value = self.objective(&element);
                StartOutcome {
                    element,
                    value,
                    converged,
                    iterations,
                }
            }
            None => degenerate,
        }
    }
}

fn random_seed_element(rng: &mut impl Rng, n: usize, subspace: Subspace) -> ComplexMatrix {
    let data = (0..n * n)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    subspace.project(&ComplexMatrix::from_vec(n, data).expect("finite"))
}

fn check_inputs(rho1: &DensityMatrix, rho2: &DensityMatrix, triple: &SpectralTriple) -> Result<ComplexMatrix> {
    for rho in [rho1, rho2] {
        if rho.dim() != triple.fock_dim() {
            return Err(Error::DimensionMismatch {
                left: triple.fock_dim(),
                right: rho.dim(),
            });
        }
    }
    rho1.delta(rho2)
}

/// Runs a single ascent from `seed`. Exposed for seed-sensitivity experiments.
pub fn ascend_from(
    delta_rho: &ComplexMatrix,
    triple: &SpectralTriple,
    seed: &ComplexMatrix,
    cfg: &OracleConfig,
) -> Result<StartOutcome> {
    if delta_rho.dim() != triple.fock_dim() || seed.dim() != triple.fock_dim() {
        return Err(Error::DimensionMismatch {
            left: triple.fock_dim(),
            right: if delta_rho.dim() != triple.fock_dim() { delta_rho.dim() } else { seed.dim() },
        });
    }
    let problem = Problem {
        triple,
        delta: delta_rho,
        subspace: Subspace::Hermitian,
    };
    Ok(problem.ascend(seed, cfg))
}

fn run(delta: &ComplexMatrix, triple: &SpectralTriple, cfg: &OracleConfig, subspace: Subspace) -> Result<OracleResult> {
    cfg.validate()?;
    let n = delta.dim();
    if delta.max_abs() == 0.0 {
        return Ok(OracleResult {
            value: 0.0,
            element: ComplexMatrix::zeros(n),
            ball_norm: 0.0,
            starts_converged: 0,
            per_start_values: Vec::new(),
        });
    }
    let problem = Problem {
        triple,
        delta,
        subspace,
    };
    let outcomes: Vec<StartOutcome> = (0..cfg.n_starts)
        .into_par_iter()
        .map(|start| {
            let seed = match start {
                0 => delta.clone(),
                1 => -delta,
                _ => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                    rng.set_stream(start as u64);
                    random_seed_element(&mut rng, n, subspace)
                }
            };
            problem.ascend(&seed, cfg)
        })
        .collect();

    // Max by value; the earliest start wins ties.
    let mut best = 0;
    for (idx, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = idx;
        }
    }
    let element = outcomes[best].element.clone();
    let b = ball_norm(triple, &element)?;
    let value = problem.objective(&element);
    Ok(OracleResult {
        value,
        element,
        ball_norm: b,
        starts_converged: outcomes.iter().filter(|o| o.converged).count(),
        per_start_values: outcomes.iter().map(|o| o.value).collect(),
    })
}

/// Maximizes `tr(Δρ e)` over Hermitian elements in the unit ball.
pub fn supremum_distance(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    triple: &SpectralTriple,
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    let delta = check_inputs(rho1, rho2, triple)?;
    run(&delta, triple, cfg, Subspace::Hermitian)
}

/// Same search restricted to real diagonal elements; both states must be diagonal.
pub fn supremum_distance_diagonal(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    triple: &SpectralTriple,
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    let delta = check_inputs(rho1, rho2, triple)?;
    if !rho1.is_diagonal(1e-12) || !rho2.is_diagonal(1e-12) {
        return Err(Error::NotDiagonal);
    }
    run(&delta, triple, cfg, Subspace::RealDiagonal)
}

/// Recomputes ball norm and objective of `result.element` from scratch.
pub fn certify(result: &OracleResult, triple: &SpectralTriple, delta_rho: &ComplexMatrix) -> bool {
    let Ok(b) = ball_norm(triple, &result.element) else {
        return false;
    };
    let Ok(obj) = delta_rho.trace_product(&result.element) else {
        return false;
    };
    b <= 1.0 + ADMISSIBILITY_TOL && (obj.re.abs() - result.value).abs() <= VALUE_TOL
}
