//! Invariant suites behind `connes verify`.
//!
//! Every suite draws from its own ChaCha8 stream of the run seed, so a report
//! depends only on the seed and the quick flag. The one-qubit closed form is
//! injected through [`VerifyOptions::distance`], which lets a corrupted formula
//! be run against the same checks.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fock::{ball_norm, diagonal_ball_slack, dirac_2d, dirac_4d, ADMISSIBILITY_TOL};
use crate::matlib::{
    commutator, hermitian_eigen, operator_norm, random_hermitian, random_matrix, Complex, ComplexMatrix,
};
use crate::oracle::{supremum_distance, OracleConfig};
use crate::spectral::{
    check_pythagoras, coherence_sd, distance_2q_basis, distance_from_delta, distance_from_spherical,
    hamming, optimal_element_1q, BasisLabel,
};
use crate::states::{
    bloch_to_density, diagonal_mixed, random_bloch, trace_distance, two_qubit_basis, BlochVector, NamedState,
    StateSpec,
};

/// One-qubit distance as a function of `Δr` and ħ.
pub type DistanceFn = fn([f64; 3], f64) -> f64;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Roughly a tenth of the samples.
    pub quick: bool,
    pub seed: u64,
    pub distance: DistanceFn,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quick: false,
            seed: 42,
            distance: distance_from_delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub samples: usize,
    /// Largest residual seen; violations of one-sided bounds count as positive.
    pub worst: f64,
    pub tol: f64,
    /// Inputs of the first failing sample.
    pub failure: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub quick: bool,
    pub suites: Vec<SuiteReport>,
    pub elapsed_ms: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    pub fn failed_suites(&self) -> Vec<&'static str> {
        self.suites.iter().filter(|s| !s.passed()).map(|s| s.name).collect()
    }

    /// The report without timing; identical for identical options.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mode = if self.quick { "quick" } else { "full" };
        let _ = writeln!(out, "verify seed={} mode={mode}", self.seed);
        let _ = writeln!(out, "{:<32} {:>8} {:>11} {:>9}  status", "suite", "samples", "worst", "tol");
        for s in &self.suites {
            let status = if s.passed() { "pass" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{:<32} {:>8} {:>11.3e} {:>9.1e}  {status}",
                s.name, s.samples, s.worst, s.tol
            );
        }
        let passed = self.suites.iter().filter(|s| s.passed()).count();
        let _ = writeln!(out, "{} suites, {passed} passed", self.suites.len());
        for s in &self.suites {
            if let Some(inputs) = &s.failure {
                let _ = writeln!(out, "failure in {}: {inputs}", s.name);
            }
        }
        out
    }

    pub fn timing_line(&self) -> String {
        format!("timing_ms={:.1}", self.elapsed_ms)
    }
}

struct Tally {
    name: &'static str,
    tol: f64,
    samples: usize,
    worst: f64,
    failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str, tol: f64) -> Self {
        Self {
            name,
            tol,
            samples: 0,
            worst: 0.0,
            failure: None,
        }
    }

    fn check(&mut self, residual: f64, inputs: impl FnOnce() -> String) {
        self.samples += 1;
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        self.worst = self.worst.max(residual);
        if residual > self.tol && self.failure.is_none() {
            self.failure = Some(inputs());
        }
    }

    /// Records a sample that fails a side condition outright.
    fn reject(&mut self, inputs: impl FnOnce() -> String) {
        self.samples += 1;
        self.failure.get_or_insert_with(inputs);
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name,
            samples: self.samples,
            worst: self.worst,
            tol: self.tol,
            failure: self.failure,
        }
    }
}

struct Ctx {
    opts: VerifyOptions,
    rng: ChaCha8Rng,
}

impl Ctx {
    fn count(&self, full: usize) -> usize {
        if self.opts.quick {
            (full / 10).max(1)
        } else {
            full
        }
    }

    fn d(&self, r1: &BlochVector, r2: &BlochVector, hbar: f64) -> f64 {
        (self.opts.distance)(r1.delta(r2), hbar)
    }

    fn hbar(&mut self) -> f64 {
        self.rng.gen_range(0.25..4.0)
    }
}

fn fmt_bloch(r: &BlochVector) -> String {
    format!("({:?}, {:?}, {:?})", r.x, r.y, r.z)
}

type Suite = fn(&mut Ctx) -> SuiteReport;

const SUITES: [Suite; 23] = [
    eigen_reconstruction,
    operator_norm_adjoint,
    commutator_traceless,
    dirac_hermitian,
    ball_norm_closed_form,
    ball_norm_shift_scale,
    symmetry,
    branch_continuity,
    triangle_inequality,
    collinear_additivity,
    horizontal_proportionality,
    hbar_scaling,
    spherical_form,
    optimal_certificate,
    closed_form_dominates,
    coherence_l1,
    diagonal_trace_proportionality,
    trace_distance_bloch,
    two_qubit_table,
    pythagoras,
    two_qubit_trace_distance,
    oracle_agreement,
    grammar_round_trip,
];

pub fn run_verify(opts: VerifyOptions) -> VerifyReport {
    let start = Instant::now();
    let suites = SUITES
        .iter()
        .enumerate()
        .map(|(idx, suite)| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(idx as u64);
            suite(&mut Ctx { opts, rng })
        })
        .collect();
    VerifyReport {
        seed: opts.seed,
        quick: opts.quick,
        suites,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn eigen_reconstruction(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("eigen reconstruction", 1e-10);
    for _ in 0..ctx.count(200) {
        for n in [2, 4, 8, 16] {
            let a = random_hermitian(&mut ctx.rng, n);
            let eig = hermitian_eigen(&a).expect("Hermitian");
            let lambda = ComplexMatrix::from_diagonal(&eig.values).expect("finite");
            let rebuilt = &(&eig.vectors * &lambda) * &eig.vectors.dagger();
            let residual = rebuilt.max_abs_diff(&a).expect("same dim") / a.frobenius_norm().max(1.0);
            t.check(residual, || format!("dim {n}, {a:?}"));
        }
    }
    t.finish()
}

fn operator_norm_adjoint(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("operator norm of adjoint", 1e-12);
    for _ in 0..ctx.count(200) {
        for n in [2, 4, 8, 16] {
            let a = random_matrix(&mut ctx.rng, n);
            let (na, nd) = (operator_norm(&a), operator_norm(&a.dagger()));
            t.check((na - nd).abs() / na.max(1.0), || format!("dim {n}, {a:?}"));
        }
    }
    t.finish()
}

fn commutator_traceless(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("commutator traceless", 1e-12);
    for _ in 0..ctx.count(200) {
        for n in [2, 4, 8, 16] {
            let a = random_matrix(&mut ctx.rng, n);
            let b = random_matrix(&mut ctx.rng, n);
            let tr = commutator(&a, &b).expect("same dim").trace().norm();
            t.check(tr, || format!("dim {n}, a = {a:?}, b = {b:?}"));
        }
    }
    t.finish()
}

fn dirac_hermitian(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("dirac hermiticity", 1e-12);
    for _ in 0..ctx.count(50) {
        let hbar = ctx.hbar();
        for triple in [dirac_2d(hbar), dirac_4d(hbar)] {
            let triple = triple.expect("valid hbar");
            t.check(triple.dirac().hermitian_defect(), || {
                format!("hbar {hbar:?}, modes {}", triple.n_modes())
            });
        }
    }
    t.finish()
}

fn ball_norm_closed_form(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("ball norm closed form", 1e-10);
    for _ in 0..ctx.count(1000) {
        let hbar = ctx.hbar();
        let (s, u): (f64, f64) = (ctx.rng.gen_range(-2.0..2.0), ctx.rng.gen_range(-2.0..2.0));
        let (v, tt): (f64, f64) = (ctx.rng.gen_range(-2.0..2.0), ctx.rng.gen_range(-2.0..2.0));
        let e = ComplexMatrix::from_vec(
            2,
            vec![Complex::new(s, 0.0), Complex::new(u, -v), Complex::new(u, v), Complex::new(tt, 0.0)],
        )
        .expect("finite");
        let b = ball_norm(&dirac_2d(hbar).expect("valid hbar"), &e).expect("2x2");
        let (w_sq, d) = (u * u + v * v, s - tt);
        let lambda = (2.0 * w_sq + d * d + d.abs() * (d * d + 4.0 * w_sq).sqrt()) / 2.0;
        let residual = (hbar * b * b / 2.0 - lambda).abs() / lambda.max(1.0);
        t.check(residual, || format!("hbar {hbar:?}, s {s:?}, t {tt:?}, w ({u:?}, {v:?})"));
    }
    t.finish()
}

fn ball_norm_shift_scale(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("ball norm shift and scale", 1e-10);
    for _ in 0..ctx.count(200) {
        let hbar = ctx.hbar();
        let c: f64 = ctx.rng.gen_range(-3.0..3.0);
        let alpha: f64 = ctx.rng.gen_range(-3.0..3.0);
        for triple in [dirac_2d(hbar), dirac_4d(hbar)] {
            let triple = triple.expect("valid hbar");
            let n = triple.fock_dim();
            let e = random_hermitian(&mut ctx.rng, n);
            let b = ball_norm(&triple, &e).expect("dims");
            let shifted = ball_norm(&triple, &(&e + &ComplexMatrix::identity(n).scale_real(c))).expect("dims");
            let scaled = ball_norm(&triple, &e.scale_real(alpha)).expect("dims");
            let residual = (shifted - b).abs().max((scaled - alpha.abs() * b).abs()) / b.max(1.0);
            t.check(residual, || format!("hbar {hbar:?}, shift {c:?}, scale {alpha:?}, e = {e:?}"));
        }
    }
    t.finish()
}

fn symmetry(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("symmetry", 0.0);
    for _ in 0..ctx.count(1000) {
        let hbar = ctx.hbar();
        let (a, b) = (random_bloch(&mut ctx.rng), random_bloch(&mut ctx.rng));
        let residual = (ctx.d(&a, &b, hbar) - ctx.d(&b, &a, hbar)).abs();
        t.check(residual, || format!("hbar {hbar:?}, r1 {}, r2 {}", fmt_bloch(&a), fmt_bloch(&b)));
    }
    t.finish()
}

/// On `Δ⊥ = |Δz|` both branches equal `sqrt(ħ/2) Δ⊥`. The second branch is
/// stationary in `Δz` there, so a relative nudge of 1e-7 into it moves the
/// value by O(1e-14) only.
fn branch_continuity(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("branch continuity", 1e-12);
    let n = ctx.count(720);
    for k in 0..n {
        let hbar = ctx.hbar();
        let phi = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let rho: f64 = ctx.rng.gen_range(0.05..1.4);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let on = [rho * phi.cos(), rho * phi.sin(), sign * rho];
        let inside = [on[0], on[1], on[2] * (1.0 + 1e-7)];
        let expected = (hbar / 2.0).sqrt() * rho;
        let d = ctx.opts.distance;
        let residual = (d(on, hbar) - expected).abs().max((d(inside, hbar) - expected).abs());
        t.check(residual, || format!("hbar {hbar:?}, delta {on:?}"));
    }
    t.finish()
}

fn triangle_inequality(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("triangle inequality", 1e-10);
    for _ in 0..ctx.count(10_000) {
        let hbar = ctx.hbar();
        let [a, b, c] = [(); 3].map(|_| random_bloch(&mut ctx.rng));
        let excess = ctx.d(&a, &c, hbar) - ctx.d(&a, &b, hbar) - ctx.d(&b, &c, hbar);
        t.check(excess.max(0.0), || {
            format!("hbar {hbar:?}, a {}, b {}, c {}", fmt_bloch(&a), fmt_bloch(&b), fmt_bloch(&c))
        });
    }
    t.finish()
}

fn collinear_additivity(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("collinear additivity", 1e-10);
    for _ in 0..ctx.count(1000) {
        let hbar = ctx.hbar();
        let (a, c) = (random_bloch(&mut ctx.rng), random_bloch(&mut ctx.rng));
        let lambda: f64 = ctx.rng.gen_range(0.01..0.99);
        let b = BlochVector::new(
            a.x + lambda * (c.x - a.x),
            a.y + lambda * (c.y - a.y),
            a.z + lambda * (c.z - a.z),
        )
        .expect("convex combination");
        let residual = (ctx.d(&a, &c, hbar) - ctx.d(&a, &b, hbar) - ctx.d(&b, &c, hbar)).abs();
        t.check(residual, || {
            format!("hbar {hbar:?}, r1 {}, r3 {}, lambda {lambda:?}", fmt_bloch(&a), fmt_bloch(&c))
        });
    }
    t.finish()
}

fn horizontal_proportionality(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("horizontal proportionality", 1e-12);
    for _ in 0..ctx.count(1000) {
        let hbar = ctx.hbar();
        let a = random_bloch(&mut ctx.rng);
        let radius = (1.0 - a.z * a.z).max(0.0).sqrt();
        let (rad, ang): (f64, f64) = (ctx.rng.gen_range(0.0..radius.max(1e-300)), ctx.rng.gen_range(0.0..6.3));
        let b = BlochVector::new(rad * ang.cos(), rad * ang.sin(), a.z).expect("inside the disk");
        let [dx, dy, _] = a.delta(&b);
        let residual = (ctx.d(&a, &b, hbar) - (hbar / 2.0).sqrt() * dx.hypot(dy)).abs();
        t.check(residual, || format!("hbar {hbar:?}, r1 {}, r2 {}", fmt_bloch(&a), fmt_bloch(&b)));
    }
    t.finish()
}

fn hbar_scaling(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("hbar scaling", 1e-12);
    for _ in 0..ctx.count(1000) {
        let hbar = ctx.hbar();
        let (a, b) = (random_bloch(&mut ctx.rng), random_bloch(&mut ctx.rng));
        let residual = (ctx.d(&a, &b, hbar) - hbar.sqrt() * ctx.d(&a, &b, 1.0)).abs();
        t.check(residual, || format!("hbar {hbar:?}, r1 {}, r2 {}", fmt_bloch(&a), fmt_bloch(&b)));
    }
    let labels: [BasisLabel; 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];
    for hbar in [0.5, 2.0, 3.0, 4.0] {
        for a in labels {
            for b in labels {
                let d = |h| distance_2q_basis(a, b, h).expect("valid labels").value;
                t.check((d(hbar) - hbar.sqrt() * d(1.0)).abs(), || {
                    format!("hbar {hbar:?}, basis {a:?} -> {b:?}")
                });
            }
        }
    }
    t.finish()
}

fn spherical_form(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("spherical form", 1e-12);
    for _ in 0..ctx.count(1000) {
        let hbar = ctx.hbar();
        let r: f64 = ctx.rng.gen_range(0.0..2.0);
        let theta: f64 = ctx.rng.gen_range(0.0..std::f64::consts::PI);
        let phi: f64 = ctx.rng.gen_range(0.0..std::f64::consts::TAU);
        let delta = [r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos()];
        let residual = ((ctx.opts.distance)(delta, hbar) - distance_from_spherical(r, theta, hbar)).abs();
        t.check(residual, || format!("hbar {hbar:?}, r {r:?}, theta {theta:?}, phi {phi:?}"));
    }
    t.finish()
}

fn optimal_certificate(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("optimal element certificate", 1e-9);
    for _ in 0..ctx.count(500) {
        let hbar = ctx.hbar();
        let (a, b) = (random_bloch(&mut ctx.rng), random_bloch(&mut ctx.rng));
        let e = optimal_element_1q(&a, &b, hbar).expect("distinct states");
        let bn = ball_norm(&dirac_2d(hbar).expect("valid hbar"), &e).expect("2x2");
        let delta = bloch_to_density(&a).delta(&bloch_to_density(&b)).expect("2x2");
        let value = delta.trace_product(&e).expect("2x2").re;
        let residual = (bn - 1.0).abs().max((value - ctx.d(&a, &b, hbar)).abs());
        t.check(residual, || format!("hbar {hbar:?}, r1 {}, r2 {}", fmt_bloch(&a), fmt_bloch(&b)));
    }
    t.finish()
}

fn closed_form_dominates(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("closed form dominates", 1e-9);
    for _ in 0..ctx.count(1000) {
        let hbar = ctx.hbar();
        let triple = dirac_2d(hbar).expect("valid hbar");
        let (a, b) = (random_bloch(&mut ctx.rng), random_bloch(&mut ctx.rng));
        let e = random_hermitian(&mut ctx.rng, 2);
        let bn = ball_norm(&triple, &e).expect("2x2");
        if bn == 0.0 {
            continue;
        }
        let e = e.scale_real(ctx.rng.gen_range(0.0..=1.0) / bn);
        let delta = bloch_to_density(&a).delta(&bloch_to_density(&b)).expect("2x2");
        let value = delta.trace_product(&e).expect("2x2").re.abs();
        t.check((value - ctx.d(&a, &b, hbar)).max(0.0), || {
            format!("hbar {hbar:?}, r1 {}, r2 {}, e = {e:?}", fmt_bloch(&a), fmt_bloch(&b))
        });
    }
    t.finish()
}

fn coherence_l1(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("coherence equals l1", 1e-12);
    for _ in 0..ctx.count(1000) {
        let hbar = ctx.hbar();
        let r = random_bloch(&mut ctx.rng);
        let rho = bloch_to_density(&r);
        let c = coherence_sd(&rho, hbar).expect("one qubit");
        let l1 = 2.0 * rho.matrix()[(0, 1)].norm();
        let via_distance = (2.0 / hbar).sqrt() * ctx.d(&r, &c.nearest_bloch, hbar);
        let residual = (c.value - l1).abs().max((via_distance - l1).abs());
        t.check(residual, || format!("hbar {hbar:?}, r {}", fmt_bloch(&r)));
    }
    t.finish()
}

fn diagonal_trace_proportionality(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("diagonal trace proportionality", 1e-12);
    let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
    let hbars: &[f64] = if ctx.opts.quick { &[1.0] } else { &[0.5, 1.0, 2.0, 4.0] };
    for &hbar in hbars {
        let scale = (hbar / 2.0).sqrt();
        for &p in &grid {
            for &q in &grid {
                let (rp, rq) = (diagonal_z(p), diagonal_z(q));
                let d = ctx.d(&rp, &rq, hbar);
                let d_t = trace_distance(&diagonal_mixed(p).expect("p"), &diagonal_mixed(q).expect("q"))
                    .expect("2x2");
                // d_T(diag p, diag q) = |p - q|, so the factor is sqrt(ħ/2).
                let residual = (d - (p - q).abs() * scale).abs().max((d - scale * d_t).abs());
                t.check(residual, || format!("hbar {hbar:?}, p {p:?}, q {q:?}"));
            }
        }
    }
    t.finish()
}

fn diagonal_z(p: f64) -> BlochVector {
    BlochVector::new(0.0, 0.0, 2.0 * p - 1.0).expect("p in [0, 1]")
}

fn trace_distance_bloch(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("trace distance half euclidean", 1e-12);
    for _ in 0..ctx.count(1000) {
        let (a, b) = (random_bloch(&mut ctx.rng), random_bloch(&mut ctx.rng));
        let d_t = trace_distance(&bloch_to_density(&a), &bloch_to_density(&b)).expect("2x2");
        let [dx, dy, dz] = a.delta(&b);
        let residual = (d_t - (dx * dx + dy * dy + dz * dz).sqrt() / 2.0).abs();
        t.check(residual, || format!("r1 {}, r2 {}", fmt_bloch(&a), fmt_bloch(&b)));
    }
    t.finish()
}

fn two_qubit_table(_ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("two-qubit basis table", 1e-9);
    let labels: [BasisLabel; 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];
    for hbar in [0.5, 1.0, 2.0, 4.0] {
        for (i, &a) in labels.iter().enumerate() {
            for &b in &labels[i + 1..] {
                let r = distance_2q_basis(a, b, hbar).expect("valid labels");
                let expected = (f64::from(hamming(a, b)) * hbar / 2.0).sqrt();
                let e = r.optimal_element.expect("distinct labels");
                let delta = two_qubit_basis(a.0, a.1)
                    .and_then(|x| x.delta(&two_qubit_basis(b.0, b.1)?))
                    .expect("4x4");
                let value = delta.trace_product(&e).expect("4x4").re;
                let bn = r.ball_norm_of_element.expect("element present");
                let slack = diagonal_ball_slack(
                    [e[(0, 0)].re, e[(1, 1)].re, e[(2, 2)].re, e[(3, 3)].re],
                    hbar,
                );
                let worst_slack = slack.iter().fold(0.0_f64, |acc, s| acc.max(-s));
                let residual = (r.value - expected)
                    .abs()
                    .max((value - r.value).abs())
                    .max((bn - 1.0).max(0.0))
                    .max(worst_slack);
                t.check(residual, || format!("hbar {hbar:?}, basis {a:?} -> {b:?}"));
                if bn > 1.0 + ADMISSIBILITY_TOL {
                    t.reject(|| format!("hbar {hbar:?}, basis {a:?} -> {b:?}, ball norm {bn:?}"));
                }
            }
        }
    }
    t.finish()
}

fn pythagoras(_ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("pythagoras", 1e-12);
    for hbar in [0.5, 1.0, 2.0, 4.0] {
        let report = check_pythagoras(hbar).expect("valid hbar");
        for id in &report.identities {
            t.check(id.residual.abs(), || {
                format!("hbar {hbar:?}, hypotenuse {:?}, corner {:?}", id.hypotenuse, id.corner)
            });
        }
    }
    t.finish()
}

fn two_qubit_trace_distance(_ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("two-qubit trace distance", 1e-12);
    let labels: [BasisLabel; 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];
    for (i, &a) in labels.iter().enumerate() {
        for &b in &labels[i + 1..] {
            let rho = two_qubit_basis(a.0, a.1).expect("bits");
            let sigma = two_qubit_basis(b.0, b.1).expect("bits");
            let d_t = trace_distance(&rho, &sigma).expect("4x4");
            t.check((d_t - 1.0).abs(), || format!("basis {a:?} -> {b:?}"));
        }
    }
    t.finish()
}

/// The oracle is an independent lower bound: it may fall short of the closed
/// form by a relative 1e-3 but never exceed it by more than 1e-9.
fn oracle_agreement(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("oracle agreement", 1e-3);
    let cfg = OracleConfig {
        n_starts: 4,
        seed: ctx.opts.seed,
        ..OracleConfig::default()
    };
    for _ in 0..ctx.count(60) {
        let hbar = [0.5, 1.0, 2.0][ctx.rng.gen_range(0..3)];
        let (a, b) = (random_bloch(&mut ctx.rng), random_bloch(&mut ctx.rng));
        let closed = ctx.d(&a, &b, hbar);
        let oracle = supremum_distance(
            &bloch_to_density(&a),
            &bloch_to_density(&b),
            &dirac_2d(hbar).expect("valid hbar"),
            &cfg,
        )
        .expect("2x2")
        .value;
        let inputs = || format!("hbar {hbar:?}, r1 {}, r2 {}, oracle {oracle:?}", fmt_bloch(&a), fmt_bloch(&b));
        if oracle > closed + 1e-9 {
            t.reject(inputs);
        } else {
            t.check((closed - oracle) / closed.max(f64::MIN_POSITIVE), inputs);
        }
    }
    t.finish()
}

fn grammar_round_trip(ctx: &mut Ctx) -> SuiteReport {
    let mut t = Tally::new("state grammar round trip", 0.0);
    let mut specs: Vec<StateSpec> = NamedState::ALL.iter().map(|&state| StateSpec::Named { state }).collect();
    for i in 0..2 {
        for j in 0..2 {
            specs.push(StateSpec::Basis2 { i, j });
        }
    }
    for _ in 0..ctx.count(300) {
        let r = random_bloch(&mut ctx.rng);
        specs.push(StateSpec::Bloch { x: r.x, y: r.y, z: r.z });
        specs.push(StateSpec::Diag {
            p: ctx.rng.gen_range(0.0..=1.0),
        });
    }
    for spec in specs {
        let text = spec.to_string();
        let same = text.parse::<StateSpec>().map(|back| back == spec).unwrap_or(false);
        t.check(if same { 0.0 } else { 1.0 }, || text);
    }
    t.finish()
}
