//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::Command;
use std::time::Instant;

use connes_qubit::fock::{ball_norm, dirac_2d, dirac_4d};
use connes_qubit::matlib::random_hermitian;
use connes_qubit::oracle::{supremum_distance, supremum_distance_diagonal, OracleConfig};
use connes_qubit::spectral::{
    check_pythagoras, coherence_sd, distance_1q_value, distance_2q_basis, hamming, BasisLabel,
};
use connes_qubit::states::{
    bloch_to_density, diagonal_mixed, random_bloch, trace_distance, two_qubit_basis, BlochVector, NamedState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LABELS: [BasisLabel; 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn d1(a: &BlochVector, b: &BlochVector, hbar: f64) -> f64 {
    distance_1q_value(a, b, hbar).unwrap()
}

fn pairs() -> impl Iterator<Item = (BasisLabel, BasisLabel)> {
    (0..4).flat_map(|i| (i + 1..4).map(move |j| (LABELS[i], LABELS[j])))
}

fn one_qubit_table() -> Outcome {
    use NamedState::*;
    let h = FRAC_1_SQRT_2;
    let table = [
        (Zero, One, h),
        (Zero, XPlus, h),
        (Zero, YPlus, h),
        (XPlus, YPlus, 1.0),
        (XPlus, XMinus, 2.0_f64.sqrt()),
        (XPlus, MaxMixed, h),
        (YPlus, MaxMixed, h),
        (Zero, MaxMixed, 0.5 * h),
        (One, MaxMixed, 0.5 * h),
    ];
    let worst = table
        .iter()
        .map(|&(a, b, want)| (d1(&a.bloch(), &b.bloch(), 1.0) - want).abs())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-12, format!("9 pairs, worst {worst:.2e} (tol 1e-12)"))
}

fn oracle_one_qubit() -> Outcome {
    let start = Instant::now();
    let cfg = OracleConfig {
        n_starts: 4,
        ..OracleConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_low, mut worst_high) = (0.0_f64, f64::NEG_INFINITY);
    let mut bad = None;
    for _ in 0..500 {
        let (a, b) = (random_bloch(&mut rng), random_bloch(&mut rng));
        for hbar in [0.5, 1.0, 2.0] {
            let closed = d1(&a, &b, hbar);
            let oracle = supremum_distance(
                &bloch_to_density(&a),
                &bloch_to_density(&b),
                &dirac_2d(hbar).unwrap(),
                &cfg,
            )
            .unwrap()
            .value;
            worst_low = worst_low.max((closed - oracle) / closed);
            worst_high = worst_high.max(oracle - closed);
            if (oracle < closed - 1e-3 * closed || oracle > closed + 1e-9) && bad.is_none() {
                bad = Some(format!("{a:?} {b:?} hbar {hbar}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_none() && secs < 60.0,
        format!(
            "1500 runs, max relative shortfall {worst_low:.2e} (tol 1e-3), max excess {worst_high:.2e} (tol 1e-9), {secs:.1} s (target 60 s){}",
            bad.map(|b| format!(", first failure {b}")).unwrap_or_default()
        ),
    )
}

fn two_qubit_basis_distances() -> Outcome {
    let start = Instant::now();
    let hbar = 1.0;
    let triple = dirac_4d(hbar).unwrap();
    let cfg = OracleConfig {
        n_starts: 16,
        ..OracleConfig::default()
    };
    let (mut table_err, mut diag_err, mut general_err) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (a, b) in pairs() {
        let want = if hamming(a, b) == 1 { (hbar / 2.0).sqrt() } else { hbar.sqrt() };
        table_err = table_err.max((distance_2q_basis(a, b, hbar).unwrap().value - want).abs());
        let (ra, rb) = (two_qubit_basis(a.0, a.1).unwrap(), two_qubit_basis(b.0, b.1).unwrap());
        diag_err = diag_err.max((supremum_distance_diagonal(&ra, &rb, &triple, &cfg).unwrap().value - want).abs());
        general_err = general_err.max((supremum_distance(&ra, &rb, &triple, &cfg).unwrap().value - want).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        table_err == 0.0 && diag_err <= 1e-3 && general_err <= 1e-3 && secs < 120.0,
        format!(
            "6 pairs, table {table_err:.2e} (exact), diagonal oracle {diag_err:.2e}, general oracle {general_err:.2e} (tol 1e-3), {secs:.1} s (target 120 s)"
        ),
    )
}

fn pythagoras() -> Outcome {
    let worst = [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&h| check_pythagoras(h).unwrap().max_residual())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-12, format!("hbar 0.5, 1, 2, 4, worst residual {worst:.2e} (tol 1e-12)"))
}

fn ball_condition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0_f64;
    for k in 0..1000 {
        let hbar = [0.5, 1.0, 2.0][k % 3];
        let e = random_hermitian(&mut rng, 2).scale_real(rng.gen_range(0.1..4.0));
        let b = ball_norm(&dirac_2d(hbar).unwrap(), &e).unwrap();
        let (s, t, w) = (e[(0, 0)].re, e[(1, 1)].re, e[(1, 0)]);
        let d = s - t;
        let lambda = (2.0 * w.norm_sqr() + d * d + d.abs() * (d * d + 4.0 * w.norm_sqr()).sqrt()) / 2.0;
        worst = worst.max((hbar * b * b / 2.0 - lambda).abs());
    }
    outcome(worst <= 1e-10, format!("1000 elements, worst {worst:.2e} (tol 1e-10)"))
}

fn mixed_diagonal() -> Vec<Outcome> {
    let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
    let (mut worst_pq, mut worst_literal, mut worst_unit) = (0.0_f64, 0.0_f64, 0.0_f64);
    for hbar in [0.5_f64, 1.0, 2.0] {
        let s = (hbar / 2.0).sqrt();
        for &p in &grid {
            for &q in &grid {
                let (rp, rq) = (diagonal_mixed(p).unwrap(), diagonal_mixed(q).unwrap());
                let d = d1(
                    &BlochVector::new(0.0, 0.0, 2.0 * p - 1.0).unwrap(),
                    &BlochVector::new(0.0, 0.0, 2.0 * q - 1.0).unwrap(),
                    hbar,
                );
                let d_t = trace_distance(&rp, &rq).unwrap();
                worst_pq = worst_pq.max((d - (p - q).abs() * s).abs());
                worst_literal = worst_literal.max((d - 2.0 * s * d_t).abs());
                worst_unit = worst_unit.max((d - s * d_t).abs());
            }
        }
    }
    vec![
        outcome(
            worst_pq <= 1e-12,
            format!("d = |p-q| sqrt(hbar/2) on 441 pairs x 3 hbar, worst {worst_pq:.2e} (tol 1e-12)"),
        ),
        outcome(
            worst_literal <= 1e-12,
            format!(
                "d = 2 sqrt(hbar/2) d_T, worst {worst_literal:.2e} (tol 1e-12); d_T(diag p, diag q) = |p-q|, so this contradicts the line above; d = sqrt(hbar/2) d_T holds with worst {worst_unit:.2e}"
            ),
        ),
    ]
}

/// The distance to `(0, 0, z')` is flat for `|z - z'| <= Δ⊥`, so the
/// minimizer is an interval; the check is that `q = (1 + z)/2` lies in it.
fn coherence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut worst_value, mut worst_q) = (0.0_f64, 0.0_f64);
    for _ in 0..1000 {
        let r = random_bloch(&mut rng);
        let rho = bloch_to_density(&r);
        let c = coherence_sd(&rho, 1.0).unwrap();
        let l1 = 2.0 * rho.matrix()[(0, 1)].norm();
        worst_value = worst_value
            .max((c.value - l1).abs())
            .max((c.value - r.x.hypot(r.y)).abs());

        let f = |q: f64| d1(&r, &BlochVector::new(0.0, 0.0, 2.0 * q - 1.0).unwrap(), 1.0);
        let (lo, hi) = argmin_interval(f);
        let q_star = (1.0 + r.z) / 2.0;
        let gap = (lo - q_star).max(q_star - hi).max(0.0);
        worst_q = worst_q.max(gap);
    }
    outcome(
        worst_value <= 1e-12 && worst_q <= 1e-6,
        format!("1000 states, value {worst_value:.2e} (tol 1e-12), q outside argmin {worst_q:.2e} (tol 1e-6)"),
    )
}

/// Golden-section minimum of a convex `f` on `[0, 1]`, then bisection for the
/// ends of the set where `f` stays within 1e-12 of it.
fn argmin_interval(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    while b - a > 1e-12 {
        let (x1, x2) = (b - ratio * (b - a), a + ratio * (b - a));
        if f(x1) <= f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let q_min = 0.5 * (a + b);
    let floor = f(q_min) + 1e-12;
    let edge = |mut outside: f64, mut inside: f64| {
        if f(outside) <= floor {
            return outside;
        }
        while (outside - inside).abs() > 1e-12 {
            let mid = 0.5 * (outside + inside);
            if f(mid) <= floor {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    (edge(0.0, q_min), edge(1.0, q_min))
}

fn trace_baseline() -> Outcome {
    let mut two_qubit_exact = true;
    let mut connes = Vec::new();
    for (a, b) in pairs() {
        let d_t = trace_distance(&two_qubit_basis(a.0, a.1).unwrap(), &two_qubit_basis(b.0, b.1).unwrap()).unwrap();
        two_qubit_exact &= d_t == 1.0;
        connes.push(distance_2q_basis(a, b, 1.0).unwrap().value);
    }
    let all_equal = connes.iter().all(|&c| c == connes[0]);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let (a, b) = (random_bloch(&mut rng), random_bloch(&mut rng));
        let [dx, dy, dz] = a.delta(&b);
        let d_t = trace_distance(&bloch_to_density(&a), &bloch_to_density(&b)).unwrap();
        worst = worst.max((d_t - (dx * dx + dy * dy + dz * dz).sqrt() / 2.0).abs());
    }
    outcome(
        two_qubit_exact && !all_equal && worst <= 1e-12,
        format!(
            "two-qubit d_T all exactly 1: {two_qubit_exact}, Connes values all equal: {all_equal}, one-qubit worst {worst:.2e} (tol 1e-12)"
        ),
    )
}

fn metric_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut symmetric = true;
    let mut triangle = 0.0_f64;
    for _ in 0..10_000 {
        let hbar = rng.gen_range(0.25..4.0);
        let [a, b, c] = [(); 3].map(|_| random_bloch(&mut rng));
        symmetric &= d1(&a, &b, hbar) == d1(&b, &a, hbar);
        triangle = triangle.max(d1(&a, &c, hbar) - d1(&a, &b, hbar) - d1(&b, &c, hbar));
    }
    let mut collinear = 0.0_f64;
    for _ in 0..1000 {
        let hbar = rng.gen_range(0.25..4.0);
        let (a, c) = (random_bloch(&mut rng), random_bloch(&mut rng));
        let t: f64 = rng.gen_range(0.0..1.0);
        let b = BlochVector::new(a.x + t * (c.x - a.x), a.y + t * (c.y - a.y), a.z + t * (c.z - a.z)).unwrap();
        collinear = collinear.max((d1(&a, &c, hbar) - d1(&a, &b, hbar) - d1(&b, &c, hbar)).abs());
    }
    let mut horizontal = 0.0_f64;
    for _ in 0..1000 {
        let hbar: f64 = rng.gen_range(0.25..4.0);
        let a = random_bloch(&mut rng);
        let rad = (1.0 - a.z * a.z).sqrt() * rng.gen_range(0.0..1.0);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let b = BlochVector::new(rad * phi.cos(), rad * phi.sin(), a.z).unwrap();
        let want = (hbar / 2.0).sqrt() * (a.x - b.x).hypot(a.y - b.y);
        horizontal = horizontal.max((d1(&a, &b, hbar) - want).abs());
    }
    outcome(
        symmetric && triangle <= 1e-10 && collinear <= 1e-10 && horizontal <= 1e-12,
        format!(
            "symmetry exact: {symmetric}, triangle excess {:.2e} (tol 1e-10), collinear {collinear:.2e} (tol 1e-10), horizontal {horizontal:.2e} (tol 1e-12)",
            triangle.max(0.0)
        ),
    )
}

fn determinism() -> Outcome {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_connes"))
            .args(["verify", "--seed", "7"])
            .output()
            .expect("spawn connes");
        let text = String::from_utf8(out.stdout).expect("utf-8 report");
        let body: String = text
            .lines()
            .filter(|l| !l.starts_with("timing_ms="))
            .map(|l| format!("{l}\n"))
            .collect();
        (out.status.code(), body)
    };
    let (first, second) = (run(), run());
    outcome(
        first == second && first.0 == Some(0),
        format!(
            "two `verify --seed 7` runs, identical without timing: {}, exit {:?}",
            first.1 == second.1,
            first.0
        ),
    )
}

fn main() {
    let mut results: Vec<(String, Outcome, bool)> = vec![
        ("1 one-qubit distance table".into(), one_qubit_table(), true),
        ("2 oracle cross-validation, one qubit".into(), oracle_one_qubit(), true),
        ("3 two-qubit basis distances".into(), two_qubit_basis_distances(), true),
        ("4 pythagoras identity".into(), pythagoras(), true),
        ("5 ball-condition identity".into(), ball_condition(), true),
    ];
    let mut mixed = mixed_diagonal().into_iter();
    results.push(("6 mixed diagonal states".into(), mixed.next().unwrap(), true));
    // The literal factor cannot hold together with the line above; reported, not gating.
    results.push(("6b mixed diagonal vs trace distance, factor 2".into(), mixed.next().unwrap(), false));
    results.extend([
        ("7 coherence".into(), coherence(), true),
        ("8 trace-distance baseline".into(), trace_baseline(), true),
        ("9 metric properties".into(), metric_properties(), true),
        ("10 verify determinism".into(), determinism(), true),
    ]);

    let mut gating_failures = 0;
    for (name, o, gating) in &results {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("{status} [{name}] {}", o.detail);
        if *gating && !o.passed {
            gating_failures += 1;
        }
    }
    if gating_failures > 0 {
        println!("{gating_failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
