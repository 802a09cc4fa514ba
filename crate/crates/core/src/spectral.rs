//! Closed-form Connes spectral distances.
//!
//! For one qubit, write `Δr = r₁ - r₂`, `Δ⊥² = Δx² + Δy²`. Then
//!
//! ```text
//! d = sqrt(ħ/2) Δ⊥                       if Δ⊥² ≥ Δz²
//! d = ½ sqrt(ħ/2) |Δr|² / |Δz|           otherwise
//! ```
//!
//! The two branches agree on the cone `Δ⊥ = |Δz|`. For the two-qubit basis
//! states `|ij⟩` the distance only depends on the Hamming distance of the
//! labels: `sqrt(ħ/2)` for one flipped bit and `sqrt(ħ)` for two.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ball_norm, check_hbar, dirac_2d, dirac_4d};
use crate::matlib::{Complex, ComplexMatrix};
use crate::states::{bloch_to_density, density_to_bloch, two_qubit_basis, BlochVector, DensityMatrix};

/// One-qubit Hermitian element `[[s, u - iv], [u + iv, t]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianElementParams {
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

impl HermitianElementParams {
    pub fn to_matrix(self) -> ComplexMatrix {
        let w = Complex::new(self.u, self.v);
        ComplexMatrix::from_vec(
            2,
            vec![Complex::new(self.s, 0.0), w.conj(), w, Complex::new(self.t, 0.0)],
        )
        .expect("finite parameters")
    }

    pub fn from_matrix(e: &ComplexMatrix) -> Result<Self> {
        if e.dim() != 2 {
            return Err(Error::DimensionMismatch {
                left: 2,
                right: e.dim(),
            });
        }
        let defect = e.hermitian_defect();
        if defect > crate::matlib::HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let w = e[(1, 0)];
        Ok(Self {
            s: e[(0, 0)].re,
            t: e[(1, 1)].re,
            u: w.re,
            v: w.im,
        })
    }

    /// `tr(Δρ e) = ½(s - t)Δz + uΔx + vΔy`.
    pub fn objective(&self, delta: [f64; 3]) -> f64 {
        let [dx, dy, dz] = delta;
        0.5 * (self.s - self.t) * dz + self.u * dx + self.v * dy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    ClosedForm,
    Oracle,
}

impl DistanceMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMethod::ClosedForm => "closed_form",
            DistanceMethod::Oracle => "oracle",
        }
    }
}

/// A distance value with an optional certificate element.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceResult {
    pub value: f64,
    pub method: DistanceMethod,
    /// `None` when the states coincide and the maximizer is not unique.
    pub optimal_element: Option<ComplexMatrix>,
    pub ball_norm_of_element: Option<f64>,
}

/// Closed-form distance as a function of `Δr` alone.
pub fn distance_from_delta(delta: [f64; 3], hbar: f64) -> f64 {
    let [dx, dy, dz] = delta;
    let perp_sq = dx * dx + dy * dy;
    let z_sq = dz * dz;
    let scale = (hbar / 2.0).sqrt();
    if perp_sq >= z_sq {
        scale * perp_sq.sqrt()
    } else {
        0.5 * scale * (perp_sq + z_sq) / dz.abs()
    }
}

/// The same distance written in spherical coordinates
/// `Δr = r (sinθ cosφ, sinθ sinφ, cosθ)`.
pub fn distance_from_spherical(r: f64, theta: f64, hbar: f64) -> f64 {
    use std::f64::consts::FRAC_PI_4;
    let scale = (hbar / 2.0).sqrt();
    if (FRAC_PI_4..=3.0 * FRAC_PI_4).contains(&theta) {
        r * theta.sin() * scale
    } else {
        r / (2.0 * theta.cos().abs()) * scale
    }
}

pub fn distance_1q_value(r1: &BlochVector, r2: &BlochVector, hbar: f64) -> Result<f64> {
    check_hbar(hbar)?;
    Ok(distance_from_delta(r1.delta(r2), hbar))
}

pub fn distance_1q(r1: &BlochVector, r2: &BlochVector, hbar: f64) -> Result<DistanceResult> {
    let r1 = BlochVector::new(r1.x, r1.y, r1.z)?;
    let r2 = BlochVector::new(r2.x, r2.y, r2.z)?;
    let value = distance_1q_value(&r1, &r2, hbar)?;
    let (optimal_element, ball_norm_of_element) = match optimal_element_1q(&r1, &r2, hbar) {
        Ok(e) => {
            let b = ball_norm(&dirac_2d(hbar)?, &e)?;
            (Some(e), Some(b))
        }
        Err(Error::IdenticalStates) => (None, None),
        Err(other) => return Err(other),
    };
    Ok(DistanceResult {
        value,
        method: DistanceMethod::ClosedForm,
        optimal_element,
        ball_norm_of_element,
    })
}

/// Parameters of an element attaining the one-qubit supremum.
///
/// The magnitudes `|w|` and `|s - t|` are fixed by the branch; the phase of
/// `w` is aligned with `(Δx, Δy)` and the sign of `s - t` with `Δz`, with
/// `t = 0`, so that `tr(Δρ e)` is real and positive.
pub fn optimal_params_1q(r1: &BlochVector, r2: &BlochVector, hbar: f64) -> Result<HermitianElementParams> {
    check_hbar(hbar)?;
    let [dx, dy, dz] = r1.delta(r2);
    let perp_sq = dx * dx + dy * dy;
    let z_sq = dz * dz;
    if perp_sq == 0.0 && z_sq == 0.0 {
        return Err(Error::IdenticalStates);
    }
    let scale = (hbar / 2.0).sqrt();
    let (w_abs, st_abs) = if perp_sq > z_sq {
        (scale, 0.0)
    } else {
        (
            scale * perp_sq.sqrt() / dz.abs(),
            scale * (z_sq - perp_sq) / z_sq,
        )
    };
    let perp = perp_sq.sqrt();
    let (u, v) = if perp > 0.0 {
        (w_abs * dx / perp, w_abs * dy / perp)
    } else {
        (0.0, 0.0)
    };
    let s = if dz < 0.0 { -st_abs } else { st_abs };
    Ok(HermitianElementParams { s, t: 0.0, u, v })
}

pub fn optimal_element_1q(r1: &BlochVector, r2: &BlochVector, hbar: f64) -> Result<ComplexMatrix> {
    Ok(optimal_params_1q(r1, r2, hbar)?.to_matrix())
}

/// Coherence `C_SD(ρ) = sqrt(2/ħ) min_δ d(ρ, δ)` over diagonal `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coherence {
    pub value: f64,
    pub nearest: DensityMatrix,
    pub nearest_bloch: BlochVector,
}

/// The minimum over incoherent states is attained at the dephased state
/// `(0, 0, z)`, where `Δz = 0` and the distance is `sqrt(ħ/2) sqrt(x² + y²)`.
pub fn coherence_sd(rho: &DensityMatrix, hbar: f64) -> Result<Coherence> {
    check_hbar(hbar)?;
    let r = density_to_bloch(rho)?;
    let nearest_bloch = BlochVector { x: 0.0, y: 0.0, z: r.z };
    let d = distance_1q_value(&r, &nearest_bloch, hbar)?;
    Ok(Coherence {
        value: (2.0 / hbar).sqrt() * d,
        nearest: bloch_to_density(&nearest_bloch),
        nearest_bloch,
    })
}

pub type BasisLabel = (u8, u8);

fn check_bits((i, j): BasisLabel) -> Result<()> {
    if i > 1 || j > 1 {
        Err(Error::Parse(format!("basis2:{i}{j}")))
    } else {
        Ok(())
    }
}

/// `e_o^(1) = diag(sqrt(ħ/2), 0) ⊗ I₂`, optimal for flips of the first label.
pub fn first_mode_element(hbar: f64) -> ComplexMatrix {
    let a = (hbar / 2.0).sqrt();
    ComplexMatrix::from_diagonal(&[a, a, 0.0, 0.0]).expect("4x4")
}

/// `e_o^(2) = I₂ ⊗ diag(sqrt(ħ/2), 0)`, optimal for flips of the second label.
pub fn second_mode_element(hbar: f64) -> ComplexMatrix {
    let a = (hbar / 2.0).sqrt();
    ComplexMatrix::from_diagonal(&[a, 0.0, a, 0.0]).expect("4x4")
}

pub fn hamming(a: BasisLabel, b: BasisLabel) -> u8 {
    u8::from(a.0 != b.0) + u8::from(a.1 != b.1)
}

/// Distance between `|ij⟩` and `|kl⟩` with the matching optimal diagonal element.
pub fn distance_2q_basis(a: BasisLabel, b: BasisLabel, hbar: f64) -> Result<DistanceResult> {
    check_hbar(hbar)?;
    check_bits(a)?;
    check_bits(b)?;
    if a == b {
        return Ok(DistanceResult {
            value: 0.0,
            method: DistanceMethod::ClosedForm,
            optimal_element: None,
            ball_norm_of_element: None,
        });
    }
    let e1 = first_mode_element(hbar);
    let e2 = second_mode_element(hbar);
    let (value, element) = match (a.0 != b.0, a.1 != b.1) {
        (true, false) => ((hbar / 2.0).sqrt(), e1),
        (false, true) => ((hbar / 2.0).sqrt(), e2),
        _ => {
            // Both labels flip: |00⟩↔|11⟩ uses the sum, |01⟩↔|10⟩ the difference.
            let combined = if a.0 == a.1 { &e1 + &e2 } else { &e1 - &e2 };
            (hbar.sqrt(), combined.scale_real(FRAC_1_SQRT_2))
        }
    };
    let delta = two_qubit_basis(a.0, a.1)?.delta(&two_qubit_basis(b.0, b.1)?)?;
    let objective = delta.trace_product(&element)?.re;
    let element = if objective < 0.0 { -&element } else { element };
    let b_norm = ball_norm(&dirac_4d(hbar)?, &element)?;
    Ok(DistanceResult {
        value,
        method: DistanceMethod::ClosedForm,
        optimal_element: Some(element),
        ball_norm_of_element: Some(b_norm),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PythagorasIdentity {
    pub hypotenuse: (BasisLabel, BasisLabel),
    pub corner: BasisLabel,
    pub hypotenuse_sq: f64,
    pub legs_sq: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PythagorasReport {
    pub hbar: f64,
    pub identities: Vec<PythagorasIdentity>,
}

impl PythagorasReport {
    pub fn max_residual(&self) -> f64 {
        self.identities.iter().map(|i| i.residual.abs()).fold(0.0, f64::max)
    }
}

/// Checks `d(a, c)² = d(a, k)² + d(k, c)²` for both diagonals of the square of
/// basis states, through each of the two corners.
pub fn check_pythagoras(hbar: f64) -> Result<PythagorasReport> {
    let diagonals = [((0, 0), (1, 1), [(1, 0), (0, 1)]), ((0, 1), (1, 0), [(0, 0), (1, 1)])];
    let d = |a, b| distance_2q_basis(a, b, hbar).map(|r| r.value);
    let mut identities = Vec::new();
    for (a, c, corners) in diagonals {
        for corner in corners {
            let hyp = d(a, c)?.powi(2);
            let legs = d(a, corner)?.powi(2) + d(corner, c)?.powi(2);
            identities.push(PythagorasIdentity {
                hypotenuse: (a, c),
                corner,
                hypotenuse_sq: hyp,
                legs_sq: legs,
                residual: hyp - legs,
            });
        }
    }
    Ok(PythagorasReport { hbar, identities })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ADMISSIBILITY_TOL;
    use crate::states::{named_state, random_bloch, NamedState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn b(x: f64, y: f64, z: f64) -> BlochVector {
        BlochVector::new(x, y, z).unwrap()
    }

    fn named(tag: NamedState) -> BlochVector {
        tag.bloch()
    }

    fn objective(r1: &BlochVector, r2: &BlochVector, e: &ComplexMatrix) -> f64 {
        let delta = bloch_to_density(r1).delta(&bloch_to_density(r2)).unwrap();
        delta.trace_product(e).unwrap().re
    }

    #[test]
    fn named_pair_values() {
        use NamedState::*;
        let h = 1.0;
        let d = |a, c| distance_1q(&named(a), &named(c), h).unwrap().value;
        let half = FRAC_1_SQRT_2;
        assert!((d(Zero, One) - half).abs() < 1e-12);
        assert!((d(XPlus, YPlus) - 1.0).abs() < 1e-12);
        assert!((d(XPlus, XMinus) - SQRT_2).abs() < 1e-12);
        assert!((d(Zero, MaxMixed) - 0.5 * half).abs() < 1e-12);
        assert!((d(Zero, XPlus) - half).abs() < 1e-12);
        assert_eq!(d(YMinus, YMinus), 0.0);
    }

    #[test]
    fn diagonal_mixtures_scale_with_probability_gap() {
        for h in [0.5, 1.0, 3.0] {
            for (p, q) in [(0.1, 0.7), (0.9, 0.2), (0.5, 0.5)] {
                let r1 = b(0.0, 0.0, 2.0 * p - 1.0);
                let r2 = b(0.0, 0.0, 2.0 * q - 1.0);
                let got = distance_1q(&r1, &r2, h).unwrap().value;
                let expected = (p - q).abs() * (h / 2.0).sqrt();
                assert!((got - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identical_states_have_no_element() {
        let r = b(0.1, 0.2, 0.3);
        let res = distance_1q(&r, &r, 1.0).unwrap();
        assert_eq!(res.value, 0.0);
        assert!(res.optimal_element.is_none());
        assert!(res.ball_norm_of_element.is_none());
        assert_eq!(optimal_element_1q(&r, &r, 1.0), Err(Error::IdenticalStates));
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = BlochVector { x: 1.0, y: 1.0, z: 0.0 };
        assert!(distance_1q(&bad, &BlochVector::origin(), 1.0).is_err());
        assert!(distance_1q(&BlochVector::origin(), &b(0.0, 0.0, 1.0), 0.0).is_err());
        assert!(distance_2q_basis((2, 0), (0, 0), 1.0).is_err());
    }

    #[test]
    fn optimal_elements_for_named_pairs() {
        let h: f64 = 2.0;
        let scale = (h / 2.0).sqrt();
        // |0⟩ vs |1⟩: s - t = sqrt(ħ/2), w = 0.
        let p = optimal_params_1q(&b(0.0, 0.0, 1.0), &b(0.0, 0.0, -1.0), h).unwrap();
        assert!((p.s - p.t - scale).abs() < 1e-15 && p.u == 0.0 && p.v == 0.0);
        assert!((p.objective([0.0, 0.0, 2.0]) - scale).abs() < 1e-15);
        // |x;+⟩ vs |x;-⟩: real w = sqrt(ħ/2), s = t, value sqrt(2ħ).
        let p = optimal_params_1q(&b(1.0, 0.0, 0.0), &b(-1.0, 0.0, 0.0), h).unwrap();
        assert!((p.u - scale).abs() < 1e-15 && p.v == 0.0 && p.s == p.t);
        assert!((p.objective([2.0, 0.0, 0.0]) - (2.0 * h).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn branch_boundary_pair() {
        // |0⟩ vs |x;+⟩ sits on Δ⊥ = |Δz|; both branch expressions give sqrt(ħ/2).
        let h = 1.0;
        let (r1, r2) = (named(NamedState::Zero), named(NamedState::XPlus));
        let [dx, dy, dz] = r1.delta(&r2);
        let perp_sq = dx * dx + dy * dy;
        let scale = (h / 2.0_f64).sqrt();
        let branch_a = scale * perp_sq.sqrt();
        let branch_b = 0.5 * scale * (perp_sq + dz * dz) / dz.abs();
        assert!((branch_a - scale).abs() < 1e-15 && (branch_b - scale).abs() < 1e-15);
        let res = distance_1q(&r1, &r2, h).unwrap();
        assert!((res.value - scale).abs() < 1e-15);
        let e = res.optimal_element.unwrap();
        assert!((objective(&r1, &r2, &e) - scale).abs() < 1e-12);
    }

    #[test]
    fn optimal_element_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for h in [0.5, 1.0, 2.0] {
            for _ in 0..300 {
                let (r1, r2) = (random_bloch(&mut rng), random_bloch(&mut rng));
                let res = distance_1q(&r1, &r2, h).unwrap();
                let e = res.optimal_element.as_ref().unwrap();
                let bn = res.ball_norm_of_element.unwrap();
                assert!((bn - 1.0).abs() <= ADMISSIBILITY_TOL, "ball norm {bn}");
                assert!((objective(&r1, &r2, e) - res.value).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn closed_form_dominates_random_admissible_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let h = 1.0;
        let triple = dirac_2d(h).unwrap();
        for _ in 0..1000 {
            let (r1, r2) = (random_bloch(&mut rng), random_bloch(&mut rng));
            let e = HermitianElementParams {
                s: rng.gen_range(-1.0..1.0),
                t: rng.gen_range(-1.0..1.0),
                u: rng.gen_range(-1.0..1.0),
                v: rng.gen_range(-1.0..1.0),
            }
            .to_matrix();
            let bn = ball_norm(&triple, &e).unwrap();
            let e = if bn > 1.0 { e.scale_real(1.0 / bn) } else { e };
            let d = distance_1q_value(&r1, &r2, h).unwrap();
            assert!(objective(&r1, &r2, &e).abs() <= d + 1e-9);
        }
    }

    #[test]
    fn spherical_form_matches_cartesian() {
        let h = 1.7;
        for k in 0..=180 {
            let theta = PI * k as f64 / 180.0;
            for phi in [0.0_f64, 1.1, 4.0] {
                let r = 1.3;
                let delta = [r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos()];
                let cart = distance_from_delta(delta, h);
                let sph = distance_from_spherical(r, theta, h);
                assert!((cart - sph).abs() < 1e-12, "theta={theta}");
            }
        }
        assert!((distance_from_spherical(2.0, FRAC_PI_2, 1.0) - SQRT_2).abs() < 1e-15);
        assert!((distance_from_spherical(2.0, FRAC_PI_4, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coherence_examples() {
        let c = coherence_sd(&named_state(NamedState::XPlus), 1.0).unwrap();
        assert!((c.value - 1.0).abs() < 1e-15);
        assert_eq!(c.nearest_bloch.as_array(), [0.0, 0.0, 0.0]);
        assert_eq!(c.nearest, named_state(NamedState::MaxMixed));

        let diag = crate::states::diagonal_mixed(0.3).unwrap();
        let c = coherence_sd(&diag, 2.0).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(c.nearest.matrix().max_abs_diff(diag.matrix()).unwrap() < 1e-15);

        let rho = bloch_to_density(&b(0.3, 0.4, 0.5));
        for h in [0.5, 1.0, 4.0] {
            let c = coherence_sd(&rho, h).unwrap();
            assert!((c.value - 0.5).abs() < 1e-12);
            assert!((c.nearest_bloch.z - 0.5).abs() < 1e-15);
        }
        assert!(coherence_sd(&two_qubit_basis(0, 0).unwrap(), 1.0).is_err());
    }

    #[test]
    fn coherence_equals_twice_offdiagonal_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..500 {
            let rho = bloch_to_density(&random_bloch(&mut rng));
            let c = coherence_sd(&rho, 1.0).unwrap().value;
            assert!((c - 2.0 * rho.matrix()[(0, 1)].norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn two_qubit_table() {
        let h = 1.0;
        let half = FRAC_1_SQRT_2;
        let r = distance_2q_basis((0, 0), (1, 0), h).unwrap();
        assert!((r.value - half).abs() < 1e-15);
        let expected = ComplexMatrix::from_diagonal(&[half, half, 0.0, 0.0]).unwrap();
        assert!(r.optimal_element.unwrap().max_abs_diff(&expected).unwrap() < 1e-15);

        let r = distance_2q_basis((0, 0), (1, 1), h).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        let expected = ComplexMatrix::from_diagonal(&[1.0, 0.5, 0.5, 0.0]).unwrap();
        assert!(r.optimal_element.unwrap().max_abs_diff(&expected).unwrap() < 1e-15);

        let r = distance_2q_basis((0, 1), (1, 0), h).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        let expected = ComplexMatrix::from_diagonal(&[0.0, 0.5, -0.5, 0.0]).unwrap();
        assert!(r.optimal_element.unwrap().max_abs_diff(&expected).unwrap() < 1e-15);

        let r = distance_2q_basis((1, 1), (1, 1), h).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.optimal_element.is_none());
    }

    #[test]
    fn two_qubit_certificates_all_ordered_pairs() {
        for h in [0.5, 1.0, 2.0] {
            for a in 0..4u8 {
                for c in 0..4u8 {
                    if a == c {
                        continue;
                    }
                    let (la, lc) = ((a >> 1, a & 1), (c >> 1, c & 1));
                    let res = distance_2q_basis(la, lc, h).unwrap();
                    let expected = if hamming(la, lc) == 1 { (h / 2.0).sqrt() } else { h.sqrt() };
                    assert!((res.value - expected).abs() < 1e-15);
                    assert!(res.ball_norm_of_element.unwrap() <= 1.0 + ADMISSIBILITY_TOL);
                    let delta = two_qubit_basis(la.0, la.1)
                        .unwrap()
                        .delta(&two_qubit_basis(lc.0, lc.1).unwrap())
                        .unwrap();
                    let obj = delta.trace_product(res.optimal_element.as_ref().unwrap()).unwrap().re;
                    assert!((obj - res.value).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn pythagoras() {
        let rep = check_pythagoras(1.0).unwrap();
        assert_eq!(rep.identities.len(), 4);
        for id in &rep.identities {
            assert!((id.hypotenuse_sq - 1.0).abs() < 1e-12);
            assert!((id.legs_sq - 1.0).abs() < 1e-12);
        }
        let rep = check_pythagoras(3.0).unwrap();
        assert!((rep.identities[0].hypotenuse_sq - 3.0).abs() < 1e-12);
        assert!(rep.max_residual() < 1e-12);
    }

    #[test]
    fn params_matrix_roundtrip() {
        let p = HermitianElementParams { s: 0.2, t: -0.5, u: 0.3, v: -0.9 };
        assert_eq!(HermitianElementParams::from_matrix(&p.to_matrix()).unwrap(), p);
        assert!(HermitianElementParams::from_matrix(&ComplexMatrix::identity(4)).is_err());
    }
}
