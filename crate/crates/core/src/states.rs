//! Qubit states: Bloch vectors, density matrices, named states, two-qubit
//! basis projectors and the trace distance.
//!
//! The textual state grammar shared with the CLI is
//! `0 | 1 | x+ | x- | y+ | y- | mixed | bloch:x,y,z | diag:p | basis2:ij`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlib::{hermitian_eigenvalues, Complex, ComplexMatrix, HERMITIAN_TOL};

const BLOCH_NORM_SQ_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const NEGATIVE_EIGEN_TOL: f64 = -1e-10;

/// Threshold on `|r|` above which a one-qubit state is reported as pure.
pub const PURITY_TOL: f64 = 1e-10;

/// Bloch vector of a one-qubit state, `ρ = (I + r·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let ok = x.is_finite()
            && y.is_finite()
            && z.is_finite()
            && x * x + y * y + z * z <= 1.0 + BLOCH_NORM_SQ_TOL;
        if ok {
            Ok(Self { x, y, z })
        } else {
            Err(Error::InvalidBloch { x, y, z })
        }
    }

    pub fn origin() -> Self {
        Self { x: 0.0, y: 0.0, z: 0.0 }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_pure(&self) -> bool {
        self.norm() >= 1.0 - PURITY_TOL
    }

    /// Componentwise `self - other`.
    pub fn delta(&self, other: &Self) -> [f64; 3] {
        [self.x - other.x, self.y - other.y, self.z - other.z]
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates an arbitrary matrix as a one- or two-qubit density matrix.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.dim() != 2 && mat.dim() != 4 {
            return Err(Error::UnsupportedDimension(mat.dim()));
        }
        let defect = mat.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min_eig = hermitian_eigenvalues(&mat)?[0];
        if min_eig < NEGATIVE_EIGEN_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { mat })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// True when every off-diagonal entry vanishes within `tol`.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.mat[(i, j)].norm() <= tol))
    }

    /// `ρ₁ - ρ₂`.
    pub fn delta(&self, other: &Self) -> Result<ComplexMatrix> {
        self.mat.try_sub(&other.mat)
    }
}

pub fn bloch_to_density(r: &BlochVector) -> DensityMatrix {
    let BlochVector { x, y, z } = *r;
    let data = vec![
        Complex::new(0.5 * (1.0 + z), 0.0),
        Complex::new(0.5 * x, -0.5 * y),
        Complex::new(0.5 * x, 0.5 * y),
        Complex::new(0.5 * (1.0 - z), 0.0),
    ];
    // Already valid for |r| <= 1; skip the eigen check.
    DensityMatrix {
        mat: ComplexMatrix::from_vec(2, data).expect("finite 2x2"),
    }
}

pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: rho.dim(),
        });
    }
    let m = rho.matrix();
    let lower = m[(1, 0)];
    Ok(BlochVector {
        x: 2.0 * lower.re,
        y: 2.0 * lower.im,
        z: m[(0, 0)].re - m[(1, 1)].re,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedState {
    Zero,
    One,
    XPlus,
    XMinus,
    YPlus,
    YMinus,
    MaxMixed,
}

impl NamedState {
    pub const ALL: [NamedState; 7] = [
        NamedState::Zero,
        NamedState::One,
        NamedState::XPlus,
        NamedState::XMinus,
        NamedState::YPlus,
        NamedState::YMinus,
        NamedState::MaxMixed,
    ];

    pub fn bloch(self) -> BlochVector {
        let (x, y, z) = match self {
            NamedState::Zero => (0.0, 0.0, 1.0),
            NamedState::One => (0.0, 0.0, -1.0),
            NamedState::XPlus => (1.0, 0.0, 0.0),
            NamedState::XMinus => (-1.0, 0.0, 0.0),
            NamedState::YPlus => (0.0, 1.0, 0.0),
            NamedState::YMinus => (0.0, -1.0, 0.0),
            NamedState::MaxMixed => (0.0, 0.0, 0.0),
        };
        BlochVector { x, y, z }
    }

    pub fn token(self) -> &'static str {
        match self {
            NamedState::Zero => "0",
            NamedState::One => "1",
            NamedState::XPlus => "x+",
            NamedState::XMinus => "x-",
            NamedState::YPlus => "y+",
            NamedState::YMinus => "y-",
            NamedState::MaxMixed => "mixed",
        }
    }
}

/// Projector onto the named pure state, or `I/2` for [`NamedState::MaxMixed`].
pub fn named_state(tag: NamedState) -> DensityMatrix {
    bloch_to_density(&tag.bloch())
}

/// `p|0⟩⟨0| + (1-p)|1⟩⟨1|`.
pub fn diagonal_mixed(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(DensityMatrix {
        mat: ComplexMatrix::from_diagonal(&[p, 1.0 - p])?,
    })
}

/// `|ij⟩⟨ij|` in the basis order `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn two_qubit_basis(i: u8, j: u8) -> Result<DensityMatrix> {
    if i > 1 || j > 1 {
        return Err(Error::Parse(format!("basis2:{i}{j}")));
    }
    let mut diag = [0.0; 4];
    diag[2 * i as usize + j as usize] = 1.0;
    Ok(DensityMatrix {
        mat: ComplexMatrix::from_diagonal(&diag)?,
    })
}

/// `½ tr|ρ₁ - ρ₂|`.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    let delta = rho1.delta(rho2)?;
    let ev = hermitian_eigenvalues(&delta)?;
    Ok(0.5 * ev.iter().map(|v| v.abs()).sum::<f64>())
}

/// Parsed state token from the shared grammar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Named { state: NamedState },
    Bloch { x: f64, y: f64, z: f64 },
    Diag { p: f64 },
    Basis2 { i: u8, j: u8 },
}

impl StateSpec {
    pub fn dim(&self) -> usize {
        match self {
            StateSpec::Basis2 { .. } => 4,
            _ => 2,
        }
    }

    /// Bloch vector for one-qubit specs.
    pub fn bloch(&self) -> Option<BlochVector> {
        match *self {
            StateSpec::Named { state } => Some(state.bloch()),
            StateSpec::Bloch { x, y, z } => Some(BlochVector { x, y, z }),
            StateSpec::Diag { p } => Some(BlochVector {
                x: 0.0,
                y: 0.0,
                z: 2.0 * p - 1.0,
            }),
            StateSpec::Basis2 { .. } => None,
        }
    }

    pub fn basis_bits(&self) -> Option<(u8, u8)> {
        match *self {
            StateSpec::Basis2 { i, j } => Some((i, j)),
            _ => None,
        }
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        match *self {
            StateSpec::Named { state } => Ok(named_state(state)),
            StateSpec::Bloch { x, y, z } => Ok(bloch_to_density(&BlochVector::new(x, y, z)?)),
            StateSpec::Diag { p } => diagonal_mixed(p),
            StateSpec::Basis2 { i, j } => two_qubit_basis(i, j),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(token: &str) -> Result<Self> {
        let bad = || Error::Parse(token.to_string());
        if let Some(state) = NamedState::ALL.iter().find(|s| s.token() == token) {
            return Ok(StateSpec::Named { state: *state });
        }
        let (kind, rest) = token.split_once(':').ok_or_else(bad)?;
        let number = |s: &str| -> Result<f64> {
            let v: f64 = s.trim().parse().map_err(|_| bad())?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        match kind {
            "bloch" => {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 3 {
                    return Err(bad());
                }
                let (x, y, z) = (number(parts[0])?, number(parts[1])?, number(parts[2])?);
                BlochVector::new(x, y, z).map_err(|_| bad())?;
                Ok(StateSpec::Bloch { x, y, z })
            }
            "diag" => {
                let p = number(rest)?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad());
                }
                Ok(StateSpec::Diag { p })
            }
            "basis2" => match rest.as_bytes() {
                [a @ (b'0' | b'1'), b @ (b'0' | b'1')] => Ok(StateSpec::Basis2 {
                    i: a - b'0',
                    j: b - b'0',
                }),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Named { state } => f.write_str(state.token()),
            StateSpec::Bloch { x, y, z } => write!(f, "bloch:{x},{y},{z}"),
            StateSpec::Diag { p } => write!(f, "diag:{p}"),
            StateSpec::Basis2 { i, j } => write!(f, "basis2:{i}{j}"),
        }
    }
}

/// Uniform sample from the closed unit ball by rejection.
pub fn random_bloch(rng: &mut impl Rng) -> BlochVector {
    loop {
        let (x, y, z) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if let Ok(r) = BlochVector::new(x, y, z) {
            return r;
        }
    }
}
