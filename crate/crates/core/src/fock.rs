//! Fermionic ladder operators and the Dirac operators of the one- and
//! two-mode spectral triples.
//!
//! Elements `e` of the algebra act on the spinor Hilbert space through the
//! diagonal representation `π(e) = diag(e, ..., e)`. The distance only needs
//! the plain commutator `[D, π(e)]` for Hermitian `e`, so the graded
//! commutator used to derive the Dirac operator is not implemented here.

use crate::error::{Error, Result};
use crate::matlib::{commutator, kron, operator_norm, Complex, ComplexMatrix, MAX_DIM};

/// An element is inside the unit ball when its ball norm is at most `1 + ADMISSIBILITY_TOL`.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;

pub const DEFAULT_HBAR: f64 = 1.0;

/// `(f, f†)` on `span{|0⟩, |1⟩}` with `f = |0⟩⟨1|`.
pub fn ladder_1mode() -> (ComplexMatrix, ComplexMatrix) {
    let f = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).expect("2x2");
    let f_dag = f.dagger();
    (f, f_dag)
}

/// `(f₁, f₂)` on the basis `{|00⟩, |01⟩, |10⟩, |11⟩}`.
///
/// The two modes commute (no Jordan-Wigner string), so `f₁ = f ⊗ I` and
/// `f₂ = I ⊗ f`.
pub fn ladder_2mode() -> (ComplexMatrix, ComplexMatrix) {
    let (f, _) = ladder_1mode();
    let id = ComplexMatrix::identity(2);
    let f1 = kron(&f, &id).expect("4x4");
    let f2 = kron(&id, &f).expect("4x4");
    (f1, f2)
}

pub(crate) fn check_hbar(hbar: f64) -> Result<()> {
    if hbar.is_finite() && hbar > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidHbar(hbar))
    }
}

/// A finite spectral triple: Fock space of `n_modes` fermions, `spinor_copies`
/// copies of it as Hilbert space, and the Dirac operator acting there.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTriple {
    n_modes: usize,
    hbar: f64,
    fock_dim: usize,
    spinor_copies: usize,
    dirac: ComplexMatrix,
}

impl SpectralTriple {
    /// One-mode triple for states of dimension 2, two-mode triple for dimension 4.
    pub fn for_state_dim(dim: usize, hbar: f64) -> Result<Self> {
        match dim {
            2 => dirac_2d(hbar),
            4 => dirac_4d(hbar),
            other => Err(Error::UnsupportedDimension(other)),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn spinor_copies(&self) -> usize {
        self.spinor_copies
    }

    pub fn dirac(&self) -> &ComplexMatrix {
        &self.dirac
    }

    pub fn represent(&self, e: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_element(e)?;
        represent(e, self.spinor_copies)
    }

    fn check_element(&self, e: &ComplexMatrix) -> Result<()> {
        if e.dim() == self.fock_dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.fock_dim,
                right: e.dim(),
            })
        }
    }
}

/// `D = sqrt(2/ħ) [[0, f†], [f, 0]]` on `F ⊗ C²`.
pub fn dirac_2d(hbar: f64) -> Result<SpectralTriple> {
    check_hbar(hbar)?;
    let (f, f_dag) = ladder_1mode();
    let mut d = ComplexMatrix::zeros(4);
    d.set_block(0, 2, &f_dag);
    d.set_block(2, 0, &f);
    Ok(SpectralTriple {
        n_modes: 1,
        hbar,
        fock_dim: 2,
        spinor_copies: 2,
        dirac: d.scale_real((2.0 / hbar).sqrt()),
    })
}

/// Two-mode Dirac operator on `F ⊗ C⁴`:
///
/// ```text
/// D' = i sqrt(2/ħ) [[ 0,    0,    f₂†,  f₁† ],
///                   [ 0,    0,    f₁,  -f₂  ],
///                   [-f₂,  -f₁†,  0,    0   ],
///                   [-f₁,   f₂†,  0,    0   ]]
/// ```
pub fn dirac_4d(hbar: f64) -> Result<SpectralTriple> {
    check_hbar(hbar)?;
    let (f1, f2) = ladder_2mode();
    let (f1d, f2d) = (f1.dagger(), f2.dagger());
    let blocks: [(usize, usize, ComplexMatrix); 8] = [
        (0, 2, f2d.clone()),
        (0, 3, f1d.clone()),
        (1, 2, f1.clone()),
        (1, 3, -&f2),
        (2, 0, -&f2),
        (2, 1, -&f1d),
        (3, 0, -&f1),
        (3, 1, f2d),
    ];
    let mut d = ComplexMatrix::zeros(16);
    for (r, c, b) in &blocks {
        d.set_block(4 * r, 4 * c, b);
    }
    let prefactor = Complex::new(0.0, (2.0 / hbar).sqrt());
    Ok(SpectralTriple {
        n_modes: 2,
        hbar,
        fock_dim: 4,
        spinor_copies: 4,
        dirac: d.scale(prefactor),
    })
}

/// Block-diagonal `diag(e, ..., e)` with `copies` blocks.
pub fn represent(e: &ComplexMatrix, copies: usize) -> Result<ComplexMatrix> {
    let n = e.dim();
    let total = n.saturating_mul(copies);
    if copies == 0 || total > MAX_DIM {
        return Err(Error::UnsupportedDimension(total));
    }
    let mut out = ComplexMatrix::zeros(total);
    for k in 0..copies {
        out.set_block(k * n, k * n, e);
    }
    Ok(out)
}

/// `[D, π(e)]`.
pub fn dirac_commutator(triple: &SpectralTriple, e: &ComplexMatrix) -> Result<ComplexMatrix> {
    let pe = triple.represent(e)?;
    commutator(&triple.dirac, &pe)
}

/// `‖[D, π(e)]‖_op`.
pub fn ball_norm(triple: &SpectralTriple, e: &ComplexMatrix) -> Result<f64> {
    Ok(operator_norm(&dirac_commutator(triple, e)?))
}

pub fn is_admissible(triple: &SpectralTriple, e: &ComplexMatrix) -> Result<bool> {
    Ok(ball_norm(triple, e)? <= 1.0 + ADMISSIBILITY_TOL)
}

/// Slack `rhs - lhs` of the five necessary conditions on a diagonal two-mode
/// element `diag(e₁, e₂, e₃, e₄)` inside the unit ball:
///
/// ```text
/// (e₁-e₂)² ≤ ħ/2,  (e₁-e₃)² ≤ ħ/2,  (e₂-e₄)² ≤ ħ/2,  (e₃-e₄)² ≤ ħ/2,
/// (|e₁-e₂-e₃+e₄| + sqrt((e₁-e₄)² + (e₂-e₃)²))² ≤ ħ
/// ```
///
/// Every entry is non-negative iff all conditions hold.
pub fn diagonal_ball_slack(diag: [f64; 4], hbar: f64) -> [f64; 5] {
    let [e1, e2, e3, e4] = diag;
    let half = hbar / 2.0;
    let mixed = (e1 - e2 - e3 + e4).abs() + (e1 - e4).hypot(e2 - e3);
    [
        half - (e1 - e2).powi(2),
        half - (e1 - e3).powi(2),
        half - (e2 - e4).powi(2),
        half - (e3 - e4).powi(2),
        hbar - mixed * mixed,
    ]
}
