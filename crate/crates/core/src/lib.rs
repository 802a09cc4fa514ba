//! Connes spectral distances between one- and two-qubit states.
//!
//! States live on the fermionic Fock space of one or two modes; the spectral
//! triple uses a Dirac operator built from the fermionic ladder operators.
//! Closed-form distances ([`spectral`]) are cross-checked by a numerical
//! supremum search over the unit ball of the Dirac commutator ([`oracle`]).

pub mod cli;
pub mod error;
pub mod fock;
pub mod matlib;
pub mod oracle;
pub mod spectral;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
