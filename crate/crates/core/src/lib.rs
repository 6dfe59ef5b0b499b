// SPDX-License-Identifier: Apache-2.0

//! Commutants of fermionic Gaussian unitaries on the Jordan-Wigner qubit
//! representation.

pub mod clifford_core;
pub mod dimensions;
pub mod error;
pub mod gaussian_group;
pub mod gt_basis;
pub mod invariants;
pub mod magic;
pub mod multicopy;

pub use clifford_core::{Pauli, SparseOperator, StateVector, C64};
pub use error::{Error, Result};
