//! Integer lattices with fixed bases.
//!
//! The ambient lattices are `Λ_d = E8(-1)² ⊕ U1 ⊕ U2 ⊕ <ℓ'_d>` and
//! `Λ_d ⊕ U4`, in the coordinate order documented in
//! `data/lattice_basis.txt` (see [`BASIS_DOC`]).

mod bfield;
mod eichler;
mod gram;
mod vector;

pub use bfield::{bfield_shift, exp_w_integrality};
pub use eichler::{
    eichler_equivalent, eichler_invariants, orbit_invariants, EichlerInvariants, OrbitInvariants,
};
pub use gram::{gram_t0, invariant_factors_formula, smith_normal_form, DiscGroup, GramMatrix};
pub use vector::{inner_product, Ambient, LatticeVector, E8_GRAM};

use num_bigint::BigInt;
use thiserror::Error;

/// Human-readable description of basis order and Gram blocks.
pub const BASIS_DOC: &str = include_str!("../../data/lattice_basis.txt");

/// Coordinate indices shared by both ambient lattices.
pub mod idx {
    pub const E8_FIRST: std::ops::Range<usize> = 0..8;
    pub const E8_SECOND: std::ops::Range<usize> = 8..16;
    pub const E1: usize = 16;
    pub const F1: usize = 17;
    pub const E2: usize = 18;
    pub const F2: usize = 19;
    pub const ELL: usize = 20;
    pub const E4: usize = 21;
    pub const F4: usize = 22;
    pub const RANK_LAMBDA_D: usize = 21;
    pub const RANK_LAMBDA_D_U: usize = 23;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is singular")]
    Singular,
    #[error("vectors live in different ambient lattices ({left} vs {right})")]
    AmbientMismatch { left: String, right: String },
    #[error("expected a vector of {expected}, got one of {found}")]
    WrongAmbient { expected: String, found: String },
    #[error("vector is not integral")]
    NotIntegral,
    #[error("vector is not primitive (content {content})")]
    NotPrimitive { content: BigInt },
    #[error("coordinate list has length {found}, expected {expected}")]
    BadLength { expected: usize, found: usize },
    #[error("degree d must be even and at least 2, got {0}")]
    BadDegree(BigInt),
}
