//! Lattice arithmetic for twisted K3 surfaces of degree `d` and order `r`.
//!
//! The crate computes the discriminant group and finite quadratic form of the
//! twisted transcendental lattice `T_w = ker((w, -): Λ_d → Q/Z)`, decides when
//! it is isometric to the lattice `K_{d'}^⊥` of a special cubic fourfold with
//! `d' = d·r²`, and produces checkable certificates for that isometry.
//!
//! Layout:
//!
//! * [`arith`]: factorization, CRT and quadratic congruences over `BigInt`.
//! * [`lattice`]: Gram matrices, Smith normal form, vectors of `Λ_d`, Eichler
//!   invariants and the B-field shift.
//! * [`discform`]: residues in `Q/2Z`, finite quadratic forms and their
//!   isomorphism test.
//! * [`moduli`]: twist classes `w_{n,k}`, condition (**) and the component
//!   census.
//! * [`assoc`]: the decision procedure for `T_w ≅ K_{d'}^⊥` and witness
//!   certificates.

pub mod arith;
pub mod assoc;
pub mod discform;
pub mod lattice;
pub mod moduli;
pub mod serde_big;

pub use arith::{CongruenceSolution, Factorization};
pub use assoc::{Branch, WitnessCertificate};
pub use discform::{FiniteQuadraticForm, QMod1Z, QMod2Z, Structure};
pub use lattice::{Ambient, DiscGroup, GramMatrix, LatticeVector};
pub use moduli::{CensusReport, WClass};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
