//! Exact construction of a unitary matrix of order q + 1 whose powers give
//! mutually unbiased bases in dimension q = p^a, together with machine-checked
//! certificates for every identity the construction relies on.
//!
//! The pipeline runs bottom-up:
//!
//! - [`finite_field`]: F_{q²}, its Frobenius, and the element α of order q + 1.
//! - [`group`]: the order-q⁴ group on F_{q²} × F_{q²}, its automorphism σ and
//!   the abelian subgroups A_i.
//! - [`representation`]: the degree-q irreducible representation X, induced
//!   from a linear character of A.
//! - [`intertwiner`]: the matrix D with D⁻¹X(x)D = X(σ(x)), normalized to
//!   D^{q+1} = I and det D = 1.
//! - [`mub`]: flatness certificates for the powers of D.
//! - [`lie`]: orthogonal Cartan decompositions of sl_q and sp_q for q = 2^a.

pub mod artifact;
pub mod certificate;
pub mod cli;
pub mod crosscheck;
pub mod error;
pub mod exact_number;
pub mod finite_field;
pub mod group;
pub mod intertwiner;
pub mod lie;
pub mod linalg;
pub mod mub;
pub mod representation;

pub use certificate::Certificate;
pub use error::{Error, Result};
pub use exact_number::{CyclotomicNumber, Rational};
pub use finite_field::{make_field, FieldElement, FieldSpec};
pub use group::{Group, GroupElement};
pub use linalg::ExactMatrix;
