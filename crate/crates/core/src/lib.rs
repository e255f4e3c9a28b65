//! Geometric transitions between classical geometries.
//!
//! The crate is organised around the objects that degenerate:
//!
//! * [`scalar`] and [`matrix`]: the algebras `R[λ]/(λ² = δ)` and matrices
//!   over them, with their unitary groups and real representations.
//! * [`limits`]: exact conjugacy limits of diagonal orthogonal Lie algebras,
//!   encoded as ordered partitions with projective block data.
//! * [`cells`]: the cell structure of the closure of the diagonal orthogonal
//!   groups.
//! * [`heis`]: representations of `Z²` into the Heisenberg group and the
//!   developing maps of Heisenberg tori.
//! * [`regen`]: numerical regeneration of Heisenberg tori from hyperbolic and
//!   spherical cone tori.

pub mod cells;
pub mod error;
pub mod heis;
pub mod limits;
pub mod matrix;
pub mod regen;
pub mod scalar;

pub use error::{Error, Result};
pub use matrix::{AlgMatrix, HermitianForm, RealMatrix};
pub use scalar::{AlgScalar, AlgebraKind};
