//! Symbolic differential algebra for evolution equations in one space
//! dimension: formal Lagrangians, adjoint equations, (quasi) self-adjointness
//! and conservation laws from point symmetries, plus a small spectral solver
//! for checking conserved functionals numerically.

pub mod algebra;
pub mod catalog;
pub mod conslaw;
pub mod error;
pub mod numerics;
pub mod properties;
pub mod random;
pub mod selfadjoint;
pub mod syntax;
pub mod variational;

pub use algebra::{Atom, Dep, Dir, DiffPoly, JetIndex, Monomial, Rational};
pub use error::{Error, Result};
pub use syntax::{parse, print};
