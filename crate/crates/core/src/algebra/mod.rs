//! The differential-polynomial ring over jet space.

mod atom;
mod derivative;
pub(crate) mod poly;
mod substitute;

pub use atom::{Atom, Dep, Dir, JetIndex, Symbol, DEFAULT_MAX_ORDER};
pub use derivative::{
    divergence, jet_partial, ordered_jet_partial, total_derivative, total_derivative_bounded,
    total_derivative_multi, variational_derivative,
};
pub use poly::{int, rat, DiffPoly, Monomial, Rational, Term};
pub use substitute::{
    collect_monomials, is_positive_order_jet, reassemble, substitute_atoms, substitute_dependent,
    substitute_phi_derivatives, Substitution,
};
