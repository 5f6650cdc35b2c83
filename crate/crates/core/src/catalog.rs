//! Named members of the third-order family
//! `u_t - eps*u_txx - u*u_xxx - beta*u_x*u_xx - alpha*u*u_x + kappa*u_x = 0`
//! and the point symmetries used with them.

use std::collections::BTreeMap;

use crate::algebra::{int, DiffPoly, Rational, Symbol};
use crate::conslaw::Symmetry;
use crate::syntax::parse;
use crate::variational::EquationSpec;

pub const FAMILY_LHS: &str = "u_t - eps*u_txx - u*u_xxx - beta*u_x*u_xx - alpha*u*u_x + kappa*u_x";

fn family_with(values: &[(&str, i64)], name: &str) -> EquationSpec {
    let values: BTreeMap<Symbol, Rational> = values
        .iter()
        .map(|(k, v)| (Symbol::new(k), int(*v)))
        .collect();
    EquationSpec::with_values(parse(FAMILY_LHS).expect("family parses"), &values)
        .expect("family member is a valid equation")
        .named(name)
}

/// All four parameters symbolic.
pub fn generalized_family() -> EquationSpec {
    family_with(&[], "generalized family")
}

/// `eps = 0`, other parameters symbolic.
pub fn epsilon_zero_family() -> EquationSpec {
    family_with(&[("eps", 0)], "eps = 0 family")
}

/// `beta = 2`, other parameters symbolic.
pub fn beta_two_family() -> EquationSpec {
    family_with(&[("beta", 2)], "beta = 2 family")
}

/// `eps = 1, beta = 2, alpha = -3`, `kappa` symbolic.
pub fn camassa_holm() -> EquationSpec {
    family_with(&[("eps", 1), ("beta", 2), ("alpha", -3)], "Camassa-Holm")
}

/// Camassa-Holm with a fixed `kappa`.
pub fn camassa_holm_with_kappa(kappa: i64) -> EquationSpec {
    family_with(
        &[("eps", 1), ("beta", 2), ("alpha", -3), ("kappa", kappa)],
        "Camassa-Holm",
    )
}

pub fn fornberg_whitham() -> EquationSpec {
    family_with(
        &[("eps", 1), ("beta", 3), ("alpha", -1), ("kappa", 1)],
        "Fornberg-Whitham",
    )
}

pub fn rosenau_hyman() -> EquationSpec {
    family_with(
        &[("eps", 0), ("beta", 3), ("alpha", 1), ("kappa", 0)],
        "Rosenau-Hyman",
    )
}

/// `X = u ∂_u - t ∂_t`.
pub fn scaling_symmetry() -> Symmetry {
    Symmetry::new(parse("-t").unwrap(), DiffPoly::zero(), parse("u").unwrap())
        .expect("valid symmetry")
}

/// `X = -2t ∂_t + kappa t ∂_x + (kappa + 2u) ∂_u`, admitted by Camassa-Holm.
pub fn camassa_holm_generator() -> Symmetry {
    Symmetry::new(
        parse("-2*t").unwrap(),
        parse("kappa*t").unwrap(),
        parse("kappa + 2*u").unwrap(),
    )
    .expect("valid symmetry")
}

/// `X = ∂_x`.
pub fn x_translation() -> Symmetry {
    Symmetry::new(DiffPoly::zero(), DiffPoly::one(), DiffPoly::zero()).expect("valid symmetry")
}
