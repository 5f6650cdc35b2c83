//! Equations, formal Lagrangians and adjoint equations.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::algebra::{
    substitute_dependent, variational_derivative, Atom, Dep, DiffPoly, JetIndex, Rational,
    Substitution, Symbol,
};
use crate::error::{Error, Result};

/// A scalar evolution equation `F = 0` in `u(t, x)`.
///
/// Parameter values supplied at construction are substituted into `lhs`;
/// parameters left without a value stay symbolic.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationSpec {
    name: Option<String>,
    lhs: DiffPoly,
    params: BTreeMap<Symbol, Option<Rational>>,
    leading: Option<JetIndex>,
}

impl EquationSpec {
    pub fn new(lhs: DiffPoly) -> Result<Self> {
        Self::with_values(lhs, &BTreeMap::new())
    }

    /// Builds the equation after substituting the given parameter values.
    pub fn with_values(lhs: DiffPoly, values: &BTreeMap<Symbol, Rational>) -> Result<Self> {
        if lhs.is_zero() {
            return Err(Error::InvalidEquation("F is identically zero".into()));
        }
        if lhs.contains_atom(|a| matches!(a, Atom::Jet(Dep::V, _) | Atom::PhiDeriv(_))) {
            return Err(Error::InvalidEquation("F must depend on u-jets only".into()));
        }
        let mut params: BTreeMap<Symbol, Option<Rational>> = lhs
            .atoms()
            .into_iter()
            .filter_map(|a| match a {
                Atom::Param(s) => Some((s, None)),
                _ => None,
            })
            .collect();
        for (k, v) in values {
            params.insert(k.clone(), Some(v.clone()));
        }
        let lhs = if values.is_empty() {
            lhs
        } else {
            substitute_dependent(&lhs, &Substitution::Values(values.clone()))?
        };
        if lhs.is_zero() {
            return Err(Error::InvalidEquation("F vanishes for these parameter values".into()));
        }
        let leading = detect_leading(&lhs);
        Ok(EquationSpec {
            name: None,
            lhs,
            params,
            leading,
        })
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    /// Overrides the automatically chosen leading derivative.
    pub fn with_leading(mut self, idx: JetIndex) -> Result<Self> {
        if !is_solvable_for(&self.lhs, idx) {
            return Err(Error::InvalidEquation(format!(
                "F cannot be solved for {}",
                Atom::Jet(Dep::U, idx)
            )));
        }
        self.leading = Some(idx);
        Ok(self)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn lhs(&self) -> &DiffPoly {
        &self.lhs
    }

    pub fn params(&self) -> &BTreeMap<Symbol, Option<Rational>> {
        &self.params
    }

    /// Parameters that still occur symbolically in `F`.
    pub fn free_params(&self) -> Vec<Symbol> {
        self.params
            .iter()
            .filter(|(_, v)| v.is_none())
            .map(|(k, _)| k.clone())
            .collect()
    }

    pub fn leading(&self) -> Option<JetIndex> {
        self.leading
    }

    /// Solves `F = 0` for the leading coordinate: returns `(J, rhs)` with `u_J = rhs`.
    pub fn solved(&self) -> Result<(JetIndex, DiffPoly)> {
        let idx = self.leading.ok_or(Error::NoLeadingDerivative)?;
        let atom = Atom::Jet(Dep::U, idx);
        let c = self
            .lhs
            .coeff_of_power(&atom, 1)
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or(Error::NoLeadingDerivative)?;
        let rest = self.lhs.coeff_of_power(&atom, 0);
        Ok((idx, rest.scale(&(-c.recip()))))
    }

    /// The same equation with `F` multiplied by a nonzero rational.
    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::InvalidEquation("scale factor must be nonzero".into()));
        }
        Ok(EquationSpec {
            lhs: self.lhs.scale(c),
            ..self.clone()
        })
    }
}

impl fmt::Display for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = 0", self.lhs)
    }
}

/// `F` is linear in `u_J` with a nonzero rational coefficient, and no other
/// jet of `F` is a derivative of `u_J`.
fn is_solvable_for(lhs: &DiffPoly, idx: JetIndex) -> bool {
    let atom = Atom::Jet(Dep::U, idx);
    if lhs.degree_in(&atom) != 1 {
        return false;
    }
    let constant_coeff = lhs
        .coeff_of_power(&atom, 1)
        .as_constant()
        .is_some_and(|c| !c.is_zero());
    let dominated = lhs.atoms().iter().any(|a| {
        matches!(a, Atom::Jet(Dep::U, other) if *other != idx && other.dominates(idx))
    });
    constant_coeff && !dominated
}

fn detect_leading(lhs: &DiffPoly) -> Option<JetIndex> {
    lhs.atoms()
        .into_iter()
        .filter_map(|a| match a {
            Atom::Jet(Dep::U, idx) if idx != JetIndex::ZERO => Some(idx),
            _ => None,
        })
        .filter(|idx| is_solvable_for(lhs, *idx))
        .max_by_key(|idx| (idx.nt > 0, idx.order(), idx.nt))
}

/// `L = v·F`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalLagrangian {
    pub value: DiffPoly,
}

pub fn formal_lagrangian(eq: &EquationSpec) -> FormalLagrangian {
    FormalLagrangian {
        value: &DiffPoly::v() * eq.lhs(),
    }
}

/// `F* = δ(vF)/δu`.
pub fn adjoint(eq: &EquationSpec) -> Result<DiffPoly> {
    variational_derivative(&formal_lagrangian(eq).value, Dep::U)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;
    use crate::catalog;
    use crate::syntax::parse;

    fn p(s: &str) -> DiffPoly {
        parse(s).unwrap()
    }

    #[test]
    fn lagrangian_of_trivial_equation() {
        let eq = EquationSpec::new(p("u_t")).unwrap();
        assert_eq!(formal_lagrangian(&eq).value, p("v*u_t"));
        assert_eq!(adjoint(&eq).unwrap(), p("-v_t"));
    }

    #[test]
    fn lagrangian_recovers_f() {
        let eq = catalog::generalized_family();
        let l = formal_lagrangian(&eq).value;
        let back = substitute_dependent(&l, &Substitution::VTo(DiffPoly::one())).unwrap();
        assert_eq!(&back, eq.lhs());
    }

    #[test]
    fn rosenau_hyman_lagrangian() {
        let l = formal_lagrangian(&catalog::rosenau_hyman()).value;
        assert_eq!(l, p("v*(u_t - u*u_xxx - 3*u_x*u_xx - u*u_x)"));
    }

    #[test]
    fn leading_derivative_detection() {
        assert_eq!(catalog::camassa_holm().leading(), Some(JetIndex::new(1, 2)));
        assert_eq!(catalog::rosenau_hyman().leading(), Some(JetIndex::new(1, 0)));
        assert_eq!(catalog::generalized_family().leading(), None);
        assert_eq!(catalog::epsilon_zero_family().leading(), Some(JetIndex::new(1, 0)));
    }

    #[test]
    fn solved_form_of_camassa_holm() {
        let (idx, rhs) = catalog::camassa_holm().solved().unwrap();
        assert_eq!(idx, JetIndex::new(1, 2));
        assert_eq!(rhs, p("u_t - u*u_xxx - 2*u_x*u_xx + 3*u*u_x + kappa*u_x"));
    }

    #[test]
    fn invalid_equations() {
        assert!(EquationSpec::new(p("v*u_t")).is_err());
        assert!(EquationSpec::new(DiffPoly::zero()).is_err());
        let eq = EquationSpec::new(p("u_t - u*u_xx")).unwrap();
        assert!(eq.clone().with_leading(JetIndex::new(0, 2)).is_err());
        assert!(eq.scaled(&int(0)).is_err());
    }

    #[test]
    fn values_are_substituted() {
        let eq = catalog::fornberg_whitham();
        assert_eq!(eq.lhs(), &p("u_t - u_txx - u*u_xxx - 3*u_x*u_xx + u*u_x + u_x"));
        assert!(eq.free_params().is_empty());
    }
}
