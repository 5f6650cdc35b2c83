//! Substitution of the adjoint variable and of parameter values.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;

use super::atom::{Atom, Dep, JetIndex, Symbol};
use super::derivative::total_derivative_multi;
use super::poly::{DiffPoly, Monomial, Rational};
use crate::error::{Error, Result};

/// What to substitute into a differential polynomial.
#[derive(Debug, Clone, PartialEq)]
pub enum Substitution {
    /// `v = φ(u)`: every `v_J` becomes `D_J φ`, expanded by the chain rule.
    VToPhi,
    /// `v = expr` with `expr` free of `v`: every `v_J` becomes `D_J expr`.
    VTo(DiffPoly),
    /// Pointwise parameter (or auxiliary constant) values.
    Values(BTreeMap<Symbol, Rational>),
}

impl Substitution {
    pub fn value(name: &str, value: Rational) -> Self {
        Substitution::Values(BTreeMap::from([(Symbol::new(name), value)]))
    }
}

/// Replaces atoms for which `f` returns a polynomial, raising the image to the
/// atom's exponent. Negative exponents require a monomial image.
pub fn substitute_atoms<F>(p: &DiffPoly, mut f: F) -> Result<DiffPoly>
where
    F: FnMut(&Atom) -> Result<Option<DiffPoly>>,
{
    let mut cache: HashMap<Atom, Option<DiffPoly>> = HashMap::new();
    p.try_map_monomials(|mono| {
        let mut kept = Vec::new();
        let mut acc = DiffPoly::one();
        for (atom, exp) in mono.factors() {
            let image = match cache.get(atom) {
                Some(img) => img.clone(),
                None => {
                    let img = f(atom)?;
                    cache.insert(atom.clone(), img.clone());
                    img
                }
            };
            match image {
                None => kept.push((atom.clone(), *exp)),
                Some(img) if *exp >= 0 => acc = &acc * &img.pow(*exp as u32),
                Some(img) => acc = &acc * &invert_monomial(&img, atom)?.pow(exp.unsigned_abs()),
            }
        }
        Ok(acc.mul_monomial(&Rational::one(), &Monomial::from_factors(kept)))
    })
}

fn invert_monomial(img: &DiffPoly, atom: &Atom) -> Result<DiffPoly> {
    let terms = img.terms();
    match terms.as_slice() {
        [t] if t.monomial.factors().iter().all(|(a, _)| a.is_base_u()) => {
            let inv = Monomial::from_factors(t.monomial.factors().iter().map(|(a, e)| (a.clone(), -e)));
            Ok(DiffPoly::term(t.coeff.recip(), inv))
        }
        _ => Err(Error::InvalidSubstitution(format!(
            "negative power of {atom} replaced by a non-monomial"
        ))),
    }
}

/// Applies `subst` to `p`, prolonging replacements of `v` through total derivatives.
pub fn substitute_dependent(p: &DiffPoly, subst: &Substitution) -> Result<DiffPoly> {
    match subst {
        Substitution::VToPhi => substitute_v(p, &DiffPoly::atom(Atom::PhiDeriv(0))),
        Substitution::VTo(expr) => {
            if expr.contains_atom(|a| matches!(a, Atom::Jet(Dep::V, _))) {
                return Err(Error::InvalidSubstitution(
                    "replacement for v must not contain v".into(),
                ));
            }
            substitute_v(p, expr)
        }
        Substitution::Values(values) => substitute_atoms(p, |a| {
            Ok(match a {
                Atom::Param(s) | Atom::Aux(s) => values.get(s).cloned().map(DiffPoly::constant),
                _ => None,
            })
        }),
    }
}

fn substitute_v(p: &DiffPoly, replacement: &DiffPoly) -> Result<DiffPoly> {
    substitute_atoms(p, |a| match a {
        Atom::Jet(Dep::V, idx) => total_derivative_multi(replacement, *idx).map(Some),
        _ => Ok(None),
    })
}

/// Replaces `phi⁽ᵏ⁾` atoms using `f(k)`; fails when `f` has no image for an occurring order.
pub fn substitute_phi_derivatives<F>(p: &DiffPoly, f: F) -> Result<DiffPoly>
where
    F: Fn(u32) -> Option<DiffPoly>,
{
    substitute_atoms(p, |a| match a {
        Atom::PhiDeriv(k) => f(*k).map(Some).ok_or_else(|| {
            Error::InvalidSubstitution(format!("no closed form for {a}"))
        }),
        _ => Ok(None),
    })
}

/// Groups `p` by monomials in the atoms accepted by `designated`; the values are
/// the coefficient polynomials over the remaining atoms.
pub fn collect_monomials(
    p: &DiffPoly,
    designated: impl Fn(&Atom) -> bool,
) -> BTreeMap<Monomial, DiffPoly> {
    let mut out: BTreeMap<Monomial, DiffPoly> = BTreeMap::new();
    for (mono, coeff) in p.iter() {
        let (key, rest) = mono.partition(&designated);
        out.entry(key)
            .or_default()
            .add_term(coeff.clone(), rest);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Jet coordinates of positive order; the designated set for coefficient matching.
pub fn is_positive_order_jet(a: &Atom) -> bool {
    matches!(a, Atom::Jet(_, idx) if *idx != JetIndex::ZERO)
}

/// Sums `key * coefficient` back into a single polynomial.
pub fn reassemble(collected: &BTreeMap<Monomial, DiffPoly>) -> DiffPoly {
    collected
        .iter()
        .map(|(k, c)| c.mul_monomial(&Rational::one(), k))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::int;
    use crate::syntax::parse;

    fn p(s: &str) -> DiffPoly {
        parse(s).unwrap()
    }

    #[test]
    fn phi_closure_prolongs() {
        assert_eq!(
            substitute_dependent(&p("v_xx"), &Substitution::VToPhi).unwrap(),
            p("phi_u*u_xx + phi_uu*u_x^2")
        );
        assert_eq!(
            substitute_dependent(&p("v_t"), &Substitution::VToPhi).unwrap(),
            p("phi_u*u_t")
        );
    }

    #[test]
    fn identity_substitution() {
        assert_eq!(
            substitute_dependent(&p("v_txx"), &Substitution::VTo(DiffPoly::u())).unwrap(),
            p("u_txx")
        );
    }

    #[test]
    fn explicit_substitution() {
        let s = Substitution::VTo(p("a + b*u^2"));
        assert_eq!(substitute_dependent(&p("v_x"), &s).unwrap(), p("2*b*u*u_x"));
        assert_eq!(substitute_dependent(&p("v^2"), &s).unwrap(), p("(a + b*u^2)^2"));
    }

    #[test]
    fn replacement_containing_v_is_rejected() {
        let s = Substitution::VTo(p("v + u"));
        assert!(matches!(
            substitute_dependent(&p("v_x"), &s),
            Err(Error::InvalidSubstitution(_))
        ));
    }

    #[test]
    fn parameter_values() {
        let s = Substitution::value("beta", int(3));
        assert_eq!(
            substitute_dependent(&p("(3 - beta)*u_x + beta*u"), &s).unwrap(),
            p("3*u")
        );
    }

    #[test]
    fn phi_closed_forms_with_negative_powers() {
        // φ = a + b ln u
        let q = substitute_phi_derivatives(&p("u*phi_uu + phi_u"), |k| match k {
            1 => Some(p("b*u^-1")),
            2 => Some(p("-b*u^-2")),
            _ => None,
        })
        .unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn collect_and_reassemble() {
        let e = p("2*eps*phi_uu*u_x*u_tx + u*phi_u*u_xxx - u*phi_u*u_xxx + phi_u*u_t");
        let c = collect_monomials(&e, is_positive_order_jet);
        assert_eq!(c.get(&Monomial::from_factors([(Atom::jet(Dep::U, 0, 1), 1), (Atom::jet(Dep::U, 1, 1), 1)])), Some(&p("2*eps*phi_uu")));
        assert_eq!(c.len(), 2);
        assert_eq!(reassemble(&c), e);
        assert!(collect_monomials(&DiffPoly::zero(), is_positive_order_jet).is_empty());
    }
}
