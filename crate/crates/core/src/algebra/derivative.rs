//! Total derivatives and formal partial derivatives on the jet ring.

use super::atom::{Atom, Dep, Dir, JetIndex, DEFAULT_MAX_ORDER};
use super::poly::{int, DiffPoly, Monomial, Rational};
use crate::error::{Error, Result};

/// Image of a single atom under the total derivative, as a monomial.
fn atom_derivative(atom: &Atom, dir: Dir, max_order: u32) -> Result<Option<Monomial>> {
    Ok(match atom {
        Atom::Param(_) | Atom::Aux(_) => None,
        Atom::Indep(d) => (*d == dir).then(Monomial::one),
        Atom::Jet(dep, idx) => {
            let next = idx.bump(dir);
            if next.order() > max_order {
                return Err(Error::JetOrderExceeded {
                    order: next.order(),
                    max: max_order,
                });
            }
            Some(Monomial::atom(Atom::Jet(*dep, next)))
        }
        Atom::PhiDeriv(k) => Some(Monomial::from_factors([
            (Atom::PhiDeriv(k + 1), 1),
            (Atom::Jet(Dep::U, JetIndex::unit(dir)), 1),
        ])),
    })
}

/// Total derivative `D_dir` with the default order bound.
pub fn total_derivative(p: &DiffPoly, dir: Dir) -> Result<DiffPoly> {
    total_derivative_bounded(p, dir, DEFAULT_MAX_ORDER)
}

pub fn total_derivative_bounded(p: &DiffPoly, dir: Dir, max_order: u32) -> Result<DiffPoly> {
    let mut out = DiffPoly::zero();
    for (mono, coeff) in p.iter() {
        for (atom, exp) in mono.factors() {
            if let Some(d) = atom_derivative(atom, dir, max_order)? {
                let c = coeff * int(i64::from(*exp));
                out.add_term(c, mono.shift(atom, -1).mul(&d));
            }
        }
    }
    Ok(out)
}

/// Applies `D_J` for the multi-index `idx` (t-derivatives first; they commute).
pub fn total_derivative_multi(p: &DiffPoly, idx: JetIndex) -> Result<DiffPoly> {
    idx.dirs()
        .into_iter()
        .try_fold(p.clone(), |acc, d| total_derivative(&acc, d))
}

/// Formal partial derivative with respect to the jet coordinate `dep_idx`.
///
/// `phi⁽ᵏ⁾(u)` is treated as a function of `u`, so `∂/∂u` maps it to `phi⁽ᵏ⁺¹⁾`.
pub fn jet_partial(p: &DiffPoly, dep: Dep, idx: JetIndex) -> DiffPoly {
    let target = Atom::Jet(dep, idx);
    let phi_too = dep == Dep::U && idx == JetIndex::ZERO;
    let mut out = DiffPoly::zero();
    for (mono, coeff) in p.iter() {
        for (atom, exp) in mono.factors() {
            if *atom == target {
                out.add_term(coeff * int(i64::from(*exp)), mono.shift(atom, -1));
            } else if let (true, Atom::PhiDeriv(k)) = (phi_too, atom) {
                let m = mono
                    .shift(atom, -1)
                    .mul(&Monomial::atom(Atom::PhiDeriv(k + 1)));
                out.add_term(coeff * int(i64::from(*exp)), m);
            }
        }
    }
    out
}

/// Partial derivative with respect to an ordered derivative sequence such as
/// `(t, x, x)`, using the symmetric convention: the canonical partial is
/// shared equally among all distinct orderings of the same multiset.
pub fn ordered_jet_partial(p: &DiffPoly, dep: Dep, ordered: &[Dir]) -> DiffPoly {
    let idx = JetIndex::from_dirs(ordered);
    let partial = jet_partial(p, dep, idx);
    let mult = idx.multiplicity();
    if mult == 1 || partial.is_zero() {
        partial
    } else {
        partial.scale(&Rational::new(1.into(), mult.into()))
    }
}

/// Sum of `(-1)^|J| D_J (∂p/∂dep_J)` over the jet indices present: the Euler operator.
pub fn variational_derivative(p: &DiffPoly, dep: Dep) -> Result<DiffPoly> {
    let mut indices: Vec<JetIndex> = p
        .atoms()
        .into_iter()
        .filter_map(|a| match a {
            Atom::Jet(d, idx) if d == dep => Some(idx),
            _ => None,
        })
        .collect();
    let has_phi = dep == Dep::U && p.contains_atom(|a| matches!(a, Atom::PhiDeriv(_)));
    if has_phi && !indices.contains(&JetIndex::ZERO) {
        indices.push(JetIndex::ZERO);
    }
    indices.sort();
    let mut out = DiffPoly::zero();
    for idx in indices {
        let partial = jet_partial(p, dep, idx);
        if partial.is_zero() {
            continue;
        }
        let term = total_derivative_multi(&partial, idx)?;
        if idx.order() % 2 == 0 {
            out += term;
        } else {
            out -= term;
        }
    }
    Ok(out)
}

/// Total divergence `D_t(c1) + D_x(c2)`.
pub fn divergence(c1: &DiffPoly, c2: &DiffPoly) -> Result<DiffPoly> {
    Ok(total_derivative(c1, Dir::T)? + total_derivative(c2, Dir::X)?)
}
