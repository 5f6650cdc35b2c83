//! Branching solver for the Euler-type constraints on φ.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::family::{check_family, linear_single_param, FamilyCheck, PhiFamily};
use crate::algebra::{
    collect_monomials, substitute_dependent, Atom, DiffPoly, Monomial, Rational, Substitution,
    Symbol,
};
use crate::error::Result;
use crate::syntax::{format_rational, print};

const MAX_DEPTH: usize = 16;

/// A condition on the parameters under which a branch holds.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    Zero(DiffPoly),
    NonZero(DiffPoly),
}

impl Condition {
    fn poly(&self) -> &DiffPoly {
        match self {
            Condition::Zero(p) | Condition::NonZero(p) => p,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self {
            Condition::Zero(_) => "=",
            Condition::NonZero(_) => "!=",
        };
        match linear_single_param(self.poly()) {
            Some((s, v)) => write!(f, "{s} {op} {}", format_rational(&v)),
            None => write!(f, "{} {op} 0", print(self.poly())),
        }
    }
}

/// How a branch of the case analysis ends.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Family(PhiFamily),
    Inconsistent(String),
    /// Constraints left unsolved; the solver does not handle their shape.
    Undetermined(Vec<DiffPoly>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub conditions: Vec<Condition>,
    pub outcome: Outcome,
}

impl Branch {
    /// Parameter values fixed by the `Zero` conditions.
    pub fn values(&self) -> BTreeMap<Symbol, Rational> {
        fixed_values(&self.conditions)
    }
}

fn fixed_values(conditions: &[Condition]) -> BTreeMap<Symbol, Rational> {
    conditions
        .iter()
        .filter_map(|c| match c {
            Condition::Zero(p) => linear_single_param(p),
            Condition::NonZero(_) => None,
        })
        .collect()
}

/// Recognized constraint shapes.
#[derive(Debug, Clone)]
enum Shape {
    /// `c·φ⁽ᵏ⁾ = 0`; `coeff` is `None` when it is a nonzero constant.
    Single { k: u32, coeff: Option<DiffPoly> },
    /// `u·φ⁽ᵏ⁺¹⁾ = μ·φ⁽ᵏ⁾`
    Euler { k: u32, mu: DiffPoly },
}

impl Shape {
    fn rank(&self) -> (u32, u8) {
        match self {
            Shape::Single { k, .. } => (*k, 0),
            Shape::Euler { k, .. } => (k + 1, 1),
        }
    }
}

fn by_u_power(c: &DiffPoly) -> BTreeMap<Monomial, DiffPoly> {
    collect_monomials(c, Atom::is_base_u)
}

fn shape_of(c: &DiffPoly, nonzero: &[DiffPoly]) -> Option<Shape> {
    let groups = collect_monomials(c, |a| matches!(a, Atom::PhiDeriv(_)));
    let mut orders = Vec::new();
    for (key, coeff) in &groups {
        match key.factors() {
            [(Atom::PhiDeriv(k), 1)] => orders.push((*k, coeff)),
            _ => return None,
        }
    }
    match orders.as_slice() {
        [(k, coeff)] => {
            let params: Vec<DiffPoly> = by_u_power(coeff).into_values().map(|p| p.primitive()).collect();
            if params.iter().any(|p| p.as_constant().is_some()) {
                return Some(Shape::Single { k: *k, coeff: None });
            }
            let first = params.first()?;
            if nonzero.contains(first) {
                return Some(Shape::Single { k: *k, coeff: None });
            }
            if params.iter().all(|p| p == first) && linear_single_param(first).is_some() {
                return Some(Shape::Single { k: *k, coeff: Some(first.clone()) });
            }
            None
        }
        [(k, low), (k1, high)] if *k1 == k + 1 => {
            let high: Vec<_> = by_u_power(high).into_iter().collect();
            let low: Vec<_> = by_u_power(low).into_iter().collect();
            let ([(hu, hc)], [(lu, lc)]) = (high.as_slice(), low.as_slice()) else {
                return None;
            };
            let r = hc.as_constant()?;
            if hu.exponent(&Atom::u()) != lu.exponent(&Atom::u()) + 1 {
                return None;
            }
            Some(Shape::Euler {
                k: *k,
                mu: lc.scale(&(-r.recip())),
            })
        }
        _ => None,
    }
}

/// Solves the constraints by case analysis on the parameters.
pub fn solve_constraints(constraints: &[DiffPoly]) -> Result<Vec<Branch>> {
    let mut out = Vec::new();
    solve(constraints, Vec::new(), 0, &mut out)?;
    Ok(out)
}

fn specialize(constraints: &[DiffPoly], values: &BTreeMap<Symbol, Rational>) -> Result<Vec<DiffPoly>> {
    let subst = Substitution::Values(values.clone());
    let mut out: Vec<DiffPoly> = Vec::new();
    for c in constraints {
        let c = substitute_dependent(c, &subst)?.primitive();
        if !c.is_zero() && !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

fn with(conditions: &[Condition], extra: Condition) -> Vec<Condition> {
    let mut v = conditions.to_vec();
    v.push(extra);
    v
}

fn solve(
    constraints: &[DiffPoly],
    conditions: Vec<Condition>,
    depth: usize,
    out: &mut Vec<Branch>,
) -> Result<()> {
    let values = fixed_values(&conditions);
    let subst = Substitution::Values(values.clone());
    let mut nonzero = Vec::new();
    for c in &conditions {
        if let Condition::NonZero(p) = c {
            let p = substitute_dependent(p, &subst)?.primitive();
            if p.is_zero() {
                out.push(Branch {
                    conditions,
                    outcome: Outcome::Inconsistent("contradictory parameter conditions".into()),
                });
                return Ok(());
            }
            nonzero.push(p);
        }
    }
    let active = specialize(constraints, &values)?;
    if active.is_empty() {
        out.push(Branch {
            conditions,
            outcome: Outcome::Family(PhiFamily::GenericUnknown { constraints: Vec::new() }),
        });
        return Ok(());
    }
    if depth > MAX_DEPTH {
        out.push(Branch { conditions, outcome: Outcome::Undetermined(active) });
        return Ok(());
    }
    let candidate = active
        .iter()
        .filter_map(|c| shape_of(c, &nonzero))
        .min_by_key(Shape::rank);
    match candidate {
        None => out.push(Branch { conditions, outcome: Outcome::Undetermined(active) }),
        Some(Shape::Single { k, coeff: None }) => {
            impose_vanishing(constraints, &active, k, conditions, depth, out)?
        }
        Some(Shape::Single { k, coeff: Some(p) }) => {
            solve(constraints, with(&conditions, Condition::Zero(p.clone())), depth + 1, out)?;
            impose_vanishing(
                constraints,
                &active,
                k,
                with(&conditions, Condition::NonZero(p)),
                depth,
                out,
            )?;
        }
        Some(Shape::Euler { k: 1, mu }) => {
            let m = &mu + &DiffPoly::one();
            match m.as_constant() {
                Some(c) if c.is_zero() => {
                    verify(constraints, &active, PhiFamily::Log, conditions, depth, out)?
                }
                Some(_) => verify(constraints, &active, PhiFamily::power(m), conditions, depth, out)?,
                None => {
                    verify(
                        constraints,
                        &active,
                        PhiFamily::power(m.clone()),
                        with(&conditions, Condition::NonZero(m.primitive())),
                        depth,
                        out,
                    )?;
                    if linear_single_param(&m).is_some() {
                        solve(constraints, with(&conditions, Condition::Zero(m.primitive())), depth + 1, out)?;
                    } else {
                        out.push(Branch {
                            conditions: with(&conditions, Condition::Zero(m.primitive())),
                            outcome: Outcome::Undetermined(active),
                        });
                    }
                }
            }
        }
        Some(Shape::Euler { .. }) => {
            out.push(Branch { conditions, outcome: Outcome::Undetermined(active) })
        }
    }
    Ok(())
}

/// `φ⁽ᵏ⁾ = 0` with `φ′ ≠ 0`.
fn impose_vanishing(
    constraints: &[DiffPoly],
    active: &[DiffPoly],
    k: u32,
    conditions: Vec<Condition>,
    depth: usize,
    out: &mut Vec<Branch>,
) -> Result<()> {
    match k {
        0 | 1 => out.push(Branch {
            conditions,
            outcome: Outcome::Inconsistent(format!("{} = 0 contradicts phi_u != 0", Atom::PhiDeriv(k))),
        }),
        2 => verify(constraints, active, PhiFamily::Affine, conditions, depth, out)?,
        _ => out.push(Branch { conditions, outcome: Outcome::Undetermined(active.to_vec()) }),
    }
    Ok(())
}

fn verify(
    constraints: &[DiffPoly],
    active: &[DiffPoly],
    family: PhiFamily,
    conditions: Vec<Condition>,
    depth: usize,
    out: &mut Vec<Branch>,
) -> Result<()> {
    match check_family(&family, active)? {
        FamilyCheck::Holds => out.push(Branch { conditions, outcome: Outcome::Family(family) }),
        FamilyCheck::Unverifiable => {
            out.push(Branch { conditions, outcome: Outcome::Undetermined(active.to_vec()) })
        }
        FamilyCheck::Requires(required) => {
            if required.iter().any(|r| r.as_constant().is_some()) {
                out.push(Branch {
                    conditions,
                    outcome: Outcome::Inconsistent(format!("phi = {family} forces b = 0")),
                });
            } else if let Some(r) = required.iter().find(|r| linear_single_param(r).is_some()) {
                solve(constraints, with(&conditions, Condition::Zero(r.clone())), depth + 1, out)?;
            } else {
                out.push(Branch { conditions, outcome: Outcome::Undetermined(required) });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> DiffPoly {
        parse(s).unwrap()
    }

    fn families(branches: &[Branch]) -> Vec<(String, String)> {
        branches
            .iter()
            .filter_map(|b| match &b.outcome {
                Outcome::Family(f) => Some((
                    b.conditions.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
                    f.to_string(),
                )),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn euler_constraint_with_symbolic_parameter() {
        let cs = [p("u*phi_uu - beta*phi_u + 2*phi_u"), p("u*phi_uuu + 3*phi_uu - beta*phi_uu")];
        let branches = solve_constraints(&cs).unwrap();
        assert_eq!(
            families(&branches),
            vec![
                ("beta != 1".to_string(), "a + b*u^(-1 + beta)".to_string()),
                ("beta = 1".to_string(), "a + b*ln(u)".to_string()),
            ]
        );
    }

    #[test]
    fn single_shape_splits_on_parameter() {
        let cs = [p("eps*phi_uu"), p("u*phi_uu - beta*phi_u + 2*phi_u")];
        let branches = solve_constraints(&cs).unwrap();
        let fams = families(&branches);
        assert!(fams.contains(&("eps = 0, beta != 1".into(), "a + b*u^(-1 + beta)".into())));
        assert!(fams.contains(&("eps != 0, beta = 2".into(), "a + b*u".into())));
    }

    #[test]
    fn vanishing_first_derivative_is_inconsistent() {
        let branches = solve_constraints(&[p("phi_u")]).unwrap();
        assert!(matches!(branches[0].outcome, Outcome::Inconsistent(_)));
    }

    #[test]
    fn unknown_shape_is_undetermined() {
        let branches = solve_constraints(&[p("phi_uu^2 + phi_u")]).unwrap();
        assert!(matches!(branches[0].outcome, Outcome::Undetermined(_)));
    }

    #[test]
    fn no_constraints_leaves_phi_free() {
        let branches = solve_constraints(&[]).unwrap();
        assert_eq!(families(&branches), vec![(String::new(), "arbitrary".to_string())]);
    }
}
