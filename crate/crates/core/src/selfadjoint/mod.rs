//! Quasi self-adjointness: substitute `v = φ(u)` into the adjoint, match it
//! against `λF` identically in the jets, and solve for φ.

mod family;
mod solve;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::algebra::{
    collect_monomials, is_positive_order_jet, substitute_dependent, Atom, Dep, DiffPoly, Monomial,
    Substitution,
};
use crate::error::{Error, Result};
use crate::variational::{adjoint, EquationSpec};

pub use family::PhiFamily;
pub use solve::{solve_constraints, Branch, Condition, Outcome};

/// `F*` with every `v`-jet replaced by its φ-closure.
pub fn substitute_phi(fstar: &DiffPoly) -> Result<DiffPoly> {
    substitute_dependent(fstar, &Substitution::VToPhi)
}

/// The identity `F*|_{v=φ} = λF` split into coefficient conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    /// Left side grouped by monomials in the positive-order jets.
    pub identity: BTreeMap<Monomial, DiffPoly>,
    /// λ as determined by the `u_t` coefficient.
    pub multiplier: DiffPoly,
    /// Coefficients of `F*|_{v=φ} − λF`, made primitive and deduplicated.
    pub constraints: Vec<DiffPoly>,
}

fn u_t_monomial() -> Monomial {
    Monomial::atom(Atom::jet(Dep::U, 1, 0))
}

/// `λ = (u_t coefficient of E) / (u_t coefficient of F)`.
fn multiplier_from_u_t(e: &BTreeMap<Monomial, DiffPoly>, eq: &EquationSpec) -> Result<DiffPoly> {
    let f = collect_monomials(eq.lhs(), is_positive_order_jet);
    let cf = f
        .get(&u_t_monomial())
        .and_then(DiffPoly::as_constant)
        .filter(|c| !c.is_zero())
        .ok_or_else(|| {
            Error::InconsistentMultiplier("the coefficient of u_t in F must be a nonzero constant".into())
        })?;
    Ok(e
        .get(&u_t_monomial())
        .cloned()
        .unwrap_or_default()
        .scale(&cf.recip()))
}

pub fn extract_constraints(fstar_phi: &DiffPoly, eq: &EquationSpec) -> Result<ConstraintSystem> {
    let identity = collect_monomials(fstar_phi, is_positive_order_jet);
    let multiplier = multiplier_from_u_t(&identity, eq)?;
    let residual = fstar_phi - &(&multiplier * eq.lhs());
    let mut constraints: Vec<DiffPoly> = Vec::new();
    for c in collect_monomials(&residual, is_positive_order_jet).into_values() {
        let c = c.primitive();
        if !constraints.contains(&c) {
            constraints.push(c);
        }
    }
    Ok(ConstraintSystem {
        identity,
        multiplier,
        constraints,
    })
}

/// Checks `F*|_{v=u} = λF` with λ read off the `u_t` coefficient.
pub fn is_self_adjoint(eq: &EquationSpec) -> Result<bool> {
    let e = substitute_dependent(&adjoint(eq)?, &Substitution::VTo(DiffPoly::u()))?;
    let collected = collect_monomials(&e, is_positive_order_jet);
    let lambda = multiplier_from_u_t(&collected, eq)?;
    Ok((&e - &(&lambda * eq.lhs())).is_zero())
}

/// Checks `F*|_{v=φ} + φ′F = 0` for a family under the branch's parameter values.
pub fn family_satisfies_identity(eq: &EquationSpec, branch: &Branch) -> Result<bool> {
    let Outcome::Family(family) = &branch.outcome else {
        return Ok(false);
    };
    let lhs = substitute_dependent(eq.lhs(), &Substitution::Values(branch.values()))?;
    let eq = EquationSpec::new(lhs)?;
    let g = substitute_phi(&adjoint(&eq)?)? + &DiffPoly::atom(Atom::PhiDeriv(1)) * eq.lhs();
    Ok(family::check_family(family, &[g])? == family::FamilyCheck::Holds)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    SelfAdjoint,
    QuasiSelfAdjoint(Vec<(Vec<Condition>, PhiFamily)>),
    NotQuasiSelfAdjoint,
    Undetermined(Vec<DiffPoly>),
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::SelfAdjoint => "SelfAdjoint",
            Classification::QuasiSelfAdjoint(_) => "QuasiSelfAdjoint",
            Classification::NotQuasiSelfAdjoint => "NotQuasiSelfAdjoint",
            Classification::Undetermined(_) => "Undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub adjoint: DiffPoly,
    pub system: ConstraintSystem,
    pub branches: Vec<Branch>,
    pub classification: Classification,
}

pub fn classify_equation(eq: &EquationSpec) -> Result<ClassificationReport> {
    let fstar = adjoint(eq)?;
    let system = extract_constraints(&substitute_phi(&fstar)?, eq)?;
    let branches = solve_constraints(&system.constraints)?;
    let classification = if is_self_adjoint(eq)? {
        Classification::SelfAdjoint
    } else {
        let families: Vec<_> = branches
            .iter()
            .filter_map(|b| match &b.outcome {
                Outcome::Family(f) => Some((b.conditions.clone(), f.clone())),
                _ => None,
            })
            .collect();
        let open: Vec<DiffPoly> = branches
            .iter()
            .filter_map(|b| match &b.outcome {
                Outcome::Undetermined(r) => Some(r.clone()),
                _ => None,
            })
            .flatten()
            .collect();
        if !families.is_empty() {
            Classification::QuasiSelfAdjoint(families)
        } else if open.is_empty() {
            Classification::NotQuasiSelfAdjoint
        } else {
            Classification::Undetermined(open)
        }
    };
    Ok(ClassificationReport {
        adjoint: fstar,
        system,
        branches,
        classification,
    })
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let conds: Vec<String> = self.conditions.iter().map(|c| c.to_string()).collect();
        if !conds.is_empty() {
            write!(f, "[{}] ", conds.join(", "))?;
        }
        match &self.outcome {
            Outcome::Family(fam) => write!(f, "phi = {fam}"),
            Outcome::Inconsistent(why) => write!(f, "inconsistent: {why}"),
            Outcome::Undetermined(rest) => {
                let rest: Vec<String> = rest.iter().map(|r| format!("{r} = 0")).collect();
                write!(f, "unsolved: {}", rest.join("; "))
            }
        }
    }
}
