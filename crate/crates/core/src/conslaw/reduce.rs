//! Rewriting modulo an equation solved for its leading derivative.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::algebra::{
    substitute_atoms, total_derivative, Atom, Dep, Dir, DiffPoly, JetIndex, DEFAULT_MAX_ORDER,
};
use crate::error::{Error, Result};
use crate::variational::EquationSpec;

#[derive(Debug, Clone)]
struct Rule {
    dep: Dep,
    lead: JetIndex,
    rhs: DiffPoly,
}

/// Base rules `w_J0 → rhs` plus their prolongations, generated on demand.
///
/// Every stored right-hand side is fully reduced, so one substitution pass
/// removes all reducible jets.
#[derive(Debug, Clone)]
pub struct ReductionTable {
    rules: Vec<Rule>,
    derived: HashMap<(Dep, JetIndex), DiffPoly>,
    in_progress: BTreeSet<(Dep, JetIndex)>,
    max_order: u32,
}

impl ReductionTable {
    /// Rules from `F = 0` solved for its leading derivative.
    pub fn for_equation(eq: &EquationSpec) -> Result<Self> {
        let (lead, rhs) = eq.solved()?;
        Ok(Self::from_rules(vec![(Dep::U, lead, rhs)]))
    }

    /// Adds the rule for `v` solved from `fstar` at the same multi-index as the
    /// `u` rule. Used for the system formed by `F = 0` and `F* = 0`.
    pub fn with_adjoint(mut self, fstar: &DiffPoly) -> Result<Self> {
        let lead = self.rules[0].lead;
        let rhs = solve_for(fstar, Dep::V, lead)?;
        // v-jets are eliminated first; their rules may introduce u-jets.
        self.rules.insert(0, Rule { dep: Dep::V, lead, rhs });
        self.derived.clear();
        Ok(self)
    }

    fn from_rules(rules: Vec<(Dep, JetIndex, DiffPoly)>) -> Self {
        ReductionTable {
            rules: rules
                .into_iter()
                .map(|(dep, lead, rhs)| Rule { dep, lead, rhs })
                .collect(),
            derived: HashMap::new(),
            in_progress: BTreeSet::new(),
            max_order: DEFAULT_MAX_ORDER,
        }
    }

    /// Leading jets of the base rules.
    pub fn leads(&self) -> Vec<(Dep, JetIndex)> {
        self.rules.iter().map(|r| (r.dep, r.lead)).collect()
    }

    /// True when `atom` is a derivative of some leading jet.
    pub fn is_reducible(&self, atom: &Atom) -> bool {
        matches!(atom, Atom::Jet(dep, idx)
            if self.rules.iter().any(|r| r.dep == *dep && idx.dominates(r.lead)))
    }

    fn rule_for(&mut self, dep: Dep, idx: JetIndex) -> Result<DiffPoly> {
        if let Some(r) = self.derived.get(&(dep, idx)) {
            return Ok(r.clone());
        }
        let base = self
            .rules
            .iter()
            .find(|r| r.dep == dep && idx.dominates(r.lead))
            .cloned()
            .expect("rule_for called on a reducible jet");
        if idx.order() > self.max_order {
            return Err(Error::NonTerminating(format!("{}", Atom::Jet(dep, idx))));
        }
        if !self.in_progress.insert((dep, idx)) {
            return Err(Error::NonTerminating(format!("{}", Atom::Jet(dep, idx))));
        }
        let result = if idx == base.lead {
            self.reduce(&base.rhs)
        } else {
            // Prefer prolonging in x; fall back to t.
            let (dir, prev) = [Dir::X, Dir::T]
                .into_iter()
                .find_map(|d| idx.lower(d).filter(|p| p.dominates(base.lead)).map(|p| (d, p)))
                .expect("a dominating index has a dominating predecessor");
            let prev_rhs = self.rule_for(dep, prev);
            prev_rhs.and_then(|r| total_derivative(&r, dir)).and_then(|d| self.reduce(&d))
        };
        self.in_progress.remove(&(dep, idx));
        let result = result?;
        self.derived.insert((dep, idx), result.clone());
        Ok(result)
    }

    /// Replaces every reducible jet until none remain.
    pub fn reduce(&mut self, p: &DiffPoly) -> Result<DiffPoly> {
        let mut current = p.clone();
        loop {
            let targets: Vec<(Dep, JetIndex)> = current
                .atoms()
                .into_iter()
                .filter(|a| self.is_reducible(a))
                .map(|a| match a {
                    Atom::Jet(dep, idx) => (dep, idx),
                    _ => unreachable!(),
                })
                .collect();
            if targets.is_empty() {
                return Ok(current);
            }
            let mut images: BTreeMap<(Dep, JetIndex), DiffPoly> = BTreeMap::new();
            for (dep, idx) in targets {
                images.insert((dep, idx), self.rule_for(dep, idx)?);
            }
            current = substitute_atoms(&current, |a| {
                Ok(match a {
                    Atom::Jet(dep, idx) => images.get(&(*dep, *idx)).cloned(),
                    _ => None,
                })
            })?;
        }
    }
}

/// Solves `p = 0` for `w_idx`; `p` must be linear in it with a nonzero constant coefficient.
fn solve_for(p: &DiffPoly, dep: Dep, idx: JetIndex) -> Result<DiffPoly> {
    let atom = Atom::Jet(dep, idx);
    let c = p
        .coeff_of_power(&atom, 1)
        .as_constant()
        .filter(|c| !num_traits::Zero::is_zero(c))
        .filter(|_| p.degree_in(&atom) == 1)
        .ok_or(Error::NoLeadingDerivative)?;
    Ok(p.coeff_of_power(&atom, 0).scale(&(-c.recip())))
}

/// Reduces `p` modulo `F = 0` and its differential consequences.
pub fn reduce_on_solutions(p: &DiffPoly, eq: &EquationSpec) -> Result<DiffPoly> {
    ReductionTable::for_equation(eq)?.reduce(p)
}
