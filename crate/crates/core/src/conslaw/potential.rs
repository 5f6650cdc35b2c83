//! Recognizing total x-derivatives.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::reduce::ReductionTable;
use crate::algebra::{total_derivative, Atom, Dep, Dir, DiffPoly, JetIndex, Monomial, Rational};
use crate::error::Result;

/// The single jet of maximal x-order in `m`, if it occurs linearly and has `nx ≥ 1`.
fn integrable_factor(m: &Monomial) -> Option<(Dep, JetIndex)> {
    let jets: Vec<(Dep, JetIndex, i32)> = m
        .factors()
        .iter()
        .filter_map(|(a, e)| match a {
            Atom::Jet(dep, idx) => Some((*dep, *idx, *e)),
            _ => None,
        })
        .collect();
    let top = jets.iter().map(|(_, idx, _)| idx.nx).max()?;
    let mut at_top = jets.iter().filter(|(_, idx, _)| idx.nx == top);
    let (dep, idx, e) = at_top.next()?;
    (top >= 1 && *e == 1 && at_top.next().is_none()).then_some((*dep, *idx))
}

fn top_x_order(m: &Monomial) -> u32 {
    m.atoms()
        .filter_map(|a| match a {
            Atom::Jet(_, idx) => Some(idx.nx),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

/// Writes `p = D_x(A) + remainder` by repeated integration by parts.
///
/// Terms are taken highest x-order first. A term `c·M·w_J` whose top x-order
/// jet `w_J` is unique and linear is replaced by `D_x(c·M·w_{J-x})` minus the
/// correction `c·D_x(M)·w_{J-x}`; when the correction contains the term
/// itself the two are solved together. Terms that cannot be integrated, or
/// that reappear, go to the remainder.
pub fn extract_x_derivative(p: &DiffPoly) -> Result<(DiffPoly, DiffPoly)> {
    let mut work = p.clone();
    let mut potential = DiffPoly::zero();
    let mut remainder = DiffPoly::zero();
    let mut visited: BTreeSet<Monomial> = BTreeSet::new();
    while let Some((mono, coeff)) = work
        .iter()
        .max_by(|(a, _), (b, _)| top_x_order(a).cmp(&top_x_order(b)).then(a.cmp(b)))
        .map(|(m, c)| (m.clone(), c.clone()))
    {
        let term = DiffPoly::term(coeff.clone(), mono.clone());
        work -= &term;
        let factor = integrable_factor(&mono).filter(|_| !visited.contains(&mono));
        let Some((dep, idx)) = factor else {
            remainder += term;
            continue;
        };
        visited.insert(mono.clone());
        let jet = Atom::Jet(dep, idx);
        let lowered = Atom::Jet(dep, idx.lower(Dir::X).expect("nx >= 1"));
        let rest = mono.shift(&jet, -1);
        let b = DiffPoly::term(coeff.clone(), rest.mul(&Monomial::atom(lowered)));
        let correction = total_derivative(&b, Dir::X)? - &term;
        let k = correction.coefficient(&mono) / &coeff;
        let scale = Rational::one() + &k;
        if scale.is_zero() {
            remainder += term;
            continue;
        }
        let others = correction - &term.scale(&k);
        let inv = scale.recip();
        potential += b.scale(&inv);
        work -= others.scale(&inv);
    }
    Ok((potential, remainder))
}

/// Finds `A` with `reduce(p − D_x A)` free of every monomial selected by
/// `target`, searching over polynomial potentials built from the atoms of `p`.
///
/// This recognizes total x-derivatives that only appear as such on solutions
/// of the equation, for instance `t·D_t(G)` when `D_t G` is an x-derivative
/// modulo the equation.
pub fn x_potential_modulo(
    p: &DiffPoly,
    table: &mut ReductionTable,
    target: impl Fn(&Monomial) -> bool,
) -> Result<Option<DiffPoly>> {
    let goal: BTreeMap<Monomial, Rational> = p
        .iter()
        .filter(|(m, _)| target(m))
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect();
    if goal.is_empty() {
        return Ok(Some(DiffPoly::zero()));
    }
    let candidates = candidate_monomials(p, table, &target);
    let mut columns: Vec<BTreeMap<Monomial, Rational>> = Vec::with_capacity(candidates.len());
    for m in &candidates {
        let image = table.reduce(&total_derivative(&DiffPoly::term(Rational::one(), m.clone()), Dir::X)?)?;
        columns.push(
            image
                .iter()
                .filter(|(m, _)| target(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        );
    }
    let Some(solution) = solve_linear(&columns, &goal) else {
        return Ok(None);
    };
    Ok(Some(
        solution
            .into_iter()
            .map(|(i, c)| DiffPoly::term(c, candidates[i].clone()))
            .sum(),
    ))
}

/// Products of the coordinates of `p`: jets that the table does not rewrite,
/// with order and degree bounded by those in the targeted part of `p` (degree
/// plus one, since reduction can raise degree), times the explicit `t`, `x`
/// and parameter factors occurring there.
fn candidate_monomials(
    p: &DiffPoly,
    table: &ReductionTable,
    target: &impl Fn(&Monomial) -> bool,
) -> Vec<Monomial> {
    let mut max_order = 0;
    let mut max_nt = 0;
    let mut max_degree = 0;
    let mut deps = BTreeSet::new();
    let mut prefixes: BTreeSet<Monomial> = BTreeSet::new();
    for (m, _) in p.iter().filter(|(m, _)| target(m)) {
        let mut degree = 0;
        for (a, e) in m.factors() {
            if let Atom::Jet(dep, idx) = a {
                deps.insert(*dep);
                max_order = max_order.max(idx.order());
                max_nt = max_nt.max(idx.nt);
                degree += e;
            }
        }
        max_degree = max_degree.max(degree);
        let (prefix, _) = m.partition(|a| !matches!(a, Atom::Jet(..)));
        prefixes.insert(prefix);
    }
    // Divisors of the explicit prefixes, since D_x lowers x-powers and
    // reduction can raise parameter degrees.
    let mut factors: BTreeSet<Monomial> = BTreeSet::new();
    for prefix in &prefixes {
        let mut divisors = vec![Monomial::one()];
        for (a, e) in prefix.factors() {
            let extra = if matches!(a, Atom::Indep(Dir::X)) { 1 } else { 0 };
            divisors = divisors
                .iter()
                .flat_map(|d| (0..=e + extra).map(move |k| d.mul(&Monomial::power(a.clone(), k))))
                .collect();
        }
        factors.extend(divisors);
    }
    let mut jets = Vec::new();
    for dep in deps {
        for nt in 0..=max_nt {
            for nx in 0..=(max_order - nt.min(max_order)) {
                let atom = Atom::Jet(dep, JetIndex::new(nt, nx));
                if !table.is_reducible(&atom) {
                    jets.push(atom);
                }
            }
        }
    }
    let mut jet_monomials = vec![Monomial::one()];
    let mut layer = vec![(Monomial::one(), 0usize)];
    for _ in 0..=max_degree {
        let mut next = Vec::new();
        for (m, start) in &layer {
            for (i, j) in jets.iter().enumerate().skip(*start) {
                let nm = m.mul(&Monomial::atom(j.clone()));
                jet_monomials.push(nm.clone());
                next.push((nm, i));
            }
        }
        layer = next;
    }
    let mut out = BTreeSet::new();
    for f in &factors {
        for j in &jet_monomials {
            out.insert(f.mul(j));
        }
    }
    out.into_iter().collect()
}

/// Exact Gaussian elimination for `Σ c_i col_i = goal`; free unknowns are set to zero.
fn solve_linear(
    columns: &[BTreeMap<Monomial, Rational>],
    goal: &BTreeMap<Monomial, Rational>,
) -> Option<BTreeMap<usize, Rational>> {
    let n = columns.len();
    let mut row_of: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for key in columns.iter().flat_map(|c| c.keys()).chain(goal.keys()) {
        let next = row_of.len();
        row_of.entry(key).or_insert(next);
    }
    // Sparse rows: unknown index -> coefficient, with the right-hand side at index n.
    let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); row_of.len()];
    for (i, col) in columns.iter().enumerate() {
        for (m, c) in col {
            rows[row_of[m]].insert(i, c.clone());
        }
    }
    for (m, c) in goal {
        rows[row_of[m]].insert(n, c.clone());
    }
    let mut pivots: Vec<(usize, BTreeMap<usize, Rational>)> = Vec::new();
    for mut row in rows {
        for (col, prow) in &pivots {
            if let Some(f) = row.get(col).cloned() {
                eliminate(&mut row, prow, &f);
            }
        }
        match row.keys().next().copied() {
            None => {}
            Some(col) if col == n => return None,
            Some(col) => {
                let inv = row[&col].recip();
                for v in row.values_mut() {
                    *v *= &inv;
                }
                for (_, other) in pivots.iter_mut() {
                    if let Some(f) = other.get(&col).cloned() {
                        eliminate(other, &row, &f);
                    }
                }
                pivots.push((col, row));
            }
        }
    }
    let mut solution = BTreeMap::new();
    for (col, row) in pivots {
        if let Some(v) = row.get(&n) {
            solution.insert(col, v.clone());
        }
    }
    Some(solution)
}

/// `row -= f·pivot`
fn eliminate(row: &mut BTreeMap<usize, Rational>, pivot: &BTreeMap<usize, Rational>, f: &Rational) {
    for (k, v) in pivot {
        let slot = row.entry(*k).or_insert_with(Rational::zero);
        *slot -= f * v;
        if slot.is_zero() {
            row.remove(k);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::syntax::parse;

    fn p(s: &str) -> DiffPoly {
        parse(s).unwrap()
    }

    fn check(input: &str, a: &str, rem: &str) {
        let (pa, pr) = extract_x_derivative(&p(input)).unwrap();
        assert_eq!(pa, p(a), "potential of {input}");
        assert_eq!(pr, p(rem), "remainder of {input}");
        assert_eq!(total_derivative(&pa, Dir::X).unwrap() + pr, p(input));
    }

    #[test]
    fn simple_potentials() {
        check("u_x^2 + u*u_xx", "u*u_x", "0");
        check("u*u_x", "1/2*u^2", "0");
        check("u_xxx", "u_xx", "0");
        check("x*u_x", "x*u", "-u");
        check("u_x^2", "0", "u_x^2");
    }

    #[test]
    fn cycling_terms_are_left_alone() {
        check("u_tx*u_xx", "0", "u_tx*u_xx");
    }

    #[test]
    fn rosenau_hyman_time_terms() {
        // t·v·u_t reduced on solutions with v = a + b u²
        let input = "t*(a + b*u^2)*(u*u_xxx + 3*u_x*u_xx + u*u_x)";
        let (pa, pr) = extract_x_derivative(&p(input)).unwrap();
        assert!(pr.is_zero());
        assert_eq!(total_derivative(&pa, Dir::X).unwrap(), p(input));
    }

    #[test]
    fn potential_modulo_the_equation() {
        let eq = catalog::camassa_holm_with_kappa(0);
        let mut table = ReductionTable::for_equation(&eq).unwrap();
        // D_t(u² + u_x²) is an x-derivative only on solutions.
        let g = p("2*u*u_t + 2*u_x*u_tx");
        assert!(!extract_x_derivative(&g).unwrap().1.is_zero());
        let a = x_potential_modulo(&g, &mut table, |_| true).unwrap().expect("potential exists");
        let diff = g - total_derivative(&a, Dir::X).unwrap();
        assert!(table.reduce(&diff).unwrap().is_zero());
    }

    #[test]
    fn no_potential_for_non_exact_density() {
        let eq = catalog::camassa_holm_with_kappa(0);
        let mut table = ReductionTable::for_equation(&eq).unwrap();
        assert_eq!(x_potential_modulo(&p("u_x^2"), &mut table, |_| true).unwrap(), None);
    }
}
