//! Randomized algebraic identities, each checked on a seeded stream of instances.
//!
//! Every check returns the first counterexample it finds, rendered as text.

use crate::algebra::{
    collect_monomials, is_positive_order_jet, jet_partial, ordered_jet_partial, reassemble,
    substitute_dependent, total_derivative, variational_derivative, Atom, Dep, Dir, DiffPoly,
    JetIndex, Monomial, Substitution,
};
use crate::conslaw::fundamental_identity_check;
use crate::random::{Generator, PolyShape};
use crate::syntax::{parse, print};

pub type Outcome = Result<(), String>;

fn rich_shape() -> PolyShape {
    PolyShape {
        max_terms: 4,
        max_degree: 3,
        max_order: 2,
        deps: vec![Dep::U, Dep::V],
        with_phi: true,
        with_indep: true,
        params: vec!["eps", "beta"],
    }
}

fn d(p: &DiffPoly, dir: Dir) -> Result<DiffPoly, String> {
    total_derivative(p, dir).map_err(|e| e.to_string())
}

/// `δ/δu (D_t A + D_x B) = 0` for `A`, `B` of order ≤ 2.
pub fn euler_annihilates_divergences(seed: u64, count: usize) -> Outcome {
    let mut g = Generator::new(seed);
    let shape = PolyShape {
        with_indep: true,
        params: vec!["alpha"],
        ..PolyShape::default()
    };
    for _ in 0..count {
        let a = g.poly(&shape);
        let b = g.poly(&shape);
        let div = d(&a, Dir::T)? + d(&b, Dir::X)?;
        let e = variational_derivative(&div, Dep::U).map_err(|e| e.to_string())?;
        if !e.is_zero() {
            return Err(format!("A = {a}, B = {b}: E(div) = {e}"));
        }
    }
    Ok(())
}

/// The conserved-vector identity holds for arbitrary `L` and point symmetries.
pub fn fundamental_identity(seed: u64, count: usize) -> Outcome {
    let mut g = Generator::new(seed);
    for _ in 0..count {
        let l = g.lagrangian();
        let sym = g.symmetry();
        let r = fundamental_identity_check(&l, &sym).map_err(|e| e.to_string())?;
        if !r.is_zero() {
            return Err(format!("L = {l}, X = {sym}: residual {r}"));
        }
    }
    Ok(())
}

/// `D_t D_x p = D_x D_t p`.
pub fn total_derivatives_commute(seed: u64, count: usize) -> Outcome {
    let mut g = Generator::new(seed);
    let shape = rich_shape();
    for _ in 0..count {
        let p = g.poly(&shape);
        let tx = d(&d(&p, Dir::X)?, Dir::T)?;
        let xt = d(&d(&p, Dir::T)?, Dir::X)?;
        if tx != xt {
            return Err(format!("p = {p}"));
        }
    }
    Ok(())
}

/// `D(pq) = D(p)q + pD(q)` in both directions.
pub fn leibniz_rule(seed: u64, count: usize) -> Outcome {
    let mut g = Generator::new(seed);
    let shape = rich_shape();
    for _ in 0..count {
        let p = g.poly(&shape);
        let q = g.poly(&shape);
        for dir in Dir::ALL {
            let lhs = d(&(&p * &q), dir)?;
            let rhs = &d(&p, dir)? * &q + &p * &d(&q, dir)?;
            if lhs != rhs {
                return Err(format!("p = {p}, q = {q}, dir = {}", dir.letter()));
            }
        }
    }
    Ok(())
}

/// Substituting for `v` commutes with total derivatives, for the φ-closure
/// and for explicit expressions in the `u`-jets.
pub fn substitution_commutes(seed: u64, count: usize) -> Outcome {
    let mut g = Generator::new(seed);
    let shape = PolyShape {
        deps: vec![Dep::U, Dep::V],
        with_indep: true,
        params: vec!["kappa"],
        ..PolyShape::default()
    };
    let replacement_shape = PolyShape {
        max_terms: 3,
        max_degree: 2,
        max_order: 1,
        ..PolyShape::default()
    };
    for i in 0..count {
        let p = g.poly(&shape);
        let subst = if i % 2 == 0 {
            Substitution::VToPhi
        } else {
            Substitution::VTo(g.poly(&replacement_shape))
        };
        for dir in Dir::ALL {
            let s = |e: &DiffPoly| substitute_dependent(e, &subst).map_err(|e| e.to_string());
            let lhs = s(&d(&p, dir)?)?;
            let rhs = d(&s(&p)?, dir)?;
            if lhs != rhs {
                return Err(format!("p = {p}, substitution {subst:?}, dir = {}", dir.letter()));
            }
        }
    }
    Ok(())
}

/// `parse(print(p)) = p`, including rational coefficients and negative powers of `u`.
pub fn parse_print_round_trip(seed: u64, count: usize) -> Outcome {
    let mut g = Generator::new(seed);
    let mut shape = rich_shape();
    shape.params = vec!["eps", "alpha", "beta", "kappa"];
    for i in 0..count {
        let mut p = g.poly(&shape);
        if i % 3 == 0 {
            p = p.mul_monomial(&crate::algebra::int(1), &Monomial::power(Atom::u(), -2));
        }
        if i % 5 == 0 {
            p = &p * &DiffPoly::aux("a");
        }
        let text = print(&p);
        match parse(&text) {
            Ok(q) if q == p => {}
            Ok(q) => return Err(format!("{text} reparsed as {q}")),
            Err(e) => return Err(format!("{text}: {e}")),
        }
    }
    Ok(())
}

/// Summing ordered partials over all orderings recovers the plain partial.
pub fn ordered_partials_partition(seed: u64, count: usize) -> Outcome {
    let mut g = Generator::new(seed);
    let shape = PolyShape {
        max_order: 3,
        ..PolyShape::default()
    };
    let orderings: [&[Dir]; 4] = [
        &[Dir::T, Dir::X, Dir::X],
        &[Dir::X, Dir::T, Dir::X],
        &[Dir::X, Dir::X, Dir::T],
        &[Dir::T, Dir::X],
    ];
    for _ in 0..count {
        let p = g.poly(&shape);
        let sum: DiffPoly = orderings[..3]
            .iter()
            .map(|o| ordered_jet_partial(&p, Dep::U, o))
            .sum();
        if sum != jet_partial(&p, Dep::U, JetIndex::new(1, 2)) {
            return Err(format!("p = {p} at u_txx"));
        }
        let pair = ordered_jet_partial(&p, Dep::U, orderings[3])
            + ordered_jet_partial(&p, Dep::U, &[Dir::X, Dir::T]);
        if pair != jet_partial(&p, Dep::U, JetIndex::new(1, 1)) {
            return Err(format!("p = {p} at u_tx"));
        }
    }
    Ok(())
}

/// Collecting by jet monomials and reassembling is the identity.
pub fn collect_reassembles(seed: u64, count: usize) -> Outcome {
    let mut g = Generator::new(seed);
    let shape = rich_shape();
    for _ in 0..count {
        let p = g.poly(&shape);
        if reassemble(&collect_monomials(&p, is_positive_order_jet)) != p {
            return Err(format!("p = {p}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs() {
        euler_annihilates_divergences(1, 10).unwrap();
        fundamental_identity(2, 10).unwrap();
        total_derivatives_commute(3, 10).unwrap();
        leibniz_rule(4, 10).unwrap();
        substitution_commutes(5, 10).unwrap();
        parse_print_round_trip(6, 10).unwrap();
        ordered_partials_partition(7, 10).unwrap();
        collect_reassembles(8, 10).unwrap();
    }
}
