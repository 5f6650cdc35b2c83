//! Candidate substitutions `v = φ(u)` and their verification.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{
    int, substitute_phi_derivatives, Atom, DiffPoly, Monomial, Rational, Symbol,
};
use crate::error::Result;
use crate::syntax::{format_rational, print};

/// Solution families of the determining constraints.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiFamily {
    /// `a + b·u`
    Affine,
    /// `a + b·u^m`, the exponent a rational or a polynomial in the parameters.
    Power { exponent: DiffPoly },
    /// `a + b·ln u`
    Log,
    /// No closed form; the constraints that φ must satisfy.
    GenericUnknown { constraints: Vec<DiffPoly> },
}

impl PhiFamily {
    /// Builds `a + b·u^m`, collapsing `m = 1` to the affine family.
    pub fn power(exponent: DiffPoly) -> PhiFamily {
        if exponent.as_constant().is_some_and(|m| m.is_one()) {
            PhiFamily::Affine
        } else {
            PhiFamily::Power { exponent }
        }
    }

    fn integer_exponent(&self) -> Option<i64> {
        match self {
            PhiFamily::Power { exponent } => exponent
                .as_constant()
                .filter(|m| m.is_integer())
                .and_then(|m| i64::try_from(m.to_integer()).ok()),
            _ => None,
        }
    }

    /// Closed form of `φ⁽ᵏ⁾` in the jet ring, when one exists.
    pub fn derivative(&self, k: u32) -> Option<DiffPoly> {
        let a = DiffPoly::aux("a");
        let b = DiffPoly::aux("b");
        match self {
            PhiFamily::Affine => Some(match k {
                0 => a + &b * &DiffPoly::u(),
                1 => b,
                _ => DiffPoly::zero(),
            }),
            PhiFamily::Power { .. } => {
                let m = self.integer_exponent()?;
                let falling: i64 = (0..i64::from(k)).map(|i| m - i).product();
                let term = DiffPoly::term(
                    int(falling),
                    Monomial::from_factors([(Atom::aux("b"), 1), (Atom::u(), (m - i64::from(k)) as i32)]),
                );
                Some(if k == 0 { a + term } else { term })
            }
            PhiFamily::Log => {
                if k == 0 {
                    return None;
                }
                let k = i64::from(k);
                let fact: i64 = (1..k).product();
                let sign = if k % 2 == 1 { 1 } else { -1 };
                Some(DiffPoly::term(
                    int(sign * fact),
                    Monomial::from_factors([(Atom::aux("b"), 1), (Atom::u(), -(k as i32))]),
                ))
            }
            PhiFamily::GenericUnknown { .. } => None,
        }
    }

    /// The expression for `v` usable in `Substitution::VTo`, when it lives in the ring.
    pub fn closure(&self) -> Option<DiffPoly> {
        match self {
            PhiFamily::Log | PhiFamily::GenericUnknown { .. } => None,
            _ => self.derivative(0),
        }
    }

    /// True when some choice of constants gives `φ(u) = u`.
    pub fn admits_identity(&self) -> bool {
        match self {
            PhiFamily::Affine => true,
            PhiFamily::GenericUnknown { constraints } => constraints.is_empty(),
            _ => false,
        }
    }
}

impl fmt::Display for PhiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiFamily::Affine => f.write_str("a + b*u"),
            PhiFamily::Power { exponent } => match exponent.as_constant() {
                Some(m) if m.is_integer() && !m.is_negative() => {
                    write!(f, "a + b*u^{}", format_rational(&m))
                }
                _ => write!(f, "a + b*u^({})", print(exponent)),
            },
            PhiFamily::Log => f.write_str("a + b*ln(u)"),
            PhiFamily::GenericUnknown { constraints } if constraints.is_empty() => {
                f.write_str("arbitrary")
            }
            PhiFamily::GenericUnknown { .. } => f.write_str("unknown"),
        }
    }
}

/// `Σ coeff·u^(s·m + k)` keyed by `(s, k)`, for a formal exponent `m`.
///
/// Grouping by the integer offset `k` is exact for symbolic `m`: distinct keys
/// are distinct functions of `u` for generic `m`, so a sum vanishes
/// identically as soon as every group coefficient vanishes.
#[derive(Debug, Clone, Default)]
struct ExpPoly(BTreeMap<(u32, i64), DiffPoly>);

impl ExpPoly {
    fn single(s: u32, k: i64, coeff: DiffPoly) -> Self {
        let mut out = ExpPoly::default();
        out.add(s, k, coeff);
        out
    }

    fn add(&mut self, s: u32, k: i64, coeff: DiffPoly) {
        let slot = self.0.entry((s, k)).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.0.remove(&(s, k));
        }
    }

    fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::default();
        for ((s1, k1), c1) in &self.0 {
            for ((s2, k2), c2) in &other.0 {
                out.add(s1 + s2, k1 + k2, c1 * c2);
            }
        }
        out
    }

    /// Expands `p` with `φ = a + b·u^m`.
    fn expand(p: &DiffPoly, m: &DiffPoly) -> ExpPoly {
        let mut out = ExpPoly::default();
        for (mono, coeff) in p.iter() {
            let mut acc = ExpPoly::single(0, 0, DiffPoly::one());
            let mut kept = Vec::new();
            for (atom, exp) in mono.factors() {
                match atom {
                    a if a.is_base_u() => acc = acc.mul(&ExpPoly::single(0, i64::from(*exp), DiffPoly::one())),
                    Atom::PhiDeriv(k) => {
                        let image = phi_derivative_image(*k, m);
                        for _ in 0..*exp {
                            acc = acc.mul(&image);
                        }
                    }
                    _ => kept.push((atom.clone(), *exp)),
                }
            }
            let rest = DiffPoly::term(coeff.clone(), Monomial::from_factors(kept));
            for ((s, k), c) in acc.0 {
                out.add(s, k, &c * &rest);
            }
        }
        out
    }
}

fn phi_derivative_image(k: u32, m: &DiffPoly) -> ExpPoly {
    let b = DiffPoly::aux("b");
    if k == 0 {
        let mut e = ExpPoly::single(0, 0, DiffPoly::aux("a"));
        e.add(1, 0, b);
        return e;
    }
    let falling = (0..k).fold(DiffPoly::one(), |acc, i| {
        &acc * &(m - &DiffPoly::integer(i64::from(i)))
    });
    ExpPoly::single(1, -i64::from(k), &b * &falling)
}

/// Splits a polynomial into coefficient polynomials over the parameters, one per
/// monomial in all remaining atoms. The input vanishes identically iff every
/// returned polynomial is zero.
fn parameter_coefficients(p: &DiffPoly) -> Vec<DiffPoly> {
    let mut groups: BTreeMap<Monomial, DiffPoly> = BTreeMap::new();
    for (mono, coeff) in p.iter() {
        let (params, rest) = mono.partition(|a| matches!(a, Atom::Param(_)));
        groups
            .entry(rest)
            .or_default()
            .add_term(coeff.clone(), params);
    }
    groups.into_values().filter(|c| !c.is_zero()).collect()
}

/// Outcome of substituting a family into expressions that must vanish.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum FamilyCheck {
    /// Every expression vanishes identically.
    Holds,
    /// Parameter polynomials that must vanish for the family to work.
    Requires(Vec<DiffPoly>),
    /// The family cannot be substituted in closed form.
    Unverifiable,
}

pub(crate) fn check_family(family: &PhiFamily, exprs: &[DiffPoly]) -> Result<FamilyCheck> {
    let mut required: Vec<DiffPoly> = Vec::new();
    for e in exprs {
        let coeffs = match family {
            PhiFamily::Power { exponent } if family.integer_exponent().is_none() => {
                ExpPoly::expand(e, exponent)
                    .0
                    .into_values()
                    .flat_map(|c| parameter_coefficients(&c))
                    .collect::<Vec<_>>()
            }
            PhiFamily::GenericUnknown { .. } => return Ok(FamilyCheck::Unverifiable),
            _ => match substitute_phi_derivatives(e, |k| family.derivative(k)) {
                Ok(r) => parameter_coefficients(&r),
                Err(_) => return Ok(FamilyCheck::Unverifiable),
            },
        };
        for c in coeffs {
            let c = c.primitive();
            if !required.contains(&c) {
                required.push(c);
            }
        }
    }
    Ok(if required.is_empty() {
        FamilyCheck::Holds
    } else {
        FamilyCheck::Requires(required)
    })
}

/// `c1·p + c0` with rational `c1 ≠ 0`: returns `(p, -c0/c1)`.
pub(crate) fn linear_single_param(p: &DiffPoly) -> Option<(Symbol, Rational)> {
    let mut param: Option<(Symbol, Rational)> = None;
    let mut constant = Rational::zero();
    for (mono, coeff) in p.iter() {
        match mono.factors() {
            [] => constant = coeff.clone(),
            [(Atom::Param(s), 1)] => {
                if param.is_some() {
                    return None;
                }
                param = Some((s.clone(), coeff.clone()));
            }
            _ => return None,
        }
    }
    param.map(|(s, c1)| (s, -constant / c1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> DiffPoly {
        parse(s).unwrap()
    }

    #[test]
    fn closed_form_derivatives() {
        let f = PhiFamily::power(DiffPoly::integer(2));
        assert_eq!(f.derivative(0), Some(p("a + b*u^2")));
        assert_eq!(f.derivative(1), Some(p("2*b*u")));
        assert_eq!(f.derivative(3), Some(DiffPoly::zero()));
        assert_eq!(PhiFamily::Log.derivative(3), Some(p("2*b*u^-3")));
        assert_eq!(PhiFamily::Log.derivative(0), None);
        assert_eq!(PhiFamily::power(DiffPoly::one()), PhiFamily::Affine);
    }

    #[test]
    fn symbolic_exponent_cancels_in_cubic_constraint() {
        // u φ‴ + (3 − β) φ″ with φ = a + b u^(β−1)
        let fam = PhiFamily::power(p("beta - 1"));
        let check = check_family(&fam, &[p("u*phi_uuu + 3*phi_uu - beta*phi_uu")]).unwrap();
        assert_eq!(check, FamilyCheck::Holds);
        // Without the cancellation the group coefficient survives.
        let check = check_family(&fam, &[p("u*phi_uuu")]).unwrap();
        assert!(matches!(check, FamilyCheck::Requires(_)));
    }

    #[test]
    fn log_family_solves_euler_constraint() {
        let check = check_family(&PhiFamily::Log, &[p("u*phi_uu + phi_u")]).unwrap();
        assert_eq!(check, FamilyCheck::Holds);
    }

    #[test]
    fn affine_family_exposes_parameter_condition() {
        let check = check_family(&PhiFamily::Affine, &[p("u*phi_uu - beta*phi_u + 2*phi_u")]).unwrap();
        assert_eq!(check, FamilyCheck::Requires(vec![p("beta - 2")]));
    }

    #[test]
    fn linear_parameter_detection() {
        assert_eq!(
            linear_single_param(&p("2*beta - 4")),
            Some((Symbol::new("beta"), int(2)))
        );
        assert_eq!(linear_single_param(&p("eps")), Some((Symbol::new("eps"), int(0))));
        assert_eq!(linear_single_param(&p("eps*beta")), None);
        assert_eq!(linear_single_param(&p("3")), None);
    }

    #[test]
    fn display() {
        assert_eq!(PhiFamily::power(p("beta - 1")).to_string(), "a + b*u^(-1 + beta)");
        assert_eq!(PhiFamily::power(DiffPoly::integer(2)).to_string(), "a + b*u^2");
    }
}
