use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::atom::{Atom, Dep};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Product of atom powers, sorted by atom with no zero exponents.
///
/// Only the base atom `u` may carry a negative exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Atom, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(atom: Atom) -> Self {
        Monomial(vec![(atom, 1)])
    }

    pub fn power(atom: Atom, exp: i32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(atom, exp)])
        }
    }

    /// Builds a monomial from arbitrary factors, merging repeats.
    pub fn from_factors<I: IntoIterator<Item = (Atom, i32)>>(factors: I) -> Self {
        let mut map: BTreeMap<Atom, i32> = BTreeMap::new();
        for (a, e) in factors {
            *map.entry(a).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|(_, e)| *e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.0
    }

    pub fn exponent(&self, atom: &Atom) -> i32 {
        self.0
            .binary_search_by(|(a, _)| a.cmp(atom))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.exponent(atom) != 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Returns the monomial with the exponent of `atom` changed by `delta`.
    pub fn shift(&self, atom: &Atom, delta: i32) -> Monomial {
        self.mul(&Monomial::power(atom.clone(), delta))
    }

    /// Removes `atom` entirely, returning its exponent and the rest.
    pub fn split_off(&self, atom: &Atom) -> (i32, Monomial) {
        let e = self.exponent(atom);
        let rest = Monomial(self.0.iter().filter(|(a, _)| a != atom).cloned().collect());
        (e, rest)
    }

    /// Partitions into (factors satisfying `pred`, remaining factors).
    pub fn partition(&self, pred: impl Fn(&Atom) -> bool) -> (Monomial, Monomial) {
        let (yes, no): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(a, _)| pred(a));
        (Monomial(yes), Monomial(no))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter().map(|(a, _)| a)
    }

    fn is_jet_like(atom: &Atom) -> bool {
        matches!(atom, Atom::Jet(..) | Atom::PhiDeriv(_))
    }

    fn jet_degree(&self) -> i64 {
        self.0
            .iter()
            .filter(|(a, _)| Self::is_jet_like(a))
            .map(|(_, e)| i64::from(*e))
            .sum()
    }

    fn weight(&self) -> i64 {
        self.0
            .iter()
            .map(|(a, e)| i64::from(a.weight()) * i64::from(*e))
            .sum()
    }

    fn coeff_degree(&self) -> i64 {
        self.0
            .iter()
            .filter(|(a, _)| !Self::is_jet_like(a))
            .map(|(_, e)| i64::from(*e))
            .sum()
    }

    /// Reverse lexicographic comparison restricted to atoms accepted by `pred`:
    /// scanning from the largest atom down, the smaller exponent sorts first.
    fn revlex(&self, other: &Monomial, pred: fn(&Atom) -> bool) -> Ordering {
        let mut a = self.0.iter().rev().filter(|(x, _)| pred(x)).peekable();
        let mut b = other.0.iter().rev().filter(|(x, _)| pred(x)).peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some((_, ea)), None) => return ea.cmp(&0),
                (None, Some((_, eb))) => return 0.cmp(eb),
                (Some((xa, ea)), Some((xb, eb))) => match xa.cmp(xb) {
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        a.next();
                        b.next();
                    }
                    Ordering::Greater => return ea.cmp(&0),
                    Ordering::Less => return 0.cmp(eb),
                },
            }
        }
    }
}

/// Graded order: jet degree, then differential weight, then reverse
/// lexicographic on the jet part, then the same on the coefficient atoms.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.jet_degree()
            .cmp(&other.jet_degree())
            .then_with(|| self.weight().cmp(&other.weight()))
            .then_with(|| self.revlex(other, Monomial::is_jet_like))
            .then_with(|| self.coeff_degree().cmp(&other.coeff_degree()))
            .then_with(|| self.revlex(other, |a| !Monomial::is_jet_like(a)))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A single coefficient-monomial pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rational,
    pub monomial: Monomial,
}

/// Canonical differential polynomial with exact rational coefficients.
///
/// Like terms are always merged and zero coefficients dropped, so structural
/// equality coincides with mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        DiffPoly::term(c, Monomial::one())
    }

    pub fn integer(n: i64) -> Self {
        DiffPoly::constant(int(n))
    }

    pub fn term(coeff: Rational, monomial: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(monomial, coeff);
        }
        DiffPoly { terms }
    }

    pub fn atom(atom: Atom) -> Self {
        DiffPoly::term(Rational::one(), Monomial::atom(atom))
    }

    pub fn jet(dep: Dep, nt: u32, nx: u32) -> Self {
        DiffPoly::atom(Atom::jet(dep, nt, nx))
    }

    pub fn u() -> Self {
        DiffPoly::atom(Atom::u())
    }

    pub fn v() -> Self {
        DiffPoly::atom(Atom::v())
    }

    pub fn param(name: &str) -> Self {
        DiffPoly::atom(Atom::param(name))
    }

    pub fn aux(name: &str) -> Self {
        DiffPoly::atom(Atom::aux(name))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn terms(&self) -> Vec<Term> {
        self.terms
            .iter()
            .map(|(m, c)| Term {
                coeff: c.clone(),
                monomial: m.clone(),
            })
            .collect()
    }

    pub fn coefficient(&self, monomial: &Monomial) -> Rational {
        self.terms.get(monomial).cloned().unwrap_or_else(Rational::zero)
    }

    /// The rational value if this polynomial is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.is_one())
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn add_term(&mut self, coeff: Rational, monomial: Monomial) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Rational, Monomial)>>(iter: I) -> Self {
        let mut p = DiffPoly::zero();
        for (c, m) in iter {
            p.add_term(c, m);
        }
        p
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, c: &Rational, mono: &Monomial) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly::from_terms(self.terms.iter().map(|(m, k)| (k * c, m.mul(mono))))
    }

    pub fn pow(&self, n: u32) -> DiffPoly {
        let mut result = DiffPoly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Every atom occurring in the polynomial, in atom order.
    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.atoms().cloned())
            .collect()
    }

    pub fn contains_atom(&self, pred: impl Fn(&Atom) -> bool) -> bool {
        self.terms.keys().any(|m| m.atoms().any(&pred))
    }

    /// Maximal order of jets of `dep`.
    pub fn max_order(&self, dep: Dep) -> u32 {
        self.atoms()
            .iter()
            .filter_map(|a| match a {
                Atom::Jet(d, idx) if *d == dep => Some(idx.order()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Degree of the polynomial in `atom` (maximum exponent, 0 if absent).
    pub fn degree_in(&self, atom: &Atom) -> i32 {
        self.terms
            .keys()
            .map(|m| m.exponent(atom))
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of `atom^k` viewing the polynomial as univariate in `atom`.
    pub fn coeff_of_power(&self, atom: &Atom, k: i32) -> DiffPoly {
        DiffPoly::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let (e, rest) = m.split_off(atom);
            (e == k).then(|| (c.clone(), rest))
        }))
    }

    /// Divides by the positive rational content and fixes the sign so the
    /// last term in canonical order is positive.
    pub fn primitive(&self) -> DiffPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num_integer::Integer::gcd(&num, c.numer());
            den = num_integer::Integer::lcm(&den, c.denom());
        }
        let mut content = BigRational::new(num, den);
        if self.terms.values().next_back().is_some_and(|c| c.is_negative()) {
            content = -content;
        }
        self.scale(&content.recip())
    }

    /// Applies a per-monomial map that produces polynomials, summing the results.
    pub fn map_monomials<F>(&self, mut f: F) -> DiffPoly
    where
        F: FnMut(&Monomial) -> DiffPoly,
    {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let image = f(m);
            for (mm, cc) in image.terms {
                out.add_term(cc * c, mm);
            }
        }
        out
    }

    pub fn try_map_monomials<F, E>(&self, mut f: F) -> Result<DiffPoly, E>
    where
        F: FnMut(&Monomial) -> Result<DiffPoly, E>,
    {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let image = f(m)?;
            for (mm, cc) in image.terms {
                out.add_term(cc * c, mm);
            }
        }
        Ok(out)
    }
}

impl From<Atom> for DiffPoly {
    fn from(a: Atom) -> Self {
        DiffPoly::atom(a)
    }
}

impl From<i64> for DiffPoly {
    fn from(n: i64) -> Self {
        DiffPoly::integer(n)
    }
}

impl From<Rational> for DiffPoly {
    fn from(c: Rational) -> Self {
        DiffPoly::constant(c)
    }
}

impl AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(c.clone(), m.clone());
        }
    }
}

impl AddAssign for DiffPoly {
    fn add_assign(&mut self, rhs: DiffPoly) {
        if self.terms.len() < rhs.terms.len() {
            let lhs = std::mem::replace(self, rhs);
            *self += &lhs;
            return;
        }
        for (m, c) in rhs.terms {
            self.add_term(c, m);
        }
    }
}

impl SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(-c, m.clone());
        }
    }
}

impl SubAssign for DiffPoly {
    fn sub_assign(&mut self, rhs: DiffPoly) {
        for (m, c) in rhs.terms {
            self.add_term(-c, m);
        }
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(mut self) -> DiffPoly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -self.clone()
    }
}

impl Mul<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ca * cb, ma.mul(mb));
            }
        }
        out
    }
}

macro_rules! forward_binop {
    ($Trait:ident, $method:ident, $assign:ident) => {
        impl $Trait<DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $method(mut self, rhs: DiffPoly) -> DiffPoly {
                self.$assign(rhs);
                self
            }
        }
        impl $Trait<&DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $method(mut self, rhs: &DiffPoly) -> DiffPoly {
                self.$assign(rhs);
                self
            }
        }
        impl $Trait<DiffPoly> for &DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: DiffPoly) -> DiffPoly {
                let mut out = self.clone();
                out.$assign(rhs);
                out
            }
        }
        impl $Trait<&DiffPoly> for &DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: &DiffPoly) -> DiffPoly {
                let mut out = self.clone();
                out.$assign(rhs);
                out
            }
        }
    };
}

forward_binop!(Add, add, add_assign);
forward_binop!(Sub, sub, sub_assign);

impl Mul<DiffPoly> for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        &self * &rhs
    }
}

impl Mul<&DiffPoly> for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        &self * rhs
    }
}

impl Mul<DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        self * &rhs
    }
}

impl std::iter::Sum for DiffPoly {
    fn sum<I: Iterator<Item = DiffPoly>>(iter: I) -> DiffPoly {
        iter.fold(DiffPoly::zero(), |acc, p| acc + p)
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print(self))
    }
}
