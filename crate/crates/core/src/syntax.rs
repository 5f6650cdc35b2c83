//! Text form of differential polynomials.
//!
//! Grammar:
//!
//! ```text
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' ['-'] integer)?
//! base     := rational | identifier | '(' expr ')'
//! rational := integer ('/' positive-integer)?
//! ```
//!
//! Identifiers are `u`, `v`, `t`, `x`, jets `u_S` / `v_S` where `S` is a word over
//! `{t, x}` (order-insensitive, so `u_xt` is `u_tx`), `phi`, `phi_u`, `phi_uu`, ...
//! and the declared parameter and constant names.

use std::collections::BTreeSet;
use std::fmt::Write;

use num_rational::BigRational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Atom, Dep, Dir, DiffPoly, JetIndex, Monomial, Rational, DEFAULT_MAX_ORDER};
use crate::error::{Error, Result};

/// Names the parser recognizes besides the fixed jet and variable identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub params: BTreeSet<String>,
    pub constants: BTreeSet<String>,
    pub max_order: u32,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary {
            params: ["eps", "alpha", "beta", "kappa"].map(String::from).into(),
            constants: ["a", "b"].map(String::from).into(),
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

impl Vocabulary {
    pub fn with_param(mut self, name: &str) -> Self {
        self.params.insert(name.to_string());
        self
    }

    pub fn with_constant(mut self, name: &str) -> Self {
        self.constants.insert(name.to_string());
        self
    }

    fn resolve(&self, ident: &str) -> Result<Atom> {
        if self.params.contains(ident) {
            return Ok(Atom::param(ident));
        }
        if self.constants.contains(ident) {
            return Ok(Atom::aux(ident));
        }
        match ident {
            "u" => return Ok(Atom::u()),
            "v" => return Ok(Atom::v()),
            "t" => return Ok(Atom::Indep(Dir::T)),
            "x" => return Ok(Atom::Indep(Dir::X)),
            "phi" => return Ok(Atom::PhiDeriv(0)),
            _ => {}
        }
        if let Some(rest) = ident.strip_prefix("phi_") {
            if !rest.is_empty() && rest.chars().all(|c| c == 'u') {
                return Ok(Atom::PhiDeriv(rest.len() as u32));
            }
        }
        let dep = match ident.as_bytes() {
            [b'u', b'_', ..] => Dep::U,
            [b'v', b'_', ..] => Dep::V,
            _ => return Err(Error::UnknownIdentifier(ident.to_string())),
        };
        let suffix = &ident[2..];
        if suffix.is_empty() || !suffix.chars().all(|c| c == 't' || c == 'x') {
            return Err(Error::UnknownIdentifier(ident.to_string()));
        }
        let nt = suffix.chars().filter(|&c| c == 't').count() as u32;
        let idx = JetIndex::new(nt, suffix.len() as u32 - nt);
        if idx.order() > self.max_order {
            return Err(Error::JetOrderExceeded {
                order: idx.order(),
                max: self.max_order,
            });
        }
        Ok(Atom::Jet(dep, idx))
    }
}

/// Parses with the default vocabulary.
pub fn parse(text: &str) -> Result<DiffPoly> {
    parse_with(text, &Vocabulary::default())
}

pub fn parse_with(text: &str, vocab: &Vocabulary) -> Result<DiffPoly> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        vocab,
    };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(p)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vocab: &'a Vocabulary,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<DiffPoly> {
        let negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DiffPoly> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<DiffPoly> {
        let start = self.pos;
        let base = self.base()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = self.eat(b'-');
        self.skip_ws();
        let exp_pos = self.pos;
        let n = self.integer()?;
        let n: u32 = u32::try_from(&n)
            .map_err(|_| Error::Parse { pos: exp_pos, msg: "exponent too large".into() })?;
        if !negative {
            return Ok(base.pow(n));
        }
        // Negative powers exist only for monomials in u.
        let terms = base.terms();
        match terms.as_slice() {
            [t] if t.monomial.factors().iter().all(|(a, _)| a.is_base_u()) => {
                let exp = -(n as i32);
                let m = Monomial::from_factors(
                    t.monomial.factors().iter().map(|(a, e)| (a.clone(), e * exp)),
                );
                let c = num_traits::Pow::pow(t.coeff.recip(), n);
                Ok(DiffPoly::term(c, m))
            }
            _ => Err(Error::Parse {
                pos: start,
                msg: "negative exponents are only allowed on u".into(),
            }),
        }
    }

    fn base(&mut self) -> Result<DiffPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                if self.eat(b'/') {
                    self.skip_ws();
                    let pos = self.pos;
                    let den = self.integer()?;
                    if den.is_zero() {
                        return Err(Error::Parse { pos, msg: "zero denominator".into() });
                    }
                    Ok(DiffPoly::constant(BigRational::new(num, den)))
                } else {
                    Ok(DiffPoly::constant(BigRational::from_integer(num)))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                self.vocab.resolve(ident).map(DiffPoly::atom)
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "integer too large".into() })
    }
}

/// Renders a rational as `p` or `p/q`.
pub fn format_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn format_monomial(m: &Monomial) -> String {
    let mut out = String::new();
    for (i, (atom, exp)) in m.factors().iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        write!(out, "{atom}").unwrap();
        if *exp != 1 {
            write!(out, "^{exp}").unwrap();
        }
    }
    out
}

/// Deterministic canonical rendering; `parse(print(p)) == p`.
pub fn print(p: &DiffPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (mono, coeff)) in p.iter().enumerate() {
        let negative = coeff.is_negative();
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mag = coeff.abs();
        if mono.is_one() {
            out.push_str(&format_rational(&mag));
        } else {
            if !mag.is_one() {
                out.push_str(&format_rational(&mag));
                out.push('*');
            }
            out.push_str(&format_monomial(mono));
        }
    }
    out
}
