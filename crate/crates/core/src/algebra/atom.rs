use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// Default bound on the total differential order of any jet coordinate.
pub const DEFAULT_MAX_ORDER: u32 = 12;

/// Direction of differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    T,
    X,
}

impl Dir {
    pub const ALL: [Dir; 2] = [Dir::T, Dir::X];

    pub fn letter(self) -> char {
        match self {
            Dir::T => 't',
            Dir::X => 'x',
        }
    }
}

/// Dependent variables: `u` is the unknown of the equation, `v` the adjoint variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dep {
    U,
    V,
}

impl Dep {
    pub fn letter(self) -> char {
        match self {
            Dep::U => 'u',
            Dep::V => 'v',
        }
    }
}

/// Unordered multi-index of a jet coordinate: `nt` t-derivatives and `nx` x-derivatives.
///
/// Ordered by total order first, then by t-count, so `u < u_x < u_t < u_xx < u_tx < u_tt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct JetIndex {
    pub nt: u32,
    pub nx: u32,
}

impl JetIndex {
    pub const ZERO: JetIndex = JetIndex { nt: 0, nx: 0 };

    pub const fn new(nt: u32, nx: u32) -> Self {
        JetIndex { nt, nx }
    }

    pub fn order(self) -> u32 {
        self.nt + self.nx
    }

    pub fn unit(dir: Dir) -> Self {
        match dir {
            Dir::T => JetIndex::new(1, 0),
            Dir::X => JetIndex::new(0, 1),
        }
    }

    pub fn bump(self, dir: Dir) -> Self {
        match dir {
            Dir::T => JetIndex::new(self.nt + 1, self.nx),
            Dir::X => JetIndex::new(self.nt, self.nx + 1),
        }
    }

    /// Lowers the index in `dir`, if possible.
    pub fn lower(self, dir: Dir) -> Option<Self> {
        match dir {
            Dir::T if self.nt > 0 => Some(JetIndex::new(self.nt - 1, self.nx)),
            Dir::X if self.nx > 0 => Some(JetIndex::new(self.nt, self.nx - 1)),
            _ => None,
        }
    }

    /// True when `self` is a (not necessarily proper) derivative of `base`.
    pub fn dominates(self, base: JetIndex) -> bool {
        self.nt >= base.nt && self.nx >= base.nx
    }

    /// Componentwise difference; caller guarantees `self.dominates(base)`.
    pub fn minus(self, base: JetIndex) -> JetIndex {
        JetIndex::new(self.nt - base.nt, self.nx - base.nx)
    }

    pub fn from_dirs(dirs: &[Dir]) -> Self {
        dirs.iter().fold(JetIndex::ZERO, |acc, &d| acc.bump(d))
    }

    /// Number of distinct orderings of the multiset of directions, `(nt+nx)!/(nt! nx!)`.
    pub fn multiplicity(self) -> u64 {
        let (n, k) = (u64::from(self.order()), u64::from(self.nt.min(self.nx)));
        (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Derivative suffix with all t's before all x's, e.g. `txx`.
    pub fn suffix(self) -> String {
        let mut s = String::with_capacity(self.order() as usize);
        s.extend(std::iter::repeat_n('t', self.nt as usize));
        s.extend(std::iter::repeat_n('x', self.nx as usize));
        s
    }

    /// Directions of this index in canonical order (t's first).
    pub fn dirs(self) -> Vec<Dir> {
        let mut out = vec![Dir::T; self.nt as usize];
        out.extend(std::iter::repeat_n(Dir::X, self.nx as usize));
        out
    }
}

impl Ord for JetIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then(self.nt.cmp(&other.nt))
    }
}

impl PartialOrd for JetIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Interned-by-value symbol name for parameters and auxiliary constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Generator of the differential-polynomial ring.
///
/// Variant order fixes the printed factor order: parameters, auxiliary
/// constants, independent variables, derivatives of φ, then jets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// Equation parameter such as `eps`, `alpha`, `beta`, `kappa`.
    Param(Symbol),
    /// Arbitrary constant of a solution family such as `a`, `b`.
    Aux(Symbol),
    Indep(Dir),
    /// φ⁽ᵏ⁾(u) for the substitution v = φ(u).
    PhiDeriv(u32),
    Jet(Dep, JetIndex),
}

impl Atom {
    pub fn u() -> Atom {
        Atom::Jet(Dep::U, JetIndex::ZERO)
    }

    pub fn v() -> Atom {
        Atom::Jet(Dep::V, JetIndex::ZERO)
    }

    pub fn param(name: &str) -> Atom {
        Atom::Param(Symbol::new(name))
    }

    pub fn aux(name: &str) -> Atom {
        Atom::Aux(Symbol::new(name))
    }

    pub fn jet(dep: Dep, nt: u32, nx: u32) -> Atom {
        Atom::Jet(dep, JetIndex::new(nt, nx))
    }

    /// Atoms that may not carry a jet dependence (parameters, constants, t, x).
    pub fn is_coefficient(&self) -> bool {
        matches!(self, Atom::Param(_) | Atom::Aux(_) | Atom::Indep(_))
    }

    pub fn is_base_u(&self) -> bool {
        matches!(self, Atom::Jet(Dep::U, idx) if *idx == JetIndex::ZERO)
    }

    /// Differential order contributed to the weight of a monomial.
    pub fn weight(&self) -> u32 {
        match self {
            Atom::Jet(_, idx) => idx.order(),
            _ => 0,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Param(s) | Atom::Aux(s) => write!(f, "{s}"),
            Atom::Indep(d) => write!(f, "{}", d.letter()),
            Atom::PhiDeriv(0) => f.write_str("phi"),
            Atom::PhiDeriv(k) => write!(f, "phi_{}", "u".repeat(*k as usize)),
            Atom::Jet(dep, idx) if *idx == JetIndex::ZERO => write!(f, "{}", dep.letter()),
            Atom::Jet(dep, idx) => write!(f, "{}_{}", dep.letter(), idx.suffix()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_index_order() {
        let mut v = vec![
            JetIndex::new(2, 0),
            JetIndex::new(0, 2),
            JetIndex::new(1, 0),
            JetIndex::new(0, 0),
            JetIndex::new(1, 1),
            JetIndex::new(0, 1),
        ];
        v.sort();
        let s: Vec<String> = v.iter().map(|i| i.suffix()).collect();
        assert_eq!(s, ["", "x", "t", "xx", "tx", "tt"]);
    }

    #[test]
    fn multiplicity_counts_orderings() {
        assert_eq!(JetIndex::new(1, 2).multiplicity(), 3);
        assert_eq!(JetIndex::new(1, 1).multiplicity(), 2);
        assert_eq!(JetIndex::new(0, 3).multiplicity(), 1);
        assert_eq!(JetIndex::new(2, 2).multiplicity(), 6);
        assert_eq!(JetIndex::ZERO.multiplicity(), 1);
    }

    #[test]
    fn mixed_partials_share_an_index() {
        assert_eq!(
            JetIndex::from_dirs(&[Dir::T, Dir::X]),
            JetIndex::from_dirs(&[Dir::X, Dir::T])
        );
    }

    #[test]
    fn atom_display() {
        assert_eq!(Atom::jet(Dep::U, 1, 2).to_string(), "u_txx");
        assert_eq!(Atom::jet(Dep::V, 0, 0).to_string(), "v");
        assert_eq!(Atom::PhiDeriv(2).to_string(), "phi_uu");
        assert_eq!(Atom::Indep(Dir::T).to_string(), "t");
    }
}
