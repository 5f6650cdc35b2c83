//! Seeded random differential polynomials for property tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{rat, Atom, Dep, Dir, DiffPoly, JetIndex, Monomial};
use crate::conslaw::Symmetry;

/// Shape of generated polynomials.
#[derive(Debug, Clone)]
pub struct PolyShape {
    pub max_terms: usize,
    pub max_degree: u32,
    pub max_order: u32,
    pub deps: Vec<Dep>,
    pub with_phi: bool,
    pub with_indep: bool,
    pub params: Vec<&'static str>,
}

impl Default for PolyShape {
    fn default() -> Self {
        PolyShape {
            max_terms: 4,
            max_degree: 3,
            max_order: 2,
            deps: vec![Dep::U],
            with_phi: false,
            with_indep: false,
            params: Vec::new(),
        }
    }
}

pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn coefficient(&mut self) -> crate::algebra::Rational {
        let n = self.rng.gen_range(1..=9) * if self.rng.gen_bool(0.5) { 1 } else { -1 };
        let d = self.rng.gen_range(1..=4);
        rat(n, d)
    }

    fn atoms(&self, shape: &PolyShape) -> Vec<Atom> {
        let mut atoms = Vec::new();
        for dep in &shape.deps {
            for order in 0..=shape.max_order {
                for nt in 0..=order {
                    atoms.push(Atom::Jet(*dep, JetIndex::new(nt, order - nt)));
                }
            }
        }
        if shape.with_phi {
            atoms.extend((0..3).map(Atom::PhiDeriv));
        }
        if shape.with_indep {
            atoms.extend(Dir::ALL.map(Atom::Indep));
        }
        atoms.extend(shape.params.iter().map(|p| Atom::param(p)));
        atoms
    }

    pub fn monomial(&mut self, atoms: &[Atom], max_degree: u32) -> Monomial {
        let degree = self.rng.gen_range(0..=max_degree);
        let factors: Vec<(Atom, i32)> = (0..degree)
            .map(|_| (atoms.choose(&mut self.rng).expect("nonempty atoms").clone(), 1))
            .collect();
        factors
            .into_iter()
            .fold(Monomial::one(), |m, (a, e)| m.mul(&Monomial::power(a, e)))
    }

    pub fn poly(&mut self, shape: &PolyShape) -> DiffPoly {
        let atoms = self.atoms(shape);
        let terms = self.rng.gen_range(1..=shape.max_terms);
        (0..terms)
            .map(|_| {
                let c = self.coefficient();
                DiffPoly::term(c, self.monomial(&atoms, shape.max_degree))
            })
            .sum()
    }

    /// A polynomial in `t`, `x`, `u` of low degree, for symmetry coefficients.
    fn point_function(&mut self) -> DiffPoly {
        let atoms = [Atom::Indep(Dir::T), Atom::Indep(Dir::X), Atom::u()];
        let terms = self.rng.gen_range(0..=3);
        (0..terms)
            .map(|_| {
                let c = self.coefficient();
                DiffPoly::term(c, self.monomial(&atoms, 2))
            })
            .sum()
    }

    pub fn symmetry(&mut self) -> Symmetry {
        Symmetry::new(self.point_function(), self.point_function(), self.point_function())
            .expect("point functions are valid symmetry coefficients")
    }

    /// `v·P + Q` with `P` of order ≤ 3 in `u` and `Q` also depending on low-order `v` jets.
    pub fn lagrangian(&mut self) -> DiffPoly {
        let p = self.poly(&PolyShape {
            max_order: 3,
            max_degree: 2,
            with_indep: true,
            ..PolyShape::default()
        });
        let q = self.poly(&PolyShape {
            max_terms: 2,
            max_order: 1,
            max_degree: 2,
            deps: vec![Dep::U, Dep::V],
            ..PolyShape::default()
        });
        &DiffPoly::v() * &p + q
    }
}
