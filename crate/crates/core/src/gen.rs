//! Seeded random syntax for property tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{num, CmpOp, Formula, Program, Term, Variable};

/// Which constructs may appear.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// Only what the evaluator runs: no symbols, quantifiers, ODEs or dots.
    Discrete,
    /// Every construct of the grammar.
    Full,
}

pub const VARS: [&str; 6] = ["x", "y", "z", "a", "b", "v"];

pub struct Gen {
    rng: ChaCha8Rng,
    profile: Profile,
    vars: Vec<Variable>,
    /// Whether leaf terms may be the dot placeholder.
    pub dots: bool,
    /// Whether loops may be generated.
    pub loops: bool,
}

const OPS: [CmpOp; 5] = [
    CmpOp::Less,
    CmpOp::LessEq,
    CmpOp::Equal,
    CmpOp::GreaterEq,
    CmpOp::Greater,
];

impl Gen {
    pub fn new(seed: u64, profile: Profile) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            profile,
            vars: VARS.iter().map(|v| Variable::new(v)).collect(),
            dots: false,
            loops: true,
        }
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    fn full(&self) -> bool {
        self.profile == Profile::Full
    }

    pub fn var(&mut self) -> Variable {
        let i = self.rng.random_range(0..self.vars.len());
        self.vars[i].clone()
    }

    fn pick(&mut self, n: u32) -> u32 {
        self.rng.random_range(0..n)
    }

    pub fn term(&mut self, depth: u32) -> Term {
        if depth == 0 || self.pick(3) == 0 {
            return self.leaf_term();
        }
        let d = depth - 1;
        match self.pick(if self.full() { 7 } else { 5 }) {
            0 => Term::plus(self.term(d), self.term(d)),
            1 => Term::minus(self.term(d), self.term(d)),
            2 => Term::times(self.term(d), self.term(d)),
            3 => Term::neg(self.term(d)),
            4 => {
                let n = self.rng.random_range(1..=3);
                Term::power(self.term(d), n)
            }
            5 => Term::func("g", Some(self.term(d))),
            _ => Term::func("f", None),
        }
    }

    fn leaf_term(&mut self) -> Term {
        if self.dots && self.pick(3) == 0 {
            return Term::Dot;
        }
        if self.pick(5) < 3 {
            Term::Var(self.var())
        } else {
            num(self.rng.random_range(0..=5))
        }
    }

    pub fn formula(&mut self, depth: u32) -> Formula {
        if depth == 0 || self.pick(3) == 0 {
            return self.atom(depth);
        }
        let d = depth - 1;
        match self.pick(if self.full() { 10 } else { 8 }) {
            0 => Formula::not(self.formula(d)),
            1 => Formula::and(self.formula(d), self.formula(d)),
            2 => Formula::or(self.formula(d), self.formula(d)),
            3 => Formula::implies(self.formula(d), self.formula(d)),
            4 => Formula::equiv(self.formula(d), self.formula(d)),
            5 | 6 => Formula::boxed(self.program(d), self.formula(d)),
            7 => Formula::diamond(self.program(d), self.formula(d)),
            8 => Formula::Forall(self.var(), Box::new(self.formula(d))),
            _ => Formula::Exists(self.var(), Box::new(self.formula(d))),
        }
    }

    fn atom(&mut self, depth: u32) -> Formula {
        let d = depth.min(2);
        match self.pick(if self.full() { 12 } else { 10 }) {
            0 => Formula::True,
            1 => Formula::False,
            10 => Formula::pred("P", None),
            11 => Formula::pred("p", Some(self.term(d))),
            _ => {
                let op = OPS[self.pick(5) as usize];
                Formula::cmp(op, self.term(d), self.term(d))
            }
        }
    }

    pub fn program(&mut self, depth: u32) -> Program {
        if depth == 0 || self.pick(3) == 0 {
            return self.atomic_program(depth);
        }
        let d = depth - 1;
        let kinds = if self.loops { 7 } else { 5 };
        match self.pick(kinds) {
            0 | 1 => Program::seq(self.program(d), self.program(d)),
            2 => Program::choice(self.program(d), self.program(d)),
            3 => Program::if_then(self.formula(d.min(1)), self.program(d), None),
            4 => {
                let q = self.formula(d.min(1));
                let (a, b) = (self.program(d), self.program(d));
                Program::if_then(q, a, Some(b))
            }
            5 => Program::repeat(self.program(d)),
            _ => self.while_loop(d),
        }
    }

    /// A loop that usually terminates: the guard bounds a variable that the
    /// body increases.
    fn while_loop(&mut self, depth: u32) -> Program {
        let x = self.var();
        let bound = self.rng.random_range(0..=6);
        let guard = Formula::cmp(CmpOp::Less, Term::Var(x.clone()), num(bound));
        let step = Program::Assign(
            x.clone(),
            Term::plus(Term::Var(x), num(self.rng.random_range(1..=3))),
        );
        let body = if self.pick(2) == 0 {
            step
        } else {
            Program::seq(self.program(depth), step)
        };
        Program::while_loop(guard, body)
    }

    fn atomic_program(&mut self, depth: u32) -> Program {
        let d = depth.min(2);
        match self.pick(if self.full() { 6 } else { 4 }) {
            0..=2 => Program::Assign(self.var(), self.term(d)),
            3 => Program::Test(self.formula(d.min(1))),
            4 => Program::constant("ctrl"),
            _ => {
                let n = self.rng.random_range(1..=2);
                let mut eqs = Vec::new();
                while eqs.len() < n {
                    let x = self.var();
                    if !eqs.iter().any(|(y, _)| *y == x) {
                        eqs.push((x, self.term(1)));
                    }
                }
                let dom = self.formula(0);
                Program::ode(eqs, dom).expect("distinct nonempty equations")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::contains_dot;

    #[test]
    fn same_seed_same_tree() {
        let a = Gen::new(9, Profile::Full).formula(4);
        let b = Gen::new(9, Profile::Full).formula(4);
        assert_eq!(a, b);
    }

    #[test]
    fn dots_only_when_enabled() {
        let mut g = Gen::new(1, Profile::Discrete);
        assert!((0..200).all(|_| !contains_dot(&g.formula(3))));
        g.dots = true;
        assert!((0..200).any(|_| contains_dot(&g.formula(3))));
    }
}
