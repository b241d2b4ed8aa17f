//! Untrusted search for the substitution that makes an axiom's left side
//! equal to a given formula. The kernel re-checks whatever this finds.

use super::{schema, AxiomId, Judgment};
use crate::statics::Symbol;
use crate::syntax::{Formula, Program, Term, Variable};
use crate::usubst::{abstract_free, Replacement, UniformSubstitution};

/// A substitution and renamings under which the left side of `id` becomes
/// `target`, or `None` if the axiom does not apply.
pub fn match_axiom(
    id: AxiomId,
    target: &Formula,
) -> Option<(UniformSubstitution, Vec<(Variable, Variable)>)> {
    let Judgment::Valid(Formula::Equiv(lhs, _)) = schema(id) else {
        return None;
    };
    let mut m = Matcher::default();
    m.formula(lhs, target)?;
    // Unary predicates are resolved last, once the renaming is known.
    for (name, arg, f) in std::mem::take(&mut m.deferred) {
        let x = m.rename(&arg)?;
        let r = abstract_free(&f, &x);
        m.bind(Symbol::predicate(&name, 1), Replacement::Formula(r))?;
    }
    let renamings = m.renamings.into_iter().filter(|(a, b)| a != b).collect();
    Some((m.sigma, renamings))
}

#[derive(Default)]
struct Matcher {
    sigma: UniformSubstitution,
    renamings: Vec<(Variable, Variable)>,
    deferred: Vec<(String, Variable, Formula)>,
}

impl Matcher {
    fn bind(&mut self, sym: Symbol, r: Replacement) -> Option<()> {
        match self.sigma.get(&sym) {
            Some(old) => (old == &r).then_some(()),
            None => self.sigma.insert(sym, r).ok(),
        }
    }

    fn rename(&self, x: &Variable) -> Option<Variable> {
        Some(
            self.renamings
                .iter()
                .find(|(a, _)| a == x)
                .map(|(_, b)| b.clone())
                .unwrap_or_else(|| x.clone()),
        )
    }

    fn var(&mut self, pat: &Variable, target: &Variable) -> Option<()> {
        match self.renamings.iter().find(|(a, _)| a == pat) {
            Some((_, b)) => (b == target).then_some(()),
            None => {
                self.renamings.push((pat.clone(), target.clone()));
                Some(())
            }
        }
    }

    fn term(&mut self, pat: &Term, t: &Term) -> Option<()> {
        match (pat, t) {
            (Term::Func(f, None), _) => {
                self.bind(Symbol::function(f, 0), Replacement::Term(t.clone()))
            }
            (Term::Var(x), Term::Var(y)) => self.var(x, y),
            (Term::Num(a), Term::Num(b)) => (a == b).then_some(()),
            (Term::Plus(a, b), Term::Plus(c, d))
            | (Term::Minus(a, b), Term::Minus(c, d))
            | (Term::Times(a, b), Term::Times(c, d)) => {
                self.term(a, c)?;
                self.term(b, d)
            }
            (Term::Neg(a), Term::Neg(b)) => self.term(a, b),
            (Term::Power(a, n), Term::Power(b, k)) if n == k => self.term(a, b),
            _ => None,
        }
    }

    fn formula(&mut self, pat: &Formula, f: &Formula) -> Option<()> {
        match (pat, f) {
            (Formula::Pred(p, None), _) => {
                self.bind(Symbol::predicate(p, 0), Replacement::Formula(f.clone()))
            }
            (Formula::Pred(p, Some(Term::Var(x))), _) => {
                self.deferred.push((p.to_string(), x.clone(), f.clone()));
                Some(())
            }
            (Formula::True, Formula::True) | (Formula::False, Formula::False) => Some(()),
            (Formula::Cmp(o1, a, b), Formula::Cmp(o2, c, d)) if o1 == o2 => {
                self.term(a, c)?;
                self.term(b, d)
            }
            (Formula::Not(a), Formula::Not(b)) => self.formula(a, b),
            (Formula::And(a, b), Formula::And(c, d))
            | (Formula::Or(a, b), Formula::Or(c, d))
            | (Formula::Implies(a, b), Formula::Implies(c, d))
            | (Formula::Equiv(a, b), Formula::Equiv(c, d)) => {
                self.formula(a, c)?;
                self.formula(b, d)
            }
            (Formula::Box(p, a), Formula::Box(q, b))
            | (Formula::Diamond(p, a), Formula::Diamond(q, b)) => {
                self.program(p, q)?;
                self.formula(a, b)
            }
            _ => None,
        }
    }

    fn program(&mut self, pat: &Program, p: &Program) -> Option<()> {
        match (pat, p) {
            (Program::Const(a), _) => {
                self.bind(Symbol::program(a), Replacement::Program(p.clone()))
            }
            (Program::Assign(x, e), Program::Assign(y, t)) => {
                self.var(x, y)?;
                self.term(e, t)
            }
            (Program::Test(a), Program::Test(b)) => self.formula(a, b),
            (Program::Choice(a, b), Program::Choice(c, d))
            | (Program::Seq(a, b), Program::Seq(c, d)) => {
                self.program(a, c)?;
                self.program(b, d)
            }
            (Program::Repeat(a), Program::Repeat(b)) => self.program(a, b),
            _ => None,
        }
    }
}
