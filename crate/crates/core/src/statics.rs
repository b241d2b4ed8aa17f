//! Static semantics: free, bound and must-bound variables, and signatures.
//!
//! Function symbols and unary predicate symbols are rigid: their value only
//! depends on their argument. Nullary predicate symbols (predicationals such
//! as `P`) and program constants may depend on the whole state, so they
//! contribute every variable.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{ExprRef, Formula, Name, Program, Term, Variable};

/// A finite set of variables, or the set of all variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum VarSet {
    Finite(BTreeSet<Variable>),
    All,
}

impl Default for VarSet {
    fn default() -> Self {
        VarSet::empty()
    }
}

impl VarSet {
    pub fn empty() -> Self {
        VarSet::Finite(BTreeSet::new())
    }

    pub fn singleton(x: Variable) -> Self {
        VarSet::Finite(BTreeSet::from([x]))
    }

    pub fn from_vars<I: IntoIterator<Item = Variable>>(it: I) -> Self {
        VarSet::Finite(it.into_iter().collect())
    }

    pub fn is_all(&self) -> bool {
        matches!(self, VarSet::All)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, VarSet::Finite(s) if s.is_empty())
    }

    pub fn contains(&self, x: &Variable) -> bool {
        match self {
            VarSet::All => true,
            VarSet::Finite(s) => s.contains(x),
        }
    }

    pub fn insert(&mut self, x: Variable) {
        if let VarSet::Finite(s) = self {
            s.insert(x);
        }
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        match (self, other) {
            (VarSet::Finite(a), VarSet::Finite(b)) => VarSet::Finite(a.union(b).cloned().collect()),
            _ => VarSet::All,
        }
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        match (self, other) {
            (VarSet::All, x) | (x, VarSet::All) => x.clone(),
            (VarSet::Finite(a), VarSet::Finite(b)) => {
                VarSet::Finite(a.intersection(b).cloned().collect())
            }
        }
    }

    /// Set difference. `All` minus a finite set stays `All` (the complement
    /// of a finite set is not representable and still infinite).
    pub fn minus(&self, other: &VarSet) -> VarSet {
        match (self, other) {
            (_, VarSet::All) => VarSet::empty(),
            (VarSet::All, VarSet::Finite(_)) => VarSet::All,
            (VarSet::Finite(a), VarSet::Finite(b)) => {
                VarSet::Finite(a.difference(b).cloned().collect())
            }
        }
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        match (self, other) {
            (_, VarSet::All) => true,
            (VarSet::All, VarSet::Finite(_)) => false,
            (VarSet::Finite(a), VarSet::Finite(b)) => a.is_subset(b),
        }
    }

    /// Some variable in both sets, if any. For `All` against `All` there is
    /// no concrete witness, so `None` is returned together with `true` from
    /// [`VarSet::intersects`].
    pub fn common(&self, other: &VarSet) -> Option<Variable> {
        match (self, other) {
            (VarSet::All, VarSet::Finite(s)) | (VarSet::Finite(s), VarSet::All) => {
                s.iter().next().cloned()
            }
            (VarSet::Finite(a), VarSet::Finite(b)) => a.intersection(b).next().cloned(),
            (VarSet::All, VarSet::All) => None,
        }
    }

    pub fn intersects(&self, other: &VarSet) -> bool {
        match (self, other) {
            (VarSet::All, VarSet::All) => true,
            _ => self.common(other).is_some(),
        }
    }

    pub fn finite(&self) -> Option<&BTreeSet<Variable>> {
        match self {
            VarSet::Finite(s) => Some(s),
            VarSet::All => None,
        }
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarSet::All => f.write_str("ALL"),
            VarSet::Finite(s) => {
                let names: Vec<&str> = s.iter().map(|v| v.name()).collect();
                write!(f, "{{{}}}", names.join(","))
            }
        }
    }
}

pub fn free_vars<'a>(e: impl Into<ExprRef<'a>>) -> VarSet {
    match e.into() {
        ExprRef::Term(t) => fv_term(t),
        ExprRef::Formula(f) => fv_formula(f, true),
        ExprRef::Program(p) => fv_program(p, true),
    }
}

/// Free variables when nullary predicate symbols are read as rigid
/// (state-independent) constants rather than predicationals.
pub fn rigid_free_vars<'a>(e: impl Into<ExprRef<'a>>) -> VarSet {
    match e.into() {
        ExprRef::Term(t) => fv_term(t),
        ExprRef::Formula(f) => fv_formula(f, false),
        ExprRef::Program(p) => fv_program(p, false),
    }
}

fn fv_term(t: &Term) -> VarSet {
    let mut out = VarSet::empty();
    collect_term_vars(t, &mut out);
    out
}

fn collect_term_vars(t: &Term, out: &mut VarSet) {
    match t {
        Term::Var(x) => out.insert(x.clone()),
        Term::Num(_) | Term::Dot | Term::Func(_, None) => {}
        Term::Plus(a, b) | Term::Minus(a, b) | Term::Times(a, b) => {
            collect_term_vars(a, out);
            collect_term_vars(b, out);
        }
        Term::Neg(a) | Term::Power(a, _) | Term::Func(_, Some(a)) => collect_term_vars(a, out),
    }
}

fn fv_formula(f: &Formula, pa: bool) -> VarSet {
    match f {
        Formula::True | Formula::False => VarSet::empty(),
        Formula::Cmp(_, a, b) => fv_term(a).union(&fv_term(b)),
        Formula::Not(a) => fv_formula(a, pa),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
            fv_formula(a, pa).union(&fv_formula(b, pa))
        }
        Formula::Forall(x, a) | Formula::Exists(x, a) => {
            fv_formula(a, pa).minus(&VarSet::singleton(x.clone()))
        }
        Formula::Box(p, a) | Formula::Diamond(p, a) => {
            fv_program(p, pa).union(&fv_formula(a, pa).minus(&must_bound_vars(p)))
        }
        Formula::Pred(_, None) if pa => VarSet::All,
        Formula::Pred(_, None) => VarSet::empty(),
        Formula::Pred(_, Some(t)) => fv_term(t),
    }
}

fn fv_program(p: &Program, pa: bool) -> VarSet {
    match p {
        Program::Assign(_, e) => fv_term(e),
        Program::Test(q) => fv_formula(q, pa),
        Program::Choice(a, b) => fv_program(a, pa).union(&fv_program(b, pa)),
        Program::Seq(a, b) => {
            fv_program(a, pa).union(&fv_program(b, pa).minus(&must_bound_vars(a)))
        }
        Program::Repeat(a) => fv_program(a, pa),
        Program::While(q, a) => fv_formula(q, pa).union(&fv_program(a, pa)),
        Program::If(q, a, b) => {
            let mut s = fv_formula(q, pa).union(&fv_program(a, pa));
            if let Some(b) = b {
                s = s.union(&fv_program(b, pa));
            }
            s
        }
        Program::Ode(eqs, dom) => {
            let mut s = fv_formula(dom, pa);
            for (x, e) in eqs {
                s.insert(x.clone());
                s = s.union(&fv_term(e));
            }
            s
        }
        Program::Const(_) => VarSet::All,
    }
}

/// Variables written on some execution path.
pub fn bound_vars(p: &Program) -> VarSet {
    match p {
        Program::Assign(x, _) => VarSet::singleton(x.clone()),
        Program::Test(_) => VarSet::empty(),
        Program::Choice(a, b) | Program::Seq(a, b) => bound_vars(a).union(&bound_vars(b)),
        Program::Repeat(a) | Program::While(_, a) => bound_vars(a),
        Program::If(_, a, b) => match b {
            Some(b) => bound_vars(a).union(&bound_vars(b)),
            None => bound_vars(a),
        },
        Program::Ode(eqs, _) => VarSet::from_vars(eqs.iter().map(|(x, _)| x.clone())),
        Program::Const(_) => VarSet::All,
    }
}

/// Variables written on every execution path.
pub fn must_bound_vars(p: &Program) -> VarSet {
    match p {
        Program::Assign(x, _) => VarSet::singleton(x.clone()),
        Program::Test(_) | Program::Repeat(_) | Program::While(..) | Program::Const(_) => {
            VarSet::empty()
        }
        Program::Choice(a, b) => must_bound_vars(a).intersection(&must_bound_vars(b)),
        Program::Seq(a, b) => must_bound_vars(a).union(&must_bound_vars(b)),
        Program::If(_, a, b) => match b {
            Some(b) => must_bound_vars(a).intersection(&must_bound_vars(b)),
            None => VarSet::empty(),
        },
        Program::Ode(eqs, _) => VarSet::from_vars(eqs.iter().map(|(x, _)| x.clone())),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SymbolKind {
    Function { arity: u8 },
    Predicate { arity: u8 },
    Program,
}

/// A placeholder symbol: function, predicate or program constant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Symbol {
    pub name: Name,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn function(name: &str, arity: u8) -> Self {
        Symbol {
            name: name.into(),
            kind: SymbolKind::Function { arity },
        }
    }

    pub fn predicate(name: &str, arity: u8) -> Self {
        Symbol {
            name: name.into(),
            kind: SymbolKind::Predicate { arity },
        }
    }

    pub fn program(name: &str) -> Self {
        Symbol {
            name: name.into(),
            kind: SymbolKind::Program,
        }
    }

    pub fn arity(&self) -> u8 {
        match self.kind {
            SymbolKind::Function { arity } | SymbolKind::Predicate { arity } => arity,
            SymbolKind::Program => 0,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SymbolKind::Function { arity: 0 } => write!(f, "{}()", self.name),
            SymbolKind::Function { .. } => write!(f, "{}(.)", self.name),
            SymbolKind::Predicate { arity: 0 } => write!(f, "{}", self.name),
            SymbolKind::Predicate { .. } => write!(f, "{}(.)", self.name),
            SymbolKind::Program => write!(f, "{}{{}}", self.name),
        }
    }
}

pub fn signature<'a>(e: impl Into<ExprRef<'a>>) -> BTreeSet<Symbol> {
    fn go(e: ExprRef<'_>, out: &mut BTreeSet<Symbol>) {
        match e {
            ExprRef::Term(Term::Func(n, arg)) => {
                out.insert(Symbol::function(n, arg.is_some() as u8));
            }
            ExprRef::Formula(Formula::Pred(n, arg)) => {
                out.insert(Symbol::predicate(n, arg.is_some() as u8));
            }
            ExprRef::Program(Program::Const(n)) => {
                out.insert(Symbol::program(n));
            }
            _ => {}
        }
        for c in e.children() {
            go(c, out);
        }
    }
    let mut out = BTreeSet::new();
    go(e.into(), &mut out);
    out
}

/// Every variable name occurring anywhere (free or bound).
pub fn all_vars<'a>(e: impl Into<ExprRef<'a>>) -> BTreeSet<Variable> {
    fn go(e: ExprRef<'_>, out: &mut BTreeSet<Variable>) {
        match e {
            ExprRef::Term(Term::Var(x)) => {
                out.insert(x.clone());
            }
            ExprRef::Formula(Formula::Forall(x, _) | Formula::Exists(x, _)) => {
                out.insert(x.clone());
            }
            ExprRef::Program(Program::Assign(x, _)) => {
                out.insert(x.clone());
            }
            ExprRef::Program(Program::Ode(eqs, _)) => {
                out.extend(eqs.iter().map(|(x, _)| x.clone()));
            }
            _ => {}
        }
        for c in e.children() {
            go(c, out);
        }
    }
    let mut out = BTreeSet::new();
    go(e.into(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_program, parse_term};

    fn vs(names: &[&str]) -> VarSet {
        VarSet::from_vars(names.iter().map(|n| Variable::new(n)))
    }

    const EXAMPLE1: &str = "{a:=A; ++ a:=-b;}{x'=v,v'=a & v>=0}";

    #[test]
    fn free_variables() {
        assert_eq!(free_vars(&parse_term("x+1").unwrap()), vs(&["x"]));
        assert_eq!(
            free_vars(&parse_formula("[x:=x+1]x>5").unwrap()),
            vs(&["x"])
        );
        assert_eq!(
            free_vars(&parse_program(EXAMPLE1).unwrap()),
            vs(&["A", "b", "v", "x"])
        );
        assert_eq!(
            free_vars(&parse_formula("\\forall x x>y").unwrap()),
            vs(&["y"])
        );
        assert!(free_vars(&parse_program("ctrl;").unwrap()).is_all());
        assert!(free_vars(&parse_formula("P").unwrap()).is_all());
        assert_eq!(free_vars(&parse_formula("p(x)").unwrap()), vs(&["x"]));
        assert_eq!(free_vars(&parse_term("f()").unwrap()), vs(&[]));
    }

    #[test]
    fn bound_variables() {
        assert_eq!(bound_vars(&parse_program("x:=x+1;").unwrap()), vs(&["x"]));
        assert_eq!(
            bound_vars(&parse_program(EXAMPLE1).unwrap()),
            vs(&["a", "v", "x"])
        );
        assert_eq!(bound_vars(&parse_program("?x>0;").unwrap()), vs(&[]));
        assert!(bound_vars(&parse_program("ctrl;").unwrap()).is_all());
    }

    #[test]
    fn must_bound_variables() {
        assert_eq!(
            must_bound_vars(&parse_program("a:=A; ++ a:=-b;").unwrap()),
            vs(&["a"])
        );
        assert_eq!(
            must_bound_vars(&parse_program("{x:=1;}*").unwrap()),
            vs(&[])
        );
        assert_eq!(
            must_bound_vars(&parse_program("x:=1;y:=2;").unwrap()),
            vs(&["x", "y"])
        );
        assert_eq!(must_bound_vars(&parse_program("ctrl;").unwrap()), vs(&[]));
    }

    #[test]
    fn seq_free_vars_law() {
        let a = parse_program("x:=y; ++ x:=z;w:=1;").unwrap();
        let b = parse_program("v:=x+w+u;").unwrap();
        let seq = Program::seq(a.clone(), b.clone());
        assert_eq!(
            free_vars(&seq),
            free_vars(&a).union(&free_vars(&b).minus(&must_bound_vars(&a)))
        );
    }

    #[test]
    fn signatures() {
        let s = signature(&parse_formula("[ctrl;plant;]x>y").unwrap());
        assert_eq!(
            s,
            BTreeSet::from([Symbol::program("ctrl"), Symbol::program("plant")])
        );
        assert!(signature(&parse_formula("x>4").unwrap()).is_empty());
        let s = signature(&parse_formula("p(f())").unwrap());
        assert_eq!(
            s,
            BTreeSet::from([Symbol::predicate("p", 1), Symbol::function("f", 0)])
        );
    }

    #[test]
    fn varset_algebra() {
        let a = vs(&["x", "y"]);
        assert!(VarSet::All.union(&a).is_all());
        assert!(a.is_subset(&VarSet::All));
        assert_eq!(a.intersection(&VarSet::All), a);
        assert_eq!(a.minus(&vs(&["x"])), vs(&["y"]));
        assert!(a.intersects(&VarSet::All));
        assert!(!a.intersects(&vs(&["z"])));
    }
}
