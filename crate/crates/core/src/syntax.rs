//! Abstract syntax of terms, formulas and hybrid programs.
//!
//! Syntax is inert: constructors never normalize, and equality is
//! node-for-node structural equality.

use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, Signed, Zero};

/// Names of function, predicate and program symbols.
pub type Name = Arc<str>;

/// Exact rational numbers used for literals and evaluation.
pub type Rational = BigRational;

/// A program/logical variable, identified by its name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: &str) -> Self {
        Variable(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Variable),
    Num(Rational),
    Plus(Box<Term>, Box<Term>),
    Minus(Box<Term>, Box<Term>),
    Times(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    /// Natural exponent, always at least 1.
    Power(Box<Term>, u32),
    /// Function symbol applied to zero or one argument.
    Func(Name, Option<Box<Term>>),
    /// The argument placeholder `.` of unary symbol replacements.
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CmpOp {
    Less,
    LessEq,
    Equal,
    GreaterEq,
    Greater,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Less => "<",
            CmpOp::LessEq => "<=",
            CmpOp::Equal => "=",
            CmpOp::GreaterEq => ">=",
            CmpOp::Greater => ">",
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            CmpOp::Less => lhs < rhs,
            CmpOp::LessEq => lhs <= rhs,
            CmpOp::Equal => lhs == rhs,
            CmpOp::GreaterEq => lhs >= rhs,
            CmpOp::Greater => lhs > rhs,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    True,
    False,
    Cmp(CmpOp, Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
    Forall(Variable, Box<Formula>),
    Exists(Variable, Box<Formula>),
    /// `[program]formula`
    Box(Box<Program>, Box<Formula>),
    /// `<program>formula`
    Diamond(Box<Program>, Box<Formula>),
    /// Predicate symbol; nullary ones are predicational constants like `P`.
    Pred(Name, Option<Term>),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Program {
    Assign(Variable, Term),
    Test(Formula),
    Choice(Box<Program>, Box<Program>),
    Seq(Box<Program>, Box<Program>),
    Repeat(Box<Program>),
    While(Formula, Box<Program>),
    /// `if(Q){a}else{b}`; a missing else branch does nothing.
    If(Formula, Box<Program>, Option<Box<Program>>),
    /// `{x'=e, y'=f & Q}`: nonempty, pairwise-distinct left-hand sides.
    Ode(Vec<(Variable, Term)>, Formula),
    /// Program constant such as `ctrl`.
    Const(Name),
}

/// Any of the three syntactic categories.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Expr {
    Term(Term),
    Formula(Formula),
    Program(Program),
}

/// Borrowed view of an [`Expr`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExprRef<'a> {
    Term(&'a Term),
    Formula(&'a Formula),
    Program(&'a Program),
}

// ---------------------------------------------------------------------------
// Constructors

pub fn var(name: &str) -> Term {
    Term::Var(Variable::new(name))
}

pub fn num(n: i64) -> Term {
    Term::Num(Rational::from_integer(BigInt::from(n)))
}

/// Literal form of a rational: negative values become `Neg(Num(|r|))`.
pub fn literal(r: &Rational) -> Term {
    if r.is_negative() {
        Term::Neg(Box::new(Term::Num(r.abs())))
    } else {
        Term::Num(r.clone())
    }
}

impl Term {
    pub fn plus(a: Term, b: Term) -> Term {
        Term::Plus(Box::new(a), Box::new(b))
    }
    pub fn minus(a: Term, b: Term) -> Term {
        Term::Minus(Box::new(a), Box::new(b))
    }
    pub fn times(a: Term, b: Term) -> Term {
        Term::Times(Box::new(a), Box::new(b))
    }
    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Term) -> Term {
        Term::Neg(Box::new(a))
    }
    pub fn power(a: Term, n: u32) -> Term {
        Term::Power(Box::new(a), n)
    }
    pub fn func(name: &str, arg: Option<Term>) -> Term {
        Term::Func(Arc::from(name), arg.map(Box::new))
    }

    /// True for `Num` literals and negated `Num` literals.
    pub fn is_literal(&self) -> bool {
        match self {
            Term::Num(_) => true,
            Term::Neg(inner) => matches!(&**inner, Term::Num(n) if !n.is_zero()),
            _ => false,
        }
    }
}

impl Formula {
    pub fn cmp(op: CmpOp, a: Term, b: Term) -> Formula {
        Formula::Cmp(op, a, b)
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn equiv(a: Formula, b: Formula) -> Formula {
        Formula::Equiv(Box::new(a), Box::new(b))
    }
    pub fn boxed(p: Program, f: Formula) -> Formula {
        Formula::Box(Box::new(p), Box::new(f))
    }
    pub fn diamond(p: Program, f: Formula) -> Formula {
        Formula::Diamond(Box::new(p), Box::new(f))
    }
    pub fn pred(name: &str, arg: Option<Term>) -> Formula {
        Formula::Pred(Arc::from(name), arg)
    }

    /// Conjunction of a list, left-nested; `true` when empty.
    pub fn conj(items: &[Formula]) -> Formula {
        let mut it = items.iter().cloned();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of a list, right-nested; `false` when empty.
    pub fn disj(items: &[Formula]) -> Formula {
        match items.split_last() {
            None => Formula::False,
            Some((last, init)) => init
                .iter()
                .rev()
                .fold(last.clone(), |acc, f| Formula::or(f.clone(), acc)),
        }
    }

    /// Sequent `gamma |- delta` encoded as `/\gamma -> \/delta`; an empty
    /// antecedent encodes as the bare succedent.
    pub fn sequent(gamma: &[Formula], delta: &[Formula]) -> Formula {
        if gamma.is_empty() {
            Formula::disj(delta)
        } else {
            Formula::implies(Formula::conj(gamma), Formula::disj(delta))
        }
    }
}

impl Program {
    pub fn assign(x: &str, e: Term) -> Program {
        Program::Assign(Variable::new(x), e)
    }
    pub fn seq(a: Program, b: Program) -> Program {
        Program::Seq(Box::new(a), Box::new(b))
    }
    pub fn choice(a: Program, b: Program) -> Program {
        Program::Choice(Box::new(a), Box::new(b))
    }
    pub fn repeat(a: Program) -> Program {
        Program::Repeat(Box::new(a))
    }
    pub fn while_loop(guard: Formula, body: Program) -> Program {
        Program::While(guard, Box::new(body))
    }
    pub fn if_then(guard: Formula, then: Program, otherwise: Option<Program>) -> Program {
        Program::If(guard, Box::new(then), otherwise.map(Box::new))
    }
    pub fn constant(name: &str) -> Program {
        Program::Const(Arc::from(name))
    }

    /// Builds an ODE, checking the nonempty / distinct-variables invariant.
    pub fn ode(eqs: Vec<(Variable, Term)>, domain: Formula) -> Option<Program> {
        if eqs.is_empty() {
            return None;
        }
        for (i, (x, _)) in eqs.iter().enumerate() {
            if eqs[..i].iter().any(|(y, _)| y == x) {
                return None;
            }
        }
        Some(Program::Ode(eqs, domain))
    }
}

// ---------------------------------------------------------------------------
// Expr plumbing

impl Expr {
    pub fn as_ref(&self) -> ExprRef<'_> {
        match self {
            Expr::Term(t) => ExprRef::Term(t),
            Expr::Formula(f) => ExprRef::Formula(f),
            Expr::Program(p) => ExprRef::Program(p),
        }
    }

    pub fn kind(&self) -> &'static str {
        self.as_ref().kind()
    }

    /// Unwraps a term. Callers use this only where the kind is fixed by
    /// construction; anything else is a bug.
    pub fn into_term(self) -> Term {
        match self {
            Expr::Term(t) => t,
            other => panic!("expected a term, got a {}", other.kind()),
        }
    }

    pub fn into_formula(self) -> Formula {
        match self {
            Expr::Formula(f) => f,
            other => panic!("expected a formula, got a {}", other.kind()),
        }
    }

    pub fn into_program(self) -> Program {
        match self {
            Expr::Program(p) => p,
            other => panic!("expected a program, got a {}", other.kind()),
        }
    }
}

impl From<Term> for Expr {
    fn from(t: Term) -> Self {
        Expr::Term(t)
    }
}
impl From<Formula> for Expr {
    fn from(f: Formula) -> Self {
        Expr::Formula(f)
    }
}
impl From<Program> for Expr {
    fn from(p: Program) -> Self {
        Expr::Program(p)
    }
}

impl<'a> From<&'a Term> for ExprRef<'a> {
    fn from(t: &'a Term) -> Self {
        ExprRef::Term(t)
    }
}
impl<'a> From<&'a Formula> for ExprRef<'a> {
    fn from(f: &'a Formula) -> Self {
        ExprRef::Formula(f)
    }
}
impl<'a> From<&'a Program> for ExprRef<'a> {
    fn from(p: &'a Program) -> Self {
        ExprRef::Program(p)
    }
}

impl<'a> ExprRef<'a> {
    pub fn kind(self) -> &'static str {
        match self {
            ExprRef::Term(_) => "term",
            ExprRef::Formula(_) => "formula",
            ExprRef::Program(_) => "program",
        }
    }

    pub fn to_owned(self) -> Expr {
        match self {
            ExprRef::Term(t) => Expr::Term(t.clone()),
            ExprRef::Formula(f) => Expr::Formula(f.clone()),
            ExprRef::Program(p) => Expr::Program(p.clone()),
        }
    }

    /// Immediate children in positional order (the numbering used by paths).
    pub fn children(self) -> Vec<ExprRef<'a>> {
        use ExprRef as E;
        match self {
            E::Term(t) => match t {
                Term::Var(_) | Term::Num(_) | Term::Dot | Term::Func(_, None) => vec![],
                Term::Plus(a, b) | Term::Minus(a, b) | Term::Times(a, b) => {
                    vec![E::Term(a), E::Term(b)]
                }
                Term::Neg(a) | Term::Power(a, _) | Term::Func(_, Some(a)) => vec![E::Term(a)],
            },
            E::Formula(f) => match f {
                Formula::True | Formula::False | Formula::Pred(_, None) => vec![],
                Formula::Cmp(_, a, b) => vec![E::Term(a), E::Term(b)],
                Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => {
                    vec![E::Formula(a)]
                }
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Implies(a, b)
                | Formula::Equiv(a, b) => vec![E::Formula(a), E::Formula(b)],
                Formula::Box(p, g) | Formula::Diamond(p, g) => vec![E::Program(p), E::Formula(g)],
                Formula::Pred(_, Some(t)) => vec![E::Term(t)],
            },
            E::Program(p) => match p {
                Program::Assign(_, e) => vec![E::Term(e)],
                Program::Test(q) => vec![E::Formula(q)],
                Program::Choice(a, b) | Program::Seq(a, b) => {
                    vec![E::Program(a), E::Program(b)]
                }
                Program::Repeat(a) => vec![E::Program(a)],
                Program::While(q, a) => vec![E::Formula(q), E::Program(a)],
                Program::If(q, a, b) => {
                    let mut v = vec![E::Formula(q), E::Program(a)];
                    if let Some(b) = b {
                        v.push(E::Program(b));
                    }
                    v
                }
                Program::Ode(eqs, dom) => {
                    let mut v: Vec<_> = eqs.iter().map(|(_, e)| E::Term(e)).collect();
                    v.push(E::Formula(dom));
                    v
                }
                Program::Const(_) => vec![],
            },
        }
    }

    pub fn at(self, path: &Path) -> Option<ExprRef<'a>> {
        let mut cur = self;
        for &i in path.steps() {
            cur = cur.children().get(i).copied()?;
        }
        Some(cur)
    }
}

fn expect_term(e: Expr) -> Option<Term> {
    match e {
        Expr::Term(t) => Some(t),
        _ => None,
    }
}
fn expect_formula(e: Expr) -> Option<Formula> {
    match e {
        Expr::Formula(f) => Some(f),
        _ => None,
    }
}
fn expect_program(e: Expr) -> Option<Program> {
    match e {
        Expr::Program(p) => Some(p),
        _ => None,
    }
}

/// Replaces child `i` of `node` by `new`, provided the category matches.
fn with_child(node: ExprRef<'_>, i: usize, new: Expr) -> Option<Expr> {
    let bt = |e: Expr| expect_term(e).map(Box::new);
    let bf = |e: Expr| expect_formula(e).map(Box::new);
    let bp = |e: Expr| expect_program(e).map(Box::new);
    Some(match node {
        ExprRef::Term(t) => Expr::Term(match (t, i) {
            (Term::Plus(_, b), 0) => Term::Plus(bt(new)?, b.clone()),
            (Term::Plus(a, _), 1) => Term::Plus(a.clone(), bt(new)?),
            (Term::Minus(_, b), 0) => Term::Minus(bt(new)?, b.clone()),
            (Term::Minus(a, _), 1) => Term::Minus(a.clone(), bt(new)?),
            (Term::Times(_, b), 0) => Term::Times(bt(new)?, b.clone()),
            (Term::Times(a, _), 1) => Term::Times(a.clone(), bt(new)?),
            (Term::Neg(_), 0) => Term::Neg(bt(new)?),
            (Term::Power(_, n), 0) => Term::Power(bt(new)?, *n),
            (Term::Func(f, Some(_)), 0) => Term::Func(f.clone(), Some(bt(new)?)),
            _ => return None,
        }),
        ExprRef::Formula(f) => Expr::Formula(match (f, i) {
            (Formula::Cmp(op, _, b), 0) => Formula::Cmp(*op, expect_term(new)?, b.clone()),
            (Formula::Cmp(op, a, _), 1) => Formula::Cmp(*op, a.clone(), expect_term(new)?),
            (Formula::Not(_), 0) => Formula::Not(bf(new)?),
            (Formula::And(_, b), 0) => Formula::And(bf(new)?, b.clone()),
            (Formula::And(a, _), 1) => Formula::And(a.clone(), bf(new)?),
            (Formula::Or(_, b), 0) => Formula::Or(bf(new)?, b.clone()),
            (Formula::Or(a, _), 1) => Formula::Or(a.clone(), bf(new)?),
            (Formula::Implies(_, b), 0) => Formula::Implies(bf(new)?, b.clone()),
            (Formula::Implies(a, _), 1) => Formula::Implies(a.clone(), bf(new)?),
            (Formula::Equiv(_, b), 0) => Formula::Equiv(bf(new)?, b.clone()),
            (Formula::Equiv(a, _), 1) => Formula::Equiv(a.clone(), bf(new)?),
            (Formula::Forall(x, _), 0) => Formula::Forall(x.clone(), bf(new)?),
            (Formula::Exists(x, _), 0) => Formula::Exists(x.clone(), bf(new)?),
            (Formula::Box(_, g), 0) => Formula::Box(bp(new)?, g.clone()),
            (Formula::Box(p, _), 1) => Formula::Box(p.clone(), bf(new)?),
            (Formula::Diamond(_, g), 0) => Formula::Diamond(bp(new)?, g.clone()),
            (Formula::Diamond(p, _), 1) => Formula::Diamond(p.clone(), bf(new)?),
            (Formula::Pred(n, Some(_)), 0) => Formula::Pred(n.clone(), Some(expect_term(new)?)),
            _ => return None,
        }),
        ExprRef::Program(p) => Expr::Program(match (p, i) {
            (Program::Assign(x, _), 0) => Program::Assign(x.clone(), expect_term(new)?),
            (Program::Test(_), 0) => Program::Test(expect_formula(new)?),
            (Program::Choice(_, b), 0) => Program::Choice(bp(new)?, b.clone()),
            (Program::Choice(a, _), 1) => Program::Choice(a.clone(), bp(new)?),
            (Program::Seq(_, b), 0) => Program::Seq(bp(new)?, b.clone()),
            (Program::Seq(a, _), 1) => Program::Seq(a.clone(), bp(new)?),
            (Program::Repeat(_), 0) => Program::Repeat(bp(new)?),
            (Program::While(_, a), 0) => Program::While(expect_formula(new)?, a.clone()),
            (Program::While(q, _), 1) => Program::While(q.clone(), bp(new)?),
            (Program::If(_, a, b), 0) => Program::If(expect_formula(new)?, a.clone(), b.clone()),
            (Program::If(q, _, b), 1) => Program::If(q.clone(), bp(new)?, b.clone()),
            (Program::If(q, a, Some(_)), 2) => Program::If(q.clone(), a.clone(), Some(bp(new)?)),
            (Program::Ode(eqs, dom), i) if i < eqs.len() => {
                let mut eqs = eqs.clone();
                eqs[i].1 = expect_term(new)?;
                Program::Ode(eqs, dom.clone())
            }
            (Program::Ode(eqs, _), i) if i == eqs.len() => {
                Program::Ode(eqs.clone(), expect_formula(new)?)
            }
            _ => return None,
        }),
    })
}

/// Position inside a syntax tree: a list of child indices from the root.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Path(Vec<usize>);

impl Path {
    pub fn root() -> Self {
        Path(Vec::new())
    }

    pub fn new(steps: Vec<usize>) -> Self {
        Path(steps)
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Path {
        let mut v = self.0.clone();
        v.push(i);
        Path(v)
    }

    pub fn join(&self, other: &Path) -> Path {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Path(v)
    }

    pub fn parent(&self) -> Option<Path> {
        self.0.split_last().map(|(_, init)| Path(init.to_vec()))
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn parse(text: &str) -> Option<Path> {
        let text = text.trim();
        if text.is_empty() || text == "." {
            return Some(Path::root());
        }
        text.split('.')
            .map(|s| s.parse::<usize>().ok())
            .collect::<Option<Vec<_>>>()
            .map(Path)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(".");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("path {path} does not address a {expected} position")]
pub struct PathError {
    pub path: Path,
    pub expected: &'static str,
}

/// Replaces the subtree at `path` inside `root` by `new`.
pub fn replace_at(root: ExprRef<'_>, path: &Path, new: Expr) -> Result<Expr, PathError> {
    fn go(node: ExprRef<'_>, steps: &[usize], new: Expr, full: &Path) -> Result<Expr, PathError> {
        let err = |new: &Expr| PathError {
            path: full.clone(),
            expected: new.kind(),
        };
        match steps.split_first() {
            None => {
                if node.kind() == new.kind() {
                    Ok(new)
                } else {
                    Err(err(&new))
                }
            }
            Some((&i, rest)) => {
                let children = node.children();
                let child = *children.get(i).ok_or_else(|| err(&new))?;
                let replaced = go(child, rest, new, full)?;
                let kind = replaced.kind();
                with_child(node, i, replaced).ok_or(PathError {
                    path: full.clone(),
                    expected: kind,
                })
            }
        }
    }
    go(root, path.steps(), new, path)
}

impl Formula {
    pub fn at(&self, path: &Path) -> Option<ExprRef<'_>> {
        ExprRef::Formula(self).at(path)
    }

    pub fn replace_at(&self, path: &Path, new: impl Into<Expr>) -> Result<Formula, PathError> {
        match replace_at(ExprRef::Formula(self), path, new.into())? {
            Expr::Formula(f) => Ok(f),
            _ => Err(PathError {
                path: path.clone(),
                expected: "formula",
            }),
        }
    }
}

impl Program {
    pub fn at(&self, path: &Path) -> Option<ExprRef<'_>> {
        ExprRef::Program(self).at(path)
    }
}

impl Term {
    pub fn at(&self, path: &Path) -> Option<ExprRef<'_>> {
        ExprRef::Term(self).at(path)
    }
}

/// Node-for-node equality; no associativity, commutativity or renaming.
pub fn structural_equal<'a>(a: impl Into<ExprRef<'a>>, b: impl Into<ExprRef<'a>>) -> bool {
    a.into() == b.into()
}

/// Whether the placeholder `.` occurs anywhere.
pub fn contains_dot<'a>(e: impl Into<ExprRef<'a>>) -> bool {
    let e = e.into();
    matches!(e, ExprRef::Term(Term::Dot)) || e.children().into_iter().any(contains_dot)
}

/// All paths (pre-order) whose subtree satisfies `pred`.
pub fn find_paths<'a>(root: ExprRef<'a>, pred: &mut dyn FnMut(ExprRef<'a>) -> bool) -> Vec<Path> {
    fn go<'a>(
        node: ExprRef<'a>,
        here: &mut Vec<usize>,
        pred: &mut dyn FnMut(ExprRef<'a>) -> bool,
        out: &mut Vec<Path>,
    ) {
        if pred(node) {
            out.push(Path(here.clone()));
        }
        for (i, c) in node.children().into_iter().enumerate() {
            here.push(i);
            go(c, here, pred, out);
            here.pop();
        }
    }
    let mut out = Vec::new();
    go(root, &mut Vec::new(), pred, &mut out);
    out
}
