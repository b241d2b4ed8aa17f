//! Uniform substitution and uniform renaming.
//!
//! Substitution is applied in one pass that carries the set of variables
//! bound around the current position. A replacement whose free variables
//! meet that set is a clash, as is plugging an argument whose free variables
//! are bound inside the replacement at a dot position.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::parser::{print_formula, print_program, print_term};
use crate::statics::{
    bound_vars, must_bound_vars, rigid_free_vars, signature, Symbol, SymbolKind, VarSet,
};
use crate::syntax::{contains_dot, Expr, ExprRef, Formula, Program, Term, Variable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Replacement {
    Term(Term),
    Formula(Formula),
    Program(Program),
}

impl Replacement {
    pub fn as_ref(&self) -> ExprRef<'_> {
        match self {
            Replacement::Term(t) => t.into(),
            Replacement::Formula(f) => f.into(),
            Replacement::Program(p) => p.into(),
        }
    }
}

impl fmt::Display for Replacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Replacement::Term(t) => f.write_str(&print_term(t)),
            Replacement::Formula(x) => f.write_str(&print_formula(x)),
            Replacement::Program(p) => f.write_str(&print_program(p)),
        }
    }
}

/// A finite map from placeholder symbols to replacements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UniformSubstitution {
    map: BTreeMap<Symbol, Replacement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("substitution clash: replacing {symbol} would bind free variable {variable} at {binder}")]
pub struct ClashError {
    pub symbol: String,
    pub variable: Variable,
    pub binder: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error(transparent)]
    Clash(#[from] ClashError),
    #[error("ill-formed substitution: {0}")]
    IllFormed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("cannot rename {from} to {to}: {to} already occurs")]
pub struct RenameError {
    pub from: Variable,
    pub to: Variable,
}

impl UniformSubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Replacement)> {
        self.map.iter()
    }

    pub fn get(&self, s: &Symbol) -> Option<&Replacement> {
        self.map.get(s)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Symbol> {
        self.map.keys()
    }

    /// Adds an entry, checking that its kind and arity fit the replacement.
    /// An entry mapping a symbol to itself changes nothing and is dropped.
    pub fn insert(&mut self, sym: Symbol, r: Replacement) -> Result<(), SubstError> {
        let ok = matches!(
            (&sym.kind, &r),
            (SymbolKind::Function { .. }, Replacement::Term(_))
                | (SymbolKind::Predicate { .. }, Replacement::Formula(_))
                | (SymbolKind::Program, Replacement::Program(_))
        );
        if !ok {
            return Err(SubstError::IllFormed(format!(
                "{sym} cannot be replaced by `{r}`"
            )));
        }
        if sym.arity() > 1 {
            return Err(SubstError::IllFormed(format!("{sym} has arity above one")));
        }
        if sym.arity() == 0 && contains_dot(r.as_ref()) {
            return Err(SubstError::IllFormed(format!(
                "replacement for nullary {sym} mentions the dot"
            )));
        }
        if self.map.contains_key(&sym) {
            return Err(SubstError::IllFormed(format!("{sym} is mapped twice")));
        }
        if is_identity(&sym, &r) {
            return Ok(());
        }
        self.map.insert(sym, r);
        Ok(())
    }

    pub fn function(mut self, name: &str, arity: u8, t: Term) -> Result<Self, SubstError> {
        self.insert(Symbol::function(name, arity), Replacement::Term(t))?;
        Ok(self)
    }

    pub fn predicate(mut self, name: &str, arity: u8, f: Formula) -> Result<Self, SubstError> {
        self.insert(Symbol::predicate(name, arity), Replacement::Formula(f))?;
        Ok(self)
    }

    pub fn program(mut self, name: &str, p: Program) -> Result<Self, SubstError> {
        self.insert(Symbol::program(name), Replacement::Program(p))?;
        Ok(self)
    }

    /// Replacements must not mention symbols that are themselves replaced.
    pub fn validate(&self) -> Result<(), SubstError> {
        for (sym, r) in &self.map {
            if let Some(s) = signature(r.as_ref())
                .into_iter()
                .find(|s| self.map.contains_key(s))
            {
                return Err(SubstError::IllFormed(format!(
                    "replacement for {sym} mentions {s}, which is also replaced"
                )));
            }
        }
        Ok(())
    }
}

fn is_identity(sym: &Symbol, r: &Replacement) -> bool {
    let arg = (sym.arity() == 1).then_some(Term::Dot);
    match (&sym.kind, r) {
        (SymbolKind::Function { .. }, Replacement::Term(Term::Func(n, a))) => {
            **n == *sym.name && a.as_deref() == arg.as_ref()
        }
        (SymbolKind::Predicate { .. }, Replacement::Formula(Formula::Pred(n, a))) => {
            **n == *sym.name && a.as_ref() == arg.as_ref()
        }
        (SymbolKind::Program, Replacement::Program(Program::Const(n))) => **n == *sym.name,
        _ => false,
    }
}

impl fmt::Display for UniformSubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (sym, r) in &self.map {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            // A formula that also reads as a term needs an explicit kind.
            if matches!(r, Replacement::Formula(_))
                && sym.arity() == 1
                && crate::parser::parse_term(&r.to_string()).is_ok()
            {
                f.write_str("pred ")?;
            }
            write!(f, "{sym} ~> {r}")?;
            if !matches!(r, Replacement::Program(_)) {
                f.write_str(";")?;
            }
        }
        Ok(())
    }
}

/// How nullary predicate symbols of the target are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Every symbol is rigid; nullary predicates are constants.
    Rigid,
    /// Nullary predicates of the target are predicationals whose
    /// replacements may read any variable. Used only for axiom schemas.
    Schema,
}

pub fn apply_usubst<'a>(
    sigma: &UniformSubstitution,
    e: impl Into<ExprRef<'a>>,
) -> Result<Expr, SubstError> {
    apply_with_mode(sigma, e.into(), Mode::Rigid)
}

pub fn apply_formula(sigma: &UniformSubstitution, f: &Formula) -> Result<Formula, SubstError> {
    sigma.validate()?;
    Applier::new(sigma, Mode::Rigid).formula(f)
}

pub fn apply_program(sigma: &UniformSubstitution, p: &Program) -> Result<Program, SubstError> {
    sigma.validate()?;
    Applier::new(sigma, Mode::Rigid).program(p)
}

pub fn apply_term(sigma: &UniformSubstitution, t: &Term) -> Result<Term, SubstError> {
    sigma.validate()?;
    Applier::new(sigma, Mode::Rigid).term(t)
}

/// Applies `sigma` reading nullary predicate symbols of `f` as
/// predicationals, so `P ~> z>0` may be plugged in under binders of `z`.
/// This is textual instantiation for testing and refutation; the kernel
/// never uses it outside axiom schemas.
pub fn apply_predicational(
    sigma: &UniformSubstitution,
    f: &Formula,
) -> Result<Formula, SubstError> {
    apply_with_mode(sigma, f.into(), Mode::Schema).map(Expr::into_formula)
}

pub(crate) fn apply_with_mode(
    sigma: &UniformSubstitution,
    e: ExprRef<'_>,
    mode: Mode,
) -> Result<Expr, SubstError> {
    sigma.validate()?;
    let mut a = Applier::new(sigma, mode);
    Ok(match e {
        ExprRef::Term(t) => Expr::Term(a.term(t)?),
        ExprRef::Formula(f) => Expr::Formula(a.formula(f)?),
        ExprRef::Program(p) => Expr::Program(a.program(p)?),
    })
}

/// Replaces every dot in `target` by `arg`, failing if a free variable of
/// `arg` would be bound inside `target`.
pub fn plug_dot<'a>(
    target: impl Into<ExprRef<'a>>,
    arg: &Term,
    symbol: &str,
) -> Result<Expr, ClashError> {
    let empty = UniformSubstitution::new();
    let mut a = Applier::new(&empty, Mode::Rigid);
    a.dot = Some(Plug {
        arg,
        fv: rigid_free_vars(arg),
        symbol: symbol.to_string(),
    });
    let out = match target.into() {
        ExprRef::Term(t) => a.term(t).map(Expr::Term),
        ExprRef::Formula(f) => a.formula(f).map(Expr::Formula),
        ExprRef::Program(p) => a.program(p).map(Expr::Program),
    };
    out.map_err(|e| match e {
        SubstError::Clash(c) => c,
        SubstError::IllFormed(m) => unreachable!("empty substitution is well-formed: {m}"),
    })
}

enum Frame {
    Quantifier(Variable),
    Program(Program),
    Loop(Program),
    Ode,
}

struct Plug<'t> {
    arg: &'t Term,
    fv: VarSet,
    symbol: String,
}

struct Applier<'s, 't> {
    sigma: &'s UniformSubstitution,
    mode: Mode,
    frames: Vec<(VarSet, Frame)>,
    dot: Option<Plug<'t>>,
}

impl<'s, 't> Applier<'s, 't> {
    fn new(sigma: &'s UniformSubstitution, mode: Mode) -> Self {
        Applier {
            sigma,
            mode,
            frames: Vec::new(),
            dot: None,
        }
    }

    fn with_frame<T>(
        &mut self,
        vars: VarSet,
        frame: Frame,
        f: impl FnOnce(&mut Self) -> Result<T, SubstError>,
    ) -> Result<T, SubstError> {
        self.frames.push((vars, frame));
        let out = f(self);
        self.frames.pop();
        out
    }

    /// Fails if some variable of `fv` is bound by an enclosing frame.
    fn check(&self, fv: &VarSet, symbol: &str) -> Result<(), ClashError> {
        for (bound, frame) in self.frames.iter().rev() {
            if !bound.intersects(fv) {
                continue;
            }
            let variable = bound.common(fv).unwrap_or_else(|| Variable::new("*"));
            return Err(ClashError {
                symbol: symbol.to_string(),
                binder: describe_binder(frame, &variable),
                variable,
            });
        }
        Ok(())
    }

    fn term(&mut self, t: &Term) -> Result<Term, SubstError> {
        Ok(match t {
            Term::Var(_) | Term::Num(_) => t.clone(),
            Term::Dot => match &self.dot {
                Some(plug) => {
                    self.check(&plug.fv, &plug.symbol)?;
                    plug.arg.clone()
                }
                None => Term::Dot,
            },
            Term::Plus(a, b) => Term::plus(self.term(a)?, self.term(b)?),
            Term::Minus(a, b) => Term::minus(self.term(a)?, self.term(b)?),
            Term::Times(a, b) => Term::times(self.term(a)?, self.term(b)?),
            Term::Neg(a) => Term::neg(self.term(a)?),
            Term::Power(a, n) => Term::power(self.term(a)?, *n),
            Term::Func(name, arg) => {
                let arg = arg.as_deref().map(|a| self.term(a)).transpose()?;
                let sym = Symbol::function(name, arg.is_some() as u8);
                match self.sigma.get(&sym) {
                    Some(Replacement::Term(r)) => {
                        let r = r.clone();
                        self.check(&rigid_free_vars(&r), &sym.to_string())?;
                        match arg {
                            Some(a) => plug_dot(&r, &a, &sym.to_string())?.into_term(),
                            None => r,
                        }
                    }
                    _ => Term::Func(name.clone(), arg.map(Box::new)),
                }
            }
        })
    }

    fn formula(&mut self, f: &Formula) -> Result<Formula, SubstError> {
        Ok(match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Cmp(op, a, b) => Formula::Cmp(*op, self.term(a)?, self.term(b)?),
            Formula::Not(a) => Formula::not(self.formula(a)?),
            Formula::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            Formula::Or(a, b) => Formula::or(self.formula(a)?, self.formula(b)?),
            Formula::Implies(a, b) => Formula::implies(self.formula(a)?, self.formula(b)?),
            Formula::Equiv(a, b) => Formula::equiv(self.formula(a)?, self.formula(b)?),
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let body = self.with_frame(
                    VarSet::singleton(x.clone()),
                    Frame::Quantifier(x.clone()),
                    |s| s.formula(a),
                )?;
                if matches!(f, Formula::Forall(..)) {
                    Formula::Forall(x.clone(), Box::new(body))
                } else {
                    Formula::Exists(x.clone(), Box::new(body))
                }
            }
            Formula::Box(p, a) | Formula::Diamond(p, a) => {
                let p2 = self.program(p)?;
                let post = self.with_frame(bound_vars(&p2), Frame::Program(p2.clone()), |s| {
                    s.formula(a)
                })?;
                if matches!(f, Formula::Box(..)) {
                    Formula::boxed(p2, post)
                } else {
                    Formula::diamond(p2, post)
                }
            }
            Formula::Pred(name, arg) => {
                let arg = arg.as_ref().map(|a| self.term(a)).transpose()?;
                let sym = Symbol::predicate(name, arg.is_some() as u8);
                match self.sigma.get(&sym) {
                    Some(Replacement::Formula(r)) => {
                        let r = r.clone();
                        let predicational = arg.is_none() && self.mode == Mode::Schema;
                        if !predicational {
                            self.check(&rigid_free_vars(&r), &sym.to_string())?;
                        }
                        match arg {
                            Some(a) => plug_dot(&r, &a, &sym.to_string())?.into_formula(),
                            None => r,
                        }
                    }
                    _ => Formula::Pred(name.clone(), arg),
                }
            }
        })
    }

    fn program(&mut self, p: &Program) -> Result<Program, SubstError> {
        Ok(match p {
            Program::Assign(x, e) => Program::Assign(x.clone(), self.term(e)?),
            Program::Test(q) => Program::Test(self.formula(q)?),
            Program::Choice(a, b) => Program::choice(self.program(a)?, self.program(b)?),
            Program::Seq(a, b) => {
                let a2 = self.program(a)?;
                let b2 = self.with_frame(bound_vars(&a2), Frame::Program(a2.clone()), |s| {
                    s.program(b)
                })?;
                Program::seq(a2, b2)
            }
            Program::Repeat(a) => {
                let body = self.loop_body(p, a)?;
                Program::repeat(body)
            }
            Program::While(q, a) => {
                let body = self.loop_body(p, a)?;
                let bv = bound_vars(&body);
                let guard = self.with_frame(bv, Frame::Loop(body.clone()), |s| s.formula(q))?;
                Program::while_loop(guard, body)
            }
            Program::If(q, a, b) => {
                let q = self.formula(q)?;
                let a = self.program(a)?;
                let b = b.as_deref().map(|b| self.program(b)).transpose()?;
                Program::if_then(q, a, b)
            }
            Program::Ode(eqs, dom) => {
                let lhs = VarSet::from_vars(eqs.iter().map(|(x, _)| x.clone()));
                self.with_frame(lhs, Frame::Ode, |s| {
                    let mut out = Vec::with_capacity(eqs.len());
                    for (x, e) in eqs {
                        out.push((x.clone(), s.term(e)?));
                    }
                    let dom = s.formula(dom)?;
                    Ok(Program::Ode(out, dom))
                })?
            }
            Program::Const(name) => match self.sigma.get(&Symbol::program(name)) {
                Some(Replacement::Program(r)) => r.clone(),
                _ => p.clone(),
            },
        })
    }

    /// A loop body is substituted in the context of what the substituted
    /// body itself binds, since it runs after earlier iterations.
    fn loop_body(&mut self, lp: &Program, body: &Program) -> Result<Program, SubstError> {
        let first = self.program(body)?;
        let bv = bound_vars(&first);
        let frame = Frame::Loop(match lp {
            Program::While(q, _) => Program::while_loop(q.clone(), first.clone()),
            _ => Program::repeat(first.clone()),
        });
        self.with_frame(bv, frame, |s| s.program(body))
    }
}

fn describe_binder(frame: &Frame, x: &Variable) -> String {
    match frame {
        Frame::Quantifier(q) => format!("quantifier over {q}"),
        Frame::Ode => "differential equation".to_string(),
        Frame::Program(p) => binder_in(p, x).unwrap_or_else(|| format!("`{}`", print_program(p))),
        Frame::Loop(p) => match binder_in(p, x) {
            Some(b) => format!("{b} inside loop"),
            None => "loop".to_string(),
        },
    }
}

/// The first atomic statement of `p` that writes `x`.
fn binder_in(p: &Program, x: &Variable) -> Option<String> {
    match p {
        Program::Assign(y, _) if y == x => Some(format!("`{}`", print_program(p))),
        Program::Assign(..) | Program::Test(_) => None,
        Program::Ode(eqs, _) if eqs.iter().any(|(y, _)| y == x) => {
            Some(format!("`{}`", print_program(p)))
        }
        Program::Ode(..) => None,
        Program::Const(c) => Some(format!("program {c}")),
        Program::Choice(a, b) | Program::Seq(a, b) => binder_in(a, x).or_else(|| binder_in(b, x)),
        Program::Repeat(a) | Program::While(_, a) => binder_in(a, x),
        Program::If(_, a, b) => {
            binder_in(a, x).or_else(|| b.as_deref().and_then(|b| binder_in(b, x)))
        }
    }
}

/// Renames every occurrence of `x`, free or bound, to `y`.
pub fn uniform_rename<'a>(
    x: &Variable,
    y: &Variable,
    e: impl Into<ExprRef<'a>>,
) -> Result<Expr, RenameError> {
    let e = e.into();
    if x == y {
        return Ok(e.to_owned());
    }
    if crate::statics::all_vars(e).contains(y) {
        return Err(RenameError {
            from: x.clone(),
            to: y.clone(),
        });
    }
    Ok(rename_expr(e, x, y))
}

pub fn rename_formula(x: &Variable, y: &Variable, f: &Formula) -> Result<Formula, RenameError> {
    uniform_rename(x, y, f).map(Expr::into_formula)
}

fn rename_var(v: &Variable, x: &Variable, y: &Variable) -> Variable {
    if v == x {
        y.clone()
    } else {
        v.clone()
    }
}

fn rename_expr(e: ExprRef<'_>, x: &Variable, y: &Variable) -> Expr {
    match e {
        ExprRef::Term(t) => Expr::Term(rename_term(t, x, y)),
        ExprRef::Formula(f) => Expr::Formula(rename_f(f, x, y)),
        ExprRef::Program(p) => Expr::Program(rename_p(p, x, y)),
    }
}

fn rename_term(t: &Term, x: &Variable, y: &Variable) -> Term {
    let r = |t: &Term| rename_term(t, x, y);
    match t {
        Term::Var(v) => Term::Var(rename_var(v, x, y)),
        Term::Num(_) | Term::Dot => t.clone(),
        Term::Plus(a, b) => Term::plus(r(a), r(b)),
        Term::Minus(a, b) => Term::minus(r(a), r(b)),
        Term::Times(a, b) => Term::times(r(a), r(b)),
        Term::Neg(a) => Term::neg(r(a)),
        Term::Power(a, n) => Term::power(r(a), *n),
        Term::Func(f, a) => Term::Func(f.clone(), a.as_deref().map(|a| Box::new(r(a)))),
    }
}

fn rename_f(f: &Formula, x: &Variable, y: &Variable) -> Formula {
    let r = |f: &Formula| rename_f(f, x, y);
    let t = |e: &Term| rename_term(e, x, y);
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Cmp(op, a, b) => Formula::Cmp(*op, t(a), t(b)),
        Formula::Not(a) => Formula::not(r(a)),
        Formula::And(a, b) => Formula::and(r(a), r(b)),
        Formula::Or(a, b) => Formula::or(r(a), r(b)),
        Formula::Implies(a, b) => Formula::implies(r(a), r(b)),
        Formula::Equiv(a, b) => Formula::equiv(r(a), r(b)),
        Formula::Forall(v, a) => Formula::Forall(rename_var(v, x, y), Box::new(r(a))),
        Formula::Exists(v, a) => Formula::Exists(rename_var(v, x, y), Box::new(r(a))),
        Formula::Box(p, a) => Formula::boxed(rename_p(p, x, y), r(a)),
        Formula::Diamond(p, a) => Formula::diamond(rename_p(p, x, y), r(a)),
        Formula::Pred(n, a) => Formula::Pred(n.clone(), a.as_ref().map(t)),
    }
}

fn rename_p(p: &Program, x: &Variable, y: &Variable) -> Program {
    let r = |p: &Program| rename_p(p, x, y);
    match p {
        Program::Assign(v, e) => Program::Assign(rename_var(v, x, y), rename_term(e, x, y)),
        Program::Test(q) => Program::Test(rename_f(q, x, y)),
        Program::Choice(a, b) => Program::choice(r(a), r(b)),
        Program::Seq(a, b) => Program::seq(r(a), r(b)),
        Program::Repeat(a) => Program::repeat(r(a)),
        Program::While(q, a) => Program::while_loop(rename_f(q, x, y), r(a)),
        Program::If(q, a, b) => Program::if_then(rename_f(q, x, y), r(a), b.as_deref().map(r)),
        Program::Ode(eqs, dom) => Program::Ode(
            eqs.iter()
                .map(|(v, e)| (rename_var(v, x, y), rename_term(e, x, y)))
                .collect(),
            rename_f(dom, x, y),
        ),
        Program::Const(_) => p.clone(),
    }
}

/// Replaces by dots exactly the occurrences of `x` that are free, so that
/// `x` is no longer a free variable of the result (unless a program
/// constant or differential equation reads it).
pub fn abstract_free(f: &Formula, x: &Variable) -> Formula {
    abs_f(f, x, false)
}

fn abs_t(t: &Term, x: &Variable, bound: bool) -> Term {
    if bound {
        return t.clone();
    }
    let r = |t: &Term| abs_t(t, x, bound);
    match t {
        Term::Var(v) if v == x => Term::Dot,
        Term::Var(_) | Term::Num(_) | Term::Dot => t.clone(),
        Term::Plus(a, b) => Term::plus(r(a), r(b)),
        Term::Minus(a, b) => Term::minus(r(a), r(b)),
        Term::Times(a, b) => Term::times(r(a), r(b)),
        Term::Neg(a) => Term::neg(r(a)),
        Term::Power(a, n) => Term::power(r(a), *n),
        Term::Func(n, a) => Term::Func(n.clone(), a.as_deref().map(|a| Box::new(r(a)))),
    }
}

fn abs_f(f: &Formula, x: &Variable, bound: bool) -> Formula {
    let r = |f: &Formula| abs_f(f, x, bound);
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Cmp(op, a, b) => Formula::Cmp(*op, abs_t(a, x, bound), abs_t(b, x, bound)),
        Formula::Not(a) => Formula::not(r(a)),
        Formula::And(a, b) => Formula::and(r(a), r(b)),
        Formula::Or(a, b) => Formula::or(r(a), r(b)),
        Formula::Implies(a, b) => Formula::implies(r(a), r(b)),
        Formula::Equiv(a, b) => Formula::equiv(r(a), r(b)),
        Formula::Forall(v, a) => Formula::Forall(v.clone(), Box::new(abs_f(a, x, bound || v == x))),
        Formula::Exists(v, a) => Formula::Exists(v.clone(), Box::new(abs_f(a, x, bound || v == x))),
        Formula::Box(p, a) | Formula::Diamond(p, a) => {
            let p2 = abs_p(p, x, bound);
            let a2 = abs_f(a, x, bound || must_bound_vars(p).contains(x));
            if matches!(f, Formula::Box(..)) {
                Formula::boxed(p2, a2)
            } else {
                Formula::diamond(p2, a2)
            }
        }
        Formula::Pred(n, a) => Formula::Pred(n.clone(), a.as_ref().map(|t| abs_t(t, x, bound))),
    }
}

fn abs_p(p: &Program, x: &Variable, bound: bool) -> Program {
    let r = |p: &Program| abs_p(p, x, bound);
    match p {
        Program::Assign(v, e) => Program::Assign(v.clone(), abs_t(e, x, bound)),
        Program::Test(q) => Program::Test(abs_f(q, x, bound)),
        Program::Choice(a, b) => Program::choice(r(a), r(b)),
        Program::Seq(a, b) => {
            Program::seq(r(a), abs_p(b, x, bound || must_bound_vars(a).contains(x)))
        }
        Program::Repeat(a) => Program::repeat(r(a)),
        Program::While(q, a) => Program::while_loop(abs_f(q, x, bound), r(a)),
        Program::If(q, a, b) => Program::if_then(abs_f(q, x, bound), r(a), b.as_deref().map(r)),
        Program::Ode(eqs, dom) => Program::Ode(
            eqs.iter()
                .map(|(v, e)| (v.clone(), abs_t(e, x, bound)))
                .collect(),
            abs_f(dom, x, bound),
        ),
        Program::Const(_) => p.clone(),
    }
}
