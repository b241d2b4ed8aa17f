//! ASCII concrete syntax: recursive-descent parsing and pretty printing.
//!
//! Term precedence: `^` > unary `-` > `*` > binary `+`/`-`, all binary
//! operators left-associative. Formula precedence, tightest first:
//! `!`/quantifiers/modalities, `&`, `|`, `->` (right-associative), `<->`.
//! Program statements are `;`-terminated and sequencing associates to the
//! right.

mod lexer;
mod printer;
mod subst;

use std::fmt;
use std::sync::Arc;

use num::BigRational;

use crate::syntax::{CmpOp, Formula, Program, Term, Variable};
use lexer::{tokenize, Tok, Token, RESERVED};

pub use printer::{pretty_print, print_formula, print_program, print_term};
pub use subst::parse_substitution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at {}..{}: {}",
            self.span.start, self.span.end, self.message
        )
    }
}

pub type PResult<T> = Result<T, ParseError>;

pub fn parse_term(input: &str) -> PResult<Term> {
    let mut p = Parser::new(input)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_formula(input: &str) -> PResult<Formula> {
    let mut p = Parser::new(input)?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

pub fn parse_program(input: &str) -> PResult<Program> {
    let mut p = Parser::new(input)?;
    let prog = p.program()?;
    p.expect_eof()?;
    Ok(prog)
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(input: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(input)?,
            pos: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub(crate) fn mark(&self) -> usize {
        self.pos
    }

    pub(crate) fn reset(&mut self, mark: usize) {
        self.pos = mark;
    }

    pub(crate) fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(ParseError {
            span: self.span(),
            message: format!("expected {expected}, found {}", self.peek().describe()),
        })
    }

    pub(crate) fn expect(&mut self, t: &Tok, expected: &str) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.error(expected)
        }
    }

    pub(crate) fn expect_eof(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.error("identifier"),
        }
    }

    fn peek_ident(&self) -> Option<&str> {
        match self.peek() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => Some(s),
            _ => None,
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    // ----- terms -----

    pub(crate) fn term(&mut self) -> PResult<Term> {
        let mut lhs = self.product()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = Term::plus(lhs, self.product()?);
            } else if self.eat(&Tok::Minus) {
                lhs = Term::minus(lhs, self.product()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let mut lhs = self.negation()?;
        while self.eat(&Tok::Star) {
            lhs = Term::times(lhs, self.negation()?);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> PResult<Term> {
        if self.eat(&Tok::Minus) {
            Ok(Term::neg(self.negation()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> PResult<Term> {
        let base = self.primary()?;
        if self.eat(&Tok::Caret) {
            match self.peek().clone() {
                Tok::Num(n) => {
                    let exp: u32 = match u32::try_from(&n) {
                        Ok(e) if e >= 1 => e,
                        _ => return self.error("positive exponent"),
                    };
                    self.bump();
                    Ok(Term::power(base, exp))
                }
                _ => self.error("natural-number exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Term::Num(BigRational::from_integer(n)))
            }
            Tok::Dot => {
                self.bump();
                Ok(Term::Dot)
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(_) if self.peek_ident().is_some() => {
                let name = self.ident()?;
                if self.eat(&Tok::LParen) {
                    if self.eat(&Tok::RParen) {
                        return Ok(Term::Func(Arc::from(name.as_str()), None));
                    }
                    let arg = self.term()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(Term::Func(Arc::from(name.as_str()), Some(Box::new(arg))))
                } else {
                    Ok(Term::Var(Variable::new(&name)))
                }
            }
            _ => self.error("term"),
        }
    }

    // ----- formulas -----

    pub(crate) fn formula(&mut self) -> PResult<Formula> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::DArrow) {
            lhs = Formula::equiv(lhs, self.implication()?);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            Ok(Formula::implies(lhs, self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Amp) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Forall | Tok::Exists => {
                let is_forall = *self.peek() == Tok::Forall;
                self.bump();
                let x = Variable::new(&self.ident()?);
                let body = Box::new(self.unary()?);
                Ok(if is_forall {
                    Formula::Forall(x, body)
                } else {
                    Formula::Exists(x, body)
                })
            }
            Tok::LBracket => {
                self.bump();
                let p = self.program()?;
                self.expect(&Tok::RBracket, "`]`")?;
                Ok(Formula::boxed(p, self.unary()?))
            }
            Tok::Less => {
                self.bump();
                let p = self.program()?;
                self.expect(&Tok::Greater, "`>`")?;
                Ok(Formula::diamond(p, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        Some(match self.peek() {
            Tok::Less => CmpOp::Less,
            Tok::LessEq => CmpOp::LessEq,
            Tok::Eq => CmpOp::Equal,
            Tok::GreaterEq => CmpOp::GreaterEq,
            Tok::Greater => CmpOp::Greater,
            _ => return None,
        })
    }

    fn atom(&mut self) -> PResult<Formula> {
        if self.is_keyword("true") {
            self.bump();
            return Ok(Formula::True);
        }
        if self.is_keyword("false") {
            self.bump();
            return Ok(Formula::False);
        }
        // Comparison first; once the operator is seen we commit.
        let save = self.pos;
        let term_err = match self.term() {
            Ok(lhs) => match self.cmp_op() {
                Some(op) => {
                    self.bump();
                    let rhs = self.term()?;
                    return Ok(Formula::Cmp(op, lhs, rhs));
                }
                None => self.error::<()>("comparison operator").unwrap_err(),
            },
            Err(e) => e,
        };
        self.pos = save;
        match self.peek() {
            Tok::LParen => {
                self.bump();
                match self
                    .formula()
                    .and_then(|f| self.expect(&Tok::RParen, "`)`").map(|_| f))
                {
                    Ok(f) => Ok(f),
                    Err(e) if e.span.start >= term_err.span.start => Err(e),
                    Err(_) => Err(term_err),
                }
            }
            Tok::Ident(_) if self.peek_ident().is_some() => {
                let name = self.ident()?;
                if self.eat(&Tok::LParen) {
                    if self.eat(&Tok::RParen) {
                        return Ok(Formula::Pred(Arc::from(name.as_str()), None));
                    }
                    let arg = self.term()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(Formula::Pred(Arc::from(name.as_str()), Some(arg)))
                } else {
                    Ok(Formula::Pred(Arc::from(name.as_str()), None))
                }
            }
            _ => Err(term_err),
        }
    }

    // ----- programs -----

    pub(crate) fn program(&mut self) -> PResult<Program> {
        let lhs = self.sequence()?;
        if self.eat(&Tok::ChoiceOp) {
            Ok(Program::choice(lhs, self.program()?))
        } else {
            Ok(lhs)
        }
    }

    pub(crate) fn at_statement_start(&self) -> bool {
        match self.peek() {
            Tok::Question | Tok::LBrace => true,
            Tok::Ident(s) if s == "while" || s == "if" => true,
            Tok::Ident(_) if self.peek_ident().is_some() => {
                matches!(self.peek_at(1), Tok::Assign | Tok::Semi)
            }
            _ => false,
        }
    }

    fn sequence(&mut self) -> PResult<Program> {
        let first = self.statement()?;
        if self.at_statement_start() {
            Ok(Program::seq(first, self.sequence()?))
        } else {
            Ok(first)
        }
    }

    /// `;` ends a statement; it may be left out before a closing delimiter.
    pub(crate) fn terminator(&mut self, what: &str) -> PResult<()> {
        if self.eat(&Tok::Semi) {
            return Ok(());
        }
        match self.peek() {
            Tok::RBracket | Tok::RBrace | Tok::Greater | Tok::ChoiceOp | Tok::Eof => Ok(()),
            _ => self.error(what),
        }
    }

    fn block(&mut self) -> PResult<Program> {
        self.expect(&Tok::LBrace, "`{`")?;
        let p = self.program()?;
        self.expect(&Tok::RBrace, "`}`")?;
        Ok(p)
    }

    fn statement(&mut self) -> PResult<Program> {
        if self.eat(&Tok::Question) {
            let q = self.formula()?;
            self.terminator("`;`")?;
            return Ok(Program::Test(q));
        }
        if self.is_keyword("while") {
            self.bump();
            self.expect(&Tok::LParen, "`(`")?;
            let q = self.formula()?;
            self.expect(&Tok::RParen, "`)`")?;
            let body = self.block()?;
            self.eat(&Tok::Semi);
            return Ok(Program::while_loop(q, body));
        }
        if self.is_keyword("if") {
            self.bump();
            self.expect(&Tok::LParen, "`(`")?;
            let q = self.formula()?;
            self.expect(&Tok::RParen, "`)`")?;
            let then = self.block()?;
            let otherwise = if self.is_keyword("else") {
                self.bump();
                Some(self.block()?)
            } else {
                None
            };
            self.eat(&Tok::Semi);
            return Ok(Program::if_then(q, then, otherwise));
        }
        if *self.peek() == Tok::LBrace {
            if matches!(self.peek_at(1), Tok::Ident(_)) && *self.peek_at(2) == Tok::Prime {
                return self.ode();
            }
            let body = self.block()?;
            let p = if self.eat(&Tok::Star) {
                Program::repeat(body)
            } else {
                body
            };
            self.eat(&Tok::Semi);
            return Ok(p);
        }
        if self.peek_ident().is_some() {
            let name = self.ident()?;
            if self.eat(&Tok::Assign) {
                let e = self.term()?;
                self.terminator("`;`")?;
                return Ok(Program::Assign(Variable::new(&name), e));
            }
            self.terminator("`:=` or `;`")?;
            return Ok(Program::Const(Arc::from(name.as_str())));
        }
        self.error("program statement")
    }

    fn ode(&mut self) -> PResult<Program> {
        let open = self.span();
        self.expect(&Tok::LBrace, "`{`")?;
        let mut eqs: Vec<(Variable, Term)> = Vec::new();
        loop {
            let at = self.span();
            let x = Variable::new(&self.ident()?);
            self.expect(&Tok::Prime, "`'`")?;
            self.expect(&Tok::Eq, "`=`")?;
            let rhs = self.term()?;
            if eqs.iter().any(|(y, _)| *y == x) {
                return Err(ParseError {
                    span: at,
                    message: format!("duplicate differential equation for `{x}`"),
                });
            }
            eqs.push((x, rhs));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        let domain = if self.eat(&Tok::Amp) {
            self.formula()?
        } else {
            Formula::True
        };
        self.expect(&Tok::RBrace, "`}`")?;
        self.eat(&Tok::Semi);
        Program::ode(eqs, domain).ok_or(ParseError {
            span: open,
            message: "malformed differential equation".to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{num, var};

    fn a2b() -> Term {
        Term::plus(Term::power(var("a"), 2), var("b"))
    }

    #[test]
    fn terms() {
        assert_eq!(parse_term("a^2+b").unwrap(), a2b());
        assert_eq!(parse_term("x").unwrap(), var("x"));
        assert_eq!(
            parse_term("z+y^2*x").unwrap(),
            Term::plus(var("z"), Term::times(Term::power(var("y"), 2), var("x")))
        );
        assert_eq!(
            parse_term("-x^2").unwrap(),
            Term::neg(Term::power(var("x"), 2))
        );
        assert_eq!(
            parse_term("a-b-c").unwrap(),
            Term::minus(Term::minus(var("a"), var("b")), var("c"))
        );
        assert_eq!(parse_term("f()").unwrap(), Term::func("f", None));
        assert_eq!(
            parse_term("c(.)").unwrap(),
            Term::func("c", Some(Term::Dot))
        );
    }

    #[test]
    fn formulas() {
        assert_eq!(
            parse_formula("[x:=x+1]x>5").unwrap(),
            Formula::boxed(
                Program::assign("x", Term::plus(var("x"), num(1))),
                Formula::cmp(CmpOp::Greater, var("x"), num(5))
            )
        );
        assert_eq!(
            parse_formula("x<=m & 0<=v").unwrap(),
            Formula::and(
                Formula::cmp(CmpOp::LessEq, var("x"), var("m")),
                Formula::cmp(CmpOp::LessEq, num(0), var("v"))
            )
        );
        assert_eq!(parse_formula("true").unwrap(), Formula::True);
        let p = Formula::pred("P", None);
        assert_eq!(parse_formula("P").unwrap(), p);
        assert_eq!(parse_formula("P()").unwrap(), p);
        assert_eq!(
            parse_formula("P -> Q -> R").unwrap(),
            Formula::implies(
                p.clone(),
                Formula::implies(Formula::pred("Q", None), Formula::pred("R", None))
            )
        );
        assert_eq!(
            parse_formula("(x>1)").unwrap(),
            Formula::cmp(CmpOp::Greater, var("x"), num(1))
        );
        assert_eq!(
            parse_formula("(a+b)*2>3").unwrap(),
            Formula::cmp(
                CmpOp::Greater,
                Term::times(Term::plus(var("a"), var("b")), num(2)),
                num(3)
            )
        );
        assert_eq!(
            parse_formula("<x:=1;>x>0").unwrap(),
            Formula::diamond(
                Program::assign("x", num(1)),
                Formula::cmp(CmpOp::Greater, var("x"), num(0))
            )
        );
        assert!(matches!(
            parse_formula("\\forall x x>0").unwrap(),
            Formula::Forall(_, _)
        ));
    }

    #[test]
    fn programs() {
        let ex1 = parse_program("{a:=A; ++ a:=-b;}{x'=v,v'=a & v>=0}").unwrap();
        let expected = Program::seq(
            Program::choice(
                Program::assign("a", var("A")),
                Program::assign("a", Term::neg(var("b"))),
            ),
            Program::Ode(
                vec![
                    (Variable::new("x"), var("v")),
                    (Variable::new("v"), var("a")),
                ],
                Formula::cmp(CmpOp::GreaterEq, var("v"), num(0)),
            ),
        );
        assert_eq!(ex1, expected);
        assert_eq!(
            parse_program("ctrl;plant;").unwrap(),
            Program::seq(Program::constant("ctrl"), Program::constant("plant"))
        );
        let w = parse_program("while(y^2<x){z:=z+y^2*x; y:=y+6;}").unwrap();
        match w {
            Program::While(Formula::Cmp(CmpOp::Less, _, _), body) => {
                assert!(matches!(*body, Program::Seq(_, _)))
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_program("{x:=x+1;}*").unwrap(),
            Program::Repeat(_)
        ));
        assert!(matches!(
            parse_program("if(x>0){x:=1;}").unwrap(),
            Program::If(_, _, None)
        ));
    }

    #[test]
    fn errors_carry_spans() {
        let err = parse_formula("[x:=]x>0").unwrap_err();
        assert_eq!(err.span.start, 4);
        assert!(parse_formula("").is_err());
        assert!(parse_program("{x'=1,x'=2}").is_err());
        assert!(parse_term("x^0").is_err());
        assert!(parse_formula("x>").is_err());
    }
}
