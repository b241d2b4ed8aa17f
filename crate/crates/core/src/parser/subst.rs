//! Substitution text: `f() ~> x+1; p(.) ~> .>5; a{} ~> ctrl; P ~> x>y;`.
//!
//! A head `name()` or `name(.)` is a function symbol when its replacement
//! parses as a term and a predicate symbol otherwise; `func`/`pred` prefixes
//! force the choice. A bare `name` is a nullary predicate and `name{}` a
//! program constant.

use super::lexer::Tok;
use super::{PResult, ParseError, Parser};
use crate::statics::Symbol;
use crate::usubst::{Replacement, UniformSubstitution};

pub fn parse_substitution(input: &str) -> PResult<UniformSubstitution> {
    let mut p = Parser::new(input)?;
    let mut sigma = UniformSubstitution::new();
    while !p.at_eof() {
        let start = p.span();
        let (sym, r) = entry(&mut p)?;
        sigma.insert(sym, r).map_err(|e| ParseError {
            span: start,
            message: e.to_string(),
        })?;
    }
    Ok(sigma)
}

#[derive(PartialEq)]
enum Force {
    Func,
    Pred,
    None,
}

fn entry(p: &mut Parser) -> PResult<(Symbol, Replacement)> {
    let mut force = Force::None;
    if matches!(p.peek_at(1), Tok::Ident(_)) {
        match p.peek() {
            Tok::Ident(k) if k == "func" => force = Force::Func,
            Tok::Ident(k) if k == "pred" => force = Force::Pred,
            _ => {}
        }
        if force != Force::None {
            p.bump();
        }
    }
    let name = p.ident()?;
    if p.eat(&Tok::LBrace) {
        p.expect(&Tok::RBrace, "`}`")?;
        p.expect(&Tok::Squiggle, "`~>`")?;
        let prog = p.program()?;
        p.eat(&Tok::Semi);
        return Ok((Symbol::program(&name), Replacement::Program(prog)));
    }
    let arity = if p.eat(&Tok::LParen) {
        let a = u8::from(p.eat(&Tok::Dot));
        p.expect(&Tok::RParen, "`)`")?;
        Some(a)
    } else {
        None
    };
    p.expect(&Tok::Squiggle, "`~>`")?;
    let Some(arity) = arity else {
        let f = p.formula()?;
        p.terminator("`;`")?;
        return Ok((Symbol::predicate(&name, 0), Replacement::Formula(f)));
    };
    if force != Force::Pred {
        let mark = p.mark();
        match p.term() {
            Ok(t) if matches!(p.peek(), Tok::Semi | Tok::Eof) => {
                p.eat(&Tok::Semi);
                return Ok((Symbol::function(&name, arity), Replacement::Term(t)));
            }
            Err(e) if force == Force::Func => return Err(e),
            _ if force == Force::Func => return p.error("`;`"),
            _ => p.reset(mark),
        }
    }
    let f = p.formula()?;
    p.terminator("`;`")?;
    Ok((Symbol::predicate(&name, arity), Replacement::Formula(f)))
}
