use std::fmt::Write;

use num::{One, Signed};

use crate::syntax::{ExprRef, Formula, Program, Term};

pub fn pretty_print<'a>(e: impl Into<ExprRef<'a>>) -> String {
    match e.into() {
        ExprRef::Term(t) => print_term(t),
        ExprRef::Formula(f) => print_formula(f),
        ExprRef::Program(p) => print_program(p),
    }
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    term(&mut s, t, 0);
    s
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    formula(&mut s, f, 0);
    s
}

pub fn print_program(p: &Program) -> String {
    let mut s = String::new();
    program(&mut s, p);
    s
}

// Term levels: 0 sum, 1 product, 2 negation, 3 power, 4 primary.
fn term_level(t: &Term) -> u8 {
    match t {
        Term::Plus(..) | Term::Minus(..) => 0,
        Term::Times(..) => 1,
        Term::Neg(_) => 2,
        Term::Power(..) => 3,
        Term::Num(n) if n.is_negative() || !n.denom().is_one() => 2,
        _ => 4,
    }
}

fn term(out: &mut String, t: &Term, min: u8) {
    if term_level(t) < min {
        out.push('(');
        term(out, t, 0);
        out.push(')');
        return;
    }
    match t {
        Term::Var(x) => out.push_str(x.name()),
        Term::Num(n) => {
            if n.is_negative() {
                out.push('-');
            }
            let a = n.abs();
            if a.denom().is_one() {
                let _ = write!(out, "{}", a.numer());
            } else {
                let _ = write!(out, "{}/{}", a.numer(), a.denom());
            }
        }
        Term::Plus(a, b) => {
            term(out, a, 0);
            out.push('+');
            term(out, b, 1);
        }
        Term::Minus(a, b) => {
            term(out, a, 0);
            out.push('-');
            term(out, b, 1);
        }
        Term::Times(a, b) => {
            term(out, a, 1);
            out.push('*');
            term(out, b, 2);
        }
        Term::Neg(a) => {
            out.push('-');
            term(out, a, 2);
        }
        Term::Power(a, n) => {
            term(out, a, 4);
            let _ = write!(out, "^{n}");
        }
        Term::Func(f, arg) => {
            out.push_str(f);
            out.push('(');
            if let Some(a) = arg {
                term(out, a, 0);
            }
            out.push(')');
        }
        Term::Dot => out.push('.'),
    }
}

// Formula levels: 0 equiv, 1 implies, 2 or, 3 and, 4 unary, 5 atom.
fn formula_level(f: &Formula) -> u8 {
    match f {
        Formula::Equiv(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(_)
        | Formula::Forall(..)
        | Formula::Exists(..)
        | Formula::Box(..)
        | Formula::Diamond(..) => 4,
        _ => 5,
    }
}

fn formula(out: &mut String, f: &Formula, min: u8) {
    if formula_level(f) < min {
        out.push('(');
        formula(out, f, 0);
        out.push(')');
        return;
    }
    let binary = |out: &mut String, a: &Formula, op: &str, b: &Formula, l: u8, r: u8| {
        formula(out, a, l);
        out.push_str(op);
        formula(out, b, r);
    };
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Cmp(op, a, b) => {
            term(out, a, 0);
            out.push_str(op.symbol());
            term(out, b, 0);
        }
        Formula::Not(a) => {
            out.push('!');
            formula(out, a, 4);
        }
        Formula::And(a, b) => binary(out, a, " & ", b, 3, 4),
        Formula::Or(a, b) => binary(out, a, " | ", b, 2, 3),
        Formula::Implies(a, b) => binary(out, a, " -> ", b, 2, 1),
        Formula::Equiv(a, b) => binary(out, a, " <-> ", b, 0, 1),
        Formula::Forall(x, a) | Formula::Exists(x, a) => {
            let q = if matches!(f, Formula::Forall(..)) {
                "\\forall"
            } else {
                "\\exists"
            };
            let _ = write!(out, "{q} {x} ");
            formula(out, a, 4);
        }
        Formula::Box(p, a) => {
            out.push('[');
            program(out, p);
            out.push(']');
            formula(out, a, 4);
        }
        Formula::Diamond(p, a) => {
            out.push('<');
            program(out, p);
            out.push('>');
            formula(out, a, 4);
        }
        Formula::Pred(name, arg) => {
            out.push_str(name);
            if let Some(a) = arg {
                out.push('(');
                term(out, a, 0);
                out.push(')');
            }
        }
    }
}

/// Program at choice level (inside `[..]`, `{..}`, loop bodies).
fn program(out: &mut String, p: &Program) {
    match p {
        Program::Choice(a, b) => {
            if matches!(**a, Program::Choice(..)) {
                braced(out, a);
            } else {
                sequence(out, a);
            }
            out.push_str(" ++ ");
            program(out, b);
        }
        _ => sequence(out, p),
    }
}

fn braced(out: &mut String, p: &Program) {
    out.push('{');
    program(out, p);
    out.push('}');
}

/// Program at sequence level: choices need braces.
fn sequence(out: &mut String, p: &Program) {
    match p {
        Program::Choice(..) => braced(out, p),
        Program::Seq(a, b) => {
            if matches!(**a, Program::Seq(..) | Program::Choice(..)) {
                braced(out, a);
            } else {
                statement(out, a);
            }
            sequence(out, b);
        }
        _ => statement(out, p),
    }
}

fn statement(out: &mut String, p: &Program) {
    match p {
        Program::Assign(x, e) => {
            let _ = write!(out, "{x}:=");
            term(out, e, 0);
            out.push(';');
        }
        Program::Test(q) => {
            out.push('?');
            formula(out, q, 0);
            out.push(';');
        }
        Program::Const(c) => {
            out.push_str(c);
            out.push(';');
        }
        Program::Repeat(a) => {
            braced(out, a);
            out.push('*');
        }
        Program::While(q, a) => {
            out.push_str("while(");
            formula(out, q, 0);
            out.push(')');
            braced(out, a);
        }
        Program::If(q, a, b) => {
            out.push_str("if(");
            formula(out, q, 0);
            out.push(')');
            braced(out, a);
            if let Some(b) = b {
                out.push_str("else");
                braced(out, b);
            }
        }
        Program::Ode(eqs, dom) => {
            out.push('{');
            for (i, (x, e)) in eqs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{x}'=");
                term(out, e, 0);
            }
            if *dom != Formula::True {
                out.push_str(" & ");
                formula(out, dom, 0);
            }
            out.push('}');
        }
        Program::Choice(..) | Program::Seq(..) => braced(out, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_program, parse_term};
    use crate::syntax::{num, var};

    #[test]
    fn quiz_rendering() {
        let f = parse_formula("[ctrl;plant;]x>y").unwrap();
        assert_eq!(print_formula(&f), "[ctrl;plant;]x>y");
        let g = parse_formula("[ctrl;][plant;]x>y").unwrap();
        assert_eq!(print_formula(&g), "[ctrl;][plant;]x>y");
        assert_eq!(print_term(&Term::plus(var("x"), num(1))), "x+1");
    }

    #[test]
    fn minimal_parentheses() {
        for src in [
            "a-(b+c)", "(a+b)*c", "-(a*b)", "(x+1)^2", "(-x)^2", "a*(b*c)", "-x^2", "a+-b", "a--b",
        ] {
            let t = parse_term(src).unwrap();
            assert_eq!(print_term(&t), src);
        }
        for src in [
            "(P -> Q) -> R",
            "P -> Q -> R",
            "P & (Q | R)",
            "!(P & Q)",
            "[x:=1;](P & Q)",
            "P <-> Q <-> R",
            "P <-> (Q <-> R)",
        ] {
            let f = parse_formula(src).unwrap();
            assert_eq!(print_formula(&f), src);
        }
    }

    #[test]
    fn program_grouping() {
        for src in [
            "{a:=A; ++ a:=-b;}{x'=v,v'=a & v>=0}",
            "{a;b;}c;",
            "{a; ++ b;} ++ c;",
            "a; ++ b; ++ c;",
            "while(y^2<x){z:=z+y^2*x;y:=y+6;}",
            "if(Q){a;}else{b;}",
            "{{a; ++ b;}}*",
        ] {
            let p = parse_program(src).unwrap();
            let printed = print_program(&p);
            assert_eq!(parse_program(&printed).unwrap(), p, "{src} -> {printed}");
        }
        let p = parse_program("{a;b;}c;").unwrap();
        assert_eq!(print_program(&p), "{a;b;}c;");
    }
}
