use super::*;
use crate::parser::{parse_formula, parse_program, parse_term};
use crate::syntax::{Formula, Rational, Variable};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn int(n: i64) -> Rational {
    q(n, 1)
}

#[test]
fn term_values() {
    let w = State::default().with("x", int(3));
    assert_eq!(eval_term(&w, &parse_term("x+1").unwrap()).unwrap(), int(4));
    assert_eq!(eval_term(&w, &parse_term("2*3").unwrap()).unwrap(), int(6));
    let w = State::default().with("a", int(2)).with("b", int(1));
    assert_eq!(
        eval_term(&w, &parse_term("a^2+b").unwrap()).unwrap(),
        int(5)
    );
    assert_eq!(
        eval_term(&w, &parse_term("b+a^2").unwrap()).unwrap(),
        int(5)
    );
    assert!(eval_term(&w, &parse_term("f()").unwrap()).is_err());
}

#[test]
fn choice_runs_both_branches() {
    let w = State::default().with("A", int(3)).with("b", int(2));
    let r = run_program(&w, &parse_program("{a:=A; ++ a:=-b;}").unwrap(), 10).unwrap();
    assert!(!r.is_truncated());
    let a = Variable::new("a");
    let values: Vec<Rational> = r.reached.iter().map(|s| s.get(&a).clone()).collect();
    assert_eq!(values.len(), 2);
    assert!(values.contains(&int(3)) && values.contains(&int(-2)));
}

#[test]
fn failed_test_has_no_runs() {
    let r = run_program(&State::default(), &parse_program("?false;").unwrap(), 10).unwrap();
    assert!(r.reached.is_empty());
    assert!(!r.is_truncated());
}

#[test]
fn while_loop_runs_to_exit() {
    let w = State::default().with("x", int(100));
    let p = parse_program("while(y^2<x){y:=y+6;}").unwrap();
    let r = run_program(&w, &p, 10).unwrap();
    assert!(!r.is_truncated());
    assert_eq!(r.reached.len(), 1);
    let s = r.reached.iter().next().unwrap();
    assert_eq!(s.get(&Variable::new("y")), &int(12));
    let r = run_program(&w, &p, 1).unwrap();
    assert_eq!(r.truncated, Some(UnknownReason::FuelExhausted));
}

#[test]
fn constant_guard_divergence_is_exact() {
    let p = parse_program("while(x>0){y:=y+1;}").unwrap();
    let w = State::default().with("x", int(1));
    let r = run_program(&w, &p, 3).unwrap();
    assert!(r.reached.is_empty());
    assert!(!r.is_truncated());
}

#[test]
fn repeat_closes_cycles() {
    let p = parse_program("{x:=1-x;}*").unwrap();
    let r = run_program(&State::default(), &p, 5).unwrap();
    assert!(!r.is_truncated());
    assert_eq!(r.reached.len(), 2);
    let r = run_program(&State::default(), &parse_program("{x:=x+1;}*").unwrap(), 5).unwrap();
    assert!(r.is_truncated());
    assert_eq!(r.reached.len(), 6);
}

#[test]
fn quiz_box_formula() {
    let f = parse_formula("[x:=x+1]x>5").unwrap();
    let at = |x| eval_formula(&State::default().with("x", int(x)), &f, 10).unwrap();
    assert_eq!(at(5), Outcome::True);
    assert_eq!(at(4), Outcome::False);
    assert_eq!(
        eval_formula(&State::default(), &Formula::True, 0).unwrap(),
        Outcome::True
    );
}

#[test]
fn odes_are_not_executed() {
    let f = parse_formula("[{x'=v}]x<=m").unwrap();
    assert_eq!(
        eval_formula(&State::default(), &f, 10).unwrap(),
        Outcome::Unknown(UnknownReason::Unsupported)
    );
    assert!(eval_formula(&State::default(), &parse_formula("P").unwrap(), 1).is_err());
    assert!(eval_formula(
        &State::default(),
        &parse_formula("\\forall x x>0").unwrap(),
        1
    )
    .is_err());
}

#[test]
fn truncated_box_can_still_be_false() {
    let f = parse_formula("[{x:=x+1;}*]x<3").unwrap();
    assert_eq!(
        eval_formula(&State::default(), &f, 5).unwrap(),
        Outcome::False
    );
    let g = parse_formula("[{x:=x+1;}*]x>=0").unwrap();
    assert_eq!(
        eval_formula(&State::default(), &g, 5).unwrap(),
        Outcome::Unknown(UnknownReason::FuelExhausted)
    );
}

#[test]
fn kleene_tables() {
    let u = Outcome::Unknown(UnknownReason::FuelExhausted);
    assert_eq!(u.and(Outcome::False), Outcome::False);
    assert_eq!(u.or(Outcome::True), Outcome::True);
    assert_eq!(u.and(Outcome::True), u);
    assert_eq!(u.not(), u);
    assert_eq!(Outcome::True.iff(Outcome::False), Outcome::False);
}

#[test]
fn quiz_equivalences() {
    let good = parse_formula("[x:=x+1]x>5 <-> x>4").unwrap();
    assert_eq!(
        falsify(&good, 10_000, 1, 10).unwrap(),
        Falsification::NotRefuted {
            trials: 10_000,
            unknowns: 0
        }
    );
    let bad = parse_formula("[x:=x+1]x>5 <-> x>3").unwrap();
    match falsify(&bad, 10_000, 1, 10).unwrap() {
        Falsification::Refuted { state, .. } => {
            let x = state.get(&Variable::new("x")).clone();
            assert!(x > int(3) && x <= int(4), "{x}");
        }
        other => panic!("{other:?}"),
    }
    // Hand check of the documented witness.
    let w = State::default().with("x", q(7, 2));
    assert_eq!(eval_formula(&w, &bad, 10).unwrap(), Outcome::False);
    assert!(matches!(
        falsify(&Formula::True, 10, 0, 1).unwrap(),
        Falsification::NotRefuted { unknowns: 0, .. }
    ));
}

#[test]
fn falsify_is_deterministic_across_executors() {
    use crate::par::Exec;
    let f = parse_formula("[x:=x*x;]x>y").unwrap();
    let a = falsify_with(Exec::Sequential, &f, 500, 7, 10).unwrap();
    let b = falsify_with(Exec::Parallel, &f, 500, 7, 10).unwrap();
    assert_eq!(a, b);
}

#[test]
fn ring_normal_forms() {
    let n = |s: &str| ring_normalize(&parse_term(s).unwrap()).unwrap();
    assert_eq!(n("2*3").as_constant(), Some(int(6)));
    assert_eq!(n("a^2+b"), n("b+a^2"));
    assert_eq!(n("x-x"), Poly::zero());
    assert_eq!(n("(x+y)^2"), n("x^2+2*x*y+y^2"));
    assert_ne!(n("a^2+b"), n("a^2+b+1"));
    assert_eq!(n("(x+1)*(x-1)").to_string(), "-1 + x^2");
    assert!(ring_normalize(&parse_term("f()").unwrap()).is_err());
}
