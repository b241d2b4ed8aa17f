use super::*;
use crate::parser::{parse_formula, parse_program, parse_substitution, parse_term};
use crate::semantics::{eval_formula, falsify, Outcome};
use crate::syntax::{Formula, Path, Program};

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn axiom(id: AxiomId, target: &Formula) -> Certificate {
    let (subst, renamings) = match_axiom(id, target).expect("axiom matches");
    Certificate::axiom(id, subst, renamings).unwrap()
}

const EX1: &str = "x<=m & b>0 -> [{a:=A; ++ a:=-b;}{x'=v,v'=a & v>=0}](x<=m & 0<=v)";
const EX2: &str = "[{a:=A; ++ a:=-b;}][{x'=v,v'=a & v>=0}](x<=m & 0<=v)";
const EX3: &str = "x<=m & b>0 -> [{a:=A; ++ a:=-b;}][{x'=v,v'=a & v>=0}]x<=m \
                   & [{a:=A; ++ a:=-b;}][{x'=v,v'=a & v>=0}]0<=v";

fn example_chain() -> Certificate {
    let ex1 = f(EX1);
    let Formula::Implies(_, body) = &ex1 else {
        unreachable!()
    };
    let compose = axiom(AxiomId::ComposeB, body);
    assert_eq!(
        compose.formula().unwrap(),
        &Formula::equiv((**body).clone(), f(EX2))
    );
    let step1 = lift(compose, &ex1, &Path::new(vec![1])).unwrap();

    let Formula::Implies(_, mid) = step1
        .formula()
        .and_then(|e| match e {
            Formula::Equiv(_, r) => Some(r.as_ref()),
            _ => None,
        })
        .unwrap()
        .clone()
    else {
        unreachable!()
    };
    let Formula::Box(_, inner) = mid.as_ref() else {
        unreachable!()
    };
    let inner_and = axiom(AxiomId::BAnd, inner);
    let after_inner = {
        let cur = Formula::implies(f("x<=m & b>0"), (*mid).clone());
        lift(inner_and, &cur, &Path::new(vec![1, 1])).unwrap()
    };
    let step2 = transitivity(step1, after_inner).unwrap();
    let Some(Formula::Equiv(_, cur)) = step2.formula() else {
        unreachable!()
    };
    let Formula::Implies(_, outer) = cur.as_ref() else {
        unreachable!()
    };
    let outer_and = axiom(AxiomId::BAnd, outer);
    let step3 = lift(outer_and, cur, &Path::new(vec![1])).unwrap();
    transitivity(step2, step3).unwrap()
}

#[test]
fn example_chain_is_certified() {
    let c = example_chain();
    assert_eq!(c.formula().unwrap(), &Formula::equiv(f(EX1), f(EX3)));
    assert_eq!(check_certificate(&c), Verdict::Certified);
    assert!(c.is_closed());
}

#[test]
fn tampered_conclusion_is_rejected() {
    let mut c = example_chain();
    let Node::Rule { premises, .. } = &mut c.node else {
        unreachable!()
    };
    premises[0].conclusion = Judgment::Valid(f("x>0 <-> x>1"));
    match check_certificate(&c) {
        Verdict::Rejected { node, .. } => assert_eq!(node, 1),
        v => panic!("unexpected verdict {v}"),
    }
}

#[test]
fn tampered_root_is_rejected_at_zero() {
    let mut c = poly_identity(parse_term("2*3").unwrap(), parse_term("6").unwrap()).unwrap();
    c.conclusion = Judgment::Valid(f("2*3=7"));
    assert!(matches!(
        check_certificate(&c),
        Verdict::Rejected { node: 0, .. }
    ));
}

fn loop_quiz() -> Certificate {
    let ante = f("x>=1 & v>0 & A>0");
    let j = f("x>=1 & v>0");
    let prog = parse_program("{{a:=0; ++ a:=A;}{x'=v,v'=a}}*").unwrap();
    let post = f("x>=0");
    let Program::Repeat(body) = &prog else {
        unreachable!()
    };
    let p1 = Certificate::open(
        Judgment::Valid(Formula::sequent(std::slice::from_ref(&ante), std::slice::from_ref(&j))),
        "init",
    );
    let p2 = Certificate::open(
        Judgment::Valid(Formula::implies(
            j.clone(),
            Formula::boxed((**body).clone(), j.clone()),
        )),
        "step",
    );
    let p3 = Certificate::open(
        Judgment::Valid(Formula::implies(j.clone(), post.clone())),
        "use",
    );
    let lp = apply_rule(
        RuleId::Loop,
        Params::Loop {
            gamma: vec![ante.clone()],
            delta: vec![],
            invariant: j,
            program: prog.clone(),
            post: post.clone(),
        },
        vec![p1, p2, p3],
    )
    .unwrap();
    let boxed = Formula::boxed(prog, post);
    apply_rule(
        RuleId::ImplyR,
        Params::ImplyR {
            gamma: vec![],
            left: ante,
            right: boxed,
        },
        vec![lp],
    )
    .unwrap()
}

#[test]
fn loop_quiz_has_three_open_premises() {
    let c = loop_quiz();
    assert_eq!(
        c.formula().unwrap(),
        &f("x>=1 & v>0 & A>0 -> [{{a:=0; ++ a:=A;}{x'=v,v'=a}}*]x>=0")
    );
    match check_certificate(&c) {
        Verdict::CertifiedWithOpenPremises(open) => {
            let labels: Vec<_> = open.iter().map(|o| o.label.as_str()).collect();
            assert_eq!(labels, ["init", "step", "use"]);
        }
        v => panic!("unexpected verdict {v}"),
    }
}

#[test]
fn loop_premise_shape_is_checked() {
    let p = || Certificate::open(Judgment::Valid(f("x>=0")), "p");
    let r = apply_rule(
        RuleId::Loop,
        Params::Loop {
            gamma: vec![],
            delta: vec![],
            invariant: f("x>=0"),
            program: parse_program("{x:=x+1;}*").unwrap(),
            post: f("x>=0"),
        },
        vec![p(), p(), p()],
    );
    assert!(matches!(r, Err(KernelError::Shape(_))));
}

#[test]
fn symmetry_and_transitivity() {
    let ab = axiom(AxiomId::TestB, &f("[?x>0;]y>0"));
    let ba = symmetry(ab.clone()).unwrap();
    assert_eq!(ba.formula().unwrap(), &f("(x>0 -> y>0) <-> [?x>0;]y>0"));
    let aa = transitivity(ab, ba).unwrap();
    assert_eq!(aa.formula().unwrap(), &f("[?x>0;]y>0 <-> [?x>0;]y>0"));
    assert_eq!(check_certificate(&aa), Verdict::Certified);
}

#[test]
fn assignb_matches_with_renaming() {
    let target = f("[y:=z+1;](y>0 & w>y)");
    let c = axiom(AxiomId::AssignB, &target);
    assert_eq!(
        c.formula().unwrap(),
        &f("[y:=z+1;](y>0 & w>y) <-> z+1>0 & w>z+1")
    );
    assert_eq!(check_certificate(&c), Verdict::Certified);
}

#[test]
fn assignb_leaves_rebound_occurrences_alone() {
    let target = f("[y:=y+1;][y:=0;]y>0");
    let (s, r) = match_axiom(AxiomId::AssignB, &target).unwrap();
    let j = instantiate_axiom(AxiomId::AssignB, &s, &r).unwrap();
    assert_eq!(j, Judgment::Valid(f("[y:=y+1;][y:=0;]y>0 <-> [y:=0;]y>0")));
}

#[test]
fn instantiate_rejects_foreign_symbols() {
    let s = parse_substitution("R ~> x>0;").unwrap();
    assert!(matches!(
        instantiate_axiom(AxiomId::TestB, &s, &[]),
        Err(KernelError::Domain(_))
    ));
}

#[test]
fn progeq_axioms_do_not_match_formulas() {
    assert!(match_axiom(AxiomId::LoopUnwindEq, &f("x>0")).is_none());
    assert!(match_axiom(AxiomId::ComposeB, &f("[x:=1;]x>0")).is_none());
}

#[test]
fn cp_on_loop_unwinding() {
    let s = parse_substitution("Q ~> x<3; a{} ~> x:=x+1;").unwrap();
    let unwind = Certificate::axiom(AxiomId::LoopUnwindEq, s, vec![]).unwrap();
    let ctx = f("[while(x<3){x:=x+1;}]x>=3");
    let c = apply_rule(
        RuleId::CP,
        Params::ProgramContext {
            context: ctx,
            path: Path::new(vec![0]),
        },
        vec![unwind],
    )
    .unwrap();
    assert_eq!(
        c.formula().unwrap(),
        &f("[while(x<3){x:=x+1;}]x>=3 <-> [if(x<3){x:=x+1;while(x<3){x:=x+1;}}]x>=3")
    );
    assert_eq!(check_certificate(&c), Verdict::Certified);
}

#[test]
fn usr_congruence_instance() {
    let eq = poly_identity(
        parse_term("(a+1)^2").unwrap(),
        parse_term("a^2+2*a+1").unwrap(),
    );
    assert!(eq.is_ok());
    let prem = poly_identity(parse_term("2*3").unwrap(), parse_term("6").unwrap()).unwrap();
    let s = parse_substitution("f() ~> 2*3; g() ~> 6; p(.) ~> [y:=.;]y>5;").unwrap();
    let c = apply_rule(
        RuleId::USR,
        Params::Usr {
            base: RuleId::CQ,
            subst: s,
        },
        vec![prem],
    )
    .unwrap();
    assert_eq!(c.formula().unwrap(), &f("[y:=2*3;]y>5 <-> [y:=6;]y>5"));
    assert_eq!(check_certificate(&c), Verdict::Certified);

    let bad = parse_substitution("f() ~> 2*3; g() ~> 6; p(.) ~> .>y;").unwrap();
    let prem = poly_identity(parse_term("2*3").unwrap(), parse_term("6").unwrap()).unwrap();
    assert!(apply_rule(
        RuleId::USR,
        Params::Usr {
            base: RuleId::CQ,
            subst: bad
        },
        vec![prem]
    )
    .is_err());
}

#[test]
fn poly_identity_rejects_non_identities() {
    assert!(matches!(
        poly_identity(parse_term("x^2").unwrap(), parse_term("x*2").unwrap()),
        Err(KernelError::Oracle(_))
    ));
}

#[test]
fn arity_is_enforced() {
    let r = apply_rule(RuleId::ModusPonens, Params::None, vec![]);
    assert!(matches!(
        r,
        Err(KernelError::Arity {
            expected: 2,
            got: 0,
            ..
        })
    ));
}

#[test]
fn text_round_trip() {
    for c in [example_chain(), loop_quiz()] {
        let text = write_certificate(&c);
        let back = read_certificate(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(check_certificate(&back), check_certificate(&c));
    }
}

#[test]
fn text_reader_rederives() {
    let text = write_certificate(&example_chain());
    let bad = text.replacen(
        "PolyIdentity PARAMS lhs=0 @ rhs=0",
        "PolyIdentity PARAMS lhs=0 @ rhs=1",
        1,
    );
    assert_ne!(bad, text);
    assert!(matches!(
        read_certificate(&bad),
        Err(CertError::Rejected { .. })
    ));
    assert!(matches!(
        read_certificate("NODE x"),
        Err(CertError::Syntax { .. })
    ));
    assert!(matches!(
        read_certificate(""),
        Err(CertError::Syntax { .. })
    ));
}

#[test]
fn certified_axiom_instances_hold_on_random_states() {
    let cases = [
        (AxiomId::ComposeB, "[x:=x+1;y:=x*2;]y>x"),
        (AxiomId::BAnd, "[x:=x*x;](x>=0 & y<x)"),
        (AxiomId::AssignB, "[x:=y-1;](x<y & z>x)"),
        (AxiomId::ChoiceB, "[x:=1; ++ x:=y;]x>0"),
        (AxiomId::TestB, "[?x>y;]x>=y"),
    ];
    for (id, s) in cases {
        let c = axiom(id, &f(s));
        assert_eq!(check_certificate(&c), Verdict::Certified);
        let phi = c.formula().unwrap();
        match falsify(phi, 100, 7, 50).unwrap() {
            crate::semantics::Falsification::NotRefuted { .. } => {}
            other => panic!("{id} instance refuted: {other:?}"),
        }
        let w = crate::semantics::State::constant(num::BigRational::from_integer(1.into()));
        assert_ne!(eval_formula(&w, phi, 50).unwrap(), Outcome::False);
    }
}

#[test]
fn checking_is_deterministic() {
    let c = loop_quiz();
    assert_eq!(check_certificate(&c), check_certificate(&c));
}
