use dlcert::kernel::{check_certificate, Verdict};
use dlcert::optimizer::{
    commute_term, const_fold, copy_propagate, cse, term_sites, unwind_loop, var_sites, OptError,
    OptResult,
};
use dlcert::semantics::Falsification;
use dlcert::usubst::apply_predicational;
use dlcert::{falsify, parse_formula, parse_substitution, parse_term, Formula, Path, Variable};

const INPUT: &str = "[while(y^2<a^2+b){z:=z+y^2*(a^2+b);y:=y+2*3;}]P";
const CSE: &str = "[x:=a^2+b;while(y^2<x){z:=z+y^2*x;y:=y+2*3;}]P";
const COPY1: &str = "[x:=a^2+b;while(y^2<x){z:=z+y^2*(a^2+b);y:=y+2*3;}]P";
const COPY2: &str = "[x:=a^2+b;while(y^2<a^2+b){z:=z+y^2*(a^2+b);y:=y+2*3;}]P";
const FOLD: &str = "[x:=a^2+b;while(y^2<x){z:=z+y^2*x;y:=y+6;}]P";
const COMMUTE: &str = "[x:=b+a^2;while(y^2<x){z:=z+y^2*x;y:=y+6;}]P";
const UNWIND: &str = "[x:=b+a^2;if(y^2<x){z:=z+y^2*x;y:=y+6;while(y^2<x){z:=z+y^2*x;y:=y+6;}}]P";

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn check(r: &OptResult, input: &str, golden: &str) {
    assert!(r.applied);
    assert_eq!(r.output, f(golden));
    assert_eq!(check_certificate(&r.certificate), Verdict::Certified);
    assert_eq!(
        r.certificate.formula().unwrap(),
        &Formula::equiv(f(input), f(golden))
    );
}

/// Instantiates the postcondition so the semantics can evaluate it. The
/// certificates hold for postconditions that do not read the fresh `x`.
fn concrete(phi: &Formula, post: &str) -> Formula {
    let s = parse_substitution(&format!("P ~> {post};")).unwrap();
    apply_predicational(&s, phi).unwrap()
}

fn not_refuted(a: &str, b: &str, post: &str) {
    let eq = concrete(&Formula::equiv(f(a), f(b)), post);
    match falsify(&eq, 1000, 3, 50).unwrap() {
        Falsification::NotRefuted { .. } => {}
        r => panic!("{a} vs {b} refuted: {r:?}"),
    }
}

#[test]
fn optimization_pipeline() {
    let x = Variable::new("x");
    let r = cse(&f(INPUT), &parse_term("a^2+b").unwrap(), &x).unwrap();
    check(&r, INPUT, CSE);

    let g = f(CSE);
    let sites = var_sites(&g, &x);
    assert_eq!(sites.len(), 2);
    let body = sites.iter().find(|p| p.steps().len() > 4).unwrap().clone();
    let guard = sites.iter().find(|p| p.steps().len() == 4).unwrap().clone();
    let assign = Path::new(vec![0, 0]);
    check(
        &copy_propagate(&g, &assign, std::slice::from_ref(&body)).unwrap(),
        CSE,
        COPY1,
    );
    check(
        &copy_propagate(&g, &assign, &[body, guard]).unwrap(),
        CSE,
        COPY2,
    );

    check(&const_fold(&g).unwrap(), CSE, FOLD);

    let h = f(FOLD);
    let site = term_sites(&h, &parse_term("a^2+b").unwrap())[0].clone();
    check(
        &commute_term(&h, &site, &parse_term("b+a^2").unwrap()).unwrap(),
        FOLD,
        COMMUTE,
    );

    check(
        &unwind_loop(&f(COMMUTE), &Path::new(vec![0, 1])).unwrap(),
        COMMUTE,
        UNWIND,
    );
}

#[test]
fn optimization_pipeline_agrees_with_semantics() {
    let stages = [INPUT, CSE, COPY1, COPY2, FOLD, COMMUTE, UNWIND];
    for w in stages.windows(2) {
        for post in ["z>0", "y*z<=a*b"] {
            not_refuted(w[0], w[1], post);
        }
    }
}

#[test]
fn unwinding_twice_agrees_with_unwinding_once() {
    let once = unwind_loop(&f(COMMUTE), &Path::new(vec![0, 1]))
        .unwrap()
        .output;
    let inner = dlcert::optimizer::while_sites(&once)[0].clone();
    let twice = unwind_loop(&once, &inner).unwrap();
    assert_eq!(check_certificate(&twice.certificate), Verdict::Certified);
    let eq = concrete(&Formula::equiv(once, twice.output), "z>0");
    for seed in 0..100 {
        assert!(matches!(
            falsify(&eq, 1, seed, 50).unwrap(),
            Falsification::NotRefuted { .. }
        ));
    }
}

#[test]
fn y_squared_cannot_be_pulled_out() {
    let r = cse(&f(INPUT), &parse_term("y^2").unwrap(), &Variable::new("x"));
    match r {
        Err(OptError::NotApplicable(reason)) => assert!(reason.contains('y'), "{reason}"),
        other => panic!("expected a clash, got {other:?}"),
    }
}

#[test]
fn z_cannot_be_propagated_across_the_loop() {
    let g = f(CSE);
    let z_assign = Path::new(vec![0, 1, 1, 0]);
    let z_read = Path::new(vec![0, 1, 1, 0, 0, 0]);
    let r = copy_propagate(&g, &z_assign, &[z_read]);
    assert!(matches!(r, Err(OptError::NotApplicable(_))), "{r:?}");
}

/// Every transformation that applies to a random discrete program is
/// certified and survives the semantic oracle.
#[test]
fn random_programs_agree_with_semantics() {
    use dlcert::gen::{Gen, Profile};
    use dlcert::syntax::find_paths;
    use dlcert::{ExprRef, Program, Term};

    let mut applied = 0;
    for seed in 0..200u64 {
        let mut g = Gen::new(seed, Profile::Discrete);
        let phi = Formula::boxed(g.program(3), g.formula(1));
        let mut results = vec![const_fold(&phi)];
        if let Some(site) = dlcert::optimizer::while_sites(&phi).first() {
            results.push(unwind_loop(&phi, site));
        }
        let compound = find_paths(ExprRef::from(&phi), &mut |e| {
            matches!(e, ExprRef::Term(Term::Plus(..) | Term::Times(..)))
        });
        if let Some(site) = compound.first() {
            let t = phi.at(site).unwrap().to_owned().into_term();
            let swapped = match &t {
                Term::Plus(a, b) => Term::plus((**b).clone(), (**a).clone()),
                Term::Times(a, b) => Term::times((**b).clone(), (**a).clone()),
                _ => unreachable!(),
            };
            results.push(commute_term(&phi, site, &swapped));
            results.push(cse(&phi, &t, &Variable::new("w")));
        }
        let Formula::Box(p, _) = &phi else {
            unreachable!()
        };
        let (assign, rest) = match p.as_ref() {
            Program::Assign(..) => (Some(Path::new(vec![0])), vec![Path::new(vec![1])]),
            Program::Seq(a, _) if matches!(a.as_ref(), Program::Assign(..)) => (
                Some(Path::new(vec![0, 0])),
                vec![Path::new(vec![0, 1]), Path::new(vec![1])],
            ),
            _ => (None, vec![]),
        };
        if let Some(assign) = assign {
            let Some(ExprRef::Program(Program::Assign(x, _))) = phi.at(&assign) else {
                unreachable!()
            };
            let sites: Vec<Path> = var_sites(&phi, x)
                .into_iter()
                .filter(|s| rest.iter().any(|r| r.is_prefix_of(s)))
                .collect();
            if !sites.is_empty() {
                results.push(copy_propagate(&phi, &assign, &sites));
            }
        }
        for r in results {
            let Ok(r) = r else { continue };
            if !r.applied {
                continue;
            }
            applied += 1;
            assert_eq!(check_certificate(&r.certificate), Verdict::Certified);
            let eq = Formula::equiv(phi.clone(), r.output.clone());
            assert_eq!(r.certificate.formula(), Some(&eq));
            match falsify(&eq, 1000, seed, 50).unwrap() {
                Falsification::NotRefuted { .. } => {}
                bad => panic!("seed {seed}: {eq:?} refuted: {bad:?}"),
            }
        }
    }
    assert!(applied >= 200, "only {applied} transformations applied");
}
