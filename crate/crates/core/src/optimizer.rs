//! Compiler transformations as kernel-checked equivalences.
//!
//! Every operation returns the transformed formula together with a
//! certificate for `input <-> output`. Nothing here is trusted: a bug can
//! only make a transformation fail, never produce an unchecked result.

use thiserror::Error;

use crate::kernel::{
    apply_rule, lift, match_axiom, poly_identity, reflexivity, symmetry, transitivity, AxiomId,
    Certificate, KernelError, Params, RuleId,
};
use crate::semantics::ring_normalize;
use crate::statics::{all_vars, free_vars};
use crate::syntax::{
    contains_dot, find_paths, literal, ExprRef, Formula, Path, PathError, Program, Term, Variable,
};
use crate::usubst::abstract_free;

#[derive(Clone, Debug)]
pub struct OptResult {
    pub output: Formula,
    /// Proves `input <-> output`.
    pub certificate: Certificate,
    pub applied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OptError {
    /// The rewrite would change the meaning of the formula.
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("arithmetic oracle: {0}")]
    Oracle(String),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Kernel(KernelError),
}

impl From<KernelError> for OptError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::Clash(c) => OptError::NotApplicable(c.to_string()),
            KernelError::Oracle(m) => OptError::Oracle(m),
            KernelError::Path(p) => OptError::Path(p),
            other => OptError::Kernel(other),
        }
    }
}

type Result<T> = std::result::Result<T, OptError>;

fn unchanged(f: &Formula) -> Result<OptResult> {
    Ok(OptResult {
        output: f.clone(),
        certificate: reflexivity(f)?,
        applied: false,
    })
}

fn finish(f: &Formula, steps: Vec<Certificate>) -> Result<OptResult> {
    let mut steps = steps.into_iter();
    let Some(mut cert) = steps.next() else {
        return unchanged(f);
    };
    for s in steps {
        cert = transitivity(cert, s)?;
    }
    let output = match cert.formula() {
        Some(Formula::Equiv(_, r)) => (**r).clone(),
        _ => unreachable!("optimizer steps prove equivalences"),
    };
    Ok(OptResult {
        output,
        certificate: cert,
        applied: true,
    })
}

fn right_side(c: &Certificate) -> &Formula {
    match c.formula() {
        Some(Formula::Equiv(_, r)) => r,
        _ => unreachable!("axiom instances used here are equivalences"),
    }
}

fn require_dot_free(f: &Formula) -> Result<()> {
    if contains_dot(f) {
        return Err(OptError::Invalid(
            "formula mentions the dot placeholder".into(),
        ));
    }
    Ok(())
}

/// Instance of a validity axiom whose left side is `target`.
fn axiom_at(id: AxiomId, target: &Formula) -> Result<Certificate> {
    let (subst, renamings) = match_axiom(id, target)
        .ok_or_else(|| OptError::NotApplicable(format!("{id} does not apply")))?;
    Ok(Certificate::axiom(id, subst, renamings)?)
}

fn term_at<'a>(f: &'a Formula, path: &Path) -> Result<&'a Term> {
    match f.at(path) {
        Some(ExprRef::Term(t)) => Ok(t),
        _ => Err(PathError {
            path: path.clone(),
            expected: "term",
        }
        .into()),
    }
}

fn program_at<'a>(f: &'a Formula, path: &Path) -> Result<&'a Program> {
    match f.at(path) {
        Some(ExprRef::Program(p)) => Ok(p),
        _ => Err(PathError {
            path: path.clone(),
            expected: "program",
        }
        .into()),
    }
}

/// Paths of every occurrence of `t` in `f`.
pub fn term_sites(f: &Formula, t: &Term) -> Vec<Path> {
    find_paths(f.into(), &mut |e| matches!(e, ExprRef::Term(s) if s == t))
}

/// Paths of every read of variable `x` in `f`.
pub fn var_sites(f: &Formula, x: &Variable) -> Vec<Path> {
    term_sites(f, &Term::Var(x.clone()))
}

/// Paths of every while loop in `f`, outermost first.
pub fn while_sites(f: &Formula) -> Vec<Path> {
    find_paths(f.into(), &mut |e| {
        matches!(e, ExprRef::Program(Program::While(..)))
    })
}

/// Pulls every occurrence of `subexpr` out into a fresh variable assigned
/// once in front.
pub fn cse(f: &Formula, subexpr: &Term, fresh: &Variable) -> Result<OptResult> {
    require_dot_free(f)?;
    if contains_dot(subexpr) {
        return Err(OptError::Invalid("subexpression mentions the dot".into()));
    }
    if all_vars(f).contains(fresh) {
        return Err(OptError::Invalid(format!(
            "{fresh} already occurs in the formula"
        )));
    }
    let sites = term_sites(f, subexpr);
    if sites.is_empty() {
        return unchanged(f);
    }
    let mut g = f.clone();
    for s in &sites {
        g = g.replace_at(s, Term::Var(fresh.clone()))?;
    }
    let assign = Program::Assign(fresh.clone(), subexpr.clone());
    let pulled = Formula::boxed(assign.clone(), g.clone());
    let back = axiom_at(AxiomId::AssignB, &pulled)?;
    if right_side(&back) != f {
        return Err(OptError::NotApplicable(
            "assignment axiom does not reproduce the input".into(),
        ));
    }
    let mut steps = vec![symmetry(back)?];
    if let Formula::Box(a, post) = &g {
        let merged = Formula::boxed(Program::seq(assign, (**a).clone()), (**post).clone());
        steps.push(symmetry(axiom_at(AxiomId::ComposeB, &merged)?)?);
    }
    finish(f, steps)
}

/// Replaces the reads of `x` at `occurrences` by `e`, where `x:=e` is the
/// assignment at `assign_site`.
///
/// The assignment must start the program of a box modality and every
/// occurrence must lie after it in that box.
pub fn copy_propagate(f: &Formula, assign_site: &Path, occurrences: &[Path]) -> Result<OptResult> {
    require_dot_free(f)?;
    let Program::Assign(x, e) = program_at(f, assign_site)? else {
        return Err(PathError {
            path: assign_site.clone(),
            expected: "assignment",
        }
        .into());
    };
    for o in occurrences {
        if term_at(f, o)? != &Term::Var(x.clone()) {
            return Err(OptError::Invalid(format!("{o} is not a read of {x}")));
        }
    }
    let steps = assign_site.steps();
    let parent = assign_site.parent().unwrap_or_default();
    let (boxp, split) = match (f.at(&parent), steps.last()) {
        (Some(ExprRef::Formula(Formula::Box(..))), Some(0)) => (parent, false),
        (Some(ExprRef::Program(Program::Seq(..))), Some(0))
            if parent.steps().last() == Some(&0)
                && matches!(
                    f.at(&parent.parent().unwrap_or_default()),
                    Some(ExprRef::Formula(Formula::Box(..)))
                ) =>
        {
            (parent.parent().unwrap_or_default(), true)
        }
        _ => {
            let in_loop = (0..steps.len()).any(|i| {
                matches!(
                    f.at(&Path::new(steps[..i].to_vec())),
                    Some(ExprRef::Program(Program::Repeat(_) | Program::While(..)))
                )
            });
            return Err(OptError::NotApplicable(if in_loop {
                format!(
                    "{x} is rebound by the enclosing loop, so its value differs across iterations"
                )
            } else {
                "the assignment does not start the program of a box".into()
            }));
        }
    };
    if free_vars(e).contains(x) {
        return Err(OptError::NotApplicable(format!(
            "{x} is rewritten by its own assignment"
        )));
    }
    if occurrences.is_empty() {
        return unchanged(f);
    }
    let Some(ExprRef::Formula(boxed)) = f.at(&boxp) else {
        unreachable!("checked above")
    };
    // Paths relative to `[x:=e;]psi` after splitting off the assignment.
    let base = boxp.steps().len();
    let mut rel = Vec::new();
    for o in occurrences {
        let tail = &o.steps()[base..];
        let r = match (split, tail) {
            (false, [1, ..]) => tail.to_vec(),
            (true, [0, 1, rest @ ..]) => [&[1, 0][..], rest].concat(),
            (true, [1, rest @ ..]) => [&[1, 1][..], rest].concat(),
            _ => {
                return Err(OptError::NotApplicable(format!(
                    "occurrence {o} is not after the assignment"
                )))
            }
        };
        rel.push(Path::new(r));
    }

    let mut steps = Vec::new();
    let head = if split {
        let c = axiom_at(AxiomId::ComposeB, boxed)?;
        let h = right_side(&c).clone();
        steps.push(c);
        h
    } else {
        boxed.clone()
    };
    let Formula::Box(_, psi) = &head else {
        unreachable!()
    };
    let abstracted = abstract_free(psi, x);
    let mut psi_sel = (**psi).clone();
    for r in &rel {
        let inner = Path::new(r.steps()[1..].to_vec());
        if abstracted.at(&inner) != Some(ExprRef::Term(&Term::Dot)) {
            return Err(OptError::NotApplicable(format!(
                "{x} is rebound before the occurrence at {}",
                Path::new(boxp.steps().iter().chain(r.steps()).copied().collect())
            )));
        }
        psi_sel = psi_sel.replace_at(&inner, e.clone())?;
    }
    let head_sel = Formula::boxed(Program::Assign(x.clone(), e.clone()), psi_sel.clone());
    let forward = axiom_at(AxiomId::AssignB, &head)?;
    let backward = axiom_at(AxiomId::AssignB, &head_sel)?;
    if right_side(&forward) != right_side(&backward) {
        return Err(OptError::NotApplicable(
            "the propagated occurrences do not agree after substitution".into(),
        ));
    }
    steps.push(forward);
    steps.push(symmetry(backward)?);
    if split {
        let Formula::Box(rest, post) = &psi_sel else {
            unreachable!()
        };
        let merged = Formula::boxed(
            Program::seq(Program::Assign(x.clone(), e.clone()), (**rest).clone()),
            (**post).clone(),
        );
        steps.push(symmetry(axiom_at(AxiomId::ComposeB, &merged)?)?);
    }
    let mut local = steps.into_iter();
    let mut eq = local.next().expect("at least two steps");
    for s in local {
        eq = transitivity(eq, s)?;
    }
    finish(f, vec![lift(eq, f, &boxp)?])
}

fn foldable(t: &Term) -> bool {
    match t {
        Term::Num(_) => true,
        Term::Var(_) | Term::Dot | Term::Func(..) => false,
        Term::Plus(a, b) | Term::Minus(a, b) | Term::Times(a, b) => foldable(a) && foldable(b),
        Term::Neg(a) | Term::Power(a, _) => foldable(a),
    }
}

/// Replaces every maximal variable-free subterm by its value.
pub fn const_fold(f: &Formula) -> Result<OptResult> {
    require_dot_free(f)?;
    let candidates = find_paths(
        f.into(),
        &mut |e| matches!(e, ExprRef::Term(t) if foldable(t) && !t.is_literal()),
    );
    let mut sites: Vec<Path> = Vec::new();
    for c in candidates {
        if !sites.iter().any(|s| s.is_prefix_of(&c)) {
            sites.push(c);
        }
    }
    let mut cur = f.clone();
    let mut steps = Vec::new();
    for site in sites {
        let t = term_at(&cur, &site)?.clone();
        let value = ring_normalize(&t)
            .map_err(|e| OptError::Oracle(e.to_string()))?
            .as_constant()
            .expect("variable-free terms normalize to constants");
        let lit = literal(&value);
        if lit == t {
            continue;
        }
        let step = congruence(&cur, &site, t, lit)?;
        cur = right_side(&step).clone();
        steps.push(step);
    }
    finish(f, steps)
}

/// `f <-> f[to at site]` by CQ from the ring identity `from = to`.
fn congruence(f: &Formula, site: &Path, from: Term, to: Term) -> Result<Certificate> {
    let ctx = f.replace_at(site, Term::Dot)?;
    let eq = poly_identity(from, to)?;
    Ok(apply_rule(RuleId::CQ, Params::Context(ctx), vec![eq])?)
}

/// Replaces the term at `site` by the ring-equal term `to`.
pub fn commute_term(f: &Formula, site: &Path, to: &Term) -> Result<OptResult> {
    require_dot_free(f)?;
    let from = term_at(f, site)?.clone();
    if &from == to {
        return unchanged(f);
    }
    finish(f, vec![congruence(f, site, from, to.clone())?])
}

/// Runs one iteration of the while loop at `site` before the loop.
pub fn unwind_loop(f: &Formula, site: &Path) -> Result<OptResult> {
    require_dot_free(f)?;
    let Program::While(guard, body) = program_at(f, site)? else {
        return Err(PathError {
            path: site.clone(),
            expected: "while loop",
        }
        .into());
    };
    let sigma = crate::usubst::UniformSubstitution::new()
        .predicate("Q", 0, guard.clone())
        .and_then(|s| s.program("a", (**body).clone()))
        .map_err(|e| OptError::Invalid(e.to_string()))?;
    let unwind = Certificate::axiom(AxiomId::LoopUnwindEq, sigma, vec![])?;
    let mut steps = vec![program_congruence(f, site, unwind)?];
    // Re-associate `{a;b;}w` so the unwound body reads as written.
    let mut at = site.child(1);
    loop {
        let cur = right_side(steps.last().expect("nonempty"));
        let Program::Seq(first, rest) = program_at(cur, &at)? else {
            unreachable!("the unwound branch is a sequence")
        };
        let Program::Seq(a, b) = first.as_ref() else {
            break;
        };
        let sigma = crate::usubst::UniformSubstitution::new()
            .program("a", (**a).clone())
            .and_then(|s| s.program("b", (**b).clone()))
            .and_then(|s| s.program("c", (**rest).clone()))
            .map_err(|e| OptError::Invalid(e.to_string()))?;
        let assoc = Certificate::axiom(AxiomId::SeqAssoc, sigma, vec![])?;
        let step = program_congruence(cur, &at, assoc)?;
        steps.push(step);
        at = at.child(1);
    }
    finish(f, steps)
}

fn program_congruence(f: &Formula, site: &Path, eq: Certificate) -> Result<Certificate> {
    Ok(apply_rule(
        RuleId::CP,
        Params::ProgramContext {
            context: f.clone(),
            path: site.clone(),
        },
        vec![eq],
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_certificate, Verdict};
    use crate::parser::{parse_formula, parse_term};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn certified(r: &OptResult, input: &Formula) {
        assert_eq!(check_certificate(&r.certificate), Verdict::Certified);
        assert_eq!(
            r.certificate.formula().unwrap(),
            &Formula::equiv(input.clone(), r.output.clone())
        );
    }

    #[test]
    fn cse_without_occurrences_is_identity() {
        let input = f("[x:=1;]x>0");
        let r = cse(&input, &parse_term("a+b").unwrap(), &Variable::new("t")).unwrap();
        assert!(!r.applied);
        assert_eq!(r.output, input);
        assert_eq!(check_certificate(&r.certificate), Verdict::Certified);
    }

    #[test]
    fn cse_outside_a_box() {
        let input = f("(a+1)*(a+1) >= a+1");
        let r = cse(&input, &parse_term("a+1").unwrap(), &Variable::new("t")).unwrap();
        assert_eq!(r.output, f("[t:=a+1;]t*t>=t"));
        certified(&r, &input);
    }

    #[test]
    fn cse_rejects_used_fresh_variable() {
        let input = f("[x:=a+1;]x>0");
        let r = cse(&input, &parse_term("a+1").unwrap(), &Variable::new("x"));
        assert!(matches!(r, Err(OptError::Invalid(_))));
    }

    #[test]
    fn copy_propagate_single_assignment_box() {
        let input = f("[x:=a+1;][y:=x;]y>x");
        let r = copy_propagate(&input, &Path::new(vec![0]), &[Path::new(vec![1, 0, 0])]).unwrap();
        assert_eq!(r.output, f("[x:=a+1;][y:=a+1;]y>x"));
        certified(&r, &input);
    }

    #[test]
    fn copy_propagate_rejects_rebound_occurrence() {
        let input = f("[x:=a+1;y:=x;x:=0;]y>x");
        let sites = var_sites(&input, &Variable::new("x"));
        let r = copy_propagate(&input, &Path::new(vec![0, 0]), &sites[1..]);
        assert!(matches!(r, Err(OptError::NotApplicable(_))), "{r:?}");
    }

    #[test]
    fn copy_propagate_rejects_self_reference() {
        let input = f("[x:=x+1;]x>0");
        let r = copy_propagate(&input, &Path::new(vec![0]), &[Path::new(vec![1, 0])]);
        assert!(matches!(r, Err(OptError::NotApplicable(_))));
    }

    #[test]
    fn const_fold_nested() {
        let input = f("[z:=2*3+4*5;]z>0");
        let r = const_fold(&input).unwrap();
        assert_eq!(r.output, f("[z:=26;]z>0"));
        certified(&r, &input);
        assert!(!const_fold(&f("[x:=7;]x>0")).unwrap().applied);
    }

    #[test]
    fn const_fold_negative_result() {
        let input = f("[z:=x+(1-4);]z>0");
        let r = const_fold(&input).unwrap();
        assert_eq!(r.output, f("[z:=x+-3;]z>0"));
        certified(&r, &input);
    }

    #[test]
    fn commute_rejects_different_polynomials() {
        let input = f("[x:=a^2+b;]x>0");
        let r = commute_term(
            &input,
            &Path::new(vec![0, 0]),
            &parse_term("a^2+b+1").unwrap(),
        );
        assert!(matches!(r, Err(OptError::Oracle(_))));
        let same = commute_term(
            &input,
            &Path::new(vec![0, 0]),
            &parse_term("a^2+b").unwrap(),
        );
        assert!(!same.unwrap().applied);
    }

    #[test]
    fn unwind_requires_while() {
        let input = f("[x:=1;]x>0");
        assert!(matches!(
            unwind_loop(&input, &Path::new(vec![0])),
            Err(OptError::Path(_))
        ));
    }

    #[test]
    fn unwind_single_statement_body() {
        let input = f("[while(x<3){x:=x+1;}]x>=3");
        let r = unwind_loop(&input, &Path::new(vec![0])).unwrap();
        assert_eq!(r.output, f("[if(x<3){x:=x+1;while(x<3){x:=x+1;}}]x>=3"));
        certified(&r, &input);
    }

    #[test]
    fn unwind_three_statement_body() {
        let input = f("[while(x<3){x:=x+1;y:=y*2;z:=x;}]x>=3");
        let r = unwind_loop(&input, &Path::new(vec![0])).unwrap();
        assert_eq!(
            r.output,
            f("[if(x<3){x:=x+1;y:=y*2;z:=x;while(x<3){x:=x+1;y:=y*2;z:=x;}}]x>=3")
        );
        certified(&r, &input);
    }
}
