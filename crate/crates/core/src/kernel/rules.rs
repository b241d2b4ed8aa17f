use std::fmt;
use std::str::FromStr;

use super::{Certificate, Judgment, KernelError, Node};
use crate::parser::parse_formula;
use crate::semantics::ring_normalize;
use crate::statics::rigid_free_vars;
use crate::syntax::{CmpOp, Expr, ExprRef, Formula, Path, PathError, Program, Term};
use crate::usubst::{apply_formula, apply_program, plug_dot, UniformSubstitution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    US,
    USR,
    CQ,
    CT,
    CP,
    Loop,
    ImplyR,
    ModusPonens,
    EquivRewrite,
    PolyIdentity,
}

impl RuleId {
    pub const ALL: [RuleId; 10] = [
        RuleId::US,
        RuleId::USR,
        RuleId::CQ,
        RuleId::CT,
        RuleId::CP,
        RuleId::Loop,
        RuleId::ImplyR,
        RuleId::ModusPonens,
        RuleId::EquivRewrite,
        RuleId::PolyIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::US => "US",
            RuleId::USR => "USR",
            RuleId::CQ => "CQ",
            RuleId::CT => "CT",
            RuleId::CP => "CP",
            RuleId::Loop => "Loop",
            RuleId::ImplyR => "ImplyR",
            RuleId::ModusPonens => "ModusPonens",
            RuleId::EquivRewrite => "EquivRewrite",
            RuleId::PolyIdentity => "PolyIdentity",
        }
    }

    /// Number of premises. For USR this is the premise count of its base
    /// rule, which is one for every registered base.
    pub fn arity(self) -> usize {
        match self {
            RuleId::PolyIdentity => 0,
            RuleId::ModusPonens | RuleId::EquivRewrite => 2,
            RuleId::Loop => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

/// Rule parameters. Each rule accepts exactly one variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Params {
    None,
    /// US: the substitution.
    Subst(UniformSubstitution),
    /// USR: a base rule shape and the substitution instantiating it.
    Usr {
        base: RuleId,
        subst: UniformSubstitution,
    },
    /// CQ: a formula with dots marking the rewritten positions.
    Context(Formula),
    /// CT: a term with dots marking the rewritten positions.
    TermContext(Term),
    /// CP: a formula and the path of the program to replace.
    ProgramContext {
        context: Formula,
        path: Path,
    },
    Loop {
        gamma: Vec<Formula>,
        delta: Vec<Formula>,
        invariant: Formula,
        program: Program,
        post: Formula,
    },
    ImplyR {
        gamma: Vec<Formula>,
        left: Formula,
        right: Formula,
    },
    /// EquivRewrite: where the left side of the equivalence occurs.
    Path(Path),
    Identity {
        lhs: Term,
        rhs: Term,
    },
}

fn shape(msg: impl Into<String>) -> KernelError {
    KernelError::Shape(msg.into())
}

fn valid(j: &Judgment) -> Result<&Formula, KernelError> {
    j.formula()
        .ok_or_else(|| shape("expected a validity premise, found a program equivalence"))
}

fn equation(j: &Judgment) -> Result<(&Term, &Term), KernelError> {
    match valid(j)? {
        Formula::Cmp(CmpOp::Equal, a, b) => Ok((a, b)),
        other => Err(shape(format!(
            "expected an equation, found {}",
            crate::parser::print_formula(other)
        ))),
    }
}

/// The premise and conclusion shapes a USR base rule stands for.
fn usr_base(base: RuleId) -> Result<(Formula, Formula), KernelError> {
    let (p, c) = match base {
        RuleId::CQ => ("f()=g()", "p(f()) <-> p(g())"),
        RuleId::CT => ("f()=g()", "c(f())=c(g())"),
        other => return Err(shape(format!("{other} is not a USR base rule"))),
    };
    Ok((
        parse_formula(p).expect("base rule parses"),
        parse_formula(c).expect("base rule parses"),
    ))
}

/// Computes the conclusion of a rule from its parameters and premises.
pub fn derive(id: RuleId, params: &Params, premises: &[Judgment]) -> Result<Judgment, KernelError> {
    if premises.len() != id.arity() {
        return Err(KernelError::Arity {
            rule: id,
            expected: id.arity(),
            got: premises.len(),
        });
    }
    let bad_params = || shape(format!("wrong parameters for {id}"));
    match (id, params) {
        (RuleId::US, Params::Subst(sigma)) => Ok(match &premises[0] {
            Judgment::Valid(f) => Judgment::Valid(apply_formula(sigma, f)?),
            Judgment::ProgEq(a, b) => {
                Judgment::ProgEq(apply_program(sigma, a)?, apply_program(sigma, b)?)
            }
        }),
        (RuleId::USR, Params::Usr { base, subst }) => {
            for (sym, r) in subst.iter() {
                if !rigid_free_vars(r.as_ref()).is_empty() {
                    return Err(shape(format!(
                        "USR replacement for {sym} has free variables"
                    )));
                }
            }
            let (prem, concl) = usr_base(*base)?;
            let expected = apply_formula(subst, &prem)?;
            if valid(&premises[0])? != &expected {
                return Err(shape("premise is not the substituted base premise"));
            }
            Ok(Judgment::Valid(apply_formula(subst, &concl)?))
        }
        (RuleId::CQ, Params::Context(ctx)) => {
            let (e, k) = equation(&premises[0])?;
            let left = plug_dot(ctx, e, "context")?.into_formula();
            let right = plug_dot(ctx, k, "context")?.into_formula();
            Ok(Judgment::Valid(Formula::equiv(left, right)))
        }
        (RuleId::CT, Params::TermContext(ctx)) => {
            let (e, k) = equation(&premises[0])?;
            let left = plug_dot(ctx, e, "context")?.into_term();
            let right = plug_dot(ctx, k, "context")?.into_term();
            Ok(Judgment::Valid(Formula::cmp(CmpOp::Equal, left, right)))
        }
        (RuleId::CP, Params::ProgramContext { context, path }) => {
            let Judgment::ProgEq(a, b) = &premises[0] else {
                return Err(shape("CP needs a program equivalence premise"));
            };
            match context.at(path) {
                Some(ExprRef::Program(p)) if p == a => {}
                Some(ExprRef::Program(_)) => {
                    return Err(shape(
                        "program at the path is not the left side of the premise",
                    ))
                }
                _ => {
                    return Err(PathError {
                        path: path.clone(),
                        expected: "program",
                    }
                    .into())
                }
            }
            let replaced = context.replace_at(path, Expr::Program(b.clone()))?;
            Ok(Judgment::Valid(Formula::equiv(context.clone(), replaced)))
        }
        (
            RuleId::Loop,
            Params::Loop {
                gamma,
                delta,
                invariant,
                program,
                post,
            },
        ) => {
            let (body, guard) = match program {
                Program::Repeat(a) => (a.as_ref(), None),
                Program::While(q, a) => (a.as_ref(), Some(q)),
                _ => return Err(shape("Loop needs a repetition or while program")),
            };
            let mut init_delta = vec![invariant.clone()];
            init_delta.extend(delta.iter().cloned());
            let step_pre = match guard {
                Some(q) => Formula::and(invariant.clone(), q.clone()),
                None => invariant.clone(),
            };
            let use_pre = match guard {
                Some(q) => Formula::and(invariant.clone(), Formula::not(q.clone())),
                None => invariant.clone(),
            };
            let expected = [
                Formula::sequent(gamma, &init_delta),
                Formula::implies(step_pre, Formula::boxed(body.clone(), invariant.clone())),
                Formula::implies(use_pre, post.clone()),
            ];
            for (i, (got, want)) in premises.iter().zip(&expected).enumerate() {
                if valid(got)? != want {
                    return Err(shape(format!("Loop premise {} has the wrong shape", i + 1)));
                }
            }
            let mut concl_delta = vec![Formula::boxed(program.clone(), post.clone())];
            concl_delta.extend(delta.iter().cloned());
            Ok(Judgment::Valid(Formula::sequent(gamma, &concl_delta)))
        }
        (RuleId::ImplyR, Params::ImplyR { gamma, left, right }) => {
            let mut ante = gamma.clone();
            ante.push(left.clone());
            if valid(&premises[0])? != &Formula::sequent(&ante, std::slice::from_ref(right)) {
                return Err(shape("ImplyR premise has the wrong shape"));
            }
            Ok(Judgment::Valid(Formula::sequent(
                gamma,
                &[Formula::implies(left.clone(), right.clone())],
            )))
        }
        (RuleId::ModusPonens, Params::None) => match valid(&premises[0])? {
            Formula::Implies(p, q) if valid(&premises[1])? == p.as_ref() => {
                Ok(Judgment::Valid((**q).clone()))
            }
            _ => Err(shape("ModusPonens needs P -> Q and P")),
        },
        (RuleId::EquivRewrite, Params::Path(path)) => {
            let Formula::Equiv(a, b) = valid(&premises[0])? else {
                return Err(shape("EquivRewrite needs an equivalence as first premise"));
            };
            let target = valid(&premises[1])?;
            match target.at(path) {
                Some(ExprRef::Formula(f)) if f == a.as_ref() => {}
                Some(ExprRef::Formula(_)) => {
                    return Err(shape(
                        "formula at the path is not the left side of the equivalence",
                    ))
                }
                _ => {
                    return Err(PathError {
                        path: path.clone(),
                        expected: "formula",
                    }
                    .into())
                }
            }
            Ok(Judgment::Valid(
                target.replace_at(path, Expr::Formula((**b).clone()))?,
            ))
        }
        (RuleId::PolyIdentity, Params::Identity { lhs, rhs }) => {
            let l = ring_normalize(lhs).map_err(|e| KernelError::Oracle(e.to_string()))?;
            let r = ring_normalize(rhs).map_err(|e| KernelError::Oracle(e.to_string()))?;
            if l != r {
                return Err(KernelError::Oracle(format!(
                    "normal forms differ: {l} vs {r}"
                )));
            }
            Ok(Judgment::Valid(Formula::cmp(
                CmpOp::Equal,
                lhs.clone(),
                rhs.clone(),
            )))
        }
        _ => Err(bad_params()),
    }
}

/// Applies a rule to premise certificates, computing the conclusion.
pub fn apply_rule(
    id: RuleId,
    params: Params,
    premises: Vec<Certificate>,
) -> Result<Certificate, KernelError> {
    let judgments: Vec<Judgment> = premises.iter().map(|p| p.conclusion.clone()).collect();
    let conclusion = derive(id, &params, &judgments)?;
    Ok(Certificate {
        conclusion,
        node: Node::Rule {
            id,
            params,
            premises,
        },
    })
}
