use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use super::{Judgment, KernelError};
use crate::parser::{parse_formula, parse_program};
use crate::statics::{all_vars, signature};
use crate::syntax::{ExprRef, Variable};
use crate::usubst::{apply_with_mode, uniform_rename, Mode, RenameError, UniformSubstitution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomId {
    ComposeB,
    BAnd,
    AssignB,
    ChoiceB,
    TestB,
    LoopUnwindEq,
    SeqAssoc,
}

impl AxiomId {
    pub const ALL: [AxiomId; 7] = [
        AxiomId::ComposeB,
        AxiomId::BAnd,
        AxiomId::AssignB,
        AxiomId::ChoiceB,
        AxiomId::TestB,
        AxiomId::LoopUnwindEq,
        AxiomId::SeqAssoc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::ComposeB => "ComposeB",
            AxiomId::BAnd => "BAnd",
            AxiomId::AssignB => "AssignB",
            AxiomId::ChoiceB => "ChoiceB",
            AxiomId::TestB => "TestB",
            AxiomId::LoopUnwindEq => "LoopUnwindEq",
            AxiomId::SeqAssoc => "SeqAssoc",
        }
    }

    fn source(self) -> Source {
        match self {
            AxiomId::ComposeB => Source::Valid("[a;b;]P <-> [a;][b;]P"),
            AxiomId::BAnd => Source::Valid("[a;](P & Q) <-> [a;]P & [a;]Q"),
            AxiomId::AssignB => Source::Valid("[x:=f();]p(x) <-> p(f())"),
            AxiomId::ChoiceB => Source::Valid("[a; ++ b;]P <-> [a;]P & [b;]P"),
            AxiomId::TestB => Source::Valid("[?Q;]P <-> (Q -> P)"),
            AxiomId::LoopUnwindEq => Source::ProgEq("while(Q){a;}", "if(Q){a;while(Q){a;}}"),
            AxiomId::SeqAssoc => Source::ProgEq("{a;b;}c;", "a;b;c;"),
        }
    }
}

enum Source {
    Valid(&'static str),
    ProgEq(&'static str, &'static str),
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown axiom `{s}`"))
    }
}

/// The registered schema of an axiom.
pub fn schema(id: AxiomId) -> &'static Judgment {
    static REGISTRY: OnceLock<Vec<Judgment>> = OnceLock::new();
    let all = REGISTRY.get_or_init(|| {
        AxiomId::ALL
            .iter()
            .map(|a| match a.source() {
                Source::Valid(s) => Judgment::Valid(parse_formula(s).expect("axiom schema parses")),
                Source::ProgEq(l, r) => Judgment::ProgEq(
                    parse_program(l).expect("axiom schema parses"),
                    parse_program(r).expect("axiom schema parses"),
                ),
            })
            .collect()
    });
    &all[AxiomId::ALL
        .iter()
        .position(|a| *a == id)
        .expect("registered")]
}

/// Instantiates an axiom: renamings first, then the substitution.
///
/// Nullary predicate symbols of a schema are predicationals and may be
/// replaced by arbitrary formulas; all other symbols are rigid and their
/// replacements are checked for capture.
pub fn instantiate_axiom(
    id: AxiomId,
    sigma: &UniformSubstitution,
    renamings: &[(Variable, Variable)],
) -> Result<Judgment, KernelError> {
    let mut j = schema(id).clone();
    for (x, y) in renamings {
        j = match j {
            Judgment::Valid(f) => Judgment::Valid(uniform_rename(x, y, &f)?.into_formula()),
            Judgment::ProgEq(a, b) => {
                if x != y && (all_vars(&a).contains(y) || all_vars(&b).contains(y)) {
                    return Err(RenameError {
                        from: x.clone(),
                        to: y.clone(),
                    }
                    .into());
                }
                Judgment::ProgEq(
                    uniform_rename(x, y, &a)?.into_program(),
                    uniform_rename(x, y, &b)?.into_program(),
                )
            }
        };
    }
    let sig = match &j {
        Judgment::Valid(f) => signature(f),
        Judgment::ProgEq(a, b) => {
            let mut s = signature(a);
            s.extend(signature(b));
            s
        }
    };
    if let Some(extra) = sigma.domain().find(|s| !sig.contains(s)) {
        return Err(KernelError::Domain(format!(
            "{extra} does not occur in axiom {id}"
        )));
    }
    Ok(match j {
        Judgment::Valid(f) => Judgment::Valid(
            apply_with_mode(sigma, ExprRef::Formula(&f), Mode::Schema)?.into_formula(),
        ),
        Judgment::ProgEq(a, b) => Judgment::ProgEq(
            apply_with_mode(sigma, ExprRef::Program(&a), Mode::Schema)?.into_program(),
            apply_with_mode(sigma, ExprRef::Program(&b), Mode::Schema)?.into_program(),
        ),
    })
}
