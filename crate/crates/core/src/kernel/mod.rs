//! The trusted kernel.
//!
//! Certificates are proof trees whose leaves are axiom instances, rule
//! applications with no premises, or explicitly open premises. Checking
//! re-derives every conclusion from scratch; nothing stored in a certificate
//! is trusted.

mod axioms;
mod check;
mod derived;
mod matching;
mod rules;
mod text;

use std::fmt;

use thiserror::Error;

use crate::parser::{print_formula, print_program};
use crate::syntax::{Formula, PathError, Program, Variable};
use crate::usubst::{ClashError, RenameError, SubstError, UniformSubstitution};

pub use axioms::{instantiate_axiom, schema, AxiomId};
pub use check::{check_certificate, OpenPremise, Verdict};
pub use derived::{
    equiv_rewrite, lift, modus_ponens, poly_identity, reflexivity, symmetry, transitivity,
};
pub use matching::match_axiom;
pub use rules::{apply_rule, derive, Params, RuleId};
pub use text::{read_certificate, write_certificate, CertError};

/// What a certificate proves.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Judgment {
    Valid(Formula),
    /// Both programs have the same transition relation.
    ProgEq(Program, Program),
}

impl Judgment {
    pub fn formula(&self) -> Option<&Formula> {
        match self {
            Judgment::Valid(f) => Some(f),
            Judgment::ProgEq(..) => None,
        }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::Valid(x) => write!(f, "VALID {}", print_formula(x)),
            Judgment::ProgEq(a, b) => {
                write!(f, "PROGEQ {} == {}", print_program(a), print_program(b))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub conclusion: Judgment,
    pub node: Node,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Node {
    Axiom {
        id: AxiomId,
        subst: UniformSubstitution,
        renamings: Vec<(Variable, Variable)>,
    },
    Rule {
        id: RuleId,
        params: Params,
        premises: Vec<Certificate>,
    },
    Open {
        label: String,
    },
}

impl Certificate {
    /// An axiom instance, with its conclusion computed by the kernel.
    pub fn axiom(
        id: AxiomId,
        subst: UniformSubstitution,
        renamings: Vec<(Variable, Variable)>,
    ) -> Result<Certificate, KernelError> {
        let conclusion = instantiate_axiom(id, &subst, &renamings)?;
        Ok(Certificate {
            conclusion,
            node: Node::Axiom {
                id,
                subst,
                renamings,
            },
        })
    }

    /// An unproven assumption, reported by the checker.
    pub fn open(conclusion: Judgment, label: &str) -> Certificate {
        Certificate {
            conclusion,
            node: Node::Open {
                label: label.to_string(),
            },
        }
    }

    pub fn is_closed(&self) -> bool {
        match &self.node {
            Node::Open { .. } => false,
            Node::Axiom { .. } => true,
            Node::Rule { premises, .. } => premises.iter().all(Certificate::is_closed),
        }
    }

    /// The proven formula, if this proves validity.
    pub fn formula(&self) -> Option<&Formula> {
        self.conclusion.formula()
    }

    pub fn size(&self) -> usize {
        match &self.node {
            Node::Rule { premises, .. } => {
                1 + premises.iter().map(Certificate::size).sum::<usize>()
            }
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("{rule} expects {expected} premises, got {got}")]
    Arity {
        rule: RuleId,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("arithmetic oracle: {0}")]
    Oracle(String),
    #[error(transparent)]
    Clash(#[from] ClashError),
    #[error("domain: {0}")]
    Domain(String),
    #[error("ill-formed: {0}")]
    IllFormed(String),
    #[error(transparent)]
    Rename(#[from] RenameError),
}

impl From<SubstError> for KernelError {
    fn from(e: SubstError) -> Self {
        match e {
            SubstError::Clash(c) => KernelError::Clash(c),
            SubstError::IllFormed(m) => KernelError::IllFormed(m),
        }
    }
}

#[cfg(test)]
mod tests;
