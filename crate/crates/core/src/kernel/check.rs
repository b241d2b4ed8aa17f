use std::fmt;

use super::{derive, instantiate_axiom, Certificate, Judgment, KernelError, Node};
use crate::syntax::contains_dot;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenPremise {
    /// Pre-order index of the node in the certificate tree.
    pub node: usize,
    pub label: String,
    pub judgment: Judgment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    CertifiedWithOpenPremises(Vec<OpenPremise>),
    /// The node (pre-order index) whose conclusion does not re-derive.
    Rejected {
        node: usize,
        reason: String,
    },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Certified => f.write_str("certified"),
            Verdict::CertifiedWithOpenPremises(open) => {
                write!(f, "certified with {} open premises", open.len())?;
                for p in open {
                    write!(f, "\n  [{}] {}: {}", p.node, p.label, p.judgment)?;
                }
                Ok(())
            }
            Verdict::Rejected { node, reason } => write!(f, "rejected at node {node}: {reason}"),
        }
    }
}

/// Re-derives every conclusion bottom-up and compares it with the stored one.
pub fn check_certificate(c: &Certificate) -> Verdict {
    let mut next = 0;
    let mut open = Vec::new();
    match recheck(c, &mut next, &mut open) {
        Err((node, reason)) => Verdict::Rejected { node, reason },
        Ok(()) if open.is_empty() => Verdict::Certified,
        Ok(()) => Verdict::CertifiedWithOpenPremises(open),
    }
}

fn recheck(
    c: &Certificate,
    next: &mut usize,
    open: &mut Vec<OpenPremise>,
) -> Result<(), (usize, String)> {
    let id = *next;
    *next += 1;
    let derived = derive_node(c, id, next, open)?;
    if derived != c.conclusion {
        return Err((
            id,
            format!("stored conclusion differs from derived {derived}"),
        ));
    }
    Ok(())
}

/// Derives the conclusion of one node after checking its premises.
fn derive_node(
    c: &Certificate,
    id: usize,
    next: &mut usize,
    open: &mut Vec<OpenPremise>,
) -> Result<Judgment, (usize, String)> {
    let fail = |e: KernelError| (id, e.to_string());
    match &c.node {
        Node::Axiom {
            id: ax,
            subst,
            renamings,
        } => instantiate_axiom(*ax, subst, renamings).map_err(fail),
        Node::Rule {
            id: rule,
            params,
            premises,
        } => {
            for p in premises {
                recheck(p, next, open)?;
            }
            let js: Vec<Judgment> = premises.iter().map(|p| p.conclusion.clone()).collect();
            derive(*rule, params, &js).map_err(fail)
        }
        Node::Open { label } => {
            if let Judgment::ProgEq(a, b) = &c.conclusion {
                if contains_dot(a) || contains_dot(b) {
                    return Err((id, "program equivalence mentions the dot".to_string()));
                }
            }
            open.push(OpenPremise {
                node: id,
                label: label.clone(),
                judgment: c.conclusion.clone(),
            });
            Ok(c.conclusion.clone())
        }
    }
}
