//! Line-oriented certificate format.
//!
//! ```text
//! NODE <id> AXIOM <AxiomId> SUBST <substitution> RENAME <x>y,... | ->
//! NODE <id> RULE <RuleId> PARAMS <key=value @ ...> PREMISES <id,... | ->
//! NODE <id> OPEN LABEL <label> JUDGMENT <VALID f | PROGEQ a == b>
//! ```
//!
//! Ids are pre-order positions. Premises are written before the nodes that
//! use them, so the root is the last line. Conclusions are re-derived while
//! reading; only open premises carry their judgment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{apply_rule, instantiate_axiom, AxiomId, Certificate, Judgment, Node, Params, RuleId};
use crate::parser::{
    parse_formula, parse_program, parse_substitution, parse_term, print_formula, print_program,
    print_term,
};
use crate::syntax::{Path, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: node {node} does not re-derive: {reason}")]
    Rejected {
        line: usize,
        node: usize,
        reason: String,
    },
}

pub fn write_certificate(c: &Certificate) -> String {
    let mut out = String::new();
    let mut next = 0;
    emit(c, &mut next, &mut out);
    out
}

fn emit(c: &Certificate, next: &mut usize, out: &mut String) -> usize {
    let id = *next;
    *next += 1;
    let line = match &c.node {
        Node::Axiom {
            id: ax,
            subst,
            renamings,
        } => {
            let ren = if renamings.is_empty() {
                "-".to_string()
            } else {
                renamings
                    .iter()
                    .map(|(x, y)| format!("{x}>{y}"))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            format!("AXIOM {ax} SUBST {subst} RENAME {ren}")
        }
        Node::Rule {
            id: rule,
            params,
            premises,
        } => {
            let ids: Vec<String> = premises
                .iter()
                .map(|p| emit(p, next, out).to_string())
                .collect();
            let ids = if ids.is_empty() {
                "-".to_string()
            } else {
                ids.join(",")
            };
            format!("RULE {rule} PARAMS {} PREMISES {ids}", params_text(params))
        }
        Node::Open { label } => {
            let label = label.replace('\n', " ").replace(" JUDGMENT ", " judgment ");
            format!("OPEN LABEL {label} JUDGMENT {}", c.conclusion)
        }
    };
    writeln!(out, "NODE {id} {line}").expect("writing to a string");
    id
}

fn params_text(p: &Params) -> String {
    let f = print_formula;
    let kv: Vec<String> = match p {
        Params::None => vec![],
        Params::Subst(s) => vec![format!("subst={s}")],
        Params::Usr { base, subst } => vec![format!("base={base}"), format!("subst={subst}")],
        Params::Context(c) => vec![format!("context={}", f(c))],
        Params::TermContext(t) => vec![format!("context={}", print_term(t))],
        Params::ProgramContext { context, path } => {
            vec![format!("path={path}"), format!("context={}", f(context))]
        }
        Params::Loop {
            gamma,
            delta,
            invariant,
            program,
            post,
        } => {
            let mut v: Vec<String> = gamma.iter().map(|g| format!("gamma={}", f(g))).collect();
            v.extend(delta.iter().map(|d| format!("delta={}", f(d))));
            v.push(format!("invariant={}", f(invariant)));
            v.push(format!("program={}", print_program(program)));
            v.push(format!("post={}", f(post)));
            v
        }
        Params::ImplyR { gamma, left, right } => {
            let mut v: Vec<String> = gamma.iter().map(|g| format!("gamma={}", f(g))).collect();
            v.push(format!("left={}", f(left)));
            v.push(format!("right={}", f(right)));
            v
        }
        Params::Path(path) => vec![format!("path={path}")],
        Params::Identity { lhs, rhs } => {
            vec![
                format!("lhs={}", print_term(lhs)),
                format!("rhs={}", print_term(rhs)),
            ]
        }
    };
    if kv.is_empty() {
        "-".to_string()
    } else {
        kv.join(" @ ")
    }
}

/// Parses a certificate and re-derives every conclusion. Returns the root,
/// which is the node on the last line.
pub fn read_certificate(text: &str) -> Result<Certificate, CertError> {
    let mut nodes: BTreeMap<usize, Certificate> = BTreeMap::new();
    let mut last = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let syntax = |message: String| CertError::Syntax { line, message };
        let rest = raw
            .strip_prefix("NODE ")
            .ok_or_else(|| syntax("expected `NODE`".into()))?;
        let (id, rest) = rest
            .split_once(' ')
            .ok_or_else(|| syntax("missing node body".into()))?;
        let id: usize = id
            .parse()
            .map_err(|_| syntax(format!("bad node id `{id}`")))?;
        if nodes.contains_key(&id) {
            return Err(syntax(format!("node {id} defined twice")));
        }
        let reject = |reason: String| CertError::Rejected {
            line,
            node: id,
            reason,
        };
        let cert = if let Some(body) = rest.strip_prefix("AXIOM ") {
            let (ax, body) = body
                .split_once(" SUBST ")
                .ok_or_else(|| syntax("missing SUBST".into()))?;
            let ax: AxiomId = ax.trim().parse().map_err(syntax)?;
            let (subst, ren) = body
                .rsplit_once("RENAME ")
                .ok_or_else(|| syntax("missing RENAME".into()))?;
            let subst = parse_substitution(subst).map_err(|e| syntax(e.to_string()))?;
            let renamings = parse_renamings(ren.trim()).map_err(syntax)?;
            let conclusion =
                instantiate_axiom(ax, &subst, &renamings).map_err(|e| reject(e.to_string()))?;
            Certificate {
                conclusion,
                node: Node::Axiom {
                    id: ax,
                    subst,
                    renamings,
                },
            }
        } else if let Some(body) = rest.strip_prefix("RULE ") {
            let (rule, body) = body
                .split_once(" PARAMS ")
                .ok_or_else(|| syntax("missing PARAMS".into()))?;
            let rule: RuleId = rule.trim().parse().map_err(syntax)?;
            let (params, ids) = body
                .rsplit_once(" PREMISES ")
                .ok_or_else(|| syntax("missing PREMISES".into()))?;
            let params = parse_params(rule, params.trim()).map_err(syntax)?;
            let mut premises = Vec::new();
            if ids.trim() != "-" {
                for p in ids.trim().split(',') {
                    let p: usize = p
                        .trim()
                        .parse()
                        .map_err(|_| syntax(format!("bad premise id `{p}`")))?;
                    let c = nodes
                        .remove(&p)
                        .ok_or_else(|| syntax(format!("premise {p} is undefined or reused")))?;
                    premises.push(c);
                }
            }
            apply_rule(rule, params, premises).map_err(|e| reject(e.to_string()))?
        } else if let Some(body) = rest.strip_prefix("OPEN LABEL ") {
            let (label, j) = body
                .split_once(" JUDGMENT ")
                .ok_or_else(|| syntax("missing JUDGMENT".into()))?;
            Certificate::open(parse_judgment(j.trim()).map_err(syntax)?, label.trim())
        } else {
            return Err(syntax("expected AXIOM, RULE or OPEN".into()));
        };
        nodes.insert(id, cert);
        last = Some((line, id));
    }
    let (line, root) = last.ok_or(CertError::Syntax {
        line: 0,
        message: "empty certificate".into(),
    })?;
    let cert = nodes.remove(&root).expect("root was just inserted");
    if let Some(orphan) = nodes.keys().next() {
        return Err(CertError::Syntax {
            line,
            message: format!("node {orphan} is not used by the root"),
        });
    }
    Ok(cert)
}

fn parse_renamings(text: &str) -> Result<Vec<(Variable, Variable)>, String> {
    if text == "-" {
        return Ok(vec![]);
    }
    text.split(',')
        .map(|pair| {
            let (x, y) = pair
                .split_once('>')
                .ok_or_else(|| format!("bad renaming `{pair}`"))?;
            Ok((Variable::new(x.trim()), Variable::new(y.trim())))
        })
        .collect()
}

fn parse_judgment(text: &str) -> Result<Judgment, String> {
    if let Some(f) = text.strip_prefix("VALID ") {
        return Ok(Judgment::Valid(
            parse_formula(f).map_err(|e| e.to_string())?,
        ));
    }
    if let Some(rest) = text.strip_prefix("PROGEQ ") {
        let (a, b) = rest
            .split_once(" == ")
            .ok_or_else(|| "PROGEQ needs `==`".to_string())?;
        return Ok(Judgment::ProgEq(
            parse_program(a).map_err(|e| e.to_string())?,
            parse_program(b).map_err(|e| e.to_string())?,
        ));
    }
    Err(format!("bad judgment `{text}`"))
}

struct Fields<'a>(Vec<(&'a str, &'a str)>);

impl<'a> Fields<'a> {
    fn parse(text: &'a str) -> Result<Self, String> {
        if text == "-" {
            return Ok(Fields(vec![]));
        }
        text.split(" @ ")
            .map(|kv| {
                kv.split_once('=')
                    .map(|(k, v)| (k.trim(), v.trim()))
                    .ok_or_else(|| format!("bad parameter `{kv}`"))
            })
            .collect::<Result<_, _>>()
            .map(Fields)
    }

    fn all<'s>(&'s self, key: &'s str) -> impl Iterator<Item = &'a str> + 's {
        self.0
            .iter()
            .filter(move |(k, _)| *k == key)
            .map(|(_, v)| *v)
    }

    fn one(&self, key: &str) -> Result<&'a str, String> {
        let mut it = self.all(key);
        match (it.next(), it.next()) {
            (Some(v), None) => Ok(v),
            (None, _) => Err(format!("missing parameter `{key}`")),
            _ => Err(format!("repeated parameter `{key}`")),
        }
    }
}

fn parse_params(rule: RuleId, text: &str) -> Result<Params, String> {
    let fields = Fields::parse(text)?;
    let formula = |s: &str| parse_formula(s).map_err(|e| e.to_string());
    let path = |s: &str| Path::parse(s).ok_or_else(|| format!("bad path `{s}`"));
    let subst = |s: &str| parse_substitution(s).map_err(|e| e.to_string());
    Ok(match rule {
        RuleId::US => Params::Subst(subst(fields.one("subst")?)?),
        RuleId::USR => Params::Usr {
            base: fields.one("base")?.parse()?,
            subst: subst(fields.one("subst")?)?,
        },
        RuleId::CQ => Params::Context(formula(fields.one("context")?)?),
        RuleId::CT => {
            Params::TermContext(parse_term(fields.one("context")?).map_err(|e| e.to_string())?)
        }
        RuleId::CP => Params::ProgramContext {
            context: formula(fields.one("context")?)?,
            path: path(fields.one("path")?)?,
        },
        RuleId::Loop => Params::Loop {
            gamma: fields.all("gamma").map(formula).collect::<Result<_, _>>()?,
            delta: fields.all("delta").map(formula).collect::<Result<_, _>>()?,
            invariant: formula(fields.one("invariant")?)?,
            program: parse_program(fields.one("program")?).map_err(|e| e.to_string())?,
            post: formula(fields.one("post")?)?,
        },
        RuleId::ImplyR => Params::ImplyR {
            gamma: fields.all("gamma").map(formula).collect::<Result<_, _>>()?,
            left: formula(fields.one("left")?)?,
            right: formula(fields.one("right")?)?,
        },
        RuleId::ModusPonens => Params::None,
        RuleId::EquivRewrite => Params::Path(path(fields.one("path")?)?),
        RuleId::PolyIdentity => Params::Identity {
            lhs: parse_term(fields.one("lhs")?).map_err(|e| e.to_string())?,
            rhs: parse_term(fields.one("rhs")?).map_err(|e| e.to_string())?,
        },
    })
}
