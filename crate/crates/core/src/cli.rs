//! Command-line front end. Each command works on source text and returns a
//! [`Report`]; [`run`] adds file handling on top.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path as FsPath, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use crate::kernel::{
    apply_rule, check_certificate, match_axiom, read_certificate, write_certificate, AxiomId,
    CertError, Certificate, Judgment, Params, RuleId, Verdict,
};
use crate::optimizer::{self, OptError, OptResult};
use crate::parser::{parse_formula, parse_substitution, parse_term, print_formula};
use crate::semantics::{falsify, Falsification};
use crate::statics::{all_vars, free_vars};
use crate::syntax::{Formula, Path, Program, Variable};

#[derive(Parser, Debug)]
#[command(
    name = "dlcert",
    version,
    about = "Uniform-substitution kernel for dynamic logic"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a formula in canonical form.
    Parse { file: PathBuf },
    /// Use an axiom once, left to right, at the top of a formula.
    Instantiate {
        axiom: String,
        file: PathBuf,
        /// Instantiate the axiom with this substitution instead of matching.
        #[arg(long)]
        subst: Option<PathBuf>,
        #[arg(long)]
        emit_cert: Option<PathBuf>,
    },
    /// Search for a state where two formulas disagree.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 50)]
        fuel: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Apply a certified transformation.
    Optimize {
        pass: Pass,
        file: PathBuf,
        #[command(flatten)]
        args: PassArgs,
        #[arg(long)]
        emit_cert: Option<PathBuf>,
    },
    /// Check a certificate against the formula it claims to prove.
    CheckCert { cert: PathBuf, formula: PathBuf },
    /// Apply the loop invariant rule, leaving its three premises open.
    Loop {
        file: PathBuf,
        #[arg(long)]
        invariant: String,
        #[arg(long)]
        emit_cert: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Pass {
    Cse,
    Copyprop,
    Constfold,
    Commute,
    Unwind,
}

#[derive(clap::Args, Debug, Default, Clone)]
pub struct PassArgs {
    /// cse: the subexpression to pull out.
    #[arg(long)]
    pub subexpr: Option<String>,
    /// cse: the variable to store it in.
    #[arg(long)]
    pub fresh: Option<String>,
    /// copyprop: path of the assignment.
    #[arg(long)]
    pub assign: Option<String>,
    /// copyprop: comma-separated paths of the reads to replace; defaults to
    /// every read after the assignment.
    #[arg(long)]
    pub sites: Option<String>,
    /// commute, unwind: path of the term or loop.
    #[arg(long)]
    pub site: Option<String>,
    /// commute: the first occurrence of this term, instead of --site.
    #[arg(long)]
    pub from: Option<String>,
    /// commute: the replacement term.
    #[arg(long)]
    pub to: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Refuted = 1,
    Unknown = 2,
    Usage = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub stdout: String,
    pub stderr: String,
    pub status: ExitStatus,
    /// Certificate to write when the command was asked to emit one.
    pub certificate: Option<Certificate>,
}

impl Report {
    fn new(status: ExitStatus, stdout: impl Into<String>) -> Report {
        Report {
            stdout: stdout.into(),
            stderr: String::new(),
            status,
            certificate: None,
        }
    }

    fn usage(err: impl std::fmt::Display) -> Report {
        Report {
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
            status: ExitStatus::Usage,
            certificate: None,
        }
    }

    fn with_cert(mut self, c: Certificate) -> Report {
        self.certificate = Some(c);
        self
    }
}

fn formula(src: &str) -> anyhow::Result<Formula> {
    parse_formula(src.trim()).map_err(|e| anyhow!("{e}"))
}

pub fn parse_cmd(src: &str) -> Report {
    match formula(src) {
        Ok(f) => Report::new(ExitStatus::Success, format!("{}\n", print_formula(&f))),
        Err(e) => Report::usage(e),
    }
}

pub fn instantiate_cmd(axiom: &str, src: &str, subst: Option<&str>) -> Report {
    let id: AxiomId = match axiom.parse() {
        Ok(id) => id,
        Err(e) => return Report::usage(e),
    };
    let (sigma, renamings) = match subst {
        Some(s) => match parse_substitution(s.trim()) {
            Ok(sigma) => (sigma, vec![]),
            Err(e) => return Report::usage(e),
        },
        None => {
            let target = match formula(src) {
                Ok(f) => f,
                Err(e) => return Report::usage(e),
            };
            match match_axiom(id, &target) {
                Some(m) => m,
                None => return Report::new(ExitStatus::Refuted, "n/a\n"),
            }
        }
    };
    match Certificate::axiom(id, sigma, renamings) {
        Ok(c) => {
            let text = match &c.conclusion {
                Judgment::Valid(Formula::Equiv(_, r)) if subst.is_none() => print_formula(r),
                j => j.to_string(),
            };
            Report::new(ExitStatus::Success, format!("{text}\n")).with_cert(c)
        }
        Err(e) => Report::new(ExitStatus::Refuted, format!("clash: {e}\n")),
    }
}

pub fn equiv_cmd(a: &str, b: &str, trials: usize, fuel: u32, seed: u64) -> Report {
    let (fa, fb) = match (formula(a), formula(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return Report::usage(e),
    };
    let eq = Formula::equiv(fa, fb);
    match falsify(&eq, trials, seed, fuel) {
        Ok(Falsification::Refuted { state, trial }) => {
            let vars: Vec<Variable> = match free_vars(&eq).finite() {
                Some(v) => v.iter().cloned().collect(),
                None => all_vars(&eq).into_iter().collect(),
            };
            Report::new(
                ExitStatus::Refuted,
                format!("refuted\n{}\ntrial={trial}\n", state.show(&vars)),
            )
        }
        Ok(Falsification::NotRefuted { trials, unknowns }) => Report::new(
            if unknowns == 0 {
                ExitStatus::Success
            } else {
                ExitStatus::Unknown
            },
            format!("not-refuted trials={trials} unknowns={unknowns}\n"),
        ),
        Err(e) => Report::new(ExitStatus::Unknown, format!("unknown: {e}\n")),
    }
}

fn path_arg(s: Option<&String>, what: &str) -> anyhow::Result<Path> {
    let s = s.with_context(|| format!("missing --{what}"))?;
    Path::parse(s).with_context(|| format!("bad path `{s}`"))
}

fn run_pass(
    pass: Pass,
    f: &Formula,
    args: &PassArgs,
) -> anyhow::Result<Result<OptResult, OptError>> {
    let term = |s: &str| parse_term(s).map_err(|e| anyhow!("{e}"));
    Ok(match pass {
        Pass::Cse => {
            let sub = term(args.subexpr.as_deref().context("missing --subexpr")?)?;
            let fresh = Variable::new(args.fresh.as_deref().context("missing --fresh")?);
            optimizer::cse(f, &sub, &fresh)
        }
        Pass::Copyprop => {
            let assign = path_arg(args.assign.as_ref(), "assign")?;
            let sites = match &args.sites {
                Some(s) => s
                    .split(',')
                    .map(|p| Path::parse(p).with_context(|| format!("bad path `{p}`")))
                    .collect::<anyhow::Result<Vec<_>>>()?,
                None => default_copy_sites(f, &assign),
            };
            optimizer::copy_propagate(f, &assign, &sites)
        }
        Pass::Constfold => optimizer::const_fold(f),
        Pass::Commute => {
            let to = term(args.to.as_deref().context("missing --to")?)?;
            let site = match &args.from {
                Some(from) => optimizer::term_sites(f, &term(from)?)
                    .into_iter()
                    .next()
                    .with_context(|| format!("`{from}` does not occur"))?,
                None => path_arg(args.site.as_ref(), "site")?,
            };
            optimizer::commute_term(f, &site, &to)
        }
        Pass::Unwind => {
            let site = match &args.site {
                Some(_) => path_arg(args.site.as_ref(), "site")?,
                None => optimizer::while_sites(f)
                    .into_iter()
                    .next()
                    .context("no while loop to unwind")?,
            };
            optimizer::unwind_loop(f, &site)
        }
    })
}

/// Reads of the assigned variable that come after the assignment.
fn default_copy_sites(f: &Formula, assign: &Path) -> Vec<Path> {
    let Some(crate::syntax::ExprRef::Program(Program::Assign(x, _))) = f.at(assign) else {
        return vec![];
    };
    let steps = assign.steps();
    let scope: Vec<Path> = match steps.split_last() {
        Some((0, parent)) => {
            let parent = Path::new(parent.to_vec());
            match f.at(&parent) {
                Some(crate::syntax::ExprRef::Program(Program::Seq(..))) => {
                    let outer = parent.parent().unwrap_or_default();
                    vec![parent.child(1), outer.child(1)]
                }
                _ => vec![parent.child(1)],
            }
        }
        _ => vec![],
    };
    optimizer::var_sites(f, x)
        .into_iter()
        .filter(|p| scope.iter().any(|s| s.is_prefix_of(p)))
        .collect()
}

pub fn optimize_cmd(pass: Pass, src: &str, args: &PassArgs) -> Report {
    let f = match formula(src) {
        Ok(f) => f,
        Err(e) => return Report::usage(e),
    };
    match run_pass(pass, &f, args) {
        Err(e) => Report::usage(e),
        Ok(Err(OptError::NotApplicable(reason))) => {
            Report::new(ExitStatus::Refuted, format!("not applicable: {reason}\n"))
        }
        Ok(Err(OptError::Oracle(m))) => {
            Report::new(ExitStatus::Refuted, format!("arithmetic oracle: {m}\n"))
        }
        Ok(Err(e)) => Report::usage(e),
        Ok(Ok(r)) => match check_certificate(&r.certificate) {
            Verdict::Certified => Report::new(
                ExitStatus::Success,
                format!("{}\n", print_formula(&r.output)),
            )
            .with_cert(r.certificate),
            v => Report::new(ExitStatus::Refuted, format!("{v}\n")),
        },
    }
}

pub fn check_cert_cmd(cert: &str, claim: &str) -> Report {
    let c = match read_certificate(cert) {
        Ok(c) => c,
        Err(e @ CertError::Rejected { .. }) => {
            return Report::new(ExitStatus::Refuted, format!("rejected: {e}\n"))
        }
        Err(e) => return Report::usage(e),
    };
    let claim = match formula(claim) {
        Ok(f) => f,
        Err(e) => return Report::usage(e),
    };
    if c.conclusion != Judgment::Valid(claim) {
        return Report::new(
            ExitStatus::Refuted,
            format!("rejected: certificate proves {}\n", c.conclusion),
        );
    }
    let v = check_certificate(&c);
    let status = match v {
        Verdict::Certified => ExitStatus::Success,
        Verdict::CertifiedWithOpenPremises(_) => ExitStatus::Unknown,
        Verdict::Rejected { .. } => ExitStatus::Refuted,
    };
    Report::new(status, format!("{v}\n"))
}

/// Builds `gamma -> [loop]post` from the loop rule with open premises.
pub fn loop_certificate(f: &Formula, invariant: &Formula) -> anyhow::Result<Certificate> {
    let (gamma, boxed) = match f {
        Formula::Implies(g, b) => (vec![(**g).clone()], (**b).clone()),
        other => (vec![], other.clone()),
    };
    let Formula::Box(program, post) = &boxed else {
        bail!("expected `[loop]post` or `gamma -> [loop]post`");
    };
    let (body, guard) = match program.as_ref() {
        Program::Repeat(a) => ((**a).clone(), None),
        Program::While(q, a) => ((**a).clone(), Some(q.clone())),
        _ => bail!("the box program is not a loop"),
    };
    let j = invariant.clone();
    let with_guard = |negate: bool| match &guard {
        None => j.clone(),
        Some(q) if negate => Formula::and(j.clone(), Formula::not(q.clone())),
        Some(q) => Formula::and(j.clone(), q.clone()),
    };
    let open = |f: Formula, label: &str| Certificate::open(Judgment::Valid(f), label);
    let premises = vec![
        open(
            Formula::sequent(&gamma, std::slice::from_ref(&j)),
            "initially",
        ),
        open(
            Formula::implies(with_guard(false), Formula::boxed(body, j.clone())),
            "preserved",
        ),
        open(
            Formula::implies(with_guard(true), (**post).clone()),
            "use case",
        ),
    ];
    let rule = apply_rule(
        RuleId::Loop,
        Params::Loop {
            gamma: gamma.clone(),
            delta: vec![],
            invariant: j.clone(),
            program: (**program).clone(),
            post: (**post).clone(),
        },
        premises,
    )?;
    if gamma.is_empty() {
        return Ok(rule);
    }
    let left = gamma.into_iter().next().expect("one antecedent");
    Ok(apply_rule(
        RuleId::ImplyR,
        Params::ImplyR {
            gamma: vec![],
            left,
            right: boxed.clone(),
        },
        vec![rule],
    )?)
}

pub fn loop_cmd(src: &str, invariant: &str) -> Report {
    let (f, j) = match (formula(src), formula(invariant)) {
        (Ok(f), Ok(j)) => (f, j),
        (Err(e), _) | (_, Err(e)) => return Report::usage(e),
    };
    match loop_certificate(&f, &j) {
        Ok(c) => {
            let v = check_certificate(&c);
            let status = match v {
                Verdict::Certified => ExitStatus::Success,
                Verdict::CertifiedWithOpenPremises(_) => ExitStatus::Unknown,
                Verdict::Rejected { .. } => ExitStatus::Refuted,
            };
            Report::new(status, format!("{v}\n")).with_cert(c)
        }
        Err(e) => Report::usage(e),
    }
}

fn read(path: &FsPath) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(report: &mut Report, target: Option<&PathBuf>) {
    let (Some(path), Some(c)) = (target, &report.certificate) else {
        return;
    };
    if let Err(e) = fs::write(path, write_certificate(c)) {
        let _ = writeln!(report.stderr, "error: cannot write {}: {e}", path.display());
        report.status = ExitStatus::Usage;
    }
}

/// Runs one command, reading inputs from and writing certificates to disk.
pub fn run(cli: &Cli) -> Report {
    let attempt = || -> anyhow::Result<Report> {
        Ok(match &cli.command {
            Command::Parse { file } => parse_cmd(&read(file)?),
            Command::Instantiate {
                axiom,
                file,
                subst,
                emit_cert,
            } => {
                let subst = subst.as_deref().map(read).transpose()?;
                let src = if subst.is_some() && !file.exists() {
                    String::new()
                } else {
                    read(file)?
                };
                let mut r = instantiate_cmd(axiom, &src, subst.as_deref());
                emit(&mut r, emit_cert.as_ref());
                r
            }
            Command::Equiv {
                a,
                b,
                trials,
                fuel,
                seed,
            } => equiv_cmd(&read(a)?, &read(b)?, *trials, *fuel, *seed),
            Command::Optimize {
                pass,
                file,
                args,
                emit_cert,
            } => {
                let mut r = optimize_cmd(*pass, &read(file)?, args);
                emit(&mut r, emit_cert.as_ref());
                r
            }
            Command::CheckCert { cert, formula } => check_cert_cmd(&read(cert)?, &read(formula)?),
            Command::Loop {
                file,
                invariant,
                emit_cert,
            } => {
                let mut r = loop_cmd(&read(file)?, invariant);
                emit(&mut r, emit_cert.as_ref());
                r
            }
        })
    };
    attempt().unwrap_or_else(|e| Report::usage(format!("{e:#}")))
}
