//! Certified program transformations for hybrid programs in differential
//! dynamic logic.
//!
//! Every optimizer pass returns its output together with a certificate that
//! the kernel re-checks from axioms and rules, using uniform substitution as
//! the only way to instantiate axioms.

pub mod cli;
pub mod gen;
pub mod kernel;
pub mod optimizer;
pub mod par;
pub mod parser;
pub mod semantics;
pub mod statics;
pub mod syntax;
pub mod usubst;

pub use parser::{
    parse_formula, parse_program, parse_substitution, parse_term, pretty_print, ParseError,
};
pub use semantics::{
    eval_formula, eval_term, falsify, ring_normalize, run_program, Outcome, State,
};
pub use statics::{bound_vars, free_vars, must_bound_vars, signature, Symbol, VarSet};
pub use syntax::{ExprRef, Formula, Path, Program, Term, Variable};
pub use usubst::{apply_usubst, uniform_rename, ClashError, UniformSubstitution};
