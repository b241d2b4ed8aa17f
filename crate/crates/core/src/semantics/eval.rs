use std::collections::BTreeSet;

use num::{One, Zero};

use super::state::State;
use super::{EvalError, Outcome, UnknownReason};
use crate::statics::{bound_vars, free_vars};
use crate::syntax::{Formula, Program, Rational, Term};

/// Largest state set kept between program steps; beyond it runs truncate.
pub const MAX_STATES: usize = 2000;
/// Largest numerator or denominator size, in bits, a state may hold.
pub const MAX_BITS: u64 = 1024;

pub fn eval_term(w: &State, t: &Term) -> Result<Rational, EvalError> {
    Ok(match t {
        Term::Var(x) => w.get(x).clone(),
        Term::Num(n) => n.clone(),
        Term::Plus(a, b) => eval_term(w, a)? + eval_term(w, b)?,
        Term::Minus(a, b) => eval_term(w, a)? - eval_term(w, b)?,
        Term::Times(a, b) => eval_term(w, a)? * eval_term(w, b)?,
        Term::Neg(a) => -eval_term(w, a)?,
        Term::Power(a, n) => {
            let base = eval_term(w, a)?;
            let mut acc = Rational::one();
            for _ in 0..*n {
                acc *= &base;
            }
            acc
        }
        Term::Func(..) => return Err(EvalError::Unsupported("function symbol")),
        Term::Dot => return Err(EvalError::Unsupported("dot placeholder")),
    })
}

/// All final states of `p` from `w`, with loops unrolled at most `fuel`
/// times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub reached: BTreeSet<State>,
    /// Why `reached` may be missing states, if it may.
    pub truncated: Option<UnknownReason>,
}

impl RunResult {
    pub fn is_truncated(&self) -> bool {
        self.truncated.is_some()
    }
}

pub fn run_program(w: &State, p: &Program, fuel: u32) -> Result<RunResult, EvalError> {
    let mut r = Runner {
        fuel,
        truncated: None,
    };
    let reached = r.run(BTreeSet::from([w.clone()]), p)?;
    Ok(RunResult {
        reached,
        truncated: r.truncated,
    })
}

pub fn eval_formula(w: &State, f: &Formula, fuel: u32) -> Result<Outcome, EvalError> {
    Ok(match f {
        Formula::True => Outcome::True,
        Formula::False => Outcome::False,
        Formula::Cmp(op, a, b) => op.holds(&eval_term(w, a)?, &eval_term(w, b)?).into(),
        Formula::Not(a) => eval_formula(w, a, fuel)?.not(),
        Formula::And(a, b) => eval_formula(w, a, fuel)?.and(eval_formula(w, b, fuel)?),
        Formula::Or(a, b) => eval_formula(w, a, fuel)?.or(eval_formula(w, b, fuel)?),
        Formula::Implies(a, b) => eval_formula(w, a, fuel)?
            .not()
            .or(eval_formula(w, b, fuel)?),
        Formula::Equiv(a, b) => eval_formula(w, a, fuel)?.iff(eval_formula(w, b, fuel)?),
        Formula::Forall(..) | Formula::Exists(..) => {
            return Err(EvalError::Unsupported("quantifier"))
        }
        Formula::Pred(..) => return Err(EvalError::Unsupported("predicate symbol")),
        Formula::Box(p, post) => {
            let run = run_program(w, p, fuel)?;
            let mut acc = match run.truncated {
                Some(r) => Outcome::Unknown(r),
                None => Outcome::True,
            };
            for s in &run.reached {
                acc = acc.and(eval_formula(s, post, fuel)?);
                if acc == Outcome::False {
                    break;
                }
            }
            acc
        }
        Formula::Diamond(p, post) => {
            let run = run_program(w, p, fuel)?;
            let mut acc = match run.truncated {
                Some(r) => Outcome::Unknown(r),
                None => Outcome::False,
            };
            for s in &run.reached {
                acc = acc.or(eval_formula(s, post, fuel)?);
                if acc == Outcome::True {
                    break;
                }
            }
            acc
        }
    })
}

struct Runner {
    fuel: u32,
    truncated: Option<UnknownReason>,
}

impl Runner {
    fn truncate(&mut self, why: UnknownReason) {
        self.truncated.get_or_insert(why);
    }

    fn cap(&mut self, mut states: BTreeSet<State>) -> BTreeSet<State> {
        if states.len() > MAX_STATES {
            self.truncate(UnknownReason::FuelExhausted);
            while states.len() > MAX_STATES {
                states.pop_last();
            }
        }
        states
    }

    fn run(&mut self, states: BTreeSet<State>, p: &Program) -> Result<BTreeSet<State>, EvalError> {
        if states.is_empty() {
            return Ok(states);
        }
        Ok(match p {
            Program::Assign(x, e) => {
                let mut out = BTreeSet::new();
                for mut s in states {
                    let v = eval_term(&s, e)?;
                    if !representable(&v) {
                        self.truncate(UnknownReason::FuelExhausted);
                        continue;
                    }
                    s.set(x.clone(), v);
                    out.insert(s);
                }
                out
            }
            Program::Test(q) => {
                let mut out = BTreeSet::new();
                for s in states {
                    match eval_formula(&s, q, self.fuel)? {
                        Outcome::True => {
                            out.insert(s);
                        }
                        Outcome::False => {}
                        Outcome::Unknown(r) => self.truncate(r),
                    }
                }
                out
            }
            Program::Choice(a, b) => {
                let mut out = self.run(states.clone(), a)?;
                out.extend(self.run(states, b)?);
                self.cap(out)
            }
            Program::Seq(a, b) => {
                let mid = self.run(states, a)?;
                self.run(mid, b)?
            }
            Program::If(q, a, b) => {
                let (mut yes, mut no) = (BTreeSet::new(), BTreeSet::new());
                for s in states {
                    match eval_formula(&s, q, self.fuel)? {
                        Outcome::True => {
                            yes.insert(s);
                        }
                        Outcome::False => {
                            no.insert(s);
                        }
                        Outcome::Unknown(r) => self.truncate(r),
                    }
                }
                let mut out = self.run(yes, a)?;
                match b {
                    Some(b) => out.extend(self.run(no, b)?),
                    None => out.extend(no),
                }
                self.cap(out)
            }
            Program::Repeat(body) => {
                let mut visited = states.clone();
                let mut frontier = states;
                for _ in 0..self.fuel {
                    let next: BTreeSet<State> = self
                        .run(frontier, body)?
                        .into_iter()
                        .filter(|s| !visited.contains(s))
                        .collect();
                    visited.extend(next.iter().cloned());
                    frontier = next;
                    if frontier.is_empty() {
                        break;
                    }
                    visited = self.cap(visited);
                }
                if !frontier.is_empty() {
                    self.truncate(UnknownReason::FuelExhausted);
                }
                visited
            }
            Program::While(q, body) => {
                // A guard the body cannot change stays true forever once true.
                let stuck = !free_vars(q).intersects(&bound_vars(body));
                let mut visited = states.clone();
                let mut frontier = states;
                let mut out = BTreeSet::new();
                for round in 0..=self.fuel {
                    let mut go = BTreeSet::new();
                    for s in frontier {
                        match eval_formula(&s, q, self.fuel)? {
                            Outcome::True if stuck => {}
                            Outcome::True => {
                                go.insert(s);
                            }
                            Outcome::False => {
                                out.insert(s);
                            }
                            Outcome::Unknown(r) => self.truncate(r),
                        }
                    }
                    if go.is_empty() {
                        break;
                    }
                    if round == self.fuel {
                        self.truncate(UnknownReason::FuelExhausted);
                        break;
                    }
                    frontier = self
                        .run(go, body)?
                        .into_iter()
                        .filter(|s| !visited.contains(s))
                        .collect();
                    visited.extend(frontier.iter().cloned());
                    visited = self.cap(visited);
                }
                self.cap(out)
            }
            Program::Ode(..) | Program::Const(_) => {
                self.truncate(UnknownReason::Unsupported);
                BTreeSet::new()
            }
        })
    }
}

impl From<bool> for Outcome {
    fn from(b: bool) -> Self {
        if b {
            Outcome::True
        } else {
            Outcome::False
        }
    }
}

/// Whether `v` is a number that can be stored in a state.
pub fn representable(v: &Rational) -> bool {
    v.is_zero() || (v.numer().bits() <= MAX_BITS && v.denom().bits() <= MAX_BITS)
}
