use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::State;
use super::{eval_formula, EvalError, Outcome};
use crate::par::{map_range, Exec};
use crate::statics::{all_vars, free_vars};
use crate::syntax::{Formula, Rational, Variable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Falsification {
    /// The lowest-numbered trial state on which the formula is false.
    Refuted {
        state: State,
        trial: usize,
    },
    NotRefuted {
        trials: usize,
        unknowns: usize,
    },
}

/// Samples one value per variable: numerator in -10..=10, denominator in 1..=4.
pub fn sample_state(vars: &[Variable], seed: u64, stream: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    State::from_pairs(vars.iter().map(|x| {
        let n: i64 = rng.random_range(-10..=10);
        let d: i64 = rng.random_range(1..=4);
        (x.clone(), Rational::new(n.into(), d.into()))
    }))
}

/// Searches random states for one where `f` evaluates to false.
pub fn falsify(
    f: &Formula,
    trials: usize,
    seed: u64,
    fuel: u32,
) -> Result<Falsification, EvalError> {
    falsify_with(Exec::default(), f, trials, seed, fuel)
}

pub fn falsify_with(
    exec: Exec,
    f: &Formula,
    trials: usize,
    seed: u64,
    fuel: u32,
) -> Result<Falsification, EvalError> {
    let vars: Vec<Variable> = match free_vars(f).finite() {
        Some(s) => s.iter().cloned().collect(),
        None => all_vars(f).into_iter().collect(),
    };
    let outcomes = map_range(exec, trials, |i| {
        let w = sample_state(&vars, seed, i as u64);
        eval_formula(&w, f, fuel).map(|o| (o, w))
    });
    let mut unknowns = 0;
    for (trial, r) in outcomes.into_iter().enumerate() {
        match r? {
            (Outcome::False, state) => return Ok(Falsification::Refuted { state, trial }),
            (Outcome::Unknown(_), _) => unknowns += 1,
            (Outcome::True, _) => {}
        }
    }
    Ok(Falsification::NotRefuted { trials, unknowns })
}
