//! Executable semantics used as an independent oracle for the kernel.
//!
//! Evaluation is exact over rationals. Loops run under a fuel bound, so
//! formula evaluation is three-valued: a box is true only when every run was
//! explored, but a violation found on a partial run is a real violation.

mod eval;
mod falsify;
mod ring;
mod state;

use thiserror::Error;

pub use eval::{eval_formula, eval_term, run_program, RunResult, MAX_BITS, MAX_STATES};
pub use falsify::{falsify, falsify_with, sample_state, Falsification};
pub use ring::{ring_normalize, Monomial, Poly};
pub use state::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnknownReason {
    FuelExhausted,
    Unsupported,
}

impl std::fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UnknownReason::FuelExhausted => "fuel exhausted",
            UnknownReason::Unsupported => "unsupported construct",
        })
    }
}

/// Strong Kleene truth values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    True,
    False,
    Unknown(UnknownReason),
}

impl Outcome {
    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Outcome {
        match self {
            Outcome::True => Outcome::False,
            Outcome::False => Outcome::True,
            u => u,
        }
    }

    pub fn and(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::False, _) | (_, Outcome::False) => Outcome::False,
            (Outcome::True, Outcome::True) => Outcome::True,
            (Outcome::Unknown(r), _) | (_, Outcome::Unknown(r)) => Outcome::Unknown(r),
        }
    }

    pub fn or(self, other: Outcome) -> Outcome {
        self.not().and(other.not()).not()
    }

    pub fn iff(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::Unknown(r), _) | (_, Outcome::Unknown(r)) => Outcome::Unknown(r),
            (a, b) => (a == b).into(),
        }
    }

    pub fn is_known(self) -> bool {
        !matches!(self, Outcome::Unknown(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("cannot evaluate {0}")]
    Unsupported(&'static str),
}

#[cfg(test)]
mod tests;
