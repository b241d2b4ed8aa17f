use std::collections::BTreeMap;
use std::fmt;

use num::Zero;

use crate::syntax::{Rational, Variable};

/// A total assignment of exact rationals to variables: a default value
/// plus finitely many overrides.
///
/// Overrides equal to the default are never stored, so two states are equal
/// exactly when they agree on every variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct State {
    default: Rational,
    overrides: BTreeMap<Variable, Rational>,
}

impl Default for State {
    fn default() -> Self {
        State::constant(Rational::zero())
    }
}

impl State {
    pub fn constant(default: Rational) -> Self {
        State {
            default,
            overrides: BTreeMap::new(),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (Variable, Rational)>>(pairs: I) -> Self {
        let mut s = State::default();
        for (x, v) in pairs {
            s.set(x, v);
        }
        s
    }

    pub fn get(&self, x: &Variable) -> &Rational {
        self.overrides.get(x).unwrap_or(&self.default)
    }

    pub fn set(&mut self, x: Variable, v: Rational) {
        if v == self.default {
            self.overrides.remove(&x);
        } else {
            self.overrides.insert(x, v);
        }
    }

    pub fn with(mut self, x: &str, v: Rational) -> Self {
        self.set(Variable::new(x), v);
        self
    }

    pub fn default_value(&self) -> &Rational {
        &self.default
    }

    /// Variables whose value differs from the default.
    pub fn overridden(&self) -> impl Iterator<Item = (&Variable, &Rational)> {
        self.overrides.iter()
    }

    /// Renders the given variables as `x=7/2 y=0`.
    pub fn show<'a>(&self, vars: impl IntoIterator<Item = &'a Variable>) -> String {
        vars.into_iter()
            .map(|x| format!("{x}={}", self.get(x)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Whether both states agree on every variable outside `vars`.
    pub fn agrees_outside(&self, other: &State, vars: &crate::statics::VarSet) -> bool {
        if vars.is_all() {
            return true;
        }
        if self.default != other.default {
            return false;
        }
        self.overrides
            .keys()
            .chain(other.overrides.keys())
            .filter(|x| !vars.contains(x))
            .all(|x| self.get(x) == other.get(x))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, v)) in self.overrides.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}={v}")?;
        }
        if !self.overrides.is_empty() {
            f.write_str(", ")?;
        }
        write!(f, "_={}}}", self.default)
    }
}
