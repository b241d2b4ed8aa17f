use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};

use super::EvalError;
use crate::syntax::{Rational, Term, Variable};

/// A product of variables with positive exponents, sorted by variable.
pub type Monomial = BTreeMap<Variable, u32>;

/// A polynomial in expanded canonical form. Zero coefficients are never
/// stored, so two polynomials are equal exactly when they are the same
/// function of their variables.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::new(), c);
        p
    }

    pub fn var(x: &Variable) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::from([(x.clone(), 1)]), Rational::one());
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                for (x, e) in m2 {
                    *m.entry(x.clone()).or_insert(0) += e;
                }
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(Rational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// The value of a polynomial without variables.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::new()).cloned(),
            _ => None,
        }
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let a = c.abs();
            let factors: Vec<String> = m
                .iter()
                .map(|(x, e)| {
                    if *e == 1 {
                        x.to_string()
                    } else {
                        format!("{x}^{e}")
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(f, "{a}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

pub fn ring_normalize(t: &Term) -> Result<Poly, EvalError> {
    Ok(match t {
        Term::Var(x) => Poly::var(x),
        Term::Num(n) => Poly::constant(n.clone()),
        Term::Plus(a, b) => ring_normalize(a)?.add(&ring_normalize(b)?),
        Term::Minus(a, b) => ring_normalize(a)?.add(&ring_normalize(b)?.neg()),
        Term::Times(a, b) => ring_normalize(a)?.mul(&ring_normalize(b)?),
        Term::Neg(a) => ring_normalize(a)?.neg(),
        Term::Power(a, n) => ring_normalize(a)?.pow(*n),
        Term::Func(..) => return Err(EvalError::Unsupported("function symbol")),
        Term::Dot => return Err(EvalError::Unsupported("dot placeholder")),
    })
}
