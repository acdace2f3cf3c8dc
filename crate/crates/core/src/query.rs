//! Textual outcome predicates, as accepted by the CLI and Python bindings.
//!
//! A marginal predicate is one of
//!
//! * `match`: all components end in the same letter (`Au.Bu`, `Ad.Bd`)
//! * `mismatch`: the negation of `match`
//! * `is:LABEL`: equals the wire label
//! * `has:TOKEN`: some component equals `TOKEN`
//! * `true`
//!
//! A query is a marginal optionally prefixed by a quantifier over the factors
//! of a tensor power: `all-`, `any-` or `exactly-K-`. Without a quantifier
//! the marginal applies to the whole label.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::{FactorQuery, OutcomeLabel, Power};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predicate {
    Match,
    Mismatch,
    Is(OutcomeLabel),
    Has(String),
    True,
}

impl Predicate {
    pub fn test(&self, label: &OutcomeLabel) -> bool {
        match self {
            Predicate::Match => all_same_suffix(label),
            Predicate::Mismatch => !all_same_suffix(label),
            Predicate::Is(l) => l == label,
            Predicate::Has(t) => label.components().iter().any(|c| c == t),
            Predicate::True => true,
        }
    }
}

fn all_same_suffix(label: &OutcomeLabel) -> bool {
    let mut last = label.components().iter().map(|c| c.chars().last());
    let first = last.next().flatten();
    last.all(|c| c == first)
}

impl FromStr for Predicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "match" => Predicate::Match,
            "mismatch" => Predicate::Mismatch,
            "true" => Predicate::True,
            _ => match s.split_once(':') {
                Some(("is", l)) => Predicate::Is(l.parse()?),
                Some(("has", t)) => {
                    crate::kernel::validate_token(t)?;
                    Predicate::Has(t.to_string())
                }
                _ => return Err(Error::InvalidArgument(format!("unknown predicate {s:?}"))),
            },
        })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Match => f.write_str("match"),
            Predicate::Mismatch => f.write_str("mismatch"),
            Predicate::Is(l) => write!(f, "is:{}", l.to_wire()),
            Predicate::Has(t) => write!(f, "has:{t}"),
            Predicate::True => f.write_str("true"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    All,
    Any,
    Exactly(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub quantifier: Option<Quantifier>,
    pub predicate: Predicate,
}

impl Query {
    /// Probability of the query on a (possibly symbolic) tensor power.
    pub fn probability(&self, power: &Power) -> Result<Rational> {
        let m = |l: &OutcomeLabel| self.predicate.test(l);
        let q = match self.quantifier {
            None => FactorQuery::Joint(&m),
            Some(Quantifier::All) => FactorQuery::Every(&m),
            Some(Quantifier::Any) => FactorQuery::Any(&m),
            Some(Quantifier::Exactly(k)) => FactorQuery::Exactly(k, &m),
        };
        power.probability(&q)
    }
}

impl FromStr for Query {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (quantifier, rest) = if let Some(r) = s.strip_prefix("all-") {
            (Some(Quantifier::All), r)
        } else if let Some(r) = s.strip_prefix("any-") {
            (Some(Quantifier::Any), r)
        } else if let Some(r) = s.strip_prefix("exactly-") {
            let (k, r) = r
                .split_once('-')
                .ok_or_else(|| Error::InvalidArgument(format!("bad query {s:?}")))?;
            let k = k
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad count in {s:?}")))?;
            (Some(Quantifier::Exactly(k)), r)
        } else {
            (None, s)
        };
        Ok(Query {
            quantifier,
            predicate: rest.parse()?,
        })
    }
}
