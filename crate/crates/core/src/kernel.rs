//! Kernels: finite multisets of outcome-labelled universes.
//!
//! A kernel maps each outcome label to a positive count of parallel universes.
//! Probabilities are count ratios, so they are always exact rationals.
//! Independent events compose by tensor product; repeated experiments are
//! tensor powers, which stay symbolic once they are too large to list.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default cap on the number of universes [`Kernel::enumerate_universes`] lists.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;

/// Separator between label components in machine-readable formats.
pub const COMPONENT_SEPARATOR: char = '.';

/// One token per event, in event order. Ordered lexicographically by
/// component.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OutcomeLabel(Vec<String>);

pub(crate) fn validate_token(token: &str) -> Result<()> {
    let ok = !token.is_empty()
        && token
            .chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '+');
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidLabel(format!("bad token {token:?}")))
    }
}

impl OutcomeLabel {
    pub fn new<I, S>(components: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let components: Vec<String> = components.into_iter().map(Into::into).collect();
        if components.is_empty() {
            return Err(Error::InvalidLabel("empty label".into()));
        }
        for c in &components {
            validate_token(c)?;
        }
        Ok(OutcomeLabel(components))
    }

    pub fn single(token: impl Into<String>) -> Result<Self> {
        OutcomeLabel::new([token.into()])
    }

    pub fn components(&self) -> &[String] {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &OutcomeLabel) -> OutcomeLabel {
        let mut c = self.0.clone();
        c.extend(other.0.iter().cloned());
        OutcomeLabel(c)
    }

    /// Reorders components: output position `i` takes component `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<OutcomeLabel> {
        check_permutation(perm, self.width())?;
        Ok(OutcomeLabel(
            perm.iter().map(|&i| self.0[i].clone()).collect(),
        ))
    }

    /// Splits into consecutive factors of `width` components each.
    pub fn factors(&self, width: usize) -> Result<Vec<OutcomeLabel>> {
        if width == 0 || !self.width().is_multiple_of(width) {
            return Err(Error::InvalidLabel(format!(
                "label {self} does not split into factors of width {width}"
            )));
        }
        Ok(self
            .0
            .chunks(width)
            .map(|c| OutcomeLabel(c.to_vec()))
            .collect())
    }

    /// Components joined by [`COMPONENT_SEPARATOR`].
    pub fn to_wire(&self) -> String {
        let sep = COMPONENT_SEPARATOR.to_string();
        self.0.join(&sep)
    }
}

pub(crate) fn check_permutation(perm: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    if perm.len() != len {
        return Err(Error::InvalidArgument(format!(
            "permutation {perm:?} has wrong length for {len} components"
        )));
    }
    for &i in perm {
        if i >= len || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of 0..{len}"
            )));
        }
    }
    Ok(())
}

/// Human-readable form: components concatenated, as in `AuBu`.
impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            f.write_str(c)?;
        }
        Ok(())
    }
}

/// Parses the wire form (`Au.Bu`).
impl FromStr for OutcomeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OutcomeLabel::new(s.split(COMPONENT_SEPARATOR))
    }
}

/// Finite multiset of outcome-labelled universes.
///
/// Every count is at least one. [`Kernel::from_counts`] keeps the counts it is
/// given; every other constructor returns the canonical (gcd 1) form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Kernel {
    counts: BTreeMap<OutcomeLabel, BigUint>,
    total: BigUint,
}

impl Kernel {
    pub fn from_counts<I, C>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OutcomeLabel, C)>,
        C: Into<BigUint>,
    {
        let mut map: BTreeMap<OutcomeLabel, BigUint> = BTreeMap::new();
        for (label, count) in counts {
            let count = count.into();
            if count.is_zero() {
                return Err(Error::InvalidArgument(format!(
                    "count for {label} must be at least 1"
                )));
            }
            *map.entry(label).or_insert_with(BigUint::zero) += count;
        }
        if map.is_empty() {
            return Err(Error::EmptyKernel);
        }
        let total = map.values().sum();
        Ok(Kernel { counts: map, total })
    }

    /// Convenience constructor from `(wire label, count)` pairs.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        let labelled = pairs
            .into_iter()
            .map(|(l, c)| Ok((l.parse::<OutcomeLabel>()?, BigUint::from(c))))
            .collect::<Result<Vec<_>>>()?;
        Kernel::from_counts(labelled)
    }

    /// Counts proportional to `dist` over the lcm of its denominators.
    pub fn from_probs(dist: &BTreeMap<OutcomeLabel, Rational>) -> Result<Self> {
        if dist.is_empty() {
            return Err(Error::EmptyKernel);
        }
        for (label, p) in dist {
            if !p.is_positive() {
                return Err(Error::NonPositiveProbability {
                    label: label.to_string(),
                    value: p.to_string(),
                });
            }
        }
        let sum: Rational = dist.values().sum();
        if sum != Rational::one() {
            return Err(Error::ProbabilitySum(sum.to_string()));
        }
        let lcm = dist
            .values()
            .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let counts = dist.iter().map(|(label, p)| {
            let n = p.scaled_numerator(&lcm);
            (label.clone(), n.to_biguint().expect("positive count"))
        });
        Ok(Kernel::from_counts(counts)?.reduce())
    }

    pub fn counts(&self) -> &BTreeMap<OutcomeLabel, BigUint> {
        &self.counts
    }

    pub fn count(&self, label: &OutcomeLabel) -> BigUint {
        self.counts.get(label).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &OutcomeLabel> {
        self.counts.keys()
    }

    /// Common label width, if every label has the same number of components.
    pub fn width(&self) -> Option<usize> {
        let mut widths = self.counts.keys().map(OutcomeLabel::width);
        let first = widths.next()?;
        widths.all(|w| w == first).then_some(first)
    }

    pub fn is_canonical(&self) -> bool {
        self.gcd().is_one()
    }

    fn gcd(&self) -> BigUint {
        self.counts
            .values()
            .fold(BigUint::zero(), |acc, c| acc.gcd(c))
    }

    /// Divides every count by the gcd of all counts.
    pub fn reduce(&self) -> Kernel {
        let g = self.gcd();
        if g.is_one() {
            return self.clone();
        }
        let counts: BTreeMap<_, _> = self
            .counts
            .iter()
            .map(|(l, c)| (l.clone(), c / &g))
            .collect();
        let total = &self.total / &g;
        Kernel { counts, total }
    }

    /// Product kernel: labels concatenate and counts multiply.
    pub fn tensor(&self, other: &Kernel) -> Kernel {
        let mut counts = BTreeMap::new();
        for (a, ca) in &self.counts {
            for (b, cb) in &other.counts {
                counts.insert(a.concat(b), ca * cb);
            }
        }
        let total = &self.total * &other.total;
        Kernel { counts, total }.reduce()
    }

    /// `self^⊗n`, listed explicitly only if its total is at most
    /// `materialize_limit`.
    pub fn power(&self, n: u64, materialize_limit: &BigUint) -> Result<Power> {
        let symbolic = PowerKernel::new(self.clone(), n)?;
        if &symbolic.total() <= materialize_limit {
            Ok(Power::Materialized {
                kernel: symbolic.materialize_unchecked(),
                exponent: n,
            })
        } else {
            Ok(Power::Symbolic(symbolic))
        }
    }

    pub fn probability<F>(&self, predicate: F) -> Rational
    where
        F: Fn(&OutcomeLabel) -> bool,
    {
        let hits: BigUint = self
            .counts
            .iter()
            .filter(|(l, _)| predicate(l))
            .map(|(_, c)| c)
            .sum();
        Rational::from_counts(&hits, &self.total)
    }

    pub fn probability_of(&self, label: &OutcomeLabel) -> Rational {
        Rational::from_counts(&self.count(label), &self.total)
    }

    pub fn distribution(&self) -> BTreeMap<OutcomeLabel, Rational> {
        self.counts
            .iter()
            .map(|(l, c)| (l.clone(), Rational::from_counts(c, &self.total)))
            .collect()
    }

    /// Applies `f` to every label, merging counts of labels that collide.
    pub fn relabel<F>(&self, mut f: F) -> Result<Kernel>
    where
        F: FnMut(&OutcomeLabel) -> Result<OutcomeLabel>,
    {
        let mut out = Vec::with_capacity(self.counts.len());
        for (l, c) in &self.counts {
            out.push((f(l)?, c.clone()));
        }
        Kernel::from_counts(out)
    }

    /// Marginal kernel over the listed component positions.
    pub fn marginal(&self, positions: &[usize]) -> Result<Kernel> {
        self.relabel(|l| {
            let comps = positions
                .iter()
                .map(|&i| {
                    l.components().get(i).cloned().ok_or_else(|| {
                        Error::InvalidArgument(format!("label {l} has no component {i}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            OutcomeLabel::new(comps)
        })
        .map(|k| k.reduce())
    }

    /// Every universe as a label, each outcome repeated `count` times, in
    /// label order.
    pub fn enumerate_universes(&self, cap: u64) -> Result<Vec<OutcomeLabel>> {
        if self.total > BigUint::from(cap) {
            return Err(Error::EnumerationCap {
                total: self.total.to_string(),
                cap: cap.to_string(),
            });
        }
        let mut out = Vec::new();
        for (label, count) in &self.counts {
            let n: u64 = count.try_into().expect("count below cap");
            out.extend(std::iter::repeat_n(label, n as usize).cloned());
        }
        Ok(out)
    }
}

/// Result of [`Kernel::power`].
#[derive(Clone, Debug, PartialEq)]
pub enum Power {
    Materialized { kernel: Kernel, exponent: u64 },
    Symbolic(PowerKernel),
}

impl Power {
    pub fn total(&self) -> BigUint {
        match self {
            Power::Materialized { kernel, .. } => kernel.total().clone(),
            Power::Symbolic(pk) => pk.total(),
        }
    }

    pub fn probability(&self, query: &FactorQuery<'_>) -> Result<Rational> {
        match self {
            Power::Materialized { kernel, exponent } => {
                let width = kernel
                    .width()
                    .ok_or_else(|| Error::UnsupportedQuery("labels of mixed width".into()))?;
                let exponent = *exponent as usize;
                if width % exponent != 0 {
                    return Err(Error::UnsupportedQuery(format!(
                        "label width {width} is not a multiple of {exponent}"
                    )));
                }
                // labels split evenly, so per-label evaluation cannot fail
                Ok(kernel.probability(|l| query.matches(l, width / exponent).unwrap_or(false)))
            }
            Power::Symbolic(pk) => pk.probability(query),
        }
    }
}

pub type Marginal<'a> = &'a dyn Fn(&OutcomeLabel) -> bool;

/// A question about a tensor power, phrased per factor where possible.
#[derive(Clone, Copy)]
pub enum FactorQuery<'a> {
    /// Every factor satisfies the marginal.
    Every(Marginal<'a>),
    /// At least one factor satisfies the marginal.
    Any(Marginal<'a>),
    /// Exactly `k` factors satisfy the marginal.
    Exactly(u64, Marginal<'a>),
    /// Arbitrary predicate on the whole label. Not answerable symbolically.
    Joint(Marginal<'a>),
}

impl fmt::Debug for FactorQuery<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorQuery::Every(_) => f.write_str("Every(..)"),
            FactorQuery::Any(_) => f.write_str("Any(..)"),
            FactorQuery::Exactly(k, _) => write!(f, "Exactly({k}, ..)"),
            FactorQuery::Joint(_) => f.write_str("Joint(..)"),
        }
    }
}

impl FactorQuery<'_> {
    /// Evaluates the query on an explicit label made of factors of
    /// `factor_width` components.
    pub fn matches(&self, label: &OutcomeLabel, factor_width: usize) -> Result<bool> {
        let hits = |m: Marginal<'_>| -> Result<usize> {
            Ok(label.factors(factor_width)?.iter().filter(|f| m(f)).count())
        };
        Ok(match *self {
            FactorQuery::Every(m) => hits(m)? == label.width() / factor_width,
            FactorQuery::Any(m) => hits(m)? > 0,
            FactorQuery::Exactly(k, m) => hits(m)? as u64 == k,
            FactorQuery::Joint(p) => p(label),
        })
    }
}

/// `base^⊗exponent`, never listed.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerKernel {
    base: Kernel,
    exponent: u64,
}

impl PowerKernel {
    pub fn new(base: Kernel, exponent: u64) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::InvalidArgument("exponent must be at least 1".into()));
        }
        Ok(PowerKernel {
            base: base.reduce(),
            exponent,
        })
    }

    pub fn base(&self) -> &Kernel {
        &self.base
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn total(&self) -> BigUint {
        num_traits::pow(self.base.total().clone(), self.exponent as usize)
    }

    pub fn materialize(&self, limit: &BigUint) -> Result<Kernel> {
        let total = self.total();
        if &total > limit {
            return Err(Error::EnumerationCap {
                total: total.to_string(),
                cap: limit.to_string(),
            });
        }
        Ok(self.materialize_unchecked())
    }

    fn materialize_unchecked(&self) -> Kernel {
        let mut k = self.base.clone();
        for _ in 1..self.exponent {
            k = k.tensor(&self.base);
        }
        k
    }

    pub fn probability(&self, query: &FactorQuery<'_>) -> Result<Rational> {
        let n = self.exponent;
        match *query {
            FactorQuery::Every(m) => Ok(self.base.probability(m).pow(n)),
            FactorQuery::Any(m) => {
                let miss = Rational::one() - self.base.probability(m);
                Ok(Rational::one() - miss.pow(n))
            }
            FactorQuery::Exactly(k, m) => Ok(self
                .match_count_distribution(m)
                .remove(&k)
                .unwrap_or_else(Rational::zero)),
            FactorQuery::Joint(_) => Err(Error::UnsupportedQuery(
                "predicate is not a per-factor marginal".into(),
            )),
        }
    }

    /// Exact distribution of how many of the `exponent` factors satisfy
    /// `marginal`: C(n, k) m^k (T - m)^(n - k) / T^n.
    pub fn match_count_distribution(&self, marginal: Marginal<'_>) -> BTreeMap<u64, Rational> {
        let hits: BigUint = self
            .base
            .counts()
            .iter()
            .filter(|(l, _)| marginal(l))
            .map(|(_, c)| c)
            .sum();
        let misses = self.base.total() - &hits;
        let total = self.total();
        let n = self.exponent;
        let mut out = BTreeMap::new();
        let mut binom = BigUint::one();
        for k in 0..=n {
            if k > 0 {
                binom = binom * BigUint::from(n - k + 1) / BigUint::from(k);
            }
            let ways = &binom
                * num_traits::pow(hits.clone(), k as usize)
                * num_traits::pow(misses.clone(), (n - k) as usize);
            out.insert(k, Rational::from_counts(&ways, &total));
        }
        out
    }
}
