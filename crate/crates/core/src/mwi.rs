//! Many-Worlds branching trees with exact branch weights, and their
//! decomposition into equal-weight filaments.
//!
//! A tree branches on one event per level in a chosen viewer order. Branch
//! weights come from a [`Correlator`], which supplies the kernel of the next
//! event given the outcomes already on the path. Slicing the tree into the
//! minimal number of equal filaments gives back a kernel; for a consistent
//! correlator that kernel is the same for every viewer order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;

use crate::entanglement::{
    collapse_joint, spin_token, ExperimentConfig, MeasurementOrder, Mode, Party, Spin, SpinOutcome,
};
use crate::error::{Error, Result};
use crate::kernel::{check_permutation, validate_token, Kernel, OutcomeLabel};
use crate::rational::{AngleDeg, Rational};

/// A branching event: a name and the kernel of its outcomes when it does not
/// depend on other events.
#[derive(Clone, Debug, PartialEq)]
pub struct EventSpec {
    pub name: String,
    pub kernel: Kernel,
}

impl EventSpec {
    pub fn new(name: impl Into<String>, kernel: Kernel) -> Result<Self> {
        let name = name.into();
        validate_token(&name)?;
        if kernel.width() != Some(1) {
            return Err(Error::InvalidLabel(format!(
                "event {name} must have single-token outcomes"
            )));
        }
        Ok(EventSpec {
            name,
            kernel: kernel.reduce(),
        })
    }

    /// One event per component of `joint`, each carrying its marginal.
    pub fn from_joint(joint: &Kernel, names: &[&str]) -> Result<Vec<EventSpec>> {
        if joint.width() != Some(names.len()) {
            return Err(Error::InvalidArgument(format!(
                "joint kernel labels must have {} components",
                names.len()
            )));
        }
        names
            .iter()
            .enumerate()
            .map(|(i, n)| EventSpec::new(*n, joint.marginal(&[i])?))
            .collect()
    }
}

/// Outcomes already realised on a path, keyed by event index.
pub type History = BTreeMap<usize, String>;

/// Conditional kernels keyed by event name and the named outcomes that
/// precede it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConditionalTable {
    entries: BTreeMap<(String, Vec<(String, String)>), Kernel>,
}

impl ConditionalTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, event: &str, given: &[(&str, &str)], kernel: Kernel) {
        let mut key: Vec<(String, String)> = given
            .iter()
            .map(|(e, o)| (e.to_string(), o.to_string()))
            .collect();
        key.sort();
        self.entries
            .insert((event.to_string(), key), kernel.reduce());
    }

    fn lookup(&self, events: &[EventSpec], event: usize, history: &History) -> Result<Kernel> {
        let mut key: Vec<(String, String)> = history
            .iter()
            .map(|(&i, o)| (events[i].name.clone(), o.clone()))
            .collect();
        key.sort();
        let describe = || {
            key.iter()
                .map(|(e, o)| format!("{e}={o}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        self.entries
            .get(&(events[event].name.clone(), key.clone()))
            .cloned()
            .ok_or_else(|| Error::MissingConditional {
                event: events[event].name.clone(),
                history: format!("{{{}}}", describe()),
            })
    }
}

/// Source of branch weights for the next event on a path.
#[derive(Clone, Debug, PartialEq)]
pub enum Correlator {
    /// Every event branches by its own kernel.
    Independent,
    /// Conditionals are read off a declared joint whose label component `i`
    /// is the outcome of event `i`.
    Joint(Kernel),
    /// Conditionals are given explicitly and may be mutually inconsistent.
    Conditional(ConditionalTable),
}

impl Correlator {
    fn conditional(&self, events: &[EventSpec], event: usize, history: &History) -> Result<Kernel> {
        match self {
            Correlator::Independent => Ok(events[event].kernel.clone()),
            Correlator::Joint(joint) => {
                if joint.width() != Some(events.len()) {
                    return Err(Error::InvalidArgument(format!(
                        "joint kernel labels must have {} components",
                        events.len()
                    )));
                }
                let consistent = joint
                    .counts()
                    .iter()
                    .filter(|(l, _)| history.iter().all(|(&i, o)| &l.components()[i] == o));
                let mut acc: BTreeMap<OutcomeLabel, BigUint> = BTreeMap::new();
                for (l, c) in consistent {
                    let token = OutcomeLabel::single(l.components()[event].clone())?;
                    *acc.entry(token).or_default() += c;
                }
                if acc.is_empty() {
                    return Err(Error::MissingConditional {
                        event: events[event].name.clone(),
                        history: format!("{history:?}"),
                    });
                }
                Ok(Kernel::from_counts(acc)?.reduce())
            }
            Correlator::Conditional(table) => table.lookup(events, event, history),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchNode {
    /// Event index and outcome token of the branch leading here; `None` at
    /// the root.
    pub outcome: Option<(usize, String)>,
    pub weight: Rational,
    pub children: Vec<BranchNode>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchTree {
    events: Vec<EventSpec>,
    order: Vec<usize>,
    root: BranchNode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Leaf {
    /// Outcome tokens in viewer order, with their event index.
    pub path: Vec<(usize, String)>,
    pub weight: Rational,
}

impl Leaf {
    /// Outcome label with components in event order.
    pub fn label(&self) -> OutcomeLabel {
        let mut sorted = self.path.clone();
        sorted.sort_by_key(|(i, _)| *i);
        OutcomeLabel::new(sorted.into_iter().map(|(_, t)| t)).expect("tokens validated")
    }
}

impl BranchTree {
    /// Branches on `events[order[0]]`, then `events[order[1]]`, and so on.
    pub fn build(events: &[EventSpec], order: &[usize], correlator: &Correlator) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::NoEvents);
        }
        check_permutation(order, events.len())?;
        let mut root = BranchNode {
            outcome: None,
            weight: Rational::one(),
            children: Vec::new(),
        };
        grow(&mut root, events, order, correlator, &mut History::new())?;
        Ok(BranchTree {
            events: events.to_vec(),
            order: order.to_vec(),
            root,
        })
    }

    pub fn root(&self) -> &BranchNode {
        &self.root
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn events(&self) -> &[EventSpec] {
        &self.events
    }

    pub fn leaves(&self) -> Vec<Leaf> {
        fn walk(node: &BranchNode, path: &mut Vec<(usize, String)>, out: &mut Vec<Leaf>) {
            if let Some(o) = &node.outcome {
                path.push(o.clone());
            }
            if node.children.is_empty() {
                out.push(Leaf {
                    path: path.clone(),
                    weight: node.weight.clone(),
                });
            } else {
                for c in &node.children {
                    walk(c, path, out);
                }
            }
            if node.outcome.is_some() {
                path.pop();
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut Vec::new(), &mut out);
        out
    }

    /// Indented text: one line per node with its exact weight.
    pub fn render(&self) -> String {
        let names: Vec<&str> = self
            .order
            .iter()
            .map(|&i| self.events[i].name.as_str())
            .collect();
        let mut out = format!("#tree v1 order={}\n", names.join(","));
        fn walk(node: &BranchNode, events: &[EventSpec], depth: usize, out: &mut String) {
            match &node.outcome {
                None => writeln!(out, "root {}", node.weight).unwrap(),
                Some((i, t)) => writeln!(
                    out,
                    "{}{}={} {}",
                    "  ".repeat(depth),
                    events[*i].name,
                    t,
                    node.weight
                )
                .unwrap(),
            }
            for c in &node.children {
                walk(c, events, depth + 1, out);
            }
        }
        walk(&self.root, &self.events, 0, &mut out);
        out
    }
}

fn grow(
    node: &mut BranchNode,
    events: &[EventSpec],
    order: &[usize],
    correlator: &Correlator,
    history: &mut History,
) -> Result<()> {
    let Some((&event, rest)) = order.split_first() else {
        return Ok(());
    };
    let cond = correlator.conditional(events, event, history)?;
    if cond.width() != Some(1) {
        return Err(Error::InvalidLabel(format!(
            "conditional kernel for {} must have single-token outcomes",
            events[event].name
        )));
    }
    for (label, count) in cond.counts() {
        let token = label.components()[0].clone();
        let weight = &node.weight * &Rational::from_counts(count, cond.total());
        let mut child = BranchNode {
            outcome: Some((event, token.clone())),
            weight,
            children: Vec::new(),
        };
        history.insert(event, token);
        grow(&mut child, events, rest, correlator, history)?;
        history.remove(&event);
        node.children.push(child);
    }
    Ok(())
}

/// Tree branching in the listed event order.
pub fn build_tree(events: &[EventSpec], correlator: &Correlator) -> Result<BranchTree> {
    let order: Vec<usize> = (0..events.len()).collect();
    BranchTree::build(events, &order, correlator)
}

/// Slices the tree into L equal filaments, L the lcm of the leaf weight
/// denominators; each leaf of weight w contributes w·L filaments labelled by
/// its outcomes in event order.
pub fn filament_decomposition(tree: &BranchTree) -> Kernel {
    let leaves = tree.leaves();
    let lcm = leaves
        .iter()
        .fold(BigInt::one(), |acc, l| acc.lcm(l.weight.denom()));
    let counts = leaves.iter().map(|leaf| {
        let n = leaf.weight.scaled_numerator(&lcm);
        (leaf.label(), n.to_biguint().expect("positive weight"))
    });
    Kernel::from_counts(counts).expect("tree has positive leaves")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViewerInvariance {
    pub agree: bool,
    pub first: BranchTree,
    pub second: BranchTree,
    pub first_filaments: Kernel,
    pub second_filaments: Kernel,
}

/// Builds the tree in both viewer orders and compares filament kernels.
///
/// A [`Correlator::Conditional`] whose orders disagree is a modelling fault
/// and returns [`Error::InconsistentCorrelator`].
pub fn viewer_invariance(
    events: &[EventSpec],
    order1: &[usize],
    order2: &[usize],
    correlator: &Correlator,
) -> Result<ViewerInvariance> {
    let first = BranchTree::build(events, order1, correlator)?;
    let second = BranchTree::build(events, order2, correlator)?;
    let first_filaments = filament_decomposition(&first);
    let second_filaments = filament_decomposition(&second);
    let agree = first_filaments == second_filaments;
    if !agree {
        if let Correlator::Conditional(_) = correlator {
            return Err(Error::InconsistentCorrelator(format!(
                "orders {order1:?} and {order2:?}"
            )));
        }
    }
    Ok(ViewerInvariance {
        agree,
        first,
        second,
        first_filaments,
        second_filaments,
    })
}

/// Events `Alice` and `Bob` with conditionals taken from the sequential
/// collapse calculation in each measurement order: Alice-first entries come
/// from the Alice-first collapse, Bob-first entries from the Bob-first one.
pub fn singlet_events(
    alice_angle: impl Into<AngleDeg>,
    bob_angle: impl Into<AngleDeg>,
    mode: Mode,
) -> Result<(Vec<EventSpec>, Correlator)> {
    let config = ExperimentConfig::new(alice_angle, bob_angle, MeasurementOrder::AliceFirst, mode)?;
    let mut table = ConditionalTable::new();
    for order in [MeasurementOrder::AliceFirst, MeasurementOrder::BobFirst] {
        let collapse = collapse_joint(&config.with_order(order))?;
        let first = order.first();
        let second = first.other();
        let first_kernel = party_kernel(&collapse.distribution, first, None)?;
        table.insert(&first.to_string(), &[], first_kernel);
        for spin in Spin::BOTH {
            let cond = party_kernel(&collapse.distribution, second, Some((first, spin)))?;
            let given = spin_token(first, spin);
            table.insert(&second.to_string(), &[(&first.to_string(), &given)], cond);
        }
    }
    let events = vec![
        EventSpec::new("Alice", Kernel::from_pairs([("Au", 1), ("Ad", 1)])?)?,
        EventSpec::new("Bob", Kernel::from_pairs([("Bu", 1), ("Bd", 1)])?)?,
    ];
    Ok((events, Correlator::Conditional(table)))
}

fn party_kernel(
    dist: &BTreeMap<SpinOutcome, Rational>,
    party: Party,
    given: Option<(Party, Spin)>,
) -> Result<Kernel> {
    let mut probs: BTreeMap<OutcomeLabel, Rational> = BTreeMap::new();
    for (o, p) in dist {
        if let Some((gp, gs)) = given {
            if o.spin_of(gp) != gs {
                continue;
            }
        }
        let label = OutcomeLabel::single(spin_token(party, o.spin_of(party)))?;
        let entry = probs.entry(label).or_insert_with(Rational::zero);
        *entry = &*entry + p;
    }
    let norm: Rational = probs.values().sum();
    let probs: BTreeMap<_, _> = probs
        .into_iter()
        .filter(|(_, p)| p.is_positive())
        .map(|(l, p)| Ok((l, p.checked_div(&norm)?)))
        .collect::<Result<_>>()?;
    Kernel::from_probs(&probs)
}
